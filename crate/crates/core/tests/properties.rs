use std::f64::consts::PI;

use pinch_core::{
    envelope_value, kernel_phi, kernel_phi_envelope_form, phi_base, psi_base, volume_weight, EnvelopeKind,
    KernelConfig, KernelSign, PinchParameter, PsiVariant, RadialCoordinate,
};
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = PsiVariant> {
    prop_oneof![Just(PsiVariant::Listing), Just(PsiVariant::Proposition)]
}

fn rho(r: f64) -> RadialCoordinate {
    RadialCoordinate::new(r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_is_continuous_at_breakpoints(n in 5usize..=20, d in 0.30f64..0.999, v in variant()) {
        let config = KernelConfig::from_raw(n, d, v).unwrap();
        let kernel = config.kernel();
        prop_assert!(kernel.max_jump() < 1e-9, "jump {}", kernel.max_jump());
        for kind in EnvelopeKind::ALL {
            let env = config.envelope(kind);
            prop_assert!(env.max_jump() < 1e-9, "{} jump {}", kind.name(), env.max_jump());
        }
    }

    #[test]
    fn envelopes_are_ordered(n in 5usize..=20, d in 0.30f64..=1.0, r in 1e-3f64..(PI - 1e-3)) {
        let config = KernelConfig::from_raw(n, d, PsiVariant::Listing).unwrap();
        let at = |k| envelope_value(&config, k, rho(r));
        prop_assert!(at(EnvelopeKind::F1) <= at(EnvelopeKind::F2) + 1e-12);
        prop_assert!(at(EnvelopeKind::G1) <= at(EnvelopeKind::G2) + 1e-12);
        prop_assert!(at(EnvelopeKind::H1) <= at(EnvelopeKind::H2) + 1e-12);
        prop_assert!(at(EnvelopeKind::G1) >= -1e-12);
    }

    #[test]
    fn cos_is_dominated_by_s_below_half_pi(d in 0.30f64..=1.0, t in 1e-3f64..0.999) {
        let p = PinchParameter::new(d).unwrap();
        let r = t * PI / 2.0;
        // ψ = cos·s and cos > 0 here
        let s = psi_base(p, r).unwrap() / r.cos();
        prop_assert!((s * s - phi_base(p, r).unwrap()).abs() < 1e-12);
        prop_assert!(r.cos() <= s + 1e-12);
    }

    #[test]
    fn listing_and_envelope_forms_agree(n in 5usize..=20, d in 0.30f64..=1.0, r in 1e-3f64..(PI - 1e-3), v in variant()) {
        let config = KernelConfig::from_raw(n, d, v).unwrap();
        let a = kernel_phi(&config, rho(r));
        let b = kernel_phi_envelope_form(&config, rho(r));
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn small_radius_limits(d in 0.30f64..=1.0, r in 1e-7f64..1e-5) {
        let p = PinchParameter::new(d).unwrap();
        prop_assert!((phi_base(p, r).unwrap() - 1.0).abs() < 1e-9);
        prop_assert!((psi_base(p, r).unwrap() - 1.0).abs() < 1e-9);
        let config = KernelConfig::from_raw(5, d, PsiVariant::Listing).unwrap();
        prop_assert!(volume_weight(&config, rho(r), KernelSign::NonNegative) < 1e-19);
    }

    #[test]
    fn comparison_weight_dominates_round(n in 5usize..=20, d in 0.30f64..=1.0, r in 1e-3f64..(PI - 1e-3)) {
        let config = KernelConfig::from_raw(n, d, PsiVariant::Listing).unwrap();
        let comparison = volume_weight(&config, rho(r), KernelSign::NonNegative);
        let round = volume_weight(&config, rho(r), KernelSign::Negative);
        prop_assert!(round <= comparison * (1.0 + 1e-12) + 1e-300);
    }
}
