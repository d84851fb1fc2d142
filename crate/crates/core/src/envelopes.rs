//! Comparison functions of the distance-function Hessian and the
//! second-variation kernel Φ_δ built from them.
//!
//! Every function here depends on the radius ρ only through
//!
//! ```text
//! s(ρ) = √δ·sin ρ·cot(√δρ),   φ = s²,   ψ = cos ρ · s
//! ```
//!
//! `s` is evaluated as `√δ·sin ρ·cos(√δρ) / sin(√δρ)` away from the origin and
//! by its Taylor series below [`SERIES_CUTOFF`], so `φ` and `ψ` stay O(1) where
//! `cot(√δρ)` blows up.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{BranchFn, PiecewiseRadialFunction};

/// Below this radius `s(ρ)` is evaluated from its fourth-order series.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// Default grid resolution (radians) for locating sign changes of Φ_δ.
pub const DEFAULT_SCAN_RESOLUTION: f64 = 1e-3;

pub const MIN_DIMENSION: usize = 5;

/// Sectional-curvature pinching constant δ ∈ (1/4, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct PinchParameter(f64);

impl PinchParameter {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.25 && delta <= 1.0 {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidDelta(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

/// Geodesic distance ρ ∈ (0, π) from the center point.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct RadialCoordinate(f64);

impl RadialCoordinate {
    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho < PI {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidRadius(rho))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<RadialCoordinate> for f64 {
    fn from(rho: RadialCoordinate) -> f64 {
        rho.0
    }
}

/// Which sin²ρ coefficient Ψ carries.
///
/// The explicit four-branch listing of Φ_δ and the envelope-combination
/// statement disagree on this coefficient:
///
/// * `Listing`: `(2/n + n)(1 − δ) − (n − 1)δ/2`
/// * `Proposition`: `(2/n + n)(1 − δ) − (1 − (n − 1)δ)/2`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiVariant {
    Listing,
    Proposition,
}

impl PsiVariant {
    pub const ALL: [PsiVariant; 2] = [PsiVariant::Listing, PsiVariant::Proposition];

    pub fn as_str(self) -> &'static str {
        match self {
            PsiVariant::Listing => "listing",
            PsiVariant::Proposition => "proposition",
        }
    }
}

impl fmt::Display for PsiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The six Hessian-comparison envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeKind {
    /// Lower bound of λᵢλⱼ.
    F1,
    /// Upper bound of λᵢλⱼ.
    F2,
    /// Lower bound of λᵢ².
    G1,
    /// Upper bound of λᵢ².
    G2,
    /// Lower bound of cos ρ · λᵢ.
    H1,
    /// Upper bound of cos ρ · λᵢ.
    H2,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 6] = [
        EnvelopeKind::F1,
        EnvelopeKind::F2,
        EnvelopeKind::G1,
        EnvelopeKind::G2,
        EnvelopeKind::H1,
        EnvelopeKind::H2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::F1 => "f1",
            EnvelopeKind::F2 => "f2",
            EnvelopeKind::G1 => "g1",
            EnvelopeKind::G2 => "g2",
            EnvelopeKind::H1 => "h1",
            EnvelopeKind::H2 => "h2",
        }
    }
}

/// Sign class of Φ_δ(ρ); zero counts as nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelSign {
    NonNegative,
    Negative,
}

impl KernelSign {
    pub fn of(value: f64) -> Self {
        if value >= 0.0 {
            KernelSign::NonNegative
        } else {
            KernelSign::Negative
        }
    }
}

/// Branch of the volume weight v_δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightBranch {
    /// `(sin(√δρ)/√δ)^{n−1}`, the upper volume-comparison bound.
    Comparison,
    /// `sin^{n−1} ρ`, the lower bound.
    Round,
}

impl WeightBranch {
    pub fn for_sign(sign: KernelSign) -> Self {
        match sign {
            KernelSign::NonNegative => WeightBranch::Comparison,
            KernelSign::Negative => WeightBranch::Round,
        }
    }
}

/// `√δ·sin ρ·cot(√δρ)` for `0 ≤ ρ`, `√δ·ρ < π`; no domain check.
pub(crate) fn cot_ratio(delta: f64, sqrt_delta: f64, rho: f64) -> f64 {
    if rho < SERIES_CUTOFF {
        let r2 = rho * rho;
        let c2 = 1.0 / 6.0 + delta / 3.0;
        let c4 = 1.0 / 120.0 + delta / 18.0 - delta * delta / 45.0;
        1.0 - c2 * r2 + c4 * r2 * r2
    } else {
        let t = sqrt_delta * rho;
        sqrt_delta * rho.sin() * t.cos() / t.sin()
    }
}

fn check_cot_domain(delta: PinchParameter, rho: f64) -> Result<()> {
    let scaled = delta.sqrt() * rho;
    if rho > 0.0 && scaled < PI {
        Ok(())
    } else {
        Err(Error::CotangentDomain {
            delta: delta.value(),
            rho,
            scaled,
        })
    }
}

/// φ = δ·sin²ρ·cot²(√δρ).
pub fn phi_base(delta: PinchParameter, rho: f64) -> Result<f64> {
    check_cot_domain(delta, rho)?;
    let s = cot_ratio(delta.value(), delta.sqrt(), rho);
    Ok(s * s)
}

/// ψ = √δ·cos ρ·sin ρ·cot(√δρ).
pub fn psi_base(delta: PinchParameter, rho: f64) -> Result<f64> {
    check_cot_domain(delta, rho)?;
    Ok(rho.cos() * cot_ratio(delta.value(), delta.sqrt(), rho))
}

/// `tan(√δρ) + √δ·tan ρ` multiplied through by `cos(√δρ)·cos ρ`.
///
/// On `(π/2, π/(2√δ))` the factor `cos(√δρ)·cos ρ` is negative, so this is
/// positive at `π/2` and negative at `π/(2√δ)`, with the same zero as the
/// tangent form and no poles.
pub fn breakpoint_equation(delta: PinchParameter, rho: f64) -> f64 {
    let sd = delta.sqrt();
    let t = sd * rho;
    t.sin() * rho.cos() + sd * rho.sin() * t.cos()
}

/// ρ_δ, the radius in `(π/2, π/(2√δ))` where `tan(√δρ) + √δ·tan ρ = 0`.
///
/// At δ = 1 the bracket collapses and the limit `π/2` is returned.
pub fn rho_delta(delta: PinchParameter) -> Result<RadialCoordinate> {
    if delta.value() == 1.0 {
        return RadialCoordinate::new(FRAC_PI_2);
    }
    let (lo0, hi0) = (FRAC_PI_2, FRAC_PI_2 / delta.sqrt());
    let (f_lo, f_hi) = (breakpoint_equation(delta, lo0), breakpoint_equation(delta, hi0));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::BracketFailure {
            lo: lo0,
            hi: hi0,
            f_lo,
            f_hi,
        });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = breakpoint_equation(delta, mid);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // keep the endpoint with the smaller residual
    let root = if breakpoint_equation(delta, lo).abs() <= breakpoint_equation(delta, hi).abs() {
        lo
    } else {
        hi
    };
    if !(root >= lo0 && root <= hi0) {
        return Err(Error::BreakpointOrder {
            rho: root,
            lo: lo0,
            hi: hi0,
        });
    }
    RadialCoordinate::new(root)
}

/// The sin²ρ coefficient of Ψ.
pub fn psi_coefficient(n: usize, delta: f64, variant: PsiVariant) -> f64 {
    let nf = n as f64;
    let common = (2.0 / nf + nf) * (1.0 - delta);
    match variant {
        PsiVariant::Listing => common - (nf - 1.0) * delta / 2.0,
        PsiVariant::Proposition => common - (1.0 - (nf - 1.0) * delta) / 2.0,
    }
}

/// Everything needed to evaluate the kernel at one (n, δ, Ψ) choice.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelTerms {
    n: f64,
    delta: f64,
    sqrt_delta: f64,
    psi_coef: f64,
    /// `[π/2, ρ_δ, π/(2√δ)]`
    bp: [f64; 3],
}

impl KernelTerms {
    fn s(&self, rho: f64) -> f64 {
        cot_ratio(self.delta, self.sqrt_delta, rho)
    }

    fn psi_term(&self, rho: f64) -> f64 {
        let sin = rho.sin();
        0.5 + self.psi_coef * sin * sin
    }

    /// Branch `index` of the four-branch listing of Φ_δ.
    pub(crate) fn listing_branch(&self, index: usize, rho: f64) -> f64 {
        let n = self.n;
        let a = (n - 1.0) * (n - 1.0) / 2.0;
        let s = self.s(rho);
        let cos = rho.cos();
        let (c2, phi, psi) = (cos * cos, s * s, cos * s);
        let base = self.psi_term(rho);
        match index {
            0 => base - (4.5 * n + 1.5) * c2 + (a + 10.0) * phi + 1.5 * (n - 1.0) * psi,
            1 => base + 1.5 * (n - 1.0) * c2 + (a + 10.0) * phi - (4.0 * n + 2.0) * psi,
            2 => base + (a + 1.5 * (n - 1.0) + 10.0) * c2 - (4.0 * n + 2.0) * psi,
            3 => base + (a + 1.5 * (n - 1.0) + 10.0) * c2 - (4.5 * n - 0.5) * phi - 2.0 * psi,
            _ => unreachable!("Φ_δ has four branches"),
        }
    }

    pub(crate) fn listing_branch_index(&self, rho: f64) -> usize {
        self.bp.partition_point(|&b| b < rho)
    }

    pub(crate) fn listing(&self, rho: f64) -> f64 {
        self.listing_branch(self.listing_branch_index(rho), rho)
    }

    fn envelope_breakpoints(&self, kind: EnvelopeKind) -> Vec<f64> {
        let [half_pi, rho_d, cut] = self.bp;
        match kind {
            EnvelopeKind::F1 | EnvelopeKind::G1 => vec![half_pi, cut],
            EnvelopeKind::F2 | EnvelopeKind::G2 => vec![rho_d],
            EnvelopeKind::H1 | EnvelopeKind::H2 => vec![half_pi],
        }
    }

    pub(crate) fn envelope_branch(&self, kind: EnvelopeKind, index: usize, rho: f64) -> f64 {
        let cos = rho.cos();
        let c2 = || cos * cos;
        let phi = || {
            let s = self.s(rho);
            s * s
        };
        let psi = || cos * self.s(rho);
        match (kind, index) {
            (EnvelopeKind::F1, 0) | (EnvelopeKind::G1, 0) | (EnvelopeKind::H1, 0) => c2(),
            (EnvelopeKind::F1, 1) => psi(),
            (EnvelopeKind::G1, 1) => 0.0,
            (EnvelopeKind::F1, 2) | (EnvelopeKind::G1, 2) => phi(),
            (EnvelopeKind::F2, 0) | (EnvelopeKind::G2, 0) => phi(),
            (EnvelopeKind::F2, 1) | (EnvelopeKind::G2, 1) | (EnvelopeKind::H2, 1) => c2(),
            (EnvelopeKind::H1, 1) | (EnvelopeKind::H2, 0) => psi(),
            _ => unreachable!("no branch {index} for {kind:?}"),
        }
    }

    pub(crate) fn envelope(&self, kind: EnvelopeKind, rho: f64) -> f64 {
        let index = self.envelope_breakpoints(kind).partition_point(|&b| b < rho);
        self.envelope_branch(kind, index, rho)
    }

    /// Φ_δ assembled from the six envelopes.
    pub(crate) fn envelope_form(&self, rho: f64) -> f64 {
        let n = self.n;
        let e = |k| self.envelope(k, rho);
        self.psi_term(rho)
            + 4.0 * e(EnvelopeKind::F2)
            + ((n - 1.0) * (n - 1.0) / 2.0 + 6.0) * e(EnvelopeKind::G2)
            + 1.5 * (n - 1.0) * e(EnvelopeKind::H2)
            - 4.0 * n * e(EnvelopeKind::F1)
            - (n - 1.0) / 2.0 * e(EnvelopeKind::G1)
            - 2.0 * e(EnvelopeKind::H1)
    }

    pub(crate) fn weight(&self, branch: WeightBranch, rho: f64) -> f64 {
        let exponent = self.n as i32 - 1;
        match branch {
            WeightBranch::Comparison => ((self.sqrt_delta * rho).sin() / self.sqrt_delta).powi(exponent),
            WeightBranch::Round => rho.sin().powi(exponent),
        }
    }
}

/// Dimension, pinching constant and Ψ variant, with ρ_δ resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    n: usize,
    delta: PinchParameter,
    psi_variant: PsiVariant,
    rho_delta: f64,
    scan_resolution: f64,
}

impl KernelConfig {
    pub fn new(n: usize, delta: PinchParameter, psi_variant: PsiVariant) -> Result<Self> {
        if n < MIN_DIMENSION {
            return Err(Error::InvalidDimension(n));
        }
        let rho_delta = rho_delta(delta)?.value();
        Ok(Self {
            n,
            delta,
            psi_variant,
            rho_delta,
            scan_resolution: DEFAULT_SCAN_RESOLUTION,
        })
    }

    /// Shorthand taking a raw δ.
    pub fn from_raw(n: usize, delta: f64, psi_variant: PsiVariant) -> Result<Self> {
        Self::new(n, PinchParameter::new(delta)?, psi_variant)
    }

    pub fn with_scan_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "scan resolution {resolution} outside (0, 1)"
            )));
        }
        self.scan_resolution = resolution;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> PinchParameter {
        self.delta
    }

    pub fn psi_variant(&self) -> PsiVariant {
        self.psi_variant
    }

    pub fn rho_delta(&self) -> f64 {
        self.rho_delta
    }

    pub fn scan_resolution(&self) -> f64 {
        self.scan_resolution
    }

    /// Interior breakpoints of Φ_δ: `[π/2, ρ_δ, π/(2√δ)]`.
    pub fn breakpoints(&self) -> [f64; 3] {
        [FRAC_PI_2, self.rho_delta, FRAC_PI_2 / self.delta.sqrt()]
    }

    pub fn psi_coefficient(&self) -> f64 {
        psi_coefficient(self.n, self.delta.value(), self.psi_variant)
    }

    pub(crate) fn terms(&self) -> KernelTerms {
        self.terms_with_psi_coefficient(self.psi_coefficient())
    }

    pub(crate) fn terms_with_psi_coefficient(&self, psi_coef: f64) -> KernelTerms {
        KernelTerms {
            n: self.n as f64,
            delta: self.delta.value(),
            sqrt_delta: self.delta.sqrt(),
            psi_coef,
            bp: self.breakpoints(),
        }
    }

    /// Φ_δ from the four-branch listing.
    pub fn kernel(&self) -> PiecewiseRadialFunction {
        self.kernel_with_psi_coefficient(self.psi_coefficient())
    }

    /// Listing-form Φ_δ with an explicit Ψ coefficient, for sensitivity checks.
    pub fn kernel_with_psi_coefficient(&self, psi_coef: f64) -> PiecewiseRadialFunction {
        let terms = self.terms_with_psi_coefficient(psi_coef);
        let branches = (0..4)
            .map(|i| Box::new(move |rho| terms.listing_branch(i, rho)) as BranchFn)
            .collect();
        PiecewiseRadialFunction::new(self.breakpoints().to_vec(), branches)
            .expect("kernel breakpoints are validated at construction")
    }

    pub fn envelope(&self, kind: EnvelopeKind) -> PiecewiseRadialFunction {
        let terms = self.terms();
        let breakpoints = terms.envelope_breakpoints(kind);
        let branches = (0..=breakpoints.len())
            .map(|i| Box::new(move |rho| terms.envelope_branch(kind, i, rho)) as BranchFn)
            .collect();
        PiecewiseRadialFunction::new(breakpoints, branches).expect("envelope breakpoints are validated at construction")
    }
}

pub fn envelope_value(config: &KernelConfig, kind: EnvelopeKind, rho: RadialCoordinate) -> f64 {
    config.terms().envelope(kind, rho.value())
}

pub fn envelope_f1(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::F1, rho)
}

pub fn envelope_f2(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::F2, rho)
}

pub fn envelope_g1(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::G1, rho)
}

pub fn envelope_g2(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::G2, rho)
}

pub fn envelope_h1(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::H1, rho)
}

pub fn envelope_h2(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    envelope_value(config, EnvelopeKind::H2, rho)
}

/// Φ_δ(ρ) from the four-branch listing.
pub fn kernel_phi(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    config.terms().listing(rho.value())
}

/// Φ_δ(ρ) as `½ + Ψ-term + 4f₂ + ((n−1)²/2+6)g₂ + (3/2)(n−1)h₂ − 4nf₁ − ((n−1)/2)g₁ − 2h₁`.
pub fn kernel_phi_envelope_form(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    config.terms().envelope_form(rho.value())
}

/// v_δ(ρ) for a given sign of Φ_δ(ρ).
pub fn volume_weight(config: &KernelConfig, rho: RadialCoordinate, phi_sign: KernelSign) -> f64 {
    config.terms().weight(WeightBranch::for_sign(phi_sign), rho.value())
}

/// v_δ(ρ) with the sign of Φ_δ(ρ) computed internally.
pub fn volume_weight_auto(config: &KernelConfig, rho: RadialCoordinate) -> f64 {
    volume_weight(config, rho, KernelSign::of(kernel_phi(config, rho)))
}
