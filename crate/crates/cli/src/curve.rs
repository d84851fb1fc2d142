use std::f64::consts::PI;

use anyhow::Result;
use pinch_core::envelopes::breakpoint_equation;
use pinch_core::{KernelConfig, KernelSign, PiecewiseRadialFunction, PsiVariant, RadialCoordinate, WeightBranch};
use serde::{Deserialize, Serialize};

use crate::args::CurveArgs;
use crate::output::{emit, opt, round_sig, sig, CsvRow};
use crate::Status;

pub const BREAKPOINT_LABELS: [&str; 3] = ["pi/2", "rho_delta", "pi/(2*sqrt(delta))"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub n: usize,
    pub variant: PsiVariant,
    pub rho: f64,
    pub phi: f64,
    pub weight: f64,
    pub integrand: f64,
    pub weight_branch: String,
    /// Breakpoint label; empty on uniform samples.
    pub breakpoint: String,
    pub phi_left: Option<f64>,
    pub phi_right: Option<f64>,
    /// Residual of the ρ_δ equation, on the ρ_δ row only.
    pub residual: Option<f64>,
}

impl CsvRow for CurveRecord {
    const HEADER: &'static [&'static str] = &[
        "n",
        "variant",
        "rho",
        "phi",
        "weight",
        "integrand",
        "weight_branch",
        "breakpoint",
        "phi_left",
        "phi_right",
        "residual",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.variant.to_string(),
            sig(self.rho),
            sig(self.phi),
            sig(self.weight),
            sig(self.integrand),
            self.weight_branch.clone(),
            self.breakpoint.clone(),
            opt(self.phi_left, sig),
            opt(self.phi_right, sig),
            opt(self.residual, sig),
        ]
    }
}

fn sample(config: &KernelConfig, kernel: &PiecewiseRadialFunction, rho: f64) -> CurveRecord {
    let phi = kernel.evaluate(rho);
    let sign = KernelSign::of(phi);
    let weight = pinch_core::volume_weight(config, RadialCoordinate::new(rho).expect("ρ inside (0, π)"), sign);
    CurveRecord {
        n: config.n(),
        variant: config.psi_variant(),
        rho: round_sig(rho),
        phi: round_sig(phi),
        weight: round_sig(weight),
        integrand: round_sig(phi * weight),
        weight_branch: match WeightBranch::for_sign(sign) {
            WeightBranch::Comparison => "comparison".into(),
            WeightBranch::Round => "round".into(),
        },
        breakpoint: String::new(),
        phi_left: None,
        phi_right: None,
        residual: None,
    }
}

/// Uniform samples followed by the three breakpoint rows, ordered by ρ.
pub fn curve(config: &KernelConfig, samples: usize) -> Vec<CurveRecord> {
    let kernel = config.kernel();
    let mut rows: Vec<CurveRecord> = (1..=samples)
        .map(|k| sample(config, &kernel, PI * k as f64 / (samples + 1) as f64))
        .collect();
    for (i, (&rho, label)) in config.breakpoints().iter().zip(BREAKPOINT_LABELS).enumerate() {
        let (left, right) = kernel.one_sided_values(i);
        let mut row = sample(config, &kernel, rho);
        row.breakpoint = label.into();
        row.phi_left = Some(round_sig(left));
        row.phi_right = Some(round_sig(right));
        if i == 1 {
            row.residual = Some(round_sig(breakpoint_equation(config.delta(), rho)));
        }
        rows.push(row);
    }
    // stable, so coincident breakpoints (δ = 1) keep their order
    rows.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    rows
}

#[derive(Debug, Serialize)]
pub struct CurveDocument {
    pub command: &'static str,
    pub delta: f64,
    pub samples: usize,
    pub rows: Vec<CurveRecord>,
}

pub fn run(args: &CurveArgs) -> Result<Status> {
    let samples = args.samples as usize;
    let mut rows = Vec::new();
    for n in args.n.to_vec() {
        for variant in args.variant.variants() {
            rows.extend(curve(&KernelConfig::new(n, args.delta, variant)?, samples));
        }
    }
    let document = CurveDocument {
        command: "curve",
        delta: args.delta.value(),
        samples,
        rows,
    };
    emit(&args.output, &document.rows, &document)?;
    Ok(Status::Success)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    #[test]
    fn row_count_and_breakpoint_flags() {
        let config = KernelConfig::from_raw(5, 0.95, PsiVariant::Listing).unwrap();
        let rows = curve(&config, 50);
        assert_eq!(rows.len(), 53);
        let flagged: Vec<&str> = rows
            .iter()
            .filter(|r| !r.breakpoint.is_empty())
            .map(|r| r.breakpoint.as_str())
            .collect();
        assert_eq!(flagged, BREAKPOINT_LABELS);
        assert!(rows.windows(2).all(|w| w[0].rho <= w[1].rho));
        let root = rows.iter().find(|r| r.breakpoint == "rho_delta").unwrap();
        assert!(root.residual.unwrap().abs() < 1e-10);
    }

    #[test]
    fn breakpoints_collapse_at_delta_one() {
        let config = KernelConfig::from_raw(7, 1.0, PsiVariant::Listing).unwrap();
        let rows = curve(&config, 10);
        let flagged: Vec<&CurveRecord> = rows.iter().filter(|r| !r.breakpoint.is_empty()).collect();
        assert_eq!(flagged.len(), 3);
        for r in flagged {
            assert_eq!(r.rho, round_sig(FRAC_PI_2));
            assert!((r.phi_left.unwrap() - r.phi_right.unwrap()).abs() < 1e-12);
        }
    }
}
