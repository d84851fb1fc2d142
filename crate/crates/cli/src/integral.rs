use anyhow::{Context, Result};
use pinch_core::{integrate_piecewise, sphere_area, KernelConfig, PsiVariant};
use serde::{Deserialize, Serialize};

use crate::args::IntegralArgs;
use crate::output::{emit, opt, round_sig, sig, CsvRow};
use crate::Status;

/// The closed form stated for I(n, 1); reported for comparison, not asserted.
pub fn claimed_delta_one(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (4.0 - n) / (n * n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralRecord {
    pub n: usize,
    pub delta: f64,
    pub variant: PsiVariant,
    pub value: f64,
    pub error_estimate: f64,
    pub subintervals: usize,
    pub sign_changes: usize,
    pub sphere_area: Option<f64>,
    /// |S^{n−1}|·I(n, δ).
    pub scaled_value: Option<f64>,
    /// Present at δ = 1 only.
    pub claimed_delta_one: Option<f64>,
    pub deviation_from_claimed: Option<f64>,
}

impl CsvRow for IntegralRecord {
    const HEADER: &'static [&'static str] = &[
        "n",
        "delta",
        "variant",
        "value",
        "error_estimate",
        "subintervals",
        "sign_changes",
        "sphere_area",
        "scaled_value",
        "claimed_delta_one",
        "deviation_from_claimed",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            sig(self.delta),
            self.variant.to_string(),
            sig(self.value),
            sig(self.error_estimate),
            self.subintervals.to_string(),
            self.sign_changes.to_string(),
            opt(self.sphere_area, sig),
            opt(self.scaled_value, sig),
            opt(self.claimed_delta_one, sig),
            opt(self.deviation_from_claimed, sig),
        ]
    }
}

pub fn integral_record(config: &KernelConfig, tol: f64, include_sphere_factor: bool) -> Result<IntegralRecord> {
    let n = config.n();
    let result = integrate_piecewise(config, tol).with_context(|| {
        format!(
            "I(n = {n}, δ = {}) under the {} variant",
            config.delta().value(),
            config.psi_variant()
        )
    })?;
    let area = include_sphere_factor.then(|| sphere_area(n));
    let claimed = (config.delta().value() == 1.0).then(|| claimed_delta_one(n));
    Ok(IntegralRecord {
        n,
        delta: round_sig(config.delta().value()),
        variant: config.psi_variant(),
        value: round_sig(result.value),
        error_estimate: round_sig(result.error_estimate),
        subintervals: result.subintervals,
        sign_changes: result.sign_change_points.len(),
        sphere_area: area.map(round_sig),
        scaled_value: area.map(|a| round_sig(a * result.value)),
        claimed_delta_one: claimed.map(round_sig),
        deviation_from_claimed: claimed.map(|c| round_sig(result.value - c)),
    })
}

#[derive(Debug, Serialize)]
pub struct IntegralDocument {
    pub command: &'static str,
    pub tol: f64,
    pub include_sphere_factor: bool,
    pub rows: Vec<IntegralRecord>,
}

pub fn run(args: &IntegralArgs) -> Result<Status> {
    let mut rows = Vec::new();
    for n in args.n.to_vec() {
        for variant in args.variant.variants() {
            let config = KernelConfig::new(n, args.delta, variant)?;
            let row = integral_record(&config, args.tol, args.include_sphere_factor)?;
            if let (Some(c), Some(d)) = (row.claimed_delta_one, row.deviation_from_claimed) {
                eprintln!(
                    "n = {n} ({variant}): I(n, 1) = {}, stated 2(4 − n)/n² = {}, difference {}",
                    sig(row.value),
                    sig(c),
                    sig(d)
                );
            }
            rows.push(row);
        }
    }
    let document = IntegralDocument {
        command: "integral",
        tol: args.tol,
        include_sphere_factor: args.include_sphere_factor,
        rows,
    };
    emit(&args.output, &document.rows, &document)?;
    Ok(Status::Success)
}
