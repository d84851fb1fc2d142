//! Invariant suites run by `pinch check`.
//!
//! Each suite returns a [`CheckOutcome`] with the worst violation it saw.
//! Suites marked `parameterized` take their tolerance from
//! [`CheckOptions::tol`] when it is set; the others compare against fixed
//! thresholds.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::envelopes::{breakpoint_equation, rho_delta, EnvelopeKind, KernelConfig, PinchParameter, PsiVariant};
use crate::quadrature::{integrate_piecewise, integrate_radial, oracle_integrate};
use crate::threshold::{find_threshold_with, integral_i_with, ThresholdOptions};

pub const CONTINUITY_TOL: f64 = 1e-9;
pub const ORDERING_TOL: f64 = 1e-12;
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
pub const DUAL_PATH_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-8;
pub const WALLIS_TOL: f64 = 1e-10;

pub const ORDERING_GRID_POINTS: usize = 10_000;
pub const DUAL_PATH_GRID_POINTS: usize = 2_000;
pub const ROOT_SAMPLES: usize = 200;
pub const ORACLE_POINTS: usize = 20_001;
pub const ORACLE_DELTAS: [f64; 3] = [0.90, 0.95, 0.99];
/// Offset on either side of δ(n) at which the threshold certificate is tested.
pub const CERTIFICATE_OFFSET: f64 = 1e-3;

/// `0.30, 0.35, …, 0.95` followed by `0.995`.
pub fn continuity_deltas() -> Vec<f64> {
    let mut deltas: Vec<f64> = (0..14).map(|k| 0.30 + 0.05 * k as f64).collect();
    deltas.push(0.995);
    deltas
}

/// `count` values strictly inside `(lo, hi)`, evenly spaced.
pub fn open_linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

/// Midpoint grid of `count` radii in `(0, π)`.
pub fn radial_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| PI * (k as f64 + 0.5) / count as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation observed (0 when there is nothing to measure).
    pub worst: f64,
    pub tolerance: f64,
    pub parameterized: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn measured(name: &'static str, worst: f64, tolerance: f64, parameterized: bool, detail: String) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
            parameterized,
            detail,
        }
    }

    fn failed(name: &'static str, tolerance: f64, parameterized: bool, detail: String) -> Self {
        Self {
            name,
            passed: false,
            worst: f64::INFINITY,
            tolerance,
            parameterized,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// Overrides the tolerance of parameterized suites.
    pub tol: Option<f64>,
    /// Added to the Ψ coefficient of the listing path in the dual-path suite.
    pub psi_perturbation: f64,
    pub dimensions: Vec<usize>,
    pub threshold: ThresholdOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: None,
            psi_perturbation: 0.0,
            dimensions: (5..=20).collect(),
            threshold: ThresholdOptions::default(),
        }
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    // NaN must not hide behind f64::max
    values.fold(0.0, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

fn configs(dimensions: &[usize], deltas: &[f64], variants: &[PsiVariant]) -> Result<Vec<KernelConfig>, String> {
    let mut out = Vec::new();
    for &n in dimensions {
        for &d in deltas {
            for &v in variants {
                out.push(KernelConfig::from_raw(n, d, v).map_err(|e| format!("n={n} δ={d}: {e}"))?);
            }
        }
    }
    Ok(out)
}

/// Left/right mismatch of every envelope and of Φ_δ at their breakpoints.
pub fn continuity(dimensions: &[usize], deltas: &[f64], tol: f64, parameterized: bool) -> CheckOutcome {
    const NAME: &str = "continuity";
    let configs = match configs(dimensions, deltas, &PsiVariant::ALL) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::failed(NAME, tol, parameterized, e),
    };
    let worst = max_of(configs.iter().map(|c| {
        let envelopes = max_of(EnvelopeKind::ALL.iter().map(|&k| c.envelope(k).max_jump()));
        envelopes.max(c.kernel().max_jump())
    }));
    let detail = format!("{} configurations, f1..h2 and Φ", configs.len());
    CheckOutcome::measured(NAME, worst, tol, parameterized, detail)
}

/// Envelope ordering and the eigenvalue bound `cos ρ ≤ √δ sin ρ cot(√δρ)`.
pub fn envelope_ordering(dimensions: &[usize], deltas: &[f64], grid_points: usize) -> CheckOutcome {
    const NAME: &str = "envelope_ordering";
    let configs = match configs(dimensions, deltas, &[PsiVariant::Listing]) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::failed(NAME, ORDERING_TOL, false, e),
    };
    let grid = radial_grid(grid_points);
    let worst = max_of(
        configs
            .par_iter()
            .map(|c| {
                let e: Vec<_> = EnvelopeKind::ALL.iter().map(|&k| c.envelope(k)).collect();
                let (sd, d) = (c.delta().sqrt(), c.delta().value());
                max_of(grid.iter().map(|&r| {
                    let v: Vec<f64> = e.iter().map(|f| f.evaluate(r)).collect();
                    let s = crate::envelopes::cot_ratio(d, sd, r);
                    [v[0] - v[1], v[2] - v[3], v[4] - v[5], -v[2], r.cos() - s]
                        .into_iter()
                        .fold(0.0, f64::max)
                }))
            })
            .collect::<Vec<_>>()
            .into_iter(),
    );
    let detail = format!("{} configurations × {grid_points} radii", configs.len());
    CheckOutcome::measured(NAME, worst, ORDERING_TOL, false, detail)
}

/// ρ_δ residual and bracket containment on `count` values of δ in (0.26, 0.999).
pub fn root_certificate(count: usize) -> CheckOutcome {
    const NAME: &str = "root_certificate";
    let mut worst: f64 = 0.0;
    let mut escaped = Vec::new();
    for d in open_linspace(0.26, 0.999, count) {
        let delta = match PinchParameter::new(d) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::failed(NAME, ROOT_RESIDUAL_TOL, false, e.to_string()),
        };
        match rho_delta(delta) {
            Ok(root) => {
                let r = root.value();
                worst = worst.max(breakpoint_equation(delta, r).abs());
                if !(r > FRAC_PI_2 && r < FRAC_PI_2 / delta.sqrt()) {
                    escaped.push(d);
                }
            }
            Err(e) => return CheckOutcome::failed(NAME, ROOT_RESIDUAL_TOL, false, format!("δ={d}: {e}")),
        }
    }
    if !escaped.is_empty() {
        return CheckOutcome::failed(
            NAME,
            ROOT_RESIDUAL_TOL,
            false,
            format!("root outside bracket for δ ∈ {escaped:?}"),
        );
    }
    CheckOutcome::measured(NAME, worst, ROOT_RESIDUAL_TOL, false, format!("{count} values of δ"))
}

/// Listing-form Φ_δ against the envelope combination on a dense radial grid.
pub fn dual_path(
    dimensions: &[usize],
    deltas: &[f64],
    grid_points: usize,
    tol: f64,
    parameterized: bool,
    psi_perturbation: f64,
) -> CheckOutcome {
    const NAME: &str = "dual_path";
    let configs = match configs(dimensions, deltas, &PsiVariant::ALL) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::failed(NAME, tol, parameterized, e),
    };
    let grid = radial_grid(grid_points);
    let worst = max_of(
        configs
            .par_iter()
            .map(|c| {
                let listing = c.kernel_with_psi_coefficient(c.psi_coefficient() + psi_perturbation);
                let terms = c.terms();
                max_of(
                    grid.iter()
                        .map(|&r| (listing.evaluate(r) - terms.envelope_form(r)).abs()),
                )
            })
            .collect::<Vec<_>>()
            .into_iter(),
    );
    let mut detail = format!("{} configurations × {grid_points} radii", configs.len());
    if psi_perturbation != 0.0 {
        detail.push_str(&format!(", Ψ coefficient perturbed by {psi_perturbation:e}"));
    }
    CheckOutcome::measured(NAME, worst, tol, parameterized, detail)
}

/// Adaptive I(n, δ) against the fixed composite-Simpson oracle.
pub fn oracle_agreement(dimensions: &[usize], deltas: &[f64], tol: f64, parameterized: bool) -> CheckOutcome {
    const NAME: &str = "oracle_agreement";
    let configs = match configs(dimensions, deltas, &[PsiVariant::Listing]) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::failed(NAME, tol, parameterized, e),
    };
    let diffs: Result<Vec<f64>, String> = configs
        .par_iter()
        .map(|c| {
            let adaptive = integrate_piecewise(c, 1e-12).map_err(|e| e.to_string())?;
            let oracle = oracle_integrate(c, ORACLE_POINTS).map_err(|e| e.to_string())?;
            Ok((adaptive.value - oracle).abs())
        })
        .collect();
    match diffs {
        Ok(d) => CheckOutcome::measured(
            NAME,
            max_of(d.into_iter()),
            tol,
            parameterized,
            format!("{} (n, δ) pairs, {ORACLE_POINTS}-point Simpson", configs.len()),
        ),
        Err(e) => CheckOutcome::failed(NAME, tol, parameterized, e),
    }
}

/// ∫₀^π sin⁴ = 3π/8 and ∫₀^π cos² sin⁴ = π/16 through the adaptive integrator.
pub fn wallis(tol: f64, parameterized: bool) -> CheckOutcome {
    const NAME: &str = "wallis";
    let a = integrate_radial(|x: f64| x.sin().powi(4), &[], 1e-13);
    let b = integrate_radial(|x: f64| x.cos().powi(2) * x.sin().powi(4), &[], 1e-13);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let worst = (a.value - 3.0 * PI / 8.0).abs().max((b.value - PI / 16.0).abs());
            CheckOutcome::measured(NAME, worst, tol, parameterized, "sin⁴ and cos²·sin⁴".into())
        }
        (Err(e), _) | (_, Err(e)) => CheckOutcome::failed(NAME, tol, parameterized, e.to_string()),
    }
}

/// I(n, 1) < 0 under the listing variant.
pub fn delta_one_sign(dimensions: &[usize], options: &ThresholdOptions) -> CheckOutcome {
    const NAME: &str = "delta_one_sign";
    let one = PinchParameter::new(1.0).expect("1 is a valid pinching constant");
    let mut worst = f64::NEG_INFINITY;
    for &n in dimensions {
        match integral_i_with(n, one, PsiVariant::Listing, options) {
            Ok(r) => worst = worst.max(r.value),
            Err(e) => return CheckOutcome::failed(NAME, 0.0, false, format!("n={n}: {e}")),
        }
    }
    let passed = worst < 0.0;
    CheckOutcome {
        name: NAME,
        passed,
        worst: worst.max(0.0),
        tolerance: 0.0,
        parameterized: false,
        detail: format!("max I(n, 1) = {worst:.6e}"),
    }
}

/// I(n, δ(n) + 1e-3) < 0 ≤ I(n, δ(n) − 1e-3) and bracket width ≤ tol, listing variant.
pub fn threshold_certificate(dimensions: &[usize], options: &ThresholdOptions) -> CheckOutcome {
    const NAME: &str = "threshold_certificate";
    let rows: Vec<Result<(usize, f64, f64, f64), String>> = dimensions
        .par_iter()
        .map(|&n| {
            let t = find_threshold_with(n, PsiVariant::Listing, options).map_err(|e| e.to_string())?;
            let at = |d: f64| {
                PinchParameter::new(d)
                    .and_then(|p| integral_i_with(n, p, PsiVariant::Listing, options))
                    .map(|r| r.value)
                    .map_err(|e| format!("n={n} δ={d}: {e}"))
            };
            let above = at(t.delta_n + CERTIFICATE_OFFSET)?;
            let below = at(t.delta_n - CERTIFICATE_OFFSET)?;
            Ok((n, t.bracket.1 - t.bracket.0, above, below))
        })
        .collect();
    let mut bad = Vec::new();
    let mut widest: f64 = 0.0;
    for row in rows {
        match row {
            Ok((n, width, above, below)) => {
                widest = widest.max(width);
                if !(above < 0.0 && below >= 0.0 && width <= options.tol) {
                    bad.push(format!("n={n} (I+={above:.3e}, I-={below:.3e}, width={width:.1e})"));
                }
            }
            Err(e) => bad.push(e),
        }
    }
    CheckOutcome {
        name: NAME,
        passed: bad.is_empty(),
        worst: widest,
        tolerance: options.tol,
        parameterized: false,
        detail: if bad.is_empty() {
            format!("{} dimensions", dimensions.len())
        } else {
            bad.join("; ")
        },
    }
}

pub fn run_all(options: &CheckOptions) -> CheckReport {
    let dims = &options.dimensions;
    let tol_or = |default: f64| options.tol.unwrap_or(default);
    let param = options.tol.is_some();
    let deltas = continuity_deltas();
    let mut with_one = deltas.clone();
    with_one.push(1.0);
    let outcomes = vec![
        continuity(dims, &deltas, tol_or(CONTINUITY_TOL), param),
        envelope_ordering(dims, &with_one, ORDERING_GRID_POINTS),
        root_certificate(ROOT_SAMPLES),
        dual_path(
            dims,
            &with_one,
            DUAL_PATH_GRID_POINTS,
            tol_or(DUAL_PATH_TOL),
            param,
            options.psi_perturbation,
        ),
        oracle_agreement(dims, &ORACLE_DELTAS, tol_or(ORACLE_TOL), param),
        wallis(tol_or(WALLIS_TOL), param),
        delta_one_sign(dims, &options.threshold),
        threshold_certificate(dims, &options.threshold),
    ];
    CheckReport { outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let d = continuity_deltas();
        assert_eq!(d.len(), 15);
        assert!((d[13] - 0.95).abs() < 1e-12);
        assert_eq!(d[14], 0.995);
        let l = open_linspace(0.26, 0.999, 200);
        assert_eq!(l.len(), 200);
        assert!(l[0] > 0.26 && l[199] < 0.999);
        let g = radial_grid(4);
        assert!(g[0] > 0.0 && g[3] < PI);
    }

    #[test]
    fn nan_is_a_violation() {
        assert!(max_of([0.0, f64::NAN, 1.0].into_iter()).is_nan());
        let o = CheckOutcome::measured("x", f64::NAN, 1.0, false, String::new());
        assert!(!o.passed);
    }

    #[test]
    fn perturbation_breaks_dual_path() {
        let clean = dual_path(&[5, 9], &[0.9, 0.97], 500, DUAL_PATH_TOL, false, 0.0);
        assert!(clean.passed, "{clean:?}");
        let perturbed = dual_path(&[5, 9], &[0.9, 0.97], 500, DUAL_PATH_TOL, false, 1e-3);
        assert!(!perturbed.passed);
    }

    #[test]
    fn loose_tolerance_only_touches_parameterized_suites() {
        let tight = wallis(WALLIS_TOL, false);
        let loose = wallis(1e-2, true);
        assert!(tight.passed && loose.passed);
        assert_eq!(loose.tolerance, 1e-2);
        assert_eq!(root_certificate(10).tolerance, ROOT_RESIDUAL_TOL);
    }
}
