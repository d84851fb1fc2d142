//! Sign of I(n, δ) = ∫₀^π Φ_δ v_δ dρ as a function of δ, and the threshold
//! δ(n) = inf{δ ∈ (0, 1) : I(n, δ) < 0}.
//!
//! Monotonicity of δ ↦ I(n, δ) is not assumed. A grid scan over
//! `[0.30, 0.999]` certifies the sign pattern first; bisection then runs
//! between the last nonnegative and first negative grid points of the first
//! crossing.

use rayon::prelude::*;
use serde::Serialize;

use crate::envelopes::{KernelConfig, KernelSign, PinchParameter, PsiVariant, DEFAULT_SCAN_RESOLUTION};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, IntegralResult};

pub const SCAN_START: f64 = 0.30;
pub const SCAN_END: f64 = 0.999;
pub const DEFAULT_SCAN_STEP: f64 = 1e-3;
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-6;
pub const DEFAULT_INTEGRATION_TOL: f64 = 1e-10;

/// Allowed |computed − published| per published entry.
pub const TABLE_MATCH_TOLERANCE: f64 = 5e-3;

/// Published δ(n) for 5 ≤ n ≤ 20.
pub const TABLE1: [(usize, f64); 16] = [
    (5, 0.94888),
    (6, 0.94551),
    (7, 0.94582),
    (8, 0.94789),
    (9, 0.95073),
    (10, 0.95384),
    (11, 0.95697),
    (12, 0.95997),
    (13, 0.96278),
    (14, 0.96539),
    (15, 0.96778),
    (16, 0.96998),
    (17, 0.97198),
    (18, 0.97381),
    (19, 0.97548),
    (20, 0.97700),
];

pub fn table1_value(n: usize) -> Option<f64> {
    TABLE1.iter().find(|(m, _)| *m == n).map(|(_, v)| *v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdOptions {
    /// Final bisection bracket width.
    pub tol: f64,
    pub scan_step: f64,
    pub integration_tol: f64,
    /// Radial grid resolution for sign changes of Φ_δ.
    pub scan_resolution: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_THRESHOLD_TOL,
            scan_step: DEFAULT_SCAN_STEP,
            integration_tol: DEFAULT_INTEGRATION_TOL,
            scan_resolution: DEFAULT_SCAN_RESOLUTION,
        }
    }
}

impl ThresholdOptions {
    fn validate(&self) -> Result<()> {
        if !(self.scan_step > 0.0 && self.scan_step <= 0.01) {
            return Err(Error::InvalidArgument(format!(
                "scan step {} outside (0, 0.01]",
                self.scan_step
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold tolerance {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

/// I(n, δ) at the default integration tolerance.
pub fn integral_i(n: usize, delta: PinchParameter, psi_variant: PsiVariant) -> Result<IntegralResult> {
    integral_i_with(n, delta, psi_variant, &ThresholdOptions::default())
}

pub fn integral_i_with(
    n: usize,
    delta: PinchParameter,
    psi_variant: PsiVariant,
    options: &ThresholdOptions,
) -> Result<IntegralResult> {
    let config = KernelConfig::new(n, delta, psi_variant)?.with_scan_resolution(options.scan_resolution)?;
    integrate_piecewise(&config, options.integration_tol)
}

fn integral_value(n: usize, delta: f64, psi_variant: PsiVariant, options: &ThresholdOptions) -> Result<f64> {
    Ok(integral_i_with(n, PinchParameter::new(delta)?, psi_variant, options)?.value)
}

/// δ grid `0.30, 0.30 + step, …` up to 0.999, always ending at 0.999.
pub fn scan_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.01) {
        return Err(Error::InvalidArgument(format!("scan step {step} outside (0, 0.01]")));
    }
    let mut grid: Vec<f64> = (0..)
        .map(|k| SCAN_START + k as f64 * step)
        .take_while(|d| *d <= SCAN_END + 1e-12)
        .map(|d| d.min(SCAN_END))
        .collect();
    if *grid.last().unwrap() < SCAN_END - 1e-12 {
        grid.push(SCAN_END);
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub delta: f64,
    pub sign: KernelSign,
    pub integral: f64,
}

/// A sign flip between grid points `index − 1` and `index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub index: usize,
    pub delta_before: f64,
    pub delta_after: f64,
    /// Sign after the flip.
    pub to: KernelSign,
}

/// Indices `i` with `signs[i] != signs[i − 1]`.
pub fn sign_flips(signs: &[KernelSign]) -> Vec<usize> {
    (1..signs.len()).filter(|&i| signs[i] != signs[i - 1]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignScan {
    pub n: usize,
    pub psi_variant: PsiVariant,
    pub points: Vec<ScanPoint>,
    pub crossings: Vec<Crossing>,
    /// The pattern is nonnegative, then negative, with exactly one flip.
    pub single_crossing: bool,
}

impl SignScan {
    fn from_points(n: usize, psi_variant: PsiVariant, points: Vec<ScanPoint>) -> Self {
        let signs: Vec<KernelSign> = points.iter().map(|p| p.sign).collect();
        let crossings: Vec<Crossing> = sign_flips(&signs)
            .into_iter()
            .map(|i| Crossing {
                index: i,
                delta_before: points[i - 1].delta,
                delta_after: points[i].delta,
                to: points[i].sign,
            })
            .collect();
        let single_crossing = crossings.len() == 1 && crossings[0].to == KernelSign::Negative;
        Self {
            n,
            psi_variant,
            points,
            crossings,
            single_crossing,
        }
    }
}

/// Sign of I(n, δ) on the scan grid.
pub fn scan_sign(n: usize, grid_step: f64, psi_variant: PsiVariant) -> Result<SignScan> {
    let options = ThresholdOptions {
        scan_step: grid_step,
        ..ThresholdOptions::default()
    };
    scan_sign_with(n, psi_variant, &options)
}

pub fn scan_sign_with(n: usize, psi_variant: PsiVariant, options: &ThresholdOptions) -> Result<SignScan> {
    options.validate()?;
    let grid = scan_grid(options.scan_step)?;
    let points = grid
        .par_iter()
        .map(|&delta| {
            let integral = integral_value(n, delta, psi_variant, options)?;
            Ok(ScanPoint {
                delta,
                sign: KernelSign::of(integral),
                integral,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignScan::from_points(n, psi_variant, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdWarning {
    /// More than one sign flip on the grid; δ(n) is the first crossing.
    MultipleCrossings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub n: usize,
    pub delta_n: f64,
    /// Final bisection interval `(low, high)` with I(low) ≥ 0 > I(high).
    pub bracket: (f64, f64),
    pub crossings: Vec<Crossing>,
    pub psi_variant: PsiVariant,
    pub integral_at_bracket: (f64, f64),
    pub warning: Option<ThresholdWarning>,
    #[serde(skip)]
    pub scan: Vec<ScanPoint>,
}

pub fn find_threshold(n: usize, tol: f64, psi_variant: PsiVariant) -> Result<ThresholdResult> {
    let options = ThresholdOptions {
        tol,
        ..ThresholdOptions::default()
    };
    find_threshold_with(n, psi_variant, &options)
}

pub fn find_threshold_with(n: usize, psi_variant: PsiVariant, options: &ThresholdOptions) -> Result<ThresholdResult> {
    let scan = scan_sign_with(n, psi_variant, options)?;
    let crossings = scan.crossings.len();
    let no_crossing = |reason: String| Error::NoCrossing {
        n,
        variant: psi_variant,
        crossings,
        reason,
    };
    let Some(first) = scan.crossings.first().copied() else {
        let reason = match scan.points.first().map(|p| p.sign) {
            Some(KernelSign::Negative) => "I < 0 on the whole grid",
            _ => "I ≥ 0 on the whole grid",
        };
        return Err(no_crossing(reason.into()));
    };
    if first.to != KernelSign::Negative {
        return Err(no_crossing(format!(
            "I < 0 already at δ = {}, so the infimum lies below the scan range",
            scan.points[0].delta
        )));
    }

    let (mut lo, mut hi) = (first.delta_before, first.delta_after);
    let (mut i_lo, mut i_hi) = (scan.points[first.index - 1].integral, scan.points[first.index].integral);
    while hi - lo > options.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = integral_value(n, mid, psi_variant, options)?;
        if value < 0.0 {
            hi = mid;
            i_hi = value;
        } else {
            lo = mid;
            i_lo = value;
        }
    }

    let warning = (scan.crossings.len() > 1).then_some(ThresholdWarning::MultipleCrossings);
    Ok(ThresholdResult {
        n,
        delta_n: 0.5 * (lo + hi),
        bracket: (lo, hi),
        crossings: scan.crossings.clone(),
        psi_variant,
        integral_at_bracket: (i_lo, i_hi),
        warning,
        scan: scan.points,
    })
}

/// Outcome of one (n, variant) cell of the threshold table report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantOutcome {
    pub variant: PsiVariant,
    pub threshold: Option<ThresholdResult>,
    /// Signed `computed − published`.
    pub deviation: Option<f64>,
    /// Sign flips on the scan grid, when the scan itself completed.
    pub crossings: Option<usize>,
    pub error: Option<String>,
}

impl VariantOutcome {
    pub fn delta_n(&self) -> Option<f64> {
        self.threshold.as_ref().map(|t| t.delta_n)
    }

    pub fn crossing_count(&self) -> Option<usize> {
        self.crossings
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub n: usize,
    pub table_value: Option<f64>,
    pub outcomes: Vec<VariantOutcome>,
}

impl Table1Row {
    pub fn outcome(&self, variant: PsiVariant) -> Option<&VariantOutcome> {
        self.outcomes.iter().find(|o| o.variant == variant)
    }

    /// True when at least one requested variant produced a threshold.
    pub fn has_result(&self) -> bool {
        self.outcomes.iter().any(|o| o.threshold.is_some())
    }
}

/// Qualitative shape of the published column: δ(6) < δ(5), and strictly
/// increasing from n = 7 on. `None` when the rows needed are missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShapeCheck {
    pub dip_at_six: Option<bool>,
    pub increasing_from_seven: Option<bool>,
}

impl ShapeCheck {
    pub fn holds(&self) -> bool {
        self.dip_at_six == Some(true) && self.increasing_from_seven == Some(true)
    }
}

pub fn shape_check(values: &[(usize, f64)]) -> ShapeCheck {
    let get = |n: usize| values.iter().find(|(m, _)| *m == n).map(|(_, v)| *v);
    let dip_at_six = get(5).zip(get(6)).map(|(d5, d6)| d6 < d5);
    let tail: Vec<f64> = (7..=20).map_while(get).collect();
    let increasing_from_seven = (tail.len() == 14).then(|| tail.windows(2).all(|w| w[1] > w[0]));
    ShapeCheck {
        dip_at_six,
        increasing_from_seven,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantVerdict {
    pub variant: PsiVariant,
    pub rows_computed: usize,
    pub rows_with_reference: usize,
    pub max_abs_deviation: Option<f64>,
    /// Every row with a published value was computed and lies within
    /// [`TABLE_MATCH_TOLERANCE`] of it.
    pub matches_table: bool,
    pub shape: ShapeCheck,
    pub all_single_crossing: bool,
    /// Every computed δ(n) lies in (0.90, 0.999).
    pub all_in_fallback_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub variant: PsiVariant,
    pub n: usize,
    pub computed: Option<f64>,
    pub table_value: f64,
    pub deviation: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub verdicts: Vec<VariantVerdict>,
    pub matching_variants: Vec<PsiVariant>,
    /// Filled only when no variant matches every published row.
    pub discrepancies: Vec<Discrepancy>,
}

impl Table1Report {
    /// Fallback acceptance: some variant stays in range, crosses once for
    /// every n, and follows the published shape.
    pub fn fallback_holds(&self) -> bool {
        self.verdicts.iter().any(|v| {
            v.rows_computed == self.rows.len() && v.all_in_fallback_range && v.all_single_crossing && v.shape.holds()
        })
    }
}

fn verdict(variant: PsiVariant, rows: &[Table1Row]) -> VariantVerdict {
    let outcomes: Vec<(usize, Option<f64>, &VariantOutcome)> = rows
        .iter()
        .filter_map(|r| r.outcome(variant).map(|o| (r.n, r.table_value, o)))
        .collect();
    let computed: Vec<(usize, f64)> = outcomes
        .iter()
        .filter_map(|(n, _, o)| o.delta_n().map(|d| (*n, d)))
        .collect();
    let with_reference: Vec<_> = outcomes.iter().filter(|(_, t, _)| t.is_some()).collect();
    let deviations: Vec<f64> = with_reference.iter().filter_map(|(_, _, o)| o.deviation).collect();
    let max_abs_deviation = deviations.iter().map(|d| d.abs()).reduce(f64::max);
    let matches_table = !with_reference.is_empty()
        && with_reference
            .iter()
            .all(|(_, _, o)| o.deviation.is_some_and(|d| d.abs() <= TABLE_MATCH_TOLERANCE));
    VariantVerdict {
        variant,
        rows_computed: computed.len(),
        rows_with_reference: with_reference.len(),
        max_abs_deviation,
        matches_table,
        shape: shape_check(&computed),
        all_single_crossing: outcomes
            .iter()
            .all(|(_, _, o)| o.threshold.as_ref().is_some_and(|t| t.crossings.len() == 1)),
        all_in_fallback_range: !computed.is_empty() && computed.iter().all(|(_, d)| *d > 0.90 && *d < 0.999),
    }
}

/// δ(n) for every `n` under every variant, compared with the published values.
///
/// Failures are recorded per cell; the other cells still run.
pub fn table1_report(dimensions: &[usize], variants: &[PsiVariant], options: &ThresholdOptions) -> Table1Report {
    let cells: Vec<(usize, PsiVariant)> = dimensions
        .iter()
        .flat_map(|&n| variants.iter().map(move |&v| (n, v)))
        .collect();
    let results: Vec<Result<ThresholdResult>> = cells
        .par_iter()
        .map(|&(n, v)| find_threshold_with(n, v, options))
        .collect();

    let mut results = results.into_iter();
    let rows: Vec<Table1Row> = dimensions
        .iter()
        .map(|&n| {
            let table_value = table1_value(n);
            let outcomes = variants
                .iter()
                .map(|&variant| match results.next().expect("one result per cell") {
                    Ok(t) => VariantOutcome {
                        variant,
                        deviation: table_value.map(|tv| t.delta_n - tv),
                        crossings: Some(t.crossings.len()),
                        threshold: Some(t),
                        error: None,
                    },
                    Err(e) => VariantOutcome {
                        variant,
                        threshold: None,
                        deviation: None,
                        crossings: match &e {
                            Error::NoCrossing { crossings, .. } => Some(*crossings),
                            _ => None,
                        },
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            Table1Row {
                n,
                table_value,
                outcomes,
            }
        })
        .collect();

    let verdicts: Vec<VariantVerdict> = variants.iter().map(|&v| verdict(v, &rows)).collect();
    let matching_variants: Vec<PsiVariant> = verdicts.iter().filter(|v| v.matches_table).map(|v| v.variant).collect();
    let discrepancies = if matching_variants.is_empty() {
        rows.iter()
            .filter_map(|r| r.table_value.map(|tv| (r, tv)))
            .flat_map(|(r, tv)| {
                r.outcomes.iter().filter_map(move |o| {
                    let within = o.deviation.is_some_and(|d| d.abs() <= TABLE_MATCH_TOLERANCE);
                    (!within).then(|| Discrepancy {
                        variant: o.variant,
                        n: r.n,
                        computed: o.delta_n(),
                        table_value: tv,
                        deviation: o.deviation,
                        note: o.error.clone().unwrap_or_else(|| "outside tolerance".into()),
                    })
                })
            })
            .collect()
    } else {
        Vec::new()
    };

    Table1Report {
        rows,
        verdicts,
        matching_variants,
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use KernelSign::{Negative as N, NonNegative as P};

    #[test]
    fn grid_covers_scan_range() {
        let g = scan_grid(1e-3).unwrap();
        assert_eq!(g.len(), 700);
        assert_eq!(g[0], SCAN_START);
        assert_eq!(*g.last().unwrap(), SCAN_END);
        let g = scan_grid(0.01).unwrap();
        assert_eq!(*g.last().unwrap(), SCAN_END);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(scan_grid(0.02).is_err());
        assert!(scan_grid(0.0).is_err());
    }

    #[test]
    fn constant_sign_sequence_has_no_flips() {
        assert!(sign_flips(&[P, P, P, P]).is_empty());
        assert!(sign_flips(&[N, N]).is_empty());
        assert_eq!(sign_flips(&[P, P, N, N]), vec![2]);
        assert_eq!(sign_flips(&[P, N, P, N]), vec![1, 2, 3]);
    }

    #[test]
    fn single_crossing_classification() {
        let pts = |signs: &[KernelSign]| {
            signs
                .iter()
                .enumerate()
                .map(|(i, &sign)| ScanPoint {
                    delta: 0.3 + i as f64 * 0.1,
                    sign,
                    integral: 0.0,
                })
                .collect::<Vec<_>>()
        };
        let scan = SignScan::from_points(5, PsiVariant::Listing, pts(&[P, P, N]));
        assert!(scan.single_crossing);
        let scan = SignScan::from_points(5, PsiVariant::Listing, pts(&[N, P, P]));
        assert!(!scan.single_crossing);
        let scan = SignScan::from_points(5, PsiVariant::Listing, pts(&[P, N, P, N]));
        assert!(!scan.single_crossing);
        assert_eq!(scan.crossings.len(), 3);
    }

    #[test]
    fn shape_of_published_column() {
        let shape = shape_check(&TABLE1);
        assert_eq!(shape.dip_at_six, Some(true));
        assert_eq!(shape.increasing_from_seven, Some(true));
        let partial = shape_check(&TABLE1[..3]);
        assert_eq!(partial.increasing_from_seven, None);
        assert!(!partial.holds());
    }

    #[test]
    fn invalid_options_are_rejected() {
        let opts = ThresholdOptions {
            scan_step: 0.5,
            ..ThresholdOptions::default()
        };
        assert!(matches!(
            scan_sign_with(5, PsiVariant::Listing, &opts),
            Err(Error::InvalidArgument(_))
        ));
    }
}
