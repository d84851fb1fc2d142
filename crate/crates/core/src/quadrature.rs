//! Integration of radial functions over `(0, π)`.
//!
//! The integrand `Φ_δ·v_δ` is smooth only between the kernel breakpoints
//! and the zeros of Φ_δ (where `v_δ` switches branch), so the interval is cut
//! at all of those points first. Each piece is then integrated with a globally
//! adaptive 7/15-point Gauss–Kronrod scheme: the piece with the largest
//! `|K15 − G7|` is halved until the summed estimate drops below the tolerance.

use std::f64::consts::PI;

use serde::Serialize;

use crate::envelopes::{KernelConfig, KernelSign, KernelTerms, WeightBranch};
use crate::error::{Error, Result};

pub const MAX_SUBINTERVALS: usize = 20_000;
/// Requested tolerances below this many ulps of ∫|f| are met at that floor.
pub const ROUNDOFF_FACTOR: f64 = 50.0;

/// Width to which sign changes of Φ_δ are bisected.
pub const SIGN_CHANGE_TOLERANCE: f64 = 1e-12;

// Kronrod abscissae on [0, 1]; odd indices are the Gauss-7 nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Returns (Kronrod value, |Kronrod − Gauss|, Kronrod value of |f|).
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut absolute = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (fl, fr) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (fl + fr);
        absolute += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), absolute * half.abs())
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    absolute: f64,
}

/// Fixed-order pairwise sum, independent of how the pieces were produced.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (l, r) = values.split_at(len / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Result of a plain adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub subintervals: usize,
}

/// Globally adaptive integration over consecutive intervals.
///
/// `segments` are `(start, end, integrand)` triples; each integrand must be
/// smooth on its own closed interval.
fn adaptive<F: Fn(f64) -> f64>(segments: &[(f64, f64, F)], tol: f64) -> Result<QuadratureEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut pieces: Vec<(usize, Piece)> = segments
        .iter()
        .enumerate()
        .filter(|(_, (a, b, _))| b > a)
        .map(|(i, (a, b, f))| {
            let (value, error, absolute) = gauss_kronrod(f, *a, *b);
            (
                i,
                Piece {
                    a: *a,
                    b: *b,
                    value,
                    error,
                    absolute,
                },
            )
        })
        .collect();

    loop {
        let total: f64 = pieces.iter().map(|(_, p)| p.error).sum();
        // no f64 sum resolves the integral better than a few ulps of ∫|f|
        let floor = ROUNDOFF_FACTOR * f64::EPSILON * pieces.iter().map(|(_, p)| p.absolute).sum::<f64>();
        let stalled = || Error::NonConvergence {
            estimate: total,
            tol,
            subintervals: pieces.len(),
        };
        if !total.is_finite() {
            return Err(stalled());
        }
        if total <= tol.max(floor) {
            break;
        }
        if pieces.len() >= MAX_SUBINTERVALS {
            return Err(stalled());
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .1.error.total_cmp(&y.1 .1.error))
            .expect("error total is positive, so there is a piece");
        let (seg, p) = pieces[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(stalled());
        }
        let f = &segments[seg].2;
        let (lv, le, la) = gauss_kronrod(f, p.a, mid);
        let (rv, re, ra) = gauss_kronrod(f, mid, p.b);
        pieces[worst] = (
            seg,
            Piece {
                a: p.a,
                b: mid,
                value: lv,
                error: le,
                absolute: la,
            },
        );
        pieces.push((
            seg,
            Piece {
                a: mid,
                b: p.b,
                value: rv,
                error: re,
                absolute: ra,
            },
        ));
    }

    pieces.sort_by(|x, y| x.1.a.total_cmp(&y.1.a));
    let values: Vec<f64> = pieces.iter().map(|(_, p)| p.value).collect();
    let errors: Vec<f64> = pieces.iter().map(|(_, p)| p.error).collect();
    Ok(QuadratureEstimate {
        value: pairwise_sum(&values),
        error_estimate: pairwise_sum(&errors),
        subintervals: pieces.len(),
    })
}

fn partition(breakpoints: &[f64]) -> Result<Vec<f64>> {
    let mut cuts = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(0.0);
    for &b in breakpoints {
        if !(0.0..=PI).contains(&b) {
            return Err(Error::InvalidArgument(format!("breakpoint {b} outside [0, π]")));
        }
        if b < *cuts.last().unwrap() {
            return Err(Error::InvalidArgument("breakpoints are not ordered".into()));
        }
        cuts.push(b);
    }
    cuts.push(PI);
    Ok(cuts)
}

/// Adaptive integral of `f` over `(0, π)`, split at `breakpoints`.
pub fn integrate_radial<F>(f: F, breakpoints: &[f64], tol: f64) -> Result<QuadratureEstimate>
where
    F: Fn(f64) -> f64 + Copy,
{
    let cuts = partition(breakpoints)?;
    let segments: Vec<_> = cuts.windows(2).map(|w| (w[0], w[1], f)).collect();
    adaptive(&segments, tol)
}

/// Composite Simpson rule on `[a, b]` with `points` (odd, ≥ 3) equally spaced nodes.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> Result<f64> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Simpson rule needs an odd point count ≥ 3, got {points}"
        )));
    }
    if b == a {
        return Ok(0.0);
    }
    let cells = points - 1;
    let h = (b - a) / cells as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..cells {
        let x = a + k as f64 * h;
        if k % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    Ok(h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b)))
}

/// Composite Simpson over `(0, π)` with `points_per_segment` nodes on each
/// piece of the breakpoint partition.
pub fn simpson_radial<F>(f: F, breakpoints: &[f64], points_per_segment: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Copy,
{
    let cuts = partition(breakpoints)?;
    let parts = cuts
        .windows(2)
        .map(|w| composite_simpson(f, w[0], w[1], points_per_segment))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&parts))
}

/// A piece of `(0, π)` on which Φ_δ·v_δ is one smooth formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// Branch of the four-branch kernel listing.
    pub kernel_branch: usize,
    pub weight: WeightBranch,
}

/// Zeros of Φ_δ inside `interval`, which must lie within one kernel branch.
///
/// The branch is scanned on a grid of spacing at most the config's scan
/// resolution, and every sign flip between neighbours is bisected down to
/// [`SIGN_CHANGE_TOLERANCE`].
pub fn find_sign_changes(config: &KernelConfig, interval: (f64, f64)) -> Vec<f64> {
    let terms = config.terms();
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Vec::new();
    }
    let branch = terms.listing_branch_index(0.5 * (lo + hi));
    sign_changes_in_branch(&terms, branch, lo, hi, config.scan_resolution())
}

fn sign_changes_in_branch(terms: &KernelTerms, branch: usize, lo: f64, hi: f64, resolution: f64) -> Vec<f64> {
    let f = |rho: f64| terms.listing_branch(branch, rho);
    let cells = ((hi - lo) / resolution).ceil().max(1.0) as usize;
    let step = (hi - lo) / cells as f64;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut s_prev = KernelSign::of(f(lo));
    for k in 1..=cells {
        let x = if k == cells { hi } else { lo + k as f64 * step };
        let s = KernelSign::of(f(x));
        if s != s_prev {
            let (mut a, mut b) = (x_prev, x);
            while b - a > SIGN_CHANGE_TOLERANCE {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if KernelSign::of(f(mid)) == s_prev {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let root = 0.5 * (a + b);
            // zeros sitting on the interval ends are handled by the branch split
            if root > lo && root < hi {
                roots.push(root);
            }
        }
        x_prev = x;
        s_prev = s;
    }
    roots
}

/// Cuts `(0, π)` at the kernel breakpoints and every detected zero of Φ_δ,
/// and picks the weight branch on each piece from the sign of Φ_δ there.
pub fn kernel_segments(config: &KernelConfig) -> Vec<Segment> {
    let terms = config.terms();
    let bp = config.breakpoints();
    let mut segments = Vec::new();
    for branch in 0..4 {
        let lo = if branch == 0 { 0.0 } else { bp[branch - 1] };
        let hi = if branch == 3 { PI } else { bp[branch] };
        if !(hi > lo) {
            continue;
        }
        let mut cuts = vec![lo];
        cuts.extend(sign_changes_in_branch(&terms, branch, lo, hi, config.scan_resolution()));
        cuts.push(hi);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let sign = KernelSign::of(terms.listing_branch(branch, mid));
            segments.push(Segment {
                start: w[0],
                end: w[1],
                kernel_branch: branch,
                weight: WeightBranch::for_sign(sign),
            });
        }
    }
    segments
}

/// Value of ∫₀^π Φ_δ v_δ dρ with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub subintervals: usize,
    /// Interior zeros of Φ_δ where the weight switches branch.
    pub sign_change_points: Vec<f64>,
}

type Integrand<F> = (f64, f64, F);

fn segment_integrands(config: &KernelConfig) -> (Vec<Segment>, Vec<Integrand<impl Fn(f64) -> f64>>) {
    let terms = config.terms();
    let segments = kernel_segments(config);
    let integrands = segments
        .iter()
        .map(|seg| {
            let (branch, weight) = (seg.kernel_branch, seg.weight);
            (seg.start, seg.end, move |rho: f64| {
                terms.listing_branch(branch, rho) * terms.weight(weight, rho)
            })
        })
        .collect();
    (segments, integrands)
}

fn sign_change_points(segments: &[Segment]) -> Vec<f64> {
    segments
        .windows(2)
        .filter(|w| w[0].kernel_branch == w[1].kernel_branch)
        .map(|w| w[0].end)
        .collect()
}

/// I(n, δ) = ∫₀^π Φ_δ(ρ) v_δ(ρ) dρ, without the |S^{n−1}| factor.
///
/// A `tol` below the round-off floor of the integrand (see [`ROUNDOFF_FACTOR`])
/// is met at that floor, so `error_estimate` may then exceed `tol`.
pub fn integrate_piecewise(config: &KernelConfig, tol: f64) -> Result<IntegralResult> {
    let (segments, integrands) = segment_integrands(config);
    let estimate = adaptive(&integrands, tol)?;
    Ok(IntegralResult {
        value: estimate.value,
        error_estimate: estimate.error_estimate,
        subintervals: estimate.subintervals,
        sign_change_points: sign_change_points(&segments),
    })
}

/// Fixed composite-Simpson value of I(n, δ) on the same segments as
/// [`integrate_piecewise`]. Verification only.
pub fn oracle_integrate(config: &KernelConfig, points_per_branch: usize) -> Result<f64> {
    let (_, integrands) = segment_integrands(config);
    let parts = integrands
        .iter()
        .map(|(a, b, f)| composite_simpson(f, *a, *b, points_per_branch))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&parts))
}

/// |S^{k}| for the unit k-sphere, by the recurrence |S^k| = 2π/(k−1)·|S^{k−2}|.
fn unit_sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_area(k - 2),
    }
}

/// |S^{n−1}| = 2π^{n/2}/Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1, "sphere area needs n ≥ 1");
    unit_sphere_area(n - 1)
}
