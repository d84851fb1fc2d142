use thiserror::Error;

use crate::envelopes::PsiVariant;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pinching constant {0} is outside (1/4, 1]")]
    InvalidDelta(f64),

    #[error("dimension {0} is below the supported minimum of 5")]
    InvalidDimension(usize),

    #[error("radius {0} is outside (0, π)")]
    InvalidRadius(f64),

    /// `√δ·ρ` reached the first pole of the cotangent.
    #[error("√δ·ρ = {scaled} is outside (0, π) (δ = {delta}, ρ = {rho})")]
    CotangentDomain { delta: f64, rho: f64, scaled: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("breakpoint root {rho} escaped its bracket ({lo}, {hi})")]
    BreakpointOrder { rho: f64, lo: f64, hi: f64 },

    #[error("invalid piecewise function: {0}")]
    InvalidPiecewise(String),

    #[error(
        "quadrature stalled: error estimate {estimate:e} above tolerance {tol:e} after {subintervals} subintervals"
    )]
    NonConvergence {
        estimate: f64,
        tol: f64,
        subintervals: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The scan never produced the nonnegative-then-negative pattern the
    /// infimum needs.
    #[error(
        "no nonnegative-to-negative crossing of I(n = {n}, δ) on the scan grid under the {variant} variant ({reason})"
    )]
    NoCrossing {
        n: usize,
        variant: PsiVariant,
        crossings: usize,
        reason: String,
    },
}
