//! Radial functions on `(0, π)` assembled from smooth branches.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub type BranchFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function of geodesic radius given by ordered breakpoints and one
/// evaluator per subinterval.
///
/// Branch `i` covers `[breakpoints[i-1], breakpoints[i]]` (with `0` and `π`
/// as the outer ends). Breakpoints are non-decreasing; coincident breakpoints
/// produce empty branches, which is how the δ = 1 collapse is represented.
/// At a breakpoint [`evaluate`](Self::evaluate) uses the left branch.
pub struct PiecewiseRadialFunction {
    breakpoints: Vec<f64>,
    branches: Vec<BranchFn>,
}

impl PiecewiseRadialFunction {
    pub fn new(breakpoints: Vec<f64>, branches: Vec<BranchFn>) -> Result<Self> {
        if branches.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidPiecewise(format!(
                "{} branches for {} breakpoints",
                branches.len(),
                breakpoints.len()
            )));
        }
        if let Some(bad) = breakpoints.iter().find(|b| !(**b > 0.0 && **b < PI)) {
            return Err(Error::InvalidPiecewise(format!("breakpoint {bad} outside (0, π)")));
        }
        if breakpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidPiecewise("breakpoints are not ordered".into()));
        }
        Ok(Self { breakpoints, branches })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Index of the branch used at `rho`.
    pub fn branch_index(&self, rho: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < rho)
    }

    /// Closed interval covered by branch `index`.
    pub fn branch_interval(&self, index: usize) -> (f64, f64) {
        let lo = if index == 0 { 0.0 } else { self.breakpoints[index - 1] };
        let hi = self.breakpoints.get(index).copied().unwrap_or(PI);
        (lo, hi)
    }

    /// Evaluates branch `index` directly, ignoring which interval `rho` is in.
    pub fn evaluate_branch(&self, index: usize, rho: f64) -> f64 {
        (self.branches[index])(rho)
    }

    pub fn evaluate(&self, rho: f64) -> f64 {
        self.evaluate_branch(self.branch_index(rho), rho)
    }

    /// Left and right branch values at interior breakpoint `index`.
    pub fn one_sided_values(&self, index: usize) -> (f64, f64) {
        let rho = self.breakpoints[index];
        (self.evaluate_branch(index, rho), self.evaluate_branch(index + 1, rho))
    }

    /// Largest left/right mismatch over all interior breakpoints.
    pub fn max_jump(&self) -> f64 {
        (0..self.breakpoints.len())
            .map(|i| {
                let (l, r) = self.one_sided_values(i);
                (l - r).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for PiecewiseRadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseRadialFunction")
            .field("breakpoints", &self.breakpoints)
            .field("branches", &self.branches.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> PiecewiseRadialFunction {
        PiecewiseRadialFunction::new(
            vec![1.0, 2.0],
            vec![Box::new(|_| 0.0), Box::new(|x| x - 1.0), Box::new(|_| 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn picks_left_branch_at_breakpoints() {
        let f = step();
        assert_eq!(f.branch_index(0.5), 0);
        assert_eq!(f.branch_index(1.0), 0);
        assert_eq!(f.branch_index(1.5), 1);
        assert_eq!(f.branch_index(3.0), 2);
        assert_eq!(f.evaluate(1.5), 0.5);
        assert_eq!(f.branch_interval(2), (2.0, PI));
    }

    #[test]
    fn continuous_function_has_no_jump() {
        assert_eq!(step().max_jump(), 0.0);
    }

    #[test]
    fn rejects_bad_layouts() {
        let err = PiecewiseRadialFunction::new(vec![1.0], vec![Box::new(|_| 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPiecewise(_)));
        let err = PiecewiseRadialFunction::new(
            vec![2.0, 1.0],
            vec![Box::new(|_| 0.0), Box::new(|_| 0.0), Box::new(|_| 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidPiecewise(_)));
        let err = PiecewiseRadialFunction::new(vec![4.0], vec![Box::new(|_| 0.0), Box::new(|_| 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPiecewise(_)));
    }

    #[test]
    fn coincident_breakpoints_give_empty_branch() {
        let f = PiecewiseRadialFunction::new(
            vec![1.0, 1.0],
            vec![Box::new(|_| 0.0), Box::new(|_| 5.0), Box::new(|_| 0.0)],
        )
        .unwrap();
        assert_eq!(f.branch_interval(1), (1.0, 1.0));
        assert_eq!(f.branch_index(1.0), 0);
        assert_eq!(f.branch_index(1.0 + 1e-15), 2);
    }
}
