//! Shared inputs for the pipeline benchmarks.

use pinch_core::{KernelConfig, PsiVariant};

/// (n, δ) pairs near the published thresholds.
pub const CASES: [(usize, f64); 3] = [(5, 0.95), (10, 0.955), (20, 0.977)];

pub fn configs() -> Vec<KernelConfig> {
    CASES
        .iter()
        .map(|&(n, d)| KernelConfig::from_raw(n, d, PsiVariant::Listing).expect("benchmark cases are valid"))
        .collect()
}
