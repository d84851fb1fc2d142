//! Numerical pipeline for the pinching threshold δ(n) of a radial
//! volume-comparison integral.
//!
//! [`envelopes`] evaluates the Hessian-comparison envelopes and the
//! second-variation kernel Φ_δ, [`quadrature`] integrates Φ_δ against the
//! volume weight v_δ, [`threshold`] searches for δ(n), and [`check`] bundles
//! the invariant suites used by `pinch check`.

// `!(x > 0.0)` and friends are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod envelopes;
pub mod error;
pub mod piecewise;
pub mod quadrature;
pub mod threshold;

pub use envelopes::{
    envelope_f1, envelope_f2, envelope_g1, envelope_g2, envelope_h1, envelope_h2, envelope_value, kernel_phi,
    kernel_phi_envelope_form, phi_base, psi_base, rho_delta, volume_weight, volume_weight_auto, EnvelopeKind,
    KernelConfig, KernelSign, PinchParameter, PsiVariant, RadialCoordinate, WeightBranch,
};
pub use error::{Error, Result};
pub use piecewise::PiecewiseRadialFunction;
pub use quadrature::{find_sign_changes, integrate_piecewise, oracle_integrate, sphere_area, IntegralResult};
pub use threshold::{
    find_threshold, find_threshold_with, integral_i, integral_i_with, scan_sign, scan_sign_with, table1_report,
    Table1Report, ThresholdOptions, ThresholdResult,
};
