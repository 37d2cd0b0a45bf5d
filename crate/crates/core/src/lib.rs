//! Explicit three-level hyperbolic-model (HM) time integration for
//! `y' = -A y + f` with symmetric positive semidefinite `A`, and the tools
//! to analyse it: amplification blocks and their eigenvalues, step-size
//! conditions, power-norm growth, closed-form reference solutions and error
//! bounds.
//!
//! ```
//! use hmscheme::{integrate, scalar_problem, Bootstrap, HmParams};
//! use nalgebra::DVector;
//!
//! let a = scalar_problem(1000.0).unwrap();
//! let p = HmParams::new(3e-5, 2e-4).unwrap();
//! let y0 = DVector::from_element(1, 1.0);
//! let traj = integrate(&a, |_| DVector::zeros(1), &y0, &p, 3e-3, Bootstrap::ExplicitEuler).unwrap();
//! assert_eq!(traj.len(), 100);
//! ```

pub mod analytic;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod scheme;
pub mod stability;

pub use analytic::{
    central_diff_truncation, hm_error_bound, hm_modal_exact, hm_system_exact, local_error_model,
    ErrorBoundInputs, HmModalSolution, HmSystemSolution,
};
pub use error::{Error, Result};
pub use linalg::{expm_apply, phi, spectral_decompose, two_norm, two_norm_2x2, SymmetricOperator};
pub use problems::{build_heat1d, heat1d_initial, scalar_problem, Heat1dProblem};
pub use scheme::{
    bootstrap, dufort_frankel_step, explicit_euler_integrate, hm_residual, hm_step, integrate,
    residual_bound, residual_ratio, Bootstrap, HmParams, SchemeState,
};
pub use stability::{
    block_eigenvalues, build_amplification, build_block, epsilon_policy_bounds, exact_separation,
    growth_indicator, monotonicity_witness, operator_blocks, power_norm_curve, power_norm_curve_full,
    samarskii_check, stability_report, AmplificationBlock, BlockEigen, EpsilonPolicy,
    MonotonicityWitness, SamarskiiVerdict, StabilityReport,
};
