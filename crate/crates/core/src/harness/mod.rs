//! Experiment configuration, drivers and output formats.

pub mod config;
pub mod experiments;
pub mod order;
pub mod svg;
pub mod table;

pub use config::{ExperimentConfig, ProblemKind};
pub use experiments::{
    run_block_powers, run_convergence, run_heat1d, run_hm_error, run_policy_bounds, run_powers,
    run_stability_report, run_sweep_mu, trajectory_residual_ratio, ConvergenceMode, Heat1dResult,
    PowerCurve, PowerSummary, PowersResult,
};
pub use order::{fit_order, ConvergenceRow, ConvergenceTable};
pub use svg::{LinePlot, Series};
pub use table::{Cell, CsvTable};
