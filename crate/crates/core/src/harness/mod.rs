//! Scenario files, Monte Carlo sweeps over power and uncertainty grids, the
//! two non-joint baselines and result emission.
//!
//! Every realization is drawn once from a seed derived from the master seed,
//! and all grid cells are evaluated on that same channel set, so differences
//! between strategies are paired.

pub mod baselines;
pub mod config;
pub mod output;
pub mod solve;
pub mod sweep;
pub mod validate;

pub use baselines::{baseline_orthogonal, baseline_two_step, ORTHOGONAL_PRE_LOG};
pub use config::{CellSpec, NetworkCounts, SatelliteParams, ScenarioConfig, SweepGrid};
pub use output::{emit_results, results_csv, summary_json, CSV_HEADER};
pub use solve::{embed_coordinated, sdma_counterpart, PerfectSolver};
pub use sweep::{
    child_seed, evaluate_realization, grid, run_sweep, run_sweep_on, sample_realizations, CellKey, CellOutcome,
    CellResult, SweepResult,
};
pub use validate::{run_validation, Check};
