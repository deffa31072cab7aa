//! Solver outcome shared by the SCA, robust and baseline solvers.

use serde::{Deserialize, Serialize};

use crate::rate_model::{BeamformerRecord, BeamformerSet, Scheme, TransmitStrategy};
use crate::robust::RobustDiagnostics;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    /// The stop rule on the objective change fired.
    Converged,
    MaxIterations,
    /// The starting point violates the power budgets.
    Infeasible,
    /// The conic solver failed even after damped retries.
    NumericalFailure,
}

impl std::fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReportStatus::Converged => "converged",
            ReportStatus::MaxIterations => "max_iterations",
            ReportStatus::Infeasible => "infeasible",
            ReportStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Which solver produced the report, e.g. `sca` or `robust`.
    pub solver: String,
    pub scheme: Scheme,
    pub strategy: TransmitStrategy,
    pub status: ReportStatus,
    pub iterations: usize,
    /// Objective after every accepted iterate, starting with the initial point.
    pub objective_trace: Vec<f64>,
    /// Optimal values of the convex subproblems.
    pub surrogate_trace: Vec<f64>,
    /// Max-min rate of the returned precoders, bits/s/Hz.
    pub mmf_rate: f64,
    pub beam_rates: Vec<f64>,
    pub cu_rates: Vec<f64>,
    /// Common-rate portions, beams first then CUs.
    pub portions: Vec<f64>,
    /// Worst relative excess over the power budgets.
    pub power_violation: f64,
    /// Largest constraint residual reported by the conic solver.
    pub max_solver_residual: f64,
    pub elapsed_seconds: f64,
    pub beamformers: BeamformerRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robust: Option<RobustDiagnostics>,
    /// Free-form facts about how the rates were obtained.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn beamformer_set(&self) -> Result<BeamformerSet> {
        self.beamformers.to_set()
    }

    pub fn is_failure(&self) -> bool {
        self.status == ReportStatus::NumericalFailure
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Serde(e.to_string()))
    }
}
