//! Successive convex approximation for max-min fair rates with perfect CSIT.
//!
//! Every iteration linearizes the SINR and log-rate constraints of all decode
//! events around the current precoders (see [`subproblem`]), solves the
//! resulting second-order cone program and moves to its solution. The
//! current point is always feasible for the next subproblem, so the true
//! max-min rate never decreases. SDMA pins the common columns and portions
//! to zero. NOMA uses the SC-SIC decode events of [`DecodeLayout`] with the
//! fixed decoding order chosen before the first iteration.

pub mod compress;
pub mod init;
pub mod subproblem;
pub mod surrogates;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channel_models::ChannelSet;
use crate::conic::{solve, Tolerances};
use crate::linalg::CMatrix;
use crate::rate_model::{BeamformerRecord, BeamformerSet, DecodeLayout, Evaluation, Scheme, TransmitStrategy};
use crate::report::{ReportStatus, SolveReport};
use crate::{Error, Result};

pub use compress::TerrestrialBasis;
pub use init::{initial_point, project_to_budget, scale_to_budget, InitStrategy};
pub use subproblem::{build_subproblem, Subproblem};
pub use surrogates::{soc_log_constraint, taylor_qol_lower_bound, SocLog, TaylorBound};

/// Satellite budget `p_s` in watts (split evenly over feeds) and BS budget
/// `p_t` in linear units of the unit noise power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub p_s: f64,
    pub p_t: f64,
}

impl PowerBudget {
    pub fn new(p_s: f64, p_t: f64) -> Self {
        Self { p_s, p_t }
    }

    pub fn from_db(p_s: f64, p_t_db: f64) -> Self {
        Self::new(p_s, 10f64.powf(p_t_db / 10.0))
    }

    pub fn per_feed(&self, n_s: usize) -> f64 {
        if n_s == 0 {
            0.0
        } else {
            self.p_s / n_s as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_s >= 0.0 && self.p_t >= 0.0 && self.p_s.is_finite() && self.p_t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power budgets must be finite and nonnegative, got P_s = {}, P_t = {}",
                self.p_s, self.p_t
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaConfig {
    /// Stop once the max-min rate changes by less than this (bits/s/Hz).
    pub epsilon: f64,
    pub max_iterations: usize,
    pub init: InitStrategy,
    /// Retries with a damped expansion point after a solver failure.
    pub damping_retries: usize,
    pub noise_var: f64,
    /// Optimize BS precoders inside the span of the BS channels.
    pub compress_terrestrial: bool,
    pub tolerances: Tolerances,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            max_iterations: 200,
            init: InitStrategy::MatchedFilter,
            damping_retries: 3,
            noise_var: 1.0,
            compress_terrestrial: true,
            tolerances: Tolerances::default(),
        }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.noise_var > 0.0) {
            return Err(Error::InvalidConfig(format!("noise variance must be positive, got {}", self.noise_var)));
        }
        Ok(())
    }
}

/// Iterate of the SCA loop, in the (possibly reduced) coordinates the
/// subproblems are built in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaState {
    pub iteration: usize,
    pub x: CMatrix,
    /// True SINR of every decode event at `x`; the next expansion point.
    pub aux: Vec<f64>,
    pub objective_trace: Vec<f64>,
    pub portions: Vec<f64>,
}

/// Run the SCA loop from the default starting point of `config.init`.
pub fn run_sca(
    ch: &ChannelSet,
    powers: &PowerBudget,
    scheme: Scheme,
    strategy: TransmitStrategy,
    config: &ScaConfig,
) -> Result<SolveReport> {
    run(ch, powers, scheme, strategy, config, None)
}

/// Run the SCA loop from given precoders. Columns the strategy does not use
/// are zeroed; a start that exceeds the power budgets yields an `Infeasible`
/// report.
pub fn run_sca_from(
    ch: &ChannelSet,
    powers: &PowerBudget,
    scheme: Scheme,
    strategy: TransmitStrategy,
    config: &ScaConfig,
    start: &BeamformerSet,
) -> Result<SolveReport> {
    run(ch, powers, scheme, strategy, config, Some(start))
}

/// Feasibility slack on the budgets of a user-supplied start.
const START_POWER_TOL: f64 = 1e-6;

fn run(
    ch: &ChannelSet,
    powers: &PowerBudget,
    scheme: Scheme,
    strategy: TransmitStrategy,
    config: &ScaConfig,
    start: Option<&BeamformerSet>,
) -> Result<SolveReport> {
    config.validate()?;
    powers.validate()?;
    ch.validate()?;
    let clock = Instant::now();
    let full = DecodeLayout::new(ch, scheme, strategy)?;
    let basis = if config.compress_terrestrial {
        TerrestrialBasis::of(ch)
    } else {
        TerrestrialBasis::identity(ch.n_t())
    };
    let reduced = basis.compress_channels(ch);
    let layout = DecodeLayout::with_order(&reduced, scheme, strategy, full.noma.clone())?;
    let n_s = ch.n_s();
    let noise = config.noise_var;

    let x0 = match start {
        None => initial_point(&layout, &reduced, powers, config.init),
        Some(bf) => {
            let expected = BeamformerSet::zeros(scheme, n_s, ch.n_t(), ch.k_t()).to_global().shape();
            if bf.scheme() != scheme || bf.to_global().shape() != expected {
                return Err(Error::Dimension(format!(
                    "starting precoders do not match a {scheme} layout of shape {expected:?}"
                )));
            }
            let mut g = bf.to_global();
            full.mask(&mut g);
            let masked = BeamformerSet::from_global(scheme, &g, n_s)?;
            if !masked.is_finite() || masked.power_violation(powers.p_s, powers.p_t) > START_POWER_TOL {
                let eval = full.evaluate(&g, noise);
                return Ok(finish(
                    &full,
                    &masked,
                    eval,
                    ReportStatus::Infeasible,
                    Vec::new(),
                    Vec::new(),
                    0,
                    0.0,
                    powers,
                    clock,
                ));
            }
            let mut x = basis.compress(&g, n_s);
            project_to_budget(&mut x, n_s, powers);
            x
        }
    };

    let eval0 = layout.evaluate(&x0, noise);
    let mut state = ScaState {
        iteration: 0,
        x: x0.clone(),
        aux: eval0.event_sinr.clone(),
        objective_trace: vec![eval0.mmf],
        portions: eval0.portions.clone(),
    };
    let mut previous = x0;
    let mut surrogate_trace = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut status = ReportStatus::MaxIterations;
    let mut near_zero = 0usize;

    while state.iteration < config.max_iterations {
        state.iteration += 1;
        let current = *state.objective_trace.last().expect("trace starts nonempty");

        let mut expansion = state.x.clone();
        let mut tolerances = config.tolerances;
        let mut outcome = None;
        for _ in 0..=config.damping_retries {
            let aux0 = layout.evaluate(&expansion, noise).event_sinr;
            let sub = build_subproblem(&layout, &expansion, &aux0, powers, noise);
            let sol = solve(&sub.problem, &tolerances)?;
            if sol.is_optimal() {
                max_residual = max_residual.max(sol.primal_residual);
                outcome = Some((sub, sol));
                break;
            }
            expansion = (&expansion + &previous).scale(0.5);
            // Identical retries would fail identically; loosen the gap as well.
            tolerances.gap *= 100.0;
        }
        let Some((sub, sol)) = outcome else {
            status = ReportStatus::NumericalFailure;
            break;
        };
        surrogate_trace.push(sol.objective);

        let mut candidate = sub.precoders(&sol);
        layout.mask(&mut candidate);
        project_to_budget(&mut candidate, n_s, powers);
        let mut eval = layout.evaluate(&candidate, noise);
        let mut tries = 0;
        while eval.mmf < current && tries < config.damping_retries {
            candidate = (&candidate + &state.x).scale(0.5);
            eval = layout.evaluate(&candidate, noise);
            tries += 1;
        }
        if eval.mmf < current {
            // No ascent is available from here: stay put and stop.
            state.objective_trace.push(current);
            status = ReportStatus::Converged;
            break;
        }

        previous = std::mem::replace(&mut state.x, candidate);
        state.aux = eval.event_sinr.clone();
        state.portions = eval.portions.clone();
        state.objective_trace.push(eval.mmf);

        if (eval.mmf - current).abs() < config.epsilon {
            status = ReportStatus::Converged;
            break;
        }
        near_zero = if eval.mmf < 1e-9 { near_zero + 1 } else { 0 };
        if near_zero >= 5 {
            status = ReportStatus::Converged;
            break;
        }
    }

    let x_full = basis.expand(&state.x, n_s);
    let bf = BeamformerSet::from_global(scheme, &x_full, n_s)?;
    let eval = full.evaluate(&x_full, noise);
    Ok(finish(
        &full,
        &bf,
        eval,
        status,
        state.objective_trace,
        surrogate_trace,
        state.iteration,
        max_residual,
        powers,
        clock,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    layout: &DecodeLayout,
    bf: &BeamformerSet,
    eval: Evaluation,
    status: ReportStatus,
    objective_trace: Vec<f64>,
    surrogate_trace: Vec<f64>,
    iterations: usize,
    max_solver_residual: f64,
    powers: &PowerBudget,
    clock: Instant,
) -> SolveReport {
    let n_s = layout.n_s;
    SolveReport {
        solver: "sca".into(),
        scheme: layout.scheme,
        strategy: layout.strategy,
        status,
        iterations,
        objective_trace,
        surrogate_trace,
        mmf_rate: eval.mmf,
        beam_rates: eval.user_totals[..n_s].to_vec(),
        cu_rates: eval.user_totals[n_s..].to_vec(),
        portions: eval.portions,
        power_violation: bf.power_violation(powers.p_s, powers.p_t),
        max_solver_residual,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        beamformers: BeamformerRecord::from(bf),
        robust: None,
        notes: Vec::new(),
    }
}
