//! Robust max-min design under satellite phase uncertainty.
//!
//! Precoders are lifted to PSD matrices `S_c = x_c x_c^H`, the expected SINR
//! terms become traces against the correlation matrices of
//! [`expected`], and each iteration solves the penalized SDP of
//! [`subproblem`]. The penalty `tr S - v^H S v` with `v` the previous
//! principal eigenvector drives every `S_c` towards rank one; its factor
//! `beta` grows while the largest rank-one residual stays above the
//! threshold. Precoders are finally recovered from the principal
//! eigenvectors.
//!
//! Iterations start from the perfect-CSIT SCA solution computed on the
//! estimated channels. The objective trace records the optimal value of each
//! subproblem, which is nondecreasing while `beta` is constant; the `beta`
//! in force at every iteration is returned alongside it.

pub mod expected;
pub mod monte_carlo;
pub mod penalty;
pub mod subproblem;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel_models::ChannelSet;
use crate::conic::{solve, Tolerances};
use crate::linalg::CMatrix;
use crate::rate_model::{BeamformerRecord, BeamformerSet, DecodeLayout, Scheme, TransmitStrategy};
use crate::report::{ReportStatus, SolveReport};
use crate::sca::{run_sca, PowerBudget, ScaConfig, TerrestrialBasis};
use crate::{Error, Result};

pub use expected::{expected_evaluation, expected_event_terms, lift, receiver_correlations};
pub use monte_carlo::monte_carlo_evaluation;
pub use penalty::{rank_one_residual, recover};
pub use subproblem::{build_robust_subproblem, EventPoint, RobustSubproblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustConfig {
    /// Stop once the penalized objective changes by less than this.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub beta_initial: f64,
    pub beta_growth: f64,
    pub beta_max: f64,
    /// Iterations with the residual above `rank_tolerance` before `beta` grows.
    pub stall_window: usize,
    pub rank_tolerance: f64,
    /// Recovered-to-lifted rate ratio below which a warning (and, if
    /// enabled, Gaussian randomization) kicks in.
    pub recovery_ratio: f64,
    pub randomization: bool,
    pub randomization_draws: usize,
    pub monte_carlo_draws: usize,
    pub monte_carlo_seed: u64,
    pub damping_retries: usize,
    pub noise_var: f64,
    pub compress_terrestrial: bool,
    pub tolerances: Tolerances,
    /// Settings of the perfect-CSIT run used as the starting point.
    pub warm_start: ScaConfig,
}

impl Default for RobustConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            max_iterations: 100,
            beta_initial: 10.0,
            beta_growth: 5.0,
            beta_max: 1e5,
            stall_window: 3,
            rank_tolerance: 1e-3,
            recovery_ratio: 0.95,
            randomization: false,
            randomization_draws: 200,
            monte_carlo_draws: 10_000,
            monte_carlo_seed: 0x5eed,
            damping_retries: 3,
            noise_var: 1.0,
            compress_terrestrial: true,
            tolerances: Tolerances::default(),
            warm_start: ScaConfig::default(),
        }
    }
}

impl RobustConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidConfig("robust epsilon must be positive and max_iterations >= 1".into()));
        }
        if !(self.beta_initial > 0.0 && self.beta_growth >= 1.0 && self.beta_max >= self.beta_initial) {
            return Err(Error::InvalidConfig(format!(
                "penalty schedule needs beta > 0, growth >= 1 and cap >= start, got {}, {}, {}",
                self.beta_initial, self.beta_growth, self.beta_max
            )));
        }
        if !(self.noise_var > 0.0) {
            return Err(Error::InvalidConfig("noise variance must be positive".into()));
        }
        self.warm_start.validate()
    }
}

/// Expected and phase-averaged rate of one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateComparison {
    /// Beams `0..N_s` then CUs.
    pub user: usize,
    pub expected: f64,
    pub monte_carlo: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RobustDiagnostics {
    /// Phase-error variance in rad².
    pub delta_sq: f64,
    /// Max-min rate of the warm start under perfect CSIT.
    pub perfect_csit_mmf: f64,
    /// Expected max-min rate of the warm start under the uncertainty.
    pub nominal_expected_mmf: f64,
    /// Expected max-min rate of the final lifted matrices.
    pub lifted_mmf: f64,
    /// Expected max-min rate of the recovered precoders.
    pub recovered_mmf: f64,
    /// Max-min of phase-averaged rates of the recovered precoders.
    pub monte_carlo_mmf: f64,
    pub rank_one_residuals: Vec<f64>,
    pub max_rank_one_residual: f64,
    /// Penalty factor used in every iteration.
    pub beta_schedule: Vec<f64>,
    pub rate_comparison: Vec<RateComparison>,
    pub randomized: bool,
    pub warnings: Vec<String>,
}

/// Iterate of the robust loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustState {
    pub iteration: usize,
    pub lifted: Vec<Option<CMatrix>>,
    pub beta: f64,
    pub objective_trace: Vec<f64>,
    pub beta_schedule: Vec<f64>,
}

/// Robust design starting from a fresh perfect-CSIT SCA run.
pub fn run_robust(
    ch: &ChannelSet,
    delta_sq: f64,
    powers: &PowerBudget,
    scheme: Scheme,
    strategy: TransmitStrategy,
    config: &RobustConfig,
) -> Result<SolveReport> {
    let warm = run_sca(ch, powers, scheme, strategy, &config.warm_start)?;
    run_robust_from(ch, delta_sq, powers, &warm, config)
}

/// Robust design warm-started from a perfect-CSIT report on the same channels.
pub fn run_robust_from(
    ch: &ChannelSet,
    delta_sq: f64,
    powers: &PowerBudget,
    warm: &SolveReport,
    config: &RobustConfig,
) -> Result<SolveReport> {
    config.validate()?;
    powers.validate()?;
    if !(delta_sq >= 0.0 && delta_sq.is_finite()) {
        return Err(Error::InvalidArgument(format!("phase variance must be >= 0, got {delta_sq}")));
    }
    let clock = Instant::now();
    let (scheme, strategy) = (warm.scheme, warm.strategy);
    let noise = config.noise_var;
    let n_s = ch.n_s();
    let full = DecodeLayout::new(ch, scheme, strategy)?;
    let basis = if config.compress_terrestrial {
        TerrestrialBasis::of(ch)
    } else {
        TerrestrialBasis::identity(ch.n_t())
    };
    let reduced = basis.compress_channels(ch);
    let layout = DecodeLayout::with_order(&reduced, scheme, strategy, full.noma.clone())?;
    let corr = receiver_correlations(&reduced, delta_sq);
    let weights = penalty::penalty_weights(&layout, powers);

    let mut x0 = warm.beamformer_set()?.to_global();
    full.mask(&mut x0);
    let mut x0 = basis.compress(&x0, n_s);
    crate::sca::project_to_budget(&mut x0, n_s, powers);
    let start = lift(&layout, &x0);
    let nominal = expected_evaluation(&layout, &corr, &start, noise).mmf;

    let mut state = RobustState {
        iteration: 0,
        lifted: start.clone(),
        beta: config.beta_initial,
        objective_trace: vec![nominal],
        beta_schedule: Vec::new(),
    };
    let mut previous = start;
    let mut status = ReportStatus::MaxIterations;
    let mut max_residual: f64 = 0.0;
    let mut stalled = 0usize;

    while state.iteration < config.max_iterations {
        state.iteration += 1;
        let last = *state.objective_trace.last().expect("trace starts nonempty");
        let mut expansion = state.lifted.clone();
        let mut tolerances = config.tolerances;
        let mut outcome = None;
        for _ in 0..=config.damping_retries {
            let points: Vec<EventPoint> = expected_event_terms(&layout, &corr, &expansion, noise)
                .into_iter()
                .map(|(a, b)| EventPoint {
                    total: a + b,
                    interference: b,
                })
                .collect();
            let dirs = penalty::principal_directions(&expansion);
            let sub = build_robust_subproblem(&layout, &corr, &points, &dirs, &weights, state.beta, powers, noise);
            let sol = solve(&sub.problem, &tolerances)?;
            if sol.is_optimal() {
                max_residual = max_residual.max(sol.primal_residual);
                outcome = Some((sub, sol));
                break;
            }
            expansion = average(&expansion, &previous);
            tolerances.gap *= 100.0;
        }
        let Some((sub, sol)) = outcome else {
            status = ReportStatus::NumericalFailure;
            break;
        };
        state.beta_schedule.push(state.beta);
        previous = std::mem::replace(&mut state.lifted, sub.lifted_values(&sol));
        state.objective_trace.push(sol.objective);

        let worst = penalty::residuals(&state.lifted).into_iter().fold(0.0, f64::max);
        let settled = (sol.objective - last).abs() < config.epsilon;
        if settled && (worst <= config.rank_tolerance || state.beta >= config.beta_max) {
            status = ReportStatus::Converged;
            break;
        }
        stalled = if worst > config.rank_tolerance { stalled + 1 } else { 0 };
        if stalled >= config.stall_window && state.beta < config.beta_max {
            state.beta = (state.beta * config.beta_growth).min(config.beta_max);
            stalled = 0;
        }
    }

    let lifted_eval = expected_evaluation(&layout, &corr, &state.lifted, noise);
    let mut x = recover(&layout, &state.lifted, powers);
    let mut recovered = expected_evaluation(&layout, &corr, &lift(&layout, &x), noise);
    let mut warnings = Vec::new();
    let mut randomized = false;
    if config.randomization && recovered.mmf < config.recovery_ratio * lifted_eval.mmf {
        let mut rng = ChaCha8Rng::seed_from_u64(config.monte_carlo_seed ^ 0x9e37_79b9);
        for _ in 0..config.randomization_draws {
            let cand = penalty::gaussian_draw(&layout, &state.lifted, powers, &mut rng);
            let eval = expected_evaluation(&layout, &corr, &lift(&layout, &cand), noise);
            if eval.mmf > recovered.mmf {
                x = cand;
                recovered = eval;
                randomized = true;
            }
        }
    }
    let residuals = penalty::residuals(&state.lifted);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > config.rank_tolerance {
        warnings.push(format!("largest rank-one residual {worst:.3e} exceeds {:.1e}", config.rank_tolerance));
    }
    if recovered.mmf < config.recovery_ratio * lifted_eval.mmf {
        warnings.push(format!(
            "recovered precoders keep {:.1}% of the lifted rate",
            100.0 * recovered.mmf / lifted_eval.mmf.max(f64::MIN_POSITIVE)
        ));
    }

    let x_full = basis.expand(&x, n_s);
    let bf = BeamformerSet::from_global(scheme, &x_full, n_s)?;
    let mc = monte_carlo_evaluation(
        ch,
        &full,
        &x_full,
        delta_sq,
        config.monte_carlo_draws,
        config.monte_carlo_seed,
        noise,
    )?;
    let rate_comparison = recovered
        .user_totals
        .iter()
        .zip(&mc.user_totals)
        .enumerate()
        .map(|(user, (&expected, &monte_carlo))| RateComparison {
            user,
            expected,
            monte_carlo,
        })
        .collect();

    Ok(SolveReport {
        solver: "robust".into(),
        scheme,
        strategy,
        status,
        iterations: state.iteration,
        objective_trace: state.objective_trace,
        surrogate_trace: Vec::new(),
        mmf_rate: recovered.mmf,
        beam_rates: recovered.user_totals[..n_s].to_vec(),
        cu_rates: recovered.user_totals[n_s..].to_vec(),
        portions: recovered.portions.clone(),
        power_violation: bf.power_violation(powers.p_s, powers.p_t),
        max_solver_residual: max_residual,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        beamformers: BeamformerRecord::from(&bf),
        robust: Some(RobustDiagnostics {
            delta_sq,
            perfect_csit_mmf: warm.mmf_rate,
            nominal_expected_mmf: nominal,
            lifted_mmf: lifted_eval.mmf,
            recovered_mmf: recovered.mmf,
            monte_carlo_mmf: mc.mmf,
            rank_one_residuals: residuals,
            max_rank_one_residual: worst,
            beta_schedule: state.beta_schedule,
            rate_comparison,
            randomized,
            warnings,
        }),
        notes: Vec::new(),
    })
}

fn average(a: &[Option<CMatrix>], b: &[Option<CMatrix>]) -> Vec<Option<CMatrix>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => Some((x + y).scale(0.5)),
            (x, _) => x.clone(),
        })
        .collect()
}
