//! Monte Carlo sweeps over the scenario grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baselines::{baseline_orthogonal, baseline_two_step};
use super::config::{CellSpec, ScenarioConfig};
use super::solve::{is_failed, PerfectSolver};
use crate::channel_models::{sample_channel_set, ChannelSet};
use crate::report::{ReportStatus, SolveReport};
use crate::robust::run_robust_from;
use crate::{Error, Result};

/// SplitMix64 output for `master` advanced by `index + 1` steps.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Coordinates of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub cell: CellSpec,
    pub p_t_db: f64,
    pub p_s_w: f64,
    /// Phase-error figure as configured; `None` is perfect CSIT.
    pub delta: Option<f64>,
}

/// Every grid cell, cells outermost, then `P_s`, `P_t` and the uncertainty
/// axis.
pub fn grid(config: &ScenarioConfig) -> Vec<CellKey> {
    let g = &config.sweep;
    let mut out = Vec::new();
    for &cell in &g.cells {
        for (p_t_db, p_s_w) in g.power_axis() {
            for delta in g.uncertainty_axis() {
                out.push(CellKey {
                    cell,
                    p_t_db,
                    p_s_w,
                    delta,
                });
            }
        }
    }
    out
}

/// One cell on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub mmf_rate: f64,
    pub iterations: usize,
    pub status: ReportStatus,
    /// `None` when the solver returned an error instead of a report.
    pub report: Option<SolveReport>,
    pub error: Option<String>,
}

impl CellOutcome {
    fn from_result(r: Result<SolveReport>) -> Self {
        match r {
            Ok(rep) => Self {
                mmf_rate: rep.mmf_rate,
                iterations: rep.iterations,
                status: rep.status,
                report: Some(rep),
                error: None,
            },
            Err(e) => Self {
                mmf_rate: f64::NAN,
                iterations: 0,
                status: ReportStatus::NumericalFailure,
                report: None,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn failed(&self) -> bool {
        is_failed(self.status)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    /// The configured figure in rad².
    pub delta_sq_rad: Option<f64>,
    /// Indexed by realization.
    pub outcomes: Vec<CellOutcome>,
    /// Mean MMF rate over realizations with a finite rate.
    pub mean: f64,
    pub stderr: f64,
    pub mean_iterations: f64,
    pub failures: usize,
}

impl CellResult {
    fn new(key: CellKey, delta_sq_rad: Option<f64>, outcomes: Vec<CellOutcome>) -> Self {
        let vals: Vec<f64> = outcomes.iter().map(|o| o.mmf_rate).filter(|v| v.is_finite()).collect();
        let n = vals.len();
        let mean = if n == 0 { f64::NAN } else { vals.iter().sum::<f64>() / n as f64 };
        let stderr = if n < 2 {
            0.0
        } else {
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        let mean_iterations = if outcomes.is_empty() {
            0.0
        } else {
            outcomes.iter().map(|o| o.iterations as f64).sum::<f64>() / outcomes.len() as f64
        };
        let failures = outcomes.iter().filter(|o| o.failed()).count();
        Self {
            key,
            delta_sq_rad,
            outcomes,
            mean,
            stderr,
            mean_iterations,
            failures,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.mmf_rate).collect()
    }

    pub fn iterations(&self) -> Vec<usize> {
        self.outcomes.iter().map(|o| o.iterations).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    /// Seeds of the realizations, `None` for loaded channels without one.
    pub seeds: Vec<Option<u64>>,
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn realizations(&self) -> usize {
        self.seeds.len()
    }

    pub fn cell(&self, cell: CellSpec, p_t_db: f64, p_s_w: f64, delta: Option<f64>) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.key.cell == cell && c.key.p_t_db == p_t_db && c.key.p_s_w == p_s_w && c.key.delta == delta)
    }

    pub fn any_numerical_failure(&self) -> bool {
        self.cells.iter().any(|c| c.failures > 0)
    }
}

/// Draw the realizations of `config`.
pub fn sample_realizations(config: &ScenarioConfig) -> Result<Vec<ChannelSet>> {
    config.validate()?;
    let cc = config.channel_config();
    (0..config.realizations as u64)
        .map(|r| sample_channel_set(&cc, child_seed(config.master_seed, r)))
        .collect()
}

/// Evaluate every grid cell on one realization.
pub fn evaluate_realization(config: &ScenarioConfig, ch: &ChannelSet) -> Vec<CellOutcome> {
    let keys = grid(config);
    let mut out = vec![None; keys.len()];
    let unit = config.sweep.delta_unit;
    for (p_t_db, p_s_w) in config.sweep.power_axis() {
        let powers = ScenarioConfig::budget(p_t_db, p_s_w);
        let mut perfect = PerfectSolver::new(ch, powers, &config.sca, config.sweep.multi_start);
        for (i, key) in keys.iter().enumerate() {
            if key.p_t_db != p_t_db || key.p_s_w != p_s_w {
                continue;
            }
            let result = match (key.cell, key.delta) {
                (CellSpec::BaselineTwoStep, _) => baseline_two_step(ch, &powers, &config.sca),
                (CellSpec::BaselineOrthogonal, _) => baseline_orthogonal(ch, &powers, &config.sca),
                (CellSpec::Joint { scheme, strategy }, None) => perfect.solve(scheme, strategy),
                (CellSpec::Joint { scheme, strategy }, Some(figure)) => perfect
                    .solve(scheme, strategy)
                    .and_then(|warm| run_robust_from(ch, unit.to_rad_sq(figure), &powers, &warm, &config.robust)),
            };
            out[i] = Some(CellOutcome::from_result(result));
        }
    }
    out.into_iter().map(|o| o.expect("every cell lies on the power axis")).collect()
}

/// Sample `config.realizations` channel sets and evaluate the grid on each.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    let channels = sample_realizations(config)?;
    run_sweep_on(config, &channels)
}

/// Evaluate the grid on given channel sets. Realizations run in parallel;
/// results are merged by index.
pub fn run_sweep_on(config: &ScenarioConfig, channels: &[ChannelSet]) -> Result<SweepResult> {
    config.validate()?;
    if channels.is_empty() {
        return Err(Error::InvalidArgument("a sweep needs at least one realization".into()));
    }
    let per_real: Vec<Vec<CellOutcome>> = channels.par_iter().map(|ch| evaluate_realization(config, ch)).collect();
    let keys = grid(config);
    let unit = config.sweep.delta_unit;
    let mut columns: Vec<Vec<CellOutcome>> = keys.iter().map(|_| Vec::with_capacity(channels.len())).collect();
    for row in per_real {
        for (i, o) in row.into_iter().enumerate() {
            columns[i].push(o);
        }
    }
    let cells = keys
        .into_iter()
        .zip(columns)
        .map(|(k, outcomes)| CellResult::new(k, k.delta.map(|d| unit.to_rad_sq(d)), outcomes))
        .collect();
    Ok(SweepResult {
        config: config.clone(),
        seeds: channels.iter().map(|c| c.seed).collect(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_model::{Access, Scheme, TransmitStrategy};

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig::from_toml(
            r#"
            master_seed = 3
            realizations = 2
            [network]
            beams = 2
            users_per_beam = 1
            n1 = 2
            n2 = 1
            cellular_users = 2
            paths = 2
            [sweep]
            p_t_db = [10.0]
            cells = ["coordinated:rsma-rsma", "coordinated:sdma-sdma"]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn child_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|r| child_seed(42, r)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(child_seed(42, 7), a[7]);
        assert_ne!(child_seed(43, 7), a[7]);
    }

    #[test]
    fn grid_is_the_full_cross_product() {
        let mut cfg = tiny_config();
        cfg.sweep.p_t_db = vec![0.0, 10.0, 20.0];
        cfg.sweep.p_s_w = vec![60.0, 120.0];
        cfg.sweep.delta_sq = vec![5.0];
        assert_eq!(grid(&cfg).len(), 2 * 3 * 2 * 2);
    }

    #[test]
    fn single_cell_sweep_wraps_one_report() {
        let mut cfg = tiny_config();
        cfg.realizations = 1;
        cfg.sweep.cells.truncate(1);
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.cells.len(), 1);
        let c = &res.cells[0];
        assert_eq!(c.outcomes.len(), 1);
        let rep = c.outcomes[0].report.as_ref().unwrap();
        assert_eq!(c.mean, rep.mmf_rate);
        assert_eq!(c.stderr, 0.0);
    }

    #[test]
    fn paired_cells_share_channels_and_rsma_dominates() {
        let cfg = tiny_config();
        let channels = sample_realizations(&cfg).unwrap();
        let again = sample_realizations(&cfg).unwrap();
        assert_eq!(channels, again);
        let res = run_sweep_on(&cfg, &channels).unwrap();
        let rsma = CellSpec::Joint {
            scheme: Scheme::Coordinated,
            strategy: TransmitStrategy::uniform(Access::Rsma),
        };
        let sdma = CellSpec::Joint {
            scheme: Scheme::Coordinated,
            strategy: TransmitStrategy::uniform(Access::Sdma),
        };
        let a = res.cell(rsma, 10.0, 120.0, None).unwrap().values();
        let b = res.cell(sdma, 10.0, 120.0, None).unwrap().values();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert!(x >= &(y - 1e-4), "{x} < {y}");
        }
        assert!(!res.any_numerical_failure());
    }

    #[test]
    fn solver_errors_become_failures() {
        let cfg = tiny_config();
        let mut ch = sample_realizations(&cfg).unwrap().remove(0);
        ch.h = crate::linalg::CMatrix::zeros(ch.n_t(), ch.k_t() + 1);
        let outcomes = evaluate_realization(&cfg, &ch);
        assert!(outcomes.iter().all(|o| o.failed() && o.error.is_some() && o.mmf_rate.is_nan()));
    }
}
