//! Result files: `results.csv` with one row per cell and realization, and
//! `summary.json` with per-cell statistics. Neither contains timings, so
//! reruns of the same configuration produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::baselines::ORTHOGONAL_PRE_LOG;
use super::sweep::SweepResult;
use crate::channel_models::PhaseVarianceUnit;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "scheme,strategy,P_t_dB,P_s_W,delta_sq,realization,mmf_rate_bps_hz,iterations,status";

fn delta_label(d: Option<f64>) -> String {
    d.map_or_else(|| "none".to_string(), |v| v.to_string())
}

pub fn results_csv(result: &SweepResult) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in &result.cells {
        let (scheme, strategy) = c.key.cell.labels();
        for (r, o) in c.outcomes.iter().enumerate() {
            writeln!(
                s,
                "{scheme},{strategy},{},{},{},{r},{},{},{}",
                c.key.p_t_db,
                c.key.p_s_w,
                delta_label(c.key.delta),
                o.mmf_rate,
                o.iterations,
                o.status
            )
            .expect("writing to a String cannot fail");
        }
    }
    s
}

#[derive(Debug, Serialize)]
struct CellSummary {
    scheme: String,
    strategy: String,
    p_t_db: f64,
    p_s_w: f64,
    delta_sq: Option<f64>,
    delta_sq_rad: Option<f64>,
    mean_mmf_rate: f64,
    stderr_mmf_rate: f64,
    mean_iterations: f64,
    failures: usize,
    realizations: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    master_seed: u64,
    realizations: usize,
    seeds: Vec<Option<u64>>,
    delta_unit: PhaseVarianceUnit,
    multi_start: bool,
    baseline_orthogonal_pre_log: f64,
    cells: Vec<CellSummary>,
}

pub fn summary_json(result: &SweepResult) -> Result<String> {
    let cfg = &result.config;
    let summary = Summary {
        master_seed: cfg.master_seed,
        realizations: result.realizations(),
        seeds: result.seeds.clone(),
        delta_unit: cfg.sweep.delta_unit,
        multi_start: cfg.sweep.multi_start,
        baseline_orthogonal_pre_log: ORTHOGONAL_PRE_LOG,
        cells: result
            .cells
            .iter()
            .map(|c| {
                let (scheme, strategy) = c.key.cell.labels();
                CellSummary {
                    scheme,
                    strategy,
                    p_t_db: c.key.p_t_db,
                    p_s_w: c.key.p_s_w,
                    delta_sq: c.key.delta,
                    delta_sq_rad: c.delta_sq_rad,
                    mean_mmf_rate: c.mean,
                    stderr_mmf_rate: c.stderr,
                    mean_iterations: c.mean_iterations,
                    failures: c.failures,
                    realizations: c.outcomes.len(),
                }
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Serde(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Write both files into `dir` (created if missing) and return their paths.
pub fn emit_results(result: &SweepResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("results.csv");
    let json = dir.join("summary.json");
    std::fs::write(&csv, results_csv(result)).map_err(|e| Error::io(&csv, e))?;
    std::fs::write(&json, summary_json(result)?).map_err(|e| Error::io(&json, e))?;
    Ok((csv, json))
}
