use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stin::channel_models::{dump, ChannelSet};
use stin::harness::{
    emit_results, run_sweep_on, run_validation, sample_realizations, CellSpec, PerfectSolver, ScenarioConfig,
};
use stin::report::SolveReport;
use stin::robust::run_robust_from;
use stin::{Error, Result};

#[derive(Parser)]
#[command(name = "stin", version, about = "Max-min fair beamforming for satellite-terrestrial networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Scenario {
    /// Scenario file (TOML). Without one the reference deployment is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the master seed of the scenario.
    #[arg(long, env = "STIN_SEED")]
    seed: Option<u64>,
    /// Overrides the number of realizations.
    #[arg(long)]
    realizations: Option<usize>,
    /// Use channels from a dump instead of sampling them.
    #[arg(long)]
    load_channels: Option<PathBuf>,
}

impl Scenario {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(r) = self.realizations {
            cfg.realizations = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn channels(&self, cfg: &ScenarioConfig) -> Result<Vec<ChannelSet>> {
        match &self.load_channels {
            Some(p) => dump::read(p),
            None => sample_realizations(cfg),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one cell on one realization and print the report as JSON.
    Solve {
        #[command(flatten)]
        scenario: Scenario,
        /// Realization index.
        #[arg(long, default_value_t = 0)]
        realization: usize,
        /// Cell such as `cooperative:rsma-rsma` or `baseline1`; defaults to
        /// the first configured cell.
        #[arg(long)]
        cell: Option<CellSpec>,
        /// BS budget in dB; defaults to the first configured value.
        #[arg(long)]
        pt_db: Option<f64>,
        /// Satellite budget in watts; defaults to the first configured value.
        #[arg(long)]
        ps_w: Option<f64>,
        /// Phase-error figure in the configured unit; selects the robust solver.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run the scenario grid and write results.csv and summary.json.
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, env = "STIN_OUTPUT_DIR", default_value = "results")]
        output_dir: PathBuf,
    },
    /// Run the invariant checks on a small instance.
    Validate {
        #[arg(long, env = "STIN_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Write the scenario's channel realizations to a JSON dump.
    DumpChannels {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long)]
        output: PathBuf,
    },
}

fn solve(
    scenario: &Scenario,
    realization: usize,
    cell: Option<CellSpec>,
    pt_db: Option<f64>,
    ps_w: Option<f64>,
    delta: Option<f64>,
) -> Result<SolveReport> {
    let mut cfg = scenario.config()?;
    if scenario.load_channels.is_none() {
        cfg.realizations = cfg.realizations.max(realization + 1);
    }
    let channels = scenario.channels(&cfg)?;
    let ch = channels.get(realization).ok_or_else(|| {
        Error::InvalidArgument(format!("realization {realization} out of range ({} available)", channels.len()))
    })?;
    let first = |v: &[f64], what: &str| {
        v.first()
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("no {what} configured")))
    };
    let pt = match pt_db {
        Some(p) => p,
        None => first(&cfg.sweep.p_t_db, "P_t")?,
    };
    let ps = match ps_w {
        Some(p) => p,
        None => first(&cfg.sweep.p_s_w, "P_s")?,
    };
    let cell = match cell {
        Some(c) => c,
        None => *cfg
            .sweep
            .cells
            .first()
            .ok_or_else(|| Error::InvalidConfig("no cells configured".into()))?,
    };
    let powers = ScenarioConfig::budget(pt, ps);
    powers.validate()?;
    match (cell, delta) {
        (CellSpec::BaselineTwoStep, None) => stin::harness::baseline_two_step(ch, &powers, &cfg.sca),
        (CellSpec::BaselineOrthogonal, None) => stin::harness::baseline_orthogonal(ch, &powers, &cfg.sca),
        (c, Some(_)) if c.is_baseline() => Err(Error::InvalidArgument(format!("{c} has no robust variant"))),
        (CellSpec::Joint { scheme, strategy }, d) => {
            let mut solver = PerfectSolver::new(ch, powers, &cfg.sca, cfg.sweep.multi_start);
            let perfect = solver.solve(scheme, strategy)?;
            match d {
                None => Ok(perfect),
                Some(fig) => run_robust_from(ch, cfg.sweep.delta_unit.to_rad_sq(fig), &powers, &perfect, &cfg.robust),
            }
        }
        _ => unreachable!("baselines without delta are matched above"),
    }
}

fn sweep(scenario: &Scenario, output_dir: &Path) -> Result<bool> {
    let cfg = scenario.config()?;
    let channels = scenario.channels(&cfg)?;
    let result = run_sweep_on(&cfg, &channels)?;
    let (csv, json) = emit_results(&result, output_dir)?;
    for c in &result.cells {
        let delta = c.key.delta.map_or_else(|| "none".to_string(), |d| d.to_string());
        println!(
            "{:<28} P_t {:>5} dB  P_s {:>6} W  delta {:>5}  mean {:.4} +- {:.4}  failures {}",
            c.key.cell.to_string(),
            c.key.p_t_db,
            c.key.p_s_w,
            delta,
            c.mean,
            c.stderr,
            c.failures
        );
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(!result.any_numerical_failure())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            scenario,
            realization,
            cell,
            pt_db,
            ps_w,
            delta,
        } => {
            let report = solve(&scenario, realization, cell, pt_db, ps_w, delta)?;
            println!("{}", report.to_json()?);
            Ok(!report.is_failure())
        }
        Command::Sweep { scenario, output_dir } => sweep(&scenario, &output_dir),
        Command::Validate { seed } => {
            let checks = run_validation(seed)?;
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("{mark}  {}  {}", c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::DumpChannels { scenario, output } => {
            let cfg = scenario.config()?;
            let channels = scenario.channels(&cfg)?;
            dump::write(&output, &channels)?;
            println!("wrote {} realizations to {}", channels.len(), output.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
