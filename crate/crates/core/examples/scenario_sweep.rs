//! Run a scenario file and write `results.csv` and `summary.json`.
//!
//! Run with `cargo run --release --example scenario_sweep -- [config.toml] [output dir]`.
//! Without arguments a small built-in scenario is used.

use std::path::PathBuf;

use stin::harness::{emit_results, run_sweep, ScenarioConfig};

const BUILT_IN: &str = r#"
master_seed = 11
realizations = 4

[network]
beams = 2
users_per_beam = 2
n1 = 2
n2 = 2
cellular_users = 2
paths = 2

[sweep]
p_t_db = [10.0, 20.0]
cells = ["coordinated:rsma-rsma", "coordinated:sdma-sdma", "baseline2"]
"#;

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(p) => ScenarioConfig::load(&PathBuf::from(p))?,
        None => ScenarioConfig::from_toml(BUILT_IN)?,
    };
    let out = args.next().map_or_else(|| std::env::temp_dir().join("stin-sweep"), PathBuf::from);
    let result = run_sweep(&cfg)?;
    for c in &result.cells {
        println!(
            "{:<24} P_t {:>4} dB  mean {:.4}  stderr {:.4}  iterations {:.1}",
            c.key.cell.to_string(),
            c.key.p_t_db,
            c.mean,
            c.stderr,
            c.mean_iterations
        );
    }
    let (csv, json) = emit_results(&result, &out)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
