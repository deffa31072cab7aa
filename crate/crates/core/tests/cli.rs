use std::path::Path;
use std::process::{Command, Output};

const TINY: &str = r#"
master_seed = 5
realizations = 2

[network]
beams = 2
users_per_beam = 1
n1 = 2
n2 = 1
cellular_users = 1
paths = 1

[sweep]
p_t_db = [10.0]
cells = ["coordinated:sdma-sdma", "baseline2"]
"#;

fn stin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stin"))
        .args(args)
        .env_remove("STIN_SEED")
        .env_remove("STIN_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    std::fs::write(&path, TINY).unwrap();
    path.to_str().unwrap().to_string()
}

fn sweep_into(cfg: &str, out: &Path, extra: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let mut args = vec!["sweep", "--config", cfg, "--output-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = stin(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (
        std::fs::read(out.join("results.csv")).unwrap(),
        std::fs::read(out.join("summary.json")).unwrap(),
    )
}

#[test]
fn loaded_channels_reproduce_the_sampled_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let dump = dir.path().join("channels.json");
    let o = stin(&["dump-channels", "--config", &cfg, "--output", dump.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let sampled = sweep_into(&cfg, &dir.path().join("a"), &[]);
    let loaded = sweep_into(&cfg, &dir.path().join("b"), &["--load-channels", dump.to_str().unwrap()]);
    assert_eq!(sampled, loaded);

    let csv = String::from_utf8(sampled.0).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let a = sweep_into(&cfg, &dir.path().join("a"), &[]);
    let b = sweep_into(&cfg, &dir.path().join("b"), &[]);
    assert_eq!(a, b);
    let c = sweep_into(&cfg, &dir.path().join("c"), &["--seed", "6"]);
    assert_ne!(a.0, c.0);
}

#[test]
fn solve_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let o = stin(&["solve", "--config", &cfg, "--cell", "coordinated:rsma-rsma", "--realization", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["mmf_rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn robust_baseline_is_rejected_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let o = stin(&["solve", "--config", &cfg, "--cell", "baseline1", "--delta", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("robust"));
}

#[test]
fn unknown_config_keys_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "master_seed = 1\nrealisations = 3\n").unwrap();
    let o = stin(&["dump-channels", "--config", path.to_str().unwrap(), "--output", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
}
