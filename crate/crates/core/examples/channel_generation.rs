//! Draw one realization of the reference deployment and inspect it.
//!
//! Run with `cargo run --release --example channel_generation -- [seed] [dump.json]`.
//! With a second argument the realization is also written as a channel dump.

use std::path::PathBuf;

use stin::channel_models::{beam_gain, dump, sample_channel_set, ChannelConfig};

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    let cfg = ChannelConfig::reference();
    let ch = sample_channel_set(&cfg, seed)?;
    let sat = &cfg.satellite;
    println!(
        "N_s = {}, K_s = {}, N_t = {}, K_t = {} (seed {seed})",
        ch.n_s(),
        ch.k_s(),
        ch.n_t(),
        ch.k_t()
    );
    println!("beam gain at boresight {:.3e}, at the 3 dB angle {:.3e}", beam_gain(0.0, sat), beam_gain(sat.three_db_angle_deg, sat));

    println!("\n|f_k| per feed (rows) and SU (columns), beam map {:?}", ch.group_map);
    for n in 0..ch.n_s() {
        let row: Vec<String> = (0..ch.k_s()).map(|k| format!("{:8.3}", ch.f_amp[(n, k)])).collect();
        println!("  feed {n}: {}", row.join(" "));
    }
    println!("\nsatellite leakage |z_k| and BS gain |h_k| per CU");
    for k in 0..ch.k_t() {
        println!("  CU {k}: |z| = {:8.4}  |h| = {:8.4}", ch.z.column(k).norm(), ch.h.column(k).norm());
    }

    if let Some(path) = out {
        dump::write(&path, std::slice::from_ref(&ch))?;
        let back = dump::read(&path)?;
        println!("\nwrote {} and read it back; identical: {}", path.display(), back[0] == ch);
    }
    Ok(())
}
