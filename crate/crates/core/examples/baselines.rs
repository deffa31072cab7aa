//! Joint design against the two-step and orthogonal-band baselines over a
//! range of BS budgets.
//!
//! Run with `cargo run --release --example baselines -- [seed]`.

use stin::channel_models::{sample_channel_set, ChannelConfig};
use stin::harness::{baseline_orthogonal, baseline_two_step};
use stin::rate_model::{Access, Scheme, TransmitStrategy};
use stin::sca::{run_sca, PowerBudget, ScaConfig};

fn main() -> stin::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let ch = sample_channel_set(&ChannelConfig::reference(), seed)?;
    let cfg = ScaConfig::default();
    println!("P_t dB   joint RSMA   two-step   orthogonal   satellite-only");
    for pt in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let powers = PowerBudget::from_db(120.0, pt);
        let joint = run_sca(&ch, &powers, Scheme::Coordinated, TransmitStrategy::uniform(Access::Rsma), &cfg)?;
        let two = baseline_two_step(&ch, &powers, &cfg)?;
        let orth = baseline_orthogonal(&ch, &powers, &cfg)?;
        let sat_only = two.beam_rates.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{pt:>6}   {:>10.4}   {:>8.4}   {:>10.4}   {:>14.4}",
            joint.mmf_rate, two.mmf_rate, orth.mmf_rate, sat_only
        );
    }
    Ok(())
}
