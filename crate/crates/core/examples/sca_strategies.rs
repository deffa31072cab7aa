//! Compare transmission strategies on one realization of the reference deployment.
//!
//! Run with `cargo run --release --example sca_strategies -- [seed] [P_t dB]`.

use stin::channel_models::{sample_channel_set, ChannelConfig};
use stin::rate_model::{Access, Scheme, TransmitStrategy};
use stin::sca::{run_sca, PowerBudget, ScaConfig};

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let pt_db: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let ch = sample_channel_set(&ChannelConfig::reference(), seed)?;
    let powers = PowerBudget::from_db(120.0, pt_db);
    let cases = [
        (Scheme::Cooperative, Access::Rsma),
        (Scheme::Cooperative, Access::Sdma),
        (Scheme::Coordinated, Access::Rsma),
        (Scheme::Coordinated, Access::Sdma),
        (Scheme::Coordinated, Access::Noma),
    ];
    println!("seed {seed}, P_t = {pt_db} dB, P_s = 120 W");
    for (scheme, access) in cases {
        let strategy = TransmitStrategy::uniform(access);
        let r = run_sca(&ch, &powers, scheme, strategy, &ScaConfig::default())?;
        println!(
            "{:<12} {:<10} mmf {:>7.4} bits/s/Hz  iterations {:>3}  {}  {:.2}s",
            scheme.to_string(),
            strategy.to_string(),
            r.mmf_rate,
            r.iterations,
            r.status,
            r.elapsed_seconds
        );
    }
    Ok(())
}
