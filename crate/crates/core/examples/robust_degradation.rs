//! Robust design under satellite phase uncertainty on a few realizations.
//!
//! Prints, per phase-error figure, the perfect-CSIT rate, the expected rate
//! of the non-robust precoders, the robust expected rate and its Monte Carlo
//! check. Run with
//! `cargo run --release --example robust_degradation -- [realizations] [rsma|sdma]`.

use stin::channel_models::{sample_channel_set, ChannelConfig, PhaseVarianceUnit};
use stin::rate_model::{Access, Scheme, TransmitStrategy};
use stin::robust::{run_robust_from, RobustConfig};
use stin::sca::{run_sca, PowerBudget, ScaConfig};

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let realizations: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let access = match args.next().as_deref() {
        Some("sdma") => Access::Sdma,
        _ => Access::Rsma,
    };
    let strategy = TransmitStrategy::uniform(access);
    let powers = PowerBudget::from_db(120.0, 20.0);
    let config = RobustConfig {
        monte_carlo_draws: 2000,
        ..Default::default()
    };
    for figure in [0.0, 5.0, 15.0, 45.0] {
        let delta_sq = PhaseVarianceUnit::Degrees.to_rad_sq(figure);
        let (mut perfect, mut nominal, mut robust, mut mc) = (0.0, 0.0, 0.0, 0.0);
        let mut worst_rank: f64 = 0.0;
        let mut iters = 0;
        for seed in 0..realizations {
            let ch = sample_channel_set(&ChannelConfig::reference(), seed)?;
            let warm = run_sca(&ch, &powers, Scheme::Coordinated, strategy, &ScaConfig::default())?;
            let r = run_robust_from(&ch, delta_sq, &powers, &warm, &config)?;
            let d = r.robust.as_ref().expect("robust diagnostics");
            perfect += warm.mmf_rate;
            nominal += d.nominal_expected_mmf;
            robust += r.mmf_rate;
            mc += d.monte_carlo_mmf;
            worst_rank = worst_rank.max(d.max_rank_one_residual);
            iters += r.iterations;
        }
        let n = realizations as f64;
        println!(
            "{figure:>4} deg  perfect {:.4}  non-robust {:.4}  robust {:.4} (mc {:.4})  loss {:.2}%  rank {:.1e}  iters {:.1}",
            perfect / n,
            nominal / n,
            robust / n,
            mc / n,
            100.0 * (1.0 - robust / perfect),
            worst_rank,
            iters as f64 / n
        );
    }
    Ok(())
}
