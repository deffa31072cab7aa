//! One robust design with its diagnostics: penalty schedule, rank-one
//! residuals and expected against phase-averaged rates.
//!
//! Run with `cargo run --release --example robust_single -- [seed] [figure in degrees]`.

use stin::channel_models::{sample_channel_set, ChannelConfig, PhaseVarianceUnit};
use stin::rate_model::{Access, Scheme, TransmitStrategy};
use stin::robust::{run_robust, RobustConfig};
use stin::sca::PowerBudget;

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let figure: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let ch = sample_channel_set(&ChannelConfig::reference(), seed)?;
    let delta_sq = PhaseVarianceUnit::Degrees.to_rad_sq(figure);
    let powers = PowerBudget::from_db(120.0, 20.0);
    let r = run_robust(
        &ch,
        delta_sq,
        &powers,
        Scheme::Coordinated,
        TransmitStrategy::uniform(Access::Rsma),
        &RobustConfig::default(),
    )?;
    let d = r.robust.as_ref().expect("robust reports carry diagnostics");
    println!("status {} after {} iterations", r.status, r.iterations);
    println!("perfect-CSIT MMF           {:.4}", d.perfect_csit_mmf);
    println!("perfect design, expected   {:.4}", d.nominal_expected_mmf);
    println!("lifted objective MMF       {:.4}", d.lifted_mmf);
    println!("recovered, expected        {:.4}", d.recovered_mmf);
    println!("recovered, phase-averaged  {:.4}", d.monte_carlo_mmf);
    println!("worst rank-one residual    {:.2e}", d.max_rank_one_residual);
    let mut betas = d.beta_schedule.clone();
    betas.dedup();
    println!("penalty values used        {betas:?}");
    for row in &d.rate_comparison {
        println!("  {:<8} expected {:.4}  averaged {:.4}", row.user, row.expected, row.monte_carlo);
    }
    for w in &d.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
