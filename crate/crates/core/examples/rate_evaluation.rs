//! Evaluate SINRs and rates of hand-built precoders under each strategy.
//!
//! The precoders are matched filters scaled to the budgets; no optimization
//! takes place. NOMA is only defined for the coordinated scheme. Run with `cargo run --release --example rate_evaluation`.

use stin::channel_models::{sample_channel_set, ChannelConfig};
use stin::rate_model::{Access, DecodeLayout, Scheme, TransmitStrategy};
use stin::sca::{initial_point, InitStrategy, PowerBudget};

fn main() -> stin::Result<()> {
    let ch = sample_channel_set(&ChannelConfig::reference(), 3)?;
    let powers = PowerBudget::from_db(120.0, 20.0);
    for scheme in [Scheme::Coordinated, Scheme::Cooperative] {
        for access in [Access::Rsma, Access::Sdma, Access::Noma] {
            if scheme == Scheme::Cooperative && access == Access::Noma {
                continue;
            }
            let strategy = TransmitStrategy::uniform(access);
            let layout = DecodeLayout::new(&ch, scheme, strategy)?;
            let x = initial_point(&layout, &ch, &powers, InitStrategy::MatchedFilter);
            let eval = layout.evaluate(&x, 1.0);
            let (beams, cus) = eval.user_totals.split_at(ch.n_s());
            println!(
                "{:<12} {:<10} events {:>2}  beams {:?}  CUs {:?}  mmf {:.4}",
                scheme.to_string(),
                strategy.to_string(),
                layout.events.len(),
                beams.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>(),
                cus.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>(),
                eval.mmf
            );
        }
    }
    Ok(())
}
