//! Phase-averaged instantaneous rates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel_models::{perturb, ChannelSet};
use crate::linalg::CMatrix;
use crate::rate_model::{DecodeLayout, Evaluation};
use crate::Result;

/// Average every event's instantaneous rate `log2(1 + SINR)` over `draws`
/// phase-error draws around the estimate in `ch`, then form user totals.
/// `x` holds global precoders of the full-size `layout`.
pub fn monte_carlo_evaluation(
    ch: &ChannelSet,
    layout: &DecodeLayout,
    x: &CMatrix,
    delta_sq: f64,
    draws: usize,
    seed: u64,
    noise_var: f64,
) -> Result<Evaluation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = layout.clone();
    let mut draw = ch.clone();
    let mut sums = vec![0.0; layout.events.len()];
    for _ in 0..draws.max(1) {
        draw.f = perturb(&ch.f_amp, &ch.f_phase, delta_sq, &mut rng);
        draw.z = perturb(&ch.z_amp, &ch.z_phase, delta_sq, &mut rng);
        scratch.set_channels(&draw)?;
        for (acc, r) in sums.iter_mut().zip(scratch.evaluate(x, noise_var).event_rate) {
            *acc += r;
        }
    }
    let n = draws.max(1) as f64;
    let rates: Vec<f64> = sums.into_iter().map(|s| s / n).collect();
    let sinr = rates.iter().map(|r| 2f64.powf(*r) - 1.0).collect();
    Ok(layout.totals_from_rates(sinr, rates))
}
