//! Correlation of a satellite channel under phase errors, closed form against
//! sampled perturbations.
//!
//! Run with `cargo run --release --example phase_uncertainty -- [figure] [unit]`
//! where `unit` is one of `degrees` (default), `degrees_squared`,
//! `std_dev_degrees`, `radians`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stin::channel_models::{channel_correlation, perturb, sample_channel_set, ChannelConfig, PhaseVarianceUnit};
use stin::linalg::{outer, CMatrix};

fn main() -> stin::Result<()> {
    let mut args = std::env::args().skip(1);
    let figure: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let unit = match args.next().as_deref() {
        None | Some("degrees") => PhaseVarianceUnit::Degrees,
        Some("degrees_squared") => PhaseVarianceUnit::DegreesSquared,
        Some("std_dev_degrees") => PhaseVarianceUnit::StdDevDegrees,
        Some("radians") => PhaseVarianceUnit::Radians,
        Some(other) => return Err(stin::Error::InvalidArgument(format!("unknown unit {other:?}"))),
    };
    let delta_sq = unit.to_rad_sq(figure);
    let ch = sample_channel_set(&ChannelConfig::reference(), 1)?;
    let f_hat = ch.f.column(0).into_owned();
    let closed = channel_correlation(&f_hat, delta_sq);

    let draws = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut acc = CMatrix::zeros(ch.n_s(), ch.n_s());
    for _ in 0..draws {
        let f = perturb(&ch.f_amp, &ch.f_phase, delta_sq, &mut rng);
        acc += outer(&f.column(0).into_owned());
    }
    let sampled = acc.unscale(draws as f64);
    println!("figure {figure} read as {unit:?}: delta^2 = {delta_sq:.5} rad^2, off-diagonal factor {:.5}", (-delta_sq).exp());
    println!("relative gap between closed form and {draws} draws: {:.2e}", (&sampled - &closed).norm() / closed.norm());
    Ok(())
}
