//! Quick invariant checks on small instances, run by `stin validate`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::solve::PerfectSolver;
use crate::channel_models::{dump, sample_channel_set, ChannelConfig};
use crate::linalg::CVector;
use crate::rate_model::{Access, DecodeLayout, Scheme, TransmitStrategy};
use crate::robust::{run_robust_from, RobustConfig};
use crate::sca::{taylor_qol_lower_bound, PowerBudget, ScaConfig};
use crate::{Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Run the suite on the reference deployment drawn from `seed`.
pub fn run_validation(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cc = ChannelConfig::reference();
    let ch = sample_channel_set(&cc, seed)?;

    let again = sample_channel_set(&cc, seed)?;
    out.push(check("channels reproducible from seed", ch == again, format!("seed {seed}")));

    let back = dump::from_json(&dump::to_json(std::slice::from_ref(&ch))?)?;
    out.push(check("channel dump roundtrip is exact", back == vec![ch.clone()], String::new()));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let h = random_cvec(&mut rng, 4);
        let p0 = random_cvec(&mut rng, 4);
        let p = random_cvec(&mut rng, 4);
        let a0 = rng.random_range(0.01..10.0);
        let a = rng.random_range(0.01..10.0);
        let bound = taylor_qol_lower_bound(&h, &p0, a0)?;
        let exact = h.dotc(&p).norm_sqr() / a;
        worst = worst.max(bound.eval(&p, a) - exact);
    }
    out.push(check("Taylor bound never exceeds the function", worst <= 1e-9, format!("worst excess {worst:.3e}")));

    let powers = PowerBudget::from_db(120.0, 20.0);
    let sca = ScaConfig::default();
    let mut solver = PerfectSolver::new(&ch, powers, &sca, true);
    let rsma = TransmitStrategy::uniform(Access::Rsma);
    let sdma = TransmitStrategy::uniform(Access::Sdma);
    let coord_rsma = solver.solve(Scheme::Coordinated, rsma)?;
    let trace = &coord_rsma.objective_trace;
    let drop = trace.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    out.push(check(
        "SCA trace is nondecreasing",
        drop <= 1e-8,
        format!("{} iterations, largest drop {drop:.3e}", coord_rsma.iterations),
    ));
    let last_step = trace.windows(2).last().map_or(0.0, |w| (w[1] - w[0]).abs());
    out.push(check(
        "SCA stops on the objective change",
        last_step < sca.epsilon && coord_rsma.iterations <= sca.max_iterations,
        format!("status {}, last step {last_step:.3e}", coord_rsma.status),
    ));
    let layout = DecodeLayout::new(&ch, Scheme::Coordinated, rsma)?;
    let bf = coord_rsma.beamformer_set()?;
    let replay = layout.evaluate(&bf.to_global(), sca.noise_var).mmf;
    out.push(check(
        "reported rate is achieved by the precoders",
        (replay - coord_rsma.mmf_rate).abs() < 1e-9,
        format!("reported {}, replayed {replay}", coord_rsma.mmf_rate),
    ));
    out.push(check(
        "precoders respect the power budgets",
        coord_rsma.power_violation <= 1e-6,
        format!("violation {:.3e}", coord_rsma.power_violation),
    ));

    let coord_sdma = solver.solve(Scheme::Coordinated, sdma)?;
    out.push(check(
        "RSMA is at least SDMA",
        coord_rsma.mmf_rate >= coord_sdma.mmf_rate - 1e-4,
        format!("{} vs {}", coord_rsma.mmf_rate, coord_sdma.mmf_rate),
    ));
    let coop_sdma = solver.solve(Scheme::Cooperative, sdma)?;
    out.push(check(
        "cooperative SDMA is at least coordinated SDMA",
        coop_sdma.mmf_rate >= coord_sdma.mmf_rate - 1e-4,
        format!("{} vs {}", coop_sdma.mmf_rate, coord_sdma.mmf_rate),
    ));

    let robust = run_robust_from(&ch, 0.0, &powers, &coord_sdma, &RobustConfig::default())?;
    out.push(check(
        "robust design without phase error matches perfect CSIT",
        (robust.mmf_rate - coord_sdma.mmf_rate).abs() <= 1e-3 * coord_sdma.mmf_rate.max(1.0),
        format!("{} vs {}", robust.mmf_rate, coord_sdma.mmf_rate),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_a_reference_instance() {
        let checks = run_validation(1).unwrap();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(checks.len() >= 9);
    }
}
