//! Reference designs that do not optimize the two transmitters jointly.

use std::time::Instant;

use crate::channel_models::ChannelSet;
use crate::linalg::CMatrix;
use crate::rate_model::{Access, BeamformerRecord, BeamformerSet, DecodeLayout, Scheme, TransmitStrategy};
use crate::report::{ReportStatus, SolveReport};
use crate::sca::{run_sca, PowerBudget, ScaConfig};
use crate::Result;

const RSMA: TransmitStrategy = TransmitStrategy::uniform(Access::Rsma);

/// Pre-log factor of each sub-network in the orthogonal baseline.
pub const ORTHOGONAL_PRE_LOG: f64 = 0.5;

/// The BS sub-network alone: no satellite rows, no SUs.
fn terrestrial_only(h: CMatrix) -> Result<ChannelSet> {
    let k_t = h.ncols();
    ChannelSet::from_matrices(CMatrix::zeros(0, 0), CMatrix::zeros(0, k_t), h, Vec::new())
}

fn combined_status(a: ReportStatus, b: ReportStatus) -> ReportStatus {
    use ReportStatus::*;
    for s in [NumericalFailure, Infeasible, MaxIterations] {
        if a == s || b == s {
            return s;
        }
    }
    Converged
}

fn satellite_precoders(report: &SolveReport) -> Result<CMatrix> {
    match report.beamformer_set()? {
        BeamformerSet::Coordinated { w, .. } => Ok(w),
        BeamformerSet::Cooperative { .. } => unreachable!("baselines run the coordinated scheme"),
    }
}

fn bs_precoders(report: &SolveReport) -> Result<CMatrix> {
    match report.beamformer_set()? {
        BeamformerSet::Coordinated { p, .. } => Ok(p),
        BeamformerSet::Cooperative { .. } => unreachable!("baselines run the coordinated scheme"),
    }
}

/// Design the satellite for its SUs alone, then the BS for its CUs with the
/// frozen satellite signals as extra noise. The rates are those of the joint
/// network.
pub fn baseline_two_step(ch: &ChannelSet, powers: &PowerBudget, config: &ScaConfig) -> Result<SolveReport> {
    let clock = Instant::now();
    let noise = config.noise_var;
    let sat = run_sca(&ch.satellite_only(), powers, Scheme::Coordinated, RSMA, config)?;
    let w = satellite_precoders(&sat)?;

    // Whitening each CU by its interference-plus-noise level turns the frozen
    // satellite signals into the unit noise floor the solver expects.
    let mut h = ch.h.clone();
    for k in 0..ch.k_t() {
        let zk = ch.z.column(k);
        let leak: f64 = (0..w.ncols()).map(|j| (zk.adjoint() * w.column(j))[(0, 0)].norm_sqr()).sum();
        let scale = (noise / (noise + leak)).sqrt();
        h.column_mut(k).scale_mut(scale);
    }
    let bs = run_sca(&terrestrial_only(h)?, &PowerBudget::new(0.0, powers.p_t), Scheme::Coordinated, RSMA, config)?;
    let p = bs_precoders(&bs)?;

    let bf = BeamformerSet::Coordinated { w, p };
    let layout = DecodeLayout::new(ch, Scheme::Coordinated, RSMA)?;
    let eval = layout.evaluate(&bf.to_global(), noise);
    let n_s = ch.n_s();
    Ok(SolveReport {
        solver: "baseline_two_step".into(),
        scheme: Scheme::Coordinated,
        strategy: RSMA,
        status: combined_status(sat.status, bs.status),
        iterations: sat.iterations + bs.iterations,
        objective_trace: vec![eval.mmf],
        surrogate_trace: Vec::new(),
        mmf_rate: eval.mmf,
        beam_rates: eval.user_totals[..n_s].to_vec(),
        cu_rates: eval.user_totals[n_s..].to_vec(),
        portions: eval.portions,
        power_violation: bf.power_violation(powers.p_s, powers.p_t),
        max_solver_residual: sat.max_solver_residual.max(bs.max_solver_residual),
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        beamformers: BeamformerRecord::from(&bf),
        robust: None,
        notes: vec![
            format!("satellite stage: {} iterations, MMF {}", sat.iterations, sat.mmf_rate),
            format!("terrestrial stage: {} iterations, MMF {}", bs.iterations, bs.mmf_rate),
        ],
    })
}

/// Satellite and BS on disjoint halves of the band: each sub-network is
/// designed without cross interference and every rate is scaled by
/// [`ORTHOGONAL_PRE_LOG`].
pub fn baseline_orthogonal(ch: &ChannelSet, powers: &PowerBudget, config: &ScaConfig) -> Result<SolveReport> {
    let clock = Instant::now();
    let sat = run_sca(&ch.satellite_only(), powers, Scheme::Coordinated, RSMA, config)?;
    let bs = run_sca(
        &terrestrial_only(ch.h.clone())?,
        &PowerBudget::new(0.0, powers.p_t),
        Scheme::Coordinated,
        RSMA,
        config,
    )?;
    let half = |v: &[f64]| v.iter().map(|r| ORTHOGONAL_PRE_LOG * r).collect::<Vec<_>>();
    let n_s = ch.n_s();
    let beam_rates = half(&sat.beam_rates);
    let cu_rates = half(&bs.cu_rates);
    let mut portions = half(&sat.portions[..n_s]);
    portions.extend(half(&bs.portions));
    let mmf = beam_rates.iter().chain(&cu_rates).copied().fold(f64::INFINITY, f64::min);
    let mmf = if mmf.is_finite() { mmf } else { 0.0 };

    let w = satellite_precoders(&sat)?;
    let p = bs_precoders(&bs)?;
    let bf = BeamformerSet::Coordinated { w, p };
    Ok(SolveReport {
        solver: "baseline_orthogonal".into(),
        scheme: Scheme::Coordinated,
        strategy: RSMA,
        status: combined_status(sat.status, bs.status),
        iterations: sat.iterations + bs.iterations,
        objective_trace: vec![mmf],
        surrogate_trace: Vec::new(),
        mmf_rate: mmf,
        beam_rates,
        cu_rates,
        portions,
        power_violation: bf.power_violation(powers.p_s, powers.p_t),
        max_solver_residual: sat.max_solver_residual.max(bs.max_solver_residual),
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        beamformers: BeamformerRecord::from(&bf),
        robust: None,
        notes: vec![format!(
            "even band split: rates carry a pre-log factor of {ORTHOGONAL_PRE_LOG}"
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{sample_channel_set, ChannelConfig};
    use crate::C64;

    fn reference(seed: u64) -> ChannelSet {
        sample_channel_set(&ChannelConfig::reference(), seed).unwrap()
    }

    fn decoupled(seed: u64) -> ChannelSet {
        let mut ch = reference(seed);
        ch.z.fill(C64::new(0.0, 0.0));
        ch.z_amp.fill(0.0);
        ch
    }

    #[test]
    fn two_step_on_decoupled_networks_is_the_weaker_subnetwork() {
        let ch = decoupled(11);
        let powers = PowerBudget::from_db(120.0, 10.0);
        let cfg = ScaConfig::default();
        let two = baseline_two_step(&ch, &powers, &cfg).unwrap();
        let sat = run_sca(&ch.satellite_only(), &powers, Scheme::Coordinated, RSMA, &cfg).unwrap();
        let bs = run_sca(&terrestrial_only(ch.h.clone()).unwrap(), &powers, Scheme::Coordinated, RSMA, &cfg).unwrap();
        let expect = sat.mmf_rate.min(bs.mmf_rate);
        assert!((two.mmf_rate - expect).abs() < 1e-9, "{} vs {expect}", two.mmf_rate);
    }

    #[test]
    fn two_step_vanishes_without_bs_power() {
        let ch = reference(12);
        let r = baseline_two_step(&ch, &PowerBudget::new(120.0, 0.0), &ScaConfig::default()).unwrap();
        assert!(r.mmf_rate.abs() < 1e-12);
        assert!(r.cu_rates.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn orthogonal_rates_are_half_the_independent_rates() {
        let ch = reference(13);
        let powers = PowerBudget::from_db(120.0, 20.0);
        let cfg = ScaConfig::default();
        let orth = baseline_orthogonal(&ch, &powers, &cfg).unwrap();
        let sat = run_sca(&ch.satellite_only(), &powers, Scheme::Coordinated, RSMA, &cfg).unwrap();
        let bs = run_sca(&terrestrial_only(ch.h.clone()).unwrap(), &powers, Scheme::Coordinated, RSMA, &cfg).unwrap();
        for (a, b) in orth.beam_rates.iter().zip(&sat.beam_rates) {
            assert!((a - 0.5 * b).abs() < 1e-12);
        }
        for (a, b) in orth.cu_rates.iter().zip(&bs.cu_rates) {
            assert!((a - 0.5 * b).abs() < 1e-12);
        }
        assert!(orth.notes[0].contains("pre-log"));
        assert!(orth.power_violation < 1e-6);
    }

    #[test]
    fn orthogonal_on_decoupled_network_is_half_the_coordinated_rate() {
        let ch = decoupled(14);
        let powers = PowerBudget::from_db(120.0, 10.0);
        let cfg = ScaConfig::default();
        let orth = baseline_orthogonal(&ch, &powers, &cfg).unwrap();
        let two = baseline_two_step(&ch, &powers, &cfg).unwrap();
        assert!((orth.mmf_rate - 0.5 * two.mmf_rate).abs() < 1e-9);
    }
}
