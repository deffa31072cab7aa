//! Expected SINR terms under satellite phase uncertainty.
//!
//! With a lifted precoder `S = x x^H` the received power of a column is
//! `g^H S g = tr(g g^H S)`, and its expectation over the phase errors is
//! `tr(R S)` with `R = E[g g^H]`. For an SU, `R` is `F_bar` on the satellite
//! rows. For a CU with `g = [z; h]` it is
//!
//! ```text
//! [ Z_bar                    exp(-d/2) z_hat h^H ]
//! [ exp(-d/2) h z_hat^H      h h^H               ]
//! ```
//!
//! since `E[z] = exp(-d/2) z_hat` and the BS channel is known exactly.
//! Rates use `log2(1 + E[signal] / E[interference + noise])`.

use crate::channel_models::{channel_correlation, ChannelSet};
use crate::conic::{AffineExpr, HermitianVar};
use crate::linalg::{trace_product_re, CMatrix};
use crate::rate_model::{DecodeLayout, Evaluation};
use crate::C64;

/// `E[g g^H]` on the global antenna axis for every receiver, in the order of
/// [`DecodeLayout::receivers`].
pub fn receiver_correlations(ch: &ChannelSet, delta_sq: f64) -> Vec<CMatrix> {
    let (n_s, n_t) = (ch.n_s(), ch.n_t());
    let n = n_s + n_t;
    let mut out = Vec::with_capacity(ch.k_s() + ch.k_t());
    for k in 0..ch.k_s() {
        let mut r = CMatrix::zeros(n, n);
        r.view_mut((0, 0), (n_s, n_s))
            .copy_from(&channel_correlation(&ch.f.column(k).into_owned(), delta_sq));
        out.push(r);
    }
    let mean = C64::from((-delta_sq / 2.0).exp());
    for k in 0..ch.k_t() {
        let z = ch.z.column(k).into_owned();
        let h = ch.h.column(k).into_owned();
        let cross = &z * h.adjoint() * mean;
        let mut r = CMatrix::zeros(n, n);
        r.view_mut((0, 0), (n_s, n_s)).copy_from(&channel_correlation(&z, delta_sq));
        r.view_mut((0, n_s), (n_s, n_t)).copy_from(&cross);
        r.view_mut((n_s, 0), (n_t, n_s)).copy_from(&cross.adjoint());
        r.view_mut((n_s, n_s), (n_t, n_t)).copy_from(&(&h * h.adjoint()));
        out.push(r);
    }
    out
}

fn block(r: &CMatrix, rows: &std::ops::Range<usize>) -> CMatrix {
    r.view((rows.start, rows.start), (rows.len(), rows.len())).into_owned()
}

/// Expected `(signal, interference + noise)` of every decode event for lifted
/// columns `lifted` (`None` for inactive columns).
pub fn expected_event_terms(
    layout: &DecodeLayout,
    corr: &[CMatrix],
    lifted: &[Option<CMatrix>],
    noise_var: f64,
) -> Vec<(f64, f64)> {
    let power = |rx: usize, c: usize| -> f64 {
        match &lifted[c] {
            Some(s) => trace_product_re(&block(&corr[rx], &layout.columns[c].rows), s),
            None => 0.0,
        }
    };
    layout
        .events
        .iter()
        .map(|e| {
            let signal = power(e.receiver, e.signal);
            let rest: f64 = e.interference.iter().map(|&i| power(e.receiver, i)).sum();
            (signal.max(0.0), rest.max(0.0) + noise_var)
        })
        .collect()
}

/// Expected-rate evaluation with water-filled portions.
pub fn expected_evaluation(
    layout: &DecodeLayout,
    corr: &[CMatrix],
    lifted: &[Option<CMatrix>],
    noise_var: f64,
) -> Evaluation {
    let terms = expected_event_terms(layout, corr, lifted, noise_var);
    let sinr: Vec<f64> = terms.iter().map(|(s, d)| s / d).collect();
    let rates = sinr.iter().map(|&g| crate::linalg::log2_1p(g)).collect();
    layout.totals_from_rates(sinr, rates)
}

/// Lift global precoders into per-column outer products.
pub fn lift(layout: &DecodeLayout, x: &CMatrix) -> Vec<Option<CMatrix>> {
    layout
        .columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            col.active.then(|| {
                let v = x.view((col.rows.start, c), (col.rows.len(), 1)).into_owned();
                &v * v.adjoint()
            })
        })
        .collect()
}

/// `(signal, interference)` trace expressions of one event, without noise.
pub fn event_trace_exprs(
    layout: &DecodeLayout,
    corr: &[CMatrix],
    vars: &[Option<HermitianVar>],
    event: usize,
) -> (AffineExpr, AffineExpr) {
    let e = &layout.events[event];
    let term = |c: usize| -> AffineExpr {
        match &vars[c] {
            Some(v) => v.trace_product(&block(&corr[e.receiver], &layout.columns[c].rows)),
            None => AffineExpr::zero(),
        }
    };
    let signal = term(e.signal);
    let interference = e
        .interference
        .iter()
        .fold(AffineExpr::zero(), |acc, &i| acc + term(i));
    (signal, interference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{perturb, sample_channel_set, ChannelConfig};
    use crate::linalg::{gain, trace_re, CVector};
    use crate::rate_model::{Access, Scheme, TransmitStrategy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        &a * a.adjoint()
    }

    #[test]
    fn zero_uncertainty_reduces_to_rank_one_gain() {
        let ch = sample_channel_set(&ChannelConfig::reference(), 1).unwrap();
        let corr = receiver_correlations(&ch, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = CVector::from_fn(ch.n_s() + ch.n_t(), |_, _| C64::new(rng.random_range(-1.0..1.0), 0.3));
        let layout = DecodeLayout::new(&ch, Scheme::Cooperative, TransmitStrategy::uniform(Access::Rsma)).unwrap();
        for (rx, r) in corr.iter().enumerate() {
            let g = &layout.receivers[rx].1;
            let s = &x * x.adjoint();
            assert!((trace_product_re(r, &s) - gain(g, &x)).abs() < 1e-9 * gain(g, &x).max(1.0));
        }
    }

    #[test]
    fn identity_lift_gives_channel_energy() {
        let ch = sample_channel_set(&ChannelConfig::reference(), 2).unwrap();
        let corr = receiver_correlations(&ch, 0.4);
        for (k, ck) in corr.iter().enumerate().take(ch.k_s()) {
            let fbar = block(ck, &(0..ch.n_s()));
            assert!((trace_re(&fbar) - ch.f.column(k).norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_matches_phase_draws() {
        let ch = sample_channel_set(&ChannelConfig::reference(), 3).unwrap();
        let d = 0.5;
        let corr = receiver_correlations(&ch, d);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = ch.n_s() + ch.n_t();
        let s = random_psd(n, &mut rng);
        let draws = 100_000;
        let mut acc_su = 0.0;
        let mut acc_cu = 0.0;
        for _ in 0..draws {
            let f = perturb(&ch.f_amp, &ch.f_phase, d, &mut rng);
            let z = perturb(&ch.z_amp, &ch.z_phase, d, &mut rng);
            let mut g = CVector::zeros(n);
            g.rows_mut(0, ch.n_s()).copy_from(&f.column(0));
            acc_su += (g.adjoint() * &s * &g)[(0, 0)].re;
            g.rows_mut(0, ch.n_s()).copy_from(&z.column(0));
            g.rows_mut(ch.n_s(), ch.n_t()).copy_from(&ch.h.column(0));
            acc_cu += (g.adjoint() * &s * &g)[(0, 0)].re;
        }
        let su = trace_product_re(&corr[0], &s);
        let cu = trace_product_re(&corr[ch.k_s()], &s);
        assert!((acc_su / draws as f64 - su).abs() < 0.01 * su, "SU {} vs {su}", acc_su / draws as f64);
        assert!((acc_cu / draws as f64 - cu).abs() < 0.01 * cu, "CU {} vs {cu}", acc_cu / draws as f64);
    }
}
