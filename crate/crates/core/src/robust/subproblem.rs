//! Penalized SDP around the current lifted iterate.
//!
//! For every decode event with expected signal `A(S)` and expected
//! interference-plus-noise `B(S)`, both linear in the lifted columns:
//!
//! ```text
//! t <= A(S) + B(S)
//! eta <= ln t0 + 1 - t0 / t                  (cone, tangent lower bound of ln t)
//! B(S) <= exp(xi0) (xi - xi0 + 1)            (tangent lower bound of exp xi)
//! alpha ln 2 <= eta - xi
//! ```
//!
//! so `alpha <= log2(A + B) - log2(B)` holds at any feasible point, with
//! equality at the expansion point `t0 = A0 + B0`, `xi0 = ln B0`. The
//! objective is `q - beta * sum_c w_c (tr S_c - v_c^H S_c v_c)` with `v_c` the
//! principal eigenvector of the previous `S_c`.

use super::expected::event_trace_exprs;
use crate::conic::{AffineExpr, ConicProblem, ConicSolution, HermitianVar, ScalarVar};
use crate::linalg::{CMatrix, CVector};
use crate::rate_model::{DecodeLayout, RateLink};
use crate::sca::PowerBudget;

#[derive(Debug, Clone)]
pub struct RobustSubproblem {
    pub problem: ConicProblem,
    pub q: ScalarVar,
    pub lifted: Vec<Option<HermitianVar>>,
    pub rates: Vec<ScalarVar>,
    pub portions: Vec<Option<ScalarVar>>,
    /// Penalty part of the objective, `sum_c w_c (tr S_c - v_c^H S_c v_c)`.
    pub penalty: AffineExpr,
}

/// Expansion data of one event: `t0 = A0 + B0` and `B0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventPoint {
    pub total: f64,
    pub interference: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn build_robust_subproblem(
    layout: &DecodeLayout,
    corr: &[CMatrix],
    points: &[EventPoint],
    directions: &[Option<CVector>],
    weights: &[f64],
    beta: f64,
    powers: &PowerBudget,
    noise_var: f64,
) -> RobustSubproblem {
    let mut p = ConicProblem::new();
    let q = p.scalar("q");
    let lifted: Vec<Option<HermitianVar>> = layout
        .columns
        .iter()
        .enumerate()
        .map(|(c, col)| col.active.then(|| p.hermitian(&format!("S{c}"), col.rows.len(), true)))
        .collect();
    let portions: Vec<Option<ScalarVar>> = layout
        .portion_active
        .iter()
        .enumerate()
        .map(|(m, &on)| on.then(|| p.scalar(&format!("c{m}"))))
        .collect();
    let mut rates = Vec::with_capacity(layout.events.len());
    let ln2 = std::f64::consts::LN_2;

    for (e, pt) in points.iter().enumerate() {
        let t = p.scalar(&format!("t{e}"));
        let eta = p.scalar(&format!("eta{e}"));
        let xi = p.scalar(&format!("xi{e}"));
        let alpha = p.scalar(&format!("alpha{e}"));
        let (signal, interference) = event_trace_exprs(layout, corr, &lifted, e);
        let b = interference + noise_var;
        p.ge(signal + b.clone(), t.expr());
        let c = pt.total.ln() + 1.0;
        p.hyperbolic(t.expr(), AffineExpr::constant(c) - eta.expr(), AffineExpr::constant(pt.total.sqrt()));
        let xi0 = pt.interference.ln();
        let tangent = (xi.expr() - xi0 + 1.0) * pt.interference;
        p.ge(tangent, b);
        p.ge(eta.expr() - xi.expr(), alpha.expr() * ln2);
        rates.push(alpha);
    }

    for c in portions.iter().flatten() {
        p.ge0(c.expr());
    }
    for (e, ev) in layout.events.iter().enumerate() {
        match ev.link {
            RateLink::Common(pool) => {
                let total = layout
                    .pool_members(pool)
                    .into_iter()
                    .filter_map(|m| portions[m])
                    .fold(AffineExpr::zero(), |acc, c| acc + c.expr());
                p.ge(rates[e].expr(), total);
            }
            RateLink::Private { portion, .. } => {
                let mut have = rates[e].expr();
                if let Some(c) = portion.and_then(|m| portions[m]) {
                    have += c.expr();
                }
                p.ge(have, q.expr());
            }
        }
    }

    let n_s = layout.n_s;
    let rows = n_s + layout.n_t;
    let diag = |r: usize| -> AffineExpr {
        let mut acc = AffineExpr::zero();
        for (c, col) in layout.columns.iter().enumerate() {
            if let Some(s) = &lifted[c] {
                if col.rows.contains(&r) {
                    acc.add_term(s.diag(r - col.rows.start), 1.0);
                }
            }
        }
        acc
    };
    let per_feed = powers.per_feed(n_s);
    for r in 0..n_s {
        let d = diag(r);
        if !d.terms.is_empty() {
            p.ge(AffineExpr::constant(per_feed), d);
        }
    }
    let bs = (n_s..rows).fold(AffineExpr::zero(), |acc, r| acc + diag(r));
    if !bs.terms.is_empty() {
        p.ge(AffineExpr::constant(powers.p_t), bs);
    }

    let mut penalty = AffineExpr::zero();
    for (c, s) in lifted.iter().enumerate() {
        let (Some(s), Some(v)) = (s, &directions[c]) else { continue };
        let proj = CMatrix::identity(v.len(), v.len()) - v * v.adjoint();
        penalty += s.trace_product(&proj) * weights[c];
    }
    p.maximize(q.expr() - penalty.clone() * beta);
    RobustSubproblem {
        problem: p,
        q,
        lifted,
        rates,
        portions,
        penalty,
    }
}

impl RobustSubproblem {
    pub fn lifted_values(&self, sol: &ConicSolution) -> Vec<Option<CMatrix>> {
        self.lifted.iter().map(|v| v.as_ref().map(|v| sol.matrix(v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{sample_channel_set, ChannelConfig};
    use crate::conic::{solve, Tolerances};
    use crate::rate_model::{Access, Scheme, TransmitStrategy};
    use crate::robust::expected::{expected_event_terms, lift, receiver_correlations};
    use crate::robust::penalty::{penalty_weights, principal_directions};
    use crate::sca::{initial_point, InitStrategy};

    #[test]
    fn exp_tangent_never_exceeds_exp() {
        for &x0 in &[-3.0, -0.5, 0.0, 1.2, 4.0] {
            for i in 0..=400 {
                let x = -6.0 + i as f64 * 0.03;
                let tangent = f64::exp(x0) * (x - x0 + 1.0);
                assert!(tangent <= x.exp() + 1e-12);
            }
            assert_eq!(f64::exp(x0) * (x0 - x0 + 1.0), x0.exp());
        }
    }

    #[test]
    fn log_tangent_bound_is_below_log() {
        for &t0 in &[0.1, 1.0, 10.0, 1e3] {
            for i in 1..=1000 {
                let t = i as f64 * 0.01 * t0;
                let bound = t0.ln() + 1.0 - t0 / t;
                assert!(bound <= t.ln() + 1e-12);
            }
        }
    }

    fn setup(beta: f64) -> (f64, f64, f64) {
        let ch = sample_channel_set(&ChannelConfig::reference(), 7).unwrap();
        let small = crate::sca::TerrestrialBasis::of(&ch).compress_channels(&ch);
        let layout = DecodeLayout::new(&small, Scheme::Coordinated, TransmitStrategy::uniform(Access::Rsma)).unwrap();
        let powers = PowerBudget::from_db(120.0, 20.0);
        let x = initial_point(&layout, &small, &powers, InitStrategy::MatchedFilter);
        let corr = receiver_correlations(&small, 0.3);
        let lifted = lift(&layout, &x);
        let points: Vec<EventPoint> = expected_event_terms(&layout, &corr, &lifted, 1.0)
            .into_iter()
            .map(|(a, b)| EventPoint {
                total: a + b,
                interference: b,
            })
            .collect();
        let dirs = principal_directions(&lifted);
        let w = penalty_weights(&layout, &powers);
        let sub = build_robust_subproblem(&layout, &corr, &points, &dirs, &w, beta, &powers, 1.0);
        let sol = solve(&sub.problem, &Tolerances::default()).unwrap();
        assert!(sol.is_optimal(), "{:?}", sol.status);
        (sol.scalar(sub.q), sol.objective, sol.eval(&sub.penalty))
    }

    #[test]
    fn penalty_free_relaxation_dominates() {
        let (q0, obj0, _) = setup(0.0);
        let (q1, obj1, pen) = setup(10.0);
        assert!((q0 - obj0).abs() < 1e-6);
        assert!(q0 >= q1 - 1e-6);
        assert!(obj0 >= obj1 - 1e-6);
        assert!(pen >= -1e-7);
    }
}
