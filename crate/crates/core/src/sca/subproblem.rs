//! Convex restriction of the max-min problem around an expansion point.
//!
//! Each decode event `e` (receiver `g` decodes column `s` under the
//! interference columns `I`) gets a rate variable `alpha_e` in bits and an
//! SINR surrogate `a_e >= 0` tied together by
//!
//! ```text
//! sum_{i in I} |g^H x_i|^2 + sigma^2 <= 2 Re(x0^H g g^H x_s) / a0 - |g^H x0|^2 / a0^2 * a_e
//! alpha_e ln 2 <= v(a0) - u(a0) / a_e                       (second-order cone)
//! ```
//!
//! The right side of the first line under-estimates `|g^H x_s|^2 / a_e`, so
//! `a_e` never exceeds the true SINR, and the second line under-estimates
//! `ln(1 + a_e)`. Events whose signal is zero at the expansion point are
//! pinned to `a_e = 0`. Rates enter the max-min epigraph through
//!
//! ```text
//! sum_{m in pool} c_m <= alpha_e      (common events)
//! q <= c_user + alpha_e               (private events; c_user = 0 without a portion)
//! ```
//!
//! with `c >= 0`, one rotated cone `sum_c |x_c[r]|^2 <= P_s / N_s` per
//! satellite feed and one for the BS total. With `E` events and `P` active
//! portions the problem has `4E + P + N_s + 1` constraints when every feed
//! and the BS carry at least one column.

use super::surrogates::{soc_log_constraint, taylor_qol_lower_bound};
use super::PowerBudget;
use crate::conic::{AffineExpr, ComplexVecVar, ConicProblem, ConicSolution, ScalarVar};
use crate::linalg::{gain, CMatrix, CVector};
use crate::rate_model::{DecodeLayout, RateLink};

/// SINR values below this are treated as a zero signal.
pub const AUX_FLOOR: f64 = 1e-12;

/// A built subproblem together with handles to read its solution back.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub problem: ConicProblem,
    pub q: ScalarVar,
    pub columns: Vec<Option<ComplexVecVar>>,
    pub rates: Vec<ScalarVar>,
    pub aux: Vec<ScalarVar>,
    pub portions: Vec<Option<ScalarVar>>,
    rows: usize,
    row_ranges: Vec<std::ops::Range<usize>>,
}

fn restrict(g: &CVector, rows: &std::ops::Range<usize>) -> CVector {
    g.rows(rows.start, rows.len()).into_owned()
}

/// Build the convex subproblem around precoders `x0` (global layout) with
/// SINR expansion points `aux0` (one per event).
pub fn build_subproblem(
    layout: &DecodeLayout,
    x0: &CMatrix,
    aux0: &[f64],
    powers: &PowerBudget,
    noise_var: f64,
) -> Subproblem {
    assert_eq!(aux0.len(), layout.events.len(), "one expansion point per event");
    let mut p = ConicProblem::new();
    let q = p.scalar("q");
    let columns: Vec<Option<ComplexVecVar>> = layout
        .columns
        .iter()
        .enumerate()
        .map(|(c, col)| col.active.then(|| p.complex_vector(&format!("x{c}"), col.rows.len())))
        .collect();
    let rates: Vec<ScalarVar> = (0..layout.events.len()).map(|e| p.scalar(&format!("alpha{e}"))).collect();
    let aux: Vec<ScalarVar> = (0..layout.events.len()).map(|e| p.scalar(&format!("a{e}"))).collect();
    let portions: Vec<Option<ScalarVar>> = layout
        .portion_active
        .iter()
        .enumerate()
        .map(|(m, &on)| on.then(|| p.scalar(&format!("c{m}"))))
        .collect();

    let received = |rx: usize, c: usize| -> Option<(AffineExpr, AffineExpr)> {
        let var = columns[c].as_ref()?;
        let g = restrict(&layout.receivers[rx].1, &layout.columns[c].rows);
        Some(var.inner(&g))
    };

    for (e, ev) in layout.events.iter().enumerate() {
        let a0 = aux0[e];
        let rows = &layout.columns[ev.signal].rows;
        let g = restrict(&layout.receivers[ev.receiver].1, rows);
        let p0: CVector = x0.view((rows.start, ev.signal), (rows.len(), 1)).column(0).into_owned();
        let signal = columns[ev.signal].as_ref();
        match signal {
            Some(var) if a0 > AUX_FLOOR && gain(&g, &p0) > 0.0 => {
                let bound = taylor_qol_lower_bound(&g, &p0, a0).expect("positive expansion point");
                let mut items = Vec::with_capacity(2 * ev.interference.len());
                for &i in &ev.interference {
                    if let Some((re, im)) = received(ev.receiver, i) {
                        items.push(re);
                        items.push(im);
                    }
                }
                p.squared_norm_le(items, bound.expr(var, aux[e]) - noise_var);
            }
            _ => p.eq0(aux[e].expr()),
        }
        soc_log_constraint(a0.max(0.0)).add_to(&mut p, &aux[e].expr(), &rates[e].expr());
        p.ge0(aux[e].expr());
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
    let entries = |r: usize| -> Vec<AffineExpr> {
        let mut out = Vec::new();
        for (c, col) in layout.columns.iter().enumerate() {
            if let Some(var) = &columns[c] {
                if col.rows.contains(&r) {
                    let i = r - col.rows.start;
                    out.push(AffineExpr::var(var.re(i)));
                    out.push(AffineExpr::var(var.im(i)));
                }
            }
        }
        out
    };
    let per_feed = powers.per_feed(n_s);
    for r in 0..n_s {
        let items = entries(r);
        if !items.is_empty() {
            p.squared_norm_le(items, AffineExpr::constant(per_feed));
        }
    }
    let bs_items: Vec<AffineExpr> = (n_s..rows).flat_map(entries).collect();
    if !bs_items.is_empty() {
        p.squared_norm_le(bs_items, AffineExpr::constant(powers.p_t));
    }

    p.maximize(q.expr());
    Subproblem {
        problem: p,
        q,
        columns,
        rates,
        aux,
        portions,
        rows,
        row_ranges: layout.columns.iter().map(|c| c.rows.clone()).collect(),
    }
}

impl Subproblem {
    /// Global precoders read from a solution (inactive columns are zero).
    pub fn precoders(&self, sol: &ConicSolution) -> CMatrix {
        let mut x = CMatrix::zeros(self.rows, self.columns.len());
        for (c, var) in self.columns.iter().enumerate() {
            if let Some(var) = var {
                let range = &self.row_ranges[c];
                x.view_mut((range.start, c), (range.len(), 1)).copy_from(&sol.vector(var));
            }
        }
        x
    }

    /// Variable assignment corresponding to the expansion point itself.
    pub fn point(&self, layout: &DecodeLayout, x0: &CMatrix, aux0: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.problem.n_scalars()];
        for (c, var) in self.columns.iter().enumerate() {
            if let Some(var) = var {
                let range = &self.row_ranges[c];
                for (i, r) in range.clone().enumerate() {
                    v[var.re(i)] = x0[(r, c)].re;
                    v[var.im(i)] = x0[(r, c)].im;
                }
            }
        }
        let rates: Vec<f64> = aux0.iter().map(|&a| crate::linalg::log2_1p(a)).collect();
        let eval = layout.totals_from_rates(aux0.to_vec(), rates.clone());
        for e in 0..layout.events.len() {
            v[self.rates[e].0] = rates[e];
            v[self.aux[e].0] = aux0[e];
        }
        for (m, c) in self.portions.iter().enumerate() {
            if let Some(c) = c {
                v[c.0] = eval.portions[m];
            }
        }
        v[self.q.0] = eval.mmf;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{sample_channel_set, ChannelConfig, ChannelSet};
    use crate::conic::{solve, Tolerances};
    use crate::rate_model::{Access, Scheme, TransmitStrategy};
    use crate::sca::init::{initial_point, InitStrategy};
    use crate::C64;
    use rand::{Rng, SeedableRng};

    fn tiny() -> ChannelSet {
        ChannelSet::from_matrices(
            CMatrix::from_element(1, 1, C64::new(0.9, 0.1)),
            CMatrix::from_element(1, 1, C64::new(0.2, -0.1)),
            CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.5), C64::new(-0.3, 0.8)]),
            vec![0],
        )
        .unwrap()
    }

    #[test]
    fn tiny_instance_constraint_count() {
        let ch = tiny();
        let layout = DecodeLayout::new(&ch, Scheme::Coordinated, TransmitStrategy::uniform(Access::Rsma)).unwrap();
        let powers = PowerBudget::new(10.0, 10.0);
        let x0 = initial_point(&layout, &ch, &powers, InitStrategy::MatchedFilter);
        let aux0 = layout.evaluate(&x0, 1.0).event_sinr;
        let sub = build_subproblem(&layout, &x0, &aux0, &powers, 1.0);
        let events = layout.events.len();
        assert_eq!(events, 4);
        assert_eq!(sub.problem.constraints.len(), 4 * events + 2 + 1 + 1);
    }

    #[test]
    fn zero_satellite_budget_gives_zero_objective() {
        let ch = tiny();
        let layout = DecodeLayout::new(&ch, Scheme::Coordinated, TransmitStrategy::uniform(Access::Rsma)).unwrap();
        let powers = PowerBudget::new(0.0, 10.0);
        let x0 = initial_point(&layout, &ch, &powers, InitStrategy::MatchedFilter);
        let aux0 = layout.evaluate(&x0, 1.0).event_sinr;
        let sub = build_subproblem(&layout, &x0, &aux0, &powers, 1.0);
        let sol = solve(&sub.problem, &Tolerances::default()).unwrap();
        assert!(sol.is_optimal());
        assert!(sol.scalar(sub.q).abs() < 1e-6);
        let su_events: Vec<usize> = (0..layout.events.len())
            .filter(|&e| layout.events[e].receiver == 0)
            .collect();
        for e in su_events {
            assert!(sol.scalar(sub.rates[e]) < 1e-6);
        }
    }

    #[test]
    fn expansion_point_is_feasible_for_random_iterates() {
        let ch = sample_channel_set(&ChannelConfig::reference(), 11).unwrap();
        let powers = PowerBudget::new(120.0, 100.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for scheme in [Scheme::Coordinated, Scheme::Cooperative] {
            for access in [Access::Rsma, Access::Sdma] {
                let layout = DecodeLayout::new(&ch, scheme, TransmitStrategy::uniform(access)).unwrap();
                for trial in 0..5 {
                    let mut x0 = initial_point(&layout, &ch, &powers, InitStrategy::Random { seed: trial });
                    let damp: f64 = rng.random_range(0.2..1.0);
                    x0.scale_mut(damp);
                    let aux0 = layout.evaluate(&x0, 1.0).event_sinr;
                    let sub = build_subproblem(&layout, &x0, &aux0, &powers, 1.0);
                    let v = sub.point(&layout, &x0, &aux0);
                    let viol = sub.problem.max_violation(&v);
                    assert!(viol < 1e-9, "{scheme} {access} trial {trial}: violation {viol}");
                }
            }
        }
    }
}
