//! Starting points for the SCA iterations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::PowerBudget;
use crate::channel_models::ChannelSet;
use crate::linalg::{CMatrix, CVector};
use crate::rate_model::{ColumnRole, DecodeLayout};
use crate::C64;

/// Share of each transmitter's budget given to its common stream.
pub const COMMON_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitStrategy {
    /// Matched filters towards each user (beam centroid for multicast groups)
    /// and a common column along the sum of the served channels.
    #[default]
    MatchedFilter,
    /// Gaussian directions drawn from the seed.
    Random { seed: u64 },
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v / C64::from(n)
    } else if v.is_empty() {
        v
    } else {
        let len = v.len();
        CVector::from_element(len, C64::from(1.0 / (len as f64).sqrt()))
    }
}

fn column_sum(m: &CMatrix, cols: impl IntoIterator<Item = usize>) -> CVector {
    let mut acc = CVector::zeros(m.nrows());
    for c in cols {
        acc += m.column(c);
    }
    acc
}

/// Scale satellite rows so every feed meets `P_s / N_s` with equality and
/// the BS rows so their total equals `P_t`. Rows that carry nothing stay zero.
pub fn scale_to_budget(x: &mut CMatrix, n_s: usize, powers: &PowerBudget) {
    let per_feed = powers.per_feed(n_s);
    for r in 0..n_s {
        let pw = x.row(r).norm_squared();
        if pw > 0.0 {
            let s = (per_feed / pw).sqrt();
            x.row_mut(r).scale_mut(s);
        }
    }
    let bs: f64 = (n_s..x.nrows()).map(|r| x.row(r).norm_squared()).sum();
    if bs > 0.0 {
        let s = (powers.p_t / bs).sqrt();
        for r in n_s..x.nrows() {
            x.row_mut(r).scale_mut(s);
        }
    }
}

/// Shrink rows that exceed their budget; rows within budget are untouched.
pub fn project_to_budget(x: &mut CMatrix, n_s: usize, powers: &PowerBudget) {
    let per_feed = powers.per_feed(n_s);
    for r in 0..n_s {
        let pw = x.row(r).norm_squared();
        if pw > per_feed {
            x.row_mut(r).scale_mut((per_feed / pw).sqrt());
        }
    }
    let bs: f64 = (n_s..x.nrows()).map(|r| x.row(r).norm_squared()).sum();
    if bs > powers.p_t {
        let s = (powers.p_t / bs).sqrt();
        for r in n_s..x.nrows() {
            x.row_mut(r).scale_mut(s);
        }
    }
}

/// Global precoders for `layout`, satisfying the budgets with equality.
pub fn initial_point(layout: &DecodeLayout, ch: &ChannelSet, powers: &PowerBudget, strategy: InitStrategy) -> CMatrix {
    let (n_s, n_t) = (layout.n_s, layout.n_t);
    let n = n_s + n_t;
    let mut x = CMatrix::zeros(n, layout.columns.len());
    let sat_common = layout
        .columns
        .iter()
        .any(|c| c.active && matches!(c.role, ColumnRole::SatCommon | ColumnRole::Common));
    let bs_common = layout
        .columns
        .iter()
        .any(|c| c.active && matches!(c.role, ColumnRole::BsCommon | ColumnRole::Common));
    let sat_private = if sat_common { 1.0 - COMMON_SHARE } else { 1.0 } * powers.p_s / n_s.max(1) as f64;
    let bs_private = if bs_common { 1.0 - COMMON_SHARE } else { 1.0 } * powers.p_t / ch.k_t().max(1) as f64;
    let sat_dir = |role: ColumnRole| -> CVector {
        match role {
            ColumnRole::SatCommon | ColumnRole::Common => unit(column_sum(&ch.f, 0..ch.k_s())),
            ColumnRole::SatPrivate(b) | ColumnRole::CoopSat(b) => unit(column_sum(&ch.f, ch.beam_members(b))),
            _ => CVector::zeros(n_s),
        }
    };
    let bs_dir = |role: ColumnRole| -> CVector {
        match role {
            ColumnRole::BsCommon | ColumnRole::Common => unit(column_sum(&ch.h, 0..ch.k_t())),
            ColumnRole::BsPrivate(k) | ColumnRole::CoopBs(k) => unit(ch.h.column(k).into_owned()),
            _ => CVector::zeros(n_t),
        }
    };
    let mut rng = match strategy {
        InitStrategy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        InitStrategy::MatchedFilter => None,
    };
    for (c, col) in layout.columns.iter().enumerate() {
        if !col.active {
            continue;
        }
        let (sat_amp, bs_amp) = match col.role {
            ColumnRole::SatCommon => ((COMMON_SHARE * powers.p_s).sqrt(), 0.0),
            ColumnRole::BsCommon => (0.0, (COMMON_SHARE * powers.p_t).sqrt()),
            ColumnRole::Common => ((COMMON_SHARE * powers.p_s).sqrt(), (COMMON_SHARE * powers.p_t).sqrt()),
            ColumnRole::SatPrivate(_) | ColumnRole::CoopSat(_) => (sat_private.sqrt(), 0.0),
            ColumnRole::BsPrivate(_) | ColumnRole::CoopBs(_) => (0.0, bs_private.sqrt()),
        };
        let (ds, db) = match rng.as_mut() {
            None => (sat_dir(col.role), bs_dir(col.role)),
            Some(rng) => {
                let mut draw = |len: usize| {
                    unit(CVector::from_fn(len, |_, _| {
                        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
                    }))
                };
                (draw(n_s), draw(n_t))
            }
        };
        if sat_amp > 0.0 && n_s > 0 {
            x.view_mut((0, c), (n_s, 1)).copy_from(&(ds * C64::from(sat_amp)));
        }
        if bs_amp > 0.0 && n_t > 0 {
            x.view_mut((n_s, c), (n_t, 1)).copy_from(&(db * C64::from(bs_amp)));
        }
    }
    layout.mask(&mut x);
    scale_to_budget(&mut x, n_s, powers);
    x
}
