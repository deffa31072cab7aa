//! Rank-one penalty bookkeeping and eigenvector recovery.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{principal_eigenpair, trace_re, CMatrix, CVector};
use crate::rate_model::DecodeLayout;
use crate::sca::PowerBudget;
use crate::{Error, Result, C64};

/// Traces below this count as an empty column.
pub const TRACE_FLOOR: f64 = 1e-12;

/// `1 - lambda_max(X) / tr(X)`, zero exactly for rank-one `X`.
pub fn rank_one_residual(x: &CMatrix) -> Result<f64> {
    let tr = trace_re(x);
    if !(tr > 0.0) {
        return Err(Error::InvalidArgument(format!("rank-one residual needs a positive trace, got {tr}")));
    }
    let (lambda, _) = principal_eigenpair(x);
    Ok((1.0 - lambda / tr).clamp(0.0, 1.0))
}

/// Residual of every lifted column, with empty columns counted as rank one.
pub fn residuals(lifted: &[Option<CMatrix>]) -> Vec<f64> {
    lifted
        .iter()
        .flatten()
        .map(|s| rank_one_residual(s).unwrap_or(0.0))
        .collect()
}

/// Principal unit eigenvector of every lifted column.
pub fn principal_directions(lifted: &[Option<CMatrix>]) -> Vec<Option<CVector>> {
    lifted
        .iter()
        .map(|s| s.as_ref().map(|s| principal_eigenpair(s).1))
        .collect()
}

/// `tr(X) - v^H X v` for every column, summed with `weights`.
pub fn penalty_value(lifted: &[Option<CMatrix>], dirs: &[Option<CVector>], weights: &[f64]) -> f64 {
    lifted
        .iter()
        .zip(dirs)
        .zip(weights)
        .map(|((s, v), w)| match (s, v) {
            (Some(s), Some(v)) => w * (trace_re(s) - (v.adjoint() * s * v)[(0, 0)].re),
            _ => 0.0,
        })
        .sum()
}

/// Per-column penalty weights: the inverse of the budget the column draws from.
pub fn penalty_weights(layout: &DecodeLayout, powers: &PowerBudget) -> Vec<f64> {
    layout
        .columns
        .iter()
        .map(|col| {
            let mut budget = 0.0;
            if col.rows.start < layout.n_s {
                budget += powers.p_s;
            }
            if col.rows.end > layout.n_s {
                budget += powers.p_t;
            }
            if budget > 0.0 {
                1.0 / budget
            } else {
                1.0
            }
        })
        .collect()
}

/// Global precoders `x_c = sqrt(tr S_c) v_max(S_c)`, globally scaled down if
/// that overshoots a power budget by more than `1e-6` relative.
pub fn recover(layout: &DecodeLayout, lifted: &[Option<CMatrix>], powers: &PowerBudget) -> CMatrix {
    let n = layout.n_s + layout.n_t;
    let mut x = CMatrix::zeros(n, layout.columns.len());
    for (c, s) in lifted.iter().enumerate() {
        let Some(s) = s else { continue };
        let tr = trace_re(s);
        if tr <= TRACE_FLOOR {
            continue;
        }
        let (_, v) = principal_eigenpair(s);
        let rows = &layout.columns[c].rows;
        x.view_mut((rows.start, c), (rows.len(), 1)).copy_from(&(v * C64::from(tr.sqrt())));
    }
    global_downscale(&mut x, layout.n_s, powers);
    x
}

/// Scale all columns by one factor so every budget holds.
pub fn global_downscale(x: &mut CMatrix, n_s: usize, powers: &PowerBudget) {
    let mut ratio: f64 = 1.0;
    let per_feed = powers.per_feed(n_s);
    for r in 0..n_s {
        let pw = x.row(r).norm_squared();
        if pw > per_feed * (1.0 + 1e-6) {
            ratio = ratio.min(per_feed / pw);
        }
    }
    let bs: f64 = (n_s..x.nrows()).map(|r| x.row(r).norm_squared()).sum();
    if bs > powers.p_t * (1.0 + 1e-6) {
        ratio = ratio.min(powers.p_t / bs);
    }
    if ratio < 1.0 {
        x.scale_mut(ratio.sqrt());
    }
}

/// One Gaussian draw `x_c ~ CN(0, S_c)` per column, rescaled to `tr S_c`.
pub fn gaussian_draw<R: Rng + ?Sized>(
    layout: &DecodeLayout,
    lifted: &[Option<CMatrix>],
    powers: &PowerBudget,
    rng: &mut R,
) -> CMatrix {
    let n = layout.n_s + layout.n_t;
    let mut x = CMatrix::zeros(n, layout.columns.len());
    for (c, s) in lifted.iter().enumerate() {
        let Some(s) = s else { continue };
        let tr = trace_re(s);
        if tr <= TRACE_FLOOR {
            continue;
        }
        let eig = crate::linalg::hermitian_part(s).symmetric_eigen();
        let m = s.nrows();
        let mut v = CVector::zeros(m);
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let coef = C64::new(re, im) * (lambda / 2.0).sqrt();
                v += eig.eigenvectors.column(i) * coef;
            }
        }
        let norm = v.norm();
        if norm > 0.0 {
            v *= C64::from(tr.sqrt() / norm);
        }
        let rows = &layout.columns[c].rows;
        x.view_mut((rows.start, c), (rows.len(), 1)).copy_from(&v);
    }
    global_downscale(&mut x, layout.n_s, powers);
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, rank, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        &a * a.adjoint()
    }

    #[test]
    fn residual_edge_cases() {
        let v = CVector::from_vec(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)]);
        assert!(rank_one_residual(&outer(&v)).unwrap() < 1e-12);
        assert!((rank_one_residual(&CMatrix::identity(2, 2)).unwrap() - 0.5).abs() < 1e-15);
        assert!(rank_one_residual(&CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn residual_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = random_psd(4, 3, &mut rng);
            let eig = crate::linalg::hermitian_part(&x).symmetric_eigen();
            let lmax = eig.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
            let tr: f64 = eig.eigenvalues.iter().sum();
            assert!((rank_one_residual(&x).unwrap() - (1.0 - lmax / tr)).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_one_iterate_has_zero_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_psd(3, 1, &mut rng);
        let lifted = vec![Some(s)];
        let dirs = principal_directions(&lifted);
        assert!(penalty_value(&lifted, &dirs, &[1.0]).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn penalty_is_bounded_below_by_spectral_gap(seed in 0u64..500, re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_psd(3, 3, &mut rng);
            let mut v = CVector::from_vec(vec![C64::new(re, im), C64::new(0.5, 0.0), C64::new(-0.2, im)]);
            v /= C64::from(v.norm());
            let tr = trace_re(&x);
            let quad = (v.adjoint() * &x * &v)[(0, 0)].re;
            let (lmax, _) = principal_eigenpair(&x);
            prop_assert!(tr - quad >= tr - lmax - 1e-10);
            prop_assert!(tr - lmax >= -1e-10);
        }
    }
}
