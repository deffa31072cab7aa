//! Satellite phase uncertainty.
//!
//! The gateway knows the amplitudes and a stale phase estimate. At
//! transmission time every (feed, user) phase has drifted by an independent
//! `N(0, delta_sq)` error, so the true channel is `f_hat o x` with
//! `x_i = exp(j e_i)`. Its correlation `X = E[x x^H]` has unit diagonal and
//! `exp(-delta_sq)` off the diagonal.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector, RMatrix};
use crate::{Error, Result, C64};

use super::satellite::compose;

/// How a configured phase-error figure maps to a variance in rad².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhaseVarianceUnit {
    /// The number is a variance in deg², scaled by `(pi/180)^2`.
    DegreesSquared,
    /// The number is converted like an angle, `x * pi / 180`.
    #[default]
    Degrees,
    /// The number is a standard deviation in degrees, `(x * pi / 180)^2`.
    StdDevDegrees,
    /// The number is already in rad².
    Radians,
}

impl PhaseVarianceUnit {
    pub fn to_rad_sq(self, value: f64) -> f64 {
        let k = std::f64::consts::PI / 180.0;
        match self {
            Self::DegreesSquared => value * k * k,
            Self::Degrees => value * k,
            Self::StdDevDegrees => (value * k).powi(2),
            Self::Radians => value,
        }
    }
}

/// Phase-error variance plus the phase estimates held at the gateway.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseUncertaintyModel {
    /// Variance in rad².
    pub delta_sq: f64,
    pub estimated_phase_f: RMatrix,
    pub estimated_phase_z: RMatrix,
}

impl PhaseUncertaintyModel {
    pub fn new(delta_sq: f64, estimated_phase_f: RMatrix, estimated_phase_z: RMatrix) -> Result<Self> {
        if !(delta_sq >= 0.0 && delta_sq.is_finite()) {
            return Err(Error::InvalidArgument(format!("phase variance must be >= 0, got {delta_sq}")));
        }
        Ok(Self {
            delta_sq,
            estimated_phase_f,
            estimated_phase_z,
        })
    }

    /// Correlation coefficient between two distinct feeds.
    pub fn off_diagonal(&self) -> f64 {
        (-self.delta_sq).exp()
    }
}

/// `X = E[x x^H]` of size `n`.
pub fn phase_correlation(n: usize, delta_sq: f64) -> CMatrix {
    let rho = (-delta_sq).exp();
    CMatrix::from_fn(n, n, |i, j| C64::from(if i == j { 1.0 } else { rho }))
}

/// `diag(f_hat) X diag(f_hat)^H`, the second moment of the true channel.
pub fn channel_correlation(f_hat: &CVector, delta_sq: f64) -> CMatrix {
    let rho = (-delta_sq).exp();
    let n = f_hat.len();
    CMatrix::from_fn(n, n, |i, j| {
        let w = if i == j { 1.0 } else { rho };
        f_hat[i] * f_hat[j].conj() * w
    })
}

/// Correlation matrices `(F_bar_k, Z_bar_k)` for every SU and CU.
pub fn build_correlation_matrices(
    model: &PhaseUncertaintyModel,
    f_amp: &RMatrix,
    z_amp: &RMatrix,
) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    if f_amp.shape() != model.estimated_phase_f.shape() || z_amp.shape() != model.estimated_phase_z.shape() {
        return Err(Error::Dimension("amplitude and phase estimate shapes differ".into()));
    }
    let f_hat = compose(f_amp, &model.estimated_phase_f);
    let z_hat = compose(z_amp, &model.estimated_phase_z);
    let per_column = |m: &CMatrix| {
        (0..m.ncols())
            .map(|k| channel_correlation(&m.column(k).into_owned(), model.delta_sq))
            .collect::<Vec<_>>()
    };
    Ok((per_column(&f_hat), per_column(&z_hat)))
}

/// One draw of the true satellite channel around the estimate `(amp, phase_hat)`.
pub fn perturb<R: Rng + ?Sized>(amp: &RMatrix, phase_hat: &RMatrix, delta_sq: f64, rng: &mut R) -> CMatrix {
    if delta_sq == 0.0 {
        return compose(amp, phase_hat);
    }
    let law = Normal::new(0.0, delta_sq.sqrt()).expect("finite variance");
    let phase = RMatrix::from_fn(phase_hat.nrows(), phase_hat.ncols(), |i, j| {
        phase_hat[(i, j)] + law.sample(rng)
    });
    compose(amp, &phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, outer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_vec() -> CVector {
        CVector::from_vec(vec![C64::new(0.5, 0.2), C64::new(-0.1, 0.8), C64::new(0.3, -0.3)])
    }

    #[test]
    fn zero_variance_is_outer_product() {
        let f = sample_vec();
        let x = phase_correlation(3, 0.0);
        assert!(x.iter().all(|z| *z == C64::from(1.0)));
        assert!((channel_correlation(&f, 0.0) - outer(&f)).norm() < 1e-15);
    }

    #[test]
    fn off_diagonal_matches_characteristic_function() {
        let d: f64 = 0.785;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let law = Normal::new(0.0, d.sqrt()).unwrap();
        let n = 1_000_000;
        let mut acc = C64::from(0.0);
        for _ in 0..n {
            let e1: f64 = law.sample(&mut rng);
            let e2: f64 = law.sample(&mut rng);
            acc += C64::from_polar(1.0, e1 - e2);
        }
        acc /= n as f64;
        let x = phase_correlation(3, d);
        assert!((x[(0, 1)].re - acc.re).abs() < 1e-2);
        assert!((x[(0, 1)].re - 0.456).abs() < 1e-3);
    }

    #[test]
    fn correlation_is_hermitian_psd() {
        for &d in &[0.0, 0.01, 0.3, 2.0] {
            let x = phase_correlation(3, d);
            let lmin = min_eigenvalue(&x);
            assert!((lmin - (1.0 - (-d).exp())).abs() < 1e-12);
            let c = channel_correlation(&sample_vec(), d);
            assert!((&c - c.adjoint()).camax() < 1e-12);
            assert!(min_eigenvalue(&c) >= -1e-9);
            for i in 0..3 {
                assert_eq!(x[(i, i)], C64::from(1.0));
            }
        }
    }

    #[test]
    fn correlation_matches_monte_carlo_of_perturbed_channel() {
        let amp = RMatrix::from_row_slice(3, 1, &[0.8, 0.3, 0.05]);
        let ph = RMatrix::from_row_slice(3, 1, &[0.1, 2.0, 4.0]);
        let d = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 100_000;
        let mut acc = CMatrix::zeros(3, 3);
        for _ in 0..n {
            let f = perturb(&amp, &ph, d, &mut rng).column(0).into_owned();
            acc += outer(&f);
        }
        acc /= C64::from(n as f64);
        let f_hat = compose(&amp, &ph).column(0).into_owned();
        let exact = channel_correlation(&f_hat, d);
        assert!((acc - &exact).camax() < 5e-3);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn unit_conversions() {
        let k = std::f64::consts::PI / 180.0;
        assert!((PhaseVarianceUnit::Degrees.to_rad_sq(45.0) - 0.7854).abs() < 1e-4);
        assert!((PhaseVarianceUnit::DegreesSquared.to_rad_sq(45.0) - 45.0 * k * k).abs() < 1e-15);
        assert!((PhaseVarianceUnit::StdDevDegrees.to_rad_sq(5.0) - (5.0 * k).powi(2)).abs() < 1e-15);
        assert_eq!(PhaseVarianceUnit::Radians.to_rad_sq(0.3), 0.3);
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(PhaseUncertaintyModel::new(-1.0, RMatrix::zeros(1, 1), RMatrix::zeros(1, 1)).is_err());
    }
}
