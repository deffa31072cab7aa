use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector};
use crate::{Error, Result, C64};

/// Uniform planar array at the BS: `n1` elements along X, `n2` along Z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerrestrialGeometry {
    pub n1: usize,
    pub n2: usize,
    pub element_spacing_1_m: f64,
    pub element_spacing_2_m: f64,
    pub num_paths: usize,
    pub wavelength_m: f64,
}

impl TerrestrialGeometry {
    /// Half-wavelength `n1 x n2` array.
    pub fn half_wavelength(n1: usize, n2: usize, num_paths: usize, wavelength_m: f64) -> Self {
        Self {
            n1,
            n2,
            element_spacing_1_m: wavelength_m / 2.0,
            element_spacing_2_m: wavelength_m / 2.0,
            num_paths,
            wavelength_m,
        }
    }

    pub fn n_antennas(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas() == 0 {
            return Err(Error::InvalidConfig("array must have at least one element".into()));
        }
        if self.num_paths == 0 {
            return Err(Error::InvalidConfig("at least one path is required".into()));
        }
        if !(self.element_spacing_1_m > 0.0 && self.element_spacing_2_m > 0.0 && self.wavelength_m > 0.0) {
            return Err(Error::InvalidConfig("array spacings and wavelength must be positive".into()));
        }
        Ok(())
    }
}

fn ula(n: usize, spacing_wl: f64, direction_cosine: f64) -> impl Iterator<Item = C64> {
    let mid = (n as f64 - 1.0) / 2.0;
    (0..n).map(move |i| {
        let phase = std::f64::consts::TAU * (i as f64 - mid) * spacing_wl * direction_cosine;
        C64::from_polar(1.0, phase)
    })
}

/// Horizontal steering vector for vertical angle `theta` and horizontal angle `phi` (radians).
pub fn steering_horizontal(geometry: &TerrestrialGeometry, theta: f64, phi: f64) -> CVector {
    let d = geometry.element_spacing_1_m / geometry.wavelength_m;
    CVector::from_iterator(geometry.n1, ula(geometry.n1, d, theta.sin() * phi.cos()))
}

/// Vertical steering vector for vertical angle `theta` (radians).
pub fn steering_vertical(geometry: &TerrestrialGeometry, theta: f64) -> CVector {
    let d = geometry.element_spacing_2_m / geometry.wavelength_m;
    CVector::from_iterator(geometry.n2, ula(geometry.n2, d, theta.cos()))
}

/// `a_h(theta, phi) (x) a_v(theta)`, element `(i, j)` at index `i * n2 + j`.
pub fn steering(geometry: &TerrestrialGeometry, theta: f64, phi: f64) -> CVector {
    let h = steering_horizontal(geometry, theta, phi);
    let v = steering_vertical(geometry, theta);
    h.kronecker(&v)
}

/// `CN(0, 1)` draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// One BS-to-CU channel for the given path gains and angles (degrees).
pub fn channel_from_paths(geometry: &TerrestrialGeometry, gains: &[C64], angles_deg: &[(f64, f64)]) -> CVector {
    let scale = (1.0 / gains.len() as f64).sqrt();
    let mut h = CVector::zeros(geometry.n_antennas());
    for (alpha, &(t, p)) in gains.iter().zip(angles_deg) {
        h += steering(geometry, t.to_radians(), p.to_radians()) * *alpha;
    }
    h * C64::from(scale)
}

/// Sample `H` (`N_t x K_t`), with `angles_deg[k][l] = (theta, phi)` for path `l` of CU `k`.
pub fn sample_terrestrial_channels<R: Rng + ?Sized>(
    geometry: &TerrestrialGeometry,
    angles_deg: &[Vec<(f64, f64)>],
    rng: &mut R,
) -> Result<CMatrix> {
    geometry.validate()?;
    let mut h = CMatrix::zeros(geometry.n_antennas(), angles_deg.len());
    for (k, paths) in angles_deg.iter().enumerate() {
        if paths.len() != geometry.num_paths {
            return Err(Error::Dimension(format!(
                "CU {k} has {} path angles, expected {}",
                paths.len(),
                geometry.num_paths
            )));
        }
        let gains: Vec<C64> = (0..paths.len()).map(|_| complex_gaussian(rng)).collect();
        h.set_column(k, &channel_from_paths(geometry, &gains, paths));
    }
    Ok(h)
}
