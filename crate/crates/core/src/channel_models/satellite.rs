use rand::Rng;
use rand_distr::{Distribution, LogNormal};

use super::beam::{beam_gain, SatelliteGeometry};
use super::layout::{angle_between_deg, UserPosition};
use crate::linalg::{CMatrix, RMatrix};
use crate::{Error, Result, C64};

/// Satellite links to one user population, split into amplitude and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteLinks {
    /// `N_s x K` complex channel, column `k` is user `k`.
    pub channel: CMatrix,
    /// Free-space loss times beam gain times rain (nonnegative).
    pub amplitude: RMatrix,
    /// Phases in `[0, 2 pi)`.
    pub phase: RMatrix,
}

/// Combine amplitude and phase into the complex channel.
pub fn compose(amplitude: &RMatrix, phase: &RMatrix) -> CMatrix {
    CMatrix::from_fn(amplitude.nrows(), amplitude.ncols(), |i, j| {
        C64::from_polar(amplitude[(i, j)], phase[(i, j)])
    })
}

/// Rain amplitude factor `q = chi^(1/2)` where `ln(chi_dB) ~ N(mu, sigma)`.
pub fn sample_rain_factor<R: Rng + ?Sized>(geometry: &SatelliteGeometry, rng: &mut R) -> f64 {
    if !geometry.rain_enabled {
        return 1.0;
    }
    let law = LogNormal::new(geometry.rain_mu, geometry.rain_sigma).expect("validated rain law");
    let chi_db: f64 = law.sample(rng);
    10f64.powf(chi_db / 20.0).sqrt()
}

/// Noise-normalized free-space amplitudes without rain, `N_s x K`.
pub fn free_space_amplitudes(geometry: &SatelliteGeometry, users: &[UserPosition]) -> Result<RMatrix> {
    let mut b = RMatrix::zeros(geometry.n_beams(), users.len());
    for (k, u) in users.iter().enumerate() {
        for (n, c) in geometry.beam_centers.iter().enumerate() {
            let theta = angle_between_deg(&u.direction, c);
            b[(n, k)] = geometry.link_amplitude(beam_gain(theta, geometry), u.distance_m)?;
        }
    }
    Ok(b)
}

/// Draw rain and phase for every (feed, user) pair of one population.
pub fn sample_links<R: Rng + ?Sized>(
    geometry: &SatelliteGeometry,
    users: &[UserPosition],
    rng: &mut R,
) -> Result<SatelliteLinks> {
    if let Some(u) = users.iter().find(|u| !(u.distance_m > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "user distance must be positive, got {}",
            u.distance_m
        )));
    }
    let mut amplitude = free_space_amplitudes(geometry, users)?;
    let mut phase = RMatrix::zeros(geometry.n_beams(), users.len());
    for k in 0..users.len() {
        for n in 0..geometry.n_beams() {
            amplitude[(n, k)] *= sample_rain_factor(geometry, rng);
            phase[(n, k)] = rng.random_range(0.0..std::f64::consts::TAU);
        }
    }
    Ok(SatelliteLinks {
        channel: compose(&amplitude, &phase),
        amplitude,
        phase,
    })
}

/// Sample `F` (satellite to SUs) and `Z` (satellite to CUs).
pub fn sample_satellite_channels<R: Rng + ?Sized>(
    geometry: &SatelliteGeometry,
    satellite_users: &[UserPosition],
    cellular_users: &[UserPosition],
    rng: &mut R,
) -> Result<(SatelliteLinks, SatelliteLinks)> {
    geometry.validate()?;
    let f = sample_links(geometry, satellite_users, rng)?;
    let z = sample_links(geometry, cellular_users, rng)?;
    Ok((f, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::layout::hex_beam_centers;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn boresight_without_rain_is_free_space_amplitude() {
        let mut g = SatelliteGeometry::ka_band_geo(3);
        g.rain_enabled = false;
        let user = UserPosition {
            direction: g.beam_centers[0],
            distance_m: g.satellite_height_m,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let links = sample_links(&g, &[user], &mut rng).unwrap();
        let expected = g.link_amplitude(g.max_beam_gain_linear(), g.satellite_height_m).unwrap();
        assert!((links.channel[(0, 0)].norm() - expected).abs() < 1e-14);
    }

    #[test]
    fn rain_db_mean_matches_lognormal_identity() {
        let g = SatelliteGeometry::ka_band_geo(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| {
                let q = sample_rain_factor(&g, &mut rng);
                20.0 * (q * q).log10()
            })
            .sum::<f64>()
            / n as f64;
        let oracle = (g.rain_mu + g.rain_sigma * g.rain_sigma / 2.0).exp();
        assert!((mean / oracle - 1.0).abs() < 0.02, "mean {mean} oracle {oracle}");
    }

    #[test]
    fn magnitude_equals_amplitude() {
        let g = SatelliteGeometry::ka_band_geo(3);
        let users: Vec<_> = hex_beam_centers(3, 0.4)
            .into_iter()
            .map(|d| UserPosition { direction: d, distance_m: 36e6 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = sample_links(&g, &users, &mut rng).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let a = l.amplitude[(i, j)];
                assert!((l.channel[(i, j)].norm() - a).abs() <= 1e-12 * a.max(1e-300));
                assert!((0.0..std::f64::consts::TAU).contains(&l.phase[(i, j)]));
            }
        }
        assert_eq!(compose(&l.amplitude, &l.phase), l.channel);
    }

    #[test]
    fn rejects_zero_distance() {
        let g = SatelliteGeometry::ka_band_geo(1);
        let user = UserPosition { direction: g.beam_centers[0], distance_m: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_links(&g, &[user], &mut rng).is_err());
    }

    #[test]
    fn phases_are_roughly_uniform() {
        let g = SatelliteGeometry::ka_band_geo(1);
        let user = UserPosition { direction: g.beam_centers[0], distance_m: 36e6 };
        let users = vec![user; 20_000];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = sample_links(&g, &users, &mut rng).unwrap();
        let bins = 10;
        let mut counts = vec![0usize; bins];
        for p in l.phase.iter() {
            counts[((p / std::f64::consts::TAU) * bins as f64) as usize] += 1;
        }
        let e = users.len() as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 9 degrees of freedom, 99.9% quantile is about 27.9.
        assert!(chi2 < 27.9, "chi2 {chi2}");
    }
}
