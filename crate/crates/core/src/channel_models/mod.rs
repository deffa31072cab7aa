//! Seeded channel generation for the integrated network.
//!
//! [`sample_channel_set`] drops users, then draws the satellite links `F`
//! and `Z` (Bessel beam pattern, free-space loss, rain, random phase) and the
//! terrestrial multipath channel `H` from a single ChaCha stream, so a seed
//! fully determines a [`ChannelSet`]. All channels are normalized to unit
//! noise power.

mod beam;
pub mod dump;
pub mod layout;
mod satellite;
mod terrestrial;
mod uncertainty;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use beam::{beam_gain, db_to_linear, pattern_bracket, SatelliteGeometry, BOLTZMANN, SPEED_OF_LIGHT};
pub use layout::{DropConfig, UserPosition};
pub use satellite::{compose, free_space_amplitudes, sample_links, sample_rain_factor, sample_satellite_channels, SatelliteLinks};
pub use terrestrial::{
    channel_from_paths, complex_gaussian, sample_terrestrial_channels, steering, steering_horizontal,
    steering_vertical, TerrestrialGeometry,
};
pub use uncertainty::{
    build_correlation_matrices, channel_correlation, perturb, phase_correlation, PhaseUncertaintyModel,
    PhaseVarianceUnit,
};

use crate::linalg::{CMatrix, RMatrix};
use crate::{Error, Result};

/// Everything needed to draw one network realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub satellite: SatelliteGeometry,
    pub terrestrial: TerrestrialGeometry,
    /// SUs per beam.
    pub users_per_beam: usize,
    /// Number of CUs.
    pub cellular_users: usize,
    #[serde(default)]
    pub drop: DropConfig,
}

impl ChannelConfig {
    /// The reference deployment: 3 beams with 2 SUs each, a 4x4 UPA with 3
    /// paths and 4 CUs.
    pub fn reference() -> Self {
        let satellite = SatelliteGeometry::ka_band_geo(3);
        let wl = satellite.wavelength_m();
        Self {
            satellite,
            terrestrial: TerrestrialGeometry::half_wavelength(4, 4, 3, wl),
            users_per_beam: 2,
            cellular_users: 4,
            drop: DropConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.satellite.validate()?;
        self.terrestrial.validate()?;
        self.drop.validate()?;
        if self.users_per_beam == 0 {
            return Err(Error::InvalidConfig("users_per_beam must be at least 1".into()));
        }
        Ok(())
    }
}

/// One channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Satellite to SUs, `N_s x K_s`.
    pub f: CMatrix,
    /// Satellite to CUs, `N_s x K_t`.
    pub z: CMatrix,
    /// BS to CUs, `N_t x K_t`.
    pub h: CMatrix,
    pub f_amp: RMatrix,
    pub z_amp: RMatrix,
    pub f_phase: RMatrix,
    pub z_phase: RMatrix,
    /// Beam index of every SU.
    pub group_map: Vec<usize>,
    /// Seed the realization was drawn from, if any.
    pub seed: Option<u64>,
}

fn polar_split(m: &CMatrix) -> (RMatrix, RMatrix) {
    let amp = RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].norm());
    let phase = RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        m[(i, j)].arg().rem_euclid(std::f64::consts::TAU)
    });
    (amp, phase)
}

impl ChannelSet {
    /// Wrap explicit channel matrices (used for toy instances and loaded dumps).
    pub fn from_matrices(f: CMatrix, z: CMatrix, h: CMatrix, group_map: Vec<usize>) -> Result<Self> {
        let (f_amp, f_phase) = polar_split(&f);
        let (z_amp, z_phase) = polar_split(&z);
        let set = Self {
            f,
            z,
            h,
            f_amp,
            z_amp,
            f_phase,
            z_phase,
            group_map,
            seed: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn n_s(&self) -> usize {
        self.f.nrows()
    }
    pub fn k_s(&self) -> usize {
        self.f.ncols()
    }
    pub fn n_t(&self) -> usize {
        self.h.nrows()
    }
    pub fn k_t(&self) -> usize {
        self.h.ncols()
    }

    /// SUs served by beam `n`.
    pub fn beam_members(&self, n: usize) -> Vec<usize> {
        self.group_map
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == n)
            .map(|(k, _)| k)
            .collect()
    }

    /// Gateway-side uncertainty model with the stored phases as estimates.
    pub fn uncertainty(&self, delta_sq: f64) -> Result<PhaseUncertaintyModel> {
        PhaseUncertaintyModel::new(delta_sq, self.f_phase.clone(), self.z_phase.clone())
    }

    /// Drop the terrestrial side (keeps `N_t` but no CUs).
    pub fn satellite_only(&self) -> Self {
        let mut out = self.clone();
        out.z = CMatrix::zeros(self.n_s(), 0);
        out.z_amp = RMatrix::zeros(self.n_s(), 0);
        out.z_phase = RMatrix::zeros(self.n_s(), 0);
        out.h = CMatrix::zeros(self.n_t(), 0);
        out
    }

    pub fn validate(&self) -> Result<()> {
        let (ns, ks, kt) = (self.n_s(), self.k_s(), self.k_t());
        if self.z.shape() != (ns, kt) {
            return Err(Error::Dimension(format!(
                "Z is {:?}, expected ({ns}, {kt})",
                self.z.shape()
            )));
        }
        if self.f_amp.shape() != (ns, ks) || self.f_phase.shape() != (ns, ks) {
            return Err(Error::Dimension("F amplitude/phase shape mismatch".into()));
        }
        if self.z_amp.shape() != (ns, kt) || self.z_phase.shape() != (ns, kt) {
            return Err(Error::Dimension("Z amplitude/phase shape mismatch".into()));
        }
        if self.group_map.len() != ks {
            return Err(Error::Dimension(format!(
                "group map has {} entries for {ks} SUs",
                self.group_map.len()
            )));
        }
        if let Some(&g) = self.group_map.iter().find(|&&g| g >= ns) {
            return Err(Error::InvalidArgument(format!("SU mapped to missing beam {g}")));
        }
        if ks > 0 && (0..ns).any(|n| !self.group_map.contains(&n)) {
            return Err(Error::InvalidArgument("every beam must serve at least one SU".into()));
        }
        let finite = |m: &CMatrix| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !(finite(&self.f) && finite(&self.z) && finite(&self.h)) {
            return Err(Error::InvalidArgument("channel entries must be finite".into()));
        }
        Ok(())
    }
}

/// Draw one realization from `seed`.
pub fn sample_channel_set(config: &ChannelConfig, seed: u64) -> Result<ChannelSet> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sat = &config.satellite;
    let sus = layout::drop_satellite_users(
        &sat.beam_centers,
        config.users_per_beam,
        sat.three_db_angle_deg,
        sat.satellite_height_m,
        &config.drop,
        &mut rng,
    );
    let cus = layout::drop_cellular_users(
        &sat.beam_centers,
        config.cellular_users,
        sat.three_db_angle_deg,
        sat.satellite_height_m,
        &config.drop,
        &mut rng,
    );
    let (f, z) = sample_satellite_channels(sat, &sus, &cus, &mut rng)?;
    let angles = layout::draw_path_angles(
        config.cellular_users,
        config.terrestrial.num_paths,
        &config.drop,
        &mut rng,
    );
    let h = sample_terrestrial_channels(&config.terrestrial, &angles, &mut rng)?;
    let set = ChannelSet {
        f: f.channel,
        z: z.channel,
        h,
        f_amp: f.amplitude,
        z_amp: z.amplitude,
        f_phase: f.phase,
        z_phase: z.phase,
        group_map: layout::group_map(sat.n_beams(), config.users_per_beam),
        seed: Some(seed),
    };
    set.validate()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = ChannelConfig::reference();
        let a = sample_channel_set(&cfg, 42).unwrap();
        let b = sample_channel_set(&cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_channel_set(&cfg, 43).unwrap();
        assert_ne!(a.f, c.f);
    }

    #[test]
    fn reference_dimensions_and_groups() {
        let s = sample_channel_set(&ChannelConfig::reference(), 1).unwrap();
        assert_eq!((s.n_s(), s.k_s(), s.n_t(), s.k_t()), (3, 6, 16, 4));
        assert_eq!(s.beam_members(1), vec![2, 3]);
        assert_eq!(compose(&s.f_amp, &s.f_phase), s.f);
        assert_eq!(compose(&s.z_amp, &s.z_phase), s.z);
    }

    #[test]
    fn own_beam_dominates_on_average() {
        let cfg = ChannelConfig::reference();
        let mut own = 0.0;
        let mut other = 0.0;
        for seed in 0..20 {
            let s = sample_channel_set(&cfg, seed).unwrap();
            for k in 0..s.k_s() {
                for n in 0..s.n_s() {
                    let g = s.f_amp[(n, k)].powi(2);
                    if n == s.group_map[k] {
                        own += g;
                    } else {
                        other += g;
                    }
                }
            }
        }
        assert!(own > other);
    }

    #[test]
    fn from_matrices_checks_shapes() {
        let f = CMatrix::zeros(2, 2);
        let z = CMatrix::zeros(3, 1);
        let h = CMatrix::zeros(4, 1);
        assert!(ChannelSet::from_matrices(f, z, h, vec![0, 1]).is_err());
    }
}
