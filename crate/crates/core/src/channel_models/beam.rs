use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Half-power constant of the Bessel beam pattern.
const U_SCALE: f64 = 2.07123;
/// Below this argument the pattern is evaluated by its Taylor series.
const SERIES_CUTOFF: f64 = 1e-6;

/// Physical parameters of the multibeam GEO payload and its users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteGeometry {
    pub carrier_frequency_hz: f64,
    pub satellite_height_m: f64,
    pub bandwidth_hz: f64,
    /// Off-axis angle at which the beam gain drops by 3 dB.
    pub three_db_angle_deg: f64,
    pub max_beam_gain_dbi: f64,
    pub terminal_gain_dbi: f64,
    pub noise_temperature_k: f64,
    /// Unit pointing vectors of the beam centers, as seen from the satellite.
    pub beam_centers: Vec<[f64; 3]>,
    /// Location of `ln(chi_dB)` for the rain fading law.
    pub rain_mu: f64,
    /// Scale of `ln(chi_dB)` for the rain fading law.
    pub rain_sigma: f64,
    /// When false, the rain factor is pinned to one.
    #[serde(default = "default_true")]
    pub rain_enabled: bool,
}

fn default_true() -> bool {
    true
}

impl SatelliteGeometry {
    /// Ka-band GEO defaults with `n_beams` beams on a hexagonal lattice.
    pub fn ka_band_geo(n_beams: usize) -> Self {
        let three_db = 0.4;
        Self {
            carrier_frequency_hz: 28e9,
            satellite_height_m: 35_786e3,
            bandwidth_hz: 500e6,
            three_db_angle_deg: three_db,
            max_beam_gain_dbi: 52.0,
            terminal_gain_dbi: 42.7,
            noise_temperature_k: 300.0,
            beam_centers: super::layout::hex_beam_centers(n_beams, three_db),
            rain_mu: -3.125,
            rain_sigma: 1.591,
            rain_enabled: true,
        }
    }

    pub fn n_beams(&self) -> usize {
        self.beam_centers.len()
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    pub fn max_beam_gain_linear(&self) -> f64 {
        db_to_linear(self.max_beam_gain_dbi)
    }

    pub fn terminal_gain_linear(&self) -> f64 {
        db_to_linear(self.terminal_gain_dbi)
    }

    /// Noise-normalized free-space amplitude `sqrt(G_R G) / (4 pi d/lambda sqrt(k T B))`
    /// for a beam gain `gain` (linear) at distance `distance_m`.
    pub fn link_amplitude(&self, gain: f64, distance_m: f64) -> Result<f64> {
        if !(distance_m > 0.0) || !distance_m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "user distance must be positive, got {distance_m}"
            )));
        }
        let noise = (BOLTZMANN * self.noise_temperature_k * self.bandwidth_hz).sqrt();
        let path = 4.0 * std::f64::consts::PI * distance_m / self.wavelength_m();
        Ok((self.terminal_gain_linear() * gain).sqrt() / (path * noise))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency_hz", self.carrier_frequency_hz),
            ("satellite_height_m", self.satellite_height_m),
            ("bandwidth_hz", self.bandwidth_hz),
            ("three_db_angle_deg", self.three_db_angle_deg),
            ("noise_temperature_k", self.noise_temperature_k),
            ("rain_sigma", self.rain_sigma),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite")));
            }
        }
        if self.beam_centers.is_empty() {
            return Err(Error::InvalidConfig("at least one beam is required".into()));
        }
        for (i, a) in self.beam_centers.iter().enumerate() {
            let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!("beam center {i} is not a unit vector")));
            }
            for b in &self.beam_centers[..i] {
                if super::layout::angle_between_deg(a, b) < 1e-9 {
                    return Err(Error::InvalidConfig(format!("beam center {i} duplicates another beam")));
                }
            }
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Bracketed pattern `J1(u)/(2u) + 36 J3(u)/u^3`, equal to 1 at `u = 0`.
pub fn pattern_bracket(u: f64) -> f64 {
    let u = u.abs();
    if u < SERIES_CUTOFF {
        // 1/4 - u^2/32 and 3/4 - 3u^2/64 from the two series.
        return 1.0 - 0.078_125 * u * u;
    }
    puruspe::Jn(1, u) / (2.0 * u) + 36.0 * puruspe::Jn(3, u) / (u * u * u)
}

/// Linear beam gain at `theta_deg` off the beam center.
pub fn beam_gain(theta_deg: f64, geometry: &SatelliteGeometry) -> f64 {
    let u = U_SCALE * theta_deg.to_radians().sin() / geometry.three_db_angle_deg.to_radians().sin();
    let b = pattern_bracket(u);
    geometry.max_beam_gain_linear() * b * b
}
