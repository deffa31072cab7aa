//! Scenario files.
//!
//! A scenario is a TOML document. Every table is optional and falls back to
//! the reference deployment; unknown keys are rejected.
//!
//! ```toml
//! master_seed = 7
//! realizations = 20
//!
//! [network]
//! beams = 3
//! users_per_beam = 2
//! n1 = 4
//! n2 = 4
//! cellular_users = 4
//! paths = 3
//!
//! [sweep]
//! p_t_db = [10.0, 20.0, 30.0]
//! p_s_w = [120.0]
//! cells = ["cooperative:rsma-rsma", "coordinated:rsma-rsma", "baseline_two_step"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel_models::{ChannelConfig, DropConfig, PhaseVarianceUnit, SatelliteGeometry, TerrestrialGeometry};
use crate::rate_model::{Scheme, TransmitStrategy};
use crate::robust::RobustConfig;
use crate::sca::{PowerBudget, ScaConfig};
use crate::{Error, Result};

/// Antenna and user counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkCounts {
    /// Number of beams, which is also the number of feeds.
    pub beams: usize,
    pub users_per_beam: usize,
    /// BS array columns (along X).
    pub n1: usize,
    /// BS array rows (along Z).
    pub n2: usize,
    pub cellular_users: usize,
    /// Propagation paths per CU.
    pub paths: usize,
}

impl Default for NetworkCounts {
    fn default() -> Self {
        Self {
            beams: 3,
            users_per_beam: 2,
            n1: 4,
            n2: 4,
            cellular_users: 4,
            paths: 3,
        }
    }
}

/// Satellite parameters other than the beam lattice, which is derived from
/// the beam count and the 3 dB angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SatelliteParams {
    pub carrier_frequency_hz: f64,
    pub satellite_height_m: f64,
    pub bandwidth_hz: f64,
    pub three_db_angle_deg: f64,
    pub max_beam_gain_dbi: f64,
    pub terminal_gain_dbi: f64,
    pub noise_temperature_k: f64,
    pub rain_mu: f64,
    pub rain_sigma: f64,
    pub rain_enabled: bool,
}

impl Default for SatelliteParams {
    fn default() -> Self {
        let g = SatelliteGeometry::ka_band_geo(1);
        Self {
            carrier_frequency_hz: g.carrier_frequency_hz,
            satellite_height_m: g.satellite_height_m,
            bandwidth_hz: g.bandwidth_hz,
            three_db_angle_deg: g.three_db_angle_deg,
            max_beam_gain_dbi: g.max_beam_gain_dbi,
            terminal_gain_dbi: g.terminal_gain_dbi,
            noise_temperature_k: g.noise_temperature_k,
            rain_mu: g.rain_mu,
            rain_sigma: g.rain_sigma,
            rain_enabled: g.rain_enabled,
        }
    }
}

/// One solver configuration evaluated at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CellSpec {
    Joint { scheme: Scheme, strategy: TransmitStrategy },
    /// Satellite first, then the BS against the frozen satellite interference.
    BaselineTwoStep,
    /// Separate bands with a half pre-log.
    BaselineOrthogonal,
}

impl CellSpec {
    pub const BASELINE_TWO_STEP: &'static str = "baseline_two_step";
    pub const BASELINE_ORTHOGONAL: &'static str = "baseline_orthogonal";

    pub fn is_baseline(self) -> bool {
        !matches!(self, CellSpec::Joint { .. })
    }

    /// Values of the `scheme` and `strategy` result columns.
    pub fn labels(self) -> (String, String) {
        match self {
            CellSpec::Joint { scheme, strategy } => (scheme.to_string(), strategy.to_string()),
            CellSpec::BaselineTwoStep => (Self::BASELINE_TWO_STEP.into(), "rsma-rsma".into()),
            CellSpec::BaselineOrthogonal => (Self::BASELINE_ORTHOGONAL.into(), "rsma-rsma".into()),
        }
    }
}

impl std::fmt::Display for CellSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellSpec::Joint { scheme, strategy } => write!(f, "{scheme}:{strategy}"),
            CellSpec::BaselineTwoStep => f.write_str(Self::BASELINE_TWO_STEP),
            CellSpec::BaselineOrthogonal => f.write_str(Self::BASELINE_ORTHOGONAL),
        }
    }
}

impl std::str::FromStr for CellSpec {
    type Err = Error;

    /// Accepts `scheme:sat-bs` (e.g. `coordinated:rsma-sdma`), a bare
    /// strategy for the coordinated scheme, or a baseline name
    /// (`baseline1`/`baseline_two_step`, `baseline2`/`baseline_orthogonal`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "baseline1" | "baseline_two_step" => return Ok(CellSpec::BaselineTwoStep),
            "baseline2" | "baseline_orthogonal" => return Ok(CellSpec::BaselineOrthogonal),
            _ => {}
        }
        let (scheme, strategy) = match t.split_once(':') {
            Some((sc, st)) => {
                let scheme = match sc {
                    "coordinated" => Scheme::Coordinated,
                    "cooperative" => Scheme::Cooperative,
                    other => return Err(Error::InvalidConfig(format!("unknown scheme {other:?} in cell {s:?}"))),
                };
                (scheme, st)
            }
            None => (Scheme::Coordinated, t.as_str()),
        };
        let strategy: TransmitStrategy = strategy
            .parse()
            .map_err(|e| Error::InvalidConfig(format!("cell {s:?}: {e}")))?;
        Ok(CellSpec::Joint { scheme, strategy })
    }
}

impl TryFrom<String> for CellSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CellSpec> for String {
    fn from(c: CellSpec) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    /// BS budgets in dB relative to the unit noise power.
    pub p_t_db: Vec<f64>,
    /// Satellite budgets in watts.
    pub p_s_w: Vec<f64>,
    pub cells: Vec<CellSpec>,
    /// Include the perfect-CSIT column of the uncertainty axis.
    pub perfect_csit: bool,
    /// Phase-error figures, read through `delta_unit`.
    pub delta_sq: Vec<f64>,
    pub delta_unit: PhaseVarianceUnit,
    /// Seed RSMA and cooperative runs from related solutions and keep the
    /// best run.
    pub multi_start: bool,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            p_t_db: vec![20.0],
            p_s_w: vec![120.0],
            cells: vec![CellSpec::Joint {
                scheme: Scheme::Coordinated,
                strategy: TransmitStrategy::uniform(crate::rate_model::Access::Rsma),
            }],
            perfect_csit: true,
            delta_sq: Vec::new(),
            delta_unit: PhaseVarianceUnit::default(),
            multi_start: true,
        }
    }
}

impl SweepGrid {
    /// Entries of the uncertainty axis: `None` for perfect CSIT, otherwise
    /// the configured figure.
    pub fn uncertainty_axis(&self) -> Vec<Option<f64>> {
        let mut out = Vec::new();
        if self.perfect_csit {
            out.push(None);
        }
        out.extend(self.delta_sq.iter().copied().map(Some));
        out
    }

    /// `(P_t dB, P_s W)` pairs, `P_t` varying fastest.
    pub fn power_axis(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &ps in &self.p_s_w {
            for &pt in &self.p_t_db {
                out.push((pt, ps));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub network: NetworkCounts,
    #[serde(default)]
    pub satellite: SatelliteParams,
    #[serde(default)]
    pub drop: DropConfig,
    #[serde(default)]
    pub sweep: SweepGrid,
    #[serde(default)]
    pub sca: ScaConfig,
    #[serde(default)]
    pub robust: RobustConfig,
}

fn default_realizations() -> usize {
    20
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            realizations: default_realizations(),
            network: NetworkCounts::default(),
            satellite: SatelliteParams::default(),
            drop: DropConfig::default(),
            sweep: SweepGrid::default(),
            sca: ScaConfig::default(),
            robust: RobustConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn channel_config(&self) -> ChannelConfig {
        let s = &self.satellite;
        let mut satellite = SatelliteGeometry::ka_band_geo(self.network.beams);
        satellite.carrier_frequency_hz = s.carrier_frequency_hz;
        satellite.satellite_height_m = s.satellite_height_m;
        satellite.bandwidth_hz = s.bandwidth_hz;
        satellite.three_db_angle_deg = s.three_db_angle_deg;
        satellite.max_beam_gain_dbi = s.max_beam_gain_dbi;
        satellite.terminal_gain_dbi = s.terminal_gain_dbi;
        satellite.noise_temperature_k = s.noise_temperature_k;
        satellite.rain_mu = s.rain_mu;
        satellite.rain_sigma = s.rain_sigma;
        satellite.rain_enabled = s.rain_enabled;
        satellite.beam_centers = crate::channel_models::layout::hex_beam_centers(self.network.beams, s.three_db_angle_deg);
        let wl = satellite.wavelength_m();
        let n = &self.network;
        ChannelConfig {
            satellite,
            terrestrial: TerrestrialGeometry::half_wavelength(n.n1, n.n2, n.paths, wl),
            users_per_beam: n.users_per_beam,
            cellular_users: n.cellular_users,
            drop: self.drop.clone(),
        }
    }

    /// Budget of one grid point.
    pub fn budget(p_t_db: f64, p_s_w: f64) -> PowerBudget {
        PowerBudget::from_db(p_s_w, p_t_db)
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidConfig("realizations must be at least 1".into()));
        }
        if self.network.beams == 0 {
            return Err(Error::InvalidConfig("at least one beam is required".into()));
        }
        self.channel_config().validate()?;
        let g = &self.sweep;
        if let Some(p) = g.p_t_db.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig(format!("P_t must be finite, got {p} dB")));
        }
        if let Some(p) = g.p_s_w.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidConfig(format!("P_s must be positive, got {p} W")));
        }
        if let Some(d) = g.delta_sq.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidConfig(format!("phase-error figures must be >= 0, got {d}")));
        }
        if !g.delta_sq.is_empty() {
            if let Some(c) = g.cells.iter().find(|c| c.is_baseline()) {
                return Err(Error::InvalidConfig(format!(
                    "cell {c} has no robust variant; drop it or clear sweep.delta_sq"
                )));
            }
        }
        self.sca.validate()?;
        self.robust.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_model::Access;

    #[test]
    fn minimal_file_uses_reference_network() {
        let cfg = ScenarioConfig::from_toml("[sweep]\np_t_db = [10.0]\n").unwrap();
        let ch = cfg.channel_config();
        assert_eq!(ch, ChannelConfig::reference());
        assert_eq!(cfg.realizations, 20);
    }

    #[test]
    fn cell_names_parse_and_roundtrip() {
        let c: CellSpec = "cooperative:rsma-sdma".parse().unwrap();
        assert_eq!(
            c,
            CellSpec::Joint {
                scheme: Scheme::Cooperative,
                strategy: TransmitStrategy {
                    satellite: Access::Rsma,
                    terrestrial: Access::Sdma
                }
            }
        );
        assert_eq!(c.to_string().parse::<CellSpec>().unwrap(), c);
        assert_eq!("baseline1".parse::<CellSpec>().unwrap(), CellSpec::BaselineTwoStep);
        assert_eq!("noma".parse::<CellSpec>().unwrap().to_string(), "coordinated:noma-noma");
        assert!("hybrid:rsma".parse::<CellSpec>().is_err());
    }

    #[test]
    fn config_roundtrips_through_toml() {
        let mut cfg = ScenarioConfig::default();
        cfg.sweep.cells.push(CellSpec::BaselineOrthogonal);
        cfg.sweep.p_t_db = vec![0.0, 40.0];
        let text = cfg.to_toml().unwrap();
        assert_eq!(ScenarioConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(ScenarioConfig::from_toml("realizations = 0").is_err());
        assert!(ScenarioConfig::from_toml("[sweep]\np_s_w = [0.0]").is_err());
        assert!(ScenarioConfig::from_toml("[sweep]\ndelta_sq = [5.0]\ncells = [\"baseline2\"]").is_err());
        assert!(ScenarioConfig::from_toml("[network]\nbeams = 3\nusers_per_beam = 0\nn1 = 4\nn2 = 4\ncellular_users = 4\npaths = 3").is_err());
        assert!(ScenarioConfig::from_toml("unknown_key = 1").is_err());
    }

    #[test]
    fn axes_follow_the_grid() {
        let g = SweepGrid {
            p_t_db: vec![10.0, 20.0],
            p_s_w: vec![60.0, 120.0],
            delta_sq: vec![5.0],
            ..SweepGrid::default()
        };
        assert_eq!(g.power_axis(), vec![(10.0, 60.0), (20.0, 60.0), (10.0, 120.0), (20.0, 120.0)]);
        assert_eq!(g.uncertainty_axis(), vec![None, Some(5.0)]);
    }
}
