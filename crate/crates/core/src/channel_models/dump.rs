//! JSON channel dumps for reproducible regression runs.
//!
//! A dump stores dimensions, the seed, the beam map, every complex matrix as
//! row-major `[re, im]` pairs and the amplitude/phase split of the satellite
//! links. Loading a dump reproduces the [`ChannelSet`] bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ChannelSet;
use crate::linalg::{ComplexMatrixRecord, RealMatrixRecord};
use crate::{Error, Result};

pub const FORMAT: &str = "stin-channels/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDump {
    pub format: String,
    pub seed: Option<u64>,
    pub n_s: usize,
    pub k_s: usize,
    pub n_t: usize,
    pub k_t: usize,
    pub group_map: Vec<usize>,
    pub f: ComplexMatrixRecord,
    pub z: ComplexMatrixRecord,
    pub h: ComplexMatrixRecord,
    pub f_amp: RealMatrixRecord,
    pub z_amp: RealMatrixRecord,
    pub f_phase: RealMatrixRecord,
    pub z_phase: RealMatrixRecord,
}

impl From<&ChannelSet> for ChannelDump {
    fn from(c: &ChannelSet) -> Self {
        Self {
            format: FORMAT.to_string(),
            seed: c.seed,
            n_s: c.n_s(),
            k_s: c.k_s(),
            n_t: c.n_t(),
            k_t: c.k_t(),
            group_map: c.group_map.clone(),
            f: ComplexMatrixRecord::from_matrix(&c.f),
            z: ComplexMatrixRecord::from_matrix(&c.z),
            h: ComplexMatrixRecord::from_matrix(&c.h),
            f_amp: RealMatrixRecord::from_matrix(&c.f_amp),
            z_amp: RealMatrixRecord::from_matrix(&c.z_amp),
            f_phase: RealMatrixRecord::from_matrix(&c.f_phase),
            z_phase: RealMatrixRecord::from_matrix(&c.z_phase),
        }
    }
}

impl ChannelDump {
    pub fn into_channel_set(self) -> Result<ChannelSet> {
        if self.format != FORMAT {
            return Err(Error::Serde(format!("unsupported channel dump format {:?}", self.format)));
        }
        let set = ChannelSet {
            f: self.f.to_matrix()?,
            z: self.z.to_matrix()?,
            h: self.h.to_matrix()?,
            f_amp: self.f_amp.to_matrix()?,
            z_amp: self.z_amp.to_matrix()?,
            f_phase: self.f_phase.to_matrix()?,
            z_phase: self.z_phase.to_matrix()?,
            group_map: self.group_map,
            seed: self.seed,
        };
        let dims = (set.n_s(), set.k_s(), set.n_t(), set.k_t());
        if dims != (self.n_s, self.k_s, self.n_t, self.k_t) {
            return Err(Error::Dimension(format!(
                "dump header declares {:?} but matrices are {dims:?}",
                (self.n_s, self.k_s, self.n_t, self.k_t)
            )));
        }
        set.validate()?;
        Ok(set)
    }
}

pub fn to_json(channels: &[ChannelSet]) -> Result<String> {
    let dumps: Vec<ChannelDump> = channels.iter().map(ChannelDump::from).collect();
    serde_json::to_string_pretty(&dumps).map_err(|e| Error::Serde(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<ChannelSet>> {
    let dumps: Vec<ChannelDump> = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
    dumps.into_iter().map(ChannelDump::into_channel_set).collect()
}

pub fn write(path: &Path, channels: &[ChannelSet]) -> Result<()> {
    std::fs::write(path, to_json(channels)?).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<Vec<ChannelSet>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}
