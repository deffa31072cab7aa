use serde::{Deserialize, Serialize};

use super::beamformers::BeamformerSet;
use crate::channel_models::ChannelSet;
use crate::linalg::{gain, CMatrix, CVector};
use crate::{Error, Result};

/// Common and private SINRs of every user.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SinrTable {
    pub su_common: Vec<f64>,
    pub su_private: Vec<f64>,
    pub cu_common: Vec<f64>,
    pub cu_private: Vec<f64>,
}

fn col(m: &CMatrix, j: usize) -> CVector {
    m.column(j).into_owned()
}

/// SINRs of the coordinated scheme.
///
/// SUs hear only satellite streams. CUs hear every BS stream plus every
/// satellite stream, the latter always as interference. Private SINRs are
/// taken after the own common stream has been cancelled.
pub fn coordinated_sinrs(ch: &ChannelSet, bf: &BeamformerSet, noise_var: f64) -> Result<SinrTable> {
    let BeamformerSet::Coordinated { w, p } = bf else {
        return Err(Error::InvalidArgument("coordinated SINRs need coordinated precoders".into()));
    };
    let (ns, kt) = (ch.n_s(), ch.k_t());
    if w.shape() != (ns, ns + 1) || p.shape() != (ch.n_t(), kt + 1) {
        return Err(Error::Dimension("precoder shapes do not match the channels".into()));
    }
    let mut t = SinrTable::default();
    for k in 0..ch.k_s() {
        let f = col(&ch.f, k);
        let g: Vec<f64> = (0..=ns).map(|i| gain(&f, &col(w, i))).collect();
        let all_private: f64 = g[1..].iter().sum();
        let own = g[1 + ch.group_map[k]];
        t.su_common.push(g[0] / (all_private + noise_var));
        t.su_private.push(own / (all_private - own + noise_var));
    }
    for k in 0..kt {
        let h = col(&ch.h, k);
        let z = col(&ch.z, k);
        let sat: f64 = (0..=ns).map(|i| gain(&z, &col(w, i))).sum();
        let g: Vec<f64> = (0..=kt).map(|j| gain(&h, &col(p, j))).collect();
        let all_private: f64 = g[1..].iter().sum();
        t.cu_common.push(g[0] / (all_private + sat + noise_var));
        t.cu_private.push(g[1 + k] / (all_private - g[1 + k] + sat + noise_var));
    }
    Ok(t)
}

/// SINRs of the cooperative scheme.
///
/// SUs see only the satellite rows of every column. CUs see the aggregate
/// channel `[z; h]` on every column.
pub fn cooperative_sinrs(ch: &ChannelSet, bf: &BeamformerSet, noise_var: f64) -> Result<SinrTable> {
    let BeamformerSet::Cooperative { v, n_s } = bf else {
        return Err(Error::InvalidArgument("cooperative SINRs need cooperative precoders".into()));
    };
    let (ns, nt, kt) = (ch.n_s(), ch.n_t(), ch.k_t());
    if *n_s != ns || v.shape() != (ns + nt, ns + kt + 1) {
        return Err(Error::Dimension("precoder shapes do not match the channels".into()));
    }
    let sat_rows = v.rows(0, ns).into_owned();
    let mut t = SinrTable::default();
    for k in 0..ch.k_s() {
        let f = col(&ch.f, k);
        let g: Vec<f64> = (0..v.ncols()).map(|i| gain(&f, &col(&sat_rows, i))).collect();
        let interference: f64 = g[1..].iter().sum();
        let own = g[1 + ch.group_map[k]];
        t.su_common.push(g[0] / (interference + noise_var));
        t.su_private.push(own / (interference - own + noise_var));
    }
    for k in 0..kt {
        let mut agg = CVector::zeros(ns + nt);
        agg.rows_mut(0, ns).copy_from(&ch.z.column(k));
        agg.rows_mut(ns, nt).copy_from(&ch.h.column(k));
        let g: Vec<f64> = (0..v.ncols()).map(|i| gain(&agg, &col(v, i))).collect();
        let interference: f64 = g[1..].iter().sum();
        let own = g[1 + ns + k];
        t.cu_common.push(g[0] / (interference + noise_var));
        t.cu_private.push(own / (interference - own + noise_var));
    }
    Ok(t)
}

/// Dispatch on the precoder scheme.
pub fn sinrs(ch: &ChannelSet, bf: &BeamformerSet, noise_var: f64) -> Result<SinrTable> {
    match bf {
        BeamformerSet::Coordinated { .. } => coordinated_sinrs(ch, bf, noise_var),
        BeamformerSet::Cooperative { .. } => cooperative_sinrs(ch, bf, noise_var),
    }
}
