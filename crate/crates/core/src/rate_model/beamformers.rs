use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, ComplexMatrixRecord};
use crate::{Error, Result};

/// Level of integration between the satellite and the BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Shared CSI only; each transmitter sends its own messages.
    Coordinated,
    /// Shared CSI and data; all columns span both transmitters.
    Cooperative,
}

/// Multiple-access strategy of one transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Rsma,
    Sdma,
    Noma,
}

impl Access {
    pub fn has_common(self) -> bool {
        self == Access::Rsma
    }
}

impl std::fmt::Display for Access {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Access::Rsma => "rsma",
            Access::Sdma => "sdma",
            Access::Noma => "noma",
        })
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Coordinated => "coordinated",
            Scheme::Cooperative => "cooperative",
        })
    }
}

/// Strategy pair `satellite-terrestrial`, e.g. RSMA-RSMA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransmitStrategy {
    pub satellite: Access,
    pub terrestrial: Access,
}

impl TransmitStrategy {
    pub const fn uniform(a: Access) -> Self {
        Self {
            satellite: a,
            terrestrial: a,
        }
    }
}

impl std::fmt::Display for TransmitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.satellite, self.terrestrial)
    }
}

impl std::str::FromStr for TransmitStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let access = |a: &str| match a.trim().to_ascii_lowercase().as_str() {
            "rsma" => Ok(Access::Rsma),
            "sdma" => Ok(Access::Sdma),
            "noma" => Ok(Access::Noma),
            other => Err(Error::InvalidArgument(format!("unknown access strategy {other:?}"))),
        };
        match s.split_once('-') {
            Some((a, b)) => Ok(Self {
                satellite: access(a)?,
                terrestrial: access(b)?,
            }),
            None => Ok(Self::uniform(access(s)?)),
        }
    }
}

/// Precoders for either scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum BeamformerSet {
    /// `w` is `N_s x (N_s + 1)` with columns `[w_c, w_1..w_Ns]`; `p` is
    /// `N_t x (K_t + 1)` with columns `[p_c, p_1..p_Kt]`.
    Coordinated { w: CMatrix, p: CMatrix },
    /// `v` is `(N_s + N_t) x (N_s + K_t + 1)` with columns
    /// `[v_c, v_sat_1..v_sat_Ns, v_bs_1..v_bs_Kt]`; the first `N_s` rows
    /// belong to the satellite.
    Cooperative { v: CMatrix, n_s: usize },
}

impl BeamformerSet {
    pub fn zeros(scheme: Scheme, n_s: usize, n_t: usize, k_t: usize) -> Self {
        match scheme {
            Scheme::Coordinated => Self::Coordinated {
                w: CMatrix::zeros(n_s, n_s + 1),
                p: CMatrix::zeros(n_t, k_t + 1),
            },
            Scheme::Cooperative => Self::Cooperative {
                v: CMatrix::zeros(n_s + n_t, n_s + k_t + 1),
                n_s,
            },
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Self::Coordinated { .. } => Scheme::Coordinated,
            Self::Cooperative { .. } => Scheme::Cooperative,
        }
    }

    /// All columns stacked over the global antenna axis (satellite rows then
    /// BS rows). Coordinated columns are `[w_c, w.., p_c, p..]`, padded with
    /// zeros on the other transmitter's rows.
    pub fn to_global(&self) -> CMatrix {
        match self {
            Self::Coordinated { w, p } => {
                let (ns, nt) = (w.nrows(), p.nrows());
                let mut x = CMatrix::zeros(ns + nt, w.ncols() + p.ncols());
                x.view_mut((0, 0), (ns, w.ncols())).copy_from(w);
                x.view_mut((ns, w.ncols()), (nt, p.ncols())).copy_from(p);
                x
            }
            Self::Cooperative { v, .. } => v.clone(),
        }
    }

    pub fn from_global(scheme: Scheme, x: &CMatrix, n_s: usize) -> Result<Self> {
        let n_t = x.nrows().checked_sub(n_s).ok_or_else(|| Error::Dimension("too few rows".into()))?;
        match scheme {
            Scheme::Coordinated => {
                let wc = n_s + 1;
                if x.ncols() < wc + 1 {
                    return Err(Error::Dimension("too few columns for coordinated precoders".into()));
                }
                Ok(Self::Coordinated {
                    w: x.view((0, 0), (n_s, wc)).into_owned(),
                    p: x.view((n_s, wc), (n_t, x.ncols() - wc)).into_owned(),
                })
            }
            Scheme::Cooperative => Ok(Self::Cooperative { v: x.clone(), n_s }),
        }
    }

    pub fn n_s(&self) -> usize {
        match self {
            Self::Coordinated { w, .. } => w.nrows(),
            Self::Cooperative { n_s, .. } => *n_s,
        }
    }

    /// Power radiated by each satellite feed, `(X X^H)_{nn}`.
    pub fn feed_powers(&self) -> Vec<f64> {
        let x = self.to_global();
        (0..self.n_s()).map(|n| x.row(n).norm_squared()).collect()
    }

    /// Total BS power, `tr(P P^H)` restricted to BS rows.
    pub fn bs_power(&self) -> f64 {
        let x = self.to_global();
        let ns = self.n_s();
        (ns..x.nrows()).map(|r| x.row(r).norm_squared()).sum()
    }

    /// Worst relative excess over the per-feed and BS budgets (0 when feasible).
    pub fn power_violation(&self, p_s: f64, p_t: f64) -> f64 {
        let per_feed = p_s / self.n_s().max(1) as f64;
        let mut worst: f64 = 0.0;
        for pw in self.feed_powers() {
            worst = worst.max((pw - per_feed) / per_feed.max(1e-300));
        }
        worst.max((self.bs_power() - p_t) / p_t.max(1e-300)).max(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.to_global().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Serializable form of a [`BeamformerSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerRecord {
    pub scheme: Scheme,
    pub n_s: usize,
    pub global: ComplexMatrixRecord,
}

impl From<&BeamformerSet> for BeamformerRecord {
    fn from(b: &BeamformerSet) -> Self {
        Self {
            scheme: b.scheme(),
            n_s: b.n_s(),
            global: ComplexMatrixRecord::from_matrix(&b.to_global()),
        }
    }
}

impl BeamformerRecord {
    pub fn to_set(&self) -> Result<BeamformerSet> {
        BeamformerSet::from_global(self.scheme, &self.global.to_matrix()?, self.n_s)
    }
}
