//! Decode events: a uniform description of "receiver r decodes column s
//! while columns I interfere" shared by the rate evaluator and both solvers.
//!
//! All precoders live on a global antenna axis: `N_s` satellite rows followed
//! by `N_t` BS rows (see [`BeamformerSet::to_global`]). An SU's global
//! channel is `[f; 0]`, a CU's is `[z; h]`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::beamformers::{Access, BeamformerSet, Scheme, TransmitStrategy};
use super::rates::{water_fill, PortionPool};
use crate::channel_models::ChannelSet;
use crate::linalg::{gain, log2_1p, CMatrix, CVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnRole {
    SatCommon,
    SatPrivate(usize),
    BsCommon,
    BsPrivate(usize),
    /// Cooperative system-wide common stream.
    Common,
    /// Cooperative column carrying beam `n`'s private message.
    CoopSat(usize),
    /// Cooperative column carrying CU `k`'s private message.
    CoopBs(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub role: ColumnRole,
    /// Global rows this column may occupy.
    pub rows: Range<usize>,
    /// Inactive columns are pinned to zero.
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReceiverId {
    Su(usize),
    Cu(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UserRef {
    Beam(usize),
    Cu(usize),
}

/// Which portions a common stream must carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pool {
    Sat,
    Bs,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateLink {
    /// The rate bounds the sum of the pool's portions.
    Common(Pool),
    /// The rate plus the user's portion (if any) bounds the user's total.
    Private { user: UserRef, portion: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeEvent {
    pub receiver: usize,
    pub signal: usize,
    pub interference: Vec<usize>,
    pub link: RateLink,
}

/// Decoding orders for NOMA, first entry decoded first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NomaOrder {
    pub satellite: Vec<usize>,
    pub terrestrial: Vec<usize>,
}

impl NomaOrder {
    /// Beams ascending by their weakest member's channel norm; CUs ascending
    /// by channel norm.
    pub fn from_channels(ch: &ChannelSet) -> Self {
        let mut sat: Vec<(usize, f64)> = (0..ch.n_s())
            .map(|n| {
                let weakest = ch
                    .beam_members(n)
                    .into_iter()
                    .map(|k| ch.f.column(k).norm())
                    .fold(f64::INFINITY, f64::min);
                (n, weakest)
            })
            .collect();
        sat.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut bs: Vec<(usize, f64)> = (0..ch.k_t()).map(|k| (k, ch.h.column(k).norm())).collect();
        bs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        Self {
            satellite: sat.into_iter().map(|x| x.0).collect(),
            terrestrial: bs.into_iter().map(|x| x.0).collect(),
        }
    }

    pub fn validate(&self, n_s: usize, k_t: usize) -> Result<()> {
        let is_perm = |v: &[usize], n: usize| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s == (0..n).collect::<Vec<_>>()
        };
        if !is_perm(&self.satellite, n_s) {
            return Err(Error::InvalidArgument(format!(
                "satellite order {:?} is not a permutation of {n_s} beams",
                self.satellite
            )));
        }
        if !is_perm(&self.terrestrial, k_t) {
            return Err(Error::InvalidArgument(format!(
                "terrestrial order {:?} is not a permutation of {k_t} CUs",
                self.terrestrial
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeLayout {
    pub scheme: Scheme,
    pub strategy: TransmitStrategy,
    pub n_s: usize,
    pub n_t: usize,
    pub k_s: usize,
    pub k_t: usize,
    pub group_map: Vec<usize>,
    pub columns: Vec<Column>,
    pub receivers: Vec<(ReceiverId, CVector)>,
    pub events: Vec<DecodeEvent>,
    pub pool: PortionPool,
    /// Which portions exist: `0..N_s` beams, `N_s..N_s+K_t` CUs.
    pub portion_active: Vec<bool>,
    pub noma: Option<NomaOrder>,
}

/// Outcome of evaluating a layout at given precoders.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evaluation {
    pub event_sinr: Vec<f64>,
    pub event_rate: Vec<f64>,
    /// Portions chosen by water-filling (zero where inactive).
    pub portions: Vec<f64>,
    /// Totals of beams `0..N_s` then CUs.
    pub user_totals: Vec<f64>,
    pub mmf: f64,
}

/// Global channels of all receivers: SUs as `[f; 0]`, then CUs as `[z; h]`.
pub fn global_receivers(ch: &ChannelSet) -> Vec<(ReceiverId, CVector)> {
    let (n_s, n_t) = (ch.n_s(), ch.n_t());
    let n = n_s + n_t;
    let mut receivers = Vec::with_capacity(ch.k_s() + ch.k_t());
    for k in 0..ch.k_s() {
        let mut g = CVector::zeros(n);
        g.rows_mut(0, n_s).copy_from(&ch.f.column(k));
        receivers.push((ReceiverId::Su(k), g));
    }
    for k in 0..ch.k_t() {
        let mut g = CVector::zeros(n);
        g.rows_mut(0, n_s).copy_from(&ch.z.column(k));
        g.rows_mut(n_s, n_t).copy_from(&ch.h.column(k));
        receivers.push((ReceiverId::Cu(k), g));
    }
    receivers
}

impl DecodeLayout {
    /// Layout with the default NOMA orders from [`NomaOrder::from_channels`].
    pub fn new(ch: &ChannelSet, scheme: Scheme, strategy: TransmitStrategy) -> Result<Self> {
        Self::with_order(ch, scheme, strategy, None)
    }

    pub fn with_order(
        ch: &ChannelSet,
        scheme: Scheme,
        strategy: TransmitStrategy,
        noma_order: Option<NomaOrder>,
    ) -> Result<Self> {
        let (n_s, n_t, k_s, k_t) = (ch.n_s(), ch.n_t(), ch.k_s(), ch.k_t());
        let n = n_s + n_t;
        let sat_rows = 0..n_s;
        let bs_rows = n_s..n;
        let receivers = global_receivers(ch);
        let cu_rx = |k: usize| k_s + k;
        let mut events = Vec::new();
        let mut portion_active = vec![false; n_s + k_t];
        let mut noma = None;
        let columns;
        let pool;

        match scheme {
            Scheme::Coordinated => {
                pool = PortionPool::Separate;
                let (sat, bs) = (strategy.satellite, strategy.terrestrial);
                let mut cols = vec![Column {
                    role: ColumnRole::SatCommon,
                    rows: sat_rows.clone(),
                    active: sat.has_common(),
                }];
                cols.extend((0..n_s).map(|i| Column {
                    role: ColumnRole::SatPrivate(i),
                    rows: sat_rows.clone(),
                    active: true,
                }));
                cols.push(Column {
                    role: ColumnRole::BsCommon,
                    rows: bs_rows.clone(),
                    active: bs.has_common(),
                });
                cols.extend((0..k_t).map(|j| Column {
                    role: ColumnRole::BsPrivate(j),
                    rows: bs_rows.clone(),
                    active: true,
                }));
                let sat_private = |i: usize| 1 + i;
                let bs_common = n_s + 1;
                let bs_private = |j: usize| n_s + 2 + j;
                let sat_active: Vec<usize> = (0..=n_s).filter(|&c| cols[c].active).collect();

                let order = if sat == Access::Noma || bs == Access::Noma {
                    let o = noma_order.unwrap_or_else(|| NomaOrder::from_channels(ch));
                    o.validate(n_s, k_t)?;
                    noma = Some(o.clone());
                    o
                } else {
                    NomaOrder::default()
                };

                match sat {
                    Access::Rsma | Access::Sdma => {
                        for k in 0..k_s {
                            let mu = ch.group_map[k];
                            let others: Vec<usize> = (0..n_s).filter(|&i| i != mu).map(sat_private).collect();
                            if sat == Access::Rsma {
                                events.push(DecodeEvent {
                                    receiver: k,
                                    signal: 0,
                                    interference: (0..n_s).map(sat_private).collect(),
                                    link: RateLink::Common(Pool::Sat),
                                });
                                portion_active[mu] = true;
                            }
                            events.push(DecodeEvent {
                                receiver: k,
                                signal: sat_private(mu),
                                interference: others,
                                link: RateLink::Private {
                                    user: UserRef::Beam(mu),
                                    portion: (sat == Access::Rsma).then_some(mu),
                                },
                            });
                        }
                    }
                    Access::Noma => {
                        let pi = &order.satellite;
                        for j in 0..pi.len() {
                            let later: Vec<usize> = pi[j + 1..].iter().map(|&b| sat_private(b)).collect();
                            for &beam in &pi[j..] {
                                for k in ch.beam_members(beam) {
                                    events.push(DecodeEvent {
                                        receiver: k,
                                        signal: sat_private(pi[j]),
                                        interference: later.clone(),
                                        link: RateLink::Private {
                                            user: UserRef::Beam(pi[j]),
                                            portion: None,
                                        },
                                    });
                                }
                            }
                        }
                    }
                }

                match bs {
                    Access::Rsma | Access::Sdma => {
                        for k in 0..k_t {
                            let mut all_private: Vec<usize> = (0..k_t).map(bs_private).collect();
                            all_private.extend(&sat_active);
                            if bs == Access::Rsma {
                                events.push(DecodeEvent {
                                    receiver: cu_rx(k),
                                    signal: bs_common,
                                    interference: all_private.clone(),
                                    link: RateLink::Common(Pool::Bs),
                                });
                                portion_active[n_s + k] = true;
                            }
                            all_private.retain(|&c| c != bs_private(k));
                            events.push(DecodeEvent {
                                receiver: cu_rx(k),
                                signal: bs_private(k),
                                interference: all_private,
                                link: RateLink::Private {
                                    user: UserRef::Cu(k),
                                    portion: (bs == Access::Rsma).then_some(n_s + k),
                                },
                            });
                        }
                    }
                    Access::Noma => {
                        let sigma = &order.terrestrial;
                        for j in 0..sigma.len() {
                            let mut interference: Vec<usize> = sigma[j + 1..].iter().map(|&c| bs_private(c)).collect();
                            interference.extend(&sat_active);
                            for &cu in &sigma[j..] {
                                events.push(DecodeEvent {
                                    receiver: cu_rx(cu),
                                    signal: bs_private(sigma[j]),
                                    interference: interference.clone(),
                                    link: RateLink::Private {
                                        user: UserRef::Cu(sigma[j]),
                                        portion: None,
                                    },
                                });
                            }
                        }
                    }
                }
                columns = cols;
            }
            Scheme::Cooperative => {
                pool = PortionPool::Joint;
                if strategy.satellite != strategy.terrestrial {
                    return Err(Error::InvalidArgument(format!(
                        "cooperative precoding needs one strategy for both transmitters, got {strategy}"
                    )));
                }
                let access = strategy.satellite;
                if access == Access::Noma {
                    return Err(Error::InvalidArgument(
                        "cooperative NOMA is not supported; use RSMA or SDMA".into(),
                    ));
                }
                let rsma = access == Access::Rsma;
                let mut cols = vec![Column {
                    role: ColumnRole::Common,
                    rows: 0..n,
                    active: rsma,
                }];
                cols.extend((0..n_s).map(|i| Column {
                    role: ColumnRole::CoopSat(i),
                    rows: 0..n,
                    active: true,
                }));
                cols.extend((0..k_t).map(|j| Column {
                    role: ColumnRole::CoopBs(j),
                    rows: 0..n,
                    active: true,
                }));
                let private: Vec<usize> = (1..cols.len()).collect();
                let mut push_user = |rx: usize, own: usize, user: UserRef, portion: usize| {
                    if rsma {
                        events.push(DecodeEvent {
                            receiver: rx,
                            signal: 0,
                            interference: private.clone(),
                            link: RateLink::Common(Pool::All),
                        });
                        portion_active[portion] = true;
                    }
                    events.push(DecodeEvent {
                        receiver: rx,
                        signal: own,
                        interference: private.iter().copied().filter(|&c| c != own).collect(),
                        link: RateLink::Private {
                            user,
                            portion: rsma.then_some(portion),
                        },
                    });
                };
                for k in 0..k_s {
                    let mu = ch.group_map[k];
                    push_user(k, 1 + mu, UserRef::Beam(mu), mu);
                }
                for k in 0..k_t {
                    push_user(cu_rx(k), 1 + n_s + k, UserRef::Cu(k), n_s + k);
                }
                columns = cols;
            }
        }

        Ok(Self {
            scheme,
            strategy,
            n_s,
            n_t,
            k_s,
            k_t,
            group_map: ch.group_map.clone(),
            columns,
            receivers,
            events,
            pool,
            portion_active,
            noma,
        })
    }

    /// Swap in the channels of another realization with the same dimensions.
    pub fn set_channels(&mut self, ch: &ChannelSet) -> Result<()> {
        if (ch.n_s(), ch.n_t(), ch.k_s(), ch.k_t()) != (self.n_s, self.n_t, self.k_s, self.k_t) {
            return Err(Error::Dimension("replacement channels change the network size".into()));
        }
        self.receivers = global_receivers(ch);
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.n_s + self.k_t
    }

    pub fn user_index(&self, u: UserRef) -> usize {
        match u {
            UserRef::Beam(n) => n,
            UserRef::Cu(k) => self.n_s + k,
        }
    }

    /// Portion indices belonging to `pool`.
    pub fn pool_members(&self, pool: Pool) -> Vec<usize> {
        let range = match pool {
            Pool::Sat => 0..self.n_s,
            Pool::Bs => self.n_s..self.n_users(),
            Pool::All => 0..self.n_users(),
        };
        range.filter(|&i| self.portion_active[i]).collect()
    }

    /// Distinct pools with at least one common event.
    pub fn pools(&self) -> Vec<Pool> {
        let mut out = Vec::new();
        for e in &self.events {
            if let RateLink::Common(p) = e.link {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Total received power of `columns` at receiver `rx`.
    fn power(&self, rx: usize, x: &CMatrix, columns: &[usize]) -> f64 {
        let g = &self.receivers[rx].1;
        columns.iter().map(|&c| gain(g, &x.column(c).into_owned())).sum()
    }

    /// `(signal, interference + noise)` of every event.
    pub fn event_terms(&self, x: &CMatrix, noise_var: f64) -> Vec<(f64, f64)> {
        self.events
            .iter()
            .map(|e| {
                (
                    self.power(e.receiver, x, &[e.signal]),
                    self.power(e.receiver, x, &e.interference) + noise_var,
                )
            })
            .collect()
    }

    /// Rates of every event and the max-min totals with water-filled portions.
    pub fn evaluate(&self, x: &CMatrix, noise_var: f64) -> Evaluation {
        let terms = self.event_terms(x, noise_var);
        let event_sinr: Vec<f64> = terms.iter().map(|(s, d)| s / d).collect();
        let event_rate: Vec<f64> = event_sinr.iter().map(|&g| log2_1p(g)).collect();
        self.totals_from_rates(event_sinr, event_rate)
    }

    /// Water-fill portions and form user totals from given event rates.
    pub fn totals_from_rates(&self, event_sinr: Vec<f64>, event_rate: Vec<f64>) -> Evaluation {
        let nu = self.n_users();
        let mut private_min = vec![f64::INFINITY; nu];
        for (e, r) in self.events.iter().zip(&event_rate) {
            if let RateLink::Private { user, .. } = e.link {
                let u = self.user_index(user);
                private_min[u] = private_min[u].min(*r);
            }
        }
        for v in &mut private_min {
            if !v.is_finite() {
                *v = 0.0;
            }
        }
        let mut portions = vec![0.0; nu];
        for pool in self.pools() {
            let budget = self
                .events
                .iter()
                .zip(&event_rate)
                .filter(|(e, _)| e.link == RateLink::Common(pool))
                .map(|(_, r)| *r)
                .fold(f64::INFINITY, f64::min);
            let members = self.pool_members(pool);
            let base: Vec<f64> = members.iter().map(|&m| private_min[m]).collect();
            let budget = if budget.is_finite() { budget } else { 0.0 };
            for (m, c) in members.iter().zip(water_fill(&base, budget)) {
                portions[*m] = c;
            }
        }
        let user_totals: Vec<f64> = (0..nu).map(|u| private_min[u] + portions[u]).collect();
        let mmf = user_totals.iter().copied().fold(f64::INFINITY, f64::min);
        Evaluation {
            event_sinr,
            event_rate,
            portions,
            user_totals,
            mmf: if mmf.is_finite() { mmf } else { 0.0 },
        }
    }

    /// Zero the rows outside each column's range and inactive columns.
    pub fn mask(&self, x: &mut CMatrix) {
        for (c, col) in self.columns.iter().enumerate() {
            for r in 0..x.nrows() {
                if !col.active || !col.rows.contains(&r) {
                    x[(r, c)] = crate::C64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn to_beamformers(&self, x: &CMatrix) -> Result<BeamformerSet> {
        BeamformerSet::from_global(self.scheme, x, self.n_s)
    }
}

/// Stream rates under SC-SIC with the given decoding orders (coordinated
/// precoders; common columns are ignored).
pub fn noma_rates(ch: &ChannelSet, bf: &BeamformerSet, order: &NomaOrder, noise_var: f64) -> Result<super::RateVector> {
    if bf.scheme() != Scheme::Coordinated {
        return Err(Error::InvalidArgument("NOMA rates are defined for coordinated precoders".into()));
    }
    let layout = DecodeLayout::with_order(
        ch,
        Scheme::Coordinated,
        TransmitStrategy::uniform(Access::Noma),
        Some(order.clone()),
    )?;
    let mut x = bf.to_global();
    layout.mask(&mut x);
    let eval = layout.evaluate(&x, noise_var);
    Ok(super::RateVector {
        beam_totals: eval.user_totals[..ch.n_s()].to_vec(),
        cu_totals: eval.user_totals[ch.n_s()..].to_vec(),
        ..Default::default()
    })
}
