use serde::{Deserialize, Serialize};

use super::sinr::SinrTable;
use crate::linalg::log2_1p;

/// Slack allowed before a portion vector counts as undecodable.
pub const DECODABILITY_TOL: f64 = 1e-6;

/// How common-rate portions share the common streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortionPool {
    /// Satellite portions share the satellite common stream, BS portions the
    /// BS common stream.
    Separate,
    /// One system-wide common stream shared by all portions.
    Joint,
}

/// Common-rate portions of every beam and CU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonRatePortions {
    pub pool: PortionPool,
    pub sat: Vec<f64>,
    pub bs: Vec<f64>,
}

impl CommonRatePortions {
    pub fn zeros(pool: PortionPool, n_s: usize, k_t: usize) -> Self {
        Self {
            pool,
            sat: vec![0.0; n_s],
            bs: vec![0.0; k_t],
        }
    }
}

/// A common stream whose portions exceed what its weakest decoder supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodabilityViolation {
    pub stream: String,
    pub portions: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateVector {
    /// Beam totals: portion plus the weakest member's private rate.
    pub beam_totals: Vec<f64>,
    /// CU totals: portion plus private rate.
    pub cu_totals: Vec<f64>,
    pub su_common: Vec<f64>,
    pub su_private: Vec<f64>,
    pub cu_common: Vec<f64>,
    pub cu_private: Vec<f64>,
    pub sinrs: SinrTable,
    pub violations: Vec<DecodabilityViolation>,
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Per-beam minimum of the SUs' private rates.
pub fn beam_private_minimum(private: &[f64], group_map: &[usize], n_s: usize) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; n_s];
    for (k, &g) in group_map.iter().enumerate() {
        out[g] = out[g].min(private[k]);
    }
    out.iter().map(|&r| if r.is_finite() { r } else { 0.0 }).collect()
}

/// Rates and totals for given SINRs and portions.
pub fn rsma_rates(sinrs: &SinrTable, portions: &CommonRatePortions, group_map: &[usize]) -> RateVector {
    let rates = |v: &[f64]| v.iter().map(|&g| log2_1p(g)).collect::<Vec<f64>>();
    let su_common = rates(&sinrs.su_common);
    let su_private = rates(&sinrs.su_private);
    let cu_common = rates(&sinrs.cu_common);
    let cu_private = rates(&sinrs.cu_private);
    let n_s = portions.sat.len();
    let beam_private = beam_private_minimum(&su_private, group_map, n_s);
    let beam_totals = (0..n_s).map(|n| portions.sat[n] + beam_private[n]).collect();
    let cu_totals = cu_private.iter().zip(&portions.bs).map(|(r, c)| r + c).collect();

    let mut violations = Vec::new();
    let mut check = |stream: &str, portions: f64, rate: f64| {
        if portions > rate + DECODABILITY_TOL {
            violations.push(DecodabilityViolation {
                stream: stream.to_string(),
                portions,
                rate,
            });
        }
    };
    let sum_sat: f64 = portions.sat.iter().sum();
    let sum_bs: f64 = portions.bs.iter().sum();
    match portions.pool {
        PortionPool::Separate => {
            check("satellite common", sum_sat, min_of(&su_common));
            check("BS common", sum_bs, min_of(&cu_common));
        }
        PortionPool::Joint => {
            check("system common", sum_sat + sum_bs, min_of(&su_common).min(min_of(&cu_common)));
        }
    }
    RateVector {
        beam_totals,
        cu_totals,
        su_common,
        su_private,
        cu_common,
        cu_private,
        sinrs: sinrs.clone(),
        violations,
    }
}

/// Split `budget` over users with base rates `base` to maximize the minimum
/// of `base + portion`.
pub fn water_fill(base: &[f64], budget: f64) -> Vec<f64> {
    let n = base.len();
    if n == 0 || !(budget > 0.0) {
        return vec![0.0; n];
    }
    let mut sorted: Vec<f64> = base.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Find the level L with sum(max(0, L - base)) = budget.
    let mut level = sorted[0] + budget;
    let mut prefix = 0.0;
    for m in 0..n {
        prefix += sorted[m];
        let candidate = (budget + prefix) / (m + 1) as f64;
        if m + 1 == n || candidate <= sorted[m + 1] {
            level = candidate;
            break;
        }
    }
    base.iter().map(|&b| (level - b).max(0.0)).collect()
}

/// Max-min optimal portions for the given SINRs.
pub fn optimal_portions(sinrs: &SinrTable, group_map: &[usize], n_s: usize, pool: PortionPool) -> CommonRatePortions {
    let r = |v: &[f64]| v.iter().map(|&g| log2_1p(g)).collect::<Vec<f64>>();
    let su_common = r(&sinrs.su_common);
    let cu_common = r(&sinrs.cu_common);
    let beam_private = beam_private_minimum(&r(&sinrs.su_private), group_map, n_s);
    let cu_private = r(&sinrs.cu_private);
    let finite = |x: f64| if x.is_finite() { x } else { 0.0 };
    match pool {
        PortionPool::Separate => CommonRatePortions {
            pool,
            sat: water_fill(&beam_private, finite(min_of(&su_common))),
            bs: water_fill(&cu_private, finite(min_of(&cu_common))),
        },
        PortionPool::Joint => {
            let budget = finite(min_of(&su_common).min(min_of(&cu_common)));
            let mut base = beam_private.clone();
            base.extend_from_slice(&cu_private);
            let c = water_fill(&base, budget);
            CommonRatePortions {
                pool,
                sat: c[..n_s].to_vec(),
                bs: c[n_s..].to_vec(),
            }
        }
    }
}

/// Minimum over all beam and CU totals (0 when there are no users).
pub fn mmf_objective(rates: &RateVector) -> f64 {
    let m = min_of(&rates.beam_totals).min(min_of(&rates.cu_totals));
    if m.is_finite() {
        m
    } else {
        0.0
    }
}
