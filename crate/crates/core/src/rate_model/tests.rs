use super::*;
use crate::channel_models::{sample_channel_set, ChannelConfig, ChannelSet};
use crate::linalg::{log2_1p, CMatrix};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn toy_channels(seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_matrix(2, 4, &mut rng);
    let z = random_matrix(2, 2, &mut rng) * C64::from(0.3);
    let h = random_matrix(3, 2, &mut rng);
    ChannelSet::from_matrices(f, z, h, vec![0, 0, 1, 1]).unwrap()
}

/// |a^H b|^2 with explicit loops and no library helpers.
fn quad(a: &[C64], b: &[C64]) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for i in 0..a.len() {
        re += a[i].re * b[i].re + a[i].im * b[i].im;
        im += a[i].re * b[i].im - a[i].im * b[i].re;
    }
    re * re + im * im
}

fn column(m: &CMatrix, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

#[test]
fn coordinated_sinrs_match_elementwise_oracle() {
    let ch = toy_channels(1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = random_matrix(2, 3, &mut rng);
    let p = random_matrix(3, 3, &mut rng);
    let bf = BeamformerSet::Coordinated { w: w.clone(), p: p.clone() };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    for k in 0..4 {
        let f = column(&ch.f, k);
        let g: Vec<f64> = (0..3).map(|i| quad(&f, &column(&w, i))).collect();
        let mu = ch.group_map[k];
        let common = g[0] / (g[1] + g[2] + 1.0);
        let private = g[1 + mu] / (g[2 - mu] + 1.0);
        assert!((t.su_common[k] - common).abs() < 1e-10);
        assert!((t.su_private[k] - private).abs() < 1e-10);
    }
    for k in 0..2 {
        let h = column(&ch.h, k);
        let z = column(&ch.z, k);
        let sat: f64 = (0..3).map(|i| quad(&z, &column(&w, i))).sum();
        let g: Vec<f64> = (0..3).map(|j| quad(&h, &column(&p, j))).collect();
        let common = g[0] / (g[1] + g[2] + sat + 1.0);
        let private = g[1 + k] / (g[2 - k] + sat + 1.0);
        assert!((t.cu_common[k] - common).abs() < 1e-10);
        assert!((t.cu_private[k] - private).abs() < 1e-10);
    }
}

#[test]
fn cooperative_sinrs_match_elementwise_oracle() {
    let ch = toy_channels(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = random_matrix(5, 5, &mut rng);
    let bf = BeamformerSet::Cooperative { v: v.clone(), n_s: 2 };
    let t = cooperative_sinrs(&ch, &bf, 1.0).unwrap();
    for k in 0..4 {
        let mut f = column(&ch.f, k);
        f.extend([C64::new(0.0, 0.0); 3]);
        let g: Vec<f64> = (0..5).map(|i| quad(&f, &column(&v, i))).collect();
        let own = g[1 + ch.group_map[k]];
        let interference: f64 = g[1..].iter().sum();
        assert!((t.su_common[k] - g[0] / (interference + 1.0)).abs() < 1e-10);
        assert!((t.su_private[k] - own / (interference - own + 1.0)).abs() < 1e-10);
    }
    for k in 0..2 {
        let mut agg = column(&ch.z, k);
        agg.extend(column(&ch.h, k));
        let g: Vec<f64> = (0..5).map(|i| quad(&agg, &column(&v, i))).collect();
        let own = g[3 + k];
        let interference: f64 = g[1..].iter().sum();
        assert!((t.cu_common[k] - g[0] / (interference + 1.0)).abs() < 1e-10);
        assert!((t.cu_private[k] - own / (interference - own + 1.0)).abs() < 1e-10);
    }
}

#[test]
fn zero_beamformers_give_zero_rates() {
    let ch = toy_channels(5);
    let bf = BeamformerSet::zeros(Scheme::Coordinated, 2, 3, 2);
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    assert!(t.su_common.iter().chain(&t.cu_private).all(|&g| g == 0.0));
    let r = rsma_rates(&t, &CommonRatePortions::zeros(PortionPool::Separate, 2, 2), &ch.group_map);
    assert_eq!(mmf_objective(&r), 0.0);
}

#[test]
fn single_cu_without_interference() {
    let h = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.5), C64::new(-0.2, 0.3)]);
    let ch = ChannelSet::from_matrices(CMatrix::zeros(1, 1), CMatrix::zeros(1, 1), h.clone(), vec![0]).unwrap();
    let mut p = CMatrix::zeros(2, 2);
    p[(0, 1)] = C64::new(0.7, 0.0);
    p[(1, 1)] = C64::new(0.0, -0.4);
    let bf = BeamformerSet::Coordinated { w: CMatrix::zeros(1, 2), p: p.clone() };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    let expected = quad(&column(&h, 0), &column(&p, 1));
    assert!((t.cu_private[0] - expected).abs() < 1e-14);
}

#[test]
fn cooperative_with_zero_bs_rows_collapses_to_satellite_terms() {
    let ch = toy_channels(6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut v = random_matrix(5, 5, &mut rng);
    for r in 2..5 {
        for c in 0..5 {
            v[(r, c)] = C64::new(0.0, 0.0);
        }
    }
    let t = cooperative_sinrs(&ch, &BeamformerSet::Cooperative { v: v.clone(), n_s: 2 }, 1.0).unwrap();
    for k in 0..2 {
        let z = column(&ch.z, k);
        let g: Vec<f64> = (0..5).map(|i| quad(&z, &column(&v.rows(0, 2).into_owned(), i))).collect();
        let s: f64 = g[1..].iter().sum();
        assert!((t.cu_common[k] - g[0] / (s + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn matched_common_stream_at_single_cu() {
    let z = CMatrix::from_row_slice(1, 1, &[C64::new(0.3, 0.1)]);
    let h = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
    let ch = ChannelSet::from_matrices(CMatrix::zeros(1, 1), z.clone(), h.clone(), vec![0]).unwrap();
    let mut g = CMatrix::zeros(3, 1);
    g[(0, 0)] = z[(0, 0)];
    g[(1, 0)] = h[(0, 0)];
    g[(2, 0)] = h[(1, 0)];
    let mut v = CMatrix::zeros(3, 3);
    let scale = 1.5;
    for r in 0..3 {
        v[(r, 0)] = g[(r, 0)] * C64::from(scale);
    }
    let t = cooperative_sinrs(&ch, &BeamformerSet::Cooperative { v, n_s: 1 }, 1.0).unwrap();
    let gn = g.norm_squared();
    assert!((t.cu_common[0] - gn * gn * scale * scale).abs() < 1e-12);
}

#[test]
fn rsma_with_zero_portions_equals_sdma() {
    let ch = toy_channels(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut w = random_matrix(2, 3, &mut rng);
    let mut p = random_matrix(3, 3, &mut rng);
    for r in 0..2 {
        w[(r, 0)] = C64::new(0.0, 0.0);
    }
    for r in 0..3 {
        p[(r, 0)] = C64::new(0.0, 0.0);
    }
    let bf = BeamformerSet::Coordinated { w, p };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    let r = rsma_rates(&t, &CommonRatePortions::zeros(PortionPool::Separate, 2, 2), &ch.group_map);
    let sdma = DecodeLayout::new(&ch, Scheme::Coordinated, TransmitStrategy::uniform(Access::Sdma)).unwrap();
    let e = sdma.evaluate(&bf.to_global(), 1.0);
    assert_eq!(r.beam_totals, e.user_totals[..2].to_vec());
    assert_eq!(r.cu_totals, e.user_totals[2..].to_vec());
    assert!(r.violations.is_empty());
}

#[test]
fn infeasible_portions_are_flagged_not_clipped() {
    let ch = toy_channels(10);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bf = BeamformerSet::Coordinated { w: random_matrix(2, 3, &mut rng), p: random_matrix(3, 3, &mut rng) };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    let mut c = CommonRatePortions::zeros(PortionPool::Separate, 2, 2);
    c.sat[0] = 100.0;
    let r = rsma_rates(&t, &c, &ch.group_map);
    assert_eq!(r.violations.len(), 1);
    assert!(r.beam_totals[0] > 100.0);
}

#[test]
fn symmetric_beams_get_identical_totals() {
    let f = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.2, 0.0), C64::new(0.2, 0.0), C64::new(1.0, 0.0)]);
    let ch = ChannelSet::from_matrices(f, CMatrix::zeros(2, 0), CMatrix::zeros(1, 0), vec![0, 1]).unwrap();
    let w = CMatrix::from_row_slice(2, 3, &[C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let bf = BeamformerSet::Coordinated { w, p: CMatrix::zeros(1, 1) };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    let c = optimal_portions(&t, &ch.group_map, 2, PortionPool::Separate);
    let r = rsma_rates(&t, &c, &ch.group_map);
    assert!((r.beam_totals[0] - r.beam_totals[1]).abs() < 1e-12);
}

#[test]
fn water_fill_levels() {
    let c = water_fill(&[1.0, 3.0, 2.0], 2.0);
    // Level 2.5 tops up the two weakest users.
    assert!((c[0] - 1.5).abs() < 1e-12 && c[1] == 0.0 && (c[2] - 0.5).abs() < 1e-12);
    let c = water_fill(&[1.0, 1.0], 10.0);
    assert!((c[0] - 5.0).abs() < 1e-12);
    assert_eq!(water_fill(&[1.0], 0.0), vec![0.0]);
}

#[test]
fn mmf_matches_sort_oracle() {
    let cfg = ChannelConfig::reference();
    let ch = sample_channel_set(&cfg, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let bf = BeamformerSet::Coordinated { w: random_matrix(3, 4, &mut rng), p: random_matrix(16, 5, &mut rng) };
    let t = coordinated_sinrs(&ch, &bf, 1.0).unwrap();
    let c = optimal_portions(&t, &ch.group_map, 3, PortionPool::Separate);
    let r = rsma_rates(&t, &c, &ch.group_map);
    let mut all: Vec<f64> = r.beam_totals.iter().chain(&r.cu_totals).copied().collect();
    all.sort_by(f64::total_cmp);
    assert_eq!(mmf_objective(&r), all[0]);
    let eq = RateVector { beam_totals: vec![0.7; 3], cu_totals: vec![0.7; 2], ..Default::default() };
    assert_eq!(mmf_objective(&eq), 0.7);
    let z = RateVector { beam_totals: vec![0.7, 0.0], cu_totals: vec![1.0], ..Default::default() };
    assert_eq!(mmf_objective(&z), 0.0);
}

#[test]
fn layout_matches_closed_forms_for_rsma() {
    let cfg = ChannelConfig::reference();
    let ch = sample_channel_set(&cfg, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for scheme in [Scheme::Coordinated, Scheme::Cooperative] {
        let bf = match scheme {
            Scheme::Coordinated => BeamformerSet::Coordinated { w: random_matrix(3, 4, &mut rng), p: random_matrix(16, 5, &mut rng) },
            Scheme::Cooperative => BeamformerSet::Cooperative { v: random_matrix(19, 8, &mut rng), n_s: 3 },
        };
        let t = sinrs(&ch, &bf, 1.0).unwrap();
        let pool = if scheme == Scheme::Coordinated { PortionPool::Separate } else { PortionPool::Joint };
        let c = optimal_portions(&t, &ch.group_map, 3, pool);
        let r = rsma_rates(&t, &c, &ch.group_map);
        assert!(r.violations.is_empty());
        let layout = DecodeLayout::new(&ch, scheme, TransmitStrategy::uniform(Access::Rsma)).unwrap();
        let e = layout.evaluate(&bf.to_global(), 1.0);
        assert!((e.mmf - mmf_objective(&r)).abs() < 1e-12, "{scheme:?}");
    }
}

#[test]
fn cooperative_with_separate_messages_reproduces_coordinated_su_sinrs() {
    let ch = toy_channels(14);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let w = random_matrix(2, 3, &mut rng);
    let p = random_matrix(3, 3, &mut rng);
    let coord = BeamformerSet::Coordinated { w: w.clone(), p: p.clone() };
    // Satellite common on satellite rows only; BS columns on BS rows only.
    let mut v = CMatrix::zeros(5, 5);
    for r in 0..2 {
        for c in 0..3 {
            v[(r, c)] = w[(r, c)];
        }
    }
    for r in 0..3 {
        for j in 0..2 {
            v[(2 + r, 3 + j)] = p[(r, 1 + j)];
        }
    }
    let coop = BeamformerSet::Cooperative { v, n_s: 2 };
    let a = coordinated_sinrs(&ch, &coord, 1.0).unwrap();
    let b = cooperative_sinrs(&ch, &coop, 1.0).unwrap();
    for k in 0..4 {
        assert!((a.su_common[k] - b.su_common[k]).abs() < 1e-12);
        assert!((a.su_private[k] - b.su_private[k]).abs() < 1e-12);
    }
}

#[test]
fn interference_monotonicity() {
    let ch = toy_channels(16);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let w = random_matrix(2, 3, &mut rng);
    let p = random_matrix(3, 3, &mut rng);
    let base = coordinated_sinrs(&ch, &BeamformerSet::Coordinated { w: w.clone(), p: p.clone() }, 1.0).unwrap();
    let mut p2 = p.clone();
    for r in 0..3 {
        p2[(r, 2)] *= C64::from(3.0);
    }
    let louder = coordinated_sinrs(&ch, &BeamformerSet::Coordinated { w, p: p2 }, 1.0).unwrap();
    assert!(louder.cu_private[0] <= base.cu_private[0]);
    assert!(louder.cu_common[0] <= base.cu_common[0]);
}

/// Two scalar users on one BS antenna with degraded channels |h1| < |h2|.
#[test]
fn two_user_noma_matches_superposition_coding() {
    let h = CMatrix::from_row_slice(1, 2, &[C64::new(0.5, 0.0), C64::new(2.0, 0.0)]);
    let ch = ChannelSet::from_matrices(CMatrix::zeros(1, 1), CMatrix::zeros(1, 2), h, vec![0]).unwrap();
    let (p1, p2) = (3.0f64, 1.0f64);
    let mut p = CMatrix::zeros(1, 3);
    p[(0, 1)] = C64::from(p1.sqrt());
    p[(0, 2)] = C64::from(p2.sqrt());
    let bf = BeamformerSet::Coordinated { w: CMatrix::zeros(1, 2), p };
    let order = NomaOrder { satellite: vec![0], terrestrial: vec![0, 1] };
    let r = noma_rates(&ch, &bf, &order, 1.0).unwrap();
    let (g1, g2) = (0.25, 4.0);
    let r1 = log2_1p(p1 * g1 / (p2 * g1 + 1.0)).min(log2_1p(p1 * g2 / (p2 * g2 + 1.0)));
    let r2 = log2_1p(p2 * g2);
    assert!((r.cu_totals[0] - r1).abs() < 1e-12);
    assert!((r.cu_totals[1] - r2).abs() < 1e-12);

    // Silencing stream 2 leaves stream 1 limited by the weaker decoder.
    let mut p = CMatrix::zeros(1, 3);
    p[(0, 1)] = C64::from(p1.sqrt());
    let bf = BeamformerSet::Coordinated { w: CMatrix::zeros(1, 2), p };
    let r = noma_rates(&ch, &bf, &order, 1.0).unwrap();
    assert!((r.cu_totals[0] - log2_1p(p1 * g1)).abs() < 1e-12);
}

#[test]
fn single_user_noma_is_interference_free() {
    let h = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let ch = ChannelSet::from_matrices(CMatrix::zeros(1, 1), CMatrix::zeros(1, 1), h, vec![0]).unwrap();
    let mut p = CMatrix::zeros(2, 2);
    p[(0, 1)] = C64::from(1.0);
    let bf = BeamformerSet::Coordinated { w: CMatrix::zeros(1, 2), p };
    let r = noma_rates(&ch, &bf, &NomaOrder { satellite: vec![0], terrestrial: vec![0] }, 1.0).unwrap();
    assert!((r.cu_totals[0] - 1.0).abs() < 1e-12);
}

#[test]
fn noma_order_must_be_a_permutation() {
    let ch = toy_channels(18);
    let bf = BeamformerSet::zeros(Scheme::Coordinated, 2, 3, 2);
    let bad = NomaOrder { satellite: vec![0, 0], terrestrial: vec![0, 1] };
    assert!(noma_rates(&ch, &bf, &bad, 1.0).is_err());
}

#[test]
fn satellite_noma_order_ascends_by_weakest_member() {
    let cfg = ChannelConfig::reference();
    let ch = sample_channel_set(&cfg, 21).unwrap();
    let o = NomaOrder::from_channels(&ch);
    let weakest = |n: usize| ch.beam_members(n).iter().map(|&k| ch.f.column(k).norm()).fold(f64::INFINITY, f64::min);
    for w in o.satellite.windows(2) {
        assert!(weakest(w[0]) <= weakest(w[1]));
    }
    for w in o.terrestrial.windows(2) {
        assert!(ch.h.column(w[0]).norm() <= ch.h.column(w[1]).norm());
    }
}

#[test]
fn cooperative_noma_is_rejected() {
    let ch = toy_channels(19);
    assert!(DecodeLayout::new(&ch, Scheme::Cooperative, TransmitStrategy::uniform(Access::Noma)).is_err());
}
