//! Beam-center lattice and user drops.
//!
//! Directions are unit vectors seen from the satellite with nadir along
//! `+z`. A point in the "angular plane" `(x, y)` (degrees) maps to the
//! direction `normalize(tan x, tan y, 1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A receiver as seen from the satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    /// Unit direction from the satellite.
    pub direction: [f64; 3],
    /// Slant range in meters.
    pub distance_m: f64,
}

/// Parameters for placing users relative to the beam lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DropConfig {
    /// SU footprint radius in units of the 3 dB angle.
    pub su_radius: f64,
    /// Offset of the BS from beam 0's center toward beam 1, in 3 dB angles.
    pub bs_offset: f64,
    /// CU scatter radius around the BS, in 3 dB angles.
    pub cu_radius: f64,
    /// Vertical departure-angle range at the BS, degrees.
    pub cu_theta_deg: (f64, f64),
    /// Horizontal departure-angle range at the BS, degrees.
    pub cu_phi_deg: (f64, f64),
}

impl Default for DropConfig {
    fn default() -> Self {
        Self {
            su_radius: 1.0,
            bs_offset: 0.5,
            cu_radius: 0.01,
            cu_theta_deg: (60.0, 120.0),
            cu_phi_deg: (0.0, 360.0),
        }
    }
}

pub fn direction_from_offset(x_deg: f64, y_deg: f64) -> [f64; 3] {
    let v = [x_deg.to_radians().tan(), y_deg.to_radians().tan(), 1.0];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Inverse of [`direction_from_offset`].
pub fn offset_from_direction(d: &[f64; 3]) -> (f64, f64) {
    ((d[0] / d[2]).atan().to_degrees(), (d[1] / d[2]).atan().to_degrees())
}

/// Angle between two directions in degrees, accurate for tiny separations.
pub fn angle_between_deg(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let c = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    c.atan2(d).to_degrees()
}

/// The `n` lattice points closest to nadir on a hexagonal grid with
/// neighbor spacing `2 * three_db_deg`, ordered by distance then azimuth.
pub fn hex_beam_centers(n: usize, three_db_deg: f64) -> Vec<[f64; 3]> {
    let spacing = 2.0 * three_db_deg;
    let reach = (n as f64).sqrt().ceil() as i64 + 2;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            let x = spacing * (i as f64 + 0.5 * j as f64);
            let y = spacing * (3f64.sqrt() / 2.0 * j as f64);
            pts.push((x, y));
        }
    }
    let key = |&(x, y): &(f64, f64)| {
        let r = ((x * x + y * y).sqrt() / spacing * 1e6).round() as i64;
        let mut az = y.atan2(x);
        if az < -1e-12 {
            az += std::f64::consts::TAU;
        }
        (r, (az * 1e9).round() as i64)
    };
    pts.sort_by_key(key);
    pts.into_iter()
        .take(n)
        .map(|(x, y)| direction_from_offset(x, y))
        .collect()
}

/// Uniform draw in a disc of radius `radius_deg` around `center`.
fn uniform_in_disc<R: Rng + ?Sized>(center: &[f64; 3], radius_deg: f64, rng: &mut R) -> [f64; 3] {
    let (cx, cy) = offset_from_direction(center);
    let r = radius_deg * rng.random::<f64>().sqrt();
    let a = std::f64::consts::TAU * rng.random::<f64>();
    direction_from_offset(cx + r * a.cos(), cy + r * a.sin())
}

/// Beam membership of each SU: `rho` consecutive users per beam.
pub fn group_map(n_beams: usize, users_per_beam: usize) -> Vec<usize> {
    (0..n_beams * users_per_beam).map(|k| k / users_per_beam).collect()
}

/// Drop `users_per_beam` SUs uniformly in each beam's footprint.
pub fn drop_satellite_users<R: Rng + ?Sized>(
    beam_centers: &[[f64; 3]],
    users_per_beam: usize,
    three_db_deg: f64,
    distance_m: f64,
    drop: &DropConfig,
    rng: &mut R,
) -> Vec<UserPosition> {
    let mut out = Vec::with_capacity(beam_centers.len() * users_per_beam);
    for c in beam_centers {
        for _ in 0..users_per_beam {
            out.push(UserPosition {
                direction: uniform_in_disc(c, drop.su_radius * three_db_deg, rng),
                distance_m,
            });
        }
    }
    out
}

/// Direction of the BS cell inside the satellite footprint.
pub fn bs_direction(beam_centers: &[[f64; 3]], three_db_deg: f64, drop: &DropConfig) -> [f64; 3] {
    let (x0, y0) = offset_from_direction(&beam_centers[0]);
    let (dx, dy) = match beam_centers.get(1) {
        Some(b) => {
            let (x1, y1) = offset_from_direction(b);
            let n = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            ((x1 - x0) / n, (y1 - y0) / n)
        }
        None => (1.0, 0.0),
    };
    let s = drop.bs_offset * three_db_deg;
    direction_from_offset(x0 + s * dx, y0 + s * dy)
}

/// Drop `count` CUs around the BS cell.
pub fn drop_cellular_users<R: Rng + ?Sized>(
    beam_centers: &[[f64; 3]],
    count: usize,
    three_db_deg: f64,
    distance_m: f64,
    drop: &DropConfig,
    rng: &mut R,
) -> Vec<UserPosition> {
    let bs = bs_direction(beam_centers, three_db_deg, drop);
    (0..count)
        .map(|_| UserPosition {
            direction: uniform_in_disc(&bs, drop.cu_radius * three_db_deg, rng),
            distance_m,
        })
        .collect()
}

/// Per-user, per-path departure angles `(theta, phi)` in degrees.
pub fn draw_path_angles<R: Rng + ?Sized>(
    users: usize,
    paths: usize,
    drop: &DropConfig,
    rng: &mut R,
) -> Vec<Vec<(f64, f64)>> {
    let (t0, t1) = drop.cu_theta_deg;
    let (p0, p1) = drop.cu_phi_deg;
    (0..users)
        .map(|_| {
            (0..paths)
                .map(|_| {
                    let t = t0 + (t1 - t0) * rng.random::<f64>();
                    let p = p0 + (p1 - p0) * rng.random::<f64>();
                    (t, p)
                })
                .collect()
        })
        .collect()
}

impl DropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.su_radius >= 0.0 && self.cu_radius >= 0.0 && self.bs_offset.is_finite()) {
            return Err(Error::InvalidConfig("drop radii must be nonnegative".into()));
        }
        if self.cu_theta_deg.0 > self.cu_theta_deg.1 || self.cu_phi_deg.0 > self.cu_phi_deg.1 {
            return Err(Error::InvalidConfig("angle ranges must be ordered".into()));
        }
        Ok(())
    }
}
