//! First-order bounds used to convexify SINR and rate constraints.

use crate::conic::{AffineExpr, ComplexVecVar, ConicProblem, ScalarVar};
use crate::linalg::{inner, CVector};
use crate::{Error, Result, C64};

/// Affine minorant of the quadratic-over-linear map `(p, a) -> |h^H p|^2 / a`
/// around `(p0, a0)`:
/// `2 Re(p0^H h h^H p) / a0 - |h^H p0|^2 / a0^2 * a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorBound {
    /// `h (h^H p0) * 2 / a0`, so the first term is `Re(c^H p)`.
    pub linear: CVector,
    /// `|h^H p0|^2 / a0^2`.
    pub aux_coef: f64,
}

pub fn taylor_qol_lower_bound(h: &CVector, p0: &CVector, a0: f64) -> Result<TaylorBound> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "expansion point of the auxiliary variable must be positive, got {a0}"
        )));
    }
    let s0 = inner(h, p0);
    Ok(TaylorBound {
        linear: h * (s0 * C64::from(2.0 / a0)),
        aux_coef: s0.norm_sqr() / (a0 * a0),
    })
}

impl TaylorBound {
    pub fn eval(&self, p: &CVector, a: f64) -> f64 {
        inner(&self.linear, p).re - self.aux_coef * a
    }

    /// The bound as an affine expression of a precoder block and an auxiliary scalar.
    pub fn expr(&self, p: &ComplexVecVar, a: ScalarVar) -> AffineExpr {
        let (re, _) = p.inner(&self.linear);
        re - a.expr() * self.aux_coef
    }
}

/// Tangent data `(v, u)` for the bound `alpha ln2 <= v - u / a` on `ln(1 + a)`,
/// exact at `a = a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocLog {
    pub v: f64,
    pub u: f64,
}

pub fn soc_log_constraint(a0: f64) -> SocLog {
    let a0 = a0.max(0.0);
    SocLog {
        v: a0 / (a0 + 1.0) + a0.ln_1p(),
        u: a0 * a0 / (a0 + 1.0),
    }
}

impl SocLog {
    /// Add `||[a + alpha ln2 - v, 2 sqrt(u)]|| <= a - alpha ln2 + v`.
    pub fn add_to(&self, problem: &mut ConicProblem, a: &AffineExpr, alpha_bits: &AffineExpr) {
        let ln2 = std::f64::consts::LN_2;
        let lhs = a.clone() + alpha_bits.clone() * ln2 - self.v;
        let bound = a.clone() - alpha_bits.clone() * ln2 + self.v;
        problem.soc(bound, vec![lhs, AffineExpr::constant(2.0 * self.u.sqrt())]);
    }

    /// Largest rate (bits) the cone admits at auxiliary value `a`.
    pub fn max_rate_bits(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return if self.u > 0.0 { f64::NEG_INFINITY } else { 0.0 };
        }
        (self.v - self.u / a) / std::f64::consts::LN_2
    }

    /// Whether `(a, alpha)` satisfies the cone, with slack `tol`.
    pub fn contains(&self, a: f64, alpha_bits: f64, tol: f64) -> bool {
        let ln2 = std::f64::consts::LN_2;
        let x = a + alpha_bits * ln2 - self.v;
        let y = 2.0 * self.u.sqrt();
        (x * x + y * y).sqrt() <= a - alpha_bits * ln2 + self.v + tol
    }
}
