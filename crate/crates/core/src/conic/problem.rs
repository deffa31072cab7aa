use serde::{Deserialize, Serialize};

use super::expr::AffineExpr;
use crate::linalg::{CMatrix, CVector};
use crate::{Error, Result, C64};

/// Shape of a declared variable block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Scalar,
    /// Complex vector of the given length, stored as interleaved (re, im).
    ComplexVector(usize),
    /// Hermitian `n x n` matrix: `n` real diagonal entries followed by
    /// (re, im) of each strictly upper entry in row-major order.
    Hermitian { n: usize, psd: bool },
}

impl VarKind {
    pub fn scalar_count(&self) -> usize {
        match *self {
            VarKind::Scalar => 1,
            VarKind::ComplexVector(len) => 2 * len,
            VarKind::Hermitian { n, .. } => n * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub offset: usize,
}

/// Index of a declared variable block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarVar(pub usize);

impl ScalarVar {
    pub fn expr(self) -> AffineExpr {
        AffineExpr::var(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexVecVar {
    pub offset: usize,
    pub len: usize,
}

impl ComplexVecVar {
    pub fn re(&self, i: usize) -> usize {
        self.offset + 2 * i
    }
    pub fn im(&self, i: usize) -> usize {
        self.offset + 2 * i + 1
    }

    /// `(Re, Im)` of `c^H x`.
    pub fn inner(&self, c: &CVector) -> (AffineExpr, AffineExpr) {
        let mut re = AffineExpr::zero();
        let mut im = AffineExpr::zero();
        for (i, ci) in c.iter().enumerate() {
            re.add_term(self.re(i), ci.re).add_term(self.im(i), ci.im);
            im.add_term(self.im(i), ci.re).add_term(self.re(i), -ci.im);
        }
        (re, im)
    }

    /// Real parts then imaginary parts of every entry.
    pub fn components(&self) -> Vec<AffineExpr> {
        (0..self.len)
            .flat_map(|i| [AffineExpr::var(self.re(i)), AffineExpr::var(self.im(i))])
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> CVector {
        CVector::from_iterator(self.len, (0..self.len).map(|i| C64::new(x[self.re(i)], x[self.im(i)])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianVar {
    pub id: VarId,
    pub offset: usize,
    pub n: usize,
}

impl HermitianVar {
    pub fn diag(&self, i: usize) -> usize {
        self.offset + i
    }

    fn upper_slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        // Position of (i, j) among strictly upper entries in row-major order.
        let before = i * self.n - i * (i + 1) / 2;
        self.offset + self.n + 2 * (before + (j - i - 1))
    }

    /// Scalar indices and signs expressing `(Re X_ij, Im X_ij)`.
    pub fn entry(&self, i: usize, j: usize) -> (AffineExpr, AffineExpr) {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => (AffineExpr::var(self.diag(i)), AffineExpr::zero()),
            Less => {
                let s = self.upper_slot(i, j);
                (AffineExpr::var(s), AffineExpr::var(s + 1))
            }
            Greater => {
                let s = self.upper_slot(j, i);
                (AffineExpr::var(s), AffineExpr::term(s + 1, -1.0))
            }
        }
    }

    /// `Re tr(A X)`.
    pub fn trace_product(&self, a: &CMatrix) -> AffineExpr {
        let mut e = AffineExpr::zero();
        for i in 0..self.n {
            e.add_term(self.diag(i), a[(i, i)].re);
            for j in i + 1..self.n {
                let s = self.upper_slot(i, j);
                e.add_term(s, a[(i, j)].re + a[(j, i)].re);
                e.add_term(s + 1, a[(i, j)].im - a[(j, i)].im);
            }
        }
        e
    }

    pub fn trace(&self) -> AffineExpr {
        let mut e = AffineExpr::zero();
        for i in 0..self.n {
            e.add_term(self.diag(i), 1.0);
        }
        e
    }

    pub fn value(&self, x: &[f64]) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| {
            let (re, im) = self.entry(i, j);
            C64::new(re.eval(x), im.eval(x))
        })
    }
}

/// One constraint of the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    /// `expr == 0`.
    LinearEq(AffineExpr),
    /// `expr >= 0`.
    LinearIneq(AffineExpr),
    /// `||vector|| <= bound`.
    SecondOrderCone { bound: AffineExpr, vector: Vec<AffineExpr> },
    /// The referenced Hermitian block is PSD.
    Psd(VarId),
}

/// Linear objective (maximized) over declared variables and cone constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProblem {
    pub(crate) vars: Vec<VarDecl>,
    pub(crate) n_scalars: usize,
    pub objective: AffineExpr,
    pub constraints: Vec<Constraint>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn n_scalars(&self) -> usize {
        self.n_scalars
    }

    fn declare(&mut self, name: &str, kind: VarKind) -> (VarId, usize) {
        let offset = self.n_scalars;
        self.n_scalars += kind.scalar_count();
        self.vars.push(VarDecl {
            name: name.to_string(),
            kind,
            offset,
        });
        (VarId(self.vars.len() - 1), offset)
    }

    pub fn scalar(&mut self, name: &str) -> ScalarVar {
        ScalarVar(self.declare(name, VarKind::Scalar).1)
    }

    pub fn complex_vector(&mut self, name: &str, len: usize) -> ComplexVecVar {
        let (_, offset) = self.declare(name, VarKind::ComplexVector(len));
        ComplexVecVar { offset, len }
    }

    /// Hermitian matrix, PSD-constrained when `psd` is set.
    pub fn hermitian(&mut self, name: &str, n: usize, psd: bool) -> HermitianVar {
        let (id, offset) = self.declare(name, VarKind::Hermitian { n, psd });
        if psd {
            self.constraints.push(Constraint::Psd(id));
        }
        HermitianVar { id, offset, n }
    }

    pub fn hermitian_handle(&self, id: VarId) -> Option<HermitianVar> {
        match self.vars.get(id.0)? {
            VarDecl {
                kind: VarKind::Hermitian { n, .. },
                offset,
                ..
            } => Some(HermitianVar { id, offset: *offset, n: *n }),
            _ => None,
        }
    }

    pub fn maximize(&mut self, objective: AffineExpr) {
        self.objective = objective;
    }

    /// `e == 0`.
    pub fn eq0(&mut self, e: AffineExpr) {
        self.constraints.push(Constraint::LinearEq(e));
    }

    /// `e >= 0`.
    pub fn ge0(&mut self, e: AffineExpr) {
        self.constraints.push(Constraint::LinearIneq(e));
    }

    /// `lhs >= rhs`.
    pub fn ge(&mut self, lhs: AffineExpr, rhs: AffineExpr) {
        self.ge0(lhs - rhs);
    }

    pub fn soc(&mut self, bound: AffineExpr, vector: Vec<AffineExpr>) {
        self.constraints.push(Constraint::SecondOrderCone { bound, vector });
    }

    /// `sum_i e_i^2 <= bound` as the rotated cone
    /// `||[e; (bound - 1)/2]|| <= (bound + 1)/2`.
    pub fn squared_norm_le(&mut self, mut items: Vec<AffineExpr>, bound: AffineExpr) {
        items.push((bound.clone() - 1.0) * 0.5);
        self.soc((bound + 1.0) * 0.5, items);
    }

    /// `x * y >= w^2` with `x, y >= 0`, as `||[x - y, 2w]|| <= x + y`.
    pub fn hyperbolic(&mut self, x: AffineExpr, y: AffineExpr, w: AffineExpr) {
        self.soc(x.clone() + y.clone(), vec![x - y, w * 2.0]);
    }

    /// Check that every constraint refers to declared scalars and PSD tags are respected.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_scalars;
        let check = |e: &AffineExpr, what: &str| -> Result<()> {
            if let Some(i) = e.max_index() {
                if i >= n {
                    return Err(Error::MalformedProblem(format!(
                        "{what} references scalar {i} but only {n} are declared"
                    )));
                }
            }
            if !e.constant.is_finite() || e.terms.iter().any(|t| !t.1.is_finite()) {
                return Err(Error::MalformedProblem(format!("{what} has a non-finite coefficient")));
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (k, c) in self.constraints.iter().enumerate() {
            let what = format!("constraint {k}");
            match c {
                Constraint::LinearEq(e) | Constraint::LinearIneq(e) => check(e, &what)?,
                Constraint::SecondOrderCone { bound, vector } => {
                    check(bound, &what)?;
                    for v in vector {
                        check(v, &what)?;
                    }
                }
                Constraint::Psd(id) => match self.vars.get(id.0).map(|d| d.kind) {
                    Some(VarKind::Hermitian { psd: true, .. }) => {}
                    _ => {
                        return Err(Error::MalformedProblem(format!(
                            "{what} applies PSD to a variable not tagged Hermitian PSD"
                        )))
                    }
                },
            }
        }
        Ok(())
    }

    /// Worst relative violation of any constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let v = match c {
                Constraint::LinearEq(e) => e.eval(x).abs() / (1.0 + e.magnitude(x)),
                Constraint::LinearIneq(e) => (-e.eval(x)).max(0.0) / (1.0 + e.magnitude(x)),
                Constraint::SecondOrderCone { bound, vector } => {
                    let t = bound.eval(x);
                    let norm = vector.iter().map(|e| e.eval(x).powi(2)).sum::<f64>().sqrt();
                    (norm - t).max(0.0) / (1.0 + t.abs().max(norm))
                }
                Constraint::Psd(id) => {
                    let h = self.hermitian_handle(*id).expect("validated PSD target");
                    let m = h.value(x);
                    let lmin = crate::linalg::min_eigenvalue(&m);
                    (-lmin).max(0.0) / (1.0 + crate::linalg::trace_re(&m).abs())
                }
            };
            worst = worst.max(v);
        }
        worst
    }
}
