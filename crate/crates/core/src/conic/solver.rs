use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use serde::{Deserialize, Serialize};

use super::expr::AffineExpr;
use super::problem::{ComplexVecVar, ConicProblem, Constraint, HermitianVar, ScalarVar};
use crate::linalg::{CMatrix, CVector};
use crate::{Error, Result};

/// Solver accuracy targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Maximum relative constraint violation accepted as feasible.
    pub feasibility: f64,
    /// Duality-gap tolerance handed to the interior-point method.
    pub gap: f64,
    pub max_iterations: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-6,
            gap: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Objective value at `x` (meaningful when optimal).
    pub objective: f64,
    /// Values of all real scalars.
    pub x: Vec<f64>,
    /// Worst relative constraint violation at `x`.
    pub primal_residual: f64,
    pub iterations: u32,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
    pub fn scalar(&self, v: ScalarVar) -> f64 {
        self.x[v.0]
    }
    pub fn vector(&self, v: &ComplexVecVar) -> CVector {
        v.value(&self.x)
    }
    pub fn matrix(&self, v: &HermitianVar) -> CMatrix {
        v.value(&self.x)
    }
    pub fn eval(&self, e: &AffineExpr) -> f64 {
        e.eval(&self.x)
    }
}

/// Triplet builder for `A x + s = b`.
#[derive(Default)]
struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    /// Append the row `s = e(x)`.
    fn push(&mut self, e: &AffineExpr) {
        let r = self.b.len();
        for &(j, c) in &e.terms {
            if c != 0.0 {
                self.i.push(r);
                self.j.push(j);
                self.v.push(-c);
            }
        }
        self.b.push(e.constant);
    }
}

/// Upper triangle, column-major, of the real embedding `[[A, -B], [B, A]]`
/// of `X = A + jB`, with off-diagonals scaled by `sqrt(2)`.
fn embedded_svec(h: &HermitianVar) -> Vec<AffineExpr> {
    let n = h.n;
    let r2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * (2 * n + 1));
    for q in 0..2 * n {
        for p in 0..=q {
            let e = if q < n {
                h.entry(p, q).0
            } else if p < n {
                -h.entry(p, q - n).1
            } else {
                h.entry(p - n, q - n).0
            };
            out.push(if p == q { e } else { e * r2 });
        }
    }
    out
}

/// Solve `problem` with Clarabel.
///
/// Only malformed problems produce an `Err`; solver trouble is reported in
/// the returned status.
pub fn solve(problem: &ConicProblem, tol: &Tolerances) -> Result<ConicSolution> {
    problem.validate()?;
    let n = problem.n_scalars();
    let mut zero = Rows::default();
    let mut nonneg = Rows::default();
    let mut cones_tail: Vec<(Vec<AffineExpr>, bool)> = Vec::new();
    for c in &problem.constraints {
        match c {
            Constraint::LinearEq(e) => zero.push(e),
            Constraint::LinearIneq(e) => nonneg.push(e),
            Constraint::SecondOrderCone { bound, vector } if vector.is_empty() => nonneg.push(bound),
            Constraint::SecondOrderCone { bound, vector } => {
                let mut rows = Vec::with_capacity(vector.len() + 1);
                rows.push(bound.clone());
                rows.extend(vector.iter().cloned());
                cones_tail.push((rows, false));
            }
            Constraint::Psd(id) => {
                let h = problem
                    .hermitian_handle(*id)
                    .ok_or_else(|| Error::MalformedProblem("PSD target is not Hermitian".into()))?;
                cones_tail.push((embedded_svec(&h), true));
            }
        }
    }

    let mut rows = Rows::default();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    for (block, cone) in [(zero, 0u8), (nonneg, 1u8)] {
        let m = block.b.len();
        if m == 0 {
            continue;
        }
        let base = rows.b.len();
        rows.i.extend(block.i.iter().map(|r| r + base));
        rows.j.extend(block.j);
        rows.v.extend(block.v);
        rows.b.extend(block.b);
        cones.push(if cone == 0 {
            SupportedConeT::ZeroConeT(m)
        } else {
            SupportedConeT::NonnegativeConeT(m)
        });
    }
    for (block, psd) in &cones_tail {
        for e in block {
            rows.push(e);
        }
        cones.push(if *psd {
            let dim = ((((8 * block.len() + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
            SupportedConeT::PSDTriangleConeT(dim)
        } else {
            SupportedConeT::SecondOrderConeT(block.len())
        });
    }

    let m = rows.b.len();
    let a = CscMatrix::new_from_triplets(m, n, rows.i, rows.j, rows.v);
    let p = CscMatrix::zeros((n, n));
    let mut q = vec![0.0; n];
    for &(j, c) in &problem.objective.terms {
        q[j] -= c;
    }
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(tol.max_iterations)
        .tol_feas(tol.feasibility * 1e-2)
        .tol_gap_abs(tol.gap)
        .tol_gap_rel(tol.gap)
        .build()
        .map_err(|e| Error::MalformedProblem(format!("solver settings: {e}")))?;
    let mut solver = DefaultSolver::new(&p, &q, &a, &rows.b, &cones, settings)
        .map_err(|e| Error::MalformedProblem(format!("solver setup: {e}")))?;
    solver.solve();

    let x = solver.solution.x.clone();
    let residual = if x.iter().all(|v| v.is_finite()) {
        problem.max_violation(&x)
    } else {
        f64::INFINITY
    };
    let status = match solver.solution.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved if residual <= tol.feasibility => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
        _ => SolveStatus::NumericalFailure,
    };
    Ok(ConicSolution {
        status,
        objective: problem.objective.eval(&x),
        x,
        primal_residual: residual,
        iterations: solver.solution.iterations,
    })
}
