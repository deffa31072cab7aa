//! A small conic modeling layer.
//!
//! Problems are stated over real scalars, complex vectors and Hermitian
//! matrices with linear objectives and linear, second-order cone and PSD
//! constraints. [`solve`] lowers everything to real form (a Hermitian PSD
//! block `A + jB` becomes the symmetric block `[[A, -B], [B, A]]`) and hands
//! it to Clarabel. Every solution is re-checked against the original
//! constraints before it is reported optimal.

mod expr;
mod problem;
mod solver;
mod text;

pub use expr::{sum, AffineExpr};
pub use problem::{ComplexVecVar, ConicProblem, Constraint, HermitianVar, ScalarVar, VarDecl, VarId, VarKind};
pub use solver::{solve, ConicSolution, SolveStatus, Tolerances};
