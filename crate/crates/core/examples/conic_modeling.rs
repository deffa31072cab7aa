//! The conic layer on two textbook problems.
//!
//! 1. Maximize `Re(c^H x)` over the complex unit ball; the optimum is `|c|`.
//! 2. Maximize `tr(C X)` over Hermitian PSD `X` with unit trace; the optimum
//!    is the largest eigenvalue of `C`.
//!
//! Run with `cargo run --release --example conic_modeling`.

use stin::conic::{solve, ConicProblem, Tolerances};
use stin::linalg::{principal_eigenpair, CMatrix, CVector};
use stin::C64;

fn main() -> stin::Result<()> {
    let c = CVector::from_vec(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.3), C64::new(0.0, -1.0)]);
    let mut p = ConicProblem::new();
    let x = p.complex_vector("x", 3);
    let (re, _) = x.inner(&c);
    p.maximize(re);
    p.squared_norm_le(x.components(), stin::conic::AffineExpr::constant(1.0));
    let sol = solve(&p, &Tolerances::default())?;
    println!("unit-ball problem: {:?}, value {:.8}, expected {:.8}", sol.status, sol.objective, c.norm());

    let m = CMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, i as f64 - j as f64));
    let herm = (&m + m.adjoint()).scale(0.5);
    let mut q = ConicProblem::new();
    let big_x = q.hermitian("X", 3, true);
    q.maximize(big_x.trace_product(&herm));
    q.eq0(big_x.trace() - stin::conic::AffineExpr::constant(1.0));
    let sol = solve(&q, &Tolerances::default())?;
    let (lambda, _) = principal_eigenpair(&herm);
    println!("trace problem:     {:?}, value {:.8}, expected {:.8}", sol.status, sol.objective, lambda);
    println!("\nthe second problem in text form:\n{q}");
    Ok(())
}
