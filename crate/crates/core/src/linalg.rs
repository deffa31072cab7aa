//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

/// Row-major `(re, im)` record of a complex matrix, used for JSON dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl ComplexMatrixRecord {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "record declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| C64::new(re, im)),
        ))
    }
}

/// Row-major record of a real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealMatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RealMatrixRecord {
    pub fn from_matrix(m: &RMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<RMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "record declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(RMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

/// `v v^H`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `a^H b`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `|a^H b|^2`.
pub fn gain(a: &CVector, b: &CVector) -> f64 {
    inner(a, b).norm_sqr()
}

/// Hermitian part `(X + X^H) / 2`.
pub fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()).scale(0.5)
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
pub fn principal_eigenpair(x: &CMatrix) -> (f64, CVector) {
    let n = x.nrows();
    if n == 0 {
        return (0.0, CVector::zeros(0));
    }
    let eig = hermitian_part(x).symmetric_eigen();
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    (lambda, eig.eigenvectors.column(idx).into_owned())
}

/// Smallest eigenvalue of a Hermitian matrix (0 for an empty matrix).
pub fn min_eigenvalue(x: &CMatrix) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    hermitian_part(x)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Real trace of a (Hermitian) matrix.
pub fn trace_re(x: &CMatrix) -> f64 {
    (0..x.nrows()).map(|i| x[(i, i)].re).sum()
}

/// `Re tr(A B)`.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Orthonormal basis of the column space of `m` (numerical rank by `tol`
/// relative to the largest singular value).
pub fn column_space_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * smax)
        .map(|(i, _)| i)
        .collect();
    let mut basis = CMatrix::zeros(rows, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        basis.set_column(j, &u.column(i));
    }
    basis
}

/// `log2(1 + x)` that stays accurate for tiny `x` and clamps negatives to 0.
pub fn log2_1p(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.ln_1p() / std::f64::consts::LN_2
    }
}
