//! Restriction of BS precoders to the span of the BS channels.
//!
//! Every rate depends on BS precoders only through `h_k^H p`, and any
//! component of `p` orthogonal to `span(h_1..h_Kt)` costs power without
//! reaching a CU. Optimizing over `p = U p~` with `U` an orthonormal basis
//! of that span therefore loses nothing and shrinks the BS block from `N_t`
//! to at most `K_t` rows.

use crate::channel_models::ChannelSet;
use crate::linalg::{column_space_basis, CMatrix};

/// Orthonormal basis (`N_t x r`) of the column space of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrestrialBasis {
    pub u: CMatrix,
}

const RANK_TOL: f64 = 1e-10;

impl TerrestrialBasis {
    pub fn of(ch: &ChannelSet) -> Self {
        Self {
            u: column_space_basis(&ch.h, RANK_TOL),
        }
    }

    /// Identity basis that leaves the BS block untouched.
    pub fn identity(n_t: usize) -> Self {
        Self {
            u: CMatrix::identity(n_t, n_t),
        }
    }

    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    /// Channels seen through the basis: `H~ = U^H H`.
    pub fn compress_channels(&self, ch: &ChannelSet) -> ChannelSet {
        let mut out = ch.clone();
        out.h = self.u.adjoint() * &ch.h;
        out
    }

    /// Map global precoders with `N_t` BS rows to the reduced coordinates.
    pub fn compress(&self, x: &CMatrix, n_s: usize) -> CMatrix {
        let n_t = self.u.nrows();
        let mut out = CMatrix::zeros(n_s + self.rank(), x.ncols());
        out.rows_mut(0, n_s).copy_from(&x.rows(0, n_s));
        out.rows_mut(n_s, self.rank())
            .copy_from(&(self.u.adjoint() * x.rows(n_s, n_t)));
        out
    }

    /// Inverse of [`compress`](Self::compress) on the reduced subspace.
    pub fn expand(&self, x: &CMatrix, n_s: usize) -> CMatrix {
        let n_t = self.u.nrows();
        let mut out = CMatrix::zeros(n_s + n_t, x.ncols());
        out.rows_mut(0, n_s).copy_from(&x.rows(0, n_s));
        out.rows_mut(n_s, n_t).copy_from(&(&self.u * x.rows(n_s, self.rank())));
        out
    }
}
