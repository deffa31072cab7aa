//! Joint beamforming for satellite-terrestrial integrated networks.
//!
//! A multibeam GEO satellite serves multicast satellite users (SUs) while a
//! terrestrial base station (BS) with a uniform planar array serves unicast
//! cellular users (CUs) in the same band. This crate provides:
//!
//! - [`channel_models`]: seeded satellite (Bessel beam pattern, free-space
//!   loss, rain fading, random phases) and terrestrial (UPA multipath)
//!   channel generation, plus phase-uncertainty correlation matrices.
//! - [`rate_model`]: SINRs and rates for the coordinated and cooperative
//!   integration schemes under RSMA, SDMA and NOMA.
//! - [`conic`]: a small modeling layer for linear, second-order cone and
//!   Hermitian PSD constraints, solved with Clarabel.
//! - [`sca`]: the perfect-CSIT successive convex approximation solver for
//!   max-min fair rates.
//! - [`robust`]: the expectation-based robust design under satellite phase
//!   uncertainty (SDP lift, rank-one penalty, eigenvector recovery).
//! - [`harness`]: scenario configuration, Monte Carlo sweeps, baselines and
//!   result files.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

// Validators write `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

// Links the system OpenBLAS backing the PSD cone factorizations.
use openblas_src as _;

pub mod channel_models;
pub mod conic;
mod error;
pub mod harness;
pub mod linalg;
pub mod rate_model;
pub mod report;
pub mod robust;
pub mod sca;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
