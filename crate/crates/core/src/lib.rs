//! Exact and inexact regularized alternating projections for nonconvex
//! feasibility problems, specialized to low-rank matrix completion.
//!
//! The layers, bottom up:
//!
//! * [`dense`]: row-major matrices, Frobenius geometry, seeded Gaussian data;
//! * [`lanczos`]: Golub–Kahan bidiagonalization with Ritz error bounds;
//! * [`sets`]: mask, rank and interval projections, including the
//!   certificate-driven inexact rank projection;
//! * [`solver`]: APM, RAPM and iRAPM drivers over any pair of sets;
//! * [`completion`]: problem generators, metrics, campaigns and plots.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod completion;
pub mod dense;
pub mod error;
pub mod lanczos;
pub mod sets;
pub mod solver;
pub mod svd;

pub use dense::{DenseMatrix, RngSpec};
pub use error::{Error, Result};
