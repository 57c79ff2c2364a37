//! Autocovariance matrix estimation for stationary time series.
//!
//! Given a single realization `X_1, ..., X_T` of a mean-zero stationary
//! process, the plug-in sample autocovariance matrix is not operator-norm
//! consistent: its error grows like `log T`. This crate implements the
//! regularized estimators that are consistent, together with the spectral
//! machinery used to analyze them:
//!
//! - [`process`] — linear-process models (MA(∞) filters of Gaussian
//!   innovations) with exact autocovariances, spectral densities, physical
//!   dependence measures and seeded simulation;
//! - [`estimators`] — sample autocovariances and the plug-in, banded or
//!   tapered, and hard-thresholded Toeplitz matrix estimators, plus the
//!   deterministic bias bound for tapered estimates;
//! - [`spectral`] — periodogram, lag-window spectral estimates, certified
//!   maxima of trigonometric polynomials, and symbol-based eigenvalue
//!   brackets for symmetric Toeplitz matrices;
//! - [`toeplitz`] — O(T log T) Toeplitz matrix-vector products via circulant
//!   embedding and operator norms (dense eigensolver at small T, Lanczos at
//!   large T);
//! - [`experiments`] — a reproducible Monte Carlo harness with oracle
//!   bandwidth/threshold selection, inconsistency-bracket checks and
//!   convergence-rate fits.
//!
//! All operations are pure functions of their inputs (plus an explicit seed
//! where randomness is involved) and safe to call concurrently.

// Parameter checks use `!(x > 0.0)` so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod experiments;
mod fft;
pub mod process;
pub mod spectral;
pub mod toeplitz;

pub use error::{Error, Result};
pub use estimators::{Taper, TimeSeries};
pub use process::{AutocovarianceSequence, LinearProcessModel, ModelPreset};
pub use toeplitz::SymmetricToeplitz;
