//! Kähler information geometry of linear filters in weighted Hardy spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`polylog`]: polylogarithm `Li_m(z)` on the closed unit disk and `ζ(s)`.
//! - [`weighted_hardy`]: weight sequences, weighted norms and distances of
//!   coefficient series, reproducing kernels.
//! - [`filter_models`]: ARMA/ARFIMA models, transfer functions, impulse
//!   responses and cepstra (analytic and contour-integral routes).
//! - [`kahler`]: potentials, metrics, connections and Ricci curvature, each
//!   available from truncated series, polylog closed forms and Wirtinger
//!   finite differences of the potential.
//! - [`verify`]: the randomized cross-route verification suite.
//!
//! Batch work (distance matrices, verification sweeps, finite-difference
//! stencils) runs through [`par::Execution`], which uses rayon when the
//! `parallel` feature is enabled and falls back to a sequential loop otherwise.

pub mod error;
pub mod fd;
pub mod filter_models;
pub mod kahler;
pub mod par;
pub mod polylog;
pub mod sampling;
pub mod verify;
pub mod weighted_hardy;

pub use error::{Error, Result};
pub use num_complex::Complex64;
