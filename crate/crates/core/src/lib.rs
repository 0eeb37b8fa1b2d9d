//! Bayesian-network sources: exact entropies, lossless factorized coding,
//! rate-distortion solvers and bound checks.
//!
//! Heavy loops run on rayon when the `parallel` feature is enabled (the
//! default); every parallel path has a sequential twin selected by
//! [`par::Exec`] and both produce identical results.

pub mod bn;
pub mod bounds;
pub mod codec;
pub mod error;
pub mod info;
pub mod par;
pub mod rd;

pub use error::{Error, Result};
