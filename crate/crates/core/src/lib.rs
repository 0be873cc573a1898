//! Diffusion on multiscale and multifractional geometries.
//!
//! The crate evaluates measure weights, dispersion laws `ℓ²(σ)`, spectral,
//! Hausdorff and walk dimensions for the weighted, ordinary, `q` and legacy
//! Laplacians, heat-kernel traces, and simulates the associated stochastic
//! processes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod dispersion;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod parallel;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod walker;

pub use error::{Error, Result};
