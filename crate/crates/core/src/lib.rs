//! Gaussian random waves on hyperbolic space `H^n`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains the numerical core:
//! hyperboloid geometry, the spherical function that serves as the wave
//! covariance, exact and approximate field sampling, Wiener-chaos estimators
//! and deterministic moment integrals. IO, parallel orchestration and the
//! command line live in the companion `hyperwave` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chaos;
mod error;
pub mod hypgeo;
pub mod linalg;
pub mod moments;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod waves;

pub use error::{Error, Result};
pub use hypgeo::{HyperPoint, Isometry, SpectralParams};

/// A computed value together with an error estimate and a flag raised when
/// the estimate exceeds the accuracy the routine promises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
    pub degraded: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, abs_err: 0.0, degraded: false }
    }
}
