//! Numerical toolkit for sampling the Riemann zeta function at gamma-process
//! heights and checking the moment asymptotics that sampling exposes.
//!
//! The crate is organised around a handful of independent layers:
//!
//! * numerically careful complex kernels ([`complex`]),
//! * a deterministic, counter-seeded gamma sampler ([`gamma`]),
//! * zeta evaluation on and near the critical line by two unrelated
//!   methods ([`zeta`]),
//! * exponential-sum/oscillatory-integral transforms ([`oscillatory`]),
//! * the Monte Carlo moment pipeline and sweep ([`moment`]),
//! * lattice/quadrature decompositions of the centered second moment
//!   ([`decomposition`]).
//!
//! Everything downstream of a seed is bit-reproducible: parallelism only ever
//! maps work into index order and reduces sequentially.

#![forbid(unsafe_code)]

pub mod complex;
pub mod dd;
pub mod decomposition;
pub mod error;
pub mod gamma;
pub mod moment;
pub mod oscillatory;
pub mod quad;
pub mod rng;
pub mod special;
pub mod sum;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
