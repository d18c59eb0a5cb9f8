//! Lᵖ norms of spherical harmonics on S²: exact quadrature, the standard
//! basis and its kernel identities, Haar-random orthonormal bases, Gaussian
//! beam bases, and the experiments that measure their growth laws.

pub mod beams;
pub mod error;
pub mod experiments;
pub mod harmonics;
pub mod numeric;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod runner;
pub mod special;
mod synthesis;

pub use error::{Error, Result};
