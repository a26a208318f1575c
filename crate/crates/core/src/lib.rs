//! Exact, formal and high-precision verification of bilateral q-series
//! identities of Jacobi triple product and Abel–Rothe type.

pub mod algebra;
pub mod abel_rothe;
pub mod bilateral;
pub mod config;
pub mod convergence;
pub mod error;
pub mod kernels;
pub mod multidim;
pub mod numeric;
pub mod registry;
pub mod report;

pub use error::{Error, Result};
pub mod rng;
pub mod terminating;
pub mod verdict;
