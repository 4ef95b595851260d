//! Jacobi spectral solver for the two-sided fractional
//! diffusion-advection-reaction problem on (0, 1), together with the tools
//! used to check the regularity of its solutions.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fracop;
pub mod linalg;
pub mod numeric;
pub mod regularity;
pub mod solver;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
