//! Sharp pointwise gradient constants for hyperbolic harmonic functions
//! with `L^q` boundary data, on the unit ball and the upper half-space
//! of `R^n`, `n ≥ 3`.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: log-Gamma, Pochhammer symbols, hypergeometric series.
//! - [`geometry`]: exponents, configurations, canonical frames, sphere sampling.
//! - [`quadrature`]: Gauss-Jacobi rules and integrators on `S^{n-1}`.
//! - [`regime`]: which direction maximises the constant for a given `(n, q)`.
//! - [`ball`] and [`halfspace`]: the constants themselves.
//! - [`kernels`]: Poisson-type kernels, their gradients, and extremal data.
//! - [`verification`]: the acceptance grid, shared by tests and the CLI.

pub mod ball;
pub mod error;
pub mod geometry;
pub mod halfspace;
pub mod kernels;
pub mod quadrature;
pub mod regime;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
