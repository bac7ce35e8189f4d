//! Numerical toolkit for a sharpened form of Talagrand's concentration
//! inequality for empirical processes.
//!
//! The crate is organised by subsystem:
//!
//! * [`scalar`]: the penalty function ψ, the two-variable function φ behind
//!   the constant 1.12, and the scalar root-finders for critical constants.
//! * [`kernel`]: optimal kernels for the weighted exponential inequality,
//!   an independent brute-force checker, counterexample search and
//!   critical-constant bracketing.
//! * [`product_space`]: finite product spaces, the distance functional
//!   `m(A, x)` computed by conditional gradient, and exhaustive checks of
//!   the integral inequality `∫ exp(m(A,x)/L) dP ≤ 1/P(A)`.
//! * [`empirical`]: the empirical-process supremum `Z`, its median and Monte
//!   Carlo tests of the two-sided tail bound.
//! * [`run`]: run configuration, JSON/CSV reports and the dispatcher used by
//!   the `talagrand` binary.

pub mod empirical;
pub mod error;
pub mod kernel;
pub mod numeric;
pub mod product_space;
pub mod run;
pub mod scalar;

pub use error::{Error, Result};

/// The constant for which the kernel inequality and both theorems are stated.
pub const DEFAULT_L: f64 = 1.12;
