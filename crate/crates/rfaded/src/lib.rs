//! Solvers for Riesz space-fractional advection-dispersion equations with a
//! constant delay:
//!
//! ```text
//! ∂u/∂t + ∂^γ u(x, t−τ)/∂t^γ = K_α ∂^α u/∂|x|^α + K_β ∂^β u/∂|x|^β + f(x, t)
//! ```
//!
//! on [0, L] × [0, T] with T ≤ τ, Dirichlet boundaries, and a prescribed
//! history on [−τ, 0]. Two independent solution paths are provided:
//!
//! * a Crank-Nicolson finite-difference scheme whose Riesz derivative is
//!   discretized by second-order backward-differentiation weights for the
//!   advection order α ∈ (0, 1) and weighted shifted Grünwald weights for
//!   the dispersion order β ∈ (1, 2] ([`solver`], [`discretization`],
//!   [`weights`]);
//! * a Mittag-Leffler-type series solution in the sine eigenbasis, built on
//!   generalized delay exponentials ([`analytic`], [`specialfn`]).
//!
//! [`stability`] traces boundary loci of the underlying fractional multistep
//! method and integrates the scalar test problem; [`experiments`] bundles two
//! manufactured problems and produces error/order tables; [`cli`] exposes
//! everything as subcommands with CSV outputs.

pub mod analytic;
pub mod cli;
pub mod discretization;
pub mod error;
pub mod experiments;
pub mod problem;
pub mod quad;
pub mod solver;
pub mod specialfn;
pub mod stability;
pub mod weights;

pub use error::{Error, Result};
pub use problem::ProblemSpec;
