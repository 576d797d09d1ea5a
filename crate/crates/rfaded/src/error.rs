//! Error type shared by all solver components.

use std::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    Domain {
        param: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Gamma function evaluated at a nonpositive integer.
    GammaPole { z: f64 },
    /// A series was truncated before its terms dropped below tolerance.
    NonConvergence {
        terms: usize,
        last_term: f64,
        tol: f64,
    },
    /// Riesz scale factor requested at the removable order ζ = 1.
    SingularRieszOrder,
    /// The (I + D) factorization failed or a triangular solve hit a zero pivot.
    SingularMatrix { time_index: Option<usize> },
    /// A linear-system residual exceeded the advertised bound.
    ResidualBound {
        time_index: Option<usize>,
        residual: f64,
        bound: f64,
    },
    /// An index lay outside its valid range.
    IndexOutOfRange { index: usize, max: usize },
    /// An input slice had the wrong length.
    LengthMismatch { expected: &'static str, got: usize },
    /// Delayed-term evaluation requested outside the history window.
    OutOfHistory { t: f64, tau: f64 },
    /// The requested configuration is not supported by this evaluator.
    Unsupported(&'static str),
    /// A problem specification failed validation.
    InvalidProblem(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                param,
                value,
                expected,
            } => write!(f, "parameter {param} = {value} outside {expected}"),
            Error::GammaPole { z } => write!(f, "gamma pole at z = {z}"),
            Error::NonConvergence {
                terms,
                last_term,
                tol,
            } => write!(
                f,
                "series not converged after {terms} terms (last term {last_term:e}, tol {tol:e})"
            ),
            Error::SingularRieszOrder => write!(f, "Riesz coefficient undefined at order 1"),
            Error::SingularMatrix { time_index: Some(j) } => {
                write!(f, "singular linear system at time index {j}")
            }
            Error::SingularMatrix { time_index: None } => write!(f, "singular linear system"),
            Error::ResidualBound {
                time_index,
                residual,
                bound,
            } => match time_index {
                Some(j) => write!(
                    f,
                    "solve residual {residual:e} above bound {bound:e} at time index {j}"
                ),
                None => write!(f, "solve residual {residual:e} above bound {bound:e}"),
            },
            Error::IndexOutOfRange { index, max } => {
                write!(f, "index {index} out of range (max {max})")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::OutOfHistory { t, tau } => {
                write!(f, "t = {t} puts the delayed argument past the history window [-{tau}, 0]")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
