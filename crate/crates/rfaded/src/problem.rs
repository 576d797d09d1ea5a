//! Continuous problem description.
//!
//! The delayed advection-dispersion problem on [0, L] × [0, T]:
//!
//! ```text
//! ∂u/∂t + ∂^γ u(x, t−τ)/∂t^γ = K_α ∂^α u/∂|x|^α + K_β ∂^β u/∂|x|^β + f(x, t)
//! u(x, t) = g(x, t)            on −τ ≤ t ≤ 0
//! u(0, t) = μ1(t), u(L, t) = μ2(t)
//! ```
//!
//! With T ≤ τ (the v1 restriction) the delayed argument always falls in the
//! history window, so the delayed term is plain data: the caller supplies it
//! as `delayed_term(x, t)`, the value of ∂^γ u(x, t−τ)/∂t^γ obtained from the
//! history. [`crate::solver::delayed_term_numeric`] provides a quadrature
//! fallback when no closed form is available.

use std::fmt;

use crate::error::{Error, Result};

pub type SpaceTimeFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type TimeFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Full continuous problem: orders, coefficients, delay, domain, and data.
pub struct ProblemSpec {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k_alpha: f64,
    pub k_beta: f64,
    pub tau: f64,
    pub l: f64,
    pub t_end: f64,
    /// History g(x, t) on [0, L] × [−τ, 0].
    pub history: SpaceTimeFn,
    /// Left boundary μ1(t).
    pub mu1: TimeFn,
    /// Right boundary μ2(t).
    pub mu2: TimeFn,
    /// Forcing f(x, t).
    pub forcing: SpaceTimeFn,
    /// Delayed term ḡ(x, t) = ∂^γ u(x, t−τ)/∂t^γ, known from history.
    pub delayed_term: SpaceTimeFn,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("gamma", &self.gamma)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("k_alpha", &self.k_alpha)
            .field("k_beta", &self.k_beta)
            .field("tau", &self.tau)
            .field("l", &self.l)
            .field("t_end", &self.t_end)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let range = |ok: bool, param: &'static str, value: f64, expected: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain {
                    param,
                    value,
                    expected,
                })
            }
        };
        range(
            self.gamma > 0.0 && self.gamma < 1.0,
            "gamma",
            self.gamma,
            "0 < gamma < 1",
        )?;
        range(
            self.alpha > 0.0 && self.alpha < 1.0,
            "alpha",
            self.alpha,
            "0 < alpha < 1",
        )?;
        range(
            self.beta > 1.0 && self.beta <= 2.0,
            "beta",
            self.beta,
            "1 < beta <= 2",
        )?;
        range(self.k_alpha >= 0.0, "k_alpha", self.k_alpha, "k_alpha >= 0")?;
        range(self.k_beta >= 0.0, "k_beta", self.k_beta, "k_beta >= 0")?;
        range(self.tau > 0.0, "tau", self.tau, "tau > 0")?;
        range(self.l > 0.0, "l", self.l, "l > 0")?;
        range(self.t_end > 0.0, "t_end", self.t_end, "t_end > 0")?;
        if self.t_end > self.tau {
            return Err(Error::InvalidProblem(format!(
                "t_end = {} exceeds the delay tau = {}; the delayed term would \
                 leave the history window",
                self.t_end, self.tau
            )));
        }
        // boundary/history compatibility at the corners
        let scale = 1.0 + (self.history)(0.0, 0.0).abs() + (self.history)(self.l, 0.0).abs();
        if ((self.history)(0.0, 0.0) - (self.mu1)(0.0)).abs() > 1e-12 * scale {
            return Err(Error::InvalidProblem(
                "history and left boundary disagree at (0, 0)".into(),
            ));
        }
        if ((self.history)(self.l, 0.0) - (self.mu2)(0.0)).abs() > 1e-12 * scale {
            return Err(Error::InvalidProblem(
                "history and right boundary disagree at (L, 0)".into(),
            ));
        }
        Ok(())
    }
}
