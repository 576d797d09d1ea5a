//! Bundled manufactured problems and convergence tables.
//!
//! Two exact solutions drive the error study, both on the unit square with τ = 1,
//! K_α = K_β = 1 and homogeneous boundaries:
//!
//! * problem 1: u(x,t) = x²(1−x)² e^{γt}, with delayed data
//!   ḡ(x,t) = x²(1−x)² t^{−γ} E_{1,1−γ}(γt);
//! * problem 2: u(x,t) = x²(1−x)² t², with delayed data
//!   ḡ(x,t) = (2/Γ(3−γ)) x²(1−x)² t^{2−γ}.
//!
//! The forcing carries the time derivative, the matching delayed term, and
//! the Riesz balance of the polynomial profile; f and ḡ share the t^{−γ}
//! factor in problem 1, so their difference stays finite as t → 0 while each
//! alone is singular (see [`crate::solver::SolveOptions::t0_offset`]).

use crate::discretization::Mesh;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::solver::{solve, SolutionField, SolveOptions};
use crate::specialfn::{mittag_leffler, recip_gamma, MlParams};

pub(crate) fn profile(x: f64) -> f64 {
    x * x * (1.0 - x) * (1.0 - x)
}

/// The Riesz balance Σ of left/right fractional derivatives of x²(1−x)²:
/// 24((1−x)^{4−ζ}+x^{4−ζ})/Γ(5−ζ) − 12((1−x)^{3−ζ}+x^{3−ζ})/Γ(4−ζ)
/// + 2((1−x)^{2−ζ}+x^{2−ζ})/Γ(3−ζ).
pub(crate) fn riesz_bracket(zeta: f64, x: f64) -> f64 {
    let pair = |p: f64| (1.0 - x).powf(p) + x.powf(p);
    24.0 * pair(4.0 - zeta) * recip_gamma(5.0 - zeta)
        - 12.0 * pair(3.0 - zeta) * recip_gamma(4.0 - zeta)
        + 2.0 * pair(2.0 - zeta) * recip_gamma(3.0 - zeta)
}

pub(crate) fn half_sec(zeta: f64) -> f64 {
    1.0 / (2.0 * (std::f64::consts::PI * zeta / 2.0).cos())
}

/// Forcing of problem 1 as printed, t > 0 (t^{−γ} is singular at 0).
pub fn forcing_example1(gamma: f64, alpha: f64, beta: f64, x: f64, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "x = {x} outside [0, 1]");
    let ml = MlParams::new(1.0, 1.0 - gamma).expect("valid ML parameters");
    let e_val = mittag_leffler(&ml, gamma * t).expect("forcing series converges");
    let egt = (gamma * t).exp();
    gamma * profile(x) * egt
        + profile(x) * t.powf(-gamma) * e_val
        + egt * half_sec(alpha) * riesz_bracket(alpha, x)
        + egt * half_sec(beta) * riesz_bracket(beta, x)
}

/// Delayed data of problem 1 (the second forcing term).
pub fn delayed_example1(gamma: f64, x: f64, t: f64) -> f64 {
    let ml = MlParams::new(1.0, 1.0 - gamma).expect("valid ML parameters");
    profile(x) * t.powf(-gamma) * mittag_leffler(&ml, gamma * t).expect("series converges")
}

/// Forcing of problem 2 as printed; regular at t = 0.
pub fn forcing_example2(gamma: f64, alpha: f64, beta: f64, x: f64, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "x = {x} outside [0, 1]");
    2.0 * profile(x) * t
        + 2.0 * recip_gamma(3.0 - gamma) * profile(x) * t.powf(2.0 - gamma)
        + t * t * half_sec(alpha) * riesz_bracket(alpha, x)
        + t * t * half_sec(beta) * riesz_bracket(beta, x)
}

/// Delayed data of problem 2.
pub fn delayed_example2(gamma: f64, x: f64, t: f64) -> f64 {
    2.0 * recip_gamma(3.0 - gamma) * profile(x) * t.powf(2.0 - gamma)
}

/// One of the two bundled problems at fixed orders.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedProblem {
    pub id: u8,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ManufacturedProblem {
    pub fn example(id: u8, gamma: f64, alpha: f64, beta: f64) -> Result<Self> {
        if id != 1 && id != 2 {
            return Err(Error::Domain {
                param: "id",
                value: id as f64,
                expected: "example id 1 or 2",
            });
        }
        Ok(ManufacturedProblem {
            id,
            gamma,
            alpha,
            beta,
        })
    }

    pub fn exact(&self, x: f64, t: f64) -> f64 {
        match self.id {
            1 => profile(x) * (self.gamma * t).exp(),
            _ => profile(x) * t * t,
        }
    }

    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        match self.id {
            1 => forcing_example1(self.gamma, self.alpha, self.beta, x, t),
            _ => forcing_example2(self.gamma, self.alpha, self.beta, x, t),
        }
    }

    pub fn delayed_term(&self, x: f64, t: f64) -> f64 {
        match self.id {
            1 => delayed_example1(self.gamma, x, t),
            _ => delayed_example2(self.gamma, x, t),
        }
    }

    pub fn to_problem_spec(&self) -> ProblemSpec {
        let p = *self;
        ProblemSpec {
            gamma: p.gamma,
            alpha: p.alpha,
            beta: p.beta,
            k_alpha: 1.0,
            k_beta: 1.0,
            tau: 1.0,
            l: 1.0,
            t_end: 1.0,
            history: Box::new(move |x, t| p.exact(x, t)),
            mu1: Box::new(|_| 0.0),
            mu2: Box::new(|_| 0.0),
            forcing: Box::new(move |x, t| p.forcing(x, t)),
            delayed_term: Box::new(move |x, t| p.delayed_term(x, t)),
        }
    }
}

/// One grid's error entry: κ = h, error at final time, and the observed order
/// log₂(E(h)/E(h/2)) against the previous row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub h: f64,
    pub max_abs_error: f64,
    pub observed_order: Option<f64>,
}

pub(crate) fn max_error_at_final(field: &SolutionField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let t = field.mesh.t_end;
    field.max_row_error(field.mesh.n, |x| exact(x, t))
}

/// Solve the problem on each grid (M = N) and report errors and orders.
pub fn convergence_table(
    problem: &ManufacturedProblem,
    grids: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<ErrorRow>> {
    if grids.is_empty() {
        return Err(Error::LengthMismatch {
            expected: "at least one grid",
            got: 0,
        });
    }
    for w in grids.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a || b % a != 0 || !(b / a).is_power_of_two() {
            return Err(Error::InvalidProblem(format!(
                "grids must be strictly increasing power-of-two multiples, got {a} then {b}"
            )));
        }
    }
    let spec = problem.to_problem_spec();
    let mut rows: Vec<ErrorRow> = Vec::with_capacity(grids.len());
    for &m in grids {
        let mesh = Mesh::new(m, m, spec.l, spec.t_end)?;
        let field = solve(&spec, &mesh, opts)?;
        let err = max_error_at_final(&field, |x, t| problem.exact(x, t));
        let order = rows
            .last()
            .map(|prev| (prev.max_abs_error / err).log2() / (prev.h / mesh.h).log2());
        rows.push(ErrorRow {
            h: mesh.h,
            max_abs_error: err,
            observed_order: order,
        });
    }
    Ok(rows)
}
