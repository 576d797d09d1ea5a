//! Crank-Nicolson time marching for the delayed problem.
//!
//! Each step solves (I + D) U^j = (I − D) U^{j−1} + Q^j with the factorization
//! cached in [`CnSystem`]. The source Q^j carries the trapezoidal forcing and
//! delayed-term averages plus the boundary correction Λ obtained by moving the
//! known-boundary columns of the discrete operator to the right-hand side.
//! Since T ≤ τ the delayed term never couples into the linear solve.

use nalgebra::DVector;

use crate::discretization::{assemble, CnSystem, Mesh};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::weights::grunwald_weights;

/// Solver toggles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Evaluate f and ḡ at t_0 + κ/1000 instead of t_0 when forming the first
    /// step's source. The bundled first example's data carries a t^{−γ} factor
    /// whose singular parts cancel between f and ḡ only away from t = 0; the
    /// offset perturbs smooth problems by O(κ²/1000).
    pub t0_offset: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { t0_offset: true }
    }
}

/// Grid solution U(j, i) on the uniform mesh, row-major by time.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub mesh: Mesh,
    pub(crate) values: Vec<f64>,
}

impl SolutionField {
    pub fn value(&self, j: usize, i: usize) -> f64 {
        self.values[j * (self.mesh.m + 1) + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let w = self.mesh.m + 1;
        &self.values[j * w..(j + 1) * w]
    }

    /// max_i |U(j, i) − reference(x_i)| over all grid columns.
    pub fn max_row_error(&self, j: usize, reference: impl Fn(f64) -> f64) -> f64 {
        self.row(j)
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - reference(self.mesh.x(i))).abs())
            .fold(0.0, f64::max)
    }
}

/// Source vector Q^j of length M−1 for the step t_{j−1} → t_j.
///
/// `u_prev` is the boundary-inclusive row U^{j−1}. For interior rows the
/// boundary correction matches the closed forms
/// Λ_s = (η_α ϖ_s + η_β ϑ_{s+1})(u_0^j + u_0^{j−1})
///     + (η_α ϖ_{M−s} + η_β ϑ_{M−s+1})(u_M^j + u_M^{j−1}),
/// with an extra η_β ϑ_0 in the left factor at s = 1 and, symmetrically, in
/// the right factor at s = M−1.
pub fn assemble_source(
    spec: &ProblemSpec,
    mesh: &Mesh,
    sys: &CnSystem,
    j: usize,
    u_prev: &[f64],
    opts: &SolveOptions,
) -> Result<DVector<f64>> {
    if j < 1 || j > mesh.n {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: mesh.n,
        });
    }
    if u_prev.len() != mesh.m + 1 {
        return Err(Error::LengthMismatch {
            expected: "boundary-inclusive row of length M + 1",
            got: u_prev.len(),
        });
    }
    let m = mesh.m;
    let kappa = mesh.kappa;
    let t_j = mesh.time(j);
    let t_data_prev = if j == 1 && opts.t0_offset {
        kappa / 1000.0
    } else {
        mesh.time(j - 1)
    };
    let pw = sys.w_alpha.coeffs();
    let th = sys.w_beta.coeffs();
    let u0 = (spec.mu1)(t_j) + u_prev[0];
    let um = (spec.mu2)(t_j) + u_prev[m];

    let mut q = DVector::zeros(m - 1);
    for i in 1..m {
        let x = mesh.x(i);
        let f_sum = (spec.forcing)(x, t_j) + (spec.forcing)(x, t_data_prev);
        let g_sum = (spec.delayed_term)(x, t_j) + (spec.delayed_term)(x, t_data_prev);
        let mut left = sys.eta_alpha * pw[i] + sys.eta_beta * th[i + 1];
        if i == 1 {
            left += sys.eta_beta * th[0];
        }
        let mut right = sys.eta_alpha * pw[m - i] + sys.eta_beta * th[m - i + 1];
        if i == m - 1 {
            right += sys.eta_beta * th[0];
        }
        let lambda = left * u0 + right * um;
        q[i - 1] = 0.5 * kappa * (f_sum - g_sum) - lambda;
    }
    Ok(q)
}

/// One Crank-Nicolson step: solves (I + D) U^j = (I − D) U^{j−1} + Q^j and
/// verifies the residual against 1e−10 · (1 + ‖Q‖_∞).
pub fn step(sys: &CnSystem, u_prev_interior: &DVector<f64>, q: &DVector<f64>) -> Result<DVector<f64>> {
    let n = sys.interior();
    if u_prev_interior.len() != n || q.len() != n {
        return Err(Error::LengthMismatch {
            expected: "interior vectors of length M - 1",
            got: u_prev_interior.len().max(q.len()),
        });
    }
    let rhs = u_prev_interior - &sys.d * u_prev_interior + q;
    let x = sys.solve_lhs(&rhs)?;
    let residual = (&x + &sys.d * &x - &rhs).amax();
    let bound = 1e-10 * (1.0 + q.amax());
    // negated comparison so a NaN residual (non-finite source data) also fails
    if !(residual <= bound) {
        return Err(Error::ResidualBound {
            time_index: None,
            residual,
            bound,
        });
    }
    Ok(x)
}

fn tag_time_index(e: Error, j: usize) -> Error {
    match e {
        Error::SingularMatrix { time_index: None } => Error::SingularMatrix {
            time_index: Some(j),
        },
        Error::ResidualBound {
            time_index: None,
            residual,
            bound,
        } => Error::ResidualBound {
            time_index: Some(j),
            residual,
            bound,
        },
        other => other,
    }
}

/// March the scheme over the whole mesh.
///
/// Row 0 comes from the history; each subsequent row from [`step`]; boundary
/// columns are written from μ1, μ2 exactly.
pub fn solve(spec: &ProblemSpec, mesh: &Mesh, opts: &SolveOptions) -> Result<SolutionField> {
    spec.validate()?;
    if (mesh.l - spec.l).abs() > 1e-12 * spec.l.max(1.0) {
        return Err(Error::InvalidProblem(format!(
            "mesh length {} does not match problem length {}",
            mesh.l, spec.l
        )));
    }
    if mesh.t_end > spec.tau * (1.0 + 1e-14) {
        return Err(Error::InvalidProblem(format!(
            "mesh horizon {} exceeds the delay {}",
            mesh.t_end, spec.tau
        )));
    }
    let sys = assemble(spec, mesh)?;
    let m = mesh.m;
    let w = m + 1;
    let mut values = vec![0.0; (mesh.n + 1) * w];

    values[0] = (spec.mu1)(0.0);
    values[m] = (spec.mu2)(0.0);
    for i in 1..m {
        values[i] = (spec.history)(mesh.x(i), 0.0);
    }

    for j in 1..=mesh.n {
        let (head, tail) = values.split_at_mut(j * w);
        let prev = &head[(j - 1) * w..];
        let q = assemble_source(spec, mesh, &sys, j, prev, opts)?;
        let u_prev_int = DVector::from_iterator(m - 1, prev[1..m].iter().copied());
        let u_new = step(&sys, &u_prev_int, &q).map_err(|e| tag_time_index(e, j))?;
        let t_j = mesh.time(j);
        tail[0] = (spec.mu1)(t_j);
        tail[m] = (spec.mu2)(t_j);
        tail[1..m].copy_from_slice(u_new.as_slice());
    }

    Ok(SolutionField {
        mesh: mesh.clone(),
        values,
    })
}

/// Quadrature fallback for the delayed term: first-order Grünwald
/// discretization of the Caputo derivative of s ↦ g(x, s − τ) on [0, t],
/// on a uniform sub-grid of `steps` intervals. O(1/steps) accurate.
pub fn delayed_term_numeric(
    g: &dyn Fn(f64, f64) -> f64,
    gamma: f64,
    tau: f64,
    x: f64,
    t: f64,
    steps: usize,
) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain {
            param: "gamma",
            value: gamma,
            expected: "0 < gamma < 1",
        });
    }
    if t - tau > 0.0 || t < 0.0 {
        return Err(Error::OutOfHistory { t, tau });
    }
    if steps < 16 {
        return Err(Error::LengthMismatch {
            expected: "steps >= 16",
            got: steps,
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let hs = t / steps as f64;
    let w = grunwald_weights(gamma, steps + 1)?;
    let psi0 = g(x, -tau);
    let mut sum = 0.0;
    for k in 0..=steps {
        sum += w[k] * (g(x, t - k as f64 * hs - tau) - psi0);
    }
    Ok(sum * hs.powf(-gamma))
}
