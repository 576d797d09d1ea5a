//! Crank-Nicolson spatial matrices and the diagonal-dominance gate.
//!
//! The interior unknowns U^j = [u_1^j, …, u_{M−1}^j]ᵀ evolve through
//! (I + D) U^j = (I − D) U^{j−1} + Q^j, where
//! D = η_α (A + Aᵀ) + η_β (B + Bᵀ): A is the lower-triangular Toeplitz
//! matrix of FBDF2 weights, B the near-lower-triangular Toeplitz matrix of
//! WSGD weights with one superdiagonal, η_α = c_α κ K_α h^{−α}/2 > 0 and
//! η_β = c_β κ K_β h^{−β}/2 ≤ 0. D is assembled symmetrically from its
//! Toeplitz generator, factorized once, and reused across all time steps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::weights::{fbdf2_weights, wsgd_weights, WeightSeq};

/// Uniform space-time mesh: x_i = i·h, t_j = j·κ.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub m: usize,
    pub n: usize,
    pub l: f64,
    pub t_end: f64,
    pub h: f64,
    pub kappa: f64,
}

impl Mesh {
    pub fn new(m: usize, n: usize, l: f64, t_end: f64) -> Result<Mesh> {
        if m < 3 {
            return Err(Error::LengthMismatch {
                expected: "M >= 3 space intervals",
                got: m,
            });
        }
        if n < 1 {
            return Err(Error::LengthMismatch {
                expected: "N >= 1 time steps",
                got: n,
            });
        }
        if !(l > 0.0) {
            return Err(Error::Domain {
                param: "l",
                value: l,
                expected: "L > 0",
            });
        }
        if !(t_end > 0.0) {
            return Err(Error::Domain {
                param: "t_end",
                value: t_end,
                expected: "T > 0",
            });
        }
        Ok(Mesh {
            m,
            n,
            l,
            t_end,
            h: l / m as f64,
            kappa: t_end / n as f64,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.kappa
    }
}

/// Riesz scale factor c_ζ = 1 / (2 cos(πζ/2)); positive on (0,1), negative
/// on (1,2], undefined at ζ = 1.
pub fn riesz_coefficient(zeta: f64) -> Result<f64> {
    if !(zeta > 0.0 && zeta <= 2.0) {
        return Err(Error::Domain {
            param: "zeta",
            value: zeta,
            expected: "0 < zeta <= 2",
        });
    }
    if zeta == 1.0 {
        return Err(Error::SingularRieszOrder);
    }
    Ok(1.0 / (2.0 * (std::f64::consts::PI * zeta / 2.0).cos()))
}

/// Assembled Crank-Nicolson system with a reusable factorization of (I + D).
pub struct CnSystem {
    pub eta_alpha: f64,
    pub eta_beta: f64,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub w_alpha: WeightSeq,
    pub w_beta: WeightSeq,
    lhs: nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl CnSystem {
    /// Number of interior unknowns, M − 1.
    pub fn interior(&self) -> usize {
        self.d.nrows()
    }

    /// Solve (I + D) x = rhs with the cached factorization.
    pub fn solve_lhs(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        self.lhs
            .solve(rhs)
            .ok_or(Error::SingularMatrix { time_index: None })
    }
}

/// Build A, B, D and factorize (I + D) for the given problem and mesh.
pub fn assemble(spec: &ProblemSpec, mesh: &Mesh) -> Result<CnSystem> {
    spec.validate()?;
    let m = mesh.m;
    let mi = m - 1;
    let c_alpha = riesz_coefficient(spec.alpha)?;
    let c_beta = riesz_coefficient(spec.beta)?;
    let eta_alpha = c_alpha * mesh.kappa * spec.k_alpha * mesh.h.powf(-spec.alpha) / 2.0;
    let eta_beta = c_beta * mesh.kappa * spec.k_beta * mesh.h.powf(-spec.beta) / 2.0;

    // ϖ up to index M (boundary corrections reach ϖ_{M−1}), ϑ up to M+1
    let w_alpha = fbdf2_weights(spec.alpha, m + 1)?;
    let w_beta = wsgd_weights(spec.beta, m + 2)?;
    let pw = w_alpha.coeffs();
    let th = w_beta.coeffs();

    let a = DMatrix::from_fn(mi, mi, |i, j| if j <= i { pw[i - j] } else { 0.0 });
    let b = DMatrix::from_fn(mi, mi, |i, j| {
        if j <= i + 1 {
            th[i + 1 - j]
        } else {
            0.0
        }
    });

    // D is symmetric Toeplitz: D_ij = t_{|i−j|} with
    // t_0 = 2(η_α ϖ_0 + η_β ϑ_1), t_1 = η_α ϖ_1 + η_β (ϑ_0 + ϑ_2),
    // t_m = η_α ϖ_m + η_β ϑ_{m+1} for m >= 2.
    let mut toeplitz = vec![0.0; mi];
    toeplitz[0] = 2.0 * (eta_alpha * pw[0] + eta_beta * th[1]);
    if mi > 1 {
        toeplitz[1] = eta_alpha * pw[1] + eta_beta * (th[0] + th[2]);
    }
    for k in 2..mi {
        toeplitz[k] = eta_alpha * pw[k] + eta_beta * th[k + 1];
    }
    let d = DMatrix::from_fn(mi, mi, |i, j| toeplitz[i.abs_diff(j)]);

    let mut lhs_mat = d.clone();
    for i in 0..mi {
        lhs_mat[(i, i)] += 1.0;
    }
    let lhs = nalgebra::linalg::LU::new(lhs_mat);
    if !lhs.is_invertible() {
        return Err(Error::SingularMatrix { time_index: None });
    }

    Ok(CnSystem {
        eta_alpha,
        eta_beta,
        a,
        b,
        d,
        w_alpha,
        w_beta,
        lhs,
    })
}

/// Mesh threshold of the dominance guarantee: for α ≤ 5/8 (or β = 2) every h
/// qualifies; otherwise returns the finite sufficient bound
/// (−3β(β−1)(2−β)(3+β)cos(απ/2) / (4(3/2)^α α(8α−5)cos(βπ/2)))^{1/(β−α)},
/// evaluated in the log domain so near-degenerate exponents don't overflow.
pub fn h_threshold(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            param: "alpha",
            value: alpha,
            expected: "0 < alpha < 1",
        });
    }
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::Domain {
            param: "beta",
            value: beta,
            expected: "1 < beta <= 2",
        });
    }
    if alpha <= 0.625 || beta == 2.0 {
        return Ok(f64::INFINITY);
    }
    let num = -3.0 * beta * (beta - 1.0) * (2.0 - beta) * (3.0 + beta)
        * (alpha * std::f64::consts::PI / 2.0).cos();
    let den = 4.0
        * 1.5f64.powf(alpha)
        * alpha
        * (8.0 * alpha - 5.0)
        * (beta * std::f64::consts::PI / 2.0).cos();
    let ratio = num / den;
    debug_assert!(ratio > 0.0);
    Ok((ratio.ln() / (beta - alpha)).exp())
}

/// Row-wise strict diagonal dominance report for D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    pub dominant: bool,
    /// min over rows of |D_ii| − Σ_{j≠i} |D_ij|.
    pub worst_row_margin: f64,
}

pub fn check_diagonal_dominance(sys: &CnSystem) -> DominanceReport {
    let n = sys.d.nrows();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i {
                off += sys.d[(i, j)].abs();
            }
        }
        worst = worst.min(sys.d[(i, i)].abs() - off);
    }
    DominanceReport {
        dominant: worst > 0.0,
        worst_row_margin: worst,
    }
}
