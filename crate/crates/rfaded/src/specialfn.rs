//! Gamma, two-parameter Mittag-Leffler, and delay exponential functions.
//!
//! These are the scalar kernels behind the manufactured forcing terms and the
//! series solution: Γ(z) by Lanczos approximation, E_{α,β}(x) by direct Taylor
//! summation, and the generalized delay exponential G_{α,β}^{λ,τ,m}(t), a
//! Heaviside-gated finite sum of shifted power terms.
//!
//! All functions here are pure; callers may share them freely across threads.

use crate::error::{Error, Result};

/// Lanczos parameter g = 7 with the standard 9-coefficient table.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += c / (z + (i + 1) as f64);
    }
    sum
}

fn is_nonpositive_integer(z: f64) -> bool {
    z <= 0.0 && z == z.floor()
}

fn gamma_unchecked(z: f64) -> f64 {
    if z < 0.5 {
        // Reflection: Γ(z) Γ(1−z) = π / sin(πz).
        std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma_unchecked(1.0 - z))
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// Gamma function Γ(z).
///
/// Errors with [`Error::GammaPole`] at z ∈ {0, −1, −2, …}.
pub fn gamma(z: f64) -> Result<f64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole { z });
    }
    Ok(gamma_unchecked(z))
}

/// Reciprocal gamma 1/Γ(z), entire in z: returns 0 at the poles of Γ.
pub fn recip_gamma(z: f64) -> f64 {
    if is_nonpositive_integer(z) {
        return 0.0;
    }
    if z < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1−z) / π
        (std::f64::consts::PI * z).sin() * gamma_unchecked(1.0 - z) / std::f64::consts::PI
    } else {
        1.0 / gamma_unchecked(z)
    }
}

/// ln Γ(z) for z > 0.
pub fn ln_gamma(z: f64) -> f64 {
    assert!(z > 0.0, "ln_gamma requires z > 0, got {z}");
    if z < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z), sin(πz) > 0 on (0, 1/2)
        std::f64::consts::PI.ln() - (std::f64::consts::PI * z).sin().ln() - ln_gamma(1.0 - z)
    } else {
        let zm = z - 1.0;
        let t = zm + LANCZOS_G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln()
    }
}

/// Parameters for the two-parameter Mittag-Leffler series E_{α,β}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    pub beta: f64,
    /// Hard cap on the number of summed terms.
    pub max_terms: usize,
    /// Absolute term-size cutoff.
    pub tol: f64,
}

impl MlParams {
    /// Defaults: tol = 1e−15, max_terms = 500. The solver's arguments stay in
    /// the direct-summation regime at these settings.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = MlParams {
            alpha,
            beta,
            max_terms: 500,
            tol: 1e-15,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::Domain {
                param: "alpha",
                value: self.alpha,
                expected: "alpha > 0",
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain {
                param: "tol",
                value: self.tol,
                expected: "tol > 0",
            });
        }
        if self.max_terms == 0 {
            return Err(Error::Domain {
                param: "max_terms",
                value: 0.0,
                expected: "max_terms >= 1",
            });
        }
        Ok(())
    }
}

/// E_{α,β}(x) = Σ_k x^k / Γ(αk + β) by direct summation, stopping once the
/// term magnitude drops below `tol`.
pub fn mittag_leffler(p: &MlParams, x: f64) -> Result<f64> {
    p.validate()?;
    let mut sum = 0.0;
    let mut xp = 1.0; // x^k
    let mut last = f64::INFINITY;
    for k in 0..p.max_terms {
        let term = xp * recip_gamma(p.alpha * k as f64 + p.beta);
        sum += term;
        last = term.abs();
        if last < p.tol && k >= 1 {
            return Ok(sum);
        }
        xp *= x;
    }
    if last < p.tol {
        Ok(sum)
    } else {
        Err(Error::NonConvergence {
            terms: p.max_terms,
            last_term: last,
            tol: p.tol,
        })
    }
}

/// Parameters of the generalized delay exponential G_{α,β}^{λ,τ,m}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayExpParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub tau: f64,
    pub m: u32,
}

impl DelayExpParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64, tau: f64, m: u32) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Domain {
                param: "tau",
                value: tau,
                expected: "tau > 0",
            });
        }
        Ok(DelayExpParams {
            alpha,
            beta,
            lambda,
            tau,
            m,
        })
    }
}

/// G_{α,β}^{λ,τ,m}(t) = Σ_j C(j+m, j) λ^j (t−(m+j)τ)^{α(m+j)+β−1}
///                      / Γ(α(m+j)+β) · H(t−(m+j)τ).
///
/// The Heaviside factors make the sum finite: only j ≤ t/τ − m contribute,
/// and the value is 0 for t < mτ. Terms whose Γ argument is a nonpositive
/// integer are annihilated by the reciprocal gamma (entire) and skipped.
/// Large exponents are evaluated in the log domain.
pub fn delay_exp(p: &DelayExpParams, t: f64) -> f64 {
    delay_exp_with_count(p, t).0
}

/// Same as [`delay_exp`] but also reports the number of Heaviside-active terms.
pub fn delay_exp_with_count(p: &DelayExpParams, t: f64) -> (f64, usize) {
    let m = p.m as f64;
    if t < m * p.tau {
        return (0.0, 0);
    }
    let j_max = (t / p.tau - m).floor() as i64;
    let mut sum = 0.0;
    let mut count = 0usize;
    // binomial C(j+m, j) tracked in the log domain as it grows
    let mut ln_binom = 0.0f64;
    for j in 0..=j_max {
        let jf = j as f64;
        if j > 0 {
            ln_binom += ((m + jf) / jf).ln();
        }
        count += 1;
        let g_arg = p.alpha * (m + jf) + p.beta;
        let rg = recip_gamma(g_arg);
        if rg == 0.0 {
            continue; // coefficient annihilated by the gamma pole
        }
        if p.lambda == 0.0 && j > 0 {
            continue;
        }
        let u = t - (m + jf) * p.tau;
        let e = g_arg - 1.0;
        let sign = if p.lambda < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 } * rg.signum();
        let ln_lam = if j == 0 { 0.0 } else { jf * p.lambda.abs().ln() };
        if u == 0.0 {
            if e > 0.0 {
                continue;
            }
            sum += if e == 0.0 {
                sign * (ln_binom + ln_lam).exp() * rg.abs()
            } else {
                sign * f64::INFINITY
            };
            continue;
        }
        let ln_mag = ln_binom + ln_lam + e * u.ln() + rg.abs().ln();
        sum += sign * ln_mag.exp();
    }
    (sum, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.7724538509055160273;

    #[test]
    fn gamma_classical_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(0.5).unwrap() - SQRT_PI).abs() < 1e-13);
        assert!((gamma(4.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_pole_errors() {
        for z in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(gamma(z), Err(Error::GammaPole { .. })));
        }
    }

    #[test]
    fn gamma_recurrence_property() {
        // |Γ(z+1) − zΓ(z)| / Γ(z+1) < 1e−12 on z = 0.1, 0.2, …, 5.0
        for i in 1..=50 {
            let z = i as f64 * 0.1;
            let g1 = gamma(z + 1.0).unwrap();
            let g0 = gamma(z).unwrap();
            assert!(
                ((g1 - z * g0) / g1).abs() < 1e-12,
                "recurrence fails at z = {z}"
            );
        }
    }

    #[test]
    fn recip_gamma_matches_gamma_and_vanishes_at_poles() {
        for z in [3.7, 0.4, -0.5, -2.3, 11.0] {
            assert!((recip_gamma(z) * gamma_unchecked(z) - 1.0).abs() < 1e-12);
        }
        for z in [0.0, -1.0, -6.0] {
            assert_eq!(recip_gamma(z), 0.0);
        }
    }

    #[test]
    fn ln_gamma_consistent() {
        for z in [0.2, 0.7, 1.0, 4.5, 30.0, 140.0] {
            assert!(
                (ln_gamma(z) - gamma_unchecked(z).ln()).abs() < 1e-10 * (1.0 + ln_gamma(z).abs()),
                "ln_gamma mismatch at z = {z}"
            );
        }
    }

    #[test]
    fn mittag_leffler_is_exp_at_1_1() {
        let p = MlParams::new(1.0, 1.0).unwrap();
        assert!((mittag_leffler(&p, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-12);
        // grid property on [−5, 5]
        for i in 0..=100 {
            let x = -5.0 + 0.1 * i as f64;
            let e = mittag_leffler(&p, x).unwrap();
            assert!(
                (e - x.exp()).abs() < 1e-10,
                "E_{{1,1}}({x}) = {e} vs exp = {}",
                x.exp()
            );
        }
    }

    #[test]
    fn mittag_leffler_zero_argument() {
        let p = MlParams::new(0.6, 0.4).unwrap();
        let expect = recip_gamma(0.4);
        assert!((mittag_leffler(&p, 0.0).unwrap() - expect).abs() < 1e-15);
    }

    // 200-term fixed-length summation, independent of the tolerance logic.
    fn ml_brute(alpha: f64, beta: f64, x: f64) -> f64 {
        let mut s = 0.0;
        let mut xp = 1.0;
        for k in 0..200 {
            s += xp * recip_gamma(alpha * k as f64 + beta);
            xp *= x;
        }
        s
    }

    #[test]
    fn mittag_leffler_forcing_factor() {
        // E_{1, 1−γ}(γ t) at γ = 0.6, t = 0.5: the t^{−γ}-free factor of the
        // first example's delayed forcing term.
        let p = MlParams::new(1.0, 0.4).unwrap();
        let v = mittag_leffler(&p, 0.3).unwrap();
        assert!((v - ml_brute(1.0, 0.4, 0.3)).abs() < 1e-14);
        assert!((v - 0.8713097582189155).abs() < 1e-13);
    }

    #[test]
    fn mittag_leffler_nonconvergence() {
        let p = MlParams {
            alpha: 0.5,
            beta: 1.0,
            max_terms: 4,
            tol: 1e-15,
        };
        assert!(matches!(
            mittag_leffler(&p, 50.0),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn delay_exp_zero_before_m_tau() {
        let p = DelayExpParams::new(0.5, 1.0, -1.0, 1.0, 0).unwrap();
        assert_eq!(delay_exp(&p, -0.5), 0.0);
        let p1 = DelayExpParams::new(0.3, 2.0, 4.0, 0.5, 3).unwrap();
        assert_eq!(delay_exp(&p1, 1.49), 0.0);
    }

    #[test]
    fn delay_exp_single_term_beta_one() {
        // β=1, m=0, t<τ: single j=0 term t^0/Γ(1) = 1 for any α, λ.
        for (a, l) in [(0.5, -1.0), (0.9, 3.0), (0.2, 0.0)] {
            let p = DelayExpParams::new(a, 1.0, l, 1.0, 0).unwrap();
            assert!((delay_exp(&p, 0.5) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn delay_exp_two_term_brute_force() {
        // m=1, τ=1, t=2.5: exactly j = 0, 1 contribute.
        let (a, b, l, tau) = (0.4, 1.2, -1.0, 1.0);
        let p = DelayExpParams::new(a, b, l, tau, 1).unwrap();
        let mut expect = 0.0;
        for j in 0..=1u32 {
            let mj = (1 + j) as f64;
            let binom = (j + 1) as f64; // C(j+1, j)
            let u: f64 = 2.5 - mj * tau;
            expect += binom * l.powi(j as i32) * u.powf(a * mj + b - 1.0) * recip_gamma(a * mj + b);
        }
        let (v, count) = delay_exp_with_count(&p, 2.5);
        assert_eq!(count, 2);
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.427423156907778).abs() < 1e-13);
    }

    #[test]
    fn delay_exp_term_count_bound() {
        // exactly floor(t/τ) − m + 1 terms for t ≥ mτ
        for (tau, m, t) in [(1.0, 0u32, 3.4), (0.5, 2, 2.6), (0.25, 1, 0.25), (1.0, 0, 0.0)] {
            let p = DelayExpParams::new(0.5, 1.3, -0.8, tau, m).unwrap();
            let (_, count) = delay_exp_with_count(&p, t);
            let expect = ((t / tau).floor() as i64 - m as i64 + 1).max(0) as usize;
            assert_eq!(count, expect, "tau={tau} m={m} t={t}");
        }
    }

    #[test]
    fn delay_exp_large_argument_log_domain() {
        // long series with growing binomials stays finite
        let p = DelayExpParams::new(0.5, 1.0, -1.0, 0.1, 2).unwrap();
        let v = delay_exp(&p, 30.0);
        assert!(v.is_finite());
    }
}
