//! Convolution-weight families for the discrete fractional operators.
//!
//! Three sequences drive the scheme: classical Grünwald binomial weights
//! ω_k^{(ζ)} = (−1)^k C(ζ, k), the second-order backward-differentiation
//! weights ϖ_k (coefficients of (3/2 − 2ξ + ξ²/2)^α), and the weighted
//! shifted Grünwald weights ϑ_k^{(ζ)} for orders in (1, 2]. Sequences are
//! generated by stable multiplicative/Miller recurrences, never factorials,
//! and cached per (kind, order) since every time step reuses them.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::specialfn::recip_gamma;

/// Which convolution family a [`WeightSeq`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Grunwald,
    Fbdf2,
    Wsgd,
}

/// A finite prefix of a convolution-weight sequence, indexed from 0.
#[derive(Debug, Clone)]
pub struct WeightSeq {
    pub kind: WeightKind,
    pub order: f64,
    coeffs: Arc<Vec<f64>>,
    len: usize,
}

impl WeightSeq {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl std::ops::Index<usize> for WeightSeq {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.coeffs()[k]
    }
}

fn raw_grunwald(zeta: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    w.push(1.0);
    for k in 1..n {
        let prev = w[k - 1];
        w.push(prev * (1.0 - (zeta + 1.0) / k as f64));
    }
    w
}

fn raw_fbdf2(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    if n > 1 {
        w[1] = -4.0 / 3.0 * alpha;
    }
    for k in 2..n {
        let kf = k as f64;
        w[k] = 4.0 / 3.0 * (1.0 - (alpha + 1.0) / kf) * w[k - 1]
            + 1.0 / 3.0 * (2.0 * (1.0 + alpha) / kf - 1.0) * w[k - 2];
    }
    let scale = 1.5f64.powf(alpha);
    for v in &mut w {
        *v *= scale;
    }
    w
}

fn raw_wsgd(beta: f64, n: usize) -> Vec<f64> {
    let om = raw_grunwald(beta, n);
    let mut th = Vec::with_capacity(n);
    th.push(beta / 2.0 * om[0]);
    for k in 1..n {
        th.push(beta / 2.0 * om[k] + (2.0 - beta) / 2.0 * om[k - 1]);
    }
    th
}

type Cache = RwLock<HashMap<(WeightKind, u64), Arc<Vec<f64>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn fetch(kind: WeightKind, order: f64, n: usize) -> WeightSeq {
    let key = (kind, order.to_bits());
    if let Some(arc) = cache().read().unwrap().get(&key) {
        if arc.len() >= n {
            return WeightSeq {
                kind,
                order,
                coeffs: arc.clone(),
                len: n,
            };
        }
    }
    let computed = Arc::new(match kind {
        WeightKind::Grunwald => raw_grunwald(order, n),
        WeightKind::Fbdf2 => raw_fbdf2(order, n),
        WeightKind::Wsgd => raw_wsgd(order, n),
    });
    let mut guard = cache().write().unwrap();
    let entry = guard.entry(key).or_insert_with(|| computed.clone());
    if entry.len() < n {
        *entry = computed;
    }
    WeightSeq {
        kind,
        order,
        coeffs: entry.clone(),
        len: n,
    }
}

/// Grünwald weights ω_k^{(ζ)} = (−1)^k C(ζ, k) for k = 0..n−1, via the
/// multiplicative recurrence ω_k = ω_{k−1} (1 − (ζ+1)/k).
pub fn grunwald_weights(zeta: f64, n: usize) -> Result<WeightSeq> {
    if !(zeta > 0.0 && zeta <= 2.0) {
        return Err(Error::Domain {
            param: "zeta",
            value: zeta,
            expected: "0 < zeta <= 2",
        });
    }
    if n < 1 {
        return Err(Error::LengthMismatch {
            expected: "n >= 1",
            got: n,
        });
    }
    Ok(fetch(WeightKind::Grunwald, zeta, n))
}

/// FBDF2 weights ϖ_k = (3/2)^α ω_k with ω from the Miller recurrence.
pub fn fbdf2_weights(alpha: f64, n: usize) -> Result<WeightSeq> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            param: "alpha",
            value: alpha,
            expected: "0 < alpha <= 1",
        });
    }
    if n < 2 {
        return Err(Error::LengthMismatch {
            expected: "n >= 2",
            got: n,
        });
    }
    Ok(fetch(WeightKind::Fbdf2, alpha, n))
}

/// WSGD weights ϑ_0 = (ζ/2)ω_0, ϑ_k = (ζ/2)ω_k + ((2−ζ)/2)ω_{k−1}, the
/// (p, q) = (1, 0) shifted-difference combination of second order.
pub fn wsgd_weights(beta: f64, n: usize) -> Result<WeightSeq> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(Error::Domain {
            param: "beta",
            value: beta,
            expected: "1 < beta <= 2",
        });
    }
    if n < 3 {
        return Err(Error::LengthMismatch {
            expected: "n >= 3",
            got: n,
        });
    }
    Ok(fetch(WeightKind::Wsgd, beta, n))
}

/// Starting correction b_j = j^{−α} / Γ(1−α), j = 1..j_max.
///
/// `values[j-1]` holds b_j. At α = 1 the reciprocal gamma vanishes and all
/// values are exactly 0 (the classical-order limit).
#[derive(Debug, Clone)]
pub struct StartCorrection {
    pub order: f64,
    pub values: Vec<f64>,
}

impl StartCorrection {
    /// b_j, 1-indexed.
    pub fn b(&self, j: usize) -> f64 {
        self.values[j - 1]
    }
}

pub fn start_correction(alpha: f64, j_max: usize) -> StartCorrection {
    assert!(
        alpha > 0.0 && alpha <= 1.0,
        "start_correction: alpha = {alpha} outside (0, 1]"
    );
    assert!(j_max >= 1, "start_correction: j_max must be >= 1");
    let rg = recip_gamma(1.0 - alpha);
    let values = (1..=j_max)
        .map(|j| (j as f64).powf(-alpha) * rg)
        .collect();
    StartCorrection {
        order: alpha,
        values,
    }
}

/// Discrete Caputo derivative at t_j from uniform samples y_0..y_j:
/// h^{−α} (Σ_{k=0}^{j} ϖ_k y_{j−k} − b_j y_0).
pub fn fbdf2_apply(samples: &[f64], alpha: f64, h: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: "at least 2 samples (j >= 1)",
            got: samples.len(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::Domain {
            param: "h",
            value: h,
            expected: "h > 0",
        });
    }
    let j = samples.len() - 1;
    let w = fbdf2_weights(alpha, j + 1)?;
    let mut conv = 0.0;
    for k in 0..=j {
        conv += w[k] * samples[j - k];
    }
    let b_j = (j as f64).powf(-alpha) * recip_gamma(1.0 - alpha);
    Ok((conv - b_j * samples[0]) * h.powf(-alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::gamma;

    // direct binomial (−1)^k C(ζ, k) as an independent product, no recurrence reuse
    fn binom_direct(zeta: f64, k: usize) -> f64 {
        let mut v = 1.0;
        for i in 0..k {
            v *= (zeta - i as f64) / (i + 1) as f64;
        }
        if k % 2 == 1 {
            -v
        } else {
            v
        }
    }

    #[test]
    fn grunwald_integer_orders() {
        let w = grunwald_weights(2.0, 4).unwrap();
        assert_eq!(w.coeffs(), &[1.0, -2.0, 1.0, 0.0]);
        let w = grunwald_weights(1.0, 3).unwrap();
        assert_eq!(w.coeffs(), &[1.0, -1.0, 0.0]);
    }

    #[test]
    fn grunwald_half_order() {
        let w = grunwald_weights(0.5, 3).unwrap();
        for k in 0..3 {
            assert!((w[k] - binom_direct(0.5, k)).abs() < 1e-15);
        }
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!((w[1] + 0.5).abs() < 1e-15);
        assert!((w[2] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn grunwald_domain() {
        assert!(grunwald_weights(0.0, 4).is_err());
        assert!(grunwald_weights(2.5, 4).is_err());
    }

    #[test]
    fn fbdf2_recovers_classical_bdf2() {
        let w = fbdf2_weights(1.0, 6).unwrap();
        assert!((w[0] - 1.5).abs() < 1e-15);
        assert!((w[1] + 2.0).abs() < 1e-15);
        assert!((w[2] - 0.5).abs() < 1e-15);
        for k in 3..6 {
            assert!(w[k].abs() < 1e-15, "w[{k}] = {}", w[k]);
        }
    }

    #[test]
    fn fbdf2_half_order_leading() {
        let w = fbdf2_weights(0.5, 2).unwrap();
        let s = 1.5f64.powf(0.5);
        assert!((w[0] - s).abs() < 1e-15);
        assert!((w[1] + 4.0 / 3.0 * 0.5 * s).abs() < 1e-15);
    }

    #[test]
    fn fbdf2_partial_sums_positive_and_decaying() {
        let w = fbdf2_weights(0.3, 2001).unwrap();
        let sum1000: f64 = w.coeffs()[..=1000].iter().sum();
        let sum2000: f64 = w.coeffs().iter().sum();
        assert!(sum2000 > 0.0);
        assert!(sum2000 < sum1000, "partial sums must decrease toward 0");
    }

    // q-th root of a power series by Newton iteration on series arithmetic,
    // then p-th power by repeated multiplication. Independent of the Miller
    // recurrence: only series mul/div.
    fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..=i {
                c[i] += a.get(j).copied().unwrap_or(0.0) * b.get(i - j).copied().unwrap_or(0.0);
            }
        }
        c
    }

    fn series_div(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
        let mut q = vec![0.0; n];
        for i in 0..n {
            let mut acc = a.get(i).copied().unwrap_or(0.0);
            for j in 0..i {
                acc -= q[j] * b.get(i - j).copied().unwrap_or(0.0);
            }
            q[i] = acc / b[0];
        }
        q
    }

    fn series_pow(a: &[f64], p: usize, n: usize) -> Vec<f64> {
        let mut r = vec![0.0; n];
        r[0] = 1.0;
        for _ in 0..p {
            r = series_mul(&r, a, n);
        }
        r
    }

    fn series_root(c: &[f64], q: usize, n: usize) -> Vec<f64> {
        let mut c_full = c.to_vec();
        c_full.resize(n, 0.0);
        let mut d = vec![0.0; n];
        d[0] = c[0].powf(1.0 / q as f64);
        for _ in 0..60 {
            // d <- d - (d^q - c) / (q d^{q-1})
            let dq = series_pow(&d, q, n);
            let num: Vec<f64> = dq.iter().zip(&c_full).map(|(a, b)| a - b).collect();
            let den: Vec<f64> = series_pow(&d, q - 1, n)
                .iter()
                .map(|v| v * q as f64)
                .collect();
            let upd = series_div(&num, &den, n);
            for i in 0..n {
                d[i] -= upd[i];
            }
        }
        d
    }

    #[test]
    fn fbdf2_generating_function_rational_orders() {
        // coefficients of (3/2 - 2ξ + ξ²/2)^{p/q} from series root/power
        let poly = [1.5, -2.0, 0.5];
        for (p, q) in [(1usize, 2usize), (1, 3), (2, 3), (3, 4)] {
            let alpha = p as f64 / q as f64;
            let root = series_root(&poly, q, 10);
            let expect = series_pow(&root, p, 10);
            let w = fbdf2_weights(alpha, 10).unwrap();
            for k in 0..10 {
                assert!(
                    (w[k] - expect[k]).abs() < 1e-12,
                    "alpha={alpha} k={k}: {} vs {}",
                    w[k],
                    expect[k]
                );
            }
        }
    }

    #[test]
    fn wsgd_reduces_to_second_difference() {
        let w = wsgd_weights(2.0, 4).unwrap();
        assert_eq!(w.coeffs(), &[1.0, -2.0, 1.0, 0.0]);
    }

    #[test]
    fn wsgd_order_three_halves() {
        let w = wsgd_weights(1.5, 4).unwrap();
        let expect = [0.75, -0.875, -0.09375, 0.140625];
        for k in 0..4 {
            assert!((w[k] - expect[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn wsgd_theta1_lemma_value() {
        // ϑ_1 = (2 − ζ − ζ²)/2 at ζ = 1.9
        let w = wsgd_weights(1.9, 3).unwrap();
        assert!((w[1] - (2.0 - 1.9 - 1.9 * 1.9) / 2.0).abs() < 1e-14);
        assert!((w[1] + 1.755).abs() < 1e-14);
    }

    #[test]
    fn start_correction_values() {
        let sc = start_correction(0.5, 4);
        let g_half = gamma(0.5).unwrap();
        assert!((sc.b(1) - 1.0 / g_half).abs() < 1e-14);
        assert!((sc.b(1) - 0.5641895835477563).abs() < 1e-13);
        assert!((sc.b(4) - 0.28209479177387814).abs() < 1e-13);
        for j in 2..=4 {
            assert!(sc.b(j) < sc.b(j - 1), "b_j must decrease");
            assert!(sc.b(j) > 0.0);
        }
        // α → 1: Γ(0) pole sends every value to 0
        let sc1 = start_correction(1.0, 3);
        assert!(sc1.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fbdf2_apply_constant_decays() {
        let c = 3.25;
        let v10 = fbdf2_apply(&vec![c; 11], 0.4, 0.1).unwrap();
        let v100 = fbdf2_apply(&vec![c; 101], 0.4, 0.1).unwrap();
        assert!(v100.abs() < v10.abs());
        assert!(v100.abs() < 0.05 * c);
    }

    #[test]
    fn fbdf2_apply_linear_function() {
        // Caputo derivative of y(t) = t at t = 1 is t^{1/2}/Γ(3/2)
        let h = 1.0 / 512.0;
        let n = 512;
        let samples: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        let v = fbdf2_apply(&samples, 0.5, h).unwrap();
        let exact = 1.0 / gamma(1.5).unwrap();
        assert!((v - exact).abs() < 1e-3, "got {v}, exact {exact}");
    }

    #[test]
    fn fbdf2_apply_zero_and_errors() {
        assert_eq!(fbdf2_apply(&[0.0; 8], 0.3, 0.25).unwrap(), 0.0);
        assert!(matches!(
            fbdf2_apply(&[1.0], 0.3, 0.25),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(fbdf2_apply(&[1.0, 2.0], 0.3, 0.0).is_err());
    }

    #[test]
    fn cache_returns_identical_values() {
        let a = fbdf2_weights(0.37, 50).unwrap();
        let b = fbdf2_weights(0.37, 200).unwrap();
        let c = fbdf2_weights(0.37, 50).unwrap();
        for k in 0..50 {
            assert_eq!(a[k], b[k]);
            assert_eq!(a[k], c[k]);
        }
    }

    #[test]
    fn cache_concurrent_access() {
        let handles: Vec<_> = (0..4)
            .map(|i| {
                std::thread::spawn(move || {
                    let n = 100 + 50 * i;
                    let w = wsgd_weights(1.63, n).unwrap();
                    (w[0], w[n - 1])
                })
            })
            .collect();
        let reference = wsgd_weights(1.63, 100).unwrap();
        for h in handles {
            let (first, _) = h.join().unwrap();
            assert_eq!(first, reference[0]);
        }
    }
}
