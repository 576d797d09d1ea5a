//! Boundary loci and the scalar fractional test problem.
//!
//! The locus maps the unit circle through the truncated stability symbol
//! z(θ) = Σ_{k=0}^{n−1} ϖ_k e^{−ikθ} + (ϖ_n − b_n) e^{−inθ}, the curve that
//! bounds the method's stability region for the test problem
//! d^α y/dt^α = λ y. The region itself is the complement of the lobe the
//! curve encloses; the lobe area is measured by even-odd scanline filling
//! because the small b_n endpoint correction winds n times around the curve
//! and corrupts a plain signed shoelace sum at small α.

use crate::error::{Error, Result};
use crate::specialfn::recip_gamma;
use crate::weights::fbdf2_weights;

/// Sampled boundary locus for one order α.
#[derive(Debug, Clone)]
pub struct StabilityLocus {
    pub alpha: f64,
    /// Truncation length of the weight sum.
    pub n: usize,
    /// (θ, Re z, Im z) with θ running 0..2π inclusive.
    pub points: Vec<(f64, f64, f64)>,
}

/// Sample the locus at n_theta + 1 equispaced angles (closed curve).
pub fn boundary_locus(alpha: f64, n: usize, n_theta: usize) -> Result<StabilityLocus> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            param: "alpha",
            value: alpha,
            expected: "0 < alpha <= 1",
        });
    }
    if n < 4 {
        return Err(Error::LengthMismatch {
            expected: "n >= 4",
            got: n,
        });
    }
    if n_theta < 64 {
        return Err(Error::LengthMismatch {
            expected: "n_theta >= 64",
            got: n_theta,
        });
    }
    let w = fbdf2_weights(alpha, n + 1)?;
    let b_n = (n as f64).powf(-alpha) * recip_gamma(1.0 - alpha);
    let mut coeffs: Vec<f64> = w.coeffs().to_vec();
    coeffs[n] -= b_n;

    let mut points = Vec::with_capacity(n_theta + 1);
    for m in 0..=n_theta {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / n_theta as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &c) in coeffs.iter().enumerate() {
            let phase = k as f64 * theta;
            re += c * phase.cos();
            im -= c * phase.sin();
        }
        points.push((theta, re, im));
    }
    Ok(StabilityLocus { alpha, n, points })
}

/// Area of the region the locus encloses (even-odd filling on a horizontal
/// scanline grid). Robust to the high-frequency b_n wiggle.
pub fn enclosed_area(locus: &StabilityLocus) -> f64 {
    scanline_area(&locus.points, 1200)
}

fn scanline_area(points: &[(f64, f64, f64)], rows: usize) -> f64 {
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(_, _, y) in points {
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if !(ymax > ymin) {
        return 0.0;
    }
    let dy = (ymax - ymin) / rows as f64;
    let mut area = 0.0;
    let mut crossings: Vec<f64> = Vec::new();
    for r in 0..rows {
        let y = ymin + (r as f64 + 0.5) * dy;
        crossings.clear();
        for w in points.windows(2) {
            let (y0, y1) = (w[0].2, w[1].2);
            if (y0 <= y) != (y1 <= y) {
                let t = (y - y0) / (y1 - y0);
                crossings.push(w[0].1 + t * (w[1].1 - w[0].1));
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut inside = 0.0;
        for pair in crossings.chunks_exact(2) {
            inside += pair[1] - pair[0];
        }
        area += inside * dy;
    }
    area
}

/// Stability-region area inside a plotting window (xmin, xmax, ymin, ymax):
/// the window minus the enclosed lobe.
pub fn stability_region_area(locus: &StabilityLocus, window: (f64, f64, f64, f64)) -> f64 {
    let (xmin, xmax, ymin, ymax) = window;
    (xmax - xmin) * (ymax - ymin) - enclosed_area(locus)
}

/// Max pointwise |z_a(θ) − z_b(θ)| over the shared θ grid, used for the
/// truncation-sensitivity record emitted with locus files.
pub fn locus_shift(a: &StabilityLocus, b: &StabilityLocus) -> Result<f64> {
    if a.points.len() != b.points.len() {
        return Err(Error::LengthMismatch {
            expected: "loci sampled on the same theta grid",
            got: b.points.len(),
        });
    }
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(p, q)| ((p.1 - q.1).powi(2) + (p.2 - q.2).powi(2)).sqrt())
        .fold(0.0, f64::max))
}

/// Forward substitution on the lower-triangular test system
/// (ϖ_0 − λh^α) y_j = b_j y_0 − Σ_{k=1}^{j} ϖ_k y_{j−k}, j = 1..n.
///
/// Returns [y_0, …, y_n].
pub fn scalar_test_solve(alpha: f64, lambda: f64, h: f64, y0: f64, n: usize) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Domain {
            param: "h",
            value: h,
            expected: "h > 0",
        });
    }
    if n < 1 {
        return Err(Error::LengthMismatch {
            expected: "n >= 1",
            got: n,
        });
    }
    let w = fbdf2_weights(alpha, n + 1)?;
    let z = lambda * h.powf(alpha);
    let diag = w[0] - z;
    if diag == 0.0 {
        return Err(Error::SingularMatrix { time_index: None });
    }
    let rg = recip_gamma(1.0 - alpha);
    let mut y = Vec::with_capacity(n + 1);
    y.push(y0);
    for j in 1..=n {
        let b_j = (j as f64).powf(-alpha) * rg;
        let mut conv = 0.0;
        for k in 1..=j {
            conv += w[k] * y[j - k];
        }
        y.push((b_j * y0 - conv) / diag);
    }
    Ok(y)
}
