//! Composite Gauss-Legendre quadrature with geometric panel grading.
//!
//! The series-solution convolutions have piecewise-smooth integrands whose
//! panels must be aligned to kernel breakpoints, with weakly singular
//! behavior possible at panel endpoints. Panels are graded geometrically
//! toward both endpoints; nodes never touch the endpoints, so integrable
//! endpoint singularities are handled without special casing.

/// 12-point Gauss-Legendre nodes and weights on [-1, 1].
const GL12: [(f64, f64); 12] = [
    (-0.9815606342467192507, 0.04717533638651182719),
    (-0.9041172563704748567, 0.10693932599531843100),
    (-0.7699026741943046870, 0.16007832854334622633),
    (-0.5873179542866174473, 0.20316742672306592175),
    (-0.3678314989981801938, 0.23349253653835480876),
    (-0.1252334085114689155, 0.24914704581340278500),
    (0.1252334085114689155, 0.24914704581340278500),
    (0.3678314989981801938, 0.23349253653835480876),
    (0.5873179542866174473, 0.20316742672306592175),
    (0.7699026741943046870, 0.16007832854334622633),
    (0.9041172563704748567, 0.10693932599531843100),
    (0.9815606342467192507, 0.04717533638651182719),
];

/// Single 12-point panel on [a, b].
pub fn gl_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for &(x, w) in &GL12 {
        s += w * f(mid + half * x);
    }
    s * half
}

/// Composite quadrature over [a, b] with panels graded geometrically (ratio
/// 1/2, `depth` levels) toward both endpoints from the midpoint.
pub fn integrate_graded<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, depth: usize) -> f64 {
    if a >= b {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let mut total = 0.0;
    // left half: panels [a + w/2^{d+1}, a + w/2^d], innermost panel includes a
    let wl = mid - a;
    let mut hi = mid;
    for d in 1..depth {
        let lo = a + wl * 0.5f64.powi(d as i32);
        total += gl_panel(f, lo, hi);
        hi = lo;
    }
    total += gl_panel(f, a, hi);
    // right half, mirrored
    let wr = b - mid;
    let mut lo = mid;
    for d in 1..depth {
        let hi2 = b - wr * 0.5f64.powi(d as i32);
        total += gl_panel(f, lo, hi2);
        lo = hi2;
    }
    total += gl_panel(f, lo, b);
    total
}

/// Composite quadrature over [a, b] with `panels` uniform panels.
pub fn integrate_uniform<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, panels: usize) -> f64 {
    let mut total = 0.0;
    let w = (b - a) / panels as f64;
    for i in 0..panels {
        total += gl_panel(f, a + i as f64 * w, a + (i + 1) as f64 * w);
    }
    total
}
