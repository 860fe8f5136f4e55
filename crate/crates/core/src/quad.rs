//! Numerical quadrature: Gauss–Legendre rules and adaptive Simpson for
//! complex-valued integrands on real intervals.

use thiserror::Error;

use crate::Complex;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// computed by Newton iteration on the Legendre recurrence.
#[must_use]
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre integration of f over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> Complex>(mut f: F, a: f64, b: f64, n: usize) -> Complex {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Halving the tolerance per level eventually asks for less than f64
/// arithmetic can resolve; once the local share reaches this floor the
/// Richardson estimate is pure roundoff and the interval is accepted.
const TOL_FLOOR: f64 = 4.0 * f64::EPSILON;

/// Adaptive Simpson integration of f over [a, b] with absolute tolerance tol.
/// Subdivides until the two-level Richardson estimate is below the local
/// tolerance share (floored at a few machine epsilons); errors out past
/// max_depth.
pub fn adaptive_simpson<F: FnMut(f64) -> Complex>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<Complex, QuadError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    step(&mut f, a, b, fa, fm, fb, whole, tol.max(TOL_FLOOR), max_depth)
}

fn simpson(a: f64, b: f64, fa: Complex, fm: Complex, fb: Complex) -> Complex {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn step<F: FnMut(f64) -> Complex>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: Complex,
    fm: Complex,
    fb: Complex,
    whole: Complex,
    tol: f64,
    depth: u32,
) -> Result<Complex, QuadError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(QuadError::NonConvergence(format!(
            "depth limit reached on [{a}, {b}], residual {:.3e}",
            delta.norm() / 15.0
        )));
    }
    let child_tol = (0.5 * tol).max(TOL_FLOOR);
    let l = step(f, a, m, fa, flm, fm, left, child_tol, depth - 1)?;
    let r = step(f, m, b, fm, frm, fb, right, child_tol, depth - 1)?;
    Ok(l + r)
}
