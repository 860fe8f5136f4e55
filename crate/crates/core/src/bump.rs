//! The smooth cutoff ("bump") used by the sieve weight, its exponentially
//! weighted Fourier transform, and the normalization constant c_φ.
//!
//! The transform is φ̂(x) = ∫ e^t φ(t) e^{ixt} dt over the support [−1, 1].
//! The constant is c_φ = (1/4π²) ∬ (1+iy)(1+iy′)/(2+iy+iy′) φ̂(y) φ̂(y′) dy dy′,
//! which also equals the one-dimensional integral ∫₀¹ φ′(u)² du; three
//! computations of it (tensor Gauss–Legendre, iterated adaptive Simpson, and
//! the derivative form) serve as mutual oracles.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::quad::{self, QuadError};
use crate::Complex;

/// Agreement required between two quadrature refinement levels of φ̂.
const PHI_HAT_LEVEL_TOL: f64 = 1e-9;
/// Stop doubling the tensor-scheme truncation T once a doubling moves the
/// result by less than this.
const TENSOR_DOUBLING_TOL: f64 = 1e-8;
/// Imaginary residue allowed in c_φ (the integrand pairs into a real value).
const IMAG_RESIDUE_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum BumpError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("c_phi came out non-positive ({0}); quadrature is broken")]
    NonPositiveResult(f64),
    #[error("imaginary residue {0:e} exceeds tolerance")]
    ImagResidue(f64),
}

/// A smooth even cutoff supported on [−1, 1] with value 1 at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bump {
    /// exp(−x²/(1−x²)) on (−1, 1), zero outside.
    Mollifier,
}

impl Bump {
    #[must_use]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Bump::Mollifier => {
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let x2 = x * x;
                    (-x2 / (1.0 - x2)).exp()
                }
            }
        }
    }

    #[must_use]
    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Bump::Mollifier => {
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let u = 1.0 - x * x;
                    -2.0 * x / (u * u) * self.eval(x)
                }
            }
        }
    }

    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            Bump::Mollifier => "mollifier",
        }
    }

    pub fn from_label(label: &str) -> Option<Bump> {
        match label {
            "mollifier" => Some(Bump::Mollifier),
            _ => None,
        }
    }
}

/// Gauss–Legendre node count that resolves the e^{ixt} oscillation on [−1, 1].
fn gl_nodes_for(x: f64) -> usize {
    64 + (0.7 * x.abs()).ceil() as usize
}

/// Single-level transform evaluation (Gauss–Legendre over the support).
fn phi_hat_level(bump: &Bump, x: f64, extra: usize) -> Complex {
    let n = gl_nodes_for(x) + extra;
    quad::integrate_gl(
        |t| Complex::new(0.0, x * t).exp() * (t.exp() * bump.eval(t)),
        -1.0,
        1.0,
        n,
    )
}

/// φ̂(x) = ∫_{−1}^{1} e^t φ(t) e^{ixt} dt, with a two-level agreement check.
pub fn phi_hat(bump: &Bump, x: f64) -> Result<Complex, QuadError> {
    let lo = phi_hat_level(bump, x, 0);
    let hi = phi_hat_level(bump, x, 32);
    if (lo - hi).norm() > PHI_HAT_LEVEL_TOL {
        return Err(QuadError::NonConvergence(format!(
            "phi_hat levels disagree by {:.3e} at x = {x}",
            (lo - hi).norm()
        )));
    }
    Ok(hi)
}

/// (1+iy)(1+iy′)/(2+iy+iy′).
fn kernel(y: f64, yp: f64) -> Complex {
    let a = Complex::new(1.0, y);
    let b = Complex::new(1.0, yp);
    a * b / Complex::new(2.0, y + yp)
}

/// Result of a c_φ computation, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CphiReport {
    pub value: f64,
    pub imag_residue: f64,
    /// Truncation of the outer integration domain [−T, T].
    pub t_final: f64,
    pub scheme: &'static str,
}

/// Tensor Gauss–Legendre scheme: evaluate the double integral on an n×n grid
/// over [−T, T]², doubling T (and the grid) until the value stabilizes.
pub fn c_phi_tensor(bump: &Bump) -> Result<CphiReport, BumpError> {
    let norm = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let mut prev: Option<f64> = None;
    let mut t = 20.0;
    while t <= 700.0 {
        let n = (8.0 * t) as usize;
        let (nodes, weights) = quad::gauss_legendre(n);
        let ys: Vec<f64> = nodes.iter().map(|x| t * x).collect();
        let ws: Vec<f64> = weights.iter().map(|w| t * w).collect();
        let fh: Vec<Complex> = ys.iter().map(|&y| phi_hat_level(bump, y, 0)).collect();
        let mut acc = Complex::new(0.0, 0.0);
        for (i, &y) in ys.iter().enumerate() {
            let fy = fh[i] * ws[i];
            for (j, &yp) in ys.iter().enumerate() {
                acc += kernel(y, yp) * fy * fh[j] * ws[j];
            }
        }
        let val = acc * norm;
        if let Some(p) = prev {
            if (val.re - p).abs() < TENSOR_DOUBLING_TOL {
                return finish_report(val, t, "tensor-gl");
            }
        }
        prev = Some(val.re);
        t *= 2.0;
    }
    Err(QuadError::NonConvergence("tensor doubling did not stabilize by T = 700".into()).into())
}

/// Iterated adaptive Simpson scheme on a fixed truncation, with the transform
/// memoized across both integration levels.
pub fn c_phi_iterated(bump: &Bump) -> Result<CphiReport, BumpError> {
    const T: f64 = 200.0;
    let norm = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let memo: RefCell<HashMap<u64, Complex>> = RefCell::new(HashMap::new());
    let fh = |x: f64| -> Complex {
        if let Some(v) = memo.borrow().get(&x.to_bits()) {
            return *v;
        }
        let v = phi_hat_level(bump, x, 0);
        memo.borrow_mut().insert(x.to_bits(), v);
        v
    };
    let inner = |y: f64| -> Result<Complex, QuadError> {
        let fy = fh(y);
        quad::adaptive_simpson(|yp| kernel(y, yp) * fy * fh(yp), -T, T, 2e-8, 44)
    };
    // The outer integrand is itself an integral; failures inside surface as NaN
    // and are caught by the finiteness check below.
    let outer = quad::adaptive_simpson(
        |y| inner(y).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
        -T,
        T,
        2e-7,
        44,
    )?;
    if !outer.re.is_finite() || !outer.im.is_finite() {
        return Err(QuadError::NonConvergence("inner integral failed to converge".into()).into());
    }
    finish_report(outer * norm, T, "iterated-adaptive")
}

fn finish_report(val: Complex, t: f64, scheme: &'static str) -> Result<CphiReport, BumpError> {
    if val.im.abs() > IMAG_RESIDUE_TOL {
        return Err(BumpError::ImagResidue(val.im.abs()));
    }
    if val.re <= 0.0 {
        return Err(BumpError::NonPositiveResult(val.re));
    }
    Ok(CphiReport { value: val.re, imag_residue: val.im.abs(), t_final: t, scheme })
}

/// The same constant as a one-dimensional integral of the squared derivative
/// over the support half; an independent identity used as a third oracle.
pub fn c_phi_derivative_form(bump: &Bump) -> Result<f64, QuadError> {
    let v = quad::adaptive_simpson(
        |u| Complex::new(bump.deriv(u) * bump.deriv(u), 0.0),
        0.0,
        1.0,
        1e-10,
        48,
    )?;
    Ok(v.re)
}

/// Memoized c_φ (tensor scheme); the value is deterministic per bump.
pub fn c_phi_cached(bump: &Bump) -> Result<f64, BumpError> {
    match bump {
        Bump::Mollifier => {
            static CACHE: OnceLock<f64> = OnceLock::new();
            if let Some(v) = CACHE.get() {
                return Ok(*v);
            }
            let v = c_phi_tensor(bump)?.value;
            Ok(*CACHE.get_or_init(|| v))
        }
    }
}
