//! Zeta function of the affine line over F_q: the closed form 1/(1 − q^{1−z}),
//! its residue at z = 1, and truncated Euler products over primes grouped by
//! degree (using exact irreducible counts, no enumeration).

use thiserror::Error;

use crate::factor::count_irreducible;
use crate::field::Fq;
use crate::Complex;

/// How close q^{1−z} may come to 1 before the closed form is treated as a pole.
const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ZetaError {
    #[error("zeta has a pole at z = {0}")]
    PoleAt(Complex),
}

/// 1/(1 − q^{1−z}); the product over all monic irreducibles in closed form.
pub fn zeta_closed(fq: &Fq, z: Complex) -> Result<Complex, ZetaError> {
    let q = fq.q() as f64;
    let denom = Complex::new(1.0, 0.0) - Complex::new(q, 0.0).powc(Complex::new(1.0, 0.0) - z);
    if denom.norm() < POLE_EPS {
        return Err(ZetaError::PoleAt(z));
    }
    Ok(denom.inv())
}

/// Residue of the closed form at the simple pole z = 1.
#[must_use]
pub fn zeta_residue(fq: &Fq) -> f64 {
    1.0 / (fq.q() as f64).ln()
}

/// Partial Euler product over primes of degree ≤ bmax, accumulated in
/// log-space: Σ_d count(d) · (−ln(1 − q^{−zd})), exponentiated once.
#[must_use]
pub fn euler_truncated(fq: &Fq, z: Complex, bmax: u32) -> Complex {
    let q = Complex::new(fq.q() as f64, 0.0);
    let mut log_acc = Complex::new(0.0, 0.0);
    for d in 1..=bmax {
        let count = count_irreducible(fq, d) as f64;
        let local = Complex::new(1.0, 0.0) - q.powc(-z * d as f64);
        log_acc -= count * local.ln();
    }
    log_acc.exp()
}
