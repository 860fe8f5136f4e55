//! Workbench for sieve measures and prime patterns over the rational
//! function field F_q(t).
//!
//! The crate builds, bottom up:
//! - table-backed arithmetic for small finite fields F_q with q = p^e ≤ 32
//!   ([`field`]) and dense polynomial arithmetic over them ([`poly`]);
//! - irreducibility testing, factorization, and exhaustive irreducible
//!   scans ([`factor`]);
//! - effective divisors of the affine line with Möbius and lattice
//!   operations ([`divisor`]), and the closed-form zeta data ([`zeta`]);
//! - a truncated divisor-sum sieve weight Λ_{K,R} and the normalized,
//!   W-tricked measure ν_r built from it ([`sieve`], [`bump`]);
//! - correlation estimators for ν_r against systems of linear forms,
//!   exact local densities, and truncated Euler products ([`correlate`]);
//! - lifts of ν_r to quotient rings F_q[t]/N and the induced hypergraph
//!   measures ([`quotient`]);
//! - search for truncated residue classes consisting entirely of prime
//!   divisors ([`patterns`]).
//!
//! Sweeps over exponentially large boxes use a fixed enumeration order and a
//! fixed-shape pairwise reduction tree ([`reduce`]), so results are
//! bit-identical across thread counts.

pub mod bump;
pub mod correlate;
pub mod divisor;
pub mod factor;
pub mod field;
pub mod patterns;
pub mod poly;
pub mod quad;
pub mod quotient;
pub mod reduce;
pub mod sieve;
pub mod zeta;

pub use field::Fq;
pub use poly::Poly;

/// Exact rational type used for local densities.
pub type Rational = num::rational::Ratio<i128>;
/// Complex type used by zeta values, transforms, and Euler products.
pub type Complex = num::complex::Complex64;
