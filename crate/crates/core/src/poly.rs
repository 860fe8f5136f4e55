//! Dense univariate polynomials over a small finite field.
//!
//! Coefficients are stored constant-term first with no trailing zeros, so the
//! zero polynomial is the empty vector and `coeffs.len() = deg + 1` otherwise.
//! All arithmetic takes the field context [`Fq`] explicitly.
//!
//! Enumeration contract: a degree-`d` box (all polynomials of degree < d) or
//! the monic layer of degree d is ordered by reading coefficient vectors as
//! base-q integers, constant term least significant, ascending. Index helpers
//! expose the bijection so sweeps can be partitioned by index range.

use std::cmp::Ordering;

use thiserror::Error;

use crate::field::Fq;

/// Multiplications below this operand length use the schoolbook kernel.
const KARATSUBA_CUTOFF: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivideByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// A polynomial over F_q; see the module docs for the representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<u8>,
}

impl Poly {
    #[must_use]
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    #[must_use]
    pub fn one() -> Poly {
        Poly { coeffs: vec![1] }
    }

    /// The monomial t.
    #[must_use]
    pub fn t() -> Poly {
        Poly { coeffs: vec![0, 1] }
    }

    #[must_use]
    pub fn constant(c: u8) -> Poly {
        if c == 0 {
            Poly::zero()
        } else {
            Poly { coeffs: vec![c] }
        }
    }

    /// c · t^d.
    #[must_use]
    pub fn monomial(c: u8, d: usize) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Poly { coeffs }
    }

    /// Builds from a constant-first coefficient vector, trimming zeros.
    #[must_use]
    pub fn from_coeffs(mut coeffs: Vec<u8>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    #[inline]
    #[must_use]
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    #[inline]
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    #[inline]
    #[must_use]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree of a known-nonzero polynomial; panics on zero.
    #[inline]
    #[must_use]
    pub fn deg(&self) -> usize {
        self.degree().expect("degree of the zero polynomial")
    }

    #[inline]
    #[must_use]
    pub fn leading(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    #[inline]
    #[must_use]
    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    #[must_use]
    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }
}

/// Canonical order: by degree, then by coefficient vector compared from the
/// highest power down. For monic polynomials of equal degree this coincides
/// with comparing enumeration indices.
impl Ord for Poly {
    fn cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Poly) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

#[must_use]
pub fn add(fq: &Fq, a: &Poly, b: &Poly) -> Poly {
    let (long, short) = if a.coeffs.len() >= b.coeffs.len() { (a, b) } else { (b, a) };
    let mut out = long.coeffs.clone();
    for (i, &c) in short.coeffs.iter().enumerate() {
        out[i] = fq.add(out[i], c);
    }
    Poly::from_coeffs(out)
}

#[must_use]
pub fn neg(fq: &Fq, a: &Poly) -> Poly {
    Poly { coeffs: a.coeffs.iter().map(|&c| fq.neg(c)).collect() }
}

#[must_use]
pub fn sub(fq: &Fq, a: &Poly, b: &Poly) -> Poly {
    let mut out = a.coeffs.clone();
    out.resize(out.len().max(b.coeffs.len()), 0);
    for (i, &c) in b.coeffs.iter().enumerate() {
        out[i] = fq.sub(out[i], c);
    }
    Poly::from_coeffs(out)
}

/// Scalar multiple c·a.
#[must_use]
pub fn scale(fq: &Fq, a: &Poly, c: u8) -> Poly {
    if c == 0 {
        return Poly::zero();
    }
    Poly::from_coeffs(a.coeffs.iter().map(|&x| fq.mul(x, c)).collect())
}

/// a · t^k.
#[must_use]
pub fn shift(a: &Poly, k: usize) -> Poly {
    if a.is_zero() {
        return Poly::zero();
    }
    let mut coeffs = vec![0; k + a.coeffs.len()];
    coeffs[k..].copy_from_slice(&a.coeffs);
    Poly { coeffs }
}

#[must_use]
pub fn mul(fq: &Fq, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let out = mul_slices(fq, &a.coeffs, &b.coeffs);
    Poly::from_coeffs(out)
}

fn mul_slices(fq: &Fq, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.len().min(b.len()) <= KARATSUBA_CUTOFF {
        let mut out = vec![0u8; a.len() + b.len() - 1];
        schoolbook_acc(fq, a, b, &mut out);
        out
    } else {
        karatsuba(fq, a, b)
    }
}

/// out[i+j] += a[i] * b[j]; `out` must hold at least a.len()+b.len()-1 slots.
fn schoolbook_acc(fq: &Fq, a: &[u8], b: &[u8], out: &mut [u8]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = fq.add(out[i + j], fq.mul(x, y));
            }
        }
    }
}

fn karatsuba(fq: &Fq, a: &[u8], b: &[u8]) -> Vec<u8> {
    let h = a.len().max(b.len()).div_ceil(2);
    if a.len() <= h || b.len() <= h {
        // Unbalanced: split only the longer operand.
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let (lo, hi) = long.split_at(h);
        let mut out = vec![0u8; a.len() + b.len() - 1];
        let lo_p = mul_slices(fq, trim(lo), short);
        let hi_p = mul_slices(fq, hi, short);
        acc_into(fq, &mut out, &lo_p, 0);
        acc_into(fq, &mut out, &hi_p, h);
        return out;
    }
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let a0 = trim(a0);
    let b0 = trim(b0);
    let z0 = mul_slices(fq, a0, b0);
    let z2 = mul_slices(fq, a1, b1);
    let asum = add_slices(fq, a0, a1);
    let bsum = add_slices(fq, b0, b1);
    let mut z1 = mul_slices(fq, &asum, &bsum);
    sub_from(fq, &mut z1, &z0);
    sub_from(fq, &mut z1, &z2);
    let mut out = vec![0u8; a.len() + b.len() - 1];
    acc_into(fq, &mut out, &z0, 0);
    acc_into(fq, &mut out, &z1, h);
    acc_into(fq, &mut out, &z2, 2 * h);
    out
}

fn trim(a: &[u8]) -> &[u8] {
    let mut n = a.len();
    while n > 0 && a[n - 1] == 0 {
        n -= 1;
    }
    &a[..n]
}

fn add_slices(fq: &Fq, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len().max(b.len())];
    out[..a.len()].copy_from_slice(a);
    for (i, &c) in b.iter().enumerate() {
        out[i] = fq.add(out[i], c);
    }
    out
}

fn acc_into(fq: &Fq, out: &mut [u8], src: &[u8], at: usize) {
    for (i, &c) in src.iter().enumerate() {
        if c != 0 {
            out[at + i] = fq.add(out[at + i], c);
        }
    }
}

fn sub_from(fq: &Fq, out: &mut Vec<u8>, src: &[u8]) {
    if out.len() < src.len() {
        out.resize(src.len(), 0);
    }
    for (i, &c) in src.iter().enumerate() {
        out[i] = fq.sub(out[i], c);
    }
}

/// Quotient and remainder with deg rem < deg b.
pub fn divrem(fq: &Fq, a: &Poly, b: &Poly) -> Result<(Poly, Poly), PolyError> {
    if b.is_zero() {
        return Err(PolyError::DivideByZero);
    }
    if a.coeffs.len() < b.coeffs.len() {
        return Ok((Poly::zero(), a.clone()));
    }
    let db = b.deg();
    let lead_inv = fq.inv(b.leading());
    let mut rem = a.coeffs.clone();
    let mut quot = vec![0u8; a.coeffs.len() - db];
    for top in (db..rem.len()).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        let qc = fq.mul(c, lead_inv);
        quot[top - db] = qc;
        for (k, &bc) in b.coeffs.iter().enumerate() {
            if bc != 0 {
                let idx = top - db + k;
                rem[idx] = fq.sub(rem[idx], fq.mul(qc, bc));
            }
        }
    }
    rem.truncate(db);
    Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
}

pub fn rem(fq: &Fq, a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
    Ok(divrem(fq, a, b)?.1)
}

/// In-place remainder kernel on a raw coefficient buffer (`buf` is the
/// dividend, already trimmed or not); leaves the remainder (untrimmed tail
/// zeros possible). `b` must be nonzero and trimmed.
pub(crate) fn rem_in_place(fq: &Fq, buf: &mut Vec<u8>, b: &[u8]) {
    let db = b.len() - 1;
    if buf.len() <= db {
        return;
    }
    let lead_inv = fq.inv(b[db]);
    for top in (db..buf.len()).rev() {
        let c = buf[top];
        if c == 0 {
            continue;
        }
        let qc = fq.mul(c, lead_inv);
        for (k, &bc) in b.iter().enumerate() {
            if bc != 0 {
                let idx = top - db + k;
                buf[idx] = fq.sub(buf[idx], fq.mul(qc, bc));
            }
        }
    }
    buf.truncate(db);
}

/// True iff b divides a (b nonzero).
pub(crate) fn divides(fq: &Fq, b: &Poly, a: &[u8], scratch: &mut Vec<u8>) -> bool {
    scratch.clear();
    scratch.extend_from_slice(a);
    rem_in_place(fq, scratch, &b.coeffs);
    scratch.iter().all(|&c| c == 0)
}

/// Monic normalization: (monic part, leading unit). Zero maps to (0, 0).
#[must_use]
pub fn monic(fq: &Fq, a: &Poly) -> (Poly, u8) {
    if a.is_zero() {
        return (Poly::zero(), 0);
    }
    let lead = a.leading();
    if lead == 1 {
        (a.clone(), 1)
    } else {
        (scale(fq, a, fq.inv(lead)), lead)
    }
}

/// Monic greatest common divisor; gcd(0, 0) = 0.
#[must_use]
pub fn gcd(fq: &Fq, a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = rem(fq, &x, &y).expect("y nonzero");
        x = y;
        y = r;
    }
    monic(fq, &x).0
}

/// base^exp mod m (m nonconstant).
pub fn pow_mod(fq: &Fq, base: &Poly, mut exp: u128, m: &Poly) -> Result<Poly, PolyError> {
    if m.is_zero() {
        return Err(PolyError::DivideByZero);
    }
    let mut acc = rem(fq, &Poly::one(), m)?;
    let mut b = rem(fq, base, m)?;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(fq, &mul(fq, &acc, &b), m)?;
        }
        b = rem(fq, &mul(fq, &b, &b), m)?;
        exp >>= 1;
    }
    Ok(acc)
}

/// Formal derivative.
#[must_use]
pub fn derivative(fq: &Fq, a: &Poly) -> Poly {
    if a.coeffs.len() <= 1 {
        return Poly::zero();
    }
    let p = fq.p();
    let out: Vec<u8> = a
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| fq.mul((i as u32 % p) as u8, c))
        .collect();
    Poly::from_coeffs(out)
}

/// Evaluation at a field element (Horner).
#[must_use]
pub fn eval(fq: &Fq, a: &Poly, x: u8) -> u8 {
    a.coeffs.iter().rev().fold(0u8, |acc, &c| fq.add(fq.mul(acc, x), c))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// q^d as a u64; panics if it does not fit.
#[must_use]
pub fn box_len(fq: &Fq, d: u32) -> u64 {
    box_len_checked(fq, d).expect("box size exceeds u64")
}

/// q^d when it fits in a u64.
#[must_use]
pub fn box_len_checked(fq: &Fq, d: u32) -> Option<u64> {
    (fq.q() as u64).checked_pow(d)
}

/// The idx-th polynomial of degree < d (base-q digits of idx, ascending).
#[must_use]
pub fn below_index(fq: &Fq, d: u32, idx: u64) -> Poly {
    let q = fq.q() as u64;
    let mut coeffs = vec![0u8; d as usize];
    let mut n = idx;
    for c in coeffs.iter_mut() {
        *c = (n % q) as u8;
        n /= q;
    }
    debug_assert_eq!(n, 0, "index out of range for the degree-{d} box");
    Poly::from_coeffs(coeffs)
}

/// The idx-th monic polynomial of degree d.
#[must_use]
pub fn monic_index(fq: &Fq, d: u32, idx: u64) -> Poly {
    let q = fq.q() as u64;
    let mut coeffs = vec![0u8; d as usize + 1];
    let mut n = idx;
    for c in coeffs.iter_mut().take(d as usize) {
        *c = (n % q) as u8;
        n /= q;
    }
    debug_assert_eq!(n, 0, "index out of range for monic degree {d}");
    coeffs[d as usize] = 1;
    Poly { coeffs }
}

/// Enumeration index of a polynomial inside a degree box (base-q value of the
/// full coefficient vector).
#[must_use]
pub fn box_index(fq: &Fq, a: &Poly) -> u64 {
    let q = fq.q() as u64;
    a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
}

/// Digit-wise sum of two box indices of width d (index of the polynomial sum).
#[must_use]
pub fn index_add(fq: &Fq, a: u64, b: u64, d: u32) -> u64 {
    let q = fq.q() as u64;
    let mut out = 0u64;
    let mut mult = 1u64;
    let (mut a, mut b) = (a, b);
    for _ in 0..d {
        let s = fq.add((a % q) as u8, (b % q) as u8) as u64;
        out += s * mult;
        mult *= q;
        a /= q;
        b /= q;
    }
    out
}

/// Iterator over an index range of a fixed enumeration layer.
pub struct PolyRange<'a> {
    fq: &'a Fq,
    d: u32,
    idx: u64,
    end: u64,
    monic: bool,
}

impl<'a> Iterator for PolyRange<'a> {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.idx >= self.end {
            return None;
        }
        let p = if self.monic {
            monic_index(self.fq, self.d, self.idx)
        } else {
            below_index(self.fq, self.d, self.idx)
        };
        self.idx += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.idx) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for PolyRange<'_> {}

/// All monic polynomials of degree d, ascending enumeration order.
#[must_use]
pub fn monic_polys(fq: &Fq, d: u32) -> PolyRange<'_> {
    PolyRange { fq, d, idx: 0, end: box_len(fq, d), monic: true }
}

/// A contiguous index slice of the monic degree-d layer.
#[must_use]
pub fn monic_slice(fq: &Fq, d: u32, start: u64, end: u64) -> PolyRange<'_> {
    assert!(start <= end && end <= box_len(fq, d));
    PolyRange { fq, d, idx: start, end, monic: true }
}

/// All polynomials of degree < d (including zero), ascending enumeration order.
#[must_use]
pub fn polys_below(fq: &Fq, d: u32) -> PolyRange<'_> {
    PolyRange { fq, d, idx: 0, end: box_len(fq, d), monic: false }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Canonical text: comma-separated coefficients, constant term first.
/// Prime fields print integers; extensions print "/"-separated F_p digits.
#[must_use]
pub fn to_text(fq: &Fq, a: &Poly) -> String {
    if a.is_zero() {
        return if fq.e() == 1 {
            "0".to_owned()
        } else {
            std::iter::repeat_n("0", fq.e() as usize).collect::<Vec<_>>().join("/")
        };
    }
    a.coeffs
        .iter()
        .map(|&c| {
            if fq.e() == 1 {
                c.to_string()
            } else {
                let p = fq.p();
                let mut n = c as u32;
                let mut digits = Vec::with_capacity(fq.e() as usize);
                for _ in 0..fq.e() {
                    digits.push((n % p).to_string());
                    n /= p;
                }
                digits.join("/")
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse(fq: &Fq, s: &str) -> Result<Poly, PolyError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(PolyError::Parse("empty string".into()));
    }
    let mut coeffs = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let c = if part.contains('/') {
            if fq.e() == 1 {
                return Err(PolyError::Parse(format!(
                    "'/'-separated coefficient {part} in a prime field"
                )));
            }
            let digits: Result<Vec<u32>, _> = part.split('/').map(|d| d.trim().parse::<u32>()).collect();
            let digits = digits.map_err(|e| PolyError::Parse(format!("{part}: {e}")))?;
            if digits.len() != fq.e() as usize {
                return Err(PolyError::Parse(format!(
                    "coefficient {part} must have {} F_{} digits",
                    fq.e(),
                    fq.p()
                )));
            }
            let mut idx = 0u32;
            for &d in digits.iter().rev() {
                if d >= fq.p() {
                    return Err(PolyError::Parse(format!("digit {d} not below p = {}", fq.p())));
                }
                idx = idx * fq.p() + d;
            }
            idx as u8
        } else {
            let v: u32 = part.parse().map_err(|e| PolyError::Parse(format!("{part}: {e}")))?;
            if v >= fq.q() {
                return Err(PolyError::Parse(format!("coefficient {v} not below q = {}", fq.q())));
            }
            v as u8
        };
        coeffs.push(c);
    }
    Ok(Poly::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::new(2, 1).unwrap()
    }

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn zero_is_empty_and_degreeless() {
        let z = Poly::from_coeffs(vec![0, 0, 0]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z, Poly::zero());
    }

    #[test]
    fn divrem_worked_example_over_f3() {
        let fq = f3();
        let a = Poly::monomial(1, 2); // t^2
        let b = Poly::from_coeffs(vec![1, 1]); // t + 1
        let (q, r) = divrem(&fq, &a, &b).unwrap();
        assert_eq!(q, Poly::from_coeffs(vec![2, 1])); // t + 2
        assert_eq!(r, Poly::constant(1));
        // Reassemble.
        assert_eq!(add(&fq, &mul(&fq, &q, &b), &r), a);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let fq = f2();
        assert_eq!(divrem(&fq, &Poly::one(), &Poly::zero()).unwrap_err(), PolyError::DivideByZero);
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let fq = Fq::new(5, 1).unwrap();
        // Two pseudo-random polynomials long enough to cross the cutoff.
        let a = Poly::from_coeffs((0..200u32).map(|i| ((i * i * 7 + 3) % 5) as u8).collect());
        let b = Poly::from_coeffs((0..150u32).map(|i| ((i * 13 + 1) % 5) as u8).collect());
        let fast = mul(&fq, &a, &b);
        let mut slow = vec![0u8; a.coeffs().len() + b.coeffs().len() - 1];
        schoolbook_acc(&fq, a.coeffs(), b.coeffs(), &mut slow);
        assert_eq!(fast, Poly::from_coeffs(slow));
    }

    #[test]
    fn gcd_is_monic_and_divides() {
        let fq = f3();
        let p1 = Poly::from_coeffs(vec![1, 1]); // t+1
        let p2 = Poly::from_coeffs(vec![2, 1]); // t+2
        let a = mul(&fq, &mul(&fq, &p1, &p1), &p2);
        let b = mul(&fq, &p1, &Poly::from_coeffs(vec![1, 0, 1]));
        let g = gcd(&fq, &a, &b);
        assert!(g.is_monic());
        assert!(rem(&fq, &a, &g).unwrap().is_zero());
        assert!(rem(&fq, &b, &g).unwrap().is_zero());
        assert_eq!(g, p1);
        // Scaling either argument by a unit does not change the gcd.
        assert_eq!(gcd(&fq, &scale(&fq, &a, 2), &b), g);
    }

    #[test]
    fn enumeration_is_base_q_ascending() {
        let fq = f2();
        let layer: Vec<Poly> = monic_polys(&fq, 2).collect();
        assert_eq!(
            layer,
            vec![
                Poly::from_coeffs(vec![0, 0, 1]), // t^2
                Poly::from_coeffs(vec![1, 0, 1]), // t^2 + 1
                Poly::from_coeffs(vec![0, 1, 1]), // t^2 + t
                Poly::from_coeffs(vec![1, 1, 1]), // t^2 + t + 1
            ]
        );
        assert_eq!(layer.len(), 4);
        // Index round trip on the degree-3 box.
        for idx in 0..box_len(&fq, 3) {
            let p = below_index(&fq, 3, idx);
            assert_eq!(box_index(&fq, &p), idx);
        }
        // Slices partition the layer.
        let first: Vec<Poly> = monic_slice(&fq, 2, 0, 2).collect();
        let second: Vec<Poly> = monic_slice(&fq, 2, 2, 4).collect();
        assert_eq!([first, second].concat(), layer);
    }

    #[test]
    fn index_add_matches_poly_add() {
        let fq = f3();
        for a in 0..27 {
            for b in 0..27 {
                let pa = below_index(&fq, 3, a);
                let pb = below_index(&fq, 3, b);
                let sum = add(&fq, &pa, &pb);
                assert_eq!(index_add(&fq, a, b, 3), box_index(&fq, &sum));
            }
        }
    }

    #[test]
    fn text_round_trips() {
        let fq = f2();
        let p = parse(&fq, "1,1,1").unwrap();
        assert_eq!(p, Poly::from_coeffs(vec![1, 1, 1]));
        assert_eq!(to_text(&fq, &p), "1,1,1");
        assert_eq!(to_text(&fq, &Poly::zero()), "0");
        assert_eq!(parse(&fq, "0").unwrap(), Poly::zero());

        let f4 = Fq::new(2, 2).unwrap();
        let p = parse(&f4, "1/0,0/1,1/0").unwrap();
        assert_eq!(p.coeffs(), &[1, 2, 1]);
        assert_eq!(to_text(&f4, &p), "1/0,0/1,1/0");
        // Plain indices are accepted on input even for extensions.
        assert_eq!(parse(&f4, "3,1").unwrap().coeffs(), &[3, 1]);
        assert!(parse(&f4, "0/2,1/0").is_err()); // digit ≥ p
        assert!(parse(&fq, "2,1").is_err()); // coefficient ≥ q
        assert!(parse(&fq, "").is_err());
        assert!(parse(&fq, "1/1").is_err()); // '/' digits in a prime field
    }

    #[test]
    fn derivative_and_eval() {
        let fq = f3();
        // f = t^3 + 2t + 1: f' = 3t^2 + 2 = 2 (char 3 kills the cube).
        let f = Poly::from_coeffs(vec![1, 2, 0, 1]);
        assert_eq!(derivative(&fq, &f), Poly::constant(2));
        assert_eq!(eval(&fq, &f, 0), 1);
        assert_eq!(eval(&fq, &f, 1), 1); // 1 + 2 + 1 = 4 = 1
        assert_eq!(eval(&fq, &f, 2), 1); // 8 + 4 + 1 = 13 = 1
    }

    #[test]
    fn pow_mod_small_fermat() {
        let fq = f2();
        let m = Poly::from_coeffs(vec![1, 1, 1]); // irreducible
        // t^(2^2) = t mod m for any irreducible quadratic.
        let r = pow_mod(&fq, &Poly::t(), 4, &m).unwrap();
        assert_eq!(r, Poly::t());
    }
}
