//! Small finite fields F_q, q = p^e ≤ 32, with table-backed arithmetic.
//!
//! Elements are canonical indices `0..q` packed in a `u8`: the index is the
//! base-p value of the element's coefficient vector over F_p (constant
//! coordinate least significant). For e = 1 the index is just the residue
//! mod p. For e > 1 the field is F_p[u]/(m(u)) where m is the monic
//! irreducible of degree e whose coefficient vector has the lowest base-p
//! value; this makes the representation reproducible across runs.

use thiserror::Error;

/// Largest supported field size; keeps every table at most 32×32 bytes.
pub const MAX_Q: u32 = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    BadExtension,
    #[error("field size {q} = {p}^{e} exceeds the supported maximum {MAX_Q}")]
    TooLarge { p: u32, e: u32, q: u32 },
}

/// A small finite field with precomputed operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u32,
    e: u32,
    q: u32,
    /// Monic irreducible modulus over F_p (coefficients constant-first,
    /// length e+1). `None` for prime fields.
    modulus: Option<Vec<u8>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Fq {
    /// Builds F_{p^e}. The extension modulus is chosen deterministically.
    pub fn new(p: u32, e: u32) -> Result<Fq, FieldError> {
        if !is_prime_u32(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::BadExtension);
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_Q)
            .ok_or(FieldError::TooLarge { p, e, q: u32::MAX })?;
        if q > MAX_Q {
            return Err(FieldError::TooLarge { p, e, q });
        }

        let modulus = if e == 1 { None } else { Some(extension_modulus(p, e)) };
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];

        for a in 0..q {
            for b in 0..q {
                add[(a * q + b) as usize] = add_indices(p, e, a, b);
                mul[(a * q + b) as usize] = mul_indices(p, e, modulus.as_deref(), a, b);
            }
        }
        for a in 0..q {
            let mut n = a;
            while add[(a * q + n) as usize] != 0 {
                n = (n + 1) % q;
            }
            neg[a as usize] = n as u8;
            if a != 0 {
                for b in 1..q {
                    if mul[(a * q + b) as usize] == 1 {
                        inv[a as usize] = b as u8;
                        break;
                    }
                }
            }
        }

        Ok(Fq { p, e, q, modulus, add, mul, neg, inv })
    }

    #[inline]
    #[must_use]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    #[must_use]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    #[must_use]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// The extension modulus over F_p (constant-first), absent for e = 1.
    #[must_use]
    pub fn modulus(&self) -> Option<&[u8]> {
        self.modulus.as_deref()
    }

    #[inline]
    #[must_use]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    #[must_use]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    #[must_use]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    #[must_use]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    #[must_use]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    #[must_use]
    pub fn pow(&self, mut a: u8, mut k: u64) -> u8 {
        let mut acc = 1u8;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        acc
    }

    /// p-th root of an element (the Frobenius x ↦ x^p is bijective).
    #[must_use]
    pub fn proot(&self, a: u8) -> u8 {
        // a^(p^(e-1)) since a^(p^e) = a.
        let mut acc = a;
        for _ in 1..self.e {
            acc = self.pow(acc, self.p as u64);
        }
        acc
    }
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Index arithmetic over F_{p^e} seen as coefficient vectors base p.
fn digits(p: u32, e: u32, a: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(e as usize);
    let mut a = a;
    for _ in 0..e {
        v.push(a % p);
        a /= p;
    }
    v
}

fn undigits(p: u32, v: &[u32]) -> u32 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn add_indices(p: u32, e: u32, a: u32, b: u32) -> u8 {
    let da = digits(p, e, a);
    let db = digits(p, e, b);
    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    undigits(p, &sum) as u8
}

fn mul_indices(p: u32, e: u32, modulus: Option<&[u8]>, a: u32, b: u32) -> u8 {
    if e == 1 {
        return ((a * b) % p) as u8;
    }
    let m = modulus.expect("extension field requires a modulus");
    let da = digits(p, e, a);
    let db = digits(p, e, b);
    // Schoolbook product of the coefficient vectors.
    let mut prod = vec![0u32; 2 * e as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce mod the monic modulus of degree e.
    for i in (e as usize..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (k, &mc) in m.iter().enumerate().take(e as usize) {
            let idx = i - e as usize + k;
            // prod[idx] -= c * m[k]
            let sub = (c * mc as u32) % p;
            prod[idx] = (prod[idx] + p - sub) % p;
        }
    }
    undigits(p, &prod[..e as usize]) as u8
}

/// Monic irreducibles over F_p of degree `maxdeg` or less, each encoded as a
/// constant-first coefficient vector. Used only while building field tables.
fn prime_field_irreducibles(p: u32, maxdeg: u32) -> Vec<Vec<u8>> {
    let mut irred: Vec<Vec<u8>> = Vec::new();
    for d in 1..=maxdeg {
        let count = p.pow(d);
        'cand: for idx in 0..count {
            let mut coeffs: Vec<u8> = digits(p, d, idx).iter().map(|&c| c as u8).collect();
            coeffs.push(1); // monic of degree d
            for g in irred.iter().filter(|g| 2 * (g.len() - 1) <= d as usize) {
                if fp_rem_is_zero(p, &coeffs, g) {
                    continue 'cand;
                }
            }
            irred.push(coeffs);
        }
    }
    irred
}

fn fp_rem_is_zero(p: u32, f: &[u8], g: &[u8]) -> bool {
    let mut r: Vec<u32> = f.iter().map(|&c| c as u32).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let top = r.len() - 1;
        if lead != 0 {
            // g is monic: subtract lead * g * t^(top-dg)
            for (k, &gc) in g.iter().enumerate() {
                let idx = top - dg + k;
                let sub = (lead * gc as u32) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

fn extension_modulus(p: u32, e: u32) -> Vec<u8> {
    prime_field_irreducibles(p, e)
        .into_iter()
        .find(|f| f.len() == e as usize + 1)
        .expect("an irreducible of every degree exists over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_characteristic() {
        assert_eq!(Fq::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Fq::new(1, 1).unwrap_err(), FieldError::NotPrime(1));
    }

    #[test]
    fn rejects_oversized_fields() {
        assert!(matches!(Fq::new(2, 6), Err(FieldError::TooLarge { .. })));
        assert!(matches!(Fq::new(7, 2), Err(FieldError::TooLarge { .. })));
        assert_eq!(Fq::new(2, 0).unwrap_err(), FieldError::BadExtension);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Fq::new(5, 1).unwrap();
        assert_eq!(f.q(), 5);
        assert_eq!(f.add(3, 4), 2);
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.neg(2), 3);
        assert_eq!(f.inv(3), 2);
        assert!(f.modulus().is_none());
    }

    #[test]
    fn f4_uses_lowest_modulus() {
        let f = Fq::new(2, 2).unwrap();
        // t^2 + t + 1 is the only irreducible quadratic over F_2.
        assert_eq!(f.modulus(), Some(&[1u8, 1, 1][..]));
        // With a the class of t (index 2): a^2 = a + 1 (index 3).
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1); // a * (a+1) = a^2 + a = 1
        assert_eq!(f.inv(2), 3);
    }

    #[test]
    fn f9_uses_lowest_modulus() {
        let f = Fq::new(3, 2).unwrap();
        // Scanning by base-3 value: t^2 + 1 is the first irreducible quadratic.
        assert_eq!(f.modulus(), Some(&[1u8, 0, 1][..]));
        // u^2 = -1 = 2: index of u is 3, index of 2 is 2.
        assert_eq!(f.mul(3, 3), 2);
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for (p, e) in [(2, 1), (2, 5), (3, 3), (5, 2), (31, 1), (2, 4), (3, 2)] {
            let f = Fq::new(p, e).unwrap();
            for a in 1..f.q() as u8 {
                assert_eq!(f.mul(a, f.inv(a)), 1, "q={} a={}", f.q(), a);
            }
            // Field axioms spot checks: distributivity on a few triples.
            let q = f.q() as u8;
            for a in 0..q {
                for b in 0..q {
                    for c in [0, 1, q - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_root_inverts_pth_power() {
        let f = Fq::new(2, 4).unwrap();
        for a in 0..16u8 {
            assert_eq!(f.proot(f.pow(a, 2)), a);
            assert_eq!(f.pow(f.proot(a), 2), a);
        }
    }
}
