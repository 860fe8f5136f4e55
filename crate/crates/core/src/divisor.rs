//! Effective divisors on the affine line as factored monic polynomials,
//! the divisor lattice, and the Möbius function on divisors.
//!
//! A divisor is a finite multiset of monic irreducibles ("primes"); the empty
//! multiset is the zero divisor. Keys are kept in canonical order (degree,
//! then enumeration index), which fixes every iteration order downstream.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::factor::{self, Factorization};
use crate::field::Fq;
use crate::poly::{self, Poly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DivisorError {
    #[error("the zero polynomial has no divisor")]
    ZeroPolynomial,
    #[error("{0:?} is not a monic irreducible")]
    NotPrime(Poly),
    #[error("twist polynomial must be monic and squarefree, got {0:?}")]
    BadTwist(Poly),
    #[error("cannot parse divisor: {0}")]
    Parse(String),
}

/// An effective divisor: map from monic irreducible to multiplicity ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    primes: BTreeMap<Poly, u32>,
}

impl Divisor {
    #[must_use]
    pub fn zero() -> Divisor {
        Divisor { primes: BTreeMap::new() }
    }

    /// Single prime with multiplicity; the caller vouches for irreducibility.
    pub fn prime_power(fq: &Fq, p: Poly, mult: u32) -> Result<Divisor, DivisorError> {
        if !factor::is_irreducible(fq, &p) || !p.is_monic() {
            return Err(DivisorError::NotPrime(p));
        }
        let mut primes = BTreeMap::new();
        if mult > 0 {
            primes.insert(p, mult);
        }
        Ok(Divisor { primes })
    }

    #[must_use]
    pub fn from_factorization(fac: &Factorization) -> Divisor {
        Divisor { primes: fac.factors.iter().cloned().collect() }
    }

    #[inline]
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of distinct primes.
    #[must_use]
    pub fn support_size(&self) -> usize {
        self.primes.len()
    }

    #[must_use]
    pub fn multiplicity(&self, p: &Poly) -> u32 {
        self.primes.get(p).copied().unwrap_or(0)
    }

    /// Iterates (prime, multiplicity) in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.primes.iter().map(|(p, &m)| (p, m))
    }

    /// Σ multiplicity · deg(prime).
    #[must_use]
    pub fn degree(&self) -> u64 {
        self.primes.iter().map(|(p, &m)| p.deg() as u64 * m as u64).sum()
    }

    /// N(D) = q^{deg D} as a float (exact for small degrees).
    #[must_use]
    pub fn norm(&self, fq: &Fq) -> f64 {
        (fq.q() as f64).powi(self.degree() as i32)
    }

    #[must_use]
    pub fn is_squarefree(&self) -> bool {
        self.primes.values().all(|&m| m == 1)
    }

    /// Degrees of the distinct primes, in canonical order.
    #[must_use]
    pub fn prime_degrees(&self) -> Vec<usize> {
        self.primes.keys().map(Poly::deg).collect()
    }

    /// Pointwise multiplicity sum (divisor of a product).
    #[must_use]
    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut primes = self.primes.clone();
        for (p, &m) in &other.primes {
            *primes.entry(p.clone()).or_insert(0) += m;
        }
        Divisor { primes }
    }

    /// Pointwise comparison: self ≤ other.
    #[must_use]
    pub fn leq(&self, other: &Divisor) -> bool {
        self.primes.iter().all(|(p, &m)| other.multiplicity(p) >= m)
    }

    /// Pointwise maximum.
    #[must_use]
    pub fn lcm(&self, other: &Divisor) -> Divisor {
        let mut primes = self.primes.clone();
        for (p, &m) in &other.primes {
            let e = primes.entry(p.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        Divisor { primes }
    }

    /// Pointwise minimum.
    #[must_use]
    pub fn meet(&self, other: &Divisor) -> Divisor {
        let primes = self
            .primes
            .iter()
            .filter_map(|(p, &m)| {
                let n = other.multiplicity(p).min(m);
                (n > 0).then(|| (p.clone(), n))
            })
            .collect();
        Divisor { primes }
    }

    /// The product polynomial ∏ p^m (monic).
    #[must_use]
    pub fn to_poly(&self, fq: &Fq) -> Poly {
        let mut acc = Poly::one();
        for (p, &m) in &self.primes {
            for _ in 0..m {
                acc = poly::mul(fq, &acc, p);
            }
        }
        acc
    }

    /// All divisors M ≤ self, by odometer over the canonical factor list;
    /// yields exactly ∏ (multiplicity + 1) divisors starting from zero.
    #[must_use]
    pub fn divisors_below(&self) -> DivisorsBelow<'_> {
        DivisorsBelow {
            factors: self.primes.iter().map(|(p, &m)| (p, m)).collect(),
            counters: vec![0; self.primes.len()],
            done: false,
        }
    }
}

/// Odometer stream over the sub-divisor lattice.
pub struct DivisorsBelow<'a> {
    factors: Vec<(&'a Poly, u32)>,
    counters: Vec<u32>,
    done: bool,
}

impl Iterator for DivisorsBelow<'_> {
    type Item = Divisor;

    fn next(&mut self) -> Option<Divisor> {
        if self.done {
            return None;
        }
        let current = Divisor {
            primes: self
                .factors
                .iter()
                .zip(&self.counters)
                .filter(|&(_, &c)| c > 0)
                .map(|(&(p, _), &c)| (p.clone(), c))
                .collect(),
        };
        // Advance the odometer, first position fastest.
        let mut i = 0;
        loop {
            if i == self.counters.len() {
                self.done = true;
                break;
            }
            if self.counters[i] < self.factors[i].1 {
                self.counters[i] += 1;
                break;
            }
            self.counters[i] = 0;
            i += 1;
        }
        Some(current)
    }
}

/// Divisor of a nonzero polynomial (of its monic normalization).
pub fn divisor_of(fq: &Fq, f: &Poly) -> Result<Divisor, DivisorError> {
    let fac = factor::factor(fq, f).map_err(|_| DivisorError::ZeroPolynomial)?;
    Ok(Divisor::from_factorization(&fac))
}

/// Möbius function: (−1)^k on k distinct primes, 0 when not squarefree;
/// the zero divisor gives 1.
#[must_use]
pub fn mobius(d: &Divisor) -> i64 {
    if !d.is_squarefree() {
        return 0;
    }
    if d.support_size() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The ambient model: the affine line over F_q, with an optional monic
/// squarefree twist g. Elements of the working space are stored as numerators
/// h of h/g, so the divisor attached to h/g is simply the divisor of h; the
/// default g = 1 makes numerators the polynomials themselves.
#[derive(Debug, Clone)]
pub struct CurveModel {
    fq: Fq,
    twist: Poly,
}

impl CurveModel {
    /// The untwisted affine line (g = 1).
    #[must_use]
    pub fn line(fq: Fq) -> CurveModel {
        CurveModel { fq, twist: Poly::one() }
    }

    /// Affine line with a monic squarefree twist g.
    pub fn with_twist(fq: Fq, twist: Poly) -> Result<CurveModel, DivisorError> {
        if twist.is_zero() || !twist.is_monic() {
            return Err(DivisorError::BadTwist(twist));
        }
        let fac = factor::factor(&fq, &twist).expect("twist nonzero");
        if !fac.is_squarefree() {
            return Err(DivisorError::BadTwist(twist));
        }
        Ok(CurveModel { fq, twist })
    }

    #[inline]
    #[must_use]
    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    #[inline]
    #[must_use]
    pub fn twist(&self) -> &Poly {
        &self.twist
    }

    /// Degree of the field over the rational function field; fixed to 1 in
    /// this model.
    #[inline]
    #[must_use]
    pub fn extension_degree(&self) -> u32 {
        1
    }
}

/// Canonical divisor text: semicolon-separated "poly^mult" entries in
/// canonical order; the zero divisor prints as "0".
#[must_use]
pub fn to_text(fq: &Fq, d: &Divisor) -> String {
    if d.is_zero() {
        return "0".to_owned();
    }
    let mut out = String::new();
    for (i, (p, m)) in d.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        let _ = write!(out, "{}^{}", poly::to_text(fq, p), m);
    }
    out
}

pub fn parse(fq: &Fq, s: &str) -> Result<Divisor, DivisorError> {
    let s = s.trim();
    if s == "0" {
        return Ok(Divisor::zero());
    }
    let mut primes = BTreeMap::new();
    for entry in s.split(';') {
        let (ptext, mtext) = entry
            .rsplit_once('^')
            .ok_or_else(|| DivisorError::Parse(format!("entry {entry} lacks ^mult")))?;
        let p = poly::parse(fq, ptext).map_err(|e| DivisorError::Parse(e.to_string()))?;
        let m: u32 = mtext
            .trim()
            .parse()
            .map_err(|e| DivisorError::Parse(format!("multiplicity {mtext}: {e}")))?;
        if m == 0 || !p.is_monic() || !factor::is_irreducible(fq, &p) {
            return Err(DivisorError::NotPrime(p));
        }
        if primes.insert(p.clone(), m).is_some() {
            return Err(DivisorError::Parse(format!("duplicate prime {ptext}")));
        }
    }
    Ok(Divisor { primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::new(2, 1).unwrap()
    }

    fn div_of(fq: &Fq, coeffs: Vec<u8>) -> Divisor {
        divisor_of(fq, &Poly::from_coeffs(coeffs)).unwrap()
    }

    #[test]
    fn divisor_of_examples() {
        let fq = f2();
        let d = div_of(&fq, vec![0, 1, 1]); // t^2 + t
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.multiplicity(&Poly::t()), 1);
        assert_eq!(d.multiplicity(&Poly::from_coeffs(vec![1, 1])), 1);
        assert_eq!(d.degree(), 2);

        assert!(divisor_of(&fq, &Poly::one()).unwrap().is_zero());
        assert_eq!(divisor_of(&fq, &Poly::zero()).unwrap_err(), DivisorError::ZeroPolynomial);

        // Units are divided out: 2t+2 over F_3 has the divisor of t+1.
        let f3 = Fq::new(3, 1).unwrap();
        let d = div_of(&f3, vec![2, 2]);
        assert_eq!(d.prime_degrees(), vec![1]);
        assert_eq!(d.multiplicity(&Poly::from_coeffs(vec![1, 1])), 1);
    }

    #[test]
    fn mobius_values() {
        let fq = f2();
        assert_eq!(mobius(&Divisor::zero()), 1);
        assert_eq!(mobius(&div_of(&fq, vec![0, 0, 1])), 0); // t^2
        assert_eq!(mobius(&div_of(&fq, vec![0, 1, 1])), 1); // t(t+1), two primes
        assert_eq!(mobius(&div_of(&fq, vec![0, 1])), -1); // t
    }

    #[test]
    fn mobius_multiplicative_on_coprime() {
        let fq = f2();
        let a = div_of(&fq, vec![0, 1]); // t
        let b = div_of(&fq, vec![1, 1, 1]); // t^2+t+1
        assert!(a.meet(&b).is_zero());
        assert_eq!(mobius(&a.add(&b)), mobius(&a) * mobius(&b));
    }

    #[test]
    fn lattice_ops_are_pointwise() {
        let fq = f2();
        let t1 = div_of(&fq, vec![0, 1]); // {t:1}
        let mixed = div_of(&fq, vec![0, 0, 1]).add(&div_of(&fq, vec![1, 1])); // {t:2, t+1:1}
        assert!(t1.leq(&mixed));
        assert!(!mixed.leq(&t1));
        assert_eq!(t1.lcm(&mixed), mixed);
        assert_eq!(t1.meet(&mixed), t1);

        let a = div_of(&fq, vec![0, 0, 1]); // {t:2}
        // t(t+1)^3 = t^4+t^3+t^2+t has divisor {t:1, t+1:3}.
        let b = div_of(&fq, vec![0, 1, 1, 1, 1]);
        assert_eq!(b.multiplicity(&Poly::t()), 1);
        assert_eq!(b.multiplicity(&Poly::from_coeffs(vec![1, 1])), 3);
        assert_eq!(a.meet(&b), t1); // min(2,1) on t; t+1 absent from a
    }

    #[test]
    fn divisors_below_counts_and_order() {
        let fq = f2();
        assert_eq!(Divisor::zero().divisors_below().count(), 1);

        let t1 = div_of(&fq, vec![0, 1]);
        let below: Vec<Divisor> = t1.divisors_below().collect();
        assert_eq!(below, vec![Divisor::zero(), t1.clone()]);

        let d = div_of(&fq, vec![0, 1, 1]); // t(t+1)
        assert_eq!(d.divisors_below().count(), 4);

        let big = div_of(&fq, vec![0, 0, 1]).add(&div_of(&fq, vec![1, 1])); // t^2 (t+1)
        let all: Vec<Divisor> = big.divisors_below().collect();
        assert_eq!(all.len(), 6); // (2+1)(1+1)
        // Every yielded divisor is ≤ the input, and they are pairwise distinct.
        assert!(all.iter().all(|m| m.leq(&big)));
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn product_rule_for_divisors() {
        let fq = f2();
        let f = Poly::from_coeffs(vec![1, 1, 1]);
        let g = Poly::from_coeffs(vec![0, 1, 1]);
        let df = divisor_of(&fq, &f).unwrap();
        let dg = divisor_of(&fq, &g).unwrap();
        let dfg = divisor_of(&fq, &poly::mul(&fq, &f, &g)).unwrap();
        assert_eq!(dfg, df.add(&dg));
    }

    #[test]
    fn mertens_cancellation_small_degrees() {
        // Σ over monic f of degree n of μ(divisor of f) is 0 for n ≥ 2.
        for q in [2u32, 3] {
            let fq = Fq::new(q, 1).unwrap();
            for n in 2..=5u32 {
                let total: i64 = poly::monic_polys(&fq, n)
                    .map(|f| mobius(&divisor_of(&fq, &f).unwrap()))
                    .sum();
                assert_eq!(total, 0, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn curve_model_twist_validation() {
        let fq = f2();
        assert!(CurveModel::with_twist(fq.clone(), Poly::from_coeffs(vec![0, 1, 1])).is_ok());
        // t^2 is not squarefree; 0 and non-monic are rejected.
        assert!(CurveModel::with_twist(fq.clone(), Poly::from_coeffs(vec![0, 0, 1])).is_err());
        assert!(CurveModel::with_twist(fq.clone(), Poly::zero()).is_err());
        let f3 = Fq::new(3, 1).unwrap();
        assert!(CurveModel::with_twist(f3, Poly::from_coeffs(vec![1, 2])).is_err());
        assert_eq!(CurveModel::line(fq).extension_degree(), 1);
    }

    #[test]
    fn text_round_trip() {
        let fq = f2();
        let d = div_of(&fq, vec![0, 0, 1]).add(&div_of(&fq, vec![1, 1, 1]));
        let s = to_text(&fq, &d);
        assert_eq!(s, "0,1^2;1,1,1^1");
        assert_eq!(parse(&fq, &s).unwrap(), d);
        assert_eq!(to_text(&fq, &Divisor::zero()), "0");
        assert_eq!(parse(&fq, "0").unwrap(), Divisor::zero());
        assert!(parse(&fq, "1,0,1^1").is_err()); // t^2+1 is not irreducible
        assert!(parse(&fq, "0,1").is_err()); // missing multiplicity
    }
}
