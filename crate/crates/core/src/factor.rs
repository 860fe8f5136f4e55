//! Irreducibility testing, factorization, and irreducible counts/scans.
//!
//! The irreducibility test is the iterated-Frobenius criterion: a monic f of
//! degree n is irreducible iff t^{q^n} ≡ t (mod f) and, for every prime ℓ | n,
//! gcd(t^{q^{n/ℓ}} − t, f) = 1.
//!
//! Factorization runs squarefree decomposition (handling the characteristic-p
//! derivative collapse via p-th roots), then distinct-degree splitting, then
//! randomized equal-degree splitting with a fixed-seed generator so results
//! are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::Fq;
use crate::poly::{self, Poly};

/// Seed for the equal-degree splitting generator; fixed so factorizations are
/// stable across runs.
const EDF_SEED: u64 = 0x5eed_fac7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FactorError {
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
}

/// A complete factorization: `unit · ∏ pᵢ^{mᵢ}` with monic irreducible `pᵢ`
/// sorted in canonical order (degree, then enumeration index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u8,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    #[must_use]
    pub fn reassemble(&self, fq: &Fq) -> Poly {
        let mut acc = Poly::constant(self.unit);
        for (p, m) in &self.factors {
            for _ in 0..*m {
                acc = poly::mul(fq, &acc, p);
            }
        }
        acc
    }

    /// Degrees of the distinct irreducible factors, in canonical order.
    #[must_use]
    pub fn prime_degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|(p, _)| p.deg()).collect()
    }

    #[must_use]
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, m)| m == 1)
    }
}

/// Iterated-Frobenius irreducibility test. Constants (including zero) are not
/// irreducible; the test is unit-invariant.
#[must_use]
pub fn is_irreducible(fq: &Fq, f: &Poly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let f = poly::monic(fq, f).0;
    let q = fq.q() as u128;
    // Frobenius orbit of t: h_j = t^{q^j} mod f.
    let mut h = poly::rem(fq, &Poly::t(), &f).expect("f nonzero");
    let proper: Vec<usize> = prime_divisors(n as u64).iter().map(|&l| n / l as usize).collect();
    for j in 1..=n {
        h = poly::pow_mod(fq, &h, q, &f).expect("f nonzero");
        if proper.contains(&j) {
            let diff = poly::sub(fq, &h, &Poly::t());
            if !poly::gcd(fq, &diff, &f).is_one() {
                return false;
            }
        }
    }
    h == Poly::t()
}

/// Full factorization into monic irreducibles times a unit.
pub fn factor(fq: &Fq, f: &Poly) -> Result<Factorization, FactorError> {
    if f.is_zero() {
        return Err(FactorError::ZeroPolynomial);
    }
    let (monic_f, unit) = poly::monic(fq, f);
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    if monic_f.deg() > 0 {
        for (part, mult) in squarefree_parts(fq, &monic_f) {
            for (g, d) in distinct_degree(fq, &part) {
                let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
                for p in equal_degree(fq, &g, d, &mut rng) {
                    factors.push((p, mult));
                }
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { unit, factors })
}

/// Squarefree decomposition of a monic nonconstant f: pairs (g, m) with g
/// monic squarefree, pairwise coprime, and f = ∏ g^m.
fn squarefree_parts(fq: &Fq, f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    collect_squarefree(fq, f, 1, &mut out);
    out.sort_by_key(|&(_, m)| m);
    out
}

fn collect_squarefree(fq: &Fq, f: &Poly, stride: u32, out: &mut Vec<(Poly, u32)>) {
    let fd = poly::derivative(fq, f);
    if fd.is_zero() {
        // Every exponent is divisible by p: f = u(t)^p for the coefficientwise
        // p-th root u, so recurse with the multiplicity stride scaled by p.
        let root = pth_root(fq, f);
        collect_squarefree(fq, &root, stride * fq.p(), out);
        return;
    }
    let mut c = poly::gcd(fq, f, &fd);
    let mut w = poly::divrem(fq, f, &c).expect("gcd divides f").0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = poly::gcd(fq, &w, &c);
        let z = poly::divrem(fq, &w, &y).expect("y divides w").0;
        if !z.is_one() {
            out.push((z, stride * i));
        }
        w = y;
        c = poly::divrem(fq, &c, &w).expect("w divides c").0;
        i += 1;
    }
    if !c.is_one() {
        // Remaining factors all have multiplicity divisible by p.
        let root = pth_root(fq, &c);
        collect_squarefree(fq, &root, stride * fq.p(), out);
    }
}

/// For f with zero derivative (all exponents divisible by p), returns u with
/// u^p = f: keep every p-th coefficient and take its field p-th root.
fn pth_root(fq: &Fq, f: &Poly) -> Poly {
    let p = fq.p() as usize;
    let coeffs: Vec<u8> = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| fq.proot(c))
        .collect();
    Poly::from_coeffs(coeffs)
}

/// Distinct-degree splitting of a monic squarefree f: pairs (g, d) where g is
/// the product of all irreducible factors of degree d.
fn distinct_degree(fq: &Fq, f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut v = f.clone();
    let q = fq.q() as u128;
    let mut h = poly::rem(fq, &Poly::t(), f).expect("f nonzero");
    let mut d = 0usize;
    while v.deg() > 0 && 2 * (d + 1) <= v.deg() {
        d += 1;
        h = poly::pow_mod(fq, &h, q, &v).expect("v nonzero");
        let g = poly::gcd(fq, &poly::sub(fq, &h, &Poly::t()), &v);
        if !g.is_one() {
            out.push((g.clone(), d));
            v = poly::divrem(fq, &v, &g).expect("g divides v").0;
            h = poly::rem(fq, &h, &v).expect("v nonzero");
        }
    }
    if v.deg() > 0 {
        let dv = v.deg();
        out.push((v, dv));
    }
    out
}

/// Equal-degree splitting: factors a monic squarefree g all of whose
/// irreducible factors have degree d.
fn equal_degree(fq: &Fq, g: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    if g.deg() == d {
        return vec![g.clone()];
    }
    let split = loop {
        let a = random_poly_below(fq, g.deg(), rng);
        if a.degree().is_none() {
            continue;
        }
        let candidate = if fq.p() == 2 {
            // Even characteristic: additive trace to F_2 of a random element.
            let steps = d as u32 * fq.e();
            let mut acc = poly::rem(fq, &a, g).expect("g nonzero");
            let mut fr = acc.clone();
            for _ in 1..steps {
                fr = poly::pow_mod(fq, &fr, 2, g).expect("g nonzero");
                acc = poly::add(fq, &acc, &fr);
            }
            acc
        } else {
            // Odd characteristic: a^{(q^d − 1)/2} − 1.
            let qd = (fq.q() as u128)
                .checked_pow(d as u32)
                .expect("splitting degree too large");
            let b = poly::pow_mod(fq, &a, (qd - 1) / 2, g).expect("g nonzero");
            poly::sub(fq, &b, &Poly::one())
        };
        let h = poly::gcd(fq, &candidate, g);
        if !h.is_one() && h.deg() < g.deg() {
            break h;
        }
    };
    let rest = poly::divrem(fq, g, &split).expect("split divides g").0;
    let mut out = equal_degree(fq, &split, d, rng);
    out.extend(equal_degree(fq, &rest, d, rng));
    out
}

fn random_poly_below(fq: &Fq, d: usize, rng: &mut ChaCha8Rng) -> Poly {
    let coeffs: Vec<u8> = (0..d).map(|_| rng.gen_range(0..fq.q()) as u8).collect();
    Poly::from_coeffs(coeffs)
}

// ---------------------------------------------------------------------------
// Counting and scans
// ---------------------------------------------------------------------------

/// Möbius function on positive integers.
#[must_use]
pub fn moebius_int(mut n: u64) -> i64 {
    assert!(n > 0);
    let mut mu = 1i64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of monic irreducibles of degree d: (1/d) Σ_{e|d} μ(e) q^{d/e}.
#[must_use]
pub fn count_irreducible(fq: &Fq, d: u32) -> u64 {
    assert!(d >= 1);
    let q = fq.q() as u128;
    let mut total: i128 = 0;
    for e in 1..=d as u64 {
        if d as u64 % e != 0 {
            continue;
        }
        let mu = moebius_int(e);
        if mu == 0 {
            continue;
        }
        let term = q.checked_pow(d / e as u32).expect("q^d overflows");
        total += mu as i128 * term as i128;
    }
    debug_assert!(total > 0 && total % d as i128 == 0);
    (total / d as i128) as u64
}

/// All monic irreducibles of exactly degree d, in enumeration order, found by
/// testing every monic polynomial of the layer.
#[must_use]
pub fn irreducibles(fq: &Fq, d: u32) -> Vec<Poly> {
    poly::monic_polys(fq, d).filter(|f| is_irreducible(fq, f)).collect()
}

/// All monic irreducibles of degree 1..=d, ascending canonical order.
#[must_use]
pub fn irreducibles_up_to(fq: &Fq, d: u32) -> Vec<Poly> {
    (1..=d).flat_map(|k| irreducibles(fq, k)).collect()
}

/// Independent irreducible counts per degree 1..=dmax by exhaustive composite
/// marking: every composite of degree d has a monic product form p·g with p
/// irreducible of degree ≤ d/2, so marking all such products and counting the
/// unmarked monic polynomials yields the irreducible count without any
/// irreducibility test on the layer itself.
#[must_use]
pub fn sieve_counts(fq: &Fq, dmax: u32) -> Vec<u64> {
    if fq.e() == 1 {
        sieve_counts_prime_field(fq, dmax)
    } else {
        sieve_counts_generic(fq, dmax)
    }
}

/// Prime-field marking: one bit per monic residue index, with products p·g
/// maintained incrementally as g steps through the box enumeration. Stepping
/// one enumeration digit changes a coefficient by the field element 1 (true
/// for prime fields, where index = value), so each step adds t^j·p to the
/// product: O(deg p) table-free work per mark instead of a full multiply.
fn sieve_counts_prime_field(fq: &Fq, dmax: u32) -> Vec<u64> {
    debug_assert_eq!(fq.e(), 1);
    let q = fq.q() as u64;
    let mut counts = Vec::with_capacity(dmax as usize);
    // Marking degree d only needs irreducibles of degree ≤ d/2, so survivors
    // are materialized as polynomials only up to dmax/2.
    let mut small: Vec<Vec<Poly>> = Vec::new();
    for d in 1..=dmax {
        let len = poly::box_len(fq, d);
        let mut composite = vec![0u64; len.div_ceil(64) as usize];
        for a in 1..=d / 2 {
            for p in &small[a as usize - 1] {
                mark_shifted_multiples(q, p.coeffs(), d, &mut composite);
            }
        }
        let marked: u64 = composite.iter().map(|w| w.count_ones() as u64).sum();
        counts.push(len - marked);
        if d <= dmax / 2 {
            let survivors = (0..len)
                .filter(|&i| composite[(i >> 6) as usize] & (1 << (i & 63)) == 0)
                .map(|i| poly::monic_index(fq, d, i))
                .collect();
            small.push(survivors);
        }
    }
    counts
}

/// Sets the residue-index bit of p·g for every monic g with deg(p·g) = d.
/// g runs in box-enumeration order via a base-q odometer; every digit change
/// in the chain (increment or rollover) shifts the coefficient by +1 mod q,
/// i.e. adds t^pos·p to the product, so the d sub-leading product
/// coefficients and their packed index are updated in place.
fn mark_shifted_multiples(q: u64, p: &[u8], d: u32, composite: &mut [u64]) {
    let a = p.len() - 1;
    let n = d as usize - a;
    debug_assert!(d < 32 && n >= 1);
    let qq = q as u8;
    let mut pows = [0u64; 32];
    let mut acc = 1u64;
    for slot in pows.iter_mut().take(d as usize) {
        *slot = acc;
        acc *= q;
    }
    // g = t^n first: product coefficients are p shifted up by n (the monic
    // lead lands at position d and stays implicit).
    let mut prod = [0u8; 32];
    let mut index = 0u64;
    for (j, &pc) in p.iter().enumerate().take(a) {
        prod[n + j] = pc;
        index += pc as u64 * pows[n + j];
    }
    let mut digits = [0u8; 32];
    composite[(index >> 6) as usize] |= 1 << (index & 63);
    let steps = q.pow(n as u32);
    for _ in 1..steps {
        let mut pos = 0;
        loop {
            // Add t^pos·p to the product.
            for (j, &pc) in p.iter().enumerate() {
                let at = pos + j;
                let c = prod[at];
                let mut s = c + pc;
                if s >= qq {
                    s -= qq;
                }
                prod[at] = s;
                index = index
                    .wrapping_add((s as u64).wrapping_sub(c as u64).wrapping_mul(pows[at]));
            }
            digits[pos] += 1;
            if digits[pos] < qq {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        composite[(index >> 6) as usize] |= 1 << (index & 63);
    }
}

/// All monic irreducibles of degree 1..=dmax grouped by degree (index d−1),
/// each group in enumeration order, produced by the same composite marking
/// as `sieve_counts` — no irreducibility tests. Materializes every survivor,
/// so the caller pays q^dmax bits of marking space and the survivor storage.
pub fn sieved_irreducibles(fq: &Fq, dmax: u32) -> Vec<Vec<Poly>> {
    if fq.e() != 1 {
        return (1..=dmax).map(|d| irreducibles(fq, d)).collect();
    }
    let q = fq.q() as u64;
    let mut groups: Vec<Vec<Poly>> = Vec::with_capacity(dmax as usize);
    for d in 1..=dmax {
        let len = poly::box_len(fq, d);
        let mut composite = vec![0u64; len.div_ceil(64) as usize];
        for a in 1..=d / 2 {
            for p in &groups[a as usize - 1] {
                mark_shifted_multiples(q, p.coeffs(), d, &mut composite);
            }
        }
        groups.push(
            (0..len)
                .filter(|&i| composite[(i >> 6) as usize] & (1 << (i & 63)) == 0)
                .map(|i| poly::monic_index(fq, d, i))
                .collect(),
        );
    }
    groups
}

/// Literal fallback for extension fields: full multiplies, boolean marks.
fn sieve_counts_generic(fq: &Fq, dmax: u32) -> Vec<u64> {
    let q = fq.q() as u64;
    let mut counts = Vec::with_capacity(dmax as usize);
    let mut found: Vec<Vec<Poly>> = Vec::new();
    for d in 1..=dmax {
        let len = poly::box_len(fq, d);
        let mut composite = vec![false; len as usize];
        for a in 1..=d / 2 {
            for p in &found[a as usize - 1] {
                for g in poly::monic_polys(fq, d - a) {
                    let prod = poly::mul(fq, p, &g);
                    // Index over the d sub-leading coefficients (the product
                    // is monic of degree d).
                    let idx = prod.coeffs()[..d as usize]
                        .iter()
                        .rev()
                        .fold(0u64, |acc, &c| acc * q + c as u64);
                    composite[idx as usize] = true;
                }
            }
        }
        let survivors: Vec<Poly> = (0..len)
            .filter(|&i| !composite[i as usize])
            .map(|i| poly::monic_index(fq, d, i))
            .collect();
        counts.push(survivors.len() as u64);
        found.push(survivors);
    }
    counts
}
