//! Truncated residue classes made of irreducible polynomials.
//!
//! A truncated class is the set `{a + m·h : deg h < s}` — all `q^s` shifts of
//! a base point `a` by multiples of a modulus `m` whose cofactor lies in a
//! degree window `s`.  This module verifies whether every member of such a
//! class (optionally pushed through an affine twist `f ↦ W·f + α`) has a
//! divisor that is a single prime, searches degree boxes exhaustively for
//! classes with that property, and emits machine-checkable certificates.
//!
//! Searches keep every class member at the base point's degree by requiring
//! `deg a ≥ deg m + s`, so no member degenerates through cancellation; the
//! guard can be dropped per [`SearchSpec::equal_degree_guard`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{self, Factorization};
use crate::field::Fq;
use crate::poly::{self, Poly};

/// Errors for class construction and search.
#[derive(Debug, Error)]
pub enum PatternError {
    /// The class modulus `m` (or the congruence modulus of a constrained
    /// search) was the zero polynomial.
    #[error("class modulus must be nonzero")]
    ZeroModulus,
    /// Searches need a window of at least one digit; `s = 0` classes are
    /// singletons and carry nothing to search for.
    #[error("search window s must be at least 1")]
    WindowTooSmall,
    /// The twist offset shares a nonconstant factor with the twist modulus,
    /// so every twisted value would share that factor.
    #[error("twist offset {alpha} is not coprime to twist modulus {w}")]
    TwistNotCoprime { w: String, alpha: String },
    /// Malformed input: oversized windows, unparseable certificate fields,
    /// mismatched field sizes.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// The set `{a + m·h : deg h < s}`: `q^s` polynomials congruent to `a`
/// modulo `m`, pinned to a degree-`s` window of cofactors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedClass {
    a: Poly,
    m: Poly,
    s: u32,
}

impl TruncatedClass {
    /// Builds the class, rejecting a zero modulus and windows whose size
    /// `q^s` does not fit in a `u64`.
    pub fn new(fq: &Fq, a: Poly, m: Poly, s: u32) -> Result<TruncatedClass, PatternError> {
        if m.is_zero() {
            return Err(PatternError::ZeroModulus);
        }
        if poly::box_len_checked(fq, s).is_none() {
            return Err(PatternError::InvalidInput(format!(
                "window size {}^{s} does not fit in 64 bits",
                fq.q()
            )));
        }
        Ok(TruncatedClass { a, m, s })
    }

    #[inline]
    #[must_use]
    pub fn base(&self) -> &Poly {
        &self.a
    }

    #[inline]
    #[must_use]
    pub fn modulus(&self) -> &Poly {
        &self.m
    }

    #[inline]
    #[must_use]
    pub fn window(&self) -> u32 {
        self.s
    }

    /// Number of members, `q^s`.
    #[must_use]
    pub fn size(&self, fq: &Fq) -> u64 {
        poly::box_len(fq, self.s)
    }

    /// All members `a + m·h`, ordered by the cofactor enumeration (`h` runs
    /// through degree-below-`s` polynomials in base-`q` integer order).
    #[must_use]
    pub fn elements(&self, fq: &Fq) -> Vec<Poly> {
        (0..self.size(fq))
            .map(|i| {
                let h = poly::below_index(fq, self.s, i);
                poly::add(fq, &self.a, &poly::mul(fq, &self.m, &h))
            })
            .collect()
    }

    /// Membership test: `f ∈ {a + m·h : deg h < s}`.
    #[must_use]
    pub fn contains(&self, fq: &Fq, f: &Poly) -> bool {
        let diff = poly::sub(fq, f, &self.a);
        let (quot, rem) = poly::divrem(fq, &diff, &self.m).expect("modulus is nonzero");
        rem.is_zero() && quot.degree().is_none_or(|d| (d as u32) < self.s)
    }

    /// Splits the window: the `q^{s−s_sub}` classes with window `s_sub ≤ s`
    /// and bases `a + m·t^{s_sub}·g` (`deg g < s − s_sub`), which partition
    /// this class's members.
    pub fn subclasses(&self, fq: &Fq, s_sub: u32) -> Result<Vec<TruncatedClass>, PatternError> {
        if s_sub > self.s {
            return Err(PatternError::InvalidInput(format!(
                "subclass window {s_sub} exceeds class window {}",
                self.s
            )));
        }
        let count = poly::box_len(fq, self.s - s_sub);
        Ok((0..count)
            .map(|i| {
                let g = poly::below_index(fq, self.s - s_sub, i);
                let step = poly::mul(fq, &self.m, &poly::shift(&g, s_sub as usize));
                TruncatedClass {
                    a: poly::add(fq, &self.a, &step),
                    m: self.m.clone(),
                    s: s_sub,
                }
            })
            .collect())
    }
}

/// Convenience wrapper: the members of the class `(a, m, s)` in deterministic
/// order.
pub fn enumerate_class(fq: &Fq, a: &Poly, m: &Poly, s: u32) -> Result<Vec<Poly>, PatternError> {
    Ok(TruncatedClass::new(fq, a.clone(), m.clone(), s)?.elements(fq))
}

/// The affine twist `f ↦ W·f + α` applied to every class member before the
/// primality check, used to probe a congruence class `≡ α (mod W)` while
/// enumerating only the cofactors `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twist {
    w: Poly,
    alpha: Poly,
}

impl Twist {
    /// Requires `W ≠ 0` and `gcd(W, α)` constant; otherwise every value
    /// `W·f + α` is divisible by the common factor and no twisted class can
    /// be prime.
    pub fn new(fq: &Fq, w: Poly, alpha: Poly) -> Result<Twist, PatternError> {
        if w.is_zero() {
            return Err(PatternError::ZeroModulus);
        }
        if !poly::gcd(fq, &w, &alpha).is_one() {
            return Err(PatternError::TwistNotCoprime {
                w: poly::to_text(fq, &w),
                alpha: poly::to_text(fq, &alpha),
            });
        }
        Ok(Twist { w, alpha })
    }

    #[inline]
    #[must_use]
    pub fn w(&self) -> &Poly {
        &self.w
    }

    #[inline]
    #[must_use]
    pub fn alpha(&self) -> &Poly {
        &self.alpha
    }

    /// `W·f + α`.
    #[must_use]
    pub fn apply(&self, fq: &Fq, f: &Poly) -> Poly {
        poly::add(fq, &poly::mul(fq, &self.w, f), &self.alpha)
    }

    #[must_use]
    fn echo(&self, fq: &Fq) -> TwistEcho {
        TwistEcho {
            w: poly::to_text(fq, &self.w),
            alpha: poly::to_text(fq, &self.alpha),
        }
    }
}

/// Serialized twist data attached to certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistEcho {
    #[serde(rename = "W")]
    pub w: String,
    pub alpha: String,
}

/// A verified class: every member (after the twist, when one is present) has
/// a divisor consisting of a single prime with multiplicity one.  Fields are
/// stored in the plain-text polynomial format so the certificate is
/// self-contained and replayable; [`revalidate`] re-runs the full check.
///
/// `element_count` is the member count `q^s`; `distinct_divisors` counts the
/// distinct prime divisors hit after discarding unit factors.  The counts can
/// differ only when members are constant multiples of one another, which the
/// equal-degree search guard rules out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeClassCertificate {
    pub q: u32,
    pub a: String,
    pub m: String,
    pub s: u32,
    pub twist: Option<TwistEcho>,
    pub elements: Vec<String>,
    pub witnesses: Vec<String>,
    pub element_count: u64,
    pub distinct_divisors: u64,
}

impl PrimeClassCertificate {
    /// Canonical JSON rendering.
    #[must_use]
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// Why a class failed verification: the first offending member, its twisted
/// value, and a witness (a factorization, or a note that the value is zero
/// or a unit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub element: String,
    pub tested: String,
    pub witness: String,
}

/// Outcome of checking one class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassVerdict {
    /// Every member's divisor is a single prime; the certificate lists the
    /// members and their witnesses.
    Prime(PrimeClassCertificate),
    /// Some member fails; the refutation pinpoints the first one.
    NotPrime(Refutation),
}

impl ClassVerdict {
    #[inline]
    #[must_use]
    pub fn is_prime(&self) -> bool {
        matches!(self, ClassVerdict::Prime(_))
    }

    #[must_use]
    pub fn certificate(&self) -> Option<&PrimeClassCertificate> {
        match self {
            ClassVerdict::Prime(c) => Some(c),
            ClassVerdict::NotPrime(_) => None,
        }
    }
}

/// Renders `unit·∏ pᵢ^{mᵢ}` as text, e.g. `2*(t+1)^2*(t^2+t+1)`.
fn factorization_text(fq: &Fq, fac: &Factorization) -> String {
    let mut parts = Vec::new();
    if fac.unit != 1 {
        parts.push(fac.unit.to_string());
    }
    for (p, mult) in &fac.factors {
        let base = format!("({})", poly::to_text(fq, p));
        if *mult == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{base}^{mult}"));
        }
    }
    parts.join("*")
}

/// `Ok(())` when the divisor of `tested` is a single prime with multiplicity
/// one (unit factors ignored); otherwise the refuting witness text.
fn prime_witness(fq: &Fq, tested: &Poly) -> Result<(), String> {
    if tested.is_zero() {
        return Err("zero polynomial; no divisor".to_owned());
    }
    if tested.deg() == 0 {
        return Err("unit constant; empty divisor".to_owned());
    }
    let fac = factor::factor(fq, tested).expect("nonzero polynomial factors");
    if fac.factors.len() == 1 && fac.factors[0].1 == 1 {
        Ok(())
    } else {
        Err(factorization_text(fq, &fac))
    }
}

/// Checks every member of the class — through the twist when one is given —
/// and returns either a replayable certificate or the first refutation.
#[must_use]
pub fn is_prime_class(fq: &Fq, class: &TruncatedClass, twist: Option<&Twist>) -> ClassVerdict {
    let members = class.elements(fq);
    let mut elements = Vec::with_capacity(members.len());
    let mut witnesses = Vec::with_capacity(members.len());
    let mut distinct: BTreeSet<Vec<u8>> = BTreeSet::new();
    for f in &members {
        let tested = match twist {
            Some(tw) => tw.apply(fq, f),
            None => f.clone(),
        };
        if let Err(witness) = prime_witness(fq, &tested) {
            return ClassVerdict::NotPrime(Refutation {
                element: poly::to_text(fq, f),
                tested: poly::to_text(fq, &tested),
                witness,
            });
        }
        let (monic, _) = poly::monic(fq, &tested);
        distinct.insert(monic.coeffs().to_vec());
        elements.push(poly::to_text(fq, f));
        witnesses.push("irreducible".to_owned());
    }
    ClassVerdict::Prime(PrimeClassCertificate {
        q: fq.q(),
        a: poly::to_text(fq, class.base()),
        m: poly::to_text(fq, class.modulus()),
        s: class.window(),
        twist: twist.map(|tw| tw.echo(fq)),
        elements,
        witnesses,
        element_count: class.size(fq),
        distinct_divisors: distinct.len() as u64,
    })
}

/// Replays a certificate from its serialized fields: rebuilds the class,
/// checks the recorded member list, and re-runs [`is_prime_class`].  Returns
/// `Ok(false)` when any recorded fact fails to reproduce.
pub fn revalidate(fq: &Fq, cert: &PrimeClassCertificate) -> Result<bool, PatternError> {
    if cert.q != fq.q() {
        return Err(PatternError::InvalidInput(format!(
            "certificate is for q = {}, field has q = {}",
            cert.q,
            fq.q()
        )));
    }
    let parse = |s: &str| {
        poly::parse(fq, s)
            .map_err(|e| PatternError::InvalidInput(format!("unparseable polynomial {s:?}: {e}")))
    };
    let class = TruncatedClass::new(fq, parse(&cert.a)?, parse(&cert.m)?, cert.s)?;
    let twist = match &cert.twist {
        Some(echo) => Some(Twist::new(fq, parse(&echo.w)?, parse(&echo.alpha)?)?),
        None => None,
    };
    let members: Vec<String> = class
        .elements(fq)
        .iter()
        .map(|f| poly::to_text(fq, f))
        .collect();
    if members != cert.elements {
        return Ok(false);
    }
    match is_prime_class(fq, &class, twist.as_ref()) {
        ClassVerdict::Prime(fresh) => Ok(fresh == *cert),
        ClassVerdict::NotPrime(_) => Ok(false),
    }
}

/// How a search run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    /// Every candidate class in the requested box was examined.
    Exhausted,
    /// The candidate budget ran out first; the emitted certificates cover
    /// exactly the first `examined` candidates in scan order.
    BudgetExceeded,
}

/// Result of a search: certificates in deterministic scan order plus the
/// number of candidate classes examined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub certificates: Vec<PrimeClassCertificate>,
    pub examined: u64,
    pub status: SearchStatus,
}

impl SearchOutcome {
    #[inline]
    #[must_use]
    pub fn exhausted(&self) -> bool {
        self.status == SearchStatus::Exhausted
    }
}

/// Degree box and options for [`search`].
#[derive(Debug, Clone)]
pub struct SearchSpec {
    /// Largest modulus degree scanned (moduli are monic and nonconstant).
    pub deg_m_max: u32,
    /// Largest base-point degree scanned (bases are monic).
    pub deg_a_max: u32,
    /// Window: classes have `q^s` members.
    pub s: u32,
    /// Optional twist applied before every primality check.
    pub twist: Option<Twist>,
    /// Maximum number of candidate classes to examine.
    pub budget: u64,
    /// Keep `deg a ≥ deg m + s` so all members share the base's degree
    /// (on by default); turning it off admits mixed-degree classes.
    pub equal_degree_guard: bool,
}

impl SearchSpec {
    #[must_use]
    pub fn new(deg_m_max: u32, deg_a_max: u32, s: u32, twist: Option<Twist>, budget: u64) -> SearchSpec {
        SearchSpec { deg_m_max, deg_a_max, s, twist, budget, equal_degree_guard: true }
    }
}

/// Degree-dominant total order on polynomials (base-`q` integer value), used
/// to pick one canonical base per class.
fn base_key(fq: &Fq, f: &Poly) -> u64 {
    poly::box_index(fq, f)
}

/// A class has `q^s` bases (its own members); scan output is deduplicated by
/// keeping only the lexicographically least monic base.
fn is_canonical_base(fq: &Fq, class: &TruncatedClass) -> bool {
    let own = base_key(fq, class.base());
    class
        .elements(fq)
        .iter()
        .filter(|f| f.is_monic())
        .all(|f| own <= base_key(fq, f))
}

/// Runs the verification stage over an ordered candidate list.  Work is
/// split across threads and the results are reassembled in scan order, so
/// output is deterministic for any thread count.
fn run_candidates(
    fq: &Fq,
    candidates: Vec<TruncatedClass>,
    twist: Option<&Twist>,
    status: SearchStatus,
) -> SearchOutcome {
    use rayon::prelude::*;
    let examined = candidates.len() as u64;
    let verdicts: Vec<Option<PrimeClassCertificate>> = candidates
        .par_iter()
        .map(|class| match is_prime_class(fq, class, twist) {
            ClassVerdict::Prime(cert) => Some(cert),
            ClassVerdict::NotPrime(_) => None,
        })
        .collect();
    SearchOutcome {
        certificates: verdicts.into_iter().flatten().collect(),
        examined,
        status,
    }
}

/// Collects candidate classes in scan order until the generator is done or
/// the budget is hit.  Returns the candidates and the final status.
fn collect_candidates(
    budget: u64,
    mut generate: impl FnMut(&mut dyn FnMut(TruncatedClass) -> bool),
) -> (Vec<TruncatedClass>, SearchStatus) {
    let mut candidates = Vec::new();
    let mut truncated = false;
    generate(&mut |class| {
        if candidates.len() as u64 == budget {
            truncated = true;
            return false;
        }
        candidates.push(class);
        true
    });
    let status = if truncated { SearchStatus::BudgetExceeded } else { SearchStatus::Exhausted };
    (candidates, status)
}

/// Exhaustive scan for prime classes: monic moduli `m` with
/// `1 ≤ deg m ≤ deg_m_max`, monic bases `a` with `deg a ≤ deg_a_max`
/// (and `deg a ≥ deg m + s` under the guard), one canonical base per class.
/// Certificates come out in scan order — modulus degree, then modulus, then
/// base degree, then base — and the scan stops once `budget` candidates have
/// been examined, emitting the partial results found so far.
pub fn search(fq: &Fq, spec: &SearchSpec) -> Result<SearchOutcome, PatternError> {
    if spec.s == 0 {
        return Err(PatternError::WindowTooSmall);
    }
    if poly::box_len_checked(fq, spec.deg_a_max + 1).is_none() {
        return Err(PatternError::InvalidInput(format!(
            "degree box {}^{} does not fit in 64 bits",
            fq.q(),
            spec.deg_a_max + 1
        )));
    }
    let (candidates, status) = collect_candidates(spec.budget, |push| {
        for deg_m in 1..=spec.deg_m_max {
            for m in poly::monic_polys(fq, deg_m) {
                let lo = if spec.equal_degree_guard { deg_m + spec.s } else { 0 };
                for deg_a in lo..=spec.deg_a_max {
                    for a in poly::monic_polys(fq, deg_a) {
                        let class = TruncatedClass { a, m: m.clone(), s: spec.s };
                        if is_canonical_base(fq, &class) && !push(class) {
                            return;
                        }
                    }
                }
            }
        }
    });
    Ok(run_candidates(fq, candidates, spec.twist.as_ref(), status))
}

/// Like [`search`], but restricted to one congruence class: every member of
/// every candidate satisfies `f ≡ residue (mod modulus)` (so the scanned `m`
/// are the monic multiples of the modulus), and every member is tested
/// through the twist.  The degree box is `deg a ≤ r` with the equal-degree
/// guard always on.  A constant modulus imposes nothing and reduces to
/// [`search`] with the same twist.
pub fn search_in_class(
    fq: &Fq,
    modulus: &Poly,
    residue: &Poly,
    twist: &Twist,
    r: u32,
    s: u32,
    budget: u64,
) -> Result<SearchOutcome, PatternError> {
    if s == 0 {
        return Err(PatternError::WindowTooSmall);
    }
    if modulus.is_zero() {
        return Err(PatternError::ZeroModulus);
    }
    if poly::box_len_checked(fq, r + 1).is_none() {
        return Err(PatternError::InvalidInput(format!(
            "degree box {}^{} does not fit in 64 bits",
            fq.q(),
            r + 1
        )));
    }
    let (modulus, _) = poly::monic(fq, modulus);
    let residue = poly::rem(fq, residue, &modulus).expect("modulus is nonzero");
    let deg_mod = modulus.deg() as u32;
    let deg_m_max = r.saturating_sub(s);
    let (candidates, status) = collect_candidates(budget, |push| {
        for deg_m in deg_mod.max(1)..=deg_m_max {
            for u in poly::monic_polys(fq, deg_m - deg_mod) {
                let m = poly::mul(fq, &modulus, &u);
                for deg_a in (deg_m + s)..=r {
                    for a in poly::monic_polys(fq, deg_a) {
                        let in_class = poly::rem(fq, &a, &modulus).expect("modulus is nonzero")
                            == residue;
                        if !in_class {
                            continue;
                        }
                        let class = TruncatedClass { a, m: m.clone(), s };
                        if is_canonical_base(fq, &class) && !push(class) {
                            return;
                        }
                    }
                }
            }
        }
    });
    Ok(run_candidates(fq, candidates, Some(twist), status))
}
