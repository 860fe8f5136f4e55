//! The truncated divisor-sum weight Λ_R, the small-prime twist (W, α), and
//! the normalized nonnegative measure ν built from Λ_R².
//!
//! Λ_R(D) = Σ_{M ≤ D} μ(M) φ(deg M / R) over the sub-divisor lattice; only
//! squarefree M built from primes of degree < R contribute, so the sum is a
//! signed subset sum over the distinct prime degrees of D.
//!
//! ν(x) = φ_K(W)·R / (c_φ · q^{deg W}) · Λ_R(divisor of W·x + α·g)², where g
//! is the model twist. The constant makes the box mean of ν tend to 1 as the
//! window grows.
//!
//! Two evaluation paths produce bit-identical values: a public path that
//! factors the twisted numerator, and a windowed fast path (q = 2) that
//! collects prime-divisor degrees for a whole box by sieving residue classes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bump::{self, Bump, BumpError};
use crate::divisor::{self, CurveModel, Divisor};
use crate::factor;
use crate::field::Fq;
use crate::poly::{self, Poly};
use crate::reduce;
use crate::zeta;

/// Largest window the tabulating paths will materialize (8·2^26 bytes).
const MAX_TABLE_WINDOW: u32 = 26;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("truncation parameter R = {0} must exceed 1")]
    DegenerateR(f64),
    #[error("alpha must be coprime to W")]
    AlphaNotCoprime,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Bump(#[from] BumpError),
}

/// Product of all monic irreducibles of degree ≤ w (w = 0 gives 1).
#[must_use]
pub fn small_prime_product(fq: &Fq, w: u32) -> Poly {
    let mut acc = Poly::one();
    for d in 1..=w {
        for p in factor::irreducibles(fq, d) {
            acc = poly::mul(fq, &acc, &p);
        }
    }
    acc
}

/// |units of F_q[t]/(W)| = ∏ over prime powers π^e of (q^{deg π} − 1)·q^{deg π (e−1)}.
pub fn phi_k(fq: &Fq, w_poly: &Poly) -> Result<u64, SieveError> {
    if w_poly.is_zero() {
        return Err(SieveError::ZeroPolynomial);
    }
    let fac = factor::factor(fq, w_poly).expect("nonzero");
    let q = fq.q() as u128;
    let mut acc: u128 = 1;
    for (p, m) in &fac.factors {
        let d = p.deg() as u32;
        let unit = q.pow(d) - 1;
        let tail = q.pow(d * (m - 1));
        acc = acc.checked_mul(unit).and_then(|a| a.checked_mul(tail)).expect("phi_k overflow");
    }
    u64::try_from(acc).map_err(|_| SieveError::InvalidInput("phi_K(W) exceeds u64".into()))
}

/// The truncation R prescribed by the window radius: r / (8·q^k·2^{q^k}).
#[must_use]
pub fn truncation_from_radius(q: u32, k: u32, r: u32) -> f64 {
    let bk = (q as f64).powi(k as i32);
    r as f64 / (8.0 * bk * bk.exp2())
}

/// Parameters of the measure: window radius r, truncation R, target-degree k,
/// small-prime cutoff w with W = ∏ irreducibles of degree ≤ w, the residue α
/// coprime to W, the ambient model, and the cutoff bump.
#[derive(Debug, Clone)]
pub struct SieveParams {
    curve: CurveModel,
    r: u32,
    big_r: f64,
    k: u32,
    w: u32,
    w_poly: Poly,
    alpha: Poly,
    alpha_g: Poly,
    bump: Bump,
    c_phi: f64,
    phi_k_w: u64,
}

impl SieveParams {
    /// Explicit-truncation constructor.
    pub fn new(
        curve: CurveModel,
        r: u32,
        truncation: f64,
        k: u32,
        w: u32,
        alpha: Poly,
        bump: Bump,
    ) -> Result<SieveParams, SieveError> {
        if truncation.is_nan() || truncation <= 1.0 {
            return Err(SieveError::DegenerateR(truncation));
        }
        let fq = curve.fq().clone();
        let w_poly = small_prime_product(&fq, w);
        if !poly::gcd(&fq, &alpha, &w_poly).is_one() {
            return Err(SieveError::AlphaNotCoprime);
        }
        let alpha_g = poly::mul(&fq, &alpha, curve.twist());
        let c_phi = bump::c_phi_cached(&bump)?;
        let phi_k_w = phi_k(&fq, &w_poly)?;
        Ok(SieveParams { curve, r, big_r: truncation, k, w, w_poly, alpha, alpha_g, bump, c_phi, phi_k_w })
    }

    /// Radius-driven constructor: R = r/(8·q^k·2^{q^k}) and, unless
    /// overridden, w = ⌊ln ln r⌋.
    pub fn from_radius(
        curve: CurveModel,
        r: u32,
        k: u32,
        w_override: Option<u32>,
        alpha: Poly,
        bump: Bump,
    ) -> Result<SieveParams, SieveError> {
        let big_r = truncation_from_radius(curve.fq().q(), k, r);
        if big_r.is_nan() || big_r <= 1.0 {
            return Err(SieveError::DegenerateR(big_r));
        }
        let w = w_override.unwrap_or_else(|| {
            let ll = (r as f64).ln().ln();
            if ll.is_finite() && ll > 0.0 { ll.floor() as u32 } else { 0 }
        });
        SieveParams::new(curve, r, big_r, k, w, alpha, bump)
    }

    #[inline]
    #[must_use]
    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    #[inline]
    #[must_use]
    pub fn fq(&self) -> &Fq {
        self.curve.fq()
    }

    #[inline]
    #[must_use]
    pub fn r(&self) -> u32 {
        self.r
    }

    /// The truncation R (degree units).
    #[inline]
    #[must_use]
    pub fn truncation(&self) -> f64 {
        self.big_r
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    #[must_use]
    pub fn w(&self) -> u32 {
        self.w
    }

    #[inline]
    #[must_use]
    pub fn w_poly(&self) -> &Poly {
        &self.w_poly
    }

    #[inline]
    #[must_use]
    pub fn alpha(&self) -> &Poly {
        &self.alpha
    }

    #[inline]
    #[must_use]
    pub fn bump(&self) -> &Bump {
        &self.bump
    }

    #[inline]
    #[must_use]
    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    #[inline]
    #[must_use]
    pub fn phi_k_w(&self) -> u64 {
        self.phi_k_w
    }

    /// W·x + α·g, the polynomial whose divisor the weight is evaluated at.
    #[must_use]
    pub fn numerator(&self, x: &Poly) -> Poly {
        let fq = self.fq();
        poly::add(fq, &poly::mul(fq, &self.w_poly, x), &self.alpha_g)
    }

    /// φ_K(W)·R / (c_φ·q^{deg W·[K:F_q(t)]}), the factor multiplying Λ².
    #[must_use]
    pub fn norm_constant(&self) -> f64 {
        let q = self.fq().q() as f64;
        let dw = self.w_poly.degree().unwrap_or(0) as i32 * self.curve.extension_degree() as i32;
        self.phi_k_w as f64 * self.big_r / (self.c_phi * q.powi(dw))
    }

    #[must_use]
    pub fn echo(&self) -> ParamsEcho {
        ParamsEcho {
            q: self.fq().q(),
            k: self.k,
            r: self.r,
            big_r: self.big_r,
            w: self.w,
            w_poly: poly::to_text(self.fq(), &self.w_poly),
            alpha: poly::to_text(self.fq(), &self.alpha),
            bump_label: self.bump.label().to_owned(),
            c_phi: self.c_phi,
            phi_k_w: self.phi_k_w,
            residue: zeta::zeta_residue(self.fq()),
        }
    }
}

/// Parameter echo embedded in every serialized output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub q: u32,
    pub k: u32,
    pub r: u32,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub w: u32,
    #[serde(rename = "W")]
    pub w_poly: String,
    pub alpha: String,
    pub bump_label: String,
    pub c_phi: f64,
    #[serde(rename = "phi_K_W")]
    pub phi_k_w: u64,
    pub residue: f64,
}

// ---------------------------------------------------------------------------
// The weight Λ_R
// ---------------------------------------------------------------------------

/// Signed subset sum over a list of prime degrees:
/// Σ_S (−1)^{|S|} φ(Σ_{i∈S} deg_i / R), with φ supplied per integer degree sum.
fn lambda_masks(degs: &[usize], phi_at: &mut impl FnMut(usize) -> f64) -> f64 {
    debug_assert!(degs.len() <= 20);
    let mut acc = 0.0;
    for mask in 0u32..(1u32 << degs.len()) {
        let mut m = mask;
        let mut s = 0usize;
        while m != 0 {
            s += degs[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        let v = phi_at(s);
        if mask.count_ones() % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

/// Λ_R(D) = Σ_{M ≤ D} μ(M)·φ(deg M / R). Equals 1 exactly on the zero
/// divisor and on primes of degree ≥ R.
#[must_use]
pub fn lambda_r(d: &Divisor, big_r: f64, bump: &Bump) -> f64 {
    debug_assert!(big_r > 0.0);
    let inv_r = 1.0 / big_r;
    let degs: Vec<usize> =
        d.prime_degrees().into_iter().filter(|&a| (a as f64) < big_r).collect();
    lambda_masks(&degs, &mut |s| bump.eval(s as f64 * inv_r))
}

/// Literal lattice evaluation of the same sum, streaming every M ≤ D; an
/// independent oracle for `lambda_r`.
#[must_use]
pub fn lambda_r_lattice(d: &Divisor, big_r: f64, bump: &Bump) -> f64 {
    let inv_r = 1.0 / big_r;
    let mut acc = 0.0;
    for m in d.divisors_below() {
        let mu = divisor::mobius(&m);
        if mu != 0 {
            acc += mu as f64 * bump.eval(m.degree() as f64 * inv_r);
        }
    }
    acc
}

/// ν(x): normalization constant times Λ_R² at the divisor of W·x + α·g.
/// Errors when the twisted numerator is the zero polynomial.
pub fn nu(params: &SieveParams, x: &Poly) -> Result<f64, SieveError> {
    let num = params.numerator(x);
    if num.is_zero() {
        return Err(SieveError::InvalidInput("twisted numerator is zero".into()));
    }
    let d = divisor::divisor_of(params.fq(), &num).expect("numerator nonzero");
    let l = lambda_r(&d, params.big_r, &params.bump);
    Ok(params.norm_constant() * l * l)
}

// ---------------------------------------------------------------------------
// Trial-division evaluator (any q)
// ---------------------------------------------------------------------------

/// Reusable evaluator: caches the irreducibles of degree < R up to a caller
/// supplied degree cap and finds each numerator's distinct small-prime
/// degrees by trial division, bypassing full factorization.
pub struct NuEvaluator {
    params: SieveParams,
    primes: Vec<Poly>,
    inv_r: f64,
    norm: f64,
    max_numerator_deg: u32,
}

/// Scratch buffers for allocation-free evaluation.
#[derive(Default)]
pub struct NuScratch {
    rem: Vec<u8>,
    degs: Vec<usize>,
}

impl NuEvaluator {
    /// `max_arg_deg` bounds deg x over all later calls; it sizes the cached
    /// prime list.
    pub fn new(params: &SieveParams, max_arg_deg: u32) -> Result<NuEvaluator, SieveError> {
        let fq = params.fq();
        let num_deg = (params.w_poly.degree().unwrap_or(0) as u32 + max_arg_deg)
            .max(params.alpha_g.degree().unwrap_or(0) as u32);
        let lim = ((params.big_r.ceil() as u32).saturating_sub(1)).min(num_deg);
        let primes = factor::irreducibles_up_to(fq, lim)
            .into_iter()
            .filter(|p| (p.deg() as f64) < params.big_r)
            .collect();
        Ok(NuEvaluator {
            params: params.clone(),
            primes,
            inv_r: 1.0 / params.big_r,
            norm: params.norm_constant(),
            max_numerator_deg: num_deg,
        })
    }

    #[must_use]
    pub fn params(&self) -> &SieveParams {
        &self.params
    }

    pub fn eval(&self, x: &Poly) -> Result<f64, SieveError> {
        self.eval_with(x, &mut NuScratch::default())
    }

    pub fn eval_with(&self, x: &Poly, scratch: &mut NuScratch) -> Result<f64, SieveError> {
        let num = self.params.numerator(x);
        if num.is_zero() {
            return Err(SieveError::InvalidInput("twisted numerator is zero".into()));
        }
        if num.deg() as u32 > self.max_numerator_deg {
            return Err(SieveError::InvalidInput(format!(
                "argument exceeds the evaluator's degree cap {}",
                self.max_numerator_deg
            )));
        }
        let fq = self.params.fq();
        scratch.degs.clear();
        for p in &self.primes {
            if p.deg() > num.deg() {
                break;
            }
            if poly::divides(fq, p, num.coeffs(), &mut scratch.rem) {
                scratch.degs.push(p.deg());
            }
        }
        let bump = self.params.bump;
        let inv_r = self.inv_r;
        let l = lambda_masks(&scratch.degs, &mut |s| bump.eval(s as f64 * inv_r));
        Ok(self.norm * l * l)
    }
}

// ---------------------------------------------------------------------------
// Windowed fast path, q = 2
// ---------------------------------------------------------------------------

/// Bit-packed F_2[t] helpers (bit i = coefficient of t^i).
mod pack2 {
    #[inline]
    pub fn deg(x: u32) -> u32 {
        debug_assert!(x != 0);
        31 - x.leading_zeros()
    }

    pub fn rem(mut a: u32, m: u32) -> u32 {
        let dm = deg(m);
        while a != 0 {
            let da = deg(a);
            if da < dm {
                break;
            }
            a ^= m << (da - dm);
        }
        a
    }

    pub fn mul(a: u32, b: u32) -> u64 {
        let mut r = 0u64;
        let mut bb = b;
        while bb != 0 {
            let i = bb.trailing_zeros();
            r ^= (a as u64) << i;
            bb &= bb - 1;
        }
        r
    }

    pub fn rem64(mut a: u64, m: u32) -> u32 {
        let dm = deg(m);
        while a != 0 {
            let da = 63 - a.leading_zeros();
            if da < dm {
                break;
            }
            a ^= (m as u64) << (da - dm);
        }
        a as u32
    }

    pub fn mulmod(a: u32, b: u32, m: u32) -> u32 {
        rem64(mul(a, b), m)
    }

    fn divmod(a: u32, b: u32) -> (u32, u32) {
        let db = deg(b);
        let mut r = a;
        let mut q = 0u32;
        while r != 0 {
            let dr = deg(r);
            if dr < db {
                break;
            }
            q |= 1 << (dr - db);
            r ^= b << (dr - db);
        }
        (q, r)
    }

    /// Inverse of a modulo m (gcd(a, m) = 1 required).
    pub fn inv_mod(a: u32, m: u32) -> u32 {
        let (mut r0, mut r1) = (m, rem(a, m));
        let (mut t0, mut t1) = (0u32, 1u32);
        while r1 != 0 {
            let (q, r) = divmod(r0, r1);
            let t = t0 ^ mulmod(q, t1, m);
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        debug_assert_eq!(r0, 1, "inputs were not coprime");
        t0
    }

    /// All monic irreducibles of degree 1..=dmax as packed values, ascending
    /// (numeric order = degree-then-index order), by composite marking.
    pub fn primes_upto(dmax: u32) -> Vec<u32> {
        assert!(dmax <= 27);
        let mut primes: Vec<u32> = Vec::new();
        for d in 1..=dmax {
            let size = 1usize << d;
            let mut composite = vec![0u64; size.div_ceil(64)];
            for &p in &primes {
                let a = deg(p);
                if 2 * a > d {
                    break;
                }
                // Products p·g over monic g of degree d−a, visited in Gray
                // order so each step is one XOR.
                let n = d - a;
                let mut acc = (p as u64) << n;
                let mask = (size - 1) as u64;
                let idx = (acc & mask) as usize;
                composite[idx >> 6] |= 1u64 << (idx & 63);
                for i in 1u64..(1u64 << n) {
                    let j = i.trailing_zeros();
                    acc ^= (p as u64) << j;
                    let idx = (acc & mask) as usize;
                    composite[idx >> 6] |= 1u64 << (idx & 63);
                }
            }
            for idx in 0..size {
                if composite[idx >> 6] & (1u64 << (idx & 63)) == 0 {
                    primes.push((1u32 << d) | idx as u32);
                }
            }
        }
        primes
    }

    pub fn pack(coeffs: &[u8]) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| (acc << 1) | c as u32)
    }
}

/// Degree-multiset codes: count in the top 4 bits, then 5-bit degree entries
/// from the bottom, in ascending canonical prime order.
const CODE_COUNT_SHIFT: u32 = 60;
const CODE_ENTRY_BITS: u32 = 5;
const CODE_MAX_ENTRIES: u64 = 12;

#[inline]
fn code_push(code: &mut u64, degree: u32) {
    let cnt = *code >> CODE_COUNT_SHIFT;
    assert!(cnt < CODE_MAX_ENTRIES, "too many small prime divisors for one code word");
    *code += ((degree as u64) << (CODE_ENTRY_BITS * cnt as u32)) + (1u64 << CODE_COUNT_SHIFT);
}

#[inline]
fn code_decode(code: u64, out: &mut [usize; CODE_MAX_ENTRIES as usize]) -> usize {
    let cnt = (code >> CODE_COUNT_SHIFT) as usize;
    let mut c = code;
    for slot in out.iter_mut().take(cnt) {
        *slot = (c & ((1 << CODE_ENTRY_BITS) - 1)) as usize;
        c >>= CODE_ENTRY_BITS;
    }
    cnt
}

fn fast_path_eligible(params: &SieveParams, window: u32) -> bool {
    params.fq().q() == 2
        && window <= MAX_TABLE_WINDOW
        && params.w_poly.degree().unwrap_or(0) as u32 + window <= 30
        && params.alpha_g.degree().unwrap_or(0) <= 30
}

/// For every x in the degree-`window` box, the degrees of the distinct primes
/// of degree < R dividing W·x + α·g, gathered by sieving one residue class
/// per prime instead of factoring box elements.
fn degree_codes_q2(params: &SieveParams, window: u32) -> Result<Vec<u64>, SieveError> {
    let fq = params.fq();
    debug_assert!(fast_path_eligible(params, window));
    // A zero numerator inside the window poisons the whole box.
    if let Ok(r) = poly::rem(fq, &params.alpha_g, &params.w_poly) {
        if r.is_zero() {
            let x0 = poly::divrem(fq, &params.alpha_g, &params.w_poly).expect("W nonzero").0;
            if x0.degree().is_none_or(|d| (d as u32) < window) {
                return Err(SieveError::InvalidInput(
                    "twisted numerator vanishes inside the window".into(),
                ));
            }
        }
    }
    let num_deg = (params.w_poly.degree().unwrap_or(0) as u32 + window.saturating_sub(1))
        .max(params.alpha_g.degree().unwrap_or(0) as u32);
    let lim = ((params.big_r.ceil() as u32).saturating_sub(1)).min(num_deg);
    let w_packed = pack2::pack(params.w_poly.coeffs());
    let ag_packed = pack2::pack(params.alpha_g.coeffs());
    let size = 1usize << window;
    let mut codes = vec![0u64; size];
    if lim == 0 {
        return Ok(codes);
    }
    for p in pack2::primes_upto(lim) {
        let a = pack2::deg(p);
        if (a as f64) >= params.big_r {
            continue;
        }
        let wp = pack2::rem(w_packed, p);
        let bp = pack2::rem(ag_packed, p);
        if wp == 0 {
            if bp == 0 {
                for code in codes.iter_mut() {
                    code_push(code, a);
                }
            }
            continue;
        }
        // W·x + α·g ≡ 0 (mod p)  ⇔  x ≡ α·g·W⁻¹ (mod p).
        let c = pack2::mulmod(bp, pack2::inv_mod(wp, p), p);
        if a <= window {
            let n = window - a;
            let mut acc = c as u64;
            code_push(&mut codes[acc as usize], a);
            for i in 1u64..(1u64 << n) {
                let j = i.trailing_zeros();
                acc ^= (p as u64) << j;
                code_push(&mut codes[acc as usize], a);
            }
        } else if (c as u64) < (1u64 << window) {
            code_push(&mut codes[c as usize], a);
        }
    }
    Ok(codes)
}

/// φ values indexed by integer degree sum; entries equal
/// `bump.eval(s / R)` bit-for-bit.
fn phi_by_sum(bump: &Bump, inv_r: f64, max_sum: usize) -> Vec<f64> {
    (0..=max_sum).map(|s| bump.eval(s as f64 * inv_r)).collect()
}

fn value_from_code(code: u64, tab: &[f64], norm: f64) -> f64 {
    let mut degs = [0usize; CODE_MAX_ENTRIES as usize];
    let cnt = code_decode(code, &mut degs);
    let l = lambda_masks(&degs[..cnt], &mut |s| tab[s]);
    norm * l * l
}

// ---------------------------------------------------------------------------
// Box sweeps
// ---------------------------------------------------------------------------

/// Mean of ν over the box {deg x < window}, by fixed-shape tree reduction.
pub fn box_mean(params: &SieveParams, window: u32) -> Result<f64, SieveError> {
    let fq = params.fq();
    let len = poly::box_len(fq, window);
    if fast_path_eligible(params, window) {
        let codes = degree_codes_q2(params, window)?;
        let max_sum = codes.iter().map(|&c| (c >> CODE_COUNT_SHIFT) as usize * 31).max().unwrap_or(0);
        let tab = phi_by_sum(&params.bump, 1.0 / params.big_r, max_sum.min(31 * 12));
        let norm = params.norm_constant();
        let sum = reduce::tree_sum(0, len, &|i| value_from_code(codes[i as usize], &tab, norm));
        Ok(sum / len as f64)
    } else {
        let ev = NuEvaluator::new(params, window.saturating_sub(1))?;
        // Zero-numerator guards: any failure inside the sweep is surfaced.
        let sum = reduce::tree_reduce(
            0,
            len,
            reduce::DEFAULT_LEAF,
            &|i| ev.eval(&poly::below_index(fq, window, i)),
            &|a, b| match (a, b) {
                (Ok(x), Ok(y)) => Ok(x + y),
                (Err(e), _) | (_, Err(e)) => Err(e),
            },
            Ok(0.0),
        )?;
        Ok(sum / len as f64)
    }
}

/// ν tabulated over an enumerated box, with the parameter echo attached.
#[derive(Debug, Clone)]
pub struct MeasureTable {
    echo: ParamsEcho,
    window: u32,
    values: Vec<f64>,
}

impl MeasureTable {
    pub fn build(params: &SieveParams, window: u32) -> Result<MeasureTable, SieveError> {
        let fq = params.fq();
        if window > MAX_TABLE_WINDOW {
            return Err(SieveError::InvalidInput(format!(
                "window {window} too large to tabulate (max {MAX_TABLE_WINDOW})"
            )));
        }
        let len = poly::box_len(fq, window);
        let values: Vec<f64> = if fast_path_eligible(params, window) {
            let codes = degree_codes_q2(params, window)?;
            let max_sum =
                codes.iter().map(|&c| (c >> CODE_COUNT_SHIFT) as usize * 31).max().unwrap_or(0);
            let tab = phi_by_sum(&params.bump, 1.0 / params.big_r, max_sum.min(31 * 12));
            let norm = params.norm_constant();
            codes.iter().map(|&c| value_from_code(c, &tab, norm)).collect()
        } else {
            let ev = NuEvaluator::new(params, window.saturating_sub(1))?;
            let mut scratch = NuScratch::default();
            let mut out = Vec::with_capacity(len as usize);
            for i in 0..len {
                out.push(ev.eval_with(&poly::below_index(fq, window, i), &mut scratch)?);
            }
            out
        };
        Ok(MeasureTable { echo: params.echo(), window, values })
    }

    #[inline]
    #[must_use]
    pub fn echo(&self) -> &ParamsEcho {
        &self.echo
    }

    #[inline]
    #[must_use]
    pub fn window(&self) -> u32 {
        self.window
    }

    #[inline]
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the box enumeration index.
    #[inline]
    #[must_use]
    pub fn value_at(&self, idx: u64) -> f64 {
        self.values[idx as usize]
    }

    /// Mean via the same fixed-shape reduction as `box_mean`.
    #[must_use]
    pub fn mean(&self) -> f64 {
        let sum = reduce::tree_sum(0, self.values.len() as u64, &|i| self.values[i as usize]);
        sum / self.values.len() as f64
    }
}
