//! Correlation estimators for the measure ν: direct cross-correlation sums
//! over systems of independent linear forms, exact local densities ω with
//! their Chinese-remainder factorization, the truncated Euler product F(t,t′)
//! behind the cross-correlation asymptotics, and the calibrated divisor-type
//! majorant for shifted auto-correlations.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor::{Divisor, DivisorError};
use crate::factor;
use crate::field::Fq;
use crate::poly::{self, Poly};
use crate::reduce;
use crate::sieve::{MeasureTable, NuEvaluator, ParamsEcho, SieveError, SieveParams};
use crate::{Complex, Rational};

#[derive(Debug, Error)]
pub enum CorrelateError {
    #[error("invalid linear system: {0}")]
    InvalidSystem(String),
    #[error("exhaustive sum needs {terms} terms, over the budget of {budget}; request sampling mode explicitly")]
    BudgetExceeded { terms: u64, budget: u64 },
    #[error("shift tuple contains a repeated value")]
    DegenerateShifts,
    #[error("target divisor is not squarefree")]
    NotSquarefree,
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
}

// ---------------------------------------------------------------------------
// Linear systems
// ---------------------------------------------------------------------------

/// s independent affine-linear forms in m polynomial variables,
/// ψ_i(x) = Σ_j c_ij·x_j + b_i, with coefficients c_ij of degree < k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    coeffs: Vec<Vec<Poly>>,
    shifts: Vec<Poly>,
    k: u32,
}

impl LinearSystem {
    /// Validates shape, coefficient degrees, the size ranges
    /// s ≤ q^k·2^{q^k} and m ≤ 2·q^k, and pairwise independence (for every
    /// row pair some 2×2 minor is a nonzero polynomial).
    pub fn new(
        fq: &Fq,
        coeffs: Vec<Vec<Poly>>,
        shifts: Vec<Poly>,
        k: u32,
    ) -> Result<LinearSystem, CorrelateError> {
        let s = coeffs.len();
        if s == 0 {
            return Err(CorrelateError::InvalidSystem("no forms".into()));
        }
        let m = coeffs[0].len();
        if m == 0 {
            return Err(CorrelateError::InvalidSystem("no variables".into()));
        }
        if coeffs.iter().any(|row| row.len() != m) {
            return Err(CorrelateError::InvalidSystem("ragged coefficient matrix".into()));
        }
        if shifts.len() != s {
            return Err(CorrelateError::InvalidSystem(format!(
                "{} shifts for {s} forms",
                shifts.len()
            )));
        }
        for (i, row) in coeffs.iter().enumerate() {
            if row.iter().all(Poly::is_zero) {
                return Err(CorrelateError::InvalidSystem(format!("form {i} is zero")));
            }
            for c in row {
                if c.degree().is_some_and(|d| d as u32 >= k) {
                    return Err(CorrelateError::InvalidSystem(format!(
                        "coefficient of degree ≥ k = {k} in form {i}"
                    )));
                }
            }
        }
        let qk = (fq.q() as u64).checked_pow(k).unwrap_or(u64::MAX);
        let s_max = qk.saturating_mul(1u64.checked_shl(qk.min(63) as u32).unwrap_or(u64::MAX));
        if s as u64 > s_max {
            return Err(CorrelateError::InvalidSystem(format!("s = {s} exceeds q^k·2^(q^k)")));
        }
        if m as u64 > 2 * qk {
            return Err(CorrelateError::InvalidSystem(format!("m = {m} exceeds 2·q^k")));
        }
        for i in 0..s {
            for j in i + 1..s {
                if rows_proportional(fq, &coeffs[i], &coeffs[j]) {
                    return Err(CorrelateError::InvalidSystem(format!(
                        "forms {i} and {j} are proportional"
                    )));
                }
            }
        }
        Ok(LinearSystem { coeffs, shifts, k })
    }

    /// Shorthand: s shifted copies of the identity form in one variable,
    /// ψ_i(x) = x + b_i. Valid only for s = 1 (two copies are proportional).
    pub fn identity(fq: &Fq, shift: Poly, k: u32) -> Result<LinearSystem, CorrelateError> {
        LinearSystem::new(fq, vec![vec![Poly::one()]], vec![shift], k)
    }

    #[inline]
    #[must_use]
    pub fn s(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    #[must_use]
    pub fn m(&self) -> usize {
        self.coeffs[0].len()
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    #[must_use]
    pub fn coeffs(&self) -> &[Vec<Poly>] {
        &self.coeffs
    }

    #[inline]
    #[must_use]
    pub fn shifts(&self) -> &[Poly] {
        &self.shifts
    }

    /// ψ_i(x) + b_i for one form.
    #[must_use]
    pub fn apply(&self, fq: &Fq, i: usize, x: &[Poly]) -> Poly {
        let mut acc = self.shifts[i].clone();
        for (c, xv) in self.coeffs[i].iter().zip(x) {
            acc = poly::add(fq, &acc, &poly::mul(fq, c, xv));
        }
        acc
    }

    /// The linear part Σ_j c_ij·x_j without the shift.
    #[must_use]
    pub fn linear_part(&self, fq: &Fq, i: usize, x: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (c, xv) in self.coeffs[i].iter().zip(x) {
            acc = poly::add(fq, &acc, &poly::mul(fq, c, xv));
        }
        acc
    }

    /// Twisted shifts b′_i = W·b_i + α·g, the constant terms of the
    /// numerators W·(ψ_i(x)+b_i) + α·g.
    #[must_use]
    pub fn twisted_shifts(&self, params: &SieveParams) -> Vec<Poly> {
        let fq = params.fq();
        let ag = poly::mul(fq, params.alpha(), params.curve().twist());
        self.shifts
            .iter()
            .map(|b| poly::add(fq, &poly::mul(fq, params.w_poly(), b), &ag))
            .collect()
    }

    /// Largest degree of ψ_i(x)+b_i over x in the degree-`window` box.
    #[must_use]
    pub fn max_value_degree(&self, window: u32) -> u32 {
        let mut best = 0u32;
        for (row, b) in self.coeffs.iter().zip(&self.shifts) {
            let lin = row
                .iter()
                .filter_map(Poly::degree)
                .map(|d| d as u32 + window.saturating_sub(1))
                .max()
                .unwrap_or(0);
            best = best.max(lin).max(b.degree().unwrap_or(0) as u32);
        }
        best
    }
}

/// True when every 2×2 minor of the two coefficient rows vanishes, i.e. the
/// rows are proportional over the fraction field. One column is handled by
/// the same rule (both rows nonzero in a single column are proportional).
fn rows_proportional(fq: &Fq, a: &[Poly], b: &[Poly]) -> bool {
    let m = a.len();
    for c1 in 0..m {
        for c2 in c1 + 1..m {
            let minor = poly::sub(
                fq,
                &poly::mul(fq, &a[c1], &b[c2]),
                &poly::mul(fq, &a[c2], &b[c1]),
            );
            if !minor.is_zero() {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Measures and the cross-correlation estimator
// ---------------------------------------------------------------------------

/// A nonnegative weight on polynomials, the integrand of the estimators.
pub trait PolyMeasure: Sync {
    fn value(&self, x: &Poly) -> Result<f64, SieveError>;
}

/// ν ≡ 1. Injecting it must make every normalized estimator return exactly 1.
pub struct UnitMeasure;

impl PolyMeasure for UnitMeasure {
    fn value(&self, _x: &Poly) -> Result<f64, SieveError> {
        Ok(1.0)
    }
}

/// ν from sieve parameters, backed by a lookup table when the argument
/// window is small enough to tabulate and by trial division otherwise.
pub struct NuMeasure {
    fq: Fq,
    inner: NuMeasureInner,
}

enum NuMeasureInner {
    Table(MeasureTable),
    Direct(NuEvaluator),
}

impl NuMeasure {
    /// `max_arg_deg` bounds the degree of every argument passed later.
    pub fn new(params: &SieveParams, max_arg_deg: u32) -> Result<NuMeasure, SieveError> {
        let twindow = max_arg_deg + 1;
        let tabulated = poly::box_len_checked(params.fq(), twindow)
            .is_some_and(|len| len <= 1 << 22);
        let inner = if tabulated {
            NuMeasureInner::Table(MeasureTable::build(params, twindow)?)
        } else {
            NuMeasureInner::Direct(NuEvaluator::new(params, max_arg_deg)?)
        };
        Ok(NuMeasure { fq: params.fq().clone(), inner })
    }
}

impl PolyMeasure for NuMeasure {
    fn value(&self, x: &Poly) -> Result<f64, SieveError> {
        match &self.inner {
            NuMeasureInner::Table(t) => Ok(t.value_at(poly::box_index(&self.fq, x))),
            NuMeasureInner::Direct(ev) => ev.eval(x),
        }
    }
}

/// How a correlation sum traverses its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Visit all q^{m·window} tuples; error beyond `budget` terms.
    Exhaustive { budget: u64 },
    /// Stratified sampling: for each assignment of the m top coefficients,
    /// draw `per_stratum` uniform tuples with a ChaCha stream seeded from
    /// `seed`. Reports a standard error.
    Stratified { seed: u64, per_stratum: u64 },
}

/// Direct estimate of a normalized correlation sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub window: u32,
    /// The module the box realizes (always the full degree window here).
    pub module_descriptor: String,
    pub terms: u64,
    pub seed: Option<u64>,
    pub echo: ParamsEcho,
}

impl CorrelationReport {
    pub const CSV_HEADER: &'static str = "r,window,estimate,stderr,terms,seed";

    /// One CSV row matching `CSV_HEADER`, floats at 17 significant digits.
    #[must_use]
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{},{},{}",
            self.echo.r,
            self.window,
            self.estimate,
            self.stderr.map_or(String::new(), |s| format!("{s:.16e}")),
            self.terms,
            self.seed.map_or(String::new(), |s| s.to_string()),
        )
    }
}

/// (1/q^{m·window}) Σ_x ∏_i ν(ψ_i(x)+b_i) over x in the m-fold degree box,
/// with ν built from `params`.
pub fn cross_correlation(
    sys: &LinearSystem,
    params: &SieveParams,
    window: u32,
    mode: SumMode,
) -> Result<CorrelationReport, CorrelateError> {
    if window > params.r() {
        return Err(CorrelateError::InvalidSystem(format!(
            "window {window} exceeds the measure radius {}",
            params.r()
        )));
    }
    let measure = NuMeasure::new(params, sys.max_value_degree(window))?;
    cross_correlation_with(sys, params, window, mode, &measure)
}

/// Same estimator with an injected measure (audits use ν ≡ 1).
pub fn cross_correlation_with(
    sys: &LinearSystem,
    params: &SieveParams,
    window: u32,
    mode: SumMode,
    measure: &dyn PolyMeasure,
) -> Result<CorrelationReport, CorrelateError> {
    let fq = params.fq();
    let m = sys.m() as u32;
    let terms = poly::box_len_checked(fq, m * window)
        .ok_or(CorrelateError::BudgetExceeded { terms: u64::MAX, budget: 0 })?;
    let echo = params.echo();
    let descriptor = format!("full degree window {{deg < {window}}}^{}", sys.m());
    match mode {
        SumMode::Exhaustive { budget } => {
            if terms > budget {
                return Err(CorrelateError::BudgetExceeded { terms, budget });
            }
            let stride = poly::box_len(fq, window);
            let sum = reduce::tree_reduce(
                0,
                terms,
                reduce::DEFAULT_LEAF,
                &|flat| term_product(sys, fq, measure, window, stride, flat),
                &sum_results,
                Ok(0.0),
            )?;
            Ok(CorrelationReport {
                estimate: sum / terms as f64,
                stderr: None,
                window,
                module_descriptor: descriptor,
                terms,
                seed: None,
                echo,
            })
        }
        SumMode::Stratified { seed, per_stratum } => {
            let q = fq.q() as u64;
            let strata = q.pow(m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inner = poly::box_len(fq, window.saturating_sub(1));
            let mut strat_means = Vec::with_capacity(strata as usize);
            let mut strat_vars = Vec::with_capacity(strata as usize);
            let mut x = vec![Poly::zero(); sys.m()];
            for stratum in 0..strata {
                let mut mean = 0.0;
                let mut m2 = 0.0;
                for n in 1..=per_stratum {
                    for (v, slot) in x.iter_mut().enumerate() {
                        let top = (stratum / q.pow(v as u32)) % q;
                        let low = rng.gen_range(0..inner);
                        let idx = top * inner + low;
                        *slot = poly::below_index(fq, window, idx);
                    }
                    let mut prod = 1.0;
                    for i in 0..sys.s() {
                        prod *= measure.value(&sys.apply(fq, i, &x))?;
                    }
                    // Welford running mean and scatter.
                    let delta = prod - mean;
                    mean += delta / n as f64;
                    m2 += delta * (prod - mean);
                }
                strat_means.push(mean);
                strat_vars.push(if per_stratum > 1 { m2 / (per_stratum - 1) as f64 } else { 0.0 });
            }
            let estimate = strat_means.iter().sum::<f64>() / strata as f64;
            // Equal-weight strata: Var = (1/K²) Σ var_k/n_k.
            let var = strat_vars.iter().map(|v| v / per_stratum as f64).sum::<f64>()
                / (strata as f64 * strata as f64);
            Ok(CorrelationReport {
                estimate,
                stderr: Some(var.sqrt()),
                window,
                module_descriptor: descriptor,
                terms: strata * per_stratum,
                seed: Some(seed),
                echo,
            })
        }
    }
}

fn term_product(
    sys: &LinearSystem,
    fq: &Fq,
    measure: &dyn PolyMeasure,
    window: u32,
    stride: u64,
    flat: u64,
) -> Result<f64, SieveError> {
    let mut rest = flat;
    let mut x = Vec::with_capacity(sys.m());
    for _ in 0..sys.m() {
        x.push(poly::below_index(fq, window, rest % stride));
        rest /= stride;
    }
    let mut prod = 1.0;
    for i in 0..sys.s() {
        prod *= measure.value(&sys.apply(fq, i, &x))?;
    }
    Ok(prod)
}

fn sum_results(
    a: Result<f64, SieveError>,
    b: Result<f64, SieveError>,
) -> Result<f64, SieveError> {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(x + y),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Local densities ω
// ---------------------------------------------------------------------------

/// ω((d_i)) = |{x ∈ (F_q[t]/d)^m : d_i | W·Σ_j c_ij x_j + b′_i ∀i}| / (N d)^m
/// with d = lcm(d_i), counted directly; exact rational.
pub fn omega_local(
    sys: &LinearSystem,
    targets: &[Divisor],
    params: &SieveParams,
) -> Result<Rational, CorrelateError> {
    if targets.len() != sys.s() {
        return Err(CorrelateError::InvalidSystem(format!(
            "{} targets for {} forms",
            targets.len(),
            sys.s()
        )));
    }
    if targets.iter().any(|d| !d.is_squarefree()) {
        return Err(CorrelateError::NotSquarefree);
    }
    let fq = params.fq();
    let lcm = targets.iter().fold(Divisor::zero(), |acc, d| acc.lcm(d));
    let dd = lcm.degree() as u32;
    let m = sys.m() as u32;
    let tuples = poly::box_len_checked(fq, dd * m)
        .filter(|&n| n <= 1 << 24)
        .expect("omega_local modulus too large to enumerate");
    let bprime = sys.twisted_shifts(params);
    // Numerator primes per form, as plain polynomials.
    let conds: Vec<Vec<Poly>> =
        targets.iter().map(|d| d.iter().map(|(p, _)| p.clone()).collect()).collect();
    let stride = poly::box_len(fq, dd);
    let mut x = vec![Poly::zero(); sys.m()];
    let mut count: i128 = 0;
    for flat in 0..tuples {
        let mut rest = flat;
        for slot in x.iter_mut() {
            *slot = poly::below_index(fq, dd, rest % stride);
            rest /= stride;
        }
        let mut ok = true;
        'forms: for i in 0..sys.s() {
            if conds[i].is_empty() {
                continue;
            }
            let num = poly::add(
                fq,
                &poly::mul(fq, params.w_poly(), &sys.linear_part(fq, i, &x)),
                &bprime[i],
            );
            for p in &conds[i] {
                if !poly::rem(fq, &num, p).expect("prime modulus").is_zero() {
                    ok = false;
                    break 'forms;
                }
            }
        }
        if ok {
            count += 1;
        }
    }
    let denom = (fq.q() as i128).checked_pow(dd * m).expect("omega denominator overflow");
    Ok(Rational::new(count, denom))
}

/// True iff the directly counted ω equals the product of its per-prime
/// localizations, exactly: ω((d_i)) = ∏_{℘ | lcm} ω((d_i ∧ ℘)).
pub fn omega_crt_check(
    sys: &LinearSystem,
    targets: &[Divisor],
    params: &SieveParams,
) -> Result<bool, CorrelateError> {
    let direct = omega_local(sys, targets, params)?;
    let lcm = targets.iter().fold(Divisor::zero(), |acc, d| acc.lcm(d));
    let mut product = Rational::one();
    for (p, _) in lcm.iter() {
        let local: Vec<Divisor> = targets
            .iter()
            .map(|d| {
                if d.multiplicity(p) > 0 {
                    Divisor::prime_power(params.fq(), p.clone(), 1).expect("prime factor")
                } else {
                    Divisor::zero()
                }
            })
            .collect();
        product *= omega_local(sys, &local, params)?;
    }
    Ok(direct == product)
}

// ---------------------------------------------------------------------------
// Per-prime linear algebra and the Euler product F(t, t′)
// ---------------------------------------------------------------------------

/// The rank/consistency of the local conditions {℘ | W·Σ_j c_ij x_j + b′_i}
/// for i in a subset, solved over the residue field F_q[t]/(℘):
/// ω = N℘^{−rank} when consistent, 0 otherwise.
struct LocalSystem {
    /// Twisted coefficient residues, one row per form.
    rows: Vec<Vec<Poly>>,
    /// Twisted shift residues.
    rhs: Vec<Poly>,
    modulus: Poly,
}

impl LocalSystem {
    fn new(sys: &LinearSystem, bprime: &[Poly], params: &SieveParams, prime: &Poly) -> LocalSystem {
        let fq = params.fq();
        let rows = sys
            .coeffs()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let wc = poly::mul(fq, params.w_poly(), c);
                        poly::rem(fq, &wc, prime).expect("prime modulus")
                    })
                    .collect()
            })
            .collect();
        let rhs = bprime
            .iter()
            .map(|b| poly::rem(fq, b, prime).expect("prime modulus"))
            .collect();
        LocalSystem { rows, rhs, modulus: prime.clone() }
    }

    /// (consistent, rank) of the subset's affine system; `subset` is a bit
    /// mask over the s forms. Elimination by cross-multiplication
    /// (row ← pivot_lead·row − row_lead·pivot), which preserves rank and
    /// consistency over the residue field without any inverses.
    fn solve_subset(&self, fq: &Fq, subset: u32) -> (bool, u32) {
        let m = self.rows[0].len();
        let mut pivots: Vec<(Vec<Poly>, Poly)> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        for i in 0..self.rows.len() {
            if subset & (1 << i) == 0 {
                continue;
            }
            let mut row = self.rows[i].clone();
            let mut rhs = poly::neg(fq, &self.rhs[i]);
            for (p_idx, (prow, prhs)) in pivot_cols.iter().zip(&pivots) {
                let lead = row[*p_idx].clone();
                if lead.is_zero() {
                    continue;
                }
                let plead = prow[*p_idx].clone();
                let mix = |a: &Poly, b: &Poly| {
                    let scaled = poly::sub(
                        fq,
                        &poly::mul(fq, &plead, a),
                        &poly::mul(fq, &lead, b),
                    );
                    poly::rem(fq, &scaled, &self.modulus).expect("prime modulus")
                };
                for c in 0..m {
                    row[c] = mix(&row[c].clone(), &prow[c]);
                }
                rhs = mix(&rhs, prhs);
            }
            match row.iter().position(|c| !c.is_zero()) {
                None => {
                    if !rhs.is_zero() {
                        return (false, 0);
                    }
                }
                Some(col) => {
                    pivot_cols.push(col);
                    pivots.push((row, rhs));
                }
            }
        }
        (true, pivots.len() as u32)
    }
}

/// ω at a single prime for the subset of forms in `subset` (bit i set means
/// form i is constrained), via the rank formula N℘^{−rank}. Agrees exactly
/// with `omega_local` on the corresponding prime targets; this shortcut is
/// what the Euler product evaluates at every prime.
pub fn omega_at_prime(
    sys: &LinearSystem,
    params: &SieveParams,
    prime: &Poly,
    subset: u32,
) -> Rational {
    let bprime = sys.twisted_shifts(params);
    let local = LocalSystem::new(sys, &bprime, params, prime);
    let (consistent, rank) = local.solve_subset(params.fq(), subset);
    if !consistent {
        return Rational::zero();
    }
    let np = (params.fq().q() as i128).pow(prime.deg() as u32);
    Rational::new(1, np.pow(rank))
}

/// Truncated Euler product F(t, t′) = ∏_{deg ℘ ≤ B} f_℘ with
/// f_℘ = Σ_{S,S′ ⊆ [s]} (−1)^{|S|+|S′|} ω(S∪S′) · N℘^{−[Σ_S(1+it_j) + Σ_{S′}(1+it′_j)]/R},
/// where ω(U) is the exact local density of the conditions indexed by U.
/// Every prime dividing W contributes the factor 1 (its nontrivial ω vanish).
pub fn euler_f(
    tvec: &[f64],
    tvec_prime: &[f64],
    sys: &LinearSystem,
    params: &SieveParams,
    b_cut: u32,
) -> Result<Complex, CorrelateError> {
    let s = sys.s();
    if tvec.len() != s || tvec_prime.len() != s {
        return Err(CorrelateError::InvalidSystem(format!(
            "phase vectors must have length s = {s}"
        )));
    }
    assert!(s <= 12, "subset expansion is exponential in s");
    let fq = params.fq();
    let big_r = params.truncation();
    let lnq = (fq.q() as f64).ln();
    let bprime = sys.twisted_shifts(params);
    // Per-form exponents (1+it_j)/R and (1+it′_j)/R.
    let za: Vec<Complex> = tvec.iter().map(|&t| Complex::new(1.0, t) / big_r).collect();
    let zb: Vec<Complex> = tvec_prime.iter().map(|&t| Complex::new(1.0, t) / big_r).collect();
    let mut log_total = Complex::zero();
    for group in factor::sieved_irreducibles(fq, b_cut) {
        for prime in &group {
            let local = LocalSystem::new(sys, &bprime, params, prime);
            let d = prime.deg() as u32;
            let ln_np = d as f64 * lnq;
            // ω(U)·N℘^{−rank} per subset, precomputed once.
            let mut omega = vec![Complex::zero(); 1 << s];
            for (u, slot) in omega.iter_mut().enumerate() {
                let (consistent, rank) = local.solve_subset(fq, u as u32);
                if consistent {
                    *slot = Complex::new((-(rank as f64) * ln_np).exp(), 0.0);
                }
            }
            let mut f = Complex::zero();
            for sa in 0u32..(1 << s) {
                // Σ_S (1+it_j)/R over the first subset.
                let mut ea = Complex::zero();
                let mut bits = sa;
                while bits != 0 {
                    ea += za[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                for sb in 0u32..(1 << s) {
                    let mut eb = ea;
                    let mut bits = sb;
                    while bits != 0 {
                        eb += zb[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    let sign = if (sa.count_ones() + sb.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                    let w = omega[(sa | sb) as usize];
                    if w != Complex::zero() {
                        f += sign * w * (-eb * ln_np).exp();
                    }
                }
            }
            if f == Complex::zero() {
                return Ok(Complex::zero());
            }
            log_total += f.ln();
        }
    }
    Ok(log_total.exp())
}

// ---------------------------------------------------------------------------
// Auto-correlation and its calibrated majorant
// ---------------------------------------------------------------------------

/// Frozen constants of the divisor-type majorant
/// bound(y) = C_fit·∏_{i<j} ∏_{℘ | y_i−y_j, ℘ ∤ W} (1 + C_s/N℘).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoCalibration {
    pub q: u32,
    pub s: usize,
    pub c_s: f64,
    pub c_fit: f64,
}

/// Both sides of one auto-correlation comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoReport {
    pub lhs: f64,
    pub bound: f64,
    pub window: u32,
    pub shifts: Vec<String>,
    pub echo: ParamsEcho,
}

/// (1/q^window) Σ_x ∏_i ν(x+y_i), against the calibrated prime-product bound.
pub fn auto_correlation(
    yvec: &[Poly],
    params: &SieveParams,
    window: u32,
    cal: &AutoCalibration,
) -> Result<AutoReport, CorrelateError> {
    for i in 0..yvec.len() {
        for j in i + 1..yvec.len() {
            if yvec[i] == yvec[j] {
                return Err(CorrelateError::DegenerateShifts);
            }
        }
    }
    let fq = params.fq();
    let max_arg = yvec
        .iter()
        .filter_map(Poly::degree)
        .map(|d| d as u32 + 1)
        .max()
        .unwrap_or(0)
        .max(window);
    let measure = NuMeasure::new(params, max_arg.saturating_sub(1).max(window.saturating_sub(1)))?;
    let len = poly::box_len(fq, window);
    let sum = reduce::tree_reduce(
        0,
        len,
        reduce::DEFAULT_LEAF,
        &|idx| {
            let x = poly::below_index(fq, window, idx);
            let mut prod = 1.0;
            for y in yvec {
                prod *= measure.value(&poly::add(fq, &x, y))?;
            }
            Ok(prod)
        },
        &sum_results,
        Ok(0.0),
    )?;
    let lhs = sum / len as f64;
    let bound = cal.c_fit * pair_difference_product(yvec, params, cal.c_s);
    Ok(AutoReport {
        lhs,
        bound,
        window,
        shifts: yvec.iter().map(|y| poly::to_text(fq, y)).collect(),
        echo: params.echo(),
    })
}

/// ∏_{i<j} ∏_{℘ | y_i−y_j, ℘ ∤ W} (1 + c_s/N℘) over distinct primes of each
/// pairwise difference.
fn pair_difference_product(yvec: &[Poly], params: &SieveParams, c_s: f64) -> f64 {
    let fq = params.fq();
    let q = fq.q() as f64;
    let mut acc = 1.0;
    for i in 0..yvec.len() {
        for j in i + 1..yvec.len() {
            let diff = poly::sub(fq, &yvec[i], &yvec[j]);
            let fac = factor::factor(fq, &diff).expect("distinct shifts");
            for (p, _) in &fac.factors {
                if poly::rem(fq, params.w_poly(), p).expect("prime").is_zero() {
                    continue;
                }
                acc *= 1.0 + c_s / q.powi(p.deg() as i32);
            }
        }
    }
    acc
}

/// One calibration sweep for shift count s: scans C_s over a fixed grid to
/// minimize the spread of lhs/product over the training family, then sets
/// C_fit to the family maximum (the bound holds on all of it by
/// construction). The training family pins y = (0, …, 0, y_last) with y_last
/// running over the nonzero polynomials of degree < `train_deg`.
pub fn calibrate_auto(
    params: &SieveParams,
    window: u32,
    s: usize,
    train_deg: u32,
) -> Result<AutoCalibration, CorrelateError> {
    assert!(s >= 2, "calibration needs at least one shift pair");
    let fq = params.fq();
    let max_arg = window.max(train_deg).saturating_sub(1);
    let measure = NuMeasure::new(params, max_arg)?;
    let len = poly::box_len(fq, window);
    // Shift tuples (0, y) on top of s−2 further zero-offset copies would
    // repeat shifts; instead spread the first s−1 shifts over fixed distinct
    // low-degree points and vary the last.
    let fixed: Vec<Poly> = (0..s as u64 - 1).map(|i| poly::below_index(fq, 8, i)).collect();
    let mut lhss = Vec::new();
    let mut tuples = Vec::new();
    for yi in 1..poly::box_len(fq, train_deg) {
        let y = poly::below_index(fq, train_deg, yi);
        if fixed.contains(&y) {
            continue;
        }
        let mut tuple = fixed.clone();
        tuple.push(y);
        let sum = reduce::tree_reduce(
            0,
            len,
            reduce::DEFAULT_LEAF,
            &|idx| {
                let x = poly::below_index(fq, window, idx);
                let mut prod = 1.0;
                for yv in &tuple {
                    prod *= measure.value(&poly::add(fq, &x, yv))?;
                }
                Ok(prod)
            },
            &sum_results,
            Ok(0.0),
        )?;
        lhss.push(sum / len as f64);
        tuples.push(tuple);
    }
    let grid = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let mut best = (f64::INFINITY, grid[0], 1.0);
    for &c_s in &grid {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (lhs, tuple) in lhss.iter().zip(&tuples) {
            let ratio = lhs / pair_difference_product(tuple, params, c_s);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let spread = hi / lo;
        if spread < best.0 {
            best = (spread, c_s, hi);
        }
    }
    Ok(AutoCalibration { q: fq.q(), s, c_s: best.1, c_fit: best.2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::Bump;
    use crate::divisor::{self, CurveModel};

    fn f2() -> Fq {
        Fq::new(2, 1).unwrap()
    }

    fn params_w1(r: u32, big_r: f64) -> SieveParams {
        SieveParams::new(CurveModel::line(f2()), r, big_r, 1, 1, Poly::one(), Bump::Mollifier)
            .unwrap()
    }

    fn params_w0(r: u32, big_r: f64) -> SieveParams {
        SieveParams::new(CurveModel::line(f2()), r, big_r, 1, 0, Poly::one(), Bump::Mollifier)
            .unwrap()
    }

    #[test]
    fn system_validation() {
        let fq = f2();
        let one = Poly::one;
        // Proportional rows rejected.
        let bad = LinearSystem::new(
            &fq,
            vec![vec![one(), one()], vec![one(), one()]],
            vec![Poly::zero(), Poly::one()],
            1,
        );
        assert!(matches!(bad, Err(CorrelateError::InvalidSystem(_))));
        // Independent coordinates accepted.
        let good = LinearSystem::new(
            &fq,
            vec![vec![one(), Poly::zero()], vec![Poly::zero(), one()]],
            vec![Poly::zero(), Poly::zero()],
            1,
        )
        .unwrap();
        assert_eq!((good.s(), good.m()), (2, 2));
        // Coefficient degree bound: deg t ≥ k = 1.
        let too_big =
            LinearSystem::new(&fq, vec![vec![Poly::t()]], vec![Poly::zero()], 1);
        assert!(matches!(too_big, Err(CorrelateError::InvalidSystem(_))));
        // Zero form rejected.
        let zero = LinearSystem::new(&fq, vec![vec![Poly::zero()]], vec![Poly::one()], 1);
        assert!(matches!(zero, Err(CorrelateError::InvalidSystem(_))));
        // Two forms in one variable are always proportional.
        let m1 = LinearSystem::new(
            &fq,
            vec![vec![one()], vec![one()]],
            vec![Poly::zero(), Poly::one()],
            1,
        );
        assert!(matches!(m1, Err(CorrelateError::InvalidSystem(_))));
    }

    #[test]
    fn unit_measure_gives_exactly_one() {
        let fq = f2();
        let params = params_w1(12, 6.0);
        let sys = LinearSystem::new(
            &fq,
            vec![vec![Poly::one(), Poly::zero()], vec![Poly::zero(), Poly::one()]],
            vec![Poly::zero(), Poly::t()],
            1,
        )
        .unwrap();
        let rep = cross_correlation_with(
            &sys,
            &params,
            6,
            SumMode::Exhaustive { budget: 1 << 20 },
            &UnitMeasure,
        )
        .unwrap();
        assert_eq!(rep.estimate, 1.0);
        assert_eq!(rep.terms, 1 << 12);
    }

    #[test]
    fn identity_form_reproduces_box_mean_exactly() {
        let params = params_w1(10, 10.0);
        let sys = LinearSystem::identity(&f2(), Poly::zero(), 1).unwrap();
        let rep = cross_correlation(&sys, &params, 10, SumMode::Exhaustive { budget: 1 << 20 })
            .unwrap();
        let direct = crate::sieve::box_mean(&params, 10).unwrap();
        assert_eq!(rep.estimate.to_bits(), direct.to_bits());
    }

    #[test]
    fn independent_coordinates_multiply() {
        let fq = f2();
        let params = params_w1(8, 8.0);
        let sys = LinearSystem::new(
            &fq,
            vec![vec![Poly::one(), Poly::zero()], vec![Poly::zero(), Poly::one()]],
            vec![Poly::zero(), Poly::zero()],
            1,
        )
        .unwrap();
        let rep =
            cross_correlation(&sys, &params, 8, SumMode::Exhaustive { budget: 1 << 20 }).unwrap();
        let mean = crate::sieve::box_mean(&params, 8).unwrap();
        assert!((rep.estimate - mean * mean).abs() < 1e-12);
    }

    #[test]
    fn budget_exceeded_reports_terms() {
        let params = params_w1(12, 6.0);
        let sys = LinearSystem::identity(&f2(), Poly::zero(), 1).unwrap();
        let err = cross_correlation(&sys, &params, 12, SumMode::Exhaustive { budget: 100 })
            .unwrap_err();
        match err {
            CorrelateError::BudgetExceeded { terms, budget } => {
                assert_eq!(terms, 1 << 12);
                assert_eq!(budget, 100);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn stratified_sampling_tracks_exhaustive() {
        let params = params_w1(10, 10.0);
        let sys = LinearSystem::identity(&f2(), Poly::zero(), 1).unwrap();
        let exact = cross_correlation(&sys, &params, 10, SumMode::Exhaustive { budget: 1 << 20 })
            .unwrap();
        let sampled = cross_correlation(
            &sys,
            &params,
            10,
            SumMode::Stratified { seed: 7, per_stratum: 400 },
        )
        .unwrap();
        let stderr = sampled.stderr.unwrap();
        assert!(stderr > 0.0);
        assert!(
            (sampled.estimate - exact.estimate).abs() < 5.0 * stderr,
            "sampled {} exact {} stderr {stderr}",
            sampled.estimate,
            exact.estimate
        );
        // Same seed, same estimate.
        let again = cross_correlation(
            &sys,
            &params,
            10,
            SumMode::Stratified { seed: 7, per_stratum: 400 },
        )
        .unwrap();
        assert_eq!(again.estimate.to_bits(), sampled.estimate.to_bits());
    }

    #[test]
    fn omega_hand_values() {
        let fq = f2();
        // W = 1 so the twist is trivial.
        let params = params_w0(8, 4.0);
        let sys = LinearSystem::identity(&fq, Poly::zero(), 1).unwrap();
        // Empty condition.
        let w = omega_local(&sys, &[Divisor::zero()], &params).unwrap();
        assert_eq!(w, Rational::one());
        // Single prime t on the identity form: 1/Nt = 1/2.
        let dt = Divisor::prime_power(&fq, Poly::t(), 1).unwrap();
        let w = omega_local(&sys, std::slice::from_ref(&dt), &params).unwrap();
        assert_eq!(w, Rational::new(1, 2));
        // A prime dividing W with a nonvanishing shift: exactly 0.
        let params_w = params_w1(8, 4.0);
        let w = omega_local(&sys, &[dt], &params_w).unwrap();
        assert_eq!(w, Rational::zero());
        // Non-squarefree target rejected.
        let sq = Divisor::prime_power(&fq, Poly::t(), 2).unwrap();
        assert!(matches!(
            omega_local(&sys, &[sq], &params),
            Err(CorrelateError::NotSquarefree)
        ));
    }

    #[test]
    fn omega_crt_factorizes() {
        let fq = f2();
        let params = params_w0(8, 4.0);
        let sys = LinearSystem::identity(&fq, Poly::zero(), 1).unwrap();
        // d = t(t+1): 1/4 = (1/2)(1/2).
        let d = divisor::divisor_of(&fq, &Poly::from_coeffs(vec![0, 1, 1])).unwrap();
        let w = omega_local(&sys, std::slice::from_ref(&d), &params).unwrap();
        assert_eq!(w, Rational::new(1, 4));
        assert!(omega_crt_check(&sys, &[d], &params).unwrap());
        // Zero target: both sides 1.
        assert!(omega_crt_check(&sys, &[Divisor::zero()], &params).unwrap());
    }

    #[test]
    fn omega_rank_shortcut_matches_direct_count() {
        let fq = f2();
        let params = params_w1(8, 4.0);
        let sys = LinearSystem::new(
            &fq,
            vec![vec![Poly::one(), Poly::zero()], vec![Poly::one(), Poly::one()]],
            vec![Poly::zero(), Poly::one()],
            1,
        )
        .unwrap();
        for p in factor::irreducibles_up_to(&fq, 3) {
            let dp = Divisor::prime_power(&fq, p.clone(), 1).unwrap();
            for subset in 0u32..4 {
                let targets: Vec<Divisor> = (0..2)
                    .map(|i| if subset & (1 << i) != 0 { dp.clone() } else { Divisor::zero() })
                    .collect();
                let direct = omega_local(&sys, &targets, &params).unwrap();
                let shortcut = omega_at_prime(&sys, &params, &p, subset);
                assert_eq!(direct, shortcut, "prime {:?} subset {subset}", p);
            }
        }
    }

    #[test]
    fn euler_f_empty_product_and_conjugation() {
        let fq = f2();
        let params = params_w1(12, 4.0);
        let sys = LinearSystem::identity(&fq, Poly::zero(), 1).unwrap();
        let f0 = euler_f(&[0.3], &[0.1], &sys, &params, 0).unwrap();
        assert_eq!(f0, Complex::one());
        let f = euler_f(&[0.3], &[0.1], &sys, &params, 8).unwrap();
        let g = euler_f(&[-0.3], &[-0.1], &sys, &params, 8).unwrap();
        assert!((f.conj() - g).norm() < 1e-12);
        assert!(f.im.abs() > 0.0 || f.re != 1.0); // the product moved
    }

    #[test]
    fn euler_f_is_incremental_in_the_cut() {
        let fq = f2();
        let params = params_w1(12, 4.0);
        let sys = LinearSystem::identity(&fq, Poly::zero(), 1).unwrap();
        let b = 7u32;
        let low = euler_f(&[0.2], &[-0.4], &sys, &params, b).unwrap();
        let high = euler_f(&[0.2], &[-0.4], &sys, &params, b + 1).unwrap();
        // The ratio must equal the product of the degree-(b+1) factors, i.e.
        // dividing out the low cut leaves a finite product close to it.
        let mut extra = Complex::one();
        let bprime = sys.twisted_shifts(&params);
        let lnq = 2f64.ln();
        for p in factor::irreducibles(&fq, b + 1) {
            let local = LocalSystem::new(&sys, &bprime, &params, &p);
            let (cons, rank) = local.solve_subset(&fq, 1);
            let om = if cons { (-(rank as f64) * (b + 1) as f64 * lnq).exp() } else { 0.0 };
            let z = Complex::new(1.0, 0.2) / params.truncation();
            let zp = Complex::new(1.0, -0.4) / params.truncation();
            let ln_np = (b + 1) as f64 * lnq;
            let f = Complex::one() - om * (-z * ln_np).exp() - om * (-zp * ln_np).exp()
                + om * (-(z + zp) * ln_np).exp();
            extra *= f;
        }
        assert!((high - low * extra).norm() < 1e-12 * high.norm());
    }

    #[test]
    fn euler_f_approaches_closed_form_target() {
        // Identity form, W = t²+t, α = 1, t = t′ = 0: as B and R grow, F
        // approaches (q^{deg W}/(φ_K·R·residue))·(1/2) = 2·ln 2/R.
        let fq = f2();
        let sys = LinearSystem::identity(&fq, Poly::zero(), 1).unwrap();
        let frozen = [0.09846, 0.05453, 0.02947];
        let mut deltas = Vec::new();
        for (i, big_r) in [3.0, 4.0, 5.0].into_iter().enumerate() {
            let params = params_w1(4 * big_r as u32, big_r);
            let f = euler_f(&[0.0], &[0.0], &sys, &params, 4 * big_r as u32).unwrap();
            let target = 2.0 * 2f64.ln() / big_r;
            let delta = (f.re / target - 1.0).abs();
            assert!(f.im.abs() < 1e-12);
            assert!((delta - frozen[i]).abs() < 1e-4, "R={big_r}: delta {delta}");
            deltas.push(delta);
        }
        assert!(deltas[0] > deltas[1] && deltas[1] > deltas[2], "{deltas:?}");
    }

    #[test]
    fn auto_correlation_reports_and_guards() {
        let params = params_w1(12, 12.0);
        let cal = AutoCalibration { q: 2, s: 2, c_s: 2.0, c_fit: 1.0 };
        let dup = auto_correlation(&[Poly::zero(), Poly::zero()], &params, 10, &cal);
        assert!(matches!(dup, Err(CorrelateError::DegenerateShifts)));
        // Δ = 1: empty prime product, bound = C_fit.
        let rep = auto_correlation(&[Poly::zero(), Poly::one()], &params, 10, &cal).unwrap();
        assert_eq!(rep.bound, 1.0);
        assert!(rep.lhs.is_finite() && rep.lhs >= 0.0);
        // Δ = t⁴+t = t(t+1)(t²+t+1): only the degree-2 prime survives the
        // W-coprimality filter at w = 1.
        let y = Poly::from_coeffs(vec![0, 1, 0, 0, 1]);
        let rep2 = auto_correlation(&[Poly::zero(), y], &params, 10, &cal).unwrap();
        assert!((rep2.bound - (1.0 + 2.0 / 4.0)).abs() < 1e-15);
        // Single shift: no pairs, bound = C_fit.
        let rep1 = auto_correlation(&[Poly::t()], &params, 10, &cal).unwrap();
        assert_eq!(rep1.bound, 1.0);
    }

    #[test]
    fn calibration_dominates_its_training_family() {
        let params = params_w1(12, 12.0);
        let cal = calibrate_auto(&params, 12, 2, 5).unwrap();
        assert!(cal.c_fit > 0.0);
        let fq = f2();
        for yi in 1..poly::box_len(&fq, 5) {
            let y = poly::below_index(&fq, 5, yi);
            if y == Poly::zero() {
                continue;
            }
            let rep = auto_correlation(&[Poly::zero(), y], &params, 12, &cal).unwrap();
            assert!(
                rep.lhs <= rep.bound * (1.0 + 1e-12),
                "y index {yi}: lhs {} bound {}",
                rep.lhs,
                rep.bound
            );
        }
    }

    #[test]
    fn report_csv_row_shape() {
        let params = params_w1(10, 10.0);
        let sys = LinearSystem::identity(&f2(), Poly::zero(), 1).unwrap();
        let rep = cross_correlation(&sys, &params, 8, SumMode::Exhaustive { budget: 1 << 20 })
            .unwrap();
        let row = rep.csv_row();
        assert_eq!(row.split(',').count(), CorrelationReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("10,8,"));
        let json = serde_json::to_string(&rep).unwrap();
        let back: CorrelationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }
}
