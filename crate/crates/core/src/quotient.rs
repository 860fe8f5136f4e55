//! Quotient rings F_q[t]/(N) with admissible moduli (no irreducible factor
//! of degree < k), the lifting of a polynomial measure to residues, and the
//! hypergraph measures built on the vertex set of degree-< k polynomials.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlate::PolyMeasure;
use crate::factor;
use crate::field::Fq;
use crate::poly::{self, Poly};
use crate::reduce;
use crate::sieve::{SieveError, SieveParams};

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("modulus has an irreducible factor of degree {factor_degree} < k = {k}")]
    NotAdmissible { factor_degree: usize, k: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("measure radius {r} does not match the modulus degree {modulus_degree}")]
    RadiusMismatch { r: u32, modulus_degree: u32 },
    #[error("condition sum needs {terms} terms, over the budget of {budget}")]
    BudgetExceeded { terms: u64, budget: u64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// F_q[t]/(N) with canonical representatives of degree < deg N, admissible
/// for level k: every irreducible factor of N has degree ≥ k, so N is
/// coprime to every nonzero polynomial of degree < k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRing {
    fq: Fq,
    modulus: Poly,
    k: u32,
}

impl QuotientRing {
    pub fn new(fq: &Fq, modulus: Poly, k: u32) -> Result<QuotientRing, QuotientError> {
        if !modulus.is_monic() {
            return Err(QuotientError::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.deg() == 0 {
            return Err(QuotientError::InvalidModulus("modulus must be nonconstant".into()));
        }
        let fac = factor::factor(fq, &modulus).expect("nonzero modulus");
        if let Some(bad) = fac.prime_degrees().into_iter().find(|&d| (d as u32) < k) {
            return Err(QuotientError::NotAdmissible { factor_degree: bad, k });
        }
        Ok(QuotientRing { fq: fq.clone(), modulus, k })
    }

    #[inline]
    #[must_use]
    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    #[inline]
    #[must_use]
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.modulus.deg() as u32
    }

    /// q^{deg N}, the number of residues.
    #[inline]
    #[must_use]
    pub fn size(&self) -> u64 {
        poly::box_len(&self.fq, self.degree())
    }

    /// The idx-th canonical representative.
    #[inline]
    #[must_use]
    pub fn residue(&self, idx: u64) -> Poly {
        poly::below_index(&self.fq, self.degree(), idx)
    }

    /// Enumeration index of a canonical representative (deg < deg N).
    #[inline]
    #[must_use]
    pub fn index_of(&self, x: &Poly) -> u64 {
        debug_assert!(x.degree().is_none_or(|d| d < self.modulus.deg()));
        poly::box_index(&self.fq, x)
    }

    /// x mod N as a canonical representative.
    #[must_use]
    pub fn reduce(&self, x: &Poly) -> Poly {
        poly::rem(&self.fq, x, &self.modulus).expect("nonzero modulus")
    }
}

/// The hypergraph on the vertex set J = {polynomials of degree < k}, with
/// one edge e_j = J \ {j} per vertex.
#[derive(Debug, Clone)]
pub struct HyperEdgeSpec {
    fq: Fq,
    k: u32,
}

impl HyperEdgeSpec {
    #[must_use]
    pub fn new(fq: &Fq, k: u32) -> HyperEdgeSpec {
        HyperEdgeSpec { fq: fq.clone(), k }
    }

    /// |J| = q^k.
    #[inline]
    #[must_use]
    pub fn vertex_count(&self) -> u64 {
        poly::box_len(&self.fq, self.k)
    }

    /// |e_j| = q^k − 1.
    #[inline]
    #[must_use]
    pub fn edge_size(&self) -> u64 {
        self.vertex_count() - 1
    }

    #[inline]
    #[must_use]
    pub fn vertex(&self, idx: u64) -> Poly {
        poly::below_index(&self.fq, self.k, idx)
    }

    /// Vertex indices of e_j, ascending.
    #[must_use]
    pub fn edge(&self, j: u64) -> Vec<u64> {
        (0..self.vertex_count()).filter(|&i| i != j).collect()
    }
}

/// A measure tabulated on the residues of a quotient ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedMeasure {
    modulus: String,
    values: Vec<f64>,
}

impl LiftedMeasure {
    #[inline]
    #[must_use]
    pub fn modulus_text(&self) -> &str {
        &self.modulus
    }

    #[inline]
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    #[must_use]
    pub fn value_at(&self, idx: u64) -> f64 {
        self.values[idx as usize]
    }

    /// Mean over residues, by the shared fixed-shape reduction.
    #[must_use]
    pub fn mean(&self) -> f64 {
        let sum = reduce::tree_sum(0, self.values.len() as u64, &|i| self.values[i as usize]);
        sum / self.values.len() as f64
    }

    /// CSV rows (residue text, value at 17 significant digits).
    #[must_use]
    pub fn to_csv(&self, ring: &QuotientRing) -> String {
        let mut out = String::from("residue,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{},{:.16e}\n",
                poly::to_text(ring.fq(), &ring.residue(i as u64)),
                v
            ));
        }
        out
    }
}

/// ν̃_N(x + N·F_q[t]) = ν(x) at the canonical representative, for any
/// measure on polynomials.
pub fn lift_measure(
    measure: &dyn PolyMeasure,
    ring: &QuotientRing,
) -> Result<LiftedMeasure, QuotientError> {
    let mut values = Vec::with_capacity(ring.size() as usize);
    for idx in 0..ring.size() {
        values.push(measure.value(&ring.residue(idx))?);
    }
    Ok(LiftedMeasure {
        modulus: poly::to_text(ring.fq(), ring.modulus()),
        values,
    })
}

/// Lift of ν with radius matched to the modulus: requires r = deg N, so the
/// residues are exactly the measure's degree window.
pub fn lift_nu(params: &SieveParams, ring: &QuotientRing) -> Result<LiftedMeasure, QuotientError> {
    if params.r() != ring.degree() {
        return Err(QuotientError::RadiusMismatch {
            r: params.r(),
            modulus_degree: ring.degree(),
        });
    }
    let measure =
        crate::correlate::NuMeasure::new(params, ring.degree().saturating_sub(1))?;
    lift_measure(&measure, ring)
}

/// Σ_{i ∈ e_j} (i − j)·x_i mod N for an edge assignment (coordinates in
/// ascending vertex order, skipping j), as a canonical representative.
#[must_use]
pub fn edge_combination(xs: &[u64], j: u64, ring: &QuotientRing) -> Poly {
    let spec = HyperEdgeSpec::new(ring.fq(), ring.k());
    debug_assert_eq!(xs.len() as u64, spec.edge_size());
    let fq = ring.fq();
    let vj = spec.vertex(j);
    let mut acc = Poly::zero();
    for (&x_idx, i) in xs.iter().zip(spec.edge(j)) {
        let coeff = poly::sub(fq, &spec.vertex(i), &vj);
        let term = ring.reduce(&poly::mul(fq, &coeff, &ring.residue(x_idx)));
        acc = poly::add(fq, &acc, &term);
    }
    acc
}

/// ν̃_{N,j}(x) = ν̃_N(Σ_{i∈e_j}(i−j)·x_i).
#[must_use]
pub fn hypergraph_measure(
    xs: &[u64],
    j: u64,
    ring: &QuotientRing,
    lifted: &LiftedMeasure,
) -> f64 {
    lifted.value_at(ring.index_of(&edge_combination(xs, j, ring)))
}

/// The coordinate split x^{(ω)}: coordinate i comes from `x1` where ω's bit
/// is set and from `x0` otherwise.
#[must_use]
pub fn merge_assignment(x0: &[u64], x1: &[u64], omega: u64) -> Vec<u64> {
    debug_assert_eq!(x0.len(), x1.len());
    (0..x0.len())
        .map(|i| if omega >> i & 1 == 1 { x1[i] } else { x0[i] })
        .collect()
}

/// ψ_ω(x¹) = Σ_{i ∈ e_j, ω_i = 1} (i − j)·x¹_i mod N.
#[must_use]
pub fn psi_omega(x1: &[u64], omega: u64, j: u64, ring: &QuotientRing) -> Poly {
    masked_combination(x1, omega, j, ring, true)
}

/// b_ω = Σ_{i ∈ e_j, ω_i = 0} (i − j)·x⁰_i mod N.
#[must_use]
pub fn b_omega(x0: &[u64], omega: u64, j: u64, ring: &QuotientRing) -> Poly {
    masked_combination(x0, omega, j, ring, false)
}

fn masked_combination(xs: &[u64], omega: u64, j: u64, ring: &QuotientRing, keep_set: bool) -> Poly {
    let spec = HyperEdgeSpec::new(ring.fq(), ring.k());
    let fq = ring.fq();
    let vj = spec.vertex(j);
    let mut acc = Poly::zero();
    for (pos, (&x_idx, i)) in xs.iter().zip(spec.edge(j)).enumerate() {
        if (omega >> pos & 1 == 1) != keep_set {
            continue;
        }
        let coeff = poly::sub(fq, &spec.vertex(i), &vj);
        let term = ring.reduce(&poly::mul(fq, &coeff, &ring.residue(x_idx)));
        acc = poly::add(fq, &acc, &term);
    }
    acc
}

/// Condition-(1) sum: (1/q^{|e_j|·deg N}) Σ_{x¹} ∏_{ω ∈ Ω_j} ν̃_{N,j}(x^{(ω)})
/// with x⁰ fixed; exhaustive over all q^{|e_j|·deg N} edge assignments.
/// Normalization: divide by the number of summed tuples.
pub fn condition_one_estimate(
    j: u64,
    omegas: &[u64],
    ring: &QuotientRing,
    lifted: &LiftedMeasure,
    x0: &[u64],
    budget: u64,
) -> Result<f64, QuotientError> {
    let spec = HyperEdgeSpec::new(ring.fq(), ring.k());
    let edge_size = spec.edge_size() as u32;
    assert_eq!(x0.len() as u64, spec.edge_size(), "x0 must assign every edge coordinate");
    let size = ring.size();
    let terms = size
        .checked_pow(edge_size)
        .filter(|&t| t <= budget)
        .ok_or_else(|| QuotientError::BudgetExceeded {
            terms: size.checked_pow(edge_size).unwrap_or(u64::MAX),
            budget,
        })?;
    let fq = ring.fq();
    // b_ω depends only on x0: precompute per ω.
    let b: Vec<Poly> = omegas.iter().map(|&w| b_omega(x0, w, j, ring)).collect();
    let sum = reduce::tree_reduce(
        0,
        terms,
        reduce::DEFAULT_LEAF,
        &|flat| {
            let mut rest = flat;
            let mut x1 = Vec::with_capacity(x0.len());
            for _ in 0..x0.len() {
                x1.push(rest % size);
                rest /= size;
            }
            let mut prod = 1.0;
            for (&w, bw) in omegas.iter().zip(&b) {
                let point = poly::add(fq, &psi_omega(&x1, w, j, ring), bw);
                prod *= lifted.value_at(ring.index_of(&point));
            }
            prod
        },
        &|a, b| a + b,
        0.0,
    );
    Ok(sum / terms as f64)
}
