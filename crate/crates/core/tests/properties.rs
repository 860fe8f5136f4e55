//! Cross-module invariants at scale: arithmetic identities, enumeration
//! bijections, multiplicativity laws, and independent oracles for the sieve
//! weight and the local densities.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fqsieve::bump::Bump;
use fqsieve::correlate::{self, LinearSystem};
use fqsieve::divisor::{self, CurveModel, Divisor};
use fqsieve::factor::{self, count_irreducible, is_irreducible};
use fqsieve::poly::{self, Poly};
use fqsieve::sieve::{self, SieveParams};
use fqsieve::zeta;
use fqsieve::{Complex, Fq, Rational};

fn fq(p: u32, e: u32) -> Fq {
    Fq::new(p, e).unwrap()
}

/// Random polynomial of degree at most `dmax` (possibly zero).
fn random_poly(rng: &mut ChaCha8Rng, fq: &Fq, dmax: usize) -> Poly {
    let len = rng.gen_range(0..=dmax + 1);
    Poly::from_coeffs((0..len).map(|_| rng.gen_range(0..fq.q()) as u8).collect())
}

/// Random monic polynomial with degree drawn from `lo..=hi`.
fn random_monic(rng: &mut ChaCha8Rng, fq: &Fq, lo: u32, hi: u32) -> Poly {
    let d = rng.gen_range(lo..=hi);
    poly::monic_index(fq, d, rng.gen_range(0..poly::box_len(fq, d)))
}

// ---------------------------------------------------------------------------
// Field and factorization layer
// ---------------------------------------------------------------------------

#[test]
fn exhaustive_irreducible_scan_matches_counting_formula() {
    // Prime fields and proper extensions; every monic polynomial tested.
    for (p, e, dmax) in [(2, 1, 10), (3, 1, 8), (2, 2, 7), (5, 1, 6)] {
        let fq = fq(p, e);
        for d in 1..=dmax {
            let scanned = poly::monic_polys(&fq, d)
                .filter(|f| is_irreducible(&fq, f))
                .count() as u64;
            assert_eq!(
                scanned,
                count_irreducible(&fq, d),
                "q = {} degree {d}",
                fq.q()
            );
        }
    }
}

#[test]
fn factorization_reassembles_ten_thousand_random_polynomials_per_field() {
    for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let fq = fq(p, e);
        let mut rng = ChaCha8Rng::seed_from_u64(0x00fa_c708 + u64::from(fq.q()));
        for trial in 0..10_000 {
            let f = random_poly(&mut rng, &fq, 10);
            if f.is_zero() {
                assert!(factor::factor(&fq, &f).is_err());
                continue;
            }
            let fac = factor::factor(&fq, &f).unwrap();
            // Bit-exact reassembly.
            assert_eq!(fac.reassemble(&fq), f, "trial {trial}, q = {}", fq.q());
            // The unit is the leading coefficient, factors are monic and
            // canonically sorted by (degree, enumeration index).
            assert_eq!(fac.unit, f.leading());
            let mut last = (0usize, 0u64);
            for (prime, mult) in &fac.factors {
                assert!(prime.is_monic());
                assert!(*mult >= 1);
                let key = (prime.deg(), poly::box_index(&fq, prime));
                assert!(key > last || last == (0, 0), "factors out of order");
                last = key;
            }
            // Spot-check irreducibility of the parts on a sample.
            if trial % 64 == 0 {
                for (prime, _) in &fac.factors {
                    assert!(is_irreducible(&fq, prime));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn gcd_divides_both_arguments_and_normalizes(
        a in prop::collection::vec(0u8..3, 0..12),
        b in prop::collection::vec(0u8..3, 0..12),
    ) {
        let fq = fq(3, 1);
        let a = Poly::from_coeffs(a);
        let b = Poly::from_coeffs(b);
        let g = poly::gcd(&fq, &a, &b);
        if g.is_zero() {
            // Only the all-zero pair has gcd zero.
            prop_assert!(a.is_zero() && b.is_zero());
        } else {
            prop_assert!(g.is_monic());
            prop_assert!(poly::rem(&fq, &a, &g).unwrap().is_zero());
            prop_assert!(poly::rem(&fq, &b, &g).unwrap().is_zero());
        }
        // gcd with zero is the monic normalization.
        prop_assert_eq!(poly::gcd(&fq, &a, &Poly::zero()), poly::monic(&fq, &a).0);
    }

    #[test]
    fn frobenius_power_acts_coefficientwise(
        coeffs in prop::collection::vec(0u8..4, 0..9),
        field_pick in 0usize..3,
    ) {
        // f(t)^p = σ(f)(t^p) where σ raises each coefficient to the p-th
        // power; exercises field tables end-to-end, extensions included.
        let fq = [fq(2, 1), fq(3, 1), fq(2, 2)][field_pick].clone();
        let f = Poly::from_coeffs(
            coeffs.iter().map(|&c| c % fq.q() as u8).collect::<Vec<_>>(),
        );
        let p = fq.p();
        let mut lhs = Poly::one();
        for _ in 0..p {
            lhs = poly::mul(&fq, &lhs, &f);
        }
        let mut spread = vec![0u8; f.coeffs().len().saturating_sub(1) * p as usize + 1];
        if f.is_zero() {
            spread = vec![];
        } else {
            for (i, &c) in f.coeffs().iter().enumerate() {
                spread[i * p as usize] = fq.pow(c, u64::from(p));
            }
        }
        let rhs = Poly::from_coeffs(spread);
        if f.is_zero() {
            prop_assert!(lhs.is_zero() || p == 0);
        } else {
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn degree_box_enumeration_is_an_additive_bijection(
        ai in 0u64..512,
        bi in 0u64..512,
    ) {
        // Index -> polynomial -> index round-trips, and adding indices
        // digitwise is adding polynomials.
        let fq = fq(2, 1);
        let a = poly::below_index(&fq, 9, ai);
        let b = poly::below_index(&fq, 9, bi);
        prop_assert_eq!(poly::box_index(&fq, &a), ai);
        prop_assert_eq!(
            poly::below_index(&fq, 9, poly::index_add(&fq, ai, bi, 9)),
            poly::add(&fq, &a, &b)
        );
    }
}

// ---------------------------------------------------------------------------
// Divisor layer
// ---------------------------------------------------------------------------

#[test]
fn divisor_of_turns_products_into_sums_for_ten_thousand_pairs() {
    for (p, e) in [(2, 1), (3, 1), (2, 2)] {
        let fq = fq(p, e);
        let mut rng = ChaCha8Rng::seed_from_u64(0xd170 ^ u64::from(fq.q()));
        for _ in 0..10_000 {
            let f = random_monic(&mut rng, &fq, 1, 6);
            let g = random_monic(&mut rng, &fq, 1, 6);
            let lhs = divisor::divisor_of(&fq, &poly::mul(&fq, &f, &g)).unwrap();
            let rhs = divisor::divisor_of(&fq, &f)
                .unwrap()
                .add(&divisor::divisor_of(&fq, &g).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn moebius_multiplies_on_coprime_parts_and_kills_squares() {
    let fq = fq(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b1a_5eed);
    let mut checked = 0;
    while checked < 2_000 {
        let f = random_monic(&mut rng, &fq, 1, 5);
        let g = random_monic(&mut rng, &fq, 1, 5);
        let (df, dg) = (
            divisor::divisor_of(&fq, &f).unwrap(),
            divisor::divisor_of(&fq, &g).unwrap(),
        );
        if !df.meet(&dg).is_zero() {
            continue;
        }
        assert_eq!(
            divisor::mobius(&df.add(&dg)),
            divisor::mobius(&df) * divisor::mobius(&dg)
        );
        // Inflating any multiplicity zeroes the function.
        if let Some((prime, _)) = df.iter().next() {
            let square = df.add(&Divisor::prime_power(&fq, prime.clone(), 1).unwrap());
            assert_eq!(divisor::mobius(&square), 0);
        }
        checked += 1;
    }
}

#[test]
fn moebius_sums_cancel_exhaustively_up_to_degree_eight() {
    // Σ over monic f of degree n of μ(divisor_of(f)) vanishes for n ≥ 2.
    for q in [2u32, 3] {
        let fq = fq(q, 1);
        for n in 2..=8u32 {
            let total: i64 = poly::monic_polys(&fq, n)
                .map(|f| divisor::mobius(&divisor::divisor_of(&fq, &f).unwrap()))
                .sum();
            assert_eq!(total, 0, "q = {q}, degree {n}");
        }
    }
}

// ---------------------------------------------------------------------------
// Zeta layer
// ---------------------------------------------------------------------------

#[test]
fn zeta_truncation_error_decays_geometrically() {
    for q in [2u32, 3] {
        let fq = fq(q, 1);
        let z = Complex::new(2.0, 0.0);
        let closed = zeta::zeta_closed(&fq, z).unwrap();
        let errs: Vec<f64> = (4..=14)
            .map(|b| (zeta::euler_truncated(&fq, z, b) - closed).norm())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "error must shrink with the cut: {errs:?}");
        }
        // Fit the decay constant on the first half, check it on the rest:
        // err(B) ≤ C·q^{−B(Re z − 1)}.
        let qf = f64::from(q);
        let c_fit = errs[..6]
            .iter()
            .enumerate()
            .map(|(i, e)| e * qf.powi(i as i32 + 4))
            .fold(0.0f64, f64::max);
        for (i, err) in errs.iter().enumerate().skip(6) {
            let b = i as i32 + 4;
            assert!(
                *err <= 1.05 * c_fit * qf.powi(-b),
                "q = {q}, B = {b}: {err} vs fitted bound"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Sieve-weight layer
// ---------------------------------------------------------------------------

#[test]
fn truncated_weight_ignores_multiplicity_inflation() {
    let f2 = fq(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a_bda5);
    for _ in 0..500 {
        let f = random_monic(&mut rng, &f2, 2, 8);
        let d = divisor::divisor_of(&f2, &f).unwrap();
        // Triple the multiplicity of every prime: the signed subset sum sees
        // the same support, so the value is bit-identical.
        let mut inflated = d.clone();
        for (prime, mult) in d.iter() {
            inflated = inflated
                .add(&Divisor::prime_power(&f2, prime.clone(), mult * 2).unwrap());
        }
        for big_r in [3.0, 4.0, 6.5] {
            let a = sieve::lambda_r(&d, big_r, &Bump::Mollifier);
            let b = sieve::lambda_r(&inflated, big_r, &Bump::Mollifier);
            assert_eq!(a.to_bits(), b.to_bits());
            // The literal lattice stream agrees: inflated terms carry μ = 0.
            let c = sieve::lambda_r_lattice(&inflated, big_r, &Bump::Mollifier);
            assert_eq!(a.to_bits(), c.to_bits());
        }
    }
}

#[test]
fn measure_is_nonnegative_and_polynomially_bounded() {
    let f2 = fq(2, 1);
    let params = SieveParams::new(
        CurveModel::line(f2.clone()),
        12,
        4.0,
        1,
        1,
        Poly::one(),
        Bump::Mollifier,
    )
    .unwrap();
    let big_r = params.truncation();
    let mut max_seen = 0.0f64;
    for i in 0..poly::box_len(&f2, 12) {
        let x = poly::below_index(&f2, 12, i);
        let v = sieve::nu(&params, &x).unwrap();
        assert!(v >= 0.0 && v.is_finite());
        max_seen = max_seen.max(v);
    }
    // Polynomial growth cap: the exhaustive maximum sits well under 5·R².
    assert!(max_seen <= 5.0 * big_r * big_r, "max ν = {max_seen}");
    assert!(max_seen > 0.0);
}

#[test]
fn totient_counts_coprime_residues_and_multiplies() {
    for q in [2u32, 3] {
        let f = fq(q, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0x707 + u64::from(q));
        for _ in 0..50 {
            let m = random_monic(&mut rng, &f, 1, 4);
            // Direct count of invertible residues.
            let direct = (0..poly::box_len(&f, m.deg() as u32))
                .filter(|&i| {
                    let x = poly::below_index(&f, m.deg() as u32, i);
                    poly::gcd(&f, &x, &m).is_one()
                })
                .count() as u64;
            assert_eq!(sieve::phi_k(&f, &m).unwrap(), direct);
            // Multiplicativity on a coprime companion.
            let n = random_monic(&mut rng, &f, 1, 3);
            if poly::gcd(&f, &m, &n).is_one() {
                assert_eq!(
                    sieve::phi_k(&f, &poly::mul(&f, &m, &n)).unwrap(),
                    sieve::phi_k(&f, &m).unwrap() * sieve::phi_k(&f, &n).unwrap()
                );
            }
        }
    }
}

/// Independent second-moment oracle: the mean of Λ_R² over monic degree-n
/// polynomials equals Σ_{i,j<R} c_{ij}·φ(i/R)·φ(j/R), where c_{ij} collects
/// signed pair-counts from the Euler product
/// Π_{d<R} (1 − uᵈ/qᵈ − vᵈ/qᵈ + (uv)ᵈ/qᵈ)^{π_d},
/// exactly when n ≥ 2(R−1) (every joint condition then fits in degree n).
fn second_moment_oracle(fq: &Fq, big_r: usize, bump: &Bump) -> f64 {
    let qf = f64::from(fq.q());
    let mut c = vec![vec![0.0f64; big_r]; big_r];
    c[0][0] = 1.0;
    for d in 1..big_r {
        let qd = qf.powi(-(d as i32));
        for _ in 0..count_irreducible(fq, d as u32) {
            let mut next = c.clone();
            for i in 0..big_r {
                for j in 0..big_r {
                    let base = c[i][j];
                    if base == 0.0 {
                        continue;
                    }
                    if i + d < big_r {
                        next[i + d][j] -= base * qd;
                    }
                    if j + d < big_r {
                        next[i][j + d] -= base * qd;
                    }
                    if i + d < big_r && j + d < big_r {
                        next[i + d][j + d] += base * qd;
                    }
                }
            }
            c = next;
        }
    }
    let phi = |x: usize| bump.eval(x as f64 / big_r as f64);
    let mut total = 0.0;
    for (i, row) in c.iter().enumerate() {
        for (j, &weight) in row.iter().enumerate() {
            total += weight * phi(i) * phi(j);
        }
    }
    total
}

#[test]
fn second_moment_matches_the_generating_function_oracle() {
    let f2 = fq(2, 1);
    let bump = Bump::Mollifier;
    let oracle = second_moment_oracle(&f2, 4, &bump);
    for n in [6u32, 8] {
        let count = poly::box_len(&f2, n) as f64;
        let direct: f64 = poly::monic_polys(&f2, n)
            .map(|f| {
                let lam =
                    sieve::lambda_r(&divisor::divisor_of(&f2, &f).unwrap(), 4.0, &bump);
                lam * lam
            })
            .sum::<f64>()
            / count;
        assert!(
            (direct - oracle).abs() <= 1e-10 * oracle.abs().max(1.0),
            "degree {n}: direct {direct} vs oracle {oracle}"
        );
    }
}

// ---------------------------------------------------------------------------
// Local densities and Euler factors
// ---------------------------------------------------------------------------

fn base_params(f2: &Fq) -> SieveParams {
    SieveParams::new(
        CurveModel::line(f2.clone()),
        12,
        4.0,
        1,
        1,
        Poly::one(),
        Bump::Mollifier,
    )
    .unwrap()
}

#[test]
fn primes_dividing_w_carry_no_local_mass() {
    let f2 = fq(2, 1);
    let params = base_params(&f2);
    let sys = LinearSystem::identity(&f2, Poly::one(), 1).unwrap();
    // W = t²+t: both linear primes divide it, so any nontrivial local
    // condition at them is unsatisfiable after the twist.
    for prime in [Poly::t(), Poly::from_coeffs(vec![1, 1])] {
        let val = correlate::omega_at_prime(&sys, &params, &prime, 0b1);
        assert_eq!(val, Rational::from_integer(0));
        // The empty condition set is always fully satisfied.
        let triv = correlate::omega_at_prime(&sys, &params, &prime, 0);
        assert_eq!(triv, Rational::from_integer(1));
    }
    // A prime coprime to W has the generic single-solution density 1/N℘.
    let coprime = Poly::from_coeffs(vec![1, 1, 1]);
    let val = correlate::omega_at_prime(&sys, &params, &coprime, 0b1);
    assert_eq!(val, Rational::new(1, 4));
}

#[test]
fn local_density_is_invariant_under_permuting_the_forms() {
    let f2 = fq(2, 1);
    let params = base_params(&f2);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e_27a9);
    let mut done = 0;
    while done < 30 {
        // Random 3-form system in 2 variables, k = 1.
        let coeffs: Vec<Vec<Poly>> = (0..3)
            .map(|_| {
                (0..2)
                    .map(|_| Poly::constant(rng.gen_range(0..2u8)))
                    .collect()
            })
            .collect();
        let shifts: Vec<Poly> = (0..3).map(|_| random_poly(&mut rng, &f2, 2)).collect();
        let Ok(sys) = LinearSystem::new(&f2, coeffs.clone(), shifts.clone(), 1) else {
            continue;
        };
        // Random squarefree targets of small degree.
        let targets: Vec<Divisor> = (0..3)
            .map(|_| loop {
                let f = random_monic(&mut rng, &f2, 1, 3);
                let d = divisor::divisor_of(&f2, &f).unwrap();
                if d.is_squarefree() {
                    break d;
                }
            })
            .collect();
        let Ok(original) = correlate::omega_local(&sys, &targets, &params) else {
            continue;
        };
        // Rotate the forms together with their targets.
        let rot = |v: &[Vec<Poly>]| -> Vec<Vec<Poly>> {
            vec![v[1].clone(), v[2].clone(), v[0].clone()]
        };
        let sys_rot = LinearSystem::new(
            &f2,
            rot(&coeffs),
            vec![shifts[1].clone(), shifts[2].clone(), shifts[0].clone()],
            1,
        )
        .unwrap();
        let targets_rot = vec![targets[1].clone(), targets[2].clone(), targets[0].clone()];
        let rotated = correlate::omega_local(&sys_rot, &targets_rot, &params).unwrap();
        assert_eq!(original, rotated);
        done += 1;
    }
}

#[test]
fn euler_factor_product_is_symmetric_and_conjugates() {
    let f2 = fq(2, 1);
    let params = base_params(&f2);
    let sys = LinearSystem::new(
        &f2,
        vec![vec![Poly::one(), Poly::zero()], vec![Poly::zero(), Poly::one()]],
        vec![Poly::zero(), Poly::one()],
        1,
    )
    .unwrap();
    let t1 = [0.3, -0.2];
    let t2 = [0.1, 0.45];
    let ab = correlate::euler_f(&t1, &t2, &sys, &params, 6).unwrap();
    // Swapping the two frequency vectors swaps the roles of the two
    // condition sets, which the union-based densities cannot see.
    let ba = correlate::euler_f(&t2, &t1, &sys, &params, 6).unwrap();
    assert!((ab - ba).norm() <= 1e-12 * ab.norm());
    // Negating every frequency conjugates every factor.
    let neg1: Vec<f64> = t1.iter().map(|x| -x).collect();
    let neg2: Vec<f64> = t2.iter().map(|x| -x).collect();
    let conj = correlate::euler_f(&neg1, &neg2, &sys, &params, 6).unwrap();
    assert!((conj - ab.conj()).norm() <= 1e-12 * ab.norm());
}
