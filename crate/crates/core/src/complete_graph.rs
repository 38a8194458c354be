//! Complete graphs K_u with section e_ij (i < j): the single and star voltage
//! families, the linked-pair β₂ expression, and invariant densities in u.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::char_series::{laurent_determinant, voltage_matrix};
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, SpanningTree};
use crate::padic::{val_ell, OddPrime};
use crate::series::LaurentPoly;
use crate::voltage::VoltageAssignment;

/// K_u with undirected edges (i, j), i < j, in lexicographic order.
pub fn build_complete(u: usize) -> Result<Multigraph> {
    if u < 2 {
        return Err(Error::InvalidGraph("a complete graph needs at least two vertices".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..u).flat_map(|i| (i + 1..u).map(move |j| (i, j))).collect();
    Multigraph::from_undirected(u, &pairs)
}

/// Position of e_ij (0-based, i < j) in the section of `build_complete(u)`.
pub fn edge_index(u: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < u);
    i * (2 * u - i - 1) / 2 + (j - i - 1)
}

/// Section values from an upper-triangular matrix; entries on or below the
/// diagonal are ignored.
pub fn voltage_from_matrix(u: usize, a: &[Vec<i64>]) -> Vec<BigInt> {
    (0..u).flat_map(|i| (i + 1..u).map(move |j| (i, j))).map(|(i, j)| BigInt::from(a[i][j])).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assignment {
    /// a_12 = a, all else zero.
    Single,
    /// a_1j = a for 2 ≤ j ≤ u − 1, all else zero.
    Star,
}

pub fn assignment_matrix(u: usize, a: i64, kind: Assignment) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; u]; u];
    match kind {
        Assignment::Single => m[0][1] = a,
        Assignment::Star => (1..u - 1).for_each(|j| m[0][j] = a),
    }
    m
}

/// The path v_1, v_u, v_{u−1}, …, v_2, which avoids every edge carrying a
/// nonzero voltage in either family.
pub fn assignment_tree(g: &Multigraph, u: usize) -> Result<SpanningTree> {
    let mut edges = vec![edge_index(u, 0, u - 1)];
    edges.extend((2..u).map(|k| edge_index(u, k - 1, k)));
    SpanningTree::new(g, edges)
}

/// (u − 2)·u^(u−3).
pub fn complete_constant(u: usize) -> BigInt {
    BigInt::from(u - 2) * num_traits::pow(BigInt::from(u), u - 3)
}

/// −c(x^a + x^−a) + 2c with c = (u − 2)u^(u−3), the determinant of M(x) for
/// both families.
pub fn closed_form_determinant(u: usize, a: i64) -> LaurentPoly {
    let c = complete_constant(u);
    let two_c = LaurentPoly::constant(&c * 2);
    let sym = &LaurentPoly::monomial(c.clone(), a) + &LaurentPoly::monomial(c, -a);
    &two_c - &sym
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompleteInvariants {
    pub mu: u32,
    pub lambda: u32,
}

/// μ = v_ℓ((u−2)u^(u−3)), λ = 1 for either family with ℓ ∤ a.
pub fn family_invariants(u: usize, a: i64, ell: OddPrime) -> Result<CompleteInvariants> {
    if u < 3 {
        return Err(Error::InvalidInput("the voltage families need u ≥ 3".into()));
    }
    if a.rem_euclid(ell.get() as i64) == 0 {
        return Err(Error::Inadmissible { ell: ell.get() });
    }
    Ok(CompleteInvariants { mu: mu_closed_form(u as u64, ell), lambda: 1 })
}

pub fn single_voltage_invariants(u: usize, a: i64, ell: OddPrime) -> Result<CompleteInvariants> {
    family_invariants(u, a, ell)
}

pub fn star_voltage_invariants(u: usize, a: i64, ell: OddPrime) -> Result<CompleteInvariants> {
    family_invariants(u, a, ell)
}

/// v_ℓ(u − 2) + (u − 3)·v_ℓ(u), for u ≥ 3.
pub fn mu_closed_form(u: u64, ell: OddPrime) -> u32 {
    let v = |mut n: u64| {
        let mut k = 0u32;
        while n % ell.get() == 0 {
            n /= ell.get();
            k += 1;
        }
        k
    };
    v(u - 2) + (u as u32 - 3) * v(u)
}

/// Unordered pairs of distinct edges of K_u (0-based, i < j) by how they meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedPairSets {
    pub u: usize,
    /// Chains (i, j), (j, l) with i < j < l.
    pub pi: Vec<((usize, usize), (usize, usize))>,
    /// Pairs sharing their smaller endpoint or their larger endpoint.
    pub pi_complement: Vec<((usize, usize), (usize, usize))>,
}

pub fn linked_pairs(u: usize) -> LinkedPairSets {
    let edges: Vec<(usize, usize)> = (0..u).flat_map(|i| (i + 1..u).map(move |j| (i, j))).collect();
    let mut pi = Vec::new();
    let mut pi_complement = Vec::new();
    for (x, &(i, j)) in edges.iter().enumerate() {
        for &(k, l) in &edges[x + 1..] {
            if j == k || l == i {
                let pair = if j == k { ((i, j), (k, l)) } else { ((k, l), (i, j)) };
                pi.push(pair);
            } else if i == k || j == l {
                pi_complement.push(((i, j), (k, l)));
            }
        }
    }
    LinkedPairSets { u, pi, pi_complement }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedPairBeta2 {
    pub u: usize,
    #[serde(with = "crate::stats::bigint_string")]
    pub formula: BigInt,
    #[serde(with = "crate::stats::bigint_string")]
    pub exact: BigInt,
    pub verified: bool,
    /// u > 7: the formula has only been checked on small u.
    pub conjectural: bool,
}

/// −(u−2)u^(u−3)·Σa_ij² + 2u^(u−3)·(Σ_{Π^c} a·a − Σ_Π a·a).
pub fn beta2_linked_formula(u: usize, a: &[Vec<i64>]) -> BigInt {
    let sets = linked_pairs(u);
    let val = |(i, j): (usize, usize)| BigInt::from(a[i][j]);
    let squares: BigInt = (0..u).flat_map(|i| (i + 1..u).map(move |j| (i, j))).map(|e| val(e) * val(e)).sum();
    let chains: BigInt = sets.pi.iter().map(|&(e, f)| val(e) * val(f)).sum();
    let shared: BigInt = sets.pi_complement.iter().map(|&(e, f)| val(e) * val(f)).sum();
    let w = num_traits::pow(BigInt::from(u), u - 3);
    -(complete_constant(u) * squares) + BigInt::from(2) * w * (shared - chains)
}

/// T² coefficient of det M(1+T) for K_u with the given voltages.
pub fn beta2_exact(u: usize, a: &[Vec<i64>], ell: OddPrime) -> Result<BigInt> {
    let g = build_complete(u)?;
    let v = VoltageAssignment::from_integers(&g, ell, &voltage_from_matrix(u, a))?;
    let det = laurent_determinant(&voltage_matrix(&g, &v)?);
    Ok(if det.is_zero() { BigInt::zero() } else { det.t_coefficient(2) })
}

pub fn beta2_linked_pair(u: usize, a: &[Vec<i64>], ell: OddPrime) -> Result<LinkedPairBeta2> {
    if u < 3 {
        return Err(Error::InvalidInput("linked pairs need u ≥ 3".into()));
    }
    let formula = beta2_linked_formula(u, a);
    let exact = beta2_exact(u, a, ell)?;
    Ok(LinkedPairBeta2 { u, verified: formula == exact, formula, exact, conjectural: u > 7 })
}

/// Limit share of u with (μ_u, λ_u) = (μ, λ).
pub fn complete_density_theoretical(ell: OddPrime, mu: u32, lambda: u32) -> BigRational {
    let l = BigInt::from(ell.get());
    if lambda != 1 {
        BigRational::zero()
    } else if mu == 0 {
        BigRational::new(&l - 2, l)
    } else {
        BigRational::new(&l - 1, num_traits::pow(l, mu as usize + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub count: u64,
    pub x_max: u64,
    #[serde(serialize_with = "crate::stats::ser_rational")]
    pub empirical: BigRational,
    #[serde(serialize_with = "crate::stats::ser_rational")]
    pub theoretical: BigRational,
}

/// #{3 ≤ u ≤ x_max : (μ_u, λ_u) = (μ, λ)} / x_max against the limit. The
/// invariants of both families coincide, so `kind` only fixes which family
/// is meant.
pub fn complete_density(ell: OddPrime, mu: u32, lambda: u32, _kind: Assignment, x_max: u64) -> Result<DensityReport> {
    if x_max < 3 {
        return Err(Error::RangeError("x_max must be at least 3".into()));
    }
    let count = if lambda != 1 {
        0
    } else {
        (3..=x_max).into_par_iter().filter(|&u| mu_closed_form(u, ell) == mu).count() as u64
    };
    Ok(DensityReport {
        count,
        x_max,
        empirical: BigRational::new(count.into(), x_max.into()),
        theoretical: complete_density_theoretical(ell, mu, lambda),
    })
}

/// μ of (u−2)u^(u−3) read off a big integer, for cross-checks.
pub fn mu_by_valuation(u: usize, ell: OddPrime) -> Option<u32> {
    val_ell(&complete_constant(u), ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_series::CharacteristicSeries;
    use crate::invariants::mu_lambda;
    use crate::tower::gauge_to_tree;
    use num_traits::One;
    use rand::{Rng, SeedableRng};

    fn ell(p: u64) -> OddPrime {
        OddPrime::new(p).unwrap()
    }

    fn determinant(u: usize, a: &[Vec<i64>]) -> LaurentPoly {
        let g = build_complete(u).unwrap();
        let v = VoltageAssignment::from_integers(&g, ell(3), &voltage_from_matrix(u, a)).unwrap();
        laurent_determinant(&voltage_matrix(&g, &v).unwrap())
    }

    #[test]
    fn construction_examples() {
        assert_eq!(build_complete(2).unwrap().undirected_edge_count(), 1);
        let k4 = build_complete(4).unwrap();
        assert_eq!(k4.undirected_edge_count(), 6);
        assert_eq!(k4.spanning_tree_count().unwrap(), BigInt::from(16));
        let k5 = build_complete(5).unwrap();
        assert_eq!(k5.undirected_edge_count(), 10);
        assert_eq!(k5.spanning_tree_count().unwrap(), BigInt::from(125));
        let edges = k5.undirected_edges();
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(edges[edge_index(5, i, j)], (i, j));
            }
        }
    }

    #[test]
    fn closed_forms_match_determinant() {
        for u in 3..=7 {
            for a in 1..=5 {
                let expected = closed_form_determinant(u, a);
                assert_eq!(determinant(u, &assignment_matrix(u, a, Assignment::Single)), expected, "single u={u} a={a}");
                assert_eq!(determinant(u, &assignment_matrix(u, a, Assignment::Star)), expected, "star u={u} a={a}");
            }
        }
    }

    #[test]
    fn family_invariant_examples() {
        assert_eq!(single_voltage_invariants(4, 1, ell(3)).unwrap(), CompleteInvariants { mu: 0, lambda: 1 });
        assert_eq!(single_voltage_invariants(5, 1, ell(3)).unwrap().mu, 1);
        assert_eq!(single_voltage_invariants(11, 2, ell(3)).unwrap().mu, 2);
        assert_eq!(star_voltage_invariants(6, 1, ell(5)).unwrap().mu, 0);
        assert_eq!(single_voltage_invariants(4, 3, ell(3)), Err(Error::Inadmissible { ell: 3 }));
        assert_eq!(closed_form_determinant(4, 1).t_coefficient(2), BigInt::from(-8));
    }

    #[test]
    fn family_invariants_match_series() {
        for u in 4..=7 {
            let g = build_complete(u).unwrap();
            for p in [3u64, 5, 7] {
                for a in [1i64, 2, 4] {
                    if a % p as i64 == 0 {
                        continue;
                    }
                    for kind in [Assignment::Single, Assignment::Star] {
                        let m = assignment_matrix(u, a, kind);
                        let v = VoltageAssignment::from_integers(&g, ell(p), &voltage_from_matrix(u, &m)).unwrap();
                        let tree = assignment_tree(&g, u).unwrap();
                        assert!(crate::tower::is_admissible(&g, &v, &tree).unwrap());
                        let gauged = gauge_to_tree(&g, &v, &tree).unwrap();
                        let m_ = voltage_matrix(&g, &gauged).unwrap();
                        let s = CharacteristicSeries::from_determinant(ell(p), laurent_determinant(&m_), crate::char_series::clearance(&m_), 16)
                            .unwrap();
                        let ml = mu_lambda(&s.cleared_series()).unwrap();
                        let expected = family_invariants(u, a, ell(p)).unwrap();
                        assert_eq!((ml.mu, ml.lambda), (expected.mu, expected.lambda), "u={u} a={a} ℓ={p} {kind:?}");
                        assert_eq!(Some(expected.mu), mu_by_valuation(u, ell(p)));
                    }
                }
            }
        }
    }

    #[test]
    fn linked_pair_counts() {
        let s = linked_pairs(4);
        assert_eq!(s.pi.len(), 4);
        assert_eq!(s.pi_complement.len(), 8);
        assert!(s.pi.contains(&((0, 1), (1, 3))));
        assert!(s.pi_complement.contains(&((0, 1), (0, 3))));
        assert!(s.pi_complement.contains(&((0, 2), (1, 2))));
        let s = linked_pairs(5);
        assert_eq!(s.pi.len(), 10);
        assert_eq!(s.pi_complement.len(), 20);
    }

    /// The u = 4 display, transcribed term by term (1-based indices).
    fn displayed_u4(a: &[Vec<i64>]) -> i64 {
        let x = |i: usize, j: usize| a[i - 1][j - 1];
        let sq: i64 = (1..=4).flat_map(|i| (i + 1..=4).map(move |j| (i, j))).map(|(i, j)| x(i, j) * x(i, j)).sum();
        -8 * sq - 8 * (x(1, 2) * x(2, 3) + x(1, 2) * x(2, 4) + x(1, 3) * x(3, 4) + x(2, 3) * x(3, 4))
            + 8 * (x(1, 2) * x(1, 3)
                + x(1, 2) * x(1, 4)
                + x(1, 3) * x(1, 4)
                + x(1, 3) * x(2, 3)
                + x(2, 4) * x(1, 4)
                + x(1, 4) * x(3, 4)
                + x(2, 4) * x(2, 3)
                + x(2, 4) * x(3, 4))
    }

    fn random_matrix(rng: &mut impl Rng, u: usize, bound: i64) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; u]; u];
        for i in 0..u {
            for j in i + 1..u {
                m[i][j] = rng.gen_range(-bound..=bound);
            }
        }
        m
    }

    #[test]
    fn linked_formula_matches_display_and_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 4, 6);
            assert_eq!(beta2_linked_formula(4, &m), BigInt::from(displayed_u4(&m)));
        }
        for _ in 0..100 {
            let u = rng.gen_range(3..=6);
            let m = random_matrix(&mut rng, u, 4);
            let r = beta2_linked_pair(u, &m, ell(3)).unwrap();
            assert!(r.verified, "u={u} {m:?}: formula {} exact {}", r.formula, r.exact);
            assert!(!r.conjectural);
        }
    }

    #[test]
    fn single_voltage_linked_formula() {
        for u in 3..=7 {
            let m = assignment_matrix(u, 3, Assignment::Single);
            assert_eq!(beta2_linked_formula(u, &m), -complete_constant(u) * 9);
        }
    }

    #[test]
    fn density_examples() {
        let r = complete_density(ell(3), 0, 1, Assignment::Star, 10_000).unwrap();
        assert_eq!(r.theoretical, BigRational::new(1.into(), 3.into()));
        assert_eq!(complete_density_theoretical(ell(3), 1, 1), BigRational::new(2.into(), 9.into()));
        let r = complete_density(ell(5), 0, 3, Assignment::Single, 1000).unwrap();
        assert_eq!((r.count, r.theoretical), (0, BigRational::zero()));
        // u from 3 to 12 with μ_u = 0 for ℓ = 3: 4, 7, 10 (u ≡ 1 mod 3) plus u = 3
        let r = complete_density(ell(3), 0, 1, Assignment::Single, 12).unwrap();
        assert_eq!(r.count, 4);
    }

    #[test]
    fn density_branches_sum_to_one_minus_inverse_ell() {
        for p in [3u64, 5, 7] {
            let l = BigRational::from_integer(p.into());
            let mut total = BigRational::zero();
            for mu in 0..40 {
                total += complete_density_theoretical(ell(p), mu, 1);
            }
            // tail Σ_{μ ≥ 40} (ℓ−1)/ℓ^(μ+1) = ℓ^−40
            total += BigRational::one() / num_traits::pow(l.clone(), 40);
            assert_eq!(total, BigRational::one() - BigRational::one() / l);
        }
    }
}
