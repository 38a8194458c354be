//! Pinned worked examples with their published series prefixes, invariants and
//! spanning-tree counts, and a checker that recomputes each from scratch.

use num_bigint::BigInt;
use num_traits::One;

use crate::char_series::char_poly_exact;
use crate::error::Result;
use crate::invariants::{mu_lambda, nu_fit, STABLE_LEVELS};
use crate::multigraph::Multigraph;
use crate::padic::OddPrime;
use crate::tower::kappa_sequence;
use crate::two_vertex::{build_two_vertex, TwoVertexShape};
use crate::voltage::VoltageAssignment;

/// K₄ edges in the order e14, e13, e24, e12, e23, e34 (0-based vertices).
pub const K4_SECTION: [(usize, usize); 6] = [(0, 3), (0, 2), (1, 3), (0, 1), (1, 2), (2, 3)];

#[derive(Debug, Clone)]
pub struct PinnedExample {
    pub name: &'static str,
    pub graph: Multigraph,
    pub ell: OddPrime,
    pub voltage: Vec<i64>,
    /// β₂, β₃, … of f(T).
    pub series_prefix: Vec<i64>,
    pub mu: u32,
    pub lambda: u32,
    /// κ₀, κ₁, … as (prime, exponent) factorizations.
    pub kappas: Vec<Vec<(u64, u32)>>,
    /// ord_ℓ(κ_n) = slope·n + offset for n in `ord_levels`.
    pub slope: i64,
    pub offset: i64,
    pub ord_levels: std::ops::RangeInclusive<u32>,
}

pub fn factored(f: &[(u64, u32)]) -> BigInt {
    f.iter().fold(BigInt::one(), |acc, &(p, e)| acc * num_traits::pow(BigInt::from(p), e as usize))
}

fn prime(p: u64) -> OddPrime {
    OddPrime::new(p).expect("pinned primes are odd")
}

pub fn pinned_examples() -> Vec<PinnedExample> {
    let k4 = Multigraph::from_undirected(4, &K4_SECTION).expect("K4 is a valid graph");
    let (two_vertex, _) = build_two_vertex(&TwoVertexShape::new(2, 1, 2, 2, 0).expect("valid shape"));
    vec![
        PinnedExample {
            name: "bouquet t=3 l=3 alpha=(1,8,10)",
            graph: Multigraph::bouquet(3),
            ell: prime(3),
            voltage: vec![1, 8, 10],
            series_prefix: vec![-165, 165, -1326],
            mu: 0,
            lambda: 17,
            kappas: vec![
                vec![],
                vec![(3, 3)],
                vec![(3, 10)],
                vec![(2, 18), (3, 27)],
                vec![(2, 18), (3, 44), (163, 2), (487, 2), (37907, 2), (799471, 2)],
            ],
            slope: 17,
            offset: -24,
            ord_levels: 2..=4,
        },
        PinnedExample {
            name: "two-vertex (2,1,2,2,0) l=5 alpha=(1,1,0,2,1)",
            graph: two_vertex,
            ell: prime(5),
            voltage: vec![1, 1, 0, 2, 1],
            series_prefix: vec![-10, 10, -9],
            mu: 0,
            lambda: 3,
            kappas: vec![
                vec![(2, 1)],
                vec![(2, 1), (5, 3), (31, 2)],
                vec![(2, 1), (5, 6), (31, 2), (5351, 2), (2157401, 2)],
            ],
            slope: 3,
            offset: 0,
            ord_levels: 1..=2,
        },
        PinnedExample {
            name: "K4 star l=3 a=1",
            graph: k4.clone(),
            ell: prime(3),
            voltage: vec![0, 1, 0, 1, 0, 0],
            series_prefix: vec![-8, 8, -8],
            mu: 0,
            lambda: 1,
            kappas: vec![vec![(2, 4)], vec![(2, 10), (3, 1)], vec![(2, 28), (3, 2)], vec![(2, 82), (3, 3)]],
            slope: 1,
            offset: 0,
            ord_levels: 1..=3,
        },
        PinnedExample {
            name: "K4 l=3 alpha=(1,2,4,0,0,0)",
            graph: k4,
            ell: prime(3),
            voltage: vec![1, 2, 4, 0, 0, 0],
            series_prefix: vec![-120, 120, -252, 384, -578],
            mu: 0,
            lambda: 5,
            kappas: vec![
                vec![(2, 4)],
                vec![(2, 8), (3, 3)],
                vec![(2, 8), (3, 8), (11, 6)],
                vec![(2, 8), (3, 13), (11, 6), (13931, 2), (19996201, 2)],
            ],
            slope: 5,
            offset: -2,
            ord_levels: 1..=3,
        },
    ]
}

/// One comparison within a pinned example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub example: &'static str,
    pub what: String,
    pub passed: bool,
    pub detail: String,
}

fn check<T: std::fmt::Debug + PartialEq>(example: &'static str, what: impl Into<String>, expected: T, actual: T) -> Check {
    let passed = expected == actual;
    Check { example, what: what.into(), passed, detail: format!("expected {expected:?}, got {actual:?}") }
}

/// Recomputes series, invariants, tree counts and the growth law of one
/// example. `cap` bounds the derived-graph vertex count.
pub fn verify_example(ex: &PinnedExample, cap: usize) -> Result<Vec<Check>> {
    let v = VoltageAssignment::from_integers(&ex.graph, ex.ell, &ex.voltage)?;
    let cs = char_poly_exact(&ex.graph, &v)?;
    let mut out = Vec::new();
    let prefix: Vec<BigInt> = (2..2 + ex.series_prefix.len() as u64).map(|n| cs.beta(n)).collect();
    let expected: Vec<BigInt> = ex.series_prefix.iter().map(|&b| BigInt::from(b)).collect();
    out.push(check(ex.name, "series prefix from T^2", expected, prefix));
    out.push(check(ex.name, "beta0, beta1", (BigInt::from(0), BigInt::from(0)), (cs.beta(0), cs.beta(1))));
    let ml = mu_lambda(&cs.cleared_series())?;
    out.push(check(ex.name, "(mu, lambda)", (ex.mu, ex.lambda), (ml.mu, ml.lambda)));
    let levels = kappa_sequence(&ex.graph, &v, ex.kappas.len() as u32 - 1, cap)?;
    for (lvl, f) in levels.iter().zip(&ex.kappas) {
        out.push(check(ex.name, format!("kappa_{}", lvl.n), factored(f), lvl.kappa.clone()));
    }
    for n in ex.ord_levels.clone() {
        let ord = levels[n as usize].ord as i64;
        out.push(check(ex.name, format!("ord_l(kappa_{n}) = {}n{:+}", ex.slope, ex.offset), ex.slope * n as i64 + ex.offset, ord));
    }
    let ords: Vec<u64> = levels.iter().map(|l| l.ord).collect();
    // ν needs three stable levels from the start of the linear range
    if ords.len() >= *ex.ord_levels.start() as usize + STABLE_LEVELS {
        let fit = nu_fit(ml.mu, ml.lambda, ex.ell, &ords).map(|f| (f.nu, f.n0));
        out.push(check(ex.name, "(nu, n0) from tree counts", Ok((ex.offset, *ex.ord_levels.start())), fit));
    }
    Ok(out)
}
