//! Two-vertex multigraphs with p loops at v₁, q loops at v₂ and r joining
//! edges, e of them oriented v₁→v₂ in the section and g oriented v₂→v₁.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffq::QuadraticFormFl;
use crate::multigraph::{Multigraph, SpanningTree};
use crate::padic::OddPrime;
use crate::voltage::VoltageAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TwoVertexShape {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub e: usize,
    pub g: usize,
}

impl TwoVertexShape {
    pub fn new(p: usize, q: usize, r: usize, e: usize, g: usize) -> Result<Self> {
        if r == 0 || e == 0 || e + g != r {
            return Err(Error::InvalidInput(format!("need r ≥ 1, e ≥ 1 and e + g = r (got r={r}, e={e}, g={g})")));
        }
        Ok(TwoVertexShape { p, q, r, e, g })
    }

    /// Free coordinates once b₁ is fixed to 0.
    pub fn t(&self) -> usize {
        self.p + self.q + self.r - 1
    }

    /// Undirected edge count, equal to the section length.
    pub fn edge_count(&self) -> usize {
        self.p + self.q + self.r
    }

    /// Index of b₁, the single tree edge, in the section.
    pub fn tree_index(&self) -> usize {
        self.p
    }

    /// Insert b₁ = 0 into a free vector of length t.
    pub fn embed(&self, free: &[BigInt]) -> Result<Vec<BigInt>> {
        if free.len() != self.t() {
            return Err(Error::InvalidInput(format!("expected {} free coordinates, got {}", self.t(), free.len())));
        }
        let mut full = free.to_vec();
        full.insert(self.p, BigInt::zero());
        Ok(full)
    }

    /// Every shape with t in [t_min, t_max], ordered by (t, p, q, r, e).
    pub fn all_with_t(t_min: usize, t_max: usize) -> Vec<TwoVertexShape> {
        let mut out = Vec::new();
        for t in t_min..=t_max {
            for r in 1..=t + 1 {
                for p in 0..=t + 1 - r {
                    let q = t + 1 - r - p;
                    for e in 1..=r {
                        out.push(TwoVertexShape { p, q, r, e, g: r - e });
                    }
                }
            }
        }
        out
    }
}

impl std::fmt::Display for TwoVertexShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{},{})", self.p, self.q, self.r, self.e, self.g)
    }
}

/// Section order: a-loops at v₁, b-edges v₁→v₂, c-edges v₂→v₁, d-loops at v₂.
/// The spanning tree is the first b-edge.
pub fn build_two_vertex(shape: &TwoVertexShape) -> (Multigraph, SpanningTree) {
    let mut pairs = Vec::with_capacity(shape.edge_count());
    pairs.extend(std::iter::repeat((0, 0)).take(shape.p));
    pairs.extend(std::iter::repeat((0, 1)).take(shape.e));
    pairs.extend(std::iter::repeat((1, 0)).take(shape.g));
    pairs.extend(std::iter::repeat((1, 1)).take(shape.q));
    let g = Multigraph::from_undirected(2, &pairs).expect("two-vertex shapes are valid multigraphs");
    let tree = SpanningTree::new(&g, vec![shape.tree_index()]).expect("a joining edge spans two vertices");
    (g, tree)
}

pub fn two_vertex_voltage(shape: &TwoVertexShape, ell: OddPrime, alpha: &[BigInt]) -> Result<VoltageAssignment> {
    let (g, _) = build_two_vertex(shape);
    VoltageAssignment::from_integers(&g, ell, alpha)
}

/// Signs of the joining coordinates in the free vector: +1 for b₂..b_e,
/// −1 for c₁..c_g, 0 for loops.
fn joining_signs(shape: &TwoVertexShape) -> Vec<i64> {
    let mut s = vec![0i64; shape.p];
    s.extend(std::iter::repeat(1).take(shape.e - 1));
    s.extend(std::iter::repeat(-1).take(shape.g));
    s.extend(std::iter::repeat(0).take(shape.q));
    s
}

/// β₂ = (Σ_{i≥2} b_i − Σ c_j)² − r·(Σ of squares of all free coordinates),
/// for a full voltage vector with b₁ = 0.
pub fn beta2_two_vertex(shape: &TwoVertexShape, alpha: &[BigInt]) -> Result<BigInt> {
    if alpha.len() != shape.edge_count() {
        return Err(Error::InvalidInput(format!("expected {} voltages, got {}", shape.edge_count(), alpha.len())));
    }
    if !alpha[shape.tree_index()].is_zero() {
        return Err(Error::VoltageNonzeroOnTree { edge: shape.tree_index() });
    }
    let mut free = alpha.to_vec();
    free.remove(shape.tree_index());
    let signs = joining_signs(shape);
    let linear: BigInt = free.iter().zip(&signs).map(|(a, &s)| a * s).sum();
    let squares: BigInt = free.iter().map(|a| a * a).sum();
    Ok(&linear * &linear - BigInt::from(shape.r) * squares)
}

/// Q = (Σ y_i − Σ z_j)² − r·Σ(all squares) on the t free coordinates; its
/// matrix is s·sᵀ − r·I.
pub fn qform_two_vertex(shape: &TwoVertexShape, ell: OddPrime) -> QuadraticFormFl {
    let s = joining_signs(shape);
    let t = s.len();
    let r = shape.r as i64;
    let m = (0..t).map(|i| (0..t).map(|j| s[i] * s[j] - if i == j { r } else { 0 }).collect()).collect();
    QuadraticFormFl::new(ell, m).expect("s·sᵀ − rI is symmetric")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoVertexProbability {
    #[serde(serialize_with = "crate::stats::ser_rational")]
    pub probability: BigRational,
    /// η((−1)^{t/2}Δ̄(Q)) when it enters the formula (ℓ ∤ r, t even).
    pub eta: Option<i8>,
    pub rank: usize,
}

/// Probability that a uniformly random admissible α₀ ∈ (ℤ/ℓ)^t ∖ 0 gives
/// (μ, λ) = (0, 1).
pub fn prob_two_vertex_mu0_lambda1(shape: &TwoVertexShape, ell: OddPrime) -> Result<TwoVertexProbability> {
    let t = shape.t();
    if t == 0 {
        return Err(Error::InvalidInput("a shape with t = 0 has no admissible voltages".into()));
    }
    let l = BigRational::from_integer(BigInt::from(ell.get()));
    let inv = |k: usize| BigRational::one() / num_traits::pow(l.clone(), k);
    let scale = BigRational::one() / (BigRational::one() - inv(t));
    let q = qform_two_vertex(shape, ell);
    let d = q.diagonalize();
    let divides = shape.r as u64 % ell.get() == 0;
    if divides || t % 2 == 1 {
        let probability = BigRational::one() - scale * (inv(1) - inv(t));
        return Ok(TwoVertexProbability { probability, eta: None, rank: d.rank });
    }
    let eta_minus_one: i8 = if ell.get() % 4 == 1 { 1 } else { -1 };
    let eta = if (t / 2) % 2 == 0 { d.discriminant_class } else { eta_minus_one * d.discriminant_class };
    let middle = BigRational::from_integer(BigInt::from(eta)) * (&l - BigRational::one()) * inv(t / 2 + 1);
    let probability = BigRational::one() - scale * (inv(1) + middle - inv(t));
    Ok(TwoVertexProbability { probability, eta: Some(eta), rank: d.rank })
}
