//! Derived covers X(ℤ/ℓⁿ, S, α), admissibility, gauge normalization, and the
//! spanning-tree counts κ_n along the tower.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, SpanningTree};
use crate::padic::{val_ell, OddPrime, PadicInt};
use crate::voltage::VoltageAssignment;

/// Vertex cap applied to derived graphs unless overridden.
pub const DEFAULT_RESOURCE_CAP: usize = 1200;

/// Name of the environment variable that overrides [`DEFAULT_RESOURCE_CAP`].
pub const RESOURCE_CAP_ENV: &str = "IWAGRAPH_RESOURCE_CAP";

pub fn resource_cap() -> usize {
    std::env::var(RESOURCE_CAP_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_RESOURCE_CAP)
}

/// The level-n cover. Vertex (v, σ) has index v·ℓⁿ + σ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedGraph {
    pub base_vertices: usize,
    pub level: u32,
    pub modulus: u64,
    pub graph: Multigraph,
}

impl DerivedGraph {
    pub fn vertex(&self, v: usize, sigma: u64) -> usize {
        v * self.modulus as usize + sigma as usize
    }
}

/// Vertex count u·ℓⁿ, or `None` when it does not fit in memory-sized ints.
pub fn derived_vertex_count(g: &Multigraph, ell: OddPrime, n: u32) -> Option<u128> {
    ell.checked_pow(n).and_then(|m| m.checked_mul(g.vertex_count() as u128))
}

pub fn derive(g: &Multigraph, v: &VoltageAssignment, n: u32) -> Result<DerivedGraph> {
    let ell = v.ell();
    let modulus = ell
        .checked_pow(n)
        .and_then(|m| u64::try_from(m).ok())
        .ok_or_else(|| Error::RangeError(format!("level {n} is too large")))?;
    let mut pairs = Vec::with_capacity(v.len() * modulus as usize);
    for (k, &e) in v.section().iter().enumerate() {
        let a = v.values()[k].residue_mod_power(ell, n)?.to_u64().expect("residue below modulus");
        let d = g.edge(e);
        for sigma in 0..modulus {
            let target = (sigma + a) % modulus;
            pairs.push((d.origin * modulus as usize + sigma as usize, d.terminus * modulus as usize + target as usize));
        }
    }
    let graph = Multigraph::from_undirected(g.vertex_count() * modulus as usize, &pairs)?;
    Ok(DerivedGraph { base_vertices: g.vertex_count(), level: n, modulus, graph })
}

/// An equivalent voltage that vanishes on `tree`: α′(s) = α(s) + φ(o(s)) − φ(t(s))
/// with φ the tree potential. The derived graphs of α and α′ are isomorphic
/// level by level and M(x) changes by a diagonal conjugation.
pub fn gauge_to_tree(g: &Multigraph, v: &VoltageAssignment, tree: &SpanningTree) -> Result<VoltageAssignment> {
    let ell = v.ell();
    let u = g.vertex_count();
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); u];
    for (k, &e) in v.section().iter().enumerate() {
        let d = g.edge(e);
        let class = e.min(g.inverse(e));
        let undirected = g.canonical_section().binary_search(&class).expect("section edge is a class");
        if tree.contains(undirected) {
            adj[d.origin].push((k, d.terminus, true));
            adj[d.terminus].push((k, d.origin, false));
        }
    }
    let mut phi: Vec<Option<PadicInt>> = vec![None; u];
    phi[0] = Some(PadicInt::exact(0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let px = phi[x].clone().unwrap();
        for &(k, y, forward) in &adj[x] {
            if phi[y].is_none() {
                let a = &v.values()[k];
                phi[y] = Some(if forward { px.add(a, ell) } else { px.sub(a, ell) });
                queue.push_back(y);
            }
        }
    }
    let phi: Vec<PadicInt> =
        phi.into_iter().map(|p| p.ok_or(Error::DisconnectedGraph)).collect::<Result<_>>()?;
    let values = v
        .section()
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let d = g.edge(e);
            v.values()[k].add(&phi[d.origin], ell).sub(&phi[d.terminus], ell)
        })
        .collect();
    VoltageAssignment::with_section(g, ell, v.section().to_vec(), values)
}

/// Whether every level of the tower is connected, for a voltage that
/// vanishes on `tree`: some off-tree voltage must be an ℓ-adic unit.
pub fn is_admissible(g: &Multigraph, v: &VoltageAssignment, tree: &SpanningTree) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let ell = v.ell();
    let section = g.canonical_section();
    let mut unit_off_tree = false;
    for (k, &e) in v.section().iter().enumerate() {
        let class = e.min(g.inverse(e));
        let undirected = section.binary_search(&class).expect("section edge is a class");
        let a = &v.values()[k];
        if tree.contains(undirected) {
            if !a.is_zero(ell) {
                return Err(Error::VoltageNonzeroOnTree { edge: undirected });
            }
        } else if a.is_unit(ell) {
            unit_off_tree = true;
        }
    }
    Ok(unit_off_tree)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaLevel {
    pub n: u32,
    pub kappa: BigInt,
    pub ord: u64,
}

/// κ_n and ord_ℓ(κ_n) for 0 ≤ n ≤ n_max, refusing covers above `cap`
/// vertices. Levels are computed in parallel; output order is by n.
pub fn kappa_sequence(g: &Multigraph, v: &VoltageAssignment, n_max: u32, cap: usize) -> Result<Vec<KappaLevel>> {
    let ell = v.ell();
    for n in 0..=n_max {
        let size = derived_vertex_count(g, ell, n).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::ResourceCap { vertices: size, cap });
        }
    }
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let d = derive(g, v, n)?;
            let kappa = d.graph.spanning_tree_count()?;
            let ord = val_ell(&kappa, ell).expect("spanning-tree count of a connected graph is positive") as u64;
            Ok(KappaLevel { n, kappa, ord })
        })
        .collect()
}

/// The largest level n ≤ `n_max` whose cover fits under `cap`.
pub fn max_level_within(g: &Multigraph, ell: OddPrime, n_max: u32, cap: usize) -> Option<u32> {
    (0..=n_max).take_while(|&n| derived_vertex_count(g, ell, n).is_some_and(|s| s <= cap as u128)).last()
}

/// Zero test on a residue, used by exhaustive admissibility checks.
pub fn all_zero_mod_ell(values: &[BigInt], ell: OddPrime) -> bool {
    values.iter().all(|a| (a % ell.to_bigint()).is_zero())
}
