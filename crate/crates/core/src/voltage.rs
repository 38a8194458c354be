//! Voltage assignments: one ℓ-adic value per undirected edge, attached to a
//! chosen orientation of that edge.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::padic::{OddPrime, PadicInt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageAssignment {
    ell: OddPrime,
    section: Vec<usize>,
    values: Vec<PadicInt>,
}

impl VoltageAssignment {
    /// Values aligned with the graph's canonical section.
    pub fn new(g: &Multigraph, ell: OddPrime, values: Vec<PadicInt>) -> Result<Self> {
        VoltageAssignment::with_section(g, ell, g.canonical_section(), values)
    }

    pub fn with_section(g: &Multigraph, ell: OddPrime, section: Vec<usize>, values: Vec<PadicInt>) -> Result<Self> {
        if section.len() != g.undirected_edge_count() {
            return Err(Error::InvalidInput(format!(
                "section has {} edges but the graph has {} undirected edges",
                section.len(),
                g.undirected_edge_count()
            )));
        }
        if values.len() != section.len() {
            return Err(Error::InvalidInput(format!(
                "{} voltage values for {} edges",
                values.len(),
                section.len()
            )));
        }
        let mut seen = vec![false; g.directed_edges().len()];
        for &e in &section {
            if e >= seen.len() {
                return Err(Error::InvalidInput(format!("section edge {e} does not exist")));
            }
            let class = e.min(g.inverse(e));
            if seen[class] {
                return Err(Error::InvalidInput(format!("undirected edge of {e} appears twice in the section")));
            }
            seen[class] = true;
        }
        Ok(VoltageAssignment { ell, section, values })
    }

    pub fn from_integers<I: Into<BigInt> + Clone>(g: &Multigraph, ell: OddPrime, values: &[I]) -> Result<Self> {
        let values = values.iter().cloned().map(|v| PadicInt::exact(v.into())).collect();
        VoltageAssignment::new(g, ell, values)
    }

    pub fn ell(&self) -> OddPrime {
        self.ell
    }

    pub fn section(&self) -> &[usize] {
        &self.section
    }

    pub fn values(&self) -> &[PadicInt] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(PadicInt::is_exact)
    }

    /// Exact integer values, or the index of the first inexact one.
    pub fn integer_values(&self) -> std::result::Result<Vec<BigInt>, usize> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| if v.is_exact() { Ok(v.representative().clone()) } else { Err(k) })
            .collect()
    }

    /// Σ|α(s)| over integer representatives.
    pub fn sum_abs(&self) -> BigInt {
        self.values.iter().map(|v| v.representative().abs()).sum()
    }
}
