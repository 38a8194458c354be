//! Iwasawa invariants of ℤ_ℓ-towers of multigraphs built from voltage
//! assignments.
//!
//! The pipeline runs from a [`Multigraph`] and a [`VoltageAssignment`] to the
//! characteristic series f(T) ([`char_series`]), then to μ and λ
//! ([`invariants`]), and checks the growth of spanning-tree counts on explicit
//! covers ([`tower`]). Family-specific results live in [`bouquet`],
//! [`two_vertex`] and [`complete_graph`]; [`stats`] enumerates and samples
//! voltage spaces.

pub mod bouquet;
pub mod char_series;
pub mod complete_graph;
pub mod corpus;
pub mod error;
pub mod ffq;
pub mod invariants;
pub mod linalg;
pub mod multigraph;
pub mod padic;
pub mod series;
pub mod stats;
pub mod tower;
pub mod two_vertex;
pub mod voltage;

pub use error::{Error, Result};
pub use invariants::{Certificate, IwasawaInvariants, MuLambda};
pub use multigraph::{Multigraph, SpanningTree};
pub use padic::{OddPrime, PadicInt, Precision};
pub use series::{LaurentPoly, TruncatedSeries};
pub use voltage::VoltageAssignment;
