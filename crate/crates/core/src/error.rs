//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("Euler characteristic is zero; the base graph must satisfy |V| != |E|")]
    ZeroEulerCharacteristic,
    #[error("characteristic series vanishes identically (voltage is inadmissible)")]
    ZeroSeries,
    #[error("voltage on edge {edge} is not an exact integer; use the truncated series path")]
    NonIntegerVoltage { edge: usize },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("voltage on spanning-tree edge {edge} is nonzero")]
    VoltageNonzeroOnTree { edge: usize },
    #[error("inadmissible voltage: no off-tree voltage is a unit mod {ell}")]
    Inadmissible { ell: u64 },
    #[error("derived graph would have {vertices} vertices, above the cap of {cap}")]
    ResourceCap { vertices: u128, cap: usize },
    #[error("mu > 0 from a truncated series is uncertified until cross-validated against tree counts")]
    UncertifiedMu,
    #[error("nu did not stabilize within the computed levels")]
    NotStabilized,
    #[error("out of range: {0}")]
    RangeError(String),
    #[error("enumeration of {classes} classes exceeds the cap of {cap}")]
    EnumerationCap { classes: u128, cap: u128 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("quadratic form is identically zero")]
    ZeroForm,
    #[error("level-set count needs an even number of variables")]
    OddDimension,
    #[error("level-set count needs a nondegenerate form")]
    DegenerateForm,
    #[error("total degree {degree} is not below the variable count {n}")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
