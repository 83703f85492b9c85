use thiserror::Error;

use crate::engine::GrowthTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("prime mismatch: expected {expected}, found {found}")]
    PrimeMismatch { expected: u32, found: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index tag mismatch: operator acts on {expected} indices, vector uses {found}")]
    IndexTag { expected: &'static str, found: &'static str },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("incompatible endomorphism: {0}")]
    Incompatible(String),
    #[error("unsupported for this operator kind: {0}")]
    Unsupported(String),
    #[error("undecidable for this descriptor: {0}")]
    Undecidable(String),
    #[error("operator is not invertible")]
    NotInvertible,
    #[error("oracle bound exceeded: {0}")]
    OracleBound(String),
    #[error("family member {index} inconclusive after {steps} steps")]
    FamilyMember { index: usize, steps: usize, trace: Box<GrowthTrace> },
    #[error("inconclusive after {steps} steps")]
    Inconclusive { steps: usize, trace: Box<GrowthTrace> },
}

pub type Result<T> = std::result::Result<T, Error>;
