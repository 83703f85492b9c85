//! Algebraic entropy and adjoint algebraic entropy of endomorphisms of
//! abelian groups: exact linear algebra over `F_p` and `ℤ`, growth engines,
//! duality checks, the dichotomy classifier and brute-force oracles.

pub mod classify;
pub mod duality;
pub mod engine;
pub mod error;
pub mod fpla;
pub mod intlat;
pub mod operators;
pub mod oracle;
pub mod suites;
pub mod zoo;

pub use engine::{CofiniteSubgroup, EngineConfig, EntropyValue, FiniteSubgroup, GrowthTrace, SubgroupEntropy};
pub use error::{Error, Result};
pub use fpla::{FpMat, FpPoly, FpVec, Functional, IndexTag, SparseVec};
pub use intlat::{FgEndo, FgGroup, IntMat, LatticeSub};
pub use operators::{OperatorDesc, RepeatRule};
