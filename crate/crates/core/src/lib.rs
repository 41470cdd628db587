//! Exact inference for discrete causal models on DAGs.
//!
//! The crate covers the full pipeline from model definition to causal-effect
//! identification:
//!
//! - [`graph`]: DAG construction, ancestry queries, d-separation, and
//!   intervention surgery.
//! - [`distribution`]: dense probability tables with marginalization,
//!   conditioning, divergences, and mutual information.
//! - [`model`]: CPT-based and structural-equation model forms, conversion,
//!   and seeded sampling.
//! - [`intervention`]: hard assignments `do(X^S = x^S)` via truncated
//!   factorization, functional surgery, and directed stochastic kernels.
//! - [`information`]: directed information and its chain rule.
//! - [`criteria`]: direct-causes and back-door adjustment with
//!   certification.
//! - [`format`] and [`cli`]: the model-file format and the `causal` command
//!   line tool.
//!
//! Everything is exact, dense enumeration over 64-bit floats: the crate is
//! built as an oracle for desk-scale models (joint tables are capped at
//! 2^24 cells), not as a scalable inference engine. All types are immutable
//! after construction and safe to share across threads.

pub mod cli;
pub mod criteria;
pub mod distribution;
pub mod error;
pub mod format;
pub mod graph;
pub mod information;
pub mod intervention;
mod kahan;
pub mod model;
pub mod rng;

pub use criteria::{AdjustmentCertificate, CDI_TOLERANCE};
pub use distribution::{
    conditional_divergence, conditional_mutual_information, kl_divergence, mutual_information,
    InfoValue, JointTable, Kernel, Var, MAX_TABLE_CELLS, NORMALIZATION_TOL,
};
pub use error::{Error, Result};
pub use format::{LoadedModel, Model};
pub use graph::{Dag, VertexSet};
pub use information::{CanonicalKind, CanonicalStructureReport, ChainRuleDecomposition};
pub use intervention::InterventionSpec;
pub use model::{Assignment, CptModel, FunctionalModel, Violation};
