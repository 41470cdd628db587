//! Error types shared across the crate.

use crate::model::Violation;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library, one variant per contract violation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph contains a cycle: {}", fmt_cycle(.cycle))]
    CycleDetected { cycle: Vec<usize> },

    #[error("vertex {vertex} lists itself as a parent")]
    SelfParent { vertex: usize },

    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("vertex sets must be pairwise disjoint")]
    SetsNotDisjoint,

    #[error("vertex sets overlap: {reason}")]
    OverlappingSets { reason: String },

    #[error("scope mismatch: {reason}")]
    ScopeMismatch { reason: String },

    #[error("evidence has probability zero; the conditional is undefined")]
    ZeroProbabilityEvidence,

    #[error("table of {cells} cells exceeds the {limit}-cell limit")]
    ModelTooLarge { cells: u128, limit: u128 },

    #[error("invalid intervention: {reason}")]
    InvalidSpec { reason: String },

    #[error("directed-kernel queries require a full-support joint; cell {assignment:?} has probability zero")]
    UnsupportedModel { assignment: Vec<usize> },

    #[error(
        "adjustment estimand undefined: P(cause = {s_assignment:?} | adjust = {z_assignment:?}) = 0 \
         while the adjustment cell has positive weight"
    )]
    UndefinedConditional {
        s_assignment: Vec<usize>,
        z_assignment: Vec<usize>,
    },

    #[error(
        "adjustment set contains vertex {vertex}, which is not a nondescendant of the cause set"
    )]
    ZNotNondescendants { vertex: usize },

    #[error("model is not wired as a {expected}: {reason}")]
    StructureMismatch { expected: String, reason: String },

    #[error("invalid model: {}", fmt_violations(.violations))]
    InvalidModel { violations: Vec<Violation> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Unsupported(String),
}

fn fmt_cycle(cycle: &[usize]) -> String {
    let mut s = cycle
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" -> ");
    if let Some(first) = cycle.first() {
        s.push_str(&format!(" -> {first}"));
    }
    s
}

fn fmt_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
