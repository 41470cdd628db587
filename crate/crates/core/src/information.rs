//! Directed information, conditional directed information, the chain-rule
//! decomposition, and the three canonical three-variable structures.
//!
//! Directed information from `X^T` to `X^S` is the conditional divergence
//! between the observational conditional of `X^T` given `X^S` and its
//! interventional counterpart, averaged under the law of `X^S`:
//!
//! ```text
//! I(X^T -> X^S) = Σ_{x^S} P(x^S) · D( P(X^T | X^S = x^S) ‖ P(X^T | do(X^S = x^S)) )
//! ```
//!
//! It is zero exactly when observing and intervening on `X^S` move `X^T`
//! identically — the information-theoretic reading of "no extra causal
//! pathway". Everything here is dense enumeration over the exact joint; terms
//! whose observational conditional is undefined carry weight zero.

use std::fmt;

use crate::distribution::{decode_cell, kl_divergence, mutual_information, InfoValue};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::intervention::InterventionSpec;
use crate::kahan::KahanSum;
use crate::model::CptModel;

/// Tolerance under which an equality identity is considered to hold.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Tolerance under which a structurally-zero quantity must vanish.
pub const ZERO_TOL: f64 = 1e-12;

/// The two halves of the chain rule plus the directly-computed total;
/// `total = mi_term + cdi_term` whenever all three are finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainRuleDecomposition {
    /// `I(X^{T ∩ N_S}; X^S)`.
    pub mi_term: InfoValue,
    /// `I(X^{T ∩ Δ_S} -> X^S | X^{T ∩ N_S})`.
    pub cdi_term: InfoValue,
    /// `I(X^T -> X^S)`, computed independently of the two terms.
    pub total: InfoValue,
}

/// The three canonical three-variable structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalKind {
    /// `X -> Y -> Z`.
    Chain,
    /// `X <- Y -> Z`.
    Fork,
    /// `X -> Y <- Z`.
    Collider,
}

impl CanonicalKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "chain" => Some(CanonicalKind::Chain),
            "fork" => Some(CanonicalKind::Fork),
            "collider" => Some(CanonicalKind::Collider),
            _ => None,
        }
    }
}

impl fmt::Display for CanonicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CanonicalKind::Chain => "chain",
            CanonicalKind::Fork => "fork",
            CanonicalKind::Collider => "collider",
        };
        write!(f, "{s}")
    }
}

/// One identity from the canonical-structure table, with both sides
/// evaluated.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    /// E.g. `I(X->Y) = I(X;Y)` or `I(Y->X) = 0`.
    pub name: String,
    pub lhs: InfoValue,
    pub rhs: InfoValue,
    pub holds: bool,
}

/// All six pairwise directed informations of a three-variable structure, the
/// three mutual informations, and the identity table for the declared kind.
#[derive(Clone, Debug)]
pub struct CanonicalStructureReport {
    pub kind: CanonicalKind,
    pub di_x_to_y: InfoValue,
    pub di_y_to_x: InfoValue,
    pub di_y_to_z: InfoValue,
    pub di_z_to_y: InfoValue,
    pub di_x_to_z: InfoValue,
    pub di_z_to_x: InfoValue,
    pub mi_xy: InfoValue,
    pub mi_yz: InfoValue,
    pub mi_xz: InfoValue,
    pub identities: Vec<IdentityCheck>,
}

impl CanonicalStructureReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|c| c.holds)
    }
}

impl CptModel {
    /// Directed information `I(X^T -> X^S)` in bits.
    pub fn directed_information(&self, t: &VertexSet, s: &VertexSet) -> Result<InfoValue> {
        self.conditional_directed_information(t, s, &VertexSet::empty())
    }

    /// Conditional directed information `I(X^T -> X^S | X^{S'})` in bits,
    /// where the passive conditioning on `X^{S'}` is applied after the
    /// intervention on `X^S`.
    pub fn conditional_directed_information(
        &self,
        t: &VertexSet,
        s: &VertexSet,
        s_prime: &VertexSet,
    ) -> Result<InfoValue> {
        if !t.is_disjoint(s) || !t.is_disjoint(s_prime) || !s.is_disjoint(s_prime) {
            return Err(Error::OverlappingSets {
                reason: "source, target, and conditioning sets must be pairwise disjoint".into(),
            });
        }
        for v in t.iter().chain(s.iter()).chain(s_prime.iter()) {
            if v >= self.vertex_count() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    n: self.vertex_count(),
                });
            }
        }
        let joint = self.joint()?;
        let all = joint.marginal(&t.union(s).union(s_prime))?;
        let cond_set = s.union(s_prime);
        let weights = all.marginal(&cond_set)?;

        let mut acc = KahanSum::new();
        let mut values = vec![0usize; weights.scope().len()];
        for (cell, &w) in weights.probs().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            decode_cell(weights.scope(), cell, &mut values);
            let evidence: Vec<(usize, usize)> = weights
                .scope()
                .iter()
                .zip(&values)
                .map(|(v, &val)| (v.index, val))
                .collect();
            let observational = all.condition(&evidence)?;

            let do_pairs: Vec<(usize, usize)> = evidence
                .iter()
                .copied()
                .filter(|&(v, _)| s.contains(v))
                .collect();
            let given: Vec<(usize, usize)> = evidence
                .iter()
                .copied()
                .filter(|&(v, _)| s_prime.contains(v))
                .collect();
            let interventional =
                self.interventional_conditional(&InterventionSpec::new(do_pairs)?, &given, t)?;

            match kl_divergence(&observational, &interventional)? {
                InfoValue::Finite(d) => acc.add(w * d),
                InfoValue::Infinite => return Ok(InfoValue::Infinite),
            }
        }
        Ok(InfoValue::from_bits(acc.total()))
    }

    /// Splits `I(X^T -> X^S)` into the mutual information carried by the
    /// nondescendants of `S` inside `T` and the conditional directed
    /// information carried by the descendants.
    pub fn chain_rule_decomposition(
        &self,
        t: &VertexSet,
        s: &VertexSet,
    ) -> Result<ChainRuleDecomposition> {
        if !t.is_disjoint(s) {
            return Err(Error::OverlappingSets {
                reason: "source and target sets must be disjoint".into(),
            });
        }
        let nondesc = self.dag().nondescendants_of(s)?;
        let desc = self.dag().descendants_of(s)?;
        let t1 = t.intersection(&nondesc);
        let t2 = t.intersection(&desc);
        let joint = self.joint()?;
        let mi_term = mutual_information(&joint, &t1, s)?;
        let cdi_term = self.conditional_directed_information(&t2, s, &t1)?;
        let total = self.directed_information(t, s)?;
        Ok(ChainRuleDecomposition {
            mi_term,
            cdi_term,
            total,
        })
    }

    /// Evaluates the identity table of one canonical structure on this
    /// model. The model must have exactly three variables labeled `X`, `Y`,
    /// `Z` (any declaration order) wired as the named structure.
    pub fn canonical_structure_report(
        &self,
        kind: CanonicalKind,
    ) -> Result<CanonicalStructureReport> {
        let mismatch = |reason: &str| Error::StructureMismatch {
            expected: kind.to_string(),
            reason: reason.to_string(),
        };
        if self.vertex_count() != 3 {
            return Err(mismatch("model must have exactly three variables"));
        }
        let mut idx = [0usize; 3];
        for (k, name) in ["X", "Y", "Z"].iter().enumerate() {
            idx[k] = self
                .dag()
                .index_of_label(name)
                .ok_or_else(|| mismatch(&format!("missing a variable labeled {name}")))?;
        }
        let [x, y, z] = idx;
        let parents_match = |v: usize, expected: &mut [usize]| {
            expected.sort_unstable();
            self.dag().parents(v) == expected
        };
        let wired = match kind {
            CanonicalKind::Chain => {
                parents_match(x, &mut [])
                    && parents_match(y, &mut [x])
                    && parents_match(z, &mut [y])
            }
            CanonicalKind::Fork => {
                parents_match(y, &mut [])
                    && parents_match(x, &mut [y])
                    && parents_match(z, &mut [y])
            }
            CanonicalKind::Collider => {
                parents_match(x, &mut [])
                    && parents_match(z, &mut [])
                    && parents_match(y, &mut [x, z])
            }
        };
        if !wired {
            return Err(mismatch("edges do not form the requested structure"));
        }

        let joint = self.joint()?;
        let sx = VertexSet::singleton(x);
        let sy = VertexSet::singleton(y);
        let sz = VertexSet::singleton(z);
        let di = |t: &VertexSet, s: &VertexSet| self.directed_information(t, s);
        let report = CanonicalStructureReport {
            kind,
            di_x_to_y: di(&sx, &sy)?,
            di_y_to_x: di(&sy, &sx)?,
            di_y_to_z: di(&sy, &sz)?,
            di_z_to_y: di(&sz, &sy)?,
            di_x_to_z: di(&sx, &sz)?,
            di_z_to_x: di(&sz, &sx)?,
            mi_xy: mutual_information(&joint, &sx, &sy)?,
            mi_yz: mutual_information(&joint, &sy, &sz)?,
            mi_xz: mutual_information(&joint, &sx, &sz)?,
            identities: Vec::new(),
        };
        Ok(attach_identities(report))
    }
}

fn attach_identities(mut report: CanonicalStructureReport) -> CanonicalStructureReport {
    let zero = InfoValue::Finite(0.0);
    let equal = |name: &str, lhs: InfoValue, rhs: InfoValue| IdentityCheck {
        name: name.to_string(),
        lhs,
        rhs,
        holds: lhs.approx_eq(&rhs, EQUALITY_TOL),
    };
    let vanish = |name: &str, lhs: InfoValue| IdentityCheck {
        name: name.to_string(),
        lhs,
        rhs: zero,
        holds: lhs.is_zero_within(ZERO_TOL),
    };
    let r = &report;
    report.identities = match report.kind {
        CanonicalKind::Chain => vec![
            equal("I(X->Y) = I(X;Y)", r.di_x_to_y, r.mi_xy),
            vanish("I(Y->X) = 0", r.di_y_to_x),
            equal("I(Y->Z) = I(Y;Z)", r.di_y_to_z, r.mi_yz),
            vanish("I(Z->Y) = 0", r.di_z_to_y),
            equal("I(X->Z) = I(X;Z)", r.di_x_to_z, r.mi_xz),
            vanish("I(Z->X) = 0", r.di_z_to_x),
        ],
        CanonicalKind::Fork => vec![
            vanish("I(X->Y) = 0", r.di_x_to_y),
            equal("I(Y->X) = I(X;Y)", r.di_y_to_x, r.mi_xy),
            equal("I(Y->Z) = I(Y;Z)", r.di_y_to_z, r.mi_yz),
            vanish("I(Z->Y) = 0", r.di_z_to_y),
            equal("I(X->Z) = I(X;Z)", r.di_x_to_z, r.mi_xz),
            equal("I(Z->X) = I(X;Z)", r.di_z_to_x, r.mi_xz),
        ],
        CanonicalKind::Collider => vec![
            equal("I(X->Y) = I(X;Y)", r.di_x_to_y, r.mi_xy),
            vanish("I(Y->X) = 0", r.di_y_to_x),
            vanish("I(Y->Z) = 0", r.di_y_to_z),
            equal("I(Z->Y) = I(Y;Z)", r.di_z_to_y, r.mi_yz),
            vanish("I(X;Z) = 0", r.mi_xz),
            vanish("I(X->Z) = 0", r.di_x_to_z),
            vanish("I(Z->X) = 0", r.di_z_to_x),
        ],
    };
    report
}
