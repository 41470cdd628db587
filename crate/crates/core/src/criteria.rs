//! Identification of causal effects from observational quantities:
//! direct-causes adjustment, back-door adjustment, and back-door
//! certification (graphical and information-theoretic).
//!
//! A candidate adjustment set `Z ⊆ N_S` is admissible when the formula
//!
//! ```text
//! x^S  ↦  Σ_{x^Z} P(X^T | X^{S∪Z} = x^{S∪Z}) · P(x^Z)
//! ```
//!
//! reproduces the interventional law `P(X^T | do(X^S))` exactly when
//! `I(X^T -> X^S | X^Z) = 0`. Certification computes both sides: the
//! conditional directed information, and the worst-case total-variation gap
//! between the adjustment rows and the true interventional marginals.

use crate::distribution::{decode_cell, scope_cells, InfoValue, JointTable, Kernel, Var};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::intervention::InterventionSpec;
use crate::kahan::KahanSum;
use crate::model::CptModel;

/// Default tolerance (in bits) under which a conditional directed
/// information is treated as zero.
pub const CDI_TOLERANCE: f64 = 1e-9;

/// Outcome of certifying a candidate adjustment set.
#[derive(Clone, Debug)]
pub struct AdjustmentCertificate {
    /// The candidate set.
    pub z: VertexSet,
    /// Whether `z` passes the graphical back-door check: `z` d-separates the
    /// cause from the effect once the cause's outgoing edges are removed.
    pub graphical_ok: bool,
    /// Whether the conditional directed information is within tolerance.
    pub information_ok: bool,
    /// `I(X^T -> X^S | X^Z)` in bits.
    pub cdi_value: InfoValue,
    /// Worst total-variation gap between an adjustment row and the matching
    /// interventional marginal, over all cause assignments.
    pub max_discrepancy: f64,
    /// The tolerance `information_ok` was judged against.
    pub tolerance: f64,
}

impl CptModel {
    fn check_targets(&self, sets: &[&VertexSet]) -> Result<()> {
        for set in sets {
            for v in set.iter() {
                if v >= self.vertex_count() {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        n: self.vertex_count(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Adjustment over an explicit set: for each `x^S` returns
    /// `Σ_{x^Z} P(X^T | x^S, x^Z) · P(x^Z)` as a kernel row.
    ///
    /// Positivity is required wherever the average puts weight: a cell with
    /// `P(x^Z) > 0` but `P(x^S, x^Z) = 0` leaves the estimand undefined and
    /// is reported as an error rather than skipped.
    fn adjustment_kernel(&self, s: &VertexSet, t: &VertexSet, z: &VertexSet) -> Result<Kernel> {
        let joint = self.joint()?;
        let all = joint.marginal(&s.union(t).union(z))?;
        let pz = all.marginal(z)?;
        let psz = all.marginal(&s.union(z))?;

        let input_scope: Vec<Var> = s.iter().map(|v| self.var(v)).collect();
        let output_scope: Vec<Var> = t.iter().map(|v| self.var(v)).collect();
        let out_cells = scope_cells(&output_scope)?;
        let in_cells = scope_cells(&input_scope)?;

        let mut rows = Vec::with_capacity(in_cells);
        let mut s_values = vec![0usize; input_scope.len()];
        let mut z_values = vec![0usize; pz.scope().len()];
        for row in 0..in_cells {
            decode_cell(&input_scope, row, &mut s_values);
            let s_evidence: Vec<(usize, usize)> = input_scope
                .iter()
                .zip(&s_values)
                .map(|(v, &val)| (v.index, val))
                .collect();
            let mut acc = vec![KahanSum::new(); out_cells];
            for (z_cell, &w) in pz.probs().iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                decode_cell(pz.scope(), z_cell, &mut z_values);
                let z_evidence: Vec<(usize, usize)> = pz
                    .scope()
                    .iter()
                    .zip(&z_values)
                    .map(|(v, &val)| (v.index, val))
                    .collect();
                let mut evidence = s_evidence.clone();
                evidence.extend_from_slice(&z_evidence);
                // Positivity: the conditional needs P(x^S, x^Z) > 0.
                let sz_values: Vec<usize> = psz
                    .scope()
                    .iter()
                    .map(|v| {
                        evidence
                            .iter()
                            .find(|&&(idx, _)| idx == v.index)
                            .map(|&(_, val)| val)
                            .expect("evidence covers the S∪Z scope")
                    })
                    .collect();
                if psz.prob_of(&sz_values) == 0.0 {
                    return Err(Error::UndefinedConditional {
                        s_assignment: s_values.clone(),
                        z_assignment: z_values.clone(),
                    });
                }
                let conditional = all.condition(&evidence)?;
                let aligned = conditional.marginal(t)?;
                // `aligned` keeps the ascending variable order that
                // `output_scope` uses.
                for (cell, &p) in aligned.probs().iter().enumerate() {
                    acc[cell].add(w * p);
                }
            }
            let probs: Vec<f64> = acc.iter().map(KahanSum::total).collect();
            rows.push(Some(JointTable::new(output_scope.clone(), probs)?));
        }
        Kernel::new(input_scope, output_scope, rows)
    }

    /// Direct-causes adjustment: the estimand over `Π_S`, the parents of the
    /// cause set. Sufficient whenever those parents are observable.
    ///
    /// The estimand equals the interventional marginal when `Π_S ⊆ N_S`,
    /// which holds for every singleton cause but can fail for cause sets
    /// where one member's parent descends from another member; certify with
    /// [`CptModel::certify_backdoor`] in that case.
    pub fn direct_causes_adjustment(&self, s: &VertexSet, t: &VertexSet) -> Result<Kernel> {
        self.check_targets(&[s, t])?;
        if !s.is_disjoint(t) {
            return Err(Error::OverlappingSets {
                reason: "cause and effect sets must be disjoint".into(),
            });
        }
        let parents = self.dag().parents_of_set(s)?;
        if !parents.is_disjoint(t) {
            return Err(Error::OverlappingSets {
                reason: format!(
                    "effect set intersects the cause's parent set {parents}; \
                     adjust over an explicit set instead"
                ),
            });
        }
        self.adjustment_kernel(s, t, &parents)
    }

    /// The back-door adjustment formula over a candidate `z ⊆ N_S`. No
    /// correctness claim is attached; see [`CptModel::certify_backdoor`].
    pub fn backdoor_adjustment(
        &self,
        s: &VertexSet,
        t: &VertexSet,
        z: &VertexSet,
    ) -> Result<Kernel> {
        self.check_targets(&[s, t, z])?;
        if !s.is_disjoint(t) || !s.is_disjoint(z) || !t.is_disjoint(z) {
            return Err(Error::OverlappingSets {
                reason: "cause, effect, and adjustment sets must be pairwise disjoint".into(),
            });
        }
        let nondesc = self.dag().nondescendants_of(s)?;
        if let Some(v) = z.iter().find(|&v| !nondesc.contains(v)) {
            return Err(Error::ZNotNondescendants { vertex: v });
        }
        self.adjustment_kernel(s, t, z)
    }

    /// Certifies a candidate back-door set at the default tolerance.
    pub fn certify_backdoor(
        &self,
        s: &VertexSet,
        t: &VertexSet,
        z: &VertexSet,
    ) -> Result<AdjustmentCertificate> {
        self.certify_backdoor_with_tolerance(s, t, z, CDI_TOLERANCE)
    }

    /// Certifies a candidate back-door set: computes the conditional
    /// directed information, the graphical check, and the worst-case gap
    /// between the adjustment formula and the interventional marginals.
    pub fn certify_backdoor_with_tolerance(
        &self,
        s: &VertexSet,
        t: &VertexSet,
        z: &VertexSet,
        tolerance: f64,
    ) -> Result<AdjustmentCertificate> {
        let kernel = self.backdoor_adjustment(s, t, z)?;
        let cdi_value = self.conditional_directed_information(t, s, z)?;
        let information_ok = cdi_value.is_zero_within(tolerance);
        let graphical_ok = self.dag().remove_outgoing(s)?.d_separated(s, t, z)?;

        let input_scope: Vec<Var> = s.iter().map(|v| self.var(v)).collect();
        let mut max_discrepancy: f64 = 0.0;
        let mut s_values = vec![0usize; input_scope.len()];
        for row in 0..kernel.row_count() {
            decode_cell(&input_scope, row, &mut s_values);
            let spec = InterventionSpec::new(
                input_scope
                    .iter()
                    .zip(&s_values)
                    .map(|(v, &val)| (v.index, val)),
            )?;
            let interventional = self.interventional_marginal(&spec, t)?;
            let adjusted = kernel
                .row_by_index(row)
                .expect("adjustment rows are defined");
            max_discrepancy = max_discrepancy.max(adjusted.total_variation(&interventional)?);
        }
        Ok(AdjustmentCertificate {
            z: z.clone(),
            graphical_ok,
            information_ok,
            cdi_value,
            max_discrepancy,
            tolerance,
        })
    }

    /// Enumerates candidate adjustment sets `Z ⊆ N_S \ T` up to `max_size`
    /// and returns those whose conditional directed information vanishes,
    /// sorted by size and then lexicographically.
    pub fn find_backdoor_sets(
        &self,
        s: &VertexSet,
        t: &VertexSet,
        max_size: usize,
    ) -> Result<Vec<VertexSet>> {
        self.check_targets(&[s, t])?;
        if !s.is_disjoint(t) {
            return Err(Error::OverlappingSets {
                reason: "cause and effect sets must be disjoint".into(),
            });
        }
        let universe: Vec<usize> = self
            .dag()
            .nondescendants_of(s)?
            .difference(t)
            .iter()
            .collect();
        let mut found = Vec::new();
        let mut combo = Vec::new();
        for size in 0..=max_size.min(universe.len()) {
            subsets_of_size(&universe, size, 0, &mut combo, &mut |members| {
                let z = VertexSet::new(members.iter().copied());
                match self.conditional_directed_information(t, s, &z) {
                    Ok(cdi) if cdi.is_zero_within(CDI_TOLERANCE) => {
                        found.push(z);
                        Ok(())
                    }
                    Ok(_) => Ok(()),
                    Err(e) => Err(e),
                }
            })?;
        }
        Ok(found)
    }
}

/// Lexicographic k-subset enumeration over a sorted universe.
fn subsets_of_size(
    universe: &[usize],
    size: usize,
    start: usize,
    combo: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if combo.len() == size {
        return visit(combo);
    }
    let needed = size - combo.len();
    for k in start..=universe.len().saturating_sub(needed) {
        combo.push(universe[k]);
        subsets_of_size(universe, size, k + 1, combo, visit)?;
        combo.pop();
    }
    Ok(())
}
