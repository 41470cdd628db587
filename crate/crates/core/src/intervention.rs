//! Interventional distributions: truncated factorization, functional
//! surgery, mixed intervention/observation conditioning, and directed
//! stochastic kernels.
//!
//! A hard assignment `do(X^S = x^S)` deletes the mechanisms of the variables
//! in `S` and pins their values. The resulting law of the remaining variables
//! is the truncated factorization `Π_{i∉S} P(x_i | x^{parents(i)})`; the
//! returned tables are over the non-intervened scope, with the pinned values
//! read from the intervention itself.

use crate::distribution::{decode_cell, scope_cells, JointTable, Var};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::kahan::KahanSum;
use crate::model::{CptModel, FunctionalModel};

/// A hard assignment `X^S <- x^S`. The empty spec means "no intervention".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InterventionSpec {
    assignments: Vec<(usize, usize)>,
}

impl InterventionSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a spec from `(variable, value)` pairs; duplicate variables are
    /// rejected. Value ranges are checked against the model at query time.
    pub fn new(assignments: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut assignments: Vec<(usize, usize)> = assignments.into_iter().collect();
        assignments.sort_unstable();
        for pair in assignments.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidSpec {
                    reason: format!("variable {} assigned twice", pair[0].0),
                });
            }
        }
        Ok(Self { assignments })
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    /// The intervened vertex set `S`.
    pub fn vars(&self) -> VertexSet {
        self.assignments.iter().map(|&(v, _)| v).collect()
    }

    pub fn value_of(&self, variable: usize) -> Option<usize> {
        self.assignments
            .binary_search_by_key(&variable, |&(v, _)| v)
            .ok()
            .map(|k| self.assignments[k].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments.iter().copied()
    }

    fn check_against(&self, cardinalities: &[usize]) -> Result<()> {
        for (v, val) in self.iter() {
            if v >= cardinalities.len() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    n: cardinalities.len(),
                });
            }
            if val >= cardinalities[v] {
                return Err(Error::InvalidSpec {
                    reason: format!("value {val} out of range for variable {v}"),
                });
            }
        }
        Ok(())
    }
}

impl CptModel {
    /// The "global" interventional distribution `P(X^{S^c} | do(X^S = x^S))`:
    /// the truncated factorization over all non-intervened variables.
    ///
    /// With an empty spec this is exactly [`CptModel::joint`].
    pub fn interventional_global(&self, spec: &InterventionSpec) -> Result<JointTable> {
        spec.check_against(self.cardinalities())?;
        let s = spec.vars();
        let scope: Vec<Var> = (0..self.vertex_count())
            .filter(|&i| !s.contains(i))
            .map(|i| self.var(i))
            .collect();
        let cells = scope_cells(&scope)?;
        let mut probs = Vec::with_capacity(cells);
        let mut free_values = vec![0usize; scope.len()];
        let mut full_values = vec![0usize; self.vertex_count()];
        for (v, val) in spec.iter() {
            full_values[v] = val;
        }
        for cell in 0..cells {
            decode_cell(&scope, cell, &mut free_values);
            for (k, var) in scope.iter().enumerate() {
                full_values[var.index] = free_values[k];
            }
            let mut p = 1.0;
            for i in 0..self.vertex_count() {
                if !s.contains(i) {
                    p *= self.cpt_prob(i, &full_values);
                }
            }
            probs.push(p);
        }
        JointTable::new(scope, probs)
    }

    /// `P(X^T | do(X^S = x^S))`, the global law marginalized to `t`.
    pub fn interventional_marginal(
        &self,
        spec: &InterventionSpec,
        t: &VertexSet,
    ) -> Result<JointTable> {
        if !t.is_disjoint(&spec.vars()) {
            return Err(Error::OverlappingSets {
                reason: "target set intersects the intervened set".into(),
            });
        }
        self.interventional_global(spec)?.marginal(t)
    }

    /// `P(X^T | do(X^S = x^S), X^{S'} = x^{S'})`: conditioning applied
    /// strictly after the intervention.
    pub fn interventional_conditional(
        &self,
        spec: &InterventionSpec,
        evidence: &[(usize, usize)],
        t: &VertexSet,
    ) -> Result<JointTable> {
        let s = spec.vars();
        let s_prime: VertexSet = evidence.iter().map(|&(v, _)| v).collect();
        if !s.is_disjoint(&s_prime) || !s.is_disjoint(t) || !s_prime.is_disjoint(t) {
            return Err(Error::OverlappingSets {
                reason: "do-set, evidence set, and target set must be pairwise disjoint".into(),
            });
        }
        let base = self.interventional_marginal(spec, &s_prime.union(t))?;
        if evidence.is_empty() {
            return Ok(base);
        }
        base.condition(evidence)
    }

    /// The directed stochastic kernel `Π_{i∉S} P(x_i | x^{i-1})` along the
    /// declared variable order, evaluated at the pinned values.
    ///
    /// Full-history conditionals require a full-support joint; models with a
    /// zero-probability cell are rejected. By the equivalence between this
    /// product and the truncated factorization, the result matches
    /// [`CptModel::interventional_global`] on any such model.
    pub fn dsk(&self, spec: &InterventionSpec) -> Result<JointTable> {
        spec.check_against(self.cardinalities())?;
        let joint = self.joint()?;
        if let Some(cell) = joint.probs().iter().position(|&p| p == 0.0) {
            let mut values = vec![0usize; self.vertex_count()];
            decode_cell(joint.scope(), cell, &mut values);
            return Err(Error::UnsupportedModel { assignment: values });
        }
        let n = self.vertex_count();
        // Prefix marginals over the declared order: prefix[k] covers
        // variables 0..k.
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(JointTable::scalar());
        for k in 1..=n {
            prefix.push(joint.marginal(&(0..k).collect())?);
        }
        let s = spec.vars();
        let scope: Vec<Var> = (0..n)
            .filter(|&i| !s.contains(i))
            .map(|i| self.var(i))
            .collect();
        let cells = scope_cells(&scope)?;
        let mut probs = Vec::with_capacity(cells);
        let mut free_values = vec![0usize; scope.len()];
        let mut full_values = vec![0usize; n];
        for (v, val) in spec.iter() {
            full_values[v] = val;
        }
        for cell in 0..cells {
            decode_cell(&scope, cell, &mut free_values);
            for (k, var) in scope.iter().enumerate() {
                full_values[var.index] = free_values[k];
            }
            let mut p = 1.0;
            for i in 0..n {
                if s.contains(i) {
                    continue;
                }
                let num = prefix[i + 1].prob_of(&full_values[..=i]);
                let den = prefix[i].prob_of(&full_values[..i]);
                p *= num / den;
            }
            probs.push(p);
        }
        JointTable::new(scope, probs)
    }
}

impl FunctionalModel {
    /// Graph surgery on the structural equations: every `j` in the spec has
    /// its equation replaced by the constant `x_j` (noise-free point mass);
    /// all other equations and noise tables are untouched, with edges from
    /// the intervened set now reading constant inputs.
    pub fn surgery(&self, spec: &InterventionSpec) -> Result<FunctionalModel> {
        for (v, val) in spec.iter() {
            if v >= self.vertex_count() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    n: self.vertex_count(),
                });
            }
            if val >= self.cardinalities()[v] {
                return Err(Error::InvalidSpec {
                    reason: format!("value {val} out of range for variable {v}"),
                });
            }
        }
        let s = spec.vars();
        let dag = self.dag().surgery(&s)?;
        let mut noise = self.noise_tables().to_vec();
        let mut functions = self.functions().to_vec();
        for (v, val) in spec.iter() {
            noise[v] = JointTable::new(vec![Var::new(v, 1)], vec![1.0])?;
            functions[v] = vec![val];
        }
        FunctionalModel::new(dag, self.cardinalities().to_vec(), noise, functions)
    }
}

/// Estimates an interventional law by Monte Carlo over a surgered functional
/// model; the exact counterpart of the sampler, used for cross-checks.
pub fn empirical_joint(fm: &FunctionalModel, seed: u64, count: usize) -> Result<JointTable> {
    let scope: Vec<Var> = (0..fm.vertex_count())
        .map(|i| Var::new(i, fm.cardinalities()[i]))
        .collect();
    let cells = scope_cells(&scope)?;
    let mut counts = vec![0u64; cells];
    for assignment in fm.sample_many(seed, count) {
        let mut cell = 0usize;
        for (k, var) in scope.iter().enumerate() {
            cell = cell * var.cardinality + assignment.values()[k];
            debug_assert!(assignment.values()[k] < var.cardinality);
        }
        counts[cell] += 1;
    }
    let mut probs = Vec::with_capacity(cells);
    let mut acc = KahanSum::new();
    for &c in &counts {
        let p = c as f64 / count as f64;
        acc.add(p);
        probs.push(p);
    }
    // Counts divide exactly, but guard the final cell against rounding so the
    // normalization contract holds for any count.
    let drift = 1.0 - acc.total();
    if let Some(last) = probs.last_mut() {
        *last += drift;
    }
    JointTable::new(scope, probs)
}
