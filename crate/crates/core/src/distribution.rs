//! Exact probability tables over tuples of discrete variables, plus the
//! divergence and mutual-information measures built on them.
//!
//! A [`JointTable`] is the universal value type: joints, marginals,
//! conditionals, and interventional distributions are all tables. Entries are
//! 64-bit floats; every constructor enforces normalization within
//! [`NORMALIZATION_TOL`] and every reduction uses compensated summation in a
//! fixed order, so results are deterministic.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::kahan::{self, KahanSum};

/// Structural tolerance: table entries must sum to one within this bound.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Hard cap on dense table size; larger scopes are rejected outright.
pub const MAX_TABLE_CELLS: u128 = 1 << 24;

/// One scope entry: a variable identified by its model index, with its
/// alphabet size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub index: usize,
    pub cardinality: usize,
}

impl Var {
    pub fn new(index: usize, cardinality: usize) -> Self {
        Self { index, cardinality }
    }
}

/// Number of cells a scope spans, guarded against overflow and the size cap.
pub fn scope_cells(scope: &[Var]) -> Result<usize> {
    let mut cells: u128 = 1;
    for v in scope {
        cells = cells.saturating_mul(v.cardinality as u128);
        if cells > MAX_TABLE_CELLS {
            return Err(Error::ModelTooLarge {
                cells,
                limit: MAX_TABLE_CELLS,
            });
        }
    }
    Ok(cells as usize)
}

/// Decodes a flat cell index into per-variable values (scope\[0\] is the most
/// significant digit).
pub fn decode_cell(scope: &[Var], mut cell: usize, out: &mut [usize]) {
    for (k, v) in scope.iter().enumerate().rev() {
        out[k] = cell % v.cardinality;
        cell /= v.cardinality;
    }
}

/// Inverse of [`decode_cell`].
pub fn encode_cell(scope: &[Var], values: &[usize]) -> usize {
    let mut cell = 0;
    for (k, v) in scope.iter().enumerate() {
        debug_assert!(values[k] < v.cardinality);
        cell = cell * v.cardinality + values[k];
    }
    cell
}

/// An exact probability table over an ordered tuple of discrete variables.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    scope: Vec<Var>,
    probs: Vec<f64>,
}

impl JointTable {
    /// Validates and wraps a dense table: distinct scope variables, matching
    /// length, nonnegative entries summing to one within
    /// [`NORMALIZATION_TOL`].
    pub fn new(scope: Vec<Var>, probs: Vec<f64>) -> Result<Self> {
        let cells = scope_cells(&scope)?;
        for (k, v) in scope.iter().enumerate() {
            if v.cardinality == 0 {
                return Err(Error::ScopeMismatch {
                    reason: format!("variable {} has empty alphabet", v.index),
                });
            }
            if scope[..k].iter().any(|w| w.index == v.index) {
                return Err(Error::ScopeMismatch {
                    reason: format!("variable {} repeats in scope", v.index),
                });
            }
        }
        if probs.len() != cells {
            return Err(Error::ScopeMismatch {
                reason: format!("{} entries for a {cells}-cell scope", probs.len()),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::ScopeMismatch {
                reason: "entries must be finite and nonnegative".into(),
            });
        }
        let total = kahan::total(&probs);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::ScopeMismatch {
                reason: format!("entries sum to {total}, not 1"),
            });
        }
        Ok(Self { scope, probs })
    }

    /// The empty-scope table: a single cell of mass one.
    pub fn scalar() -> Self {
        Self {
            scope: Vec::new(),
            probs: vec![1.0],
        }
    }

    pub fn scope(&self) -> &[Var] {
        &self.scope
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cells(&self) -> usize {
        self.probs.len()
    }

    pub fn var_position(&self, index: usize) -> Option<usize> {
        self.scope.iter().position(|v| v.index == index)
    }

    pub fn scope_set(&self) -> VertexSet {
        self.scope.iter().map(|v| v.index).collect()
    }

    /// Probability of a full scope assignment (values listed in scope order).
    pub fn prob_of(&self, values: &[usize]) -> f64 {
        self.probs[encode_cell(&self.scope, values)]
    }

    fn positions_of(&self, t: &VertexSet) -> Result<Vec<usize>> {
        t.iter()
            .map(|idx| {
                self.var_position(idx).ok_or_else(|| Error::ScopeMismatch {
                    reason: format!("variable {idx} not in scope"),
                })
            })
            .collect()
    }

    /// Exact marginal over `t`; the result keeps this table's scope order.
    pub fn marginal(&self, t: &VertexSet) -> Result<JointTable> {
        self.positions_of(t)?;
        let keep: Vec<usize> = (0..self.scope.len())
            .filter(|&k| t.contains(self.scope[k].index))
            .collect();
        let out_scope: Vec<Var> = keep.iter().map(|&k| self.scope[k]).collect();
        let out_cells = scope_cells(&out_scope)?;
        let mut acc = vec![KahanSum::new(); out_cells];
        let mut values = vec![0usize; self.scope.len()];
        let mut out_values = vec![0usize; out_scope.len()];
        for (cell, &p) in self.probs.iter().enumerate() {
            decode_cell(&self.scope, cell, &mut values);
            for (j, &k) in keep.iter().enumerate() {
                out_values[j] = values[k];
            }
            acc[encode_cell(&out_scope, &out_values)].add(p);
        }
        let probs = acc.iter().map(KahanSum::total).collect();
        // Mass is preserved, so the normalization check passes by
        // construction.
        JointTable::new(out_scope, probs)
    }

    /// Conditions on observed evidence `(variable, value)` and renormalizes;
    /// the evidence variables leave the scope.
    ///
    /// This is conditioning by observation, distinct from intervention.
    pub fn condition(&self, evidence: &[(usize, usize)]) -> Result<JointTable> {
        let mut ev_pos = Vec::with_capacity(evidence.len());
        for &(idx, val) in evidence {
            let pos = self.var_position(idx).ok_or_else(|| Error::ScopeMismatch {
                reason: format!("evidence variable {idx} not in scope"),
            })?;
            if val >= self.scope[pos].cardinality {
                return Err(Error::ScopeMismatch {
                    reason: format!("evidence value {val} out of range for variable {idx}"),
                });
            }
            if ev_pos.iter().any(|&(p, _)| p == pos) {
                return Err(Error::ScopeMismatch {
                    reason: format!("evidence variable {idx} repeats"),
                });
            }
            ev_pos.push((pos, val));
        }
        let keep: Vec<usize> = (0..self.scope.len())
            .filter(|k| !ev_pos.iter().any(|&(p, _)| p == *k))
            .collect();
        let out_scope: Vec<Var> = keep.iter().map(|&k| self.scope[k]).collect();
        let out_cells = scope_cells(&out_scope)?;
        let mut slice = vec![0.0; out_cells];
        let mut mass = KahanSum::new();
        let mut values = vec![0usize; self.scope.len()];
        let mut out_values = vec![0usize; out_scope.len()];
        for (cell, &p) in self.probs.iter().enumerate() {
            decode_cell(&self.scope, cell, &mut values);
            if ev_pos.iter().any(|&(pos, val)| values[pos] != val) {
                continue;
            }
            for (j, &k) in keep.iter().enumerate() {
                out_values[j] = values[k];
            }
            slice[encode_cell(&out_scope, &out_values)] = p;
            mass.add(p);
        }
        let mass = mass.total();
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvidence);
        }
        for p in &mut slice {
            *p /= mass;
        }
        JointTable::new(out_scope, slice)
    }

    /// Packages the conditional `P(output | input)` as a [`Kernel`]. Rows for
    /// zero-mass input assignments are undefined and carry weight zero
    /// downstream.
    pub fn kernel_of(&self, output: &VertexSet, input: &VertexSet) -> Result<Kernel> {
        if !output.is_disjoint(input) {
            return Err(Error::ScopeMismatch {
                reason: "kernel input and output scopes overlap".into(),
            });
        }
        let both = self.marginal(&output.union(input))?;
        let input_scope: Vec<Var> = both
            .scope
            .iter()
            .copied()
            .filter(|v| input.contains(v.index))
            .collect();
        let output_scope: Vec<Var> = both
            .scope
            .iter()
            .copied()
            .filter(|v| output.contains(v.index))
            .collect();
        let rows_len = scope_cells(&input_scope)?;
        let mut rows = Vec::with_capacity(rows_len);
        let mut in_values = vec![0usize; input_scope.len()];
        for row in 0..rows_len {
            decode_cell(&input_scope, row, &mut in_values);
            let evidence: Vec<(usize, usize)> = input_scope
                .iter()
                .zip(&in_values)
                .map(|(v, &val)| (v.index, val))
                .collect();
            match both.condition(&evidence) {
                Ok(table) => rows.push(Some(table)),
                Err(Error::ZeroProbabilityEvidence) => rows.push(None),
                Err(e) => return Err(e),
            }
        }
        Kernel::new(input_scope, output_scope, rows)
    }

    /// Product of two tables over disjoint scopes.
    pub fn product(&self, other: &JointTable) -> Result<JointTable> {
        if !self.scope_set().is_disjoint(&other.scope_set()) {
            return Err(Error::ScopeMismatch {
                reason: "product scopes overlap".into(),
            });
        }
        let mut scope = self.scope.clone();
        scope.extend_from_slice(&other.scope);
        scope_cells(&scope)?;
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for &p in &self.probs {
            for &q in &other.probs {
                probs.push(p * q);
            }
        }
        JointTable::new(scope, probs)
    }

    /// Cell positions of `other` matched up to this table's cell order;
    /// requires equal variable sets.
    fn alignment(&self, other: &JointTable) -> Result<Vec<usize>> {
        if self.scope.len() != other.scope.len() {
            return Err(Error::ScopeMismatch {
                reason: "tables have different scopes".into(),
            });
        }
        let mut positions = Vec::with_capacity(self.scope.len());
        for v in &self.scope {
            let pos = other
                .var_position(v.index)
                .ok_or_else(|| Error::ScopeMismatch {
                    reason: format!("variable {} missing from second scope", v.index),
                })?;
            if other.scope[pos].cardinality != v.cardinality {
                return Err(Error::ScopeMismatch {
                    reason: format!("variable {} has mismatched cardinality", v.index),
                });
            }
            positions.push(pos);
        }
        let mut map = vec![0usize; self.probs.len()];
        let mut values = vec![0usize; self.scope.len()];
        let mut other_values = vec![0usize; self.scope.len()];
        for (cell, slot) in map.iter_mut().enumerate() {
            decode_cell(&self.scope, cell, &mut values);
            for (k, &pos) in positions.iter().enumerate() {
                other_values[pos] = values[k];
            }
            *slot = encode_cell(&other.scope, &other_values);
        }
        Ok(map)
    }

    /// Total-variation distance `½ Σ |p − q|` between tables over the same
    /// variables (scope order may differ).
    pub fn total_variation(&self, other: &JointTable) -> Result<f64> {
        let map = self.alignment(other)?;
        let mut acc = KahanSum::new();
        for (cell, &p) in self.probs.iter().enumerate() {
            acc.add((p - other.probs[map[cell]]).abs());
        }
        Ok(0.5 * acc.total())
    }

    /// Largest absolute cell difference between tables over the same
    /// variables.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64> {
        let map = self.alignment(other)?;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(cell, &p)| (p - other.probs[map[cell]]).abs())
            .fold(0.0, f64::max))
    }
}

impl fmt::Display for JointTable {
    /// One `v<i>=<val> ... p` line per cell.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut values = vec![0usize; self.scope.len()];
        for (cell, &p) in self.probs.iter().enumerate() {
            decode_cell(&self.scope, cell, &mut values);
            for (k, v) in self.scope.iter().enumerate() {
                write!(f, "v{}={} ", v.index, values[k])?;
            }
            writeln!(f, " {p}")?;
        }
        Ok(())
    }
}

/// A stochastic kernel: one output-distribution row per joint input
/// assignment. Rows for impossible inputs are `None` and must only ever be
/// read under weight zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    input_scope: Vec<Var>,
    output_scope: Vec<Var>,
    rows: Vec<Option<JointTable>>,
}

impl Kernel {
    pub fn new(
        input_scope: Vec<Var>,
        output_scope: Vec<Var>,
        rows: Vec<Option<JointTable>>,
    ) -> Result<Self> {
        let in_cells = scope_cells(&input_scope)?;
        scope_cells(&output_scope)?;
        if input_scope
            .iter()
            .any(|v| output_scope.iter().any(|w| w.index == v.index))
        {
            return Err(Error::ScopeMismatch {
                reason: "kernel input and output scopes overlap".into(),
            });
        }
        if rows.len() != in_cells {
            return Err(Error::ScopeMismatch {
                reason: format!("{} rows for {in_cells} input assignments", rows.len()),
            });
        }
        for row in rows.iter().flatten() {
            if row.scope() != output_scope {
                return Err(Error::ScopeMismatch {
                    reason: "kernel row scope differs from output scope".into(),
                });
            }
        }
        Ok(Self {
            input_scope,
            output_scope,
            rows,
        })
    }

    /// Builds a fully-defined kernel from dense row data.
    pub fn from_rows(
        input_scope: Vec<Var>,
        output_scope: Vec<Var>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|probs| JointTable::new(output_scope.clone(), probs).map(Some))
            .collect::<Result<Vec<_>>>()?;
        Kernel::new(input_scope, output_scope, rows)
    }

    pub fn input_scope(&self) -> &[Var] {
        &self.input_scope
    }

    pub fn output_scope(&self) -> &[Var] {
        &self.output_scope
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Row for an input assignment given in input-scope order; `None` when
    /// the input has probability zero.
    pub fn row(&self, input_values: &[usize]) -> Option<&JointTable> {
        self.rows[encode_cell(&self.input_scope, input_values)].as_ref()
    }

    pub fn row_by_index(&self, row: usize) -> Option<&JointTable> {
        self.rows[row].as_ref()
    }

    pub fn rows(&self) -> impl Iterator<Item = Option<&JointTable>> {
        self.rows.iter().map(Option::as_ref)
    }

    pub fn is_fully_defined(&self) -> bool {
        self.rows.iter().all(Option::is_some)
    }
}

/// An information quantity in bits: finite and nonnegative, or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InfoValue {
    Finite(f64),
    Infinite,
}

impl InfoValue {
    /// Wraps a raw sum, clamping the tiny negative values that compensated
    /// float arithmetic can produce for a true zero.
    pub fn from_bits(bits: f64) -> Self {
        debug_assert!(!bits.is_nan());
        debug_assert!(bits > -1e-6, "information value {bits} is negative");
        if bits.is_infinite() {
            InfoValue::Infinite
        } else {
            InfoValue::Finite(bits.max(0.0))
        }
    }

    pub fn bits(&self) -> Option<f64> {
        match self {
            InfoValue::Finite(v) => Some(*v),
            InfoValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, InfoValue::Infinite)
    }

    /// True when the value is finite and at most `tol`.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        matches!(self, InfoValue::Finite(v) if *v <= tol)
    }

    pub fn approx_eq(&self, other: &InfoValue, tol: f64) -> bool {
        match (self, other) {
            (InfoValue::Finite(a), InfoValue::Finite(b)) => (a - b).abs() <= tol,
            (InfoValue::Infinite, InfoValue::Infinite) => true,
            _ => false,
        }
    }
}

impl std::ops::Add for InfoValue {
    type Output = InfoValue;

    fn add(self, rhs: InfoValue) -> InfoValue {
        match (self, rhs) {
            (InfoValue::Finite(a), InfoValue::Finite(b)) => InfoValue::Finite(a + b),
            _ => InfoValue::Infinite,
        }
    }
}

impl fmt::Display for InfoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfoValue::Finite(v) => write!(f, "{v}"),
            InfoValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Kullback–Leibler divergence `Σ p log2(p/q)` in bits, with the conventions
/// `0·log(0/q) = 0` and `p·log(p/0) = +∞` for `p > 0`.
pub fn kl_divergence(p: &JointTable, q: &JointTable) -> Result<InfoValue> {
    let map = p.alignment(q)?;
    let mut acc = KahanSum::new();
    for (cell, &pv) in p.probs.iter().enumerate() {
        if pv == 0.0 {
            continue;
        }
        let qv = q.probs[map[cell]];
        if qv == 0.0 {
            return Ok(InfoValue::Infinite);
        }
        acc.add(pv * (pv / qv).log2());
    }
    Ok(InfoValue::from_bits(acc.total()))
}

/// Conditional divergence `Σ_a base(a) · D(P(·|a) ‖ Q(·|a))`.
///
/// Rows with zero base weight contribute nothing, even when undefined.
pub fn conditional_divergence(p: &Kernel, q: &Kernel, base: &JointTable) -> Result<InfoValue> {
    if p.input_scope != q.input_scope || p.output_scope != q.output_scope {
        return Err(Error::ScopeMismatch {
            reason: "kernels have different scopes".into(),
        });
    }
    let base_cell_of = {
        let probe = JointTable {
            scope: p.input_scope.clone(),
            probs: vec![0.0; p.rows.len()],
        };
        probe.alignment(base)?
    };
    let mut acc = KahanSum::new();
    let mut infinite = false;
    for (row, (p_row, q_row)) in p.rows.iter().zip(&q.rows).enumerate() {
        let w = base.probs[base_cell_of[row]];
        if w == 0.0 {
            continue;
        }
        let (Some(pr), Some(qr)) = (p_row, q_row) else {
            return Err(Error::ScopeMismatch {
                reason: "undefined kernel row carries positive base weight".into(),
            });
        };
        match kl_divergence(pr, qr)? {
            InfoValue::Finite(d) => acc.add(w * d),
            InfoValue::Infinite => infinite = true,
        }
    }
    if infinite {
        return Ok(InfoValue::Infinite);
    }
    Ok(InfoValue::from_bits(acc.total()))
}

/// Mutual information `I(X^A; X^B) = D(P_AB ‖ P_A ⊗ P_B)` in bits.
pub fn mutual_information(table: &JointTable, a: &VertexSet, b: &VertexSet) -> Result<InfoValue> {
    if !a.is_disjoint(b) {
        return Err(Error::ScopeMismatch {
            reason: "mutual-information sets overlap".into(),
        });
    }
    let joint_ab = table.marginal(&a.union(b))?;
    let pa = joint_ab.marginal(a)?;
    let pb = joint_ab.marginal(b)?;
    kl_divergence(&joint_ab, &pa.product(&pb)?)
}

/// Conditional mutual information `I(X^A; X^B | X^Z)`, averaged over the
/// marginal of `z`.
pub fn conditional_mutual_information(
    table: &JointTable,
    a: &VertexSet,
    b: &VertexSet,
    z: &VertexSet,
) -> Result<InfoValue> {
    if !a.is_disjoint(b) || !a.is_disjoint(z) || !b.is_disjoint(z) {
        return Err(Error::ScopeMismatch {
            reason: "conditional-mutual-information sets overlap".into(),
        });
    }
    let abz = table.marginal(&a.union(b).union(z))?;
    let pz = abz.marginal(z)?;
    let mut acc = KahanSum::new();
    let mut z_values = vec![0usize; pz.scope.len()];
    for (cell, &w) in pz.probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        decode_cell(&pz.scope, cell, &mut z_values);
        let evidence: Vec<(usize, usize)> = pz
            .scope
            .iter()
            .zip(&z_values)
            .map(|(v, &val)| (v.index, val))
            .collect();
        let sliced = abz.condition(&evidence)?;
        match mutual_information(&sliced, a, b)? {
            InfoValue::Finite(mi) => acc.add(w * mi),
            InfoValue::Infinite => return Ok(InfoValue::Infinite),
        }
    }
    Ok(InfoValue::from_bits(acc.total()))
}
