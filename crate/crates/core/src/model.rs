//! Model definitions: CPT-based Markov factorization and functional
//! (structural-equation) form, conversion between them, and seeded sampling.
//!
//! Variables must be declared in a causal order: every parent index precedes
//! its child. That ordering is part of a model's meaning (directed-kernel
//! queries factor along it), so constructors verify rather than reorder.

use std::fmt;

use crate::distribution::{decode_cell, encode_cell, scope_cells, JointTable, Kernel, Var};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng;

/// A single invariant violation found while validating a model.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A CPT or noise row does not sum to one within 1e-12.
    Normalization {
        variable: usize,
        row: usize,
        sum: f64,
    },
    /// A CPT input scope differs from the variable's parent set.
    Scope {
        variable: usize,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    /// Alphabet size is zero, or a row has the wrong width.
    Cardinality {
        variable: usize,
        detail: String,
    },
    /// A kernel has the wrong number of rows, or an undefined row.
    RowCount {
        variable: usize,
        expected: usize,
        found: usize,
    },
    UndefinedRow {
        variable: usize,
        row: usize,
    },
    /// A parent index does not precede its child in the declared order.
    NotCausalOrder {
        variable: usize,
        parent: usize,
    },
    /// A structural-equation entry maps outside the variable's alphabet.
    FunctionRange {
        variable: usize,
        entry: usize,
        value: usize,
    },
    FunctionLength {
        variable: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Normalization { variable, row, sum } => {
                write!(f, "variable {variable}, row {row}: sums to {sum}")
            }
            Violation::Scope {
                variable,
                expected,
                found,
            } => write!(
                f,
                "variable {variable}: CPT scope {found:?} differs from parents {expected:?}"
            ),
            Violation::Cardinality { variable, detail } => {
                write!(f, "variable {variable}: {detail}")
            }
            Violation::RowCount {
                variable,
                expected,
                found,
            } => write!(f, "variable {variable}: {found} rows, expected {expected}"),
            Violation::UndefinedRow { variable, row } => {
                write!(f, "variable {variable}: row {row} is undefined")
            }
            Violation::NotCausalOrder { variable, parent } => write!(
                f,
                "variable {variable} has parent {parent}, which does not precede it"
            ),
            Violation::FunctionRange {
                variable,
                entry,
                value,
            } => write!(
                f,
                "variable {variable}: function entry {entry} maps to {value}, outside the alphabet"
            ),
            Violation::FunctionLength {
                variable,
                expected,
                found,
            } => write!(
                f,
                "variable {variable}: function table has {found} entries, expected {expected}"
            ),
        }
    }
}

/// A full assignment `x^n`, one symbol index per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>, cardinalities: &[usize]) -> Result<Self> {
        if values.len() != cardinalities.len() {
            return Err(Error::ScopeMismatch {
                reason: format!(
                    "{} values for {} variables",
                    values.len(),
                    cardinalities.len()
                ),
            });
        }
        for (i, (&v, &c)) in values.iter().zip(cardinalities).enumerate() {
            if v >= c {
                return Err(Error::ScopeMismatch {
                    reason: format!("value {v} out of range for variable {i}"),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, variable: usize) -> usize {
        self.values[variable]
    }
}

/// A DAG plus one conditional probability table per vertex; carries the
/// Markov factorization `P(x^n) = Π_i P(x_i | x^{parents(i)})`.
#[derive(Clone, Debug, PartialEq)]
pub struct CptModel {
    dag: Dag,
    cardinalities: Vec<usize>,
    cpts: Vec<Kernel>,
}

impl CptModel {
    pub fn new(dag: Dag, cardinalities: Vec<usize>, cpts: Vec<Kernel>) -> Result<Self> {
        let violations = Self::validate_parts(&dag, &cardinalities, &cpts);
        if !violations.is_empty() {
            return Err(Error::InvalidModel { violations });
        }
        Ok(Self {
            dag,
            cardinalities,
            cpts,
        })
    }

    /// Checks every type invariant and lists all violations found.
    pub fn validate_parts(dag: &Dag, cardinalities: &[usize], cpts: &[Kernel]) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = dag.vertex_count();
        if cardinalities.len() != n || cpts.len() != n {
            out.push(Violation::Cardinality {
                variable: 0,
                detail: format!(
                    "{} cardinalities and {} CPTs for {n} vertices",
                    cardinalities.len(),
                    cpts.len()
                ),
            });
            return out;
        }
        for (i, ps) in (0..n).map(|i| (i, dag.parents(i))) {
            for &p in ps {
                if p >= i {
                    out.push(Violation::NotCausalOrder {
                        variable: i,
                        parent: p,
                    });
                }
            }
        }
        for i in 0..n {
            if cardinalities[i] == 0 {
                out.push(Violation::Cardinality {
                    variable: i,
                    detail: "alphabet is empty".into(),
                });
                continue;
            }
            let cpt = &cpts[i];
            let expected_in: Vec<usize> = dag.parents(i).to_vec();
            let found_in: Vec<usize> = cpt.input_scope().iter().map(|v| v.index).collect();
            let in_cards_ok = cpt
                .input_scope()
                .iter()
                .all(|v| v.index < n && v.cardinality == cardinalities[v.index]);
            if found_in != expected_in || !in_cards_ok {
                out.push(Violation::Scope {
                    variable: i,
                    expected: expected_in,
                    found: found_in,
                });
                continue;
            }
            let out_ok = cpt.output_scope().len() == 1
                && cpt.output_scope()[0].index == i
                && cpt.output_scope()[0].cardinality == cardinalities[i];
            if !out_ok {
                out.push(Violation::Scope {
                    variable: i,
                    expected: vec![i],
                    found: cpt.output_scope().iter().map(|v| v.index).collect(),
                });
                continue;
            }
            let expected_rows = dag
                .parents(i)
                .iter()
                .map(|&p| cardinalities[p])
                .product::<usize>();
            if cpt.row_count() != expected_rows {
                out.push(Violation::RowCount {
                    variable: i,
                    expected: expected_rows,
                    found: cpt.row_count(),
                });
                continue;
            }
            for (row, table) in cpt.rows().enumerate() {
                match table {
                    None => out.push(Violation::UndefinedRow { variable: i, row }),
                    Some(t) => {
                        // JointTable enforces normalization; re-derive the sum
                        // so the report is self-contained.
                        let sum: f64 = t.probs().iter().sum();
                        if (sum - 1.0).abs() > 1e-12 {
                            out.push(Violation::Normalization {
                                variable: i,
                                row,
                                sum,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn vertex_count(&self) -> usize {
        self.dag.vertex_count()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn cpt(&self, variable: usize) -> &Kernel {
        &self.cpts[variable]
    }

    pub fn cpts(&self) -> &[Kernel] {
        &self.cpts
    }

    /// Scope entry for one variable.
    pub fn var(&self, variable: usize) -> Var {
        Var::new(variable, self.cardinalities[variable])
    }

    /// The CPT entry `P(x_i = value | parents = parent_values)`, with parent
    /// values read from a full assignment.
    pub fn cpt_prob(&self, variable: usize, full_values: &[usize]) -> f64 {
        let cpt = &self.cpts[variable];
        let parent_values: Vec<usize> = self
            .dag
            .parents(variable)
            .iter()
            .map(|&p| full_values[p])
            .collect();
        let row = cpt
            .row(&parent_values)
            .expect("CPT rows are fully defined by validation");
        row.probs()[full_values[variable]]
    }

    /// The exact joint `P(x^n)` as a product of CPT entries, cell by cell.
    pub fn joint(&self) -> Result<JointTable> {
        let scope: Vec<Var> = (0..self.vertex_count()).map(|i| self.var(i)).collect();
        let cells = scope_cells(&scope)?;
        let mut probs = Vec::with_capacity(cells);
        let mut values = vec![0usize; scope.len()];
        for cell in 0..cells {
            decode_cell(&scope, cell, &mut values);
            let mut p = 1.0;
            for i in 0..self.vertex_count() {
                p *= self.cpt_prob(i, &values);
            }
            probs.push(p);
        }
        JointTable::new(scope, probs)
    }
}

/// Structural equations `X_i = f_i(X^{parents(i)}, U_i)` with independent
/// exogenous noise, everything finite and tabulated.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalModel {
    dag: Dag,
    cardinalities: Vec<usize>,
    /// `P(U_i)`; the table's scope index `i` names the noise source `U_i`,
    /// not the observable `X_i`.
    noise: Vec<JointTable>,
    /// Dense lookup `f_i`, indexed `parent_assignment * |U_i| + u`.
    functions: Vec<Vec<usize>>,
}

impl FunctionalModel {
    pub fn new(
        dag: Dag,
        cardinalities: Vec<usize>,
        noise: Vec<JointTable>,
        functions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let violations = Self::validate_parts(&dag, &cardinalities, &noise, &functions);
        if !violations.is_empty() {
            return Err(Error::InvalidModel { violations });
        }
        Ok(Self {
            dag,
            cardinalities,
            noise,
            functions,
        })
    }

    pub fn validate_parts(
        dag: &Dag,
        cardinalities: &[usize],
        noise: &[JointTable],
        functions: &[Vec<usize>],
    ) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = dag.vertex_count();
        if cardinalities.len() != n || noise.len() != n || functions.len() != n {
            out.push(Violation::Cardinality {
                variable: 0,
                detail: "component counts differ from the vertex count".into(),
            });
            return out;
        }
        for i in 0..n {
            for &p in dag.parents(i) {
                if p >= i {
                    out.push(Violation::NotCausalOrder {
                        variable: i,
                        parent: p,
                    });
                }
            }
        }
        for i in 0..n {
            if cardinalities[i] == 0 {
                out.push(Violation::Cardinality {
                    variable: i,
                    detail: "alphabet is empty".into(),
                });
                continue;
            }
            if noise[i].scope().len() != 1 {
                out.push(Violation::Cardinality {
                    variable: i,
                    detail: "noise table must cover exactly one noise source".into(),
                });
                continue;
            }
            let noise_card = noise[i].scope()[0].cardinality;
            let parent_cells = dag
                .parents(i)
                .iter()
                .map(|&p| cardinalities[p])
                .product::<usize>();
            let expected = parent_cells * noise_card;
            if functions[i].len() != expected {
                out.push(Violation::FunctionLength {
                    variable: i,
                    expected,
                    found: functions[i].len(),
                });
                continue;
            }
            for (entry, &value) in functions[i].iter().enumerate() {
                if value >= cardinalities[i] {
                    out.push(Violation::FunctionRange {
                        variable: i,
                        entry,
                        value,
                    });
                }
            }
        }
        out
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn vertex_count(&self) -> usize {
        self.dag.vertex_count()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn noise(&self, variable: usize) -> &JointTable {
        &self.noise[variable]
    }

    pub fn noise_tables(&self) -> &[JointTable] {
        &self.noise
    }

    pub fn functions(&self) -> &[Vec<usize>] {
        &self.functions
    }

    /// Evaluates `f_i` at a parent assignment (read from full values) and a
    /// noise symbol.
    pub fn eval(&self, variable: usize, full_values: &[usize], noise_value: usize) -> usize {
        let parent_scope: Vec<Var> = self
            .dag
            .parents(variable)
            .iter()
            .map(|&p| Var::new(p, self.cardinalities[p]))
            .collect();
        let parent_values: Vec<usize> = self
            .dag
            .parents(variable)
            .iter()
            .map(|&p| full_values[p])
            .collect();
        let pa_cell = encode_cell(&parent_scope, &parent_values);
        let noise_card = self.noise[variable].scope()[0].cardinality;
        self.functions[variable][pa_cell * noise_card + noise_value]
    }

    /// Converts to CPT form: each row is the pushforward of the noise law
    /// through `f_i(parents, ·)`.
    pub fn to_cpt_model(&self) -> Result<CptModel> {
        let n = self.vertex_count();
        let mut cpts = Vec::with_capacity(n);
        for i in 0..n {
            let parent_scope: Vec<Var> = self
                .dag
                .parents(i)
                .iter()
                .map(|&p| Var::new(p, self.cardinalities[p]))
                .collect();
            let out_scope = vec![Var::new(i, self.cardinalities[i])];
            let pa_cells = scope_cells(&parent_scope)?;
            let noise_probs = self.noise[i].probs();
            let noise_card = noise_probs.len();
            let mut rows = Vec::with_capacity(pa_cells);
            for pa in 0..pa_cells {
                let mut row = vec![0.0; self.cardinalities[i]];
                for (u, &pu) in noise_probs.iter().enumerate() {
                    row[self.functions[i][pa * noise_card + u]] += pu;
                }
                rows.push(row);
            }
            cpts.push(Kernel::from_rows(parent_scope, out_scope, rows)?);
        }
        CptModel::new(self.dag.clone(), self.cardinalities.clone(), cpts)
    }

    /// Draws one assignment: each noise source is sampled independently with
    /// the counter-based generator (draw index = variable index), then the
    /// equations are evaluated in declared order.
    pub fn sample(&self, seed: u64) -> Assignment {
        self.sample_at(seed, 0)
    }

    /// Draws `count` assignments; sample `k` uses draw indices
    /// `k*n .. k*n + n`.
    pub fn sample_many(&self, seed: u64, count: usize) -> Vec<Assignment> {
        (0..count).map(|k| self.sample_at(seed, k)).collect()
    }

    fn sample_at(&self, seed: u64, sample_index: usize) -> Assignment {
        let n = self.vertex_count();
        let mut values = vec![0usize; n];
        for i in 0..n {
            let draw = (sample_index * n + i) as u64;
            let u = rng::categorical(seed, draw, self.noise[i].probs());
            values[i] = self.eval(i, &values, u);
        }
        Assignment { values }
    }
}
