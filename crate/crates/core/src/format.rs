//! The model file format: a line-oriented, human-editable text format with a
//! canonical serialization.
//!
//! ```text
//! # comments run to end of line
//! model chain
//! kind cpt
//!
//! var X 2
//! var Y 2 parents X
//!
//! cpt X
//!   () = 0.35 0.65
//! cpt Y
//!   (X=0) = 0.8 0.2
//!   (X=1) = 0.3 0.7
//! ```
//!
//! Functional models replace `cpt` blocks with a `noise` line (the exogenous
//! distribution) and an `fn` block per variable, whose rows list the output
//! symbol for each noise value:
//!
//! ```text
//! noise Y = 0.9 0.1
//! fn Y
//!   (X=0) = 0 1
//!   (X=1) = 1 0
//! ```
//!
//! Variables must be declared in causal order (parents first). CPT and
//! function rows are keyed by explicit parent assignments, so files are
//! self-describing; every row must be present exactly once. Serialization is
//! canonical: variable order, row order (mixed-radix over parents, ascending),
//! and shortest round-trip float formatting, so `serialize(load(f))`
//! reproduces a canonical file byte for byte.

use std::path::Path;

use crate::distribution::{decode_cell, encode_cell, scope_cells, JointTable, Kernel, Var};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::model::{CptModel, FunctionalModel, Violation};

/// Which form a file declares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Cpt,
    Functional,
}

/// A typed model of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Cpt(CptModel),
    Functional(FunctionalModel),
}

impl Model {
    pub fn dag(&self) -> &Dag {
        match self {
            Model::Cpt(m) => m.dag(),
            Model::Functional(m) => m.dag(),
        }
    }

    pub fn cardinalities(&self) -> &[usize] {
        match self {
            Model::Cpt(m) => m.cardinalities(),
            Model::Functional(m) => m.cardinalities(),
        }
    }

    /// The CPT view: functional models are converted by pushing the noise
    /// through each equation.
    pub fn to_cpt(&self) -> Result<CptModel> {
        match self {
            Model::Cpt(m) => Ok(m.clone()),
            Model::Functional(m) => m.to_cpt_model(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Cpt(_) => ModelKind::Cpt,
            Model::Functional(_) => ModelKind::Functional,
        }
    }
}

/// A parsed and validated model plus its declared name.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedModel {
    pub name: String,
    pub model: Model,
}

#[derive(Clone, Debug)]
struct VarDecl {
    name: String,
    cardinality: usize,
    parents: Vec<String>,
}

#[derive(Clone, Debug)]
struct RawRow {
    /// Parent assignments as written, `(name, value)`.
    key: Vec<(String, usize)>,
    probs: Vec<f64>,
    symbols: Vec<usize>,
    line: usize,
}

/// The raw document: everything the file said, before semantic validation.
#[derive(Clone, Debug)]
pub struct ModelDoc {
    pub name: String,
    kind: ModelKind,
    vars: Vec<VarDecl>,
    /// Per variable: CPT rows (cpt kind) or function rows (functional kind).
    rows: Vec<Vec<RawRow>>,
    noise: Vec<Option<Vec<f64>>>,
}

impl ModelDoc {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn variable_count(&self) -> usize {
        self.vars.len()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    fn parent_indices(&self, i: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self.vars[i]
            .parents
            .iter()
            .map(|p| self.var_index(p).expect("parents resolved at parse"))
            .collect();
        idx.sort_unstable();
        idx
    }

    fn parent_scope(&self, i: usize) -> Vec<Var> {
        self.parent_indices(i)
            .iter()
            .map(|&p| Var::new(p, self.vars[p].cardinality))
            .collect()
    }

    /// Row index of a raw key in the canonical (sorted-parent, mixed-radix)
    /// order; `None` when the key does not cover the parent set exactly.
    fn row_cell(&self, i: usize, key: &[(String, usize)]) -> Option<usize> {
        let parent_idx = self.parent_indices(i);
        if key.len() != parent_idx.len() {
            return None;
        }
        let scope = self.parent_scope(i);
        let mut values = vec![usize::MAX; scope.len()];
        for (name, value) in key {
            let idx = self.var_index(name)?;
            let pos = parent_idx.iter().position(|&p| p == idx)?;
            if values[pos] != usize::MAX || *value >= scope[pos].cardinality {
                return None;
            }
            values[pos] = *value;
        }
        Some(encode_cell(&scope, &values))
    }

    /// Checks every model invariant the raw document can violate and lists
    /// all findings; an empty report means [`ModelDoc::build`] will succeed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, var) in self.vars.iter().enumerate() {
            if var.cardinality == 0 {
                out.push(Violation::Cardinality {
                    variable: i,
                    detail: "alphabet is empty".into(),
                });
                continue;
            }
            let scope = self.parent_scope(i);
            let expected_rows = match scope_cells(&scope) {
                Ok(cells) => cells,
                Err(_) => {
                    out.push(Violation::Cardinality {
                        variable: i,
                        detail: "parent scope exceeds the table size limit".into(),
                    });
                    continue;
                }
            };
            let noise_card = match (self.kind, &self.noise[i]) {
                (ModelKind::Functional, Some(probs)) => {
                    let sum: f64 = probs.iter().sum();
                    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                        out.push(Violation::Cardinality {
                            variable: i,
                            detail: "noise entries must be finite and nonnegative".into(),
                        });
                    } else if (sum - 1.0).abs() > 1e-12 {
                        out.push(Violation::Normalization {
                            variable: i,
                            row: 0,
                            sum,
                        });
                    }
                    probs.len()
                }
                (ModelKind::Functional, None) => {
                    out.push(Violation::Cardinality {
                        variable: i,
                        detail: "missing noise declaration".into(),
                    });
                    continue;
                }
                (ModelKind::Cpt, _) => 0,
            };
            let rows = &self.rows[i];
            let mut seen = vec![false; expected_rows];
            for row in rows {
                let Some(cell) = self.row_cell(i, &row.key) else {
                    out.push(Violation::Scope {
                        variable: i,
                        expected: self.parent_indices(i),
                        found: row
                            .key
                            .iter()
                            .filter_map(|(n, _)| self.var_index(n))
                            .collect(),
                    });
                    continue;
                };
                if seen[cell] {
                    out.push(Violation::RowCount {
                        variable: i,
                        expected: expected_rows,
                        found: rows.len(),
                    });
                    continue;
                }
                seen[cell] = true;
                match self.kind {
                    ModelKind::Cpt => {
                        if row.probs.len() != var.cardinality {
                            out.push(Violation::Cardinality {
                                variable: i,
                                detail: format!(
                                    "row at line {} has {} entries for a {}-symbol alphabet",
                                    row.line,
                                    row.probs.len(),
                                    var.cardinality
                                ),
                            });
                            continue;
                        }
                        if row.probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                            out.push(Violation::Cardinality {
                                variable: i,
                                detail: format!(
                                    "row at line {} has a negative or non-finite entry",
                                    row.line
                                ),
                            });
                            continue;
                        }
                        let sum: f64 = row.probs.iter().sum();
                        if (sum - 1.0).abs() > 1e-12 {
                            out.push(Violation::Normalization {
                                variable: i,
                                row: cell,
                                sum,
                            });
                        }
                    }
                    ModelKind::Functional => {
                        if row.symbols.len() != noise_card {
                            out.push(Violation::FunctionLength {
                                variable: i,
                                expected: noise_card,
                                found: row.symbols.len(),
                            });
                            continue;
                        }
                        for (entry, &value) in row.symbols.iter().enumerate() {
                            if value >= var.cardinality {
                                out.push(Violation::FunctionRange {
                                    variable: i,
                                    entry: cell * noise_card + entry,
                                    value,
                                });
                            }
                        }
                    }
                }
            }
            let found = seen.iter().filter(|&&s| s).count();
            if found != expected_rows {
                out.push(Violation::RowCount {
                    variable: i,
                    expected: expected_rows,
                    found,
                });
            }
        }
        out
    }

    /// Builds the typed model; all violations are reported at once.
    pub fn build(&self) -> Result<LoadedModel> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidModel { violations });
        }
        let parents: Vec<Vec<usize>> = (0..self.vars.len())
            .map(|i| self.parent_indices(i))
            .collect();
        let labels: Vec<String> = self.vars.iter().map(|v| v.name.clone()).collect();
        let dag = Dag::with_labels(parents, labels)?;
        let cards: Vec<usize> = self.vars.iter().map(|v| v.cardinality).collect();

        let model = match self.kind {
            ModelKind::Cpt => {
                let mut cpts = Vec::with_capacity(self.vars.len());
                for (i, &card) in cards.iter().enumerate() {
                    let scope = self.parent_scope(i);
                    let cells = scope_cells(&scope)?;
                    let mut dense: Vec<Vec<f64>> = vec![Vec::new(); cells];
                    for row in &self.rows[i] {
                        let cell = self.row_cell(i, &row.key).expect("validated");
                        dense[cell] = row.probs.clone();
                    }
                    cpts.push(Kernel::from_rows(scope, vec![Var::new(i, card)], dense)?);
                }
                Model::Cpt(CptModel::new(dag, cards, cpts)?)
            }
            ModelKind::Functional => {
                let mut noise = Vec::with_capacity(self.vars.len());
                let mut functions = Vec::with_capacity(self.vars.len());
                for i in 0..self.vars.len() {
                    let probs = self.noise[i].clone().expect("validated");
                    let noise_card = probs.len();
                    noise.push(JointTable::new(vec![Var::new(i, noise_card)], probs)?);
                    let scope = self.parent_scope(i);
                    let cells = scope_cells(&scope)?;
                    let mut table = vec![0usize; cells * noise_card];
                    for row in &self.rows[i] {
                        let cell = self.row_cell(i, &row.key).expect("validated");
                        table[cell * noise_card..(cell + 1) * noise_card]
                            .copy_from_slice(&row.symbols);
                    }
                    functions.push(table);
                }
                Model::Functional(FunctionalModel::new(dag, cards, noise, functions)?)
            }
        };
        Ok(LoadedModel {
            name: self.name.clone(),
            model,
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a document without semantic validation; syntax and name-resolution
/// problems are hard errors with line numbers.
pub fn parse(text: &str) -> Result<ModelDoc> {
    // (line number, content) with comments and blanks stripped.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(k, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim_end();
            (k + 1, content)
        })
        .filter(|(_, content)| !content.trim().is_empty())
        .collect();
    let mut pos = 0;

    let (ln, first) = *lines.get(pos).ok_or_else(|| parse_err(1, "empty file"))?;
    let name = first
        .trim()
        .strip_prefix("model ")
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| parse_err(ln, "expected `model <name>`"))?
        .to_string();
    pos += 1;

    let (ln, second) = *lines
        .get(pos)
        .ok_or_else(|| parse_err(ln, "expected `kind cpt` or `kind functional`"))?;
    let kind = match second.trim().strip_prefix("kind ").map(str::trim) {
        Some("cpt") => ModelKind::Cpt,
        Some("functional") => ModelKind::Functional,
        _ => return Err(parse_err(ln, "expected `kind cpt` or `kind functional`")),
    };
    pos += 1;

    let mut vars: Vec<VarDecl> = Vec::new();
    while let Some(&(ln, line)) = lines.get(pos) {
        let Some(rest) = line.trim().strip_prefix("var ") else {
            break;
        };
        let mut tokens = rest.split_whitespace();
        let vname = tokens
            .next()
            .filter(|n| is_identifier(n))
            .ok_or_else(|| parse_err(ln, "expected `var <name> <cardinality> [parents ...]`"))?
            .to_string();
        if vars.iter().any(|v| v.name == vname) {
            return Err(parse_err(ln, format!("variable {vname} declared twice")));
        }
        let cardinality: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected a numeric cardinality"))?;
        let mut parents = Vec::new();
        match tokens.next() {
            None => {}
            Some("parents") => {
                for p in tokens {
                    if vars.iter().all(|v| v.name != p) {
                        return Err(parse_err(
                            ln,
                            format!(
                                "parent {p} of {vname} is not declared yet; variables must be \
                                 listed in causal order"
                            ),
                        ));
                    }
                    if parents.iter().any(|q| q == p) {
                        return Err(parse_err(ln, format!("parent {p} repeats")));
                    }
                    parents.push(p.to_string());
                }
                if parents.is_empty() {
                    return Err(parse_err(ln, "`parents` clause lists no names"));
                }
            }
            Some(other) => {
                return Err(parse_err(ln, format!("unexpected token `{other}`")));
            }
        }
        vars.push(VarDecl {
            name: vname,
            cardinality,
            parents,
        });
        pos += 1;
    }
    if vars.is_empty() {
        return Err(parse_err(
            lines.get(pos).map_or(1, |&(ln, _)| ln),
            "model declares no variables",
        ));
    }

    let n = vars.len();
    let mut doc = ModelDoc {
        name,
        kind,
        vars,
        rows: vec![Vec::new(); n],
        noise: vec![None; n],
    };

    let mut current_block: Option<usize> = None;
    while let Some(&(ln, raw)) = lines.get(pos) {
        let line = raw.trim();
        pos += 1;
        if let Some(rest) = line.strip_prefix("cpt ") {
            if kind != ModelKind::Cpt {
                return Err(parse_err(ln, "`cpt` block in a functional model"));
            }
            current_block = Some(resolve_block_var(&doc, rest.trim(), ln)?);
        } else if let Some(rest) = line.strip_prefix("fn ") {
            if kind != ModelKind::Functional {
                return Err(parse_err(ln, "`fn` block in a cpt model"));
            }
            current_block = Some(resolve_block_var(&doc, rest.trim(), ln)?);
        } else if let Some(rest) = line.strip_prefix("noise ") {
            if kind != ModelKind::Functional {
                return Err(parse_err(ln, "`noise` line in a cpt model"));
            }
            let (vname, values) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(ln, "expected `noise <name> = <probs>`"))?;
            let i = doc
                .var_index(vname.trim())
                .ok_or_else(|| parse_err(ln, format!("unknown variable {}", vname.trim())))?;
            if doc.noise[i].is_some() {
                return Err(parse_err(ln, "duplicate noise declaration"));
            }
            let probs = values
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| parse_err(ln, "bad number")))
                .collect::<Result<Vec<f64>>>()?;
            if probs.is_empty() {
                return Err(parse_err(ln, "noise distribution is empty"));
            }
            doc.noise[i] = Some(probs);
            current_block = None;
        } else if line.starts_with('(') {
            let Some(block) = current_block else {
                return Err(parse_err(ln, "row outside of a cpt/fn block"));
            };
            let (key, values) = parse_row(&doc, line, ln)?;
            let row = match kind {
                ModelKind::Cpt => RawRow {
                    key,
                    probs: values
                        .split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|_| parse_err(ln, "bad number")))
                        .collect::<Result<Vec<f64>>>()?,
                    symbols: Vec::new(),
                    line: ln,
                },
                ModelKind::Functional => RawRow {
                    key,
                    probs: Vec::new(),
                    symbols: values
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, "bad symbol")))
                        .collect::<Result<Vec<usize>>>()?,
                    line: ln,
                },
            };
            doc.rows[block].push(row);
        } else {
            return Err(parse_err(ln, format!("unexpected line `{line}`")));
        }
    }
    Ok(doc)
}

fn resolve_block_var(doc: &ModelDoc, name: &str, line: usize) -> Result<usize> {
    let i = doc
        .var_index(name)
        .ok_or_else(|| parse_err(line, format!("unknown variable {name}")))?;
    if !doc.rows[i].is_empty() {
        return Err(parse_err(line, format!("duplicate block for {name}")));
    }
    Ok(i)
}

/// Splits `(<Name>=<v>, ...) = <values>` into the assignment key and the
/// value text.
fn parse_row<'a>(
    doc: &ModelDoc,
    line: &'a str,
    ln: usize,
) -> Result<(Vec<(String, usize)>, &'a str)> {
    let close = line
        .find(')')
        .ok_or_else(|| parse_err(ln, "row key is missing `)`"))?;
    let key_text = &line[1..close];
    let rest = line[close + 1..].trim_start();
    let values = rest
        .strip_prefix('=')
        .ok_or_else(|| parse_err(ln, "expected `=` after the row key"))?;
    let mut key = Vec::new();
    for part in key_text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| parse_err(ln, format!("bad assignment `{part}`")))?;
        let name = name.trim();
        if doc.var_index(name).is_none() {
            return Err(parse_err(ln, format!("unknown variable {name}")));
        }
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| parse_err(ln, format!("bad value in `{part}`")))?;
        key.push((name.to_string(), value));
    }
    Ok((key, values))
}

/// Parses, validates, and builds in one step.
pub fn load_str(text: &str) -> Result<LoadedModel> {
    parse(text)?.build()
}

pub fn load_path(path: impl AsRef<Path>) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.as_ref().display()),
    })?;
    load_str(&text)
}

/// Canonical serialization; loading the output reproduces the model, and
/// serializing a loaded canonical file reproduces its bytes.
pub fn serialize(loaded: &LoadedModel) -> String {
    let dag = loaded.model.dag();
    let cards = loaded.model.cardinalities();
    let kind = match loaded.model.kind() {
        ModelKind::Cpt => "cpt",
        ModelKind::Functional => "functional",
    };
    let mut out = format!("model {}\nkind {kind}\n\n", loaded.name);
    for (i, &card) in cards.iter().enumerate() {
        out.push_str(&format!("var {} {card}", dag.label(i)));
        if !dag.parents(i).is_empty() {
            out.push_str(" parents");
            for &p in dag.parents(i) {
                out.push_str(&format!(" {}", dag.label(p)));
            }
        }
        out.push('\n');
    }
    out.push('\n');

    let row_key = |i: usize, cell: usize| -> String {
        let scope: Vec<Var> = dag
            .parents(i)
            .iter()
            .map(|&p| Var::new(p, cards[p]))
            .collect();
        let mut values = vec![0usize; scope.len()];
        decode_cell(&scope, cell, &mut values);
        let inner = scope
            .iter()
            .zip(&values)
            .map(|(v, &val)| format!("{}={val}", dag.label(v.index)))
            .collect::<Vec<_>>()
            .join(", ");
        format!("({inner})")
    };

    match &loaded.model {
        Model::Cpt(model) => {
            for i in 0..dag.vertex_count() {
                out.push_str(&format!("cpt {}\n", dag.label(i)));
                let cpt = model.cpt(i);
                for cell in 0..cpt.row_count() {
                    let row = cpt.row_by_index(cell).expect("CPT rows are defined");
                    let probs = row
                        .probs()
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.push_str(&format!("  {} = {probs}\n", row_key(i, cell)));
                }
            }
        }
        Model::Functional(model) => {
            for i in 0..dag.vertex_count() {
                let noise = model.noise(i);
                let probs = noise
                    .probs()
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!("noise {} = {probs}\n", dag.label(i)));
                out.push_str(&format!("fn {}\n", dag.label(i)));
                let noise_card = noise.probs().len();
                let cells = model.functions()[i].len() / noise_card;
                for cell in 0..cells {
                    let symbols = model.functions()[i][cell * noise_card..(cell + 1) * noise_card]
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.push_str(&format!("  {} = {symbols}\n", row_key(i, cell)));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str =
        "model chain\nkind cpt\n\nvar X 2\nvar Y 2 parents X\nvar Z 2 parents Y\n\n\
        cpt X\n  () = 0.35 0.65\ncpt Y\n  (X=0) = 0.8 0.2\n  (X=1) = 0.3 0.7\n\
        cpt Z\n  (Y=0) = 0.6 0.4\n  (Y=1) = 0.15 0.85\n";

    const XOR: &str = "model xor\nkind functional\n\nvar X 2\nvar Y 2 parents X\n\n\
        noise X = 0.5 0.5\nfn X\n  () = 0 1\nnoise Y = 0.9 0.1\nfn Y\n  (X=0) = 0 1\n  (X=1) = 1 0\n";

    #[test]
    fn parses_and_builds_a_cpt_model() {
        let loaded = load_str(CHAIN).unwrap();
        assert_eq!(loaded.name, "chain");
        let model = loaded.model.to_cpt().unwrap();
        assert_eq!(model.dag().label(1), "Y");
        assert!((model.cpt(1).row(&[1]).unwrap().prob_of(&[0]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn parses_and_builds_a_functional_model() {
        let loaded = load_str(XOR).unwrap();
        let Model::Functional(fm) = &loaded.model else {
            panic!("expected functional model");
        };
        assert_eq!(fm.noise(1).probs(), &[0.9, 0.1]);
        let cpt = fm.to_cpt_model().unwrap();
        assert!((cpt.cpt(1).row(&[0]).unwrap().prob_of(&[1]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn round_trips_canonically() {
        for text in [CHAIN, XOR] {
            let loaded = load_str(text).unwrap();
            assert_eq!(serialize(&loaded), text);
            let again = load_str(&serialize(&loaded)).unwrap();
            assert_eq!(again, loaded);
        }
    }

    #[test]
    fn rows_may_come_in_any_key_order() {
        let shuffled = "model chain\nkind cpt\n\nvar X 2\nvar Y 2 parents X\n\n\
            cpt Y\n  (X=1) = 0.3 0.7\n  (X=0) = 0.8 0.2\ncpt X\n  () = 0.35 0.65\n";
        let loaded = load_str(shuffled).unwrap();
        let model = loaded.model.to_cpt().unwrap();
        assert!((model.cpt(1).row(&[0]).unwrap().prob_of(&[0]) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn forward_parent_references_are_rejected() {
        let bad = "model m\nkind cpt\n\nvar X 2 parents Y\nvar Y 2\n";
        let err = load_str(bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn validation_reports_denormalized_rows() {
        let bad = "model m\nkind cpt\n\nvar X 2\n\ncpt X\n  () = 0.5 0.4\n";
        let doc = parse(bad).unwrap();
        let violations = doc.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Normalization { variable: 0, .. })));
        assert!(matches!(doc.build(), Err(Error::InvalidModel { .. })));
    }

    #[test]
    fn validation_reports_missing_rows() {
        let bad = "model m\nkind cpt\n\nvar X 2\nvar Y 2 parents X\n\n\
            cpt X\n  () = 0.5 0.5\ncpt Y\n  (X=0) = 0.5 0.5\n";
        let violations = parse(bad).unwrap().validate();
        assert!(violations.iter().any(|v| matches!(
            v,
            Violation::RowCount {
                variable: 1,
                expected: 2,
                found: 1
            }
        )));
    }

    #[test]
    fn validation_reports_function_range() {
        let bad = "model m\nkind functional\n\nvar X 2\n\nnoise X = 1\nfn X\n  () = 7\n";
        let violations = parse(bad).unwrap().validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::FunctionRange { value: 7, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a model\nmodel c  # trailing\nkind cpt\n\n\nvar X 2\n\ncpt X\n  () = 1 0\n";
        let loaded = load_str(text).unwrap();
        assert_eq!(loaded.name, "c");
    }
}
