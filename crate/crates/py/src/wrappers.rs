//! The exported classes. Python callers address variables by name; every
//! wrapper resolves names against the model's labels and defers to the core
//! crate.

use std::collections::HashMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use causal_core::distribution::decode_cell;
use causal_core::format::{self, Model};
use causal_core::information::CanonicalKind;
use causal_core::{
    CptModel, Dag, Error, FunctionalModel, InfoValue, InterventionSpec, JointTable, VertexSet,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn info_to_f64(v: InfoValue) -> f64 {
    match v {
        InfoValue::Finite(bits) => bits,
        InfoValue::Infinite => f64::INFINITY,
    }
}

fn resolve_var(dag: &Dag, name: &str) -> PyResult<usize> {
    dag.index_of_label(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name}")))
}

fn resolve_set(dag: &Dag, names: &[String]) -> PyResult<VertexSet> {
    names
        .iter()
        .map(|n| resolve_var(dag, n))
        .collect::<PyResult<_>>()
}

fn resolve_pairs(dag: &Dag, map: &HashMap<String, usize>) -> PyResult<Vec<(usize, usize)>> {
    let mut pairs: Vec<(usize, usize)> = map
        .iter()
        .map(|(name, &value)| Ok((resolve_var(dag, name)?, value)))
        .collect::<PyResult<_>>()?;
    pairs.sort_unstable();
    Ok(pairs)
}

/// A directed acyclic graph with display labels.
#[pyclass(name = "Dag", frozen)]
pub struct PyDag {
    pub(crate) inner: Dag,
}

#[pymethods]
impl PyDag {
    #[new]
    #[pyo3(signature = (parents, labels=None))]
    fn new(parents: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match labels {
            Some(labels) => Dag::with_labels(parents, labels),
            None => Dag::new(parents),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.vertex_count()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn parents(&self, name: &str) -> PyResult<Vec<String>> {
        let v = resolve_var(&self.inner, name)?;
        Ok(self
            .inner
            .parents(v)
            .iter()
            .map(|&p| self.inner.label(p).to_string())
            .collect())
    }

    fn descendants(&self, names: Vec<String>) -> PyResult<Vec<String>> {
        let s = resolve_set(&self.inner, &names)?;
        let d = self.inner.descendants_of(&s).map_err(err)?;
        Ok(d.iter().map(|v| self.inner.label(v).to_string()).collect())
    }

    fn ancestors(&self, names: Vec<String>) -> PyResult<Vec<String>> {
        let s = resolve_set(&self.inner, &names)?;
        let d = self.inner.ancestors_of(&s).map_err(err)?;
        Ok(d.iter().map(|v| self.inner.label(v).to_string()).collect())
    }

    fn nondescendants(&self, names: Vec<String>) -> PyResult<Vec<String>> {
        let s = resolve_set(&self.inner, &names)?;
        let d = self.inner.nondescendants_of(&s).map_err(err)?;
        Ok(d.iter().map(|v| self.inner.label(v).to_string()).collect())
    }

    fn d_separated(&self, a: Vec<String>, b: Vec<String>, z: Vec<String>) -> PyResult<bool> {
        let a = resolve_set(&self.inner, &a)?;
        let b = resolve_set(&self.inner, &b)?;
        let z = resolve_set(&self.inner, &z)?;
        self.inner.d_separated(&a, &b, &z).map_err(err)
    }

    fn to_dot(&self) -> PyResult<String> {
        self.inner.to_dot(&VertexSet::empty(), &[]).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Dag({} vertices)", self.inner.vertex_count())
    }
}

/// An exact probability table; variables carry their display names.
#[pyclass(name = "JointTable", frozen)]
pub struct PyJointTable {
    inner: JointTable,
    names: Vec<String>,
}

impl PyJointTable {
    fn wrap(inner: JointTable, dag: &Dag) -> Self {
        let names = inner
            .scope()
            .iter()
            .map(|v| dag.label(v.index).to_string())
            .collect();
        Self { inner, names }
    }

    fn name_of(&self, index: usize) -> &str {
        let pos = self
            .inner
            .var_position(index)
            .expect("scope names parallel the scope");
        &self.names[pos]
    }

    fn resolve(&self, name: &str) -> PyResult<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|pos| self.inner.scope()[pos].index)
            .ok_or_else(|| PyValueError::new_err(format!("variable {name} not in scope")))
    }
}

#[pymethods]
impl PyJointTable {
    /// `(name, cardinality)` pairs in scope order.
    fn variables(&self) -> Vec<(String, usize)> {
        self.names
            .iter()
            .cloned()
            .zip(self.inner.scope().iter().map(|v| v.cardinality))
            .collect()
    }

    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    /// `(assignment dict, probability)` per cell, in row-major order.
    fn items(&self) -> Vec<(HashMap<String, usize>, f64)> {
        let scope = self.inner.scope();
        let mut values = vec![0usize; scope.len()];
        self.inner
            .probs()
            .iter()
            .enumerate()
            .map(|(cell, &p)| {
                decode_cell(scope, cell, &mut values);
                let map = self
                    .names
                    .iter()
                    .cloned()
                    .zip(values.iter().copied())
                    .collect();
                (map, p)
            })
            .collect()
    }

    fn prob_of(&self, assignment: HashMap<String, usize>) -> PyResult<f64> {
        let mut values = vec![0usize; self.inner.scope().len()];
        if assignment.len() != values.len() {
            return Err(PyValueError::new_err(
                "assignment must cover the full scope",
            ));
        }
        for (name, &value) in &assignment {
            let idx = self.resolve(name)?;
            let pos = self.inner.var_position(idx).expect("resolved");
            values[pos] = value;
        }
        Ok(self.inner.prob_of(&values))
    }

    fn marginal(&self, names: Vec<String>) -> PyResult<Self> {
        let set: VertexSet = names
            .iter()
            .map(|n| self.resolve(n))
            .collect::<PyResult<_>>()?;
        let inner = self.inner.marginal(&set).map_err(err)?;
        let names = inner
            .scope()
            .iter()
            .map(|v| self.name_of(v.index).to_string())
            .collect();
        Ok(Self { inner, names })
    }

    fn condition(&self, evidence: HashMap<String, usize>) -> PyResult<Self> {
        let pairs: Vec<(usize, usize)> = evidence
            .iter()
            .map(|(name, &value)| Ok((self.resolve(name)?, value)))
            .collect::<PyResult<_>>()?;
        let inner = self.inner.condition(&pairs).map_err(err)?;
        let names = inner
            .scope()
            .iter()
            .map(|v| self.name_of(v.index).to_string())
            .collect();
        Ok(Self { inner, names })
    }

    fn total_variation(&self, other: &PyJointTable) -> PyResult<f64> {
        self.inner.total_variation(&other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("JointTable({})", self.names.join(", "))
    }
}

/// A CPT-based model: a DAG plus one conditional table per variable.
#[pyclass(name = "CptModel", frozen)]
pub struct PyCptModel {
    pub(crate) inner: CptModel,
}

#[pymethods]
impl PyCptModel {
    fn dag(&self) -> PyDag {
        PyDag {
            inner: self.inner.dag().clone(),
        }
    }

    fn variables(&self) -> Vec<(String, usize)> {
        self.inner
            .dag()
            .labels()
            .iter()
            .cloned()
            .zip(self.inner.cardinalities().iter().copied())
            .collect()
    }

    fn joint(&self) -> PyResult<PyJointTable> {
        let table = self.inner.joint().map_err(err)?;
        Ok(PyJointTable::wrap(table, self.inner.dag()))
    }

    fn marginal(&self, names: Vec<String>) -> PyResult<PyJointTable> {
        let t = resolve_set(self.inner.dag(), &names)?;
        let table = self.inner.joint().map_err(err)?.marginal(&t).map_err(err)?;
        Ok(PyJointTable::wrap(table, self.inner.dag()))
    }

    fn condition(&self, evidence: HashMap<String, usize>) -> PyResult<PyJointTable> {
        let pairs = resolve_pairs(self.inner.dag(), &evidence)?;
        let table = self
            .inner
            .joint()
            .map_err(err)?
            .condition(&pairs)
            .map_err(err)?;
        Ok(PyJointTable::wrap(table, self.inner.dag()))
    }

    /// `P(on | do(do), given)`; `on` defaults to every remaining variable.
    #[pyo3(signature = (r#do, on=None, given=None))]
    fn intervene(
        &self,
        r#do: HashMap<String, usize>,
        on: Option<Vec<String>>,
        given: Option<HashMap<String, usize>>,
    ) -> PyResult<PyJointTable> {
        let dag = self.inner.dag();
        let pairs = resolve_pairs(dag, &r#do)?;
        let spec = InterventionSpec::new(pairs).map_err(err)?;
        let evidence = match &given {
            Some(map) => resolve_pairs(dag, map)?,
            None => Vec::new(),
        };
        let t = match on {
            Some(names) => resolve_set(dag, &names)?,
            None => {
                let taken = spec
                    .vars()
                    .union(&evidence.iter().map(|&(v, _)| v).collect());
                (0..dag.vertex_count())
                    .filter(|v| !taken.contains(*v))
                    .collect()
            }
        };
        let table = self
            .inner
            .interventional_conditional(&spec, &evidence, &t)
            .map_err(err)?;
        Ok(PyJointTable::wrap(table, self.inner.dag()))
    }

    /// Directed information `I(X^from -> X^to | X^given)` in bits
    /// (`inf` is possible).
    #[pyo3(signature = (from_, to, given=None))]
    fn directed_information(
        &self,
        from_: Vec<String>,
        to: Vec<String>,
        given: Option<Vec<String>>,
    ) -> PyResult<f64> {
        let dag = self.inner.dag();
        let t = resolve_set(dag, &from_)?;
        let s = resolve_set(dag, &to)?;
        let z = match given {
            Some(names) => resolve_set(dag, &names)?,
            None => VertexSet::empty(),
        };
        let v = self
            .inner
            .conditional_directed_information(&t, &s, &z)
            .map_err(err)?;
        Ok(info_to_f64(v))
    }

    fn mutual_information(&self, a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
        let dag = self.inner.dag();
        let a = resolve_set(dag, &a)?;
        let b = resolve_set(dag, &b)?;
        let joint = self.inner.joint().map_err(err)?;
        Ok(info_to_f64(
            causal_core::mutual_information(&joint, &a, &b).map_err(err)?,
        ))
    }

    /// `(mi_term, cdi_term, total)` of the chain rule.
    fn chain_rule(&self, from_: Vec<String>, to: Vec<String>) -> PyResult<(f64, f64, f64)> {
        let dag = self.inner.dag();
        let t = resolve_set(dag, &from_)?;
        let s = resolve_set(dag, &to)?;
        let d = self.inner.chain_rule_decomposition(&t, &s).map_err(err)?;
        Ok((
            info_to_f64(d.mi_term),
            info_to_f64(d.cdi_term),
            info_to_f64(d.total),
        ))
    }

    /// Certificate dict for a candidate back-door set.
    #[pyo3(signature = (cause, effect, adjust, tolerance=None))]
    fn certify_backdoor(
        &self,
        py: Python<'_>,
        cause: Vec<String>,
        effect: Vec<String>,
        adjust: Vec<String>,
        tolerance: Option<f64>,
    ) -> PyResult<Py<PyAny>> {
        let dag = self.inner.dag();
        let s = resolve_set(dag, &cause)?;
        let t = resolve_set(dag, &effect)?;
        let z = resolve_set(dag, &adjust)?;
        let cert = self
            .inner
            .certify_backdoor_with_tolerance(
                &s,
                &t,
                &z,
                tolerance.unwrap_or(causal_core::CDI_TOLERANCE),
            )
            .map_err(err)?;
        let dict = pyo3::types::PyDict::new(py);
        let names: Vec<String> = cert.z.iter().map(|v| dag.label(v).to_string()).collect();
        dict.set_item("adjust", names)?;
        dict.set_item("graphical_ok", cert.graphical_ok)?;
        dict.set_item("information_ok", cert.information_ok)?;
        dict.set_item("cdi_bits", info_to_f64(cert.cdi_value))?;
        dict.set_item("max_discrepancy", cert.max_discrepancy)?;
        dict.set_item("tolerance", cert.tolerance)?;
        Ok(dict.into_any().unbind())
    }

    #[pyo3(signature = (cause, effect, max_size=4))]
    fn find_backdoor_sets(
        &self,
        cause: Vec<String>,
        effect: Vec<String>,
        max_size: usize,
    ) -> PyResult<Vec<Vec<String>>> {
        let dag = self.inner.dag();
        let s = resolve_set(dag, &cause)?;
        let t = resolve_set(dag, &effect)?;
        let sets = self
            .inner
            .find_backdoor_sets(&s, &t, max_size)
            .map_err(err)?;
        Ok(sets
            .iter()
            .map(|z| z.iter().map(|v| dag.label(v).to_string()).collect())
            .collect())
    }

    fn d_separated(&self, a: Vec<String>, b: Vec<String>, z: Vec<String>) -> PyResult<bool> {
        self.dag().d_separated(a, b, z)
    }

    /// Identity report for a canonical structure: "chain", "fork", or
    /// "collider".
    fn canonical_report(&self, py: Python<'_>, kind: &str) -> PyResult<Py<PyAny>> {
        let kind = CanonicalKind::parse(kind)
            .ok_or_else(|| PyValueError::new_err("kind must be chain, fork, or collider"))?;
        let report = self.inner.canonical_structure_report(kind).map_err(err)?;
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("kind", report.kind.to_string())?;
        for (key, v) in [
            ("I(X->Y)", report.di_x_to_y),
            ("I(Y->X)", report.di_y_to_x),
            ("I(Y->Z)", report.di_y_to_z),
            ("I(Z->Y)", report.di_z_to_y),
            ("I(X->Z)", report.di_x_to_z),
            ("I(Z->X)", report.di_z_to_x),
            ("I(X;Y)", report.mi_xy),
            ("I(Y;Z)", report.mi_yz),
            ("I(X;Z)", report.mi_xz),
        ] {
            dict.set_item(key, info_to_f64(v))?;
        }
        dict.set_item("all_hold", report.all_hold())?;
        Ok(dict.into_any().unbind())
    }

    /// Graphviz DOT text, optionally drawing an intervention as surgery.
    #[pyo3(signature = (r#do=None))]
    fn to_dot(&self, r#do: Option<HashMap<String, usize>>) -> PyResult<String> {
        let dag = self.inner.dag();
        let pairs = match &r#do {
            Some(map) => resolve_pairs(dag, map)?,
            None => Vec::new(),
        };
        let spec = InterventionSpec::new(pairs).map_err(err)?;
        let mut assigned = vec![String::new(); dag.vertex_count()];
        for (v, val) in spec.iter() {
            assigned[v] = val.to_string();
        }
        dag.to_dot(&spec.vars(), &assigned).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CptModel({} variables)", self.inner.vertex_count())
    }
}

/// A structural-equation model with tabulated equations and noise.
#[pyclass(name = "FunctionalModel", frozen)]
pub struct PyFunctionalModel {
    pub(crate) inner: FunctionalModel,
}

#[pymethods]
impl PyFunctionalModel {
    fn dag(&self) -> PyDag {
        PyDag {
            inner: self.inner.dag().clone(),
        }
    }

    fn variables(&self) -> Vec<(String, usize)> {
        self.inner
            .dag()
            .labels()
            .iter()
            .cloned()
            .zip(self.inner.cardinalities().iter().copied())
            .collect()
    }

    fn to_cpt(&self) -> PyResult<PyCptModel> {
        Ok(PyCptModel {
            inner: self.inner.to_cpt_model().map_err(err)?,
        })
    }

    fn sample(&self, seed: u64) -> HashMap<String, usize> {
        let a = self.inner.sample(seed);
        self.inner
            .dag()
            .labels()
            .iter()
            .cloned()
            .zip(a.values().iter().copied())
            .collect()
    }

    fn sample_many(&self, seed: u64, count: usize) -> Vec<HashMap<String, usize>> {
        self.inner
            .sample_many(seed, count)
            .into_iter()
            .map(|a| {
                self.inner
                    .dag()
                    .labels()
                    .iter()
                    .cloned()
                    .zip(a.values().iter().copied())
                    .collect()
            })
            .collect()
    }

    /// Replace the equations of the assigned variables by constants.
    fn surgery(&self, r#do: HashMap<String, usize>) -> PyResult<Self> {
        let pairs = resolve_pairs(self.inner.dag(), &r#do)?;
        let spec = InterventionSpec::new(pairs).map_err(err)?;
        Ok(Self {
            inner: self.inner.surgery(&spec).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("FunctionalModel({} variables)", self.inner.vertex_count())
    }
}

/// Loads a model file; returns a `CptModel` or `FunctionalModel` according
/// to the file's `kind`.
#[pyfunction]
pub fn load_model(py: Python<'_>, path: String) -> PyResult<Py<PyAny>> {
    let loaded = format::load_path(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    match loaded.model {
        Model::Cpt(inner) => Ok(Bound::new(py, PyCptModel { inner })?.into_any().unbind()),
        Model::Functional(inner) => Ok(Bound::new(py, PyFunctionalModel { inner })?
            .into_any()
            .unbind()),
    }
}
