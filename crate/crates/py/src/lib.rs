//! Python bindings: thin name-based wrappers over the core types.

use pyo3::prelude::*;

mod wrappers;

use wrappers::{PyCptModel, PyDag, PyFunctionalModel, PyJointTable};

#[pymodule]
fn causal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDag>()?;
    m.add_class::<PyJointTable>()?;
    m.add_class::<PyCptModel>()?;
    m.add_class::<PyFunctionalModel>()?;
    m.add_function(wrap_pyfunction!(wrappers::load_model, m)?)?;
    Ok(())
}
