//! Python bindings: `import sncsurf_py`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sncsurf::birational::{fiber_multiplicities, is_valid_fiber};
use sncsurf::divisor::{self, BarkKind};
use sncsurf::lattice::{run_program, BlowupProgram};
use sncsurf::linalg::Rational;
use sncsurf::report::Report;
use sncsurf::verify;

fn err(e: sncsurf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.numer().clone(), r.denom().clone()))
}

/// Weighted dual graph of an snc divisor.
#[pyclass(name = "DualGraph", module = "sncsurf_py", from_py_object)]
#[derive(Clone)]
struct PyDualGraph {
    inner: sncsurf::DualGraph,
}

#[pymethods]
impl PyDualGraph {
    /// `DualGraph([("B", -1), ("T1", -2)], [("B", "T1")])`
    #[new]
    #[pyo3(signature = (vertices=Vec::new(), edges=Vec::new()))]
    fn new(vertices: Vec<(String, i64)>, edges: Vec<(String, String)>) -> PyResult<Self> {
        let inner = sncsurf::DualGraph::from_parts(&vertices, &edges).map_err(err)?;
        Ok(PyDualGraph { inner })
    }

    /// Parses the `vertex`/`edge` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyDualGraph { inner: sncsurf::DualGraph::parse(text).map_err(err)? })
    }

    /// A chain `prefix1 - prefix2 - ...` with the given self-intersections.
    #[staticmethod]
    fn chain(prefix: &str, weights: Vec<i64>) -> Self {
        PyDualGraph { inner: sncsurf::DualGraph::chain_from_weights(prefix, &weights) }
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn weights(&self) -> Vec<i64> {
        self.inner.weights().to_vec()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges()
    }

    fn intersection_matrix(&self) -> Vec<Vec<BigInt>> {
        let m = self.inner.intersection_matrix();
        (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    fn canonical_form(&self) -> String {
        self.inner.canonical_form()
    }

    fn dot(&self) -> String {
        self.inner.emit_dot()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("DualGraph({})", self.inner.canonical_form())
    }
}

/// `d = det(-Q)` of the graph, or of the listed vertices.
#[pyfunction]
#[pyo3(signature = (g, support=None))]
fn discriminant(g: &PyDualGraph, support: Option<Vec<String>>) -> PyResult<BigInt> {
    match support {
        Some(s) => divisor::discriminant(&g.inner, &s).map_err(err),
        None => Ok(divisor::discriminant_graph(&g.inner)),
    }
}

/// Bark coefficients as `{id: Fraction}`; `kind` is "auto", "whole" or "twigs".
#[pyfunction]
#[pyo3(signature = (g, kind="auto"))]
fn bark<'py>(py: Python<'py>, g: &PyDualGraph, kind: &str) -> PyResult<Bound<'py, PyDict>> {
    let kind = match kind {
        "auto" => BarkKind::Auto,
        "whole" => BarkKind::WholeComponent,
        "twigs" => BarkKind::Twigs,
        other => return Err(PyValueError::new_err(format!("unknown bark kind `{other}`"))),
    };
    let bk = divisor::bark(&g.inner, kind).map_err(err)?;
    let out = PyDict::new(py);
    for id in g.inner.ids() {
        out.set_item(id, fraction(py, &bk.coefficient(id))?)?;
    }
    Ok(out)
}

/// Boundary type as a string: "negative-definite", "X", "H", "Y(a,b,c)" or "other".
#[pyfunction]
fn classify(g: &PyDualGraph) -> PyResult<String> {
    Ok(divisor::classify_boundary(&g.inner).map_err(err)?.to_string())
}

/// `(valid, contracted vertices in order)`.
#[pyfunction]
fn fiber_check(g: &PyDualGraph) -> (bool, Vec<String>) {
    let c = is_valid_fiber(&g.inner);
    (c.valid, c.trace.into_iter().map(|s| s.vertex).collect())
}

/// Multiplicities `{id: mu}` of a fiber.
#[pyfunction]
fn multiplicities(g: &PyDualGraph) -> PyResult<Vec<(String, BigInt)>> {
    let f = fiber_multiplicities(&g.inner).map_err(err)?;
    Ok(f.graph.ids().iter().cloned().zip(f.multiplicities).collect())
}

/// Invariant factors of `coker Q` (a `0` per free summand).
#[pyfunction]
fn plumbing_homology(g: &PyDualGraph) -> PyResult<Vec<BigInt>> {
    Ok(divisor::plumbing_homology(&g.inner).map_err(err)?.invariant_factors())
}

/// Runs a blow-up program and returns `{curve: class}` in the basis `H, E1, ...`.
#[pyfunction]
fn run_arrangement(text: &str) -> PyResult<Vec<(String, Vec<i64>)>> {
    let l = run_program(&BlowupProgram::parse(text).map_err(err)?).map_err(err)?;
    l.names().iter().map(|n| Ok((n.clone(), l.class(n).map_err(err)?.clone()))).collect()
}

fn report_dict<'py>(py: Python<'py>, r: &Report) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scenario", &r.scenario)?;
    d.set_item("passed", r.passed())?;
    d.set_item("total", r.checks.len())?;
    let checks: Vec<Bound<'py, PyDict>> = r
        .checks
        .iter()
        .map(|c| {
            let cd = PyDict::new(py);
            cd.set_item("name", &c.name)?;
            cd.set_item("pass", c.pass)?;
            cd.set_item("expected", &c.expected)?;
            cd.set_item("actual", &c.actual)?;
            cd.set_item("ref", &c.anchor)?;
            cd.set_item("origin", c.origin.as_deref())?;
            Ok(cd)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("checks", checks)?;
    Ok(d)
}

/// Runs a bundled verification ("cases", "y244", "y333") and returns its report.
#[pyfunction]
fn run_verification<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
    if !verify::RUNS.contains(&name) {
        return Err(PyKeyError::new_err(name.to_string()));
    }
    report_dict(py, &verify::run_named(name).map_err(err)?)
}

#[pymodule]
fn sncsurf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDualGraph>()?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(bark, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_check, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicities, m)?)?;
    m.add_function(wrap_pyfunction!(plumbing_homology, m)?)?;
    m.add_function(wrap_pyfunction!(run_arrangement, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    m.add("RUNS", verify::RUNS.to_vec())?;
    Ok(())
}
