//! Python bindings: lattices, boundary conditions, exact sampling,
//! observables and the experiment runner.

use std::sync::Arc;

use fklab::connectivity::BackendKind;
use fklab::dynamics::{coupling_time, Cftp, HeatBath, UpdateStream};
use fklab::exactref::ExactModel;
use fklab::experiment::{self, ExperimentConfig};
use fklab::lattice::Rect;
use fklab::observables::{bridge_stats, crossing_report, full_config, psi_count};
use fklab::validation::run_suite;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: fklab::Error) -> PyErr {
    match e {
        fklab::Error::NoCoalescence { .. } | fklab::Error::BackendDivergence { .. } | fklab::Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn backend(name: &str) -> PyResult<BackendKind> {
    name.parse().map_err(err)
}

#[pyclass(name = "FkParams", frozen)]
#[derive(Clone, Copy)]
struct PyParams(fklab::FkParams);

#[pymethods]
impl PyParams {
    #[new]
    fn new(p: f64, q: f64) -> PyResult<Self> {
        fklab::FkParams::new(p, q).map(PyParams).map_err(err)
    }

    /// Parameters at the self-dual point for `q`.
    #[staticmethod]
    fn critical(q: f64) -> PyResult<Self> {
        fklab::FkParams::critical(q).map(PyParams).map_err(err)
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q
    }

    #[getter]
    fn p_hat(&self) -> f64 {
        self.0.p_hat()
    }

    fn dual(&self) -> Self {
        PyParams(self.0.dual())
    }

    fn __repr__(&self) -> String {
        format!("FkParams(p={}, q={})", self.0.p, self.0.q)
    }
}

#[pyclass(name = "Lattice", frozen)]
#[derive(Clone)]
struct PyLattice(Arc<fklab::Lattice>);

#[pymethods]
impl PyLattice {
    #[staticmethod]
    fn rectangle(n: usize, n_prime: usize) -> PyResult<Self> {
        fklab::Lattice::rectangle(n, n_prime).map(|l| PyLattice(Arc::new(l))).map_err(err)
    }

    #[staticmethod]
    fn torus(n: usize, n_prime: usize) -> PyResult<Self> {
        fklab::Lattice::torus(n, n_prime).map(|l| PyLattice(Arc::new(l))).map_err(err)
    }

    #[staticmethod]
    fn cylinder(n: usize, n_prime: usize) -> PyResult<Self> {
        fklab::Lattice::cylinder(n, n_prime).map(|l| PyLattice(Arc::new(l))).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn n_prime(&self) -> usize {
        self.0.n_prime()
    }

    #[getter]
    fn num_sites(&self) -> usize {
        self.0.num_sites()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.0.num_edges()
    }

    /// Number of edges carried by the dynamics.
    #[getter]
    fn num_state_edges(&self) -> usize {
        self.0.updatable_edges().len()
    }

    /// Endpoint coordinates of every state edge, in state order.
    fn state_edges(&self) -> Vec<((i64, i64), (i64, i64))> {
        let l = &self.0;
        l.updatable_edges()
            .iter()
            .map(|&e| {
                let [a, b] = l.endpoints(e);
                let (ca, cb) = (l.coord(a), l.coord(b));
                ((ca.x, ca.y), (cb.x, cb.y))
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Lattice({:?}, n={}, n_prime={})", self.0.kind(), self.0.n(), self.0.n_prime())
    }
}

#[pyclass(name = "BoundaryCondition", frozen)]
#[derive(Clone)]
struct PyBoundary(fklab::BoundaryCondition);

#[pymethods]
impl PyBoundary {
    /// Parse `free`, `wired`, `sides:a,b,c,d` or `partition:...`.
    #[new]
    fn new(lattice: &PyLattice, spec: &str) -> PyResult<Self> {
        fklab::BoundaryCondition::parse(&lattice.0, spec).map(PyBoundary).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn classes(&self) -> Vec<Vec<(i64, i64)>> {
        let l = self.0.lattice();
        self.0.classes().iter().map(|c| c.iter().map(|&s| (l.coord(s).x, l.coord(s).y)).collect()).collect()
    }

    fn leq(&self, other: &PyBoundary) -> PyResult<bool> {
        self.0.leq(&other.0).map_err(err)
    }

    fn join(&self, other: &PyBoundary) -> PyResult<Self> {
        self.0.join(&other.0).map(PyBoundary).map_err(err)
    }

    fn distance(&self, other: &PyBoundary) -> PyResult<usize> {
        self.0.distance(&other.0).map_err(err)
    }

    fn spec(&self) -> String {
        self.0.to_spec()
    }

    fn __repr__(&self) -> String {
        format!("BoundaryCondition({:?})", self.0.to_spec())
    }
}

/// A random-cluster measure on a lattice with a boundary condition.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    lattice: Arc<fklab::Lattice>,
    xi: Option<fklab::BoundaryCondition>,
    graph: Arc<fklab::FkGraph>,
    params: fklab::FkParams,
}

impl PyModel {
    fn state(&self, config: Vec<bool>) -> PyResult<fklab::EdgeConfig> {
        if config.len() != self.graph.num_edges() {
            return Err(PyValueError::new_err(format!(
                "configuration has {} entries, expected {}",
                config.len(),
                self.graph.num_edges()
            )));
        }
        Ok(fklab::EdgeConfig::from_fn(config.len(), |i| config[i]))
    }
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (lattice, params, boundary=None))]
    fn new(lattice: &PyLattice, params: &PyParams, boundary: Option<&PyBoundary>) -> PyResult<Self> {
        let xi = boundary.map(|b| b.0.clone());
        let graph = fklab::FkGraph::from_lattice(&lattice.0, xi.as_ref()).map_err(err)?;
        Ok(PyModel { lattice: lattice.0.clone(), xi, graph: Arc::new(graph), params: params.0 })
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    fn cluster_count(&self, config: Vec<bool>) -> PyResult<usize> {
        Ok(self.graph.cluster_count(&self.state(config)?))
    }

    /// Exact sample by coupling from the past; returns the configuration
    /// and the look-back horizon.
    #[pyo3(signature = (seed, replica=0, backend="fast"))]
    fn sample(&self, py: Python<'_>, seed: u64, replica: u64, backend: &str) -> PyResult<(Vec<bool>, u64)> {
        let kind = self::backend(backend)?;
        let m = self.graph.num_edges();
        if m == 0 {
            return Ok((Vec::new(), 0));
        }
        let cftp = Cftp::new(self.graph.clone(), HeatBath::of(self.params), kind);
        let s = py.detach(|| cftp.sample(&UpdateStream::new(seed, replica, m))).map_err(err)?;
        Ok(((0..m).map(|e| s.config.get(e)).collect(), s.horizon))
    }

    /// Time for the chains started all open and all closed to agree, or
    /// `None` if they still differ at `horizon`.
    #[pyo3(signature = (seed, horizon, replica=0))]
    fn coupling_time(&self, py: Python<'_>, seed: u64, horizon: f64, replica: u64) -> Option<f64> {
        let m = self.graph.num_edges();
        if m == 0 {
            return Some(0.0);
        }
        let kernel = HeatBath::of(self.params);
        py.detach(|| coupling_time(&self.graph, kernel, BackendKind::Fast, horizon, &UpdateStream::new(seed, replica, m)))
    }

    /// Probabilities of every configuration, indexed by the bit pattern of
    /// the state edges. Small lattices only.
    fn exact_probs(&self) -> PyResult<Vec<f64>> {
        ExactModel::new(&self.graph, self.params).map(|m| m.probs().to_vec()).map_err(err)
    }

    fn crossings<'py>(&self, py: Python<'py>, config: Vec<bool>) -> PyResult<Bound<'py, PyDict>> {
        let w = full_config(&self.lattice, &self.state(config)?);
        let r = crossing_report(&self.lattice, &w).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("vertical", r.vertical)?;
        d.set_item("horizontal", r.horizontal)?;
        d.set_item("dual_vertical", r.dual_vertical)?;
        d.set_item("dual_horizontal", r.dual_horizontal)?;
        Ok(d)
    }

    /// Clusters restricted to rows `y0..=y1` that touch both of them.
    fn psi(&self, config: Vec<bool>, y0: usize, y1: usize) -> PyResult<usize> {
        let w = full_config(&self.lattice, &self.state(config)?);
        psi_count(&self.lattice, &w, y0, y1).map_err(err)
    }

    /// Bridge counts over each edge of the north side of the rectangle
    /// `[x0, x1] x [y0, y1]`.
    fn bridges(&self, config: Vec<bool>, rect: (usize, usize, usize, usize)) -> PyResult<Vec<usize>> {
        let (x0, x1, y0, y1) = rect;
        let s = bridge_stats(&self.lattice, &self.state(config)?, self.xi.as_ref(), Rect::new(x0, x1, y0, y1))
            .map_err(err)?;
        Ok(s.per_edge)
    }
}

#[pyfunction]
fn p_critical(q: f64) -> f64 {
    fklab::p_critical(q)
}

#[pyfunction]
fn p_dual(p: f64, q: f64) -> f64 {
    fklab::p_dual(p, q)
}

/// Run an experiment described in TOML; returns `(csv, json)` text.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<(String, String)> {
    let c = ExperimentConfig::from_toml(config).map_err(err)?;
    let report = py.detach(|| experiment::run_config(&c)).map_err(err)?;
    let csv = report.csv_bytes().map_err(err)?;
    let json = report.json_bytes().map_err(err)?;
    Ok((String::from_utf8_lossy(&csv).into_owned(), String::from_utf8_lossy(&json).into_owned()))
}

/// The exact-enumeration self checks, as `(name, case, value, passed)`.
#[pyfunction]
#[pyo3(signature = (n=2, seed=0))]
fn validate(py: Python<'_>, n: usize, seed: u64) -> PyResult<Vec<(String, String, f64, bool)>> {
    let checks = py.detach(|| run_suite(n, None, seed)).map_err(err)?;
    Ok(checks.into_iter().map(|c| (c.name, c.case, c.value, c.passed)).collect())
}

#[pymodule]
#[pyo3(name = "fklab")]
pub fn fklab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyBoundary>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(p_critical, m)?)?;
    m.add_function(wrap_pyfunction!(p_dual, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
