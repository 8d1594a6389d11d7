//! Python bindings: graphs, patterns, the exact solver, invariants and the
//! absorbing pipeline. Reports cross the boundary as JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use core_lib::exact::{find_factor_exact as exact, greedy_max_tiling as greedy, FactorOutcome};
use core_lib::generate;
use core_lib::harness::verify_certificate as verify_cert;
use core_lib::invariants::{self, AlphaStarMode};
use core_lib::pipeline::{self, Mode, PipelineConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph", module = "tilinglab_py", frozen)]
pub struct PyGraph {
    inner: core_lib::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = core_lib::Graph::from_edges(n, edges).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    /// Parses the `n m` header plus one `u v` line per edge.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: core_lib::Graph::parse(text).map_err(value_err)? })
    }

    #[staticmethod]
    fn gnp(n: usize, p: f64, seed: u64) -> PyResult<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(PyValueError::new_err(format!("p = {p} outside [0, 1]")));
        }
        Ok(PyGraph { inner: generate::gnp(n, p, seed) })
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        PyGraph { inner: core_lib::Graph::complete(n) }
    }

    #[staticmethod]
    fn multipartite(sizes: Vec<usize>) -> PyResult<Self> {
        Ok(PyGraph { inner: generate::complete_multipartite(&sizes).map_err(value_err)? })
    }

    #[staticmethod]
    fn two_cliques(n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: generate::two_cliques(n).map_err(value_err)? })
    }

    #[staticmethod]
    fn lower_bound(r: usize, ell: usize, n: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: generate::lower_bound_construction(r, ell, n, seed).map_err(value_err)?.graph })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    fn min_degree(&self) -> PyResult<usize> {
        invariants::min_degree(&self.inner).map_err(value_err)
    }

    fn max_clique(&self) -> usize {
        invariants::max_clique(&self.inner)
    }

    /// `(value, exact)`; `value` is a lower bound when `exact` is false.
    #[pyo3(signature = (ell, budget = invariants::DEFAULT_ALPHA_BUDGET))]
    fn alpha_ell(&self, ell: usize, budget: u64) -> PyResult<(usize, bool)> {
        let a = invariants::alpha_ell(&self.inner, ell, budget).map_err(value_err)?;
        Ok((a.value, a.exact))
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyclass(name = "Pattern", module = "tilinglab_py", frozen)]
pub struct PyPattern {
    inner: core_lib::Pattern,
}

#[pymethods]
impl PyPattern {
    #[staticmethod]
    fn clique(r: usize) -> PyResult<Self> {
        Ok(PyPattern { inner: core_lib::Pattern::clique(r).map_err(value_err)? })
    }

    /// `K<r>` or an edge-list document.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        Ok(PyPattern { inner: core_lib::Pattern::parse_spec(spec).map_err(value_err)? })
    }

    #[getter]
    fn h(&self) -> usize {
        self.inner.h()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    fn is_clique(&self) -> bool {
        self.inner.is_clique()
    }

    /// `d(H)` as `(numerator, denominator)`.
    fn density(&self) -> (usize, usize) {
        let d = invariants::d_h(&self.inner);
        (*d.numer(), *d.denom())
    }

    fn __repr__(&self) -> String {
        format!("Pattern({})", self.inner.name())
    }
}

/// An H-factor as a list of vertex lists, `None` when none exists. Raises
/// `RuntimeError` when the node budget runs out.
#[pyfunction]
#[pyo3(signature = (graph, pattern, budget = core_lib::exact::DEFAULT_FACTOR_BUDGET))]
fn find_factor_exact(
    py: Python<'_>,
    graph: &PyGraph,
    pattern: &PyPattern,
    budget: u64,
) -> PyResult<Option<Vec<Vec<usize>>>> {
    let search = py.detach(|| exact(&graph.inner, &pattern.inner, budget));
    match search.outcome {
        FactorOutcome::Factor { tiling } => Ok(Some(tiling.into_copies())),
        FactorOutcome::NoFactor => Ok(None),
        FactorOutcome::BudgetExhausted => {
            Err(PyRuntimeError::new_err(format!("budget of {budget} nodes exhausted after {} nodes", search.nodes)))
        }
    }
}

/// `(tiling, leftover)` of a seeded maximal tiling.
#[pyfunction]
#[pyo3(signature = (graph, pattern, seed = 0))]
fn greedy_max_tiling(graph: &PyGraph, pattern: &PyPattern, seed: u64) -> (Vec<Vec<usize>>, Vec<usize>) {
    let g = greedy(&graph.inner, &pattern.inner, &core_lib::VertexSet::default(), seed);
    (g.tiling.into_copies(), g.leftover.into_vec())
}

/// Raises `ValueError` naming the violated invariant.
#[pyfunction]
fn verify_factor(graph: &PyGraph, pattern: &PyPattern, tiling: Vec<Vec<usize>>) -> PyResult<()> {
    let t = core_lib::Tiling::new(tiling);
    core_lib::verify_factor(&graph.inner, &pattern.inner, &t, &core_lib::VertexSet::all(graph.inner.n()))
        .map_err(value_err)
}

/// Smallest passing probe size, or `None` for the infinity sentinel.
#[pyfunction]
#[pyo3(signature = (graph, pattern, trials = 500, seed = 0, exhaustive = false))]
fn alpha_star(
    py: Python<'_>,
    graph: &PyGraph,
    pattern: &PyPattern,
    trials: usize,
    seed: u64,
    exhaustive: bool,
) -> PyResult<Option<usize>> {
    let mode = if exhaustive {
        AlphaStarMode::Exhaustive { cap: invariants::DEFAULT_FAMILY_CAP }
    } else {
        AlphaStarMode::Sampled { trials, seed }
    };
    let est = py.detach(|| invariants::alpha_star_upper(&graph.inner, &pattern.inner, mode)).map_err(value_err)?;
    Ok(est.value)
}

/// Runs the absorbing pipeline with desk defaults and returns the report as
/// JSON text.
#[pyfunction]
#[pyo3(signature = (graph, pattern, mode = "clique", ell = 2, seed = 0))]
fn find_factor_absorbing(
    py: Python<'_>,
    graph: &PyGraph,
    pattern: &PyPattern,
    mode: &str,
    ell: usize,
    seed: u64,
) -> PyResult<String> {
    let mode = match mode {
        "general" => Mode::General,
        "clique" => Mode::Clique { r: pattern.inner.h(), ell },
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let config = PipelineConfig::desk(&pattern.inner, mode).map_err(value_err)?;
    let report = py
        .detach(|| pipeline::find_factor_absorbing(&graph.inner, &pattern.inner, &config, seed))
        .map_err(value_err)?;
    Ok(report.to_json())
}

/// Checks any certificate document; returns the one-line summary.
#[pyfunction]
#[pyo3(signature = (graph, text, pattern = None))]
fn verify_certificate(graph: &PyGraph, text: &str, pattern: Option<&PyPattern>) -> PyResult<String> {
    verify_cert(&graph.inner, text, pattern.map(|p| &p.inner)).map_err(value_err)
}

#[pymodule]
fn tilinglab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPattern>()?;
    m.add_function(wrap_pyfunction!(find_factor_exact, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_max_tiling, m)?)?;
    m.add_function(wrap_pyfunction!(verify_factor, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_star, m)?)?;
    m.add_function(wrap_pyfunction!(find_factor_absorbing, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    Ok(())
}
