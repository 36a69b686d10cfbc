//! Python bindings: hypergraphs, decompositions and the width searches.

use std::collections::BTreeMap;
use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hypertree::decomp::{format_weight, parse_decomposition, serialize_decomposition, weight_to_f64};
use hypertree::invariants::stats;
use hypertree::{self as ht, Error, Status};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Syntax { .. } | Error::InvalidArgument(_) | Error::MalformedDecomposition(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn budget(timeout: Option<f64>) -> PyResult<Option<Duration>> {
    match timeout {
        None => Ok(None),
        Some(s) if s > 0.0 && s.is_finite() => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(PyValueError::new_err(format!("timeout must be positive, got {s}"))),
    }
}

#[pyclass(name = "Hypergraph", frozen)]
struct PyHypergraph {
    inner: ht::Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    /// Builds a hypergraph from `{edge_name: [vertex, ...]}` or a list of pairs.
    #[new]
    #[pyo3(signature = (edges, name = "h"))]
    fn new(edges: Vec<(String, Vec<String>)>, name: &str) -> PyResult<Self> {
        let inner = ht::Hypergraph::from_named_edges(name, &edges).map_err(to_py)?;
        Ok(PyHypergraph { inner })
    }

    /// Parses the `e(a,b), f(b,c).` edge-list format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyHypergraph {
            inner: ht::parse_hypergraph(text).map_err(to_py)?,
        })
    }

    /// Hypergraph of a conjunctive query `ans(X) :- r(X,Y), s(Y,Z).`
    #[staticmethod]
    fn from_query(text: &str) -> PyResult<Self> {
        Ok(PyHypergraph {
            inner: ht::cq_to_hypergraph(text).map_err(to_py)?,
        })
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn edges(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .edges()
            .iter()
            .map(|e| {
                let vs = self.inner.vertex_set_names(&e.vertices).into_iter().map(String::from).collect();
                (e.name.clone(), vs)
            })
            .collect()
    }

    fn is_acyclic(&self) -> bool {
        ht::gyo_acyclic(&self.inner)
    }

    /// Structural invariants as a dict; `vc` is a string, prefixed `>=` when
    /// the search was cut short.
    #[pyo3(signature = (vc_timeout = None))]
    fn stats(&self, vc_timeout: Option<f64>) -> PyResult<BTreeMap<&'static str, String>> {
        let s = stats(&self.inner, budget(vc_timeout)?);
        Ok(BTreeMap::from([
            ("vertices", s.num_vertices.to_string()),
            ("edges", s.num_edges.to_string()),
            ("arity", s.arity.to_string()),
            ("degree", s.degree.to_string()),
            ("bip", s.iwidth.to_string()),
            ("bmip3", s.miwidth3.to_string()),
            ("bmip4", s.miwidth4.to_string()),
            ("vc", s.vc_dim.to_string()),
        ]))
    }

    fn __str__(&self) -> String {
        ht::serialize_hypergraph(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph(vertices={}, edges={})", self.inner.num_vertices(), self.inner.num_edges())
    }
}

#[pyclass(name = "Decomposition", frozen)]
struct PyDecomposition {
    inner: ht::Decomposition,
    h: ht::Hypergraph,
}

#[pymethods]
impl PyDecomposition {
    #[staticmethod]
    fn parse(h: &PyHypergraph, text: &str) -> PyResult<Self> {
        let inner = parse_decomposition(&h.inner, text).map_err(to_py)?;
        Ok(PyDecomposition { inner, h: h.inner.clone() })
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    #[getter]
    fn width(&self) -> PyResult<f64> {
        Ok(weight_to_f64(&self.inner.width().map_err(to_py)?))
    }

    fn width_str(&self) -> PyResult<String> {
        Ok(format_weight(&self.inner.width().map_err(to_py)?))
    }

    fn bags(&self) -> Vec<Vec<String>> {
        self.inner
            .nodes
            .iter()
            .map(|n| self.h.vertex_set_names(&n.bag).into_iter().map(String::from).collect())
            .collect()
    }

    /// Violated conditions for this decomposition's kind; empty when valid.
    fn violations(&self) -> Vec<String> {
        match ht::check(&self.h, &self.inner) {
            Ok(()) => Vec::new(),
            Err(v) => v.iter().map(|x| x.to_string()).collect(),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.nodes.len()
    }

    fn __str__(&self) -> String {
        serialize_decomposition(&self.h, &self.inner)
    }
}

/// Status label and witness (None unless the answer is YES).
type Answer = (String, Option<PyDecomposition>);

fn answer(h: &ht::Hypergraph, out: ht::RunOutcome) -> Answer {
    let label = out.status.label().to_string();
    let witness = match out.status {
        Status::Yes(d) => Some(PyDecomposition { inner: d, h: h.clone() }),
        _ => None,
    };
    (label, witness)
}

/// Is hw(h) <= k?
#[pyfunction]
#[pyo3(signature = (h, k, timeout = None, seed = None))]
fn decide_hw(py: Python<'_>, h: &PyHypergraph, k: usize, timeout: Option<f64>, seed: Option<u64>) -> PyResult<Answer> {
    let opts = ht::HdOptions {
        timeout: budget(timeout)?,
        seed,
        ..Default::default()
    };
    let out = py.detach(|| ht::decide_hw(&h.inner, k, &opts)).map_err(to_py)?;
    Ok(answer(&h.inner, out))
}

/// (lower, upper) bounds on hw from k = 1 up to `k_max`; upper is None when
/// no k answered yes.
#[pyfunction]
#[pyo3(signature = (h, k_max, timeout = None))]
fn compute_hw(py: Python<'_>, h: &PyHypergraph, k_max: usize, timeout: Option<f64>) -> PyResult<(usize, Option<usize>)> {
    let opts = ht::HdOptions {
        timeout: budget(timeout)?,
        ..Default::default()
    };
    let b = py.detach(|| ht::compute_hw(&h.inner, k_max, &opts)).map_err(to_py)?;
    Ok((b.lower, b.upper))
}

/// Is ghw(h) <= k? `method` is global, local, balsep or portfolio.
#[pyfunction]
#[pyo3(signature = (h, k, method = "portfolio", timeout = None, plain = false))]
fn decide_ghw(
    py: Python<'_>,
    h: &PyHypergraph,
    k: usize,
    method: &str,
    timeout: Option<f64>,
    plain: bool,
) -> PyResult<Answer> {
    let opts = ht::GhdOptions {
        timeout: budget(timeout)?,
        plain,
        ..Default::default()
    };
    let out = if method == "portfolio" {
        py.detach(|| ht::portfolio_ghw(&h.inner, k, &opts)).map_err(to_py)?.outcome
    } else {
        let m: ht::Method = method.parse().map_err(to_py)?;
        py.detach(|| ht::decide_ghw(m, &h.inner, k, &opts)).map_err(to_py)?
    };
    Ok(answer(&h.inner, out))
}

/// Replaces every node's cover by an optimal fractional one.
#[pyfunction]
fn simple_improve(d: &PyDecomposition) -> PyResult<PyDecomposition> {
    let inner = ht::simple_improve(&d.h, &d.inner).map_err(to_py)?;
    Ok(PyDecomposition { inner, h: d.h.clone() })
}

/// Is there an HD of width <= k whose fractional improvement has width <= kprime?
#[pyfunction]
#[pyo3(signature = (h, k, kprime, timeout = None))]
fn frac_improve(py: Python<'_>, h: &PyHypergraph, k: usize, kprime: f64, timeout: Option<f64>) -> PyResult<Answer> {
    let opts = ht::HdOptions {
        timeout: budget(timeout)?,
        ..Default::default()
    };
    let out = py.detach(|| ht::frac_improve_search(&h.inner, k, kprime, &opts)).map_err(to_py)?;
    Ok(answer(&h.inner, out))
}

#[pyfunction]
#[pyo3(signature = (h, k, timeout = None))]
fn improvement_bucket(py: Python<'_>, h: &PyHypergraph, k: usize, timeout: Option<f64>) -> PyResult<String> {
    let opts = ht::HdOptions {
        timeout: budget(timeout)?,
        ..Default::default()
    };
    let b = py.detach(|| ht::improvement_bucket(&h.inner, k, &opts)).map_err(to_py)?;
    Ok(b.bucket.label().to_string())
}

/// Minimum fractional edge cover weight of the named vertices.
#[pyfunction]
fn fractional_cover_number(h: &PyHypergraph, vertices: Vec<String>) -> PyResult<f64> {
    let mut target = ht::VertexSet::new();
    for v in &vertices {
        let i = h
            .inner
            .vertex_names()
            .iter()
            .position(|n| n == v)
            .ok_or_else(|| PyValueError::new_err(format!("unknown vertex `{v}`")))?;
        target.insert(i);
    }
    Ok(ht::lp_min_cover(&h.inner, &target, None).map_err(to_py)?.weight_f64)
}

#[pymodule]
pub fn pyhypertree(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(decide_hw, m)?)?;
    m.add_function(wrap_pyfunction!(compute_hw, m)?)?;
    m.add_function(wrap_pyfunction!(decide_ghw, m)?)?;
    m.add_function(wrap_pyfunction!(simple_improve, m)?)?;
    m.add_function(wrap_pyfunction!(frac_improve, m)?)?;
    m.add_function(wrap_pyfunction!(improvement_bucket, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_cover_number, m)?)?;
    Ok(())
}
