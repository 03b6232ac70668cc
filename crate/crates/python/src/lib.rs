//! Python bindings: the `ttpack` extension module.

use std::time::Duration;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ttpack_core::bounds;
use ttpack_core::constructions::{self, Filler};
use ttpack_core::designs::{self, BlockDesign};
use ttpack_core::enumeration;
use ttpack_core::experiments;
use ttpack_core::packing::{self, Packing};
use ttpack_core::report::parse_ratio;
use ttpack_core::rng::DEFAULT_SEED;
use ttpack_core::{Error, Rational};

create_exception!(ttpack, VerificationError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Verification(msg) => VerificationError::new_err(msg),
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_ratio(text).ok_or_else(|| PyValueError::new_err(format!("not a rational: {text:?}")))
}

#[pyclass(name = "Tournament", module = "ttpack", skip_from_py_object)]
#[derive(Clone)]
pub struct PyTournament {
    inner: ttpack_core::Tournament,
}

impl From<ttpack_core::Tournament> for PyTournament {
    fn from(inner: ttpack_core::Tournament) -> Self {
        PyTournament { inner }
    }
}

#[pymethods]
impl PyTournament {
    /// Parses the two-line text form `n=<int>` / upper-triangle bits.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        ttpack_core::Tournament::parse(text).map(Into::into).map_err(to_py)
    }

    #[staticmethod]
    fn transitive(n: usize) -> PyResult<Self> {
        ttpack_core::Tournament::transitive(n).map(Into::into).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed = DEFAULT_SEED))]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        ttpack_core::Tournament::random(n, seed).map(Into::into).map_err(to_py)
    }

    /// Builds a tournament from `(u, v)` arcs; every pair must appear once.
    #[staticmethod]
    fn from_arcs(n: usize, arcs: Vec<(usize, usize)>) -> PyResult<Self> {
        let mut forward = vec![None; n * n];
        for (u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(PyValueError::new_err(format!("bad arc ({u}, {v}) for n={n}")));
            }
            let (i, j) = (u.min(v), u.max(v));
            if forward[i * n + j].replace(u < v).is_some() {
                return Err(PyValueError::new_err(format!("pair ({i}, {j}) given twice")));
            }
        }
        if let Some(p) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| forward[i * n + j].is_none()) {
            return Err(PyValueError::new_err(format!("pair {p:?} missing")));
        }
        ttpack_core::Tournament::from_fn(n, |i, j| forward[i * n + j] == Some(true)).map(Into::into).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn has_edge(&self, u: usize, v: usize) -> PyResult<bool> {
        let n = self.inner.n();
        if u >= n || v >= n {
            return Err(PyValueError::new_err(format!("vertex out of range for n={n}")));
        }
        Ok(self.inner.has_edge(u, v))
    }

    fn out_degrees(&self) -> Vec<usize> {
        self.inner.out_degrees()
    }

    fn score_sequence(&self) -> Vec<usize> {
        self.inner.score_sequence().as_slice().to_vec()
    }

    /// `(transitive, cyclic)` triple counts.
    fn census(&self) -> (u64, u64) {
        let c = self.inner.census();
        (c.transitive, c.cyclic)
    }

    fn reverse(&self) -> Self {
        self.inner.reverse().into()
    }

    fn induced(&self, subset: Vec<usize>) -> PyResult<Self> {
        self.inner.induced(&subset).map(Into::into).map_err(to_py)
    }

    fn relabel(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.inner.relabel(&perm).map(Into::into).map_err(to_py)
    }

    fn canonical_form(&self) -> PyResult<String> {
        enumeration::canonical_form(&self.inner).map(|c| c.to_string()).map_err(to_py)
    }

    fn is_isomorphic(&self, other: &PyTournament) -> PyResult<bool> {
        enumeration::is_isomorphic(&self.inner, &other.inner).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __eq__(&self, other: &PyTournament) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Tournament(n={}, score=[{}])", self.inner.n(), self.inner.score_sequence())
    }
}

fn packing_dict<'py>(py: Python<'py>, p: &Packing) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", p.n)?;
    d.set_item("k", p.k)?;
    d.set_item("value", p.value())?;
    d.set_item("optimal", p.optimal)?;
    d.set_item("copies", p.copies.clone())?;
    d.set_item("nodes_explored", p.nodes_explored)?;
    Ok(d)
}

/// Exact maximum packing of `TT_k` copies; `optimal` is false when the
/// budget ran out.
#[pyfunction]
#[pyo3(signature = (t, k = 3, budget_ms = None))]
fn max_packing<'py>(py: Python<'py>, t: &PyTournament, k: usize, budget_ms: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let host = t.inner.clone();
    let p = py
        .detach(move || packing::max_packing_exact(&host, k, budget_ms.map(Duration::from_millis)))
        .map_err(to_py)?;
    packing_dict(py, &p)
}

#[pyfunction]
#[pyo3(signature = (t, k = 3, seed = DEFAULT_SEED))]
fn greedy_packing<'py>(py: Python<'py>, t: &PyTournament, k: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let p = packing::greedy_packing(&t.inner, k, seed).map_err(to_py)?;
    packing_dict(py, &p)
}

/// True when `copies` are edge-disjoint transitive `k`-subsets of `t`.
#[pyfunction]
fn verify_packing(t: &PyTournament, k: usize, copies: Vec<Vec<usize>>) -> bool {
    let n = t.inner.n();
    let mut p = Packing::empty(n, k);
    for mut c in copies {
        c.sort_unstable();
        c.dedup();
        if c.len() != k || c.iter().any(|&v| v >= n) {
            return false;
        }
        p.push(c);
    }
    packing::verify_packing(&t.inner, &p)
}

/// Canonical codes of every isomorphism class of order `n` (n <= 8).
#[pyfunction]
fn enumerate_classes(py: Python<'_>, n: usize) -> PyResult<Vec<String>> {
    let classes = py.detach(move || enumeration::enumerate_classes(n)).map_err(to_py)?;
    Ok(classes.iter().map(|c| c.to_string()).collect())
}

#[pyfunction]
fn from_canonical(code: &str) -> PyResult<PyTournament> {
    let form: enumeration::CanonicalForm = code.parse().map_err(to_py)?;
    Ok(form.to_tournament().into())
}

/// Minimum packing number over all classes of order `n`.
#[pyfunction]
#[pyo3(signature = (n, k = 3))]
fn f_min<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let record = py
        .detach(move || enumeration::enumerate_classes(n).and_then(|c| bounds::f_min(&c, k)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("n", record.n)?;
    d.set_item("k", record.k)?;
    d.set_item("f", record.f_value)?;
    d.set_item("argmin", record.argmin)?;
    d.set_item("class_count", record.class_count)?;
    Ok(d)
}

/// Solves all 7-vertex classes; raises `VerificationError` on a violation.
#[pyfunction]
fn verify_seven_vertex_claims<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let report = py
        .detach(|| enumeration::enumerate_classes(7).and_then(|c| bounds::verify_seven_vertex_claims(&c)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("class_count", report.class_count)?;
    d.set_item("min_packing", report.min_packing)?;
    let joint: Vec<(u64, usize, usize)> = report.joint.iter().map(|c| (c.cyclic, c.packing, c.classes)).collect();
    d.set_item("joint", joint)?;
    Ok(d)
}

/// Returns `(minimum, (p1, p2, p3))` as `Fraction`s. Rationals may be given
/// as `"p/q"` strings.
#[pyfunction]
#[pyo3(signature = (budget, values = ("7", "6", "5"), costs = ("5", "12")))]
fn lp_step<'py>(
    py: Python<'py>,
    budget: &str,
    values: (&str, &str, &str),
    costs: (&str, &str),
) -> PyResult<(Bound<'py, PyAny>, Vec<Bound<'py, PyAny>>)> {
    let values = [rational(values.0)?, rational(values.1)?, rational(values.2)?];
    let costs = [rational(costs.0)?, rational(costs.1)?];
    let s = bounds::lp_step(rational(budget)?, values, costs).map_err(to_py)?;
    let argmin = s.argmin.iter().map(|&p| fraction(py, p)).collect::<PyResult<_>>()?;
    Ok((fraction(py, s.minimum)?, argmin))
}

/// Block pipeline on a 49-vertex tournament: per-trial totals.
#[pyfunction]
#[pyo3(signature = (t, trials = 100, seed = DEFAULT_SEED))]
fn pipeline<'py>(py: Python<'py>, t: &PyTournament, trials: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let host = t.inner.clone();
    let r = py.detach(move || bounds::block_pipeline(&host, trials, seed)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("totals", r.per_trial.iter().map(|t| t.total).collect::<Vec<_>>())?;
    d.set_item("min_total", r.min_total)?;
    d.set_item("max_total", r.max_total)?;
    d.set_item("all_verified", r.all_verified)?;
    d.set_item("mean_block_packing", fraction(py, r.mean_block_packing)?)?;
    Ok(d)
}

fn filler(kind: &str, seed: u64) -> PyResult<Filler> {
    match kind {
        "transitive" => Ok(Filler::Transitive),
        "random" => Ok(Filler::Random { seed }),
        _ => Err(PyValueError::new_err(format!("filler must be 'transitive' or 'random', got {kind:?}"))),
    }
}

#[pyfunction]
#[pyo3(signature = (n, filler = "transitive", seed = DEFAULT_SEED))]
fn turan3(n: usize, filler: &str, seed: u64) -> PyResult<PyTournament> {
    constructions::turan3_tournament(n, self::filler(filler, seed)?).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn qr7() -> PyTournament {
    constructions::qr7().into()
}

#[pyfunction]
#[pyo3(signature = (factor, filler = "transitive", seed = DEFAULT_SEED))]
fn qr7_blowup(factor: usize, filler: &str, seed: u64) -> PyResult<PyTournament> {
    constructions::blowup(&constructions::qr7(), factor, self::filler(filler, seed)?).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn conjectured_minimum(n: usize) -> usize {
    constructions::conjectured_minimum(n)
}

#[pyfunction]
fn fano_plane() -> Vec<Vec<usize>> {
    designs::fano_plane().blocks
}

#[pyfunction]
fn all_sts7() -> Vec<Vec<Vec<usize>>> {
    designs::all_sts7().iter().map(|d| d.blocks.clone()).collect()
}

#[pyfunction]
fn ag2_lines() -> PyResult<Vec<Vec<usize>>> {
    designs::ag2_lines(7).map(|d| d.blocks).map_err(to_py)
}

/// Blocks of a triple system that induce directed triangles in `t`.
#[pyfunction]
fn sts_triangle_count(t: &PyTournament, blocks: Vec<Vec<usize>>) -> PyResult<usize> {
    let design = BlockDesign { point_count: t.inner.n(), block_size: 3, blocks };
    if !design.verify() {
        return Err(PyValueError::new_err("blocks do not form a Steiner triple system on the vertices"));
    }
    designs::sts_triangle_count(&t.inner, &design).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (t, k = 3))]
fn edge_copy_stats<'py>(py: Python<'py>, t: &PyTournament, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let s = experiments::edge_copy_stats(&t.inner, k).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("copies", s.copies)?;
    d.set_item("mean", fraction(py, s.mean)?)?;
    d.set_item("min", s.min)?;
    d.set_item("max", s.max)?;
    d.set_item("expectation", fraction(py, s.expectation)?)?;
    d.set_item("counts", s.counts.clone())?;
    d.set_item("handshake_holds", s.handshake_holds())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n, k = 3, trials = 30, seed = DEFAULT_SEED, improve = false))]
fn density_experiment<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    improve: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(move || experiments::density_experiment(n, k, trials, seed, improve)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("copies", r.per_trial.iter().map(|t| t.copies).collect::<Vec<_>>())?;
    d.set_item("covered_fraction", r.per_trial.iter().map(|t| t.covered_fraction).collect::<Vec<_>>())?;
    d.set_item("mean_covered_fraction", r.mean_covered_fraction)?;
    d.set_item("reference_density", fraction(py, r.reference_density)?)?;
    Ok(d)
}

#[pymodule]
fn ttpack(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    m.add_class::<PyTournament>()?;
    m.add_function(wrap_pyfunction!(max_packing, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_packing, m)?)?;
    m.add_function(wrap_pyfunction!(verify_packing, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_classes, m)?)?;
    m.add_function(wrap_pyfunction!(from_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(f_min, m)?)?;
    m.add_function(wrap_pyfunction!(verify_seven_vertex_claims, m)?)?;
    m.add_function(wrap_pyfunction!(lp_step, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(turan3, m)?)?;
    m.add_function(wrap_pyfunction!(qr7, m)?)?;
    m.add_function(wrap_pyfunction!(qr7_blowup, m)?)?;
    m.add_function(wrap_pyfunction!(conjectured_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(fano_plane, m)?)?;
    m.add_function(wrap_pyfunction!(all_sts7, m)?)?;
    m.add_function(wrap_pyfunction!(ag2_lines, m)?)?;
    m.add_function(wrap_pyfunction!(sts_triangle_count, m)?)?;
    m.add_function(wrap_pyfunction!(edge_copy_stats, m)?)?;
    m.add_function(wrap_pyfunction!(density_experiment, m)?)?;
    Ok(())
}
