//! Python bindings: canonical structures, patterns, verification and reduction.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use skewpencil::json::{parse_structure, structure_to_json, PatternJson};
use skewpencil::{
    assemble, reduce as reduce_pair, verify_direct_sum, verify_pairwise, CanonicalBlock,
    CanonicalStructure, DenseMatrix, GaussRational, ReduceOptions, SkewPair, StarPattern,
};

fn to_py(e: skewpencil::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Rows = Vec<Vec<Complex64>>;

fn rows_of(m: &DenseMatrix<Complex64>) -> Rows {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrix_from_rows(rows: &Rows) -> PyResult<DenseMatrix<Complex64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    DenseMatrix::new(rows.len(), cols, rows.concat()).map_err(to_py)
}

/// One canonical summand: `H_n(λ)`, `K_n` or `L_n`.
#[pyclass(name = "Block", frozen, from_py_object)]
#[derive(Clone)]
struct PyBlock {
    inner: CanonicalBlock,
}

#[pymethods]
impl PyBlock {
    #[staticmethod]
    fn h(n: usize, eigenvalue: Complex64) -> PyResult<Self> {
        Ok(Self {
            inner: CanonicalBlock::h(n, eigenvalue).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn k(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CanonicalBlock::k(n).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn l(n: usize) -> Self {
        Self {
            inner: CanonicalBlock::l(n),
        }
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn eigenvalue(&self) -> Option<Complex64> {
        self.inner.eigenvalue()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("Block({})", self.inner)
    }
}

/// Direct sum of canonical blocks, kept in canonical order.
#[pyclass(name = "Structure", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStructure {
    inner: CanonicalStructure,
}

#[pymethods]
impl PyStructure {
    #[new]
    fn new(blocks: Vec<PyBlock>) -> Self {
        Self {
            inner: CanonicalStructure::new(blocks.into_iter().map(|b| b.inner).collect()),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_structure(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        structure_to_json(&self.inner)
    }

    #[getter]
    fn blocks(&self) -> Vec<PyBlock> {
        self.inner
            .blocks()
            .iter()
            .map(|&inner| PyBlock { inner })
            .collect()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// The canonical pair `(A, B)` as two lists of rows of complex numbers.
    fn pair(&self) -> (Rows, Rows) {
        let p = self.inner.to_pair::<Complex64>();
        (rows_of(p.a()), rows_of(p.b()))
    }

    fn pattern(&self) -> PyPattern {
        PyPattern {
            inner: assemble(&self.inner),
        }
    }

    fn codimension(&self) -> usize {
        assemble(&self.inner).param_count()
    }

    fn __repr__(&self) -> String {
        format!("Structure({})", self.inner)
    }
}

/// `(0,*)` deformation pattern: 0/1 masks for both matrices.
#[pyclass(name = "Pattern", frozen)]
struct PyPattern {
    inner: StarPattern,
}

#[pymethods]
impl PyPattern {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn mask_a(&self) -> Vec<Vec<u8>> {
        self.inner.mask_a().to_rows()
    }

    #[getter]
    fn mask_b(&self) -> Vec<Vec<u8>> {
        self.inner.mask_b().to_rows()
    }

    #[getter]
    fn params(&self) -> usize {
        self.inner.param_count()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&PatternJson::from_pattern(&self.inner))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Outcome of the global and pairwise direct-sum checks.
#[pyclass(name = "Report", frozen, get_all)]
struct PyReport {
    rank_t: usize,
    params: usize,
    ambient: usize,
    intersection_dim: usize,
    direct_sum_ok: bool,
    pairwise_ok: bool,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn ok(&self) -> bool {
        self.direct_sum_ok && self.pairwise_ok
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(rank_t={}, params={}, ambient={}, intersection_dim={}, ok={})",
            self.rank_t,
            self.params,
            self.ambient,
            self.intersection_dim,
            self.ok()
        )
    }
}

/// Result of reducing a perturbed pair to pattern form.
#[pyclass(name = "Trace", frozen, get_all)]
struct PyTrace {
    converged: bool,
    iterations: usize,
    residuals: Vec<f64>,
    s: Rows,
    d_a: Rows,
    d_b: Rows,
}

/// Checks `T(A,B) ⊕ pattern = ambient` with exact (default) or float ranks.
#[pyfunction]
#[pyo3(signature = (structure, backend = "exact"))]
fn verify(structure: &PyStructure, backend: &str) -> PyResult<PyReport> {
    let s = &structure.inner;
    let pattern = assemble(s);
    let (global, pairwise) = match backend {
        "exact" => (
            verify_direct_sum(&s.to_pair::<GaussRational>(), &pattern),
            verify_pairwise::<GaussRational>(s),
        ),
        "float" => (
            verify_direct_sum(&s.to_pair::<Complex64>(), &pattern),
            verify_pairwise::<Complex64>(s),
        ),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown backend `{other}` (expected exact|float)"
            )))
        }
    };
    let (global, pairwise) = (global.map_err(to_py)?, pairwise.map_err(to_py)?);
    Ok(PyReport {
        rank_t: global.rank_t,
        params: global.params,
        ambient: global.ambient,
        intersection_dim: global.intersection_dim,
        direct_sum_ok: global.direct_sum_ok,
        pairwise_ok: pairwise.all_ok,
    })
}

/// Reduces `canonical pair + (m, r)` to pattern form by congruence.
#[pyfunction]
#[pyo3(signature = (structure, m, r, tol = 1e-10, max_iter = 30))]
fn reduce(
    structure: &PyStructure,
    m: Rows,
    r: Rows,
    tol: f64,
    max_iter: usize,
) -> PyResult<PyTrace> {
    let s = &structure.inner;
    let base = s.to_pair::<Complex64>();
    let pert = SkewPair::new(matrix_from_rows(&m)?, matrix_from_rows(&r)?).map_err(to_py)?;
    let perturbed = base.checked_add(&pert).map_err(to_py)?;
    let trace = reduce_pair(
        &base,
        &perturbed,
        &assemble(s),
        &ReduceOptions {
            tol,
            max_iter,
            ..ReduceOptions::default()
        },
    )
    .map_err(to_py)?;
    Ok(PyTrace {
        converged: trace.converged,
        iterations: trace.iterations.len(),
        residuals: trace.residuals(),
        s: rows_of(&trace.s),
        d_a: rows_of(trace.d.a()),
        d_b: rows_of(trace.d.b()),
    })
}

/// Orbit codimension of a structure.
#[pyfunction]
fn codimension(structure: &PyStructure) -> usize {
    structure.codimension()
}

#[pymodule]
#[pyo3(name = "skewpencil")]
fn skewpencil_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlock>()?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyPattern>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(codimension, m)?)?;
    Ok(())
}
