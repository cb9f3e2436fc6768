//! Python bindings for `metazeta`.

use metazeta::padic::{lte_valuation as lte, vp as valuation};
use metazeta::zeta::zeta_equal_by_theorem;
use metazeta::{Error, Limits, Valuation};
use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(metazeta_py, ResourceLimitError, PyRuntimeError);
create_exception!(metazeta_py, VerificationError, PyRuntimeError);
create_exception!(metazeta_py, UnsupportedCaseError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ResourceLimit(msg) => ResourceLimitError::new_err(msg),
        Error::InternalInconsistency(msg) => VerificationError::new_err(msg),
        Error::UnsupportedCase(msg) => UnsupportedCaseError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn limits(max_order: Option<u64>, max_subgroups: Option<usize>) -> Limits {
    let mut l = Limits::from_env();
    if let Some(v) = max_order {
        l = l.with_max_order(v);
    }
    if let Some(v) = max_subgroups {
        l = l.with_max_subgroups(v);
    }
    l
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn finite(v: Valuation) -> Option<u32> {
    v.finite()
}

/// Parameters `(p, m, n, k)` of `<a, b | a^(p^m) = b^(p^n) = 1, b a b^-1 = a^k>`.
#[pyclass(name = "GroupParams", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyGroupParams {
    inner: metazeta::GroupParams,
}

#[pymethods]
impl PyGroupParams {
    #[new]
    fn new(p: u64, m: u32, n: u32, k: i64) -> PyResult<Self> {
        Ok(PyGroupParams {
            inner: metazeta::GroupParams::new(p, m, n, k).map_err(to_py)?,
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    /// Canonical residue of `k` modulo `p^m`.
    #[getter]
    fn k(&self) -> u64 {
        self.inner.k()
    }

    fn is_valid(&self) -> bool {
        metazeta::is_valid(&self.inner)
    }

    /// Closed-form counts `[a_{p^0}, ..., a_{p^(m+n)}]`.
    fn coefficients(&self) -> PyResult<Vec<BigUint>> {
        Ok(metazeta::coefficients(&self.inner).map_err(to_py)?.counts)
    }

    /// Brute-force counts from the subgroup oracle.
    #[pyo3(signature = (max_order=None, max_subgroups=None))]
    fn subgroup_counts(&self, max_order: Option<u64>, max_subgroups: Option<usize>) -> PyResult<Vec<BigUint>> {
        let l = limits(max_order, max_subgroups);
        let g = metazeta::build_group(&self.inner, &l).map_err(to_py)?;
        metazeta::subgroup_counts(&g, &l).map_err(to_py)
    }

    fn is_isomorphic(&self, other: &PyGroupParams) -> PyResult<bool> {
        metazeta::is_isomorphic(&self.inner, &other.inner).map_err(to_py)
    }

    fn zeta_equal(&self, other: &PyGroupParams) -> PyResult<bool> {
        zeta_equal_by_theorem(&self.inner, &other.inner).map_err(to_py)
    }

    /// `{"isomorphic": .., "zeta_equal": .., "lattice_isomorphic": ..}`.
    #[pyo3(signature = (other, max_order=None))]
    fn compare<'py>(&self, py: Python<'py>, other: &PyGroupParams, max_order: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let c = metazeta::compare(&self.inner, &other.inner, &limits(max_order, None)).map_err(to_py)?;
        json_to_py(py, &c)
    }

    fn __repr__(&self) -> String {
        format!("GroupParams(p={}, m={}, n={}, k={})", self.p(), self.m(), self.n(), self.k())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyfunction]
fn valid_k_set(p: u64, m: u32, n: u32) -> PyResult<Vec<u64>> {
    metazeta::valid_k_set(p, m, n, &Limits::from_env()).map_err(to_py)
}

#[pyfunction]
fn iso_classes(p: u64, m: u32, n: u32) -> PyResult<Vec<Vec<u64>>> {
    Ok(metazeta::iso_classes(p, m, n, &Limits::from_env()).map_err(to_py)?.blocks)
}

#[pyfunction]
fn lattice_classes(p: u64, m: u32, n: u32) -> PyResult<Vec<Vec<u64>>> {
    Ok(metazeta::lattice_classes(p, m, n, &Limits::from_env()).map_err(to_py)?.blocks)
}

/// Full report as a dict (same shape as the CLI's `classify --json`).
#[pyfunction]
#[pyo3(signature = (p, m, n, lattice=false, verify=false, max_order=None, max_subgroups=None))]
#[allow(clippy::too_many_arguments)]
fn classify<'py>(
    py: Python<'py>,
    p: u64,
    m: u32,
    n: u32,
    lattice: bool,
    verify: bool,
    max_order: Option<u64>,
    max_subgroups: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let options = metazeta::ClassifyOptions {
        lattice,
        verify,
        limits: limits(max_order, max_subgroups),
    };
    let report = py.detach(|| metazeta::classify(p, m, n, &options)).map_err(to_py)?;
    Ok(json_to_py(py, &report)?.cast_into::<PyDict>()?)
}

/// Cross-validation sweep over every group of order at most `max_order`.
#[pyfunction]
#[pyo3(signature = (p, max_order, lattice=true))]
fn sweep<'py>(py: Python<'py>, p: u64, max_order: u64, lattice: bool) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = metazeta::SweepSpec::new(p, max_order);
    spec.lattice = lattice;
    let summary = py.detach(|| metazeta::sweep_verify(&spec)).map_err(to_py)?;
    json_to_py(py, &summary)
}

/// `v_p(x)`, or `None` for `x = 0`.
#[pyfunction]
fn vp(p: u64, x: BigInt) -> PyResult<Option<u32>> {
    Ok(finite(valuation(p, &x).map_err(to_py)?))
}

/// `v_p(x^n - y^n)` by lifting the exponent; `None` when infinite.
#[pyfunction]
fn lte_valuation(p: u64, x: BigInt, y: BigInt, n: u64) -> PyResult<Option<u32>> {
    Ok(finite(lte(p, &x, &y, n).map_err(to_py)?))
}

#[pyfunction]
fn quasiregular_counts(p: u64, ell: u32, e: u32) -> PyResult<Vec<BigUint>> {
    metazeta::zeta::quasiregular_counts(p, ell, e).map_err(to_py)
}

#[pymodule]
fn metazeta_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupParams>()?;
    m.add_function(wrap_pyfunction!(valid_k_set, m)?)?;
    m.add_function(wrap_pyfunction!(iso_classes, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_classes, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(vp, m)?)?;
    m.add_function(wrap_pyfunction!(lte_valuation, m)?)?;
    m.add_function(wrap_pyfunction!(quasiregular_counts, m)?)?;
    let py = m.py();
    m.add("ResourceLimitError", py.get_type::<ResourceLimitError>())?;
    m.add("VerificationError", py.get_type::<VerificationError>())?;
    m.add("UnsupportedCaseError", py.get_type::<UnsupportedCaseError>())?;
    Ok(())
}
