//! Python bindings for the `bisqueeze` core.
//!
//! Structured results come back as plain dicts; vectors in the number basis
//! come back as lists of complex numbers.

use bisqueeze::analysis::radius::{radius_report as core_radius_report, swanson_radius_displayed_form, swanson_radius_theorem_form};
use bisqueeze::deformations::{biorthogonality_matrix, BasisVector, DeformationModel, ModelSpec};
use bisqueeze::dynamics::{
    number_matrix_elements, quadrature_variance_product, squeeze_hamiltonian_identification, DynamicsParams,
};
use bisqueeze::operators::SqueezeParams;
use bisqueeze::states::{bi_squeezed as core_bi_squeezed, Construction};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Round-trips through JSON so every report shares one conversion; infinite
/// floats become `None`.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn fock(v: &BasisVector) -> Option<Vec<Complex64>> {
    match v {
        BasisVector::Fock(f) => Some(f.as_slice().to_vec()),
        BasisVector::Grid(_) => None,
    }
}

/// A pseudo-bosonic model truncated to `dim` number states.
#[pyclass(frozen)]
struct Model {
    inner: DeformationModel,
}

#[pymethods]
impl Model {
    /// Builds from a JSON model spec such as `{"name": "swanson", "nu": 0.3}`.
    #[staticmethod]
    #[pyo3(signature = (spec, dim=64))]
    fn from_spec(spec: &str, dim: usize) -> PyResult<Self> {
        let spec: ModelSpec = serde_json::from_str(spec).map_err(err)?;
        Ok(Self { inner: spec.build(dim).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim=64))]
    fn identity(dim: usize) -> PyResult<Self> {
        Ok(Self { inner: ModelSpec::Identity {}.build(dim).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim=64))]
    fn rank_one(dim: usize) -> PyResult<Self> {
        let spec = ModelSpec::RankOne { u: None, v: None, alpha: None };
        Ok(Self { inner: spec.build(dim).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (nu, dim=64, n_max=None, grid_nodes=None))]
    fn swanson(nu: f64, dim: usize, n_max: Option<usize>, grid_nodes: Option<usize>) -> PyResult<Self> {
        let spec = ModelSpec::Swanson { nu, n_max, grid_nodes };
        Ok(Self { inner: spec.build(dim).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn is_regular(&self) -> bool {
        self.inner.is_regular()
    }

    /// `phi_n` in the number basis.
    fn phi(&self, n: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.phi_fock(n).map_err(err)?.as_slice().to_vec())
    }

    /// `Psi_n` in the number basis.
    fn psi(&self, n: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.psi_fock(n).map_err(err)?.as_slice().to_vec())
    }

    /// Largest deviation of `<phi_n, Psi_m>` from `delta_nm`, and ladder residuals.
    #[pyo3(signature = (nmax=16))]
    fn biorthogonality<'py>(&self, py: Python<'py>, nmax: usize) -> PyResult<Bound<'py, PyDict>> {
        let rep = biorthogonality_matrix(&self.inner, nmax).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("max_deviation", rep.max_deviation)?;
        out.set_item("ladder", to_py(py, &rep.ladder)?)?;
        out.set_item("flagged_rows", rep.flagged_rows)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Model(name={:?}, dim={})", self.inner.name(), self.inner.dim())
    }
}

/// Bi-squeezed pair at `z = r e^{i theta}`.
#[pyfunction]
#[pyo3(signature = (model, r, theta=0.0, construction="series"))]
fn bi_squeezed<'py>(py: Python<'py>, model: &Model, r: f64, theta: f64, construction: &str) -> PyResult<Bound<'py, PyDict>> {
    let construction: Construction =
        serde_json::from_value(serde_json::Value::String(construction.to_string())).map_err(err)?;
    let pair = core_bi_squeezed(&model.inner, &SqueezeParams::from_polar(r, theta), construction).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("pairing", pair.pairing)?;
    out.set_item("converged", pair.is_converged())?;
    out.set_item("left", fock(&pair.left))?;
    out.set_item("right", fock(&pair.right))?;
    out.set_item("diagnostics", to_py(py, &pair.diagnostics)?)?;
    Ok(out)
}

/// Theoretical, closed-form and ratio-test radii of the bi-squeezed series.
#[pyfunction]
fn radius_report<'py>(py: Python<'py>, model: &Model) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core_radius_report(&model.inner).map_err(err)?)
}

/// `(theorem form, closed form)` radii for the Swanson model at `nu`.
#[pyfunction]
fn swanson_radii(nu: f64) -> PyResult<(f64, f64)> {
    Ok((swanson_radius_theorem_form(nu).map_err(err)?, swanson_radius_displayed_form(nu).map_err(err)?))
}

/// `<Psi_0, N(t) phi_0>` and its companions with their expected values.
#[pyfunction]
#[pyo3(signature = (model, lam, t, omega=0.0))]
fn number_elements<'py>(py: Python<'py>, model: &Model, lam: f64, t: f64, omega: f64) -> PyResult<Bound<'py, PyAny>> {
    let params = DynamicsParams::new(omega, lam, t).map_err(err)?;
    to_py(py, &number_matrix_elements(&model.inner, &params).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (model, lam, t, omega=0.0))]
fn quadrature_variance<'py>(py: Python<'py>, model: &Model, lam: f64, t: f64, omega: f64) -> PyResult<Bound<'py, PyAny>> {
    let params = DynamicsParams::new(omega, lam, t).map_err(err)?;
    to_py(py, &quadrature_variance_product(&model.inner, &params).map_err(err)?)
}

/// Residuals of `exp(∓iH)` against the deformed squeeze operator for all
/// four sign pairings.
#[pyfunction]
fn squeeze_identification<'py>(py: Python<'py>, model: &Model, lam: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &squeeze_hamiltonian_identification(&model.inner, lam).map_err(err)?)
}

#[pymodule]
fn bisqueeze_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(bi_squeezed, m)?)?;
    m.add_function(wrap_pyfunction!(radius_report, m)?)?;
    m.add_function(wrap_pyfunction!(swanson_radii, m)?)?;
    m.add_function(wrap_pyfunction!(number_elements, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature_variance, m)?)?;
    m.add_function(wrap_pyfunction!(squeeze_identification, m)?)?;
    Ok(())
}
