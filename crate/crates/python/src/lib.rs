//! Python bindings. Structured results (optima, feasibility reports) come
//! back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nv_entangle::entanglement;
use nv_entangle::experiments::{self, FeasibilityInput, Objective, SweepSpec};
use nv_entangle::lindblad::{self, Mat4, C64};
use nv_entangle::nvphys::{self, PhysicalConstants, Temperature};
use nv_entangle::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput { .. }
        | Error::InvalidParams(_)
        | Error::InvalidState(_)
        | Error::InvalidTimes { .. }
        | Error::PastAnticrossing { .. }
        | Error::NotXShaped { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyDict>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))?.cast_into::<PyDict>().map_err(Into::into)
}

#[pyclass(name = "EngineParams", module = "nv_entangle", from_py_object)]
#[derive(Clone, Copy)]
struct PyEngineParams(lindblad::EngineParams);

#[pymethods]
impl PyEngineParams {
    #[new]
    #[pyo3(signature = (eps_l, eps_r, g, gamma_l, gamma_r, n_l, n_r, zz = 0.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(eps_l: f64, eps_r: f64, g: f64, gamma_l: f64, gamma_r: f64, n_l: f64, n_r: f64, zz: f64) -> PyResult<Self> {
        let p = lindblad::EngineParams { eps_l, eps_r, g, gamma_l, gamma_r, n_l, n_r, zz };
        p.validate().map_err(py_err)?;
        Ok(Self(p))
    }

    /// Equal energies and rates on both sides.
    #[staticmethod]
    fn resonant(eps: f64, g: f64, gamma: f64, n_l: f64, n_r: f64) -> PyResult<Self> {
        let p = lindblad::EngineParams::resonant(eps, g, gamma, n_l, n_r);
        p.validate().map_err(py_err)?;
        Ok(Self(p))
    }

    /// Engine at a concentration, coupling and cold-bath polarization, with
    /// the default sweep settings.
    #[staticmethod]
    #[pyo3(signature = (concentration_percent, g_hz, cold_polarization = 1.0))]
    fn from_concentration(concentration_percent: f64, g_hz: f64, cold_polarization: f64) -> PyResult<Self> {
        let p = SweepSpec::default().engine(concentration_percent, g_hz, cold_polarization);
        p.validate().map_err(py_err)?;
        Ok(Self(p))
    }

    fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scaled(factor))
    }

    #[getter]
    fn eps_l(&self) -> f64 {
        self.0.eps_l
    }
    #[getter]
    fn eps_r(&self) -> f64 {
        self.0.eps_r
    }
    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }
    #[getter]
    fn gamma_l(&self) -> f64 {
        self.0.gamma_l
    }
    #[getter]
    fn gamma_r(&self) -> f64 {
        self.0.gamma_r
    }
    #[getter]
    fn n_l(&self) -> f64 {
        self.0.n_l
    }
    #[getter]
    fn n_r(&self) -> f64 {
        self.0.n_r
    }
    #[getter]
    fn zz(&self) -> f64 {
        self.0.zz
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "EngineParams(eps_l={}, eps_r={}, g={}, gamma_l={}, gamma_r={}, n_l={}, n_r={}, zz={})",
            p.eps_l, p.eps_r, p.g, p.gamma_l, p.gamma_r, p.n_l, p.n_r, p.zz
        )
    }
}

#[pyclass(name = "DensityMatrix", module = "nv_entangle", from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix(lindblad::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    /// From a 4x4 nested list of (complex) numbers in the |gg>, |ge>, |eg>, |ee> basis.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(PyValueError::new_err("density matrix must be 4x4"));
        }
        let m = Mat4::from_fn(|i, j| rows[i][j]);
        lindblad::DensityMatrix::new(m).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn thermal_product(n_l: f64, n_r: f64) -> Self {
        Self(lindblad::DensityMatrix::thermal_product(n_l, n_r))
    }

    #[staticmethod]
    fn maximally_mixed() -> Self {
        Self(lindblad::DensityMatrix::maximally_mixed())
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        lindblad::DensityMatrix::parse_text(text).map(Self).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        (0..4).map(|i| (0..4).map(|j| self.0.get(i, j)).collect()).collect()
    }

    fn eigenvalues(&self) -> [f64; 4] {
        self.0.eigenvalues()
    }

    fn trace_distance(&self, other: &PyDensityMatrix) -> f64 {
        self.0.trace_distance(&other.0)
    }

    fn __getitem__(&self, index: (usize, usize)) -> PyResult<C64> {
        let (i, j) = index;
        if i >= 4 || j >= 4 {
            return Err(pyo3::exceptions::PyIndexError::new_err("index out of range"));
        }
        Ok(self.0.get(i, j))
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(\n{})", self.0.to_text())
    }
}

#[pyfunction]
fn steady_state(p: &PyEngineParams) -> PyResult<PyDensityMatrix> {
    lindblad::steady_state(&p.0).map(PyDensityMatrix).map_err(py_err)
}

/// States at each requested time (seconds, ascending).
#[pyfunction]
fn evolve(p: &PyEngineParams, rho0: &PyDensityMatrix, times: Vec<f64>) -> PyResult<Vec<PyDensityMatrix>> {
    let states = lindblad::evolve(&p.0, &rho0.0, &times).map_err(py_err)?;
    Ok(states.into_iter().map(PyDensityMatrix).collect())
}

#[pyfunction]
fn concurrence(rho: &PyDensityMatrix) -> PyResult<f64> {
    entanglement::concurrence(&rho.0).map(|c| c.value).map_err(py_err)
}

/// (J_left, J_right) in Hz^2.
#[pyfunction]
fn heat_currents(p: &PyEngineParams, rho: &PyDensityMatrix) -> (f64, f64) {
    let j = entanglement::heat_currents(&p.0, &rho.0);
    (j.left, j.right)
}

#[pyfunction]
fn to_attowatts(current_hz2: f64) -> f64 {
    entanglement::to_attowatts(current_hz2)
}

#[pyfunction]
fn qubit_energy(b_par: f64) -> PyResult<f64> {
    nvphys::qubit_energy(&PhysicalConstants::carbon13(), b_par).map_err(py_err)
}

#[pyfunction]
fn cross_relaxation_field() -> f64 {
    nvphys::cross_relaxation_field(&PhysicalConstants::carbon13())
}

#[pyfunction]
fn dipolar_coupling(r_m: f64, theta_rad: f64) -> PyResult<f64> {
    nvphys::dipolar_coupling(&PhysicalConstants::carbon13(), r_m, theta_rad).map_err(py_err)
}

#[pyfunction]
fn gamma1_scaled(abundance_percent: f64) -> f64 {
    nvphys::gamma1_scaled(abundance_percent)
}

#[pyfunction]
fn gamma2_scaled(abundance_percent: f64) -> f64 {
    nvphys::gamma2_scaled(abundance_percent)
}

#[pyfunction]
fn diffusion_constant(abundance_percent: f64) -> f64 {
    nvphys::diffusion_constant(abundance_percent)
}

#[pyfunction]
fn polarization_from_temperature(eps_n: f64, t_hz: f64) -> f64 {
    nvphys::polarization_from_temperature(eps_n, t_hz)
}

#[pyfunction]
fn occupation_from_polarization(p: f64) -> f64 {
    nvphys::occupation_from_polarization(p)
}

/// Fermi occupation at qubit energy `eps` (Hz) and temperature `t_hz` (k_B T / h).
#[pyfunction]
fn fermi_occupation(eps: f64, t_hz: f64) -> f64 {
    nvphys::fermi_occupation(&PhysicalConstants::carbon13(), eps, Temperature::Hz(t_hz))
}

/// Coupling that maximizes the objective ("steady" or "transient_peak") at
/// one concentration, searched over the default bracket.
#[pyfunction]
#[pyo3(signature = (concentration_percent, objective = "steady"))]
fn optimal_g<'py>(py: Python<'py>, concentration_percent: f64, objective: &str) -> PyResult<Bound<'py, PyDict>> {
    let objective = match objective {
        "steady" => Objective::Steady,
        "transient_peak" | "transient-peak" => Objective::TransientPeak,
        other => return Err(PyValueError::new_err(format!("unknown objective {other:?}"))),
    };
    let spec = SweepSpec::default();
    let bounds = spec.g_bounds(concentration_percent);
    let opt = py.detach(|| experiments::optimal_g(&spec, concentration_percent, objective, bounds)).map_err(py_err)?;
    to_dict(py, &opt)
}

#[pyfunction]
#[pyo3(signature = (concentration_percent = 1.1, r_m = 10e-9, theta_rad = 0.0, d_sep_m = 20e-9, margin = 10.0))]
fn feasibility<'py>(
    py: Python<'py>,
    concentration_percent: f64,
    r_m: f64,
    theta_rad: f64,
    d_sep_m: f64,
    margin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let input = FeasibilityInput {
        concentration_percent,
        r_m,
        theta_rad,
        d_sep_m,
        margin,
        ..FeasibilityInput::default()
    };
    let report = experiments::feasibility_report(&input).map_err(py_err)?;
    let dict = to_dict(py, &report)?;
    dict.set_item("all_passed", report.all_passed())?;
    Ok(dict)
}

#[pymodule(name = "nv_entangle")]
fn nv_entangle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyEngineParams>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(heat_currents, m)?)?;
    m.add_function(wrap_pyfunction!(to_attowatts, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_energy, m)?)?;
    m.add_function(wrap_pyfunction!(cross_relaxation_field, m)?)?;
    m.add_function(wrap_pyfunction!(dipolar_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(gamma1_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(gamma2_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_constant, m)?)?;
    m.add_function(wrap_pyfunction!(polarization_from_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(occupation_from_polarization, m)?)?;
    m.add_function(wrap_pyfunction!(fermi_occupation, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_g, m)?)?;
    m.add_function(wrap_pyfunction!(feasibility, m)?)?;
    Ok(())
}
