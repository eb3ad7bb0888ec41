//! Python bindings. Axes are given as `"x"`, `"y"`, `"z"` or as a float
//! `varphi` for the in-plane axis `sin(varphi)·J_x + cos(varphi)·J_z`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use twoaxis::optimize::{optimize_squeezing_time as optimize, SearchOptions};
use twoaxis::{Error, Estimate, SpinAxis, SqueezingConfig, Trend};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse_axis(axis: &Bound<'_, PyAny>) -> PyResult<SpinAxis> {
    if let Ok(varphi) = axis.extract::<f64>() {
        return Ok(SpinAxis::in_plane(varphi));
    }
    let name: String = axis.extract()?;
    match name.to_ascii_lowercase().as_str() {
        "x" => Ok(SpinAxis::X),
        "y" => Ok(SpinAxis::Y),
        "z" => Ok(SpinAxis::Z),
        _ => Err(PyValueError::new_err(format!(
            "axis must be 'x', 'y', 'z' or an angle, got {name:?}"
        ))),
    }
}

/// Symmetric state of N spins-1/2 in the Dicke basis, m descending.
#[pyclass(name = "DickeState", module = "twoaxis_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDickeState(twoaxis::DickeState);

#[pymethods]
impl PyDickeState {
    #[new]
    fn new(n_spins: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        twoaxis::DickeState::from_amplitudes(n_spins, amplitudes)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn coherent_x(n_spins: usize) -> PyResult<Self> {
        twoaxis::DickeState::coherent_x(n_spins).map(Self).map_err(py_err)
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.0.n_spins()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    #[getter]
    fn m_values(&self) -> Vec<f64> {
        self.0.m_values()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn fidelity(&self, other: &PyDickeState) -> f64 {
        self.0.fidelity(&other.0)
    }

    fn one_axis_twist(&self, t_s: f64) -> Self {
        Self(self.0.one_axis_twist(t_s))
    }

    fn rotate(&self, axis: &Bound<'_, PyAny>, angle: f64) -> PyResult<Self> {
        self.0.rotate(parse_axis(axis)?, angle).map(Self).map_err(py_err)
    }

    fn expectation(&self, axis: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.0.expectation(parse_axis(axis)?))
    }

    fn variance(&self, axis: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.0.variance(parse_axis(axis)?))
    }

    /// `(outcomes, probabilities)` for a projective measurement along `axis`.
    fn measurement_distribution(&self, axis: &Bound<'_, PyAny>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let d = self
            .0
            .measurement_distribution(parse_axis(axis)?)
            .map_err(py_err)?;
        Ok((d.outcomes().to_vec(), d.probabilities().to_vec()))
    }

    fn __repr__(&self) -> String {
        format!("DickeState(n_spins={})", self.0.n_spins())
    }
}

/// Twisted and realigned probe state.
#[pyclass(name = "PreparedState", module = "twoaxis_py", frozen)]
struct PyPreparedState(twoaxis::PreparedState);

#[pymethods]
impl PyPreparedState {
    #[getter]
    fn n_spins(&self) -> usize {
        self.0.config.n_spins
    }

    #[getter]
    fn t_s(&self) -> f64 {
        self.0.config.t_s
    }

    #[getter]
    fn delta_adj(&self) -> f64 {
        self.0.delta_adj
    }

    #[getter]
    fn state(&self) -> PyDickeState {
        PyDickeState(self.0.state.clone())
    }

    fn fisher_information(&self) -> f64 {
        twoaxis::quantum_fisher_information(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "PreparedState(n_spins={}, t_s={}, delta_adj={})",
            self.0.config.n_spins, self.0.config.t_s, self.0.delta_adj
        )
    }
}

#[pyfunction]
fn prepare(n_spins: usize, t_s: f64) -> PyResult<PyPreparedState> {
    twoaxis::prepare(&SqueezingConfig::new(n_spins, t_s))
        .map(PyPreparedState)
        .map_err(py_err)
}

#[pyfunction]
fn adjustment_angle(n_spins: usize, t_s: f64) -> PyResult<f64> {
    twoaxis::adjustment_angle(n_spins, t_s).map_err(py_err)
}

#[pyfunction]
fn quantum_fisher_information(prepared: &PyPreparedState) -> f64 {
    twoaxis::quantum_fisher_information(&prepared.0)
}

#[pyfunction]
fn apply_channel(prepared: &PyPreparedState, phi: f64) -> PyResult<PyDickeState> {
    twoaxis::apply_channel(&prepared.0, phi)
        .map(PyDickeState)
        .map_err(py_err)
}

/// Phase estimate in `[0, 2π)`, or `None` when both read-outs vanish.
#[pyfunction]
fn estimate(j_x: f64, j_z: f64) -> Option<f64> {
    match twoaxis::estimate(j_x, j_z) {
        Estimate::Angle(a) => Some(a),
        Estimate::Degenerate => None,
    }
}

#[pyfunction]
fn circular_error(phi_true: f64, phi_est: f64) -> f64 {
    twoaxis::circular_error(phi_true, phi_est)
}

/// Run the protocol and return a dict with the imprecision summary and,
/// when `records` is true, one `(phi_true, j_x, j_z, phi_est, error,
/// degenerate)` tuple per trial.
#[pyfunction]
#[pyo3(signature = (n_spins, t_s, trials = 1000, seed = 0, records = false))]
fn run_experiment<'py>(
    py: Python<'py>,
    n_spins: usize,
    t_s: f64,
    trials: usize,
    seed: u64,
    records: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let config = twoaxis::ExperimentConfig::new(n_spins, t_s, trials, seed);
    let outcome = py
        .detach(|| twoaxis::run_experiment(&config))
        .map_err(py_err)?;
    let r = outcome.result;
    let d = PyDict::new(py);
    d.set_item("delta_phi", r.delta_phi)?;
    d.set_item("stderr", r.stderr)?;
    d.set_item("trials_used", r.trials_used)?;
    d.set_item("degenerate_count", r.degenerate_count)?;
    d.set_item("n_spins", r.n_spins)?;
    d.set_item("t_s", r.t_s)?;
    if records {
        let rows: Vec<_> = outcome
            .trials
            .iter()
            .map(|t| (t.phi_true, t.j_x, t.j_z, t.phi_est, t.error, t.degenerate))
            .collect();
        d.set_item("records", rows)?;
    }
    Ok(d)
}

/// Minimize the imprecision over the twisting time.
#[pyfunction]
#[pyo3(signature = (n_spins, trials = 1000, seed = 0))]
fn optimize_squeezing_time<'py>(
    py: Python<'py>,
    n_spins: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let options = SearchOptions::new(trials, seed);
    let opt = py.detach(|| optimize(n_spins, &options)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("t_s_opt", opt.t_s_opt)?;
    d.set_item("scaled_opt", opt.scaled_opt)?;
    d.set_item("delta_phi", opt.best.delta_phi)?;
    d.set_item("stderr", opt.best.stderr)?;
    d.set_item("on_boundary", opt.on_boundary)?;
    let coarse: Vec<(f64, f64)> = opt
        .coarse
        .iter()
        .map(|g| (g.scaled_time, g.result.delta_phi))
        .collect();
    d.set_item("coarse", coarse)?;
    Ok(d)
}

/// Fit `y = a·N^(-b)` (`decaying=True`) or `y = a·N^b`.
#[pyfunction]
#[pyo3(signature = (points, decaying = true))]
fn fit_power_law<'py>(
    py: Python<'py>,
    points: Vec<(f64, f64)>,
    decaying: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let trend = if decaying { Trend::Decaying } else { Trend::Growing };
    let f = twoaxis::fit_power_law(&points, trend).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("prefactor", f.prefactor)?;
    d.set_item("exponent", f.exponent)?;
    d.set_item("stderr_prefactor", f.stderr_prefactor)?;
    d.set_item("stderr_exponent", f.stderr_exponent)?;
    d.set_item("sample_count", f.sample_count)?;
    Ok(d)
}

/// `(thetas, phis, values)` with `values[i][k] = Q(thetas[i], phis[k])`.
#[pyfunction]
#[pyo3(signature = (state, theta_count = 181, phi_count = 360))]
fn husimi_grid(
    state: &PyDickeState,
    theta_count: usize,
    phi_count: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let g = twoaxis::husimi_grid(&state.0, theta_count, phi_count).map_err(py_err)?;
    let rows = g.values.outer_iter().map(|r| r.to_vec()).collect();
    Ok((g.theta_samples, g.phi_samples, rows))
}

#[pyfunction]
fn husimi_normalization(state: &PyDickeState) -> PyResult<f64> {
    twoaxis::husimi_normalization(&state.0).map_err(py_err)
}

#[pymodule]
fn twoaxis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDickeState>()?;
    m.add_class::<PyPreparedState>()?;
    m.add_function(wrap_pyfunction!(prepare, m)?)?;
    m.add_function(wrap_pyfunction!(adjustment_angle, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_fisher_information, m)?)?;
    m.add_function(wrap_pyfunction!(apply_channel, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(circular_error, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_squeezing_time, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(husimi_grid, m)?)?;
    m.add_function(wrap_pyfunction!(husimi_normalization, m)?)?;
    Ok(())
}
