//! Python bindings for the `qwalk` toolkit.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qwalk::coin::CMatrix;
use qwalk::experiment::verify::{run_verify, VerifyOptions};
use qwalk::metrology::{self, MetrologyReport};
use qwalk::optimize::{self, Objective, OptimizeOptions, ProbeProblem};
use qwalk::walk::{self, DerivativePair};
use qwalk::{Axis, WalkError};

fn py_err(e: WalkError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Rows = Vec<Vec<Complex64>>;

fn rows(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Coin-state parametrization on the generalized Bloch hypersphere.
#[pyclass(name = "ProbeSpec", module = "qwalk_py", from_py_object)]
#[derive(Clone)]
struct PyProbeSpec {
    inner: qwalk::ProbeSpec,
}

#[pymethods]
impl PyProbeSpec {
    #[new]
    fn new(angles: Vec<f64>, phases: Vec<f64>) -> PyResult<Self> {
        let inner = qwalk::ProbeSpec::new(angles, phases).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn lowest(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: qwalk::ProbeSpec::lowest(dim).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn basis(dim: usize, k: usize) -> PyResult<Self> {
        Ok(Self {
            inner: qwalk::ProbeSpec::basis(dim, k).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: qwalk::ProbeSpec::from_amplitudes(&amplitudes).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.inner.angles.clone()
    }

    #[getter]
    fn phases(&self) -> Vec<f64> {
        self.inner.phases.clone()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes()
    }

    fn __repr__(&self) -> String {
        format!("ProbeSpec(angles={:?}, phases={:?})", self.inner.angles, self.inner.phases)
    }
}

/// A one-parameter coin family.
#[pyclass(name = "CoinFamily", module = "qwalk_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyCoinFamily {
    inner: qwalk::CoinFamily,
}

#[pymethods]
impl PyCoinFamily {
    #[staticmethod]
    fn rotation(axis: &str) -> PyResult<Self> {
        let axis: Axis = axis.parse().map_err(py_err)?;
        Ok(Self {
            inner: qwalk::CoinFamily::rotation(axis),
        })
    }

    #[staticmethod]
    fn embedded_z() -> Self {
        Self {
            inner: qwalk::CoinFamily::EmbeddedRotationZ,
        }
    }

    #[staticmethod]
    fn embedded_u2(xi: f64, zeta: f64) -> Self {
        Self {
            inner: qwalk::CoinFamily::EmbeddedU2 { xi, zeta },
        }
    }

    #[staticmethod]
    fn grover() -> Self {
        Self {
            inner: qwalk::CoinFamily::Grover,
        }
    }

    #[staticmethod]
    fn grover_composition() -> Self {
        Self {
            inner: qwalk::CoinFamily::GroverComposition,
        }
    }

    /// Coin matrix and its θ-derivative as nested lists.
    fn build(&self, dim: usize, theta: f64) -> PyResult<(Rows, Rows)> {
        let coin = self.inner.build(dim, theta).map_err(py_err)?;
        Ok((rows(&coin.matrix), rows(&coin.derivative)))
    }

    fn __repr__(&self) -> String {
        format!("CoinFamily({})", self.inner)
    }
}

/// Walk state after t steps together with its θ-derivative.
#[pyclass(name = "Evolution", module = "qwalk_py", frozen)]
struct PyEvolution {
    inner: DerivativePair,
}

#[pymethods]
impl PyEvolution {
    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    fn positions(&self) -> Vec<i64> {
        self.inner.state.positions().collect()
    }

    fn probabilities(&self) -> Vec<f64> {
        walk::position_distribution(&self.inner.state)
    }

    fn qfi(&self) -> f64 {
        metrology::qfi_pure(&self.inner)
    }

    fn fi(&self) -> f64 {
        metrology::fi_position(&self.inner)
    }

    fn entropy(&self) -> f64 {
        walk::entanglement_entropy(&self.inner.state)
    }

    fn norm(&self) -> f64 {
        self.inner.state.norm_sqr()
    }
}

fn parse_objective(name: &str) -> PyResult<Objective> {
    match name {
        "qfi" => Ok(Objective::Qfi),
        "fi" => Ok(Objective::Fi),
        other => Err(PyValueError::new_err(format!("objective must be 'qfi' or 'fi', got {other:?}"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &MetrologyReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("theta", r.theta)?;
    d.set_item("qfi", r.qfi)?;
    d.set_item("fi", r.fi)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("entropy", r.entropy)?;
    Ok(d)
}

#[pyfunction]
fn evolve(family: &PyCoinFamily, dim: usize, theta: f64, probe: &PyProbeSpec, t: usize) -> PyResult<PyEvolution> {
    let inner = metrology::evolve_pair(&family.inner, dim, theta, &probe.inner, t).map_err(py_err)?;
    Ok(PyEvolution { inner })
}

#[pyfunction]
fn qfi(family: &PyCoinFamily, dim: usize, theta: f64, probe: &PyProbeSpec, t: usize) -> PyResult<f64> {
    Ok(evolve(family, dim, theta, probe, t)?.qfi())
}

#[pyfunction]
fn fi(family: &PyCoinFamily, dim: usize, theta: f64, probe: &PyProbeSpec, t: usize) -> PyResult<f64> {
    Ok(evolve(family, dim, theta, probe, t)?.fi())
}

#[pyfunction]
#[pyo3(signature = (family, dim, theta, probe, t, dtheta = 1e-4))]
fn qfi_fidelity(
    family: &PyCoinFamily,
    dim: usize,
    theta: f64,
    probe: &PyProbeSpec,
    t: usize,
    dtheta: f64,
) -> PyResult<f64> {
    metrology::qfi_fidelity(&family.inner, dim, theta, &probe.inner, t, dtheta).map_err(py_err)
}

/// Per-step QFI, FI, ratio and entropy for t = 1..=t_max.
#[pyfunction]
fn trajectory<'py>(
    py: Python<'py>,
    family: &PyCoinFamily,
    dim: usize,
    theta: f64,
    probe: &PyProbeSpec,
    t_max: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let reports = metrology::metrology_trajectory(&family.inner, dim, theta, &probe.inner, t_max).map_err(py_err)?;
    reports.iter().map(|r| report_dict(py, r)).collect()
}

/// Best probe for the objective; returns (probe, value).
#[pyfunction]
#[pyo3(signature = (family, dim, theta, t, objective = "qfi", seed = 0, grid = None, restarts = None))]
#[allow(clippy::too_many_arguments)]
fn optimize_probe(
    py: Python<'_>,
    family: &PyCoinFamily,
    dim: usize,
    theta: f64,
    t: usize,
    objective: &str,
    seed: u64,
    grid: Option<usize>,
    restarts: Option<usize>,
) -> PyResult<(PyProbeSpec, f64)> {
    let objective = parse_objective(objective)?;
    let defaults = OptimizeOptions::default();
    let opts = OptimizeOptions {
        seed,
        grid_resolution: grid.unwrap_or(defaults.grid_resolution),
        random_starts: restarts.unwrap_or(defaults.random_starts),
        ..defaults
    };
    let problem = ProbeProblem::new(family.inner, dim, theta, t);
    let result = py
        .detach(|| optimize::optimize_probe(&problem, objective, &opts))
        .map_err(py_err)?;
    Ok((PyProbeSpec { inner: result.best_probe }, result.best_value))
}

/// (|−M⟩ + e^{iγ}|+M⟩)/√2.
#[pyfunction]
#[pyo3(signature = (dim, gamma = 0.0))]
fn optimal_probe_z(dim: usize, gamma: f64) -> PyResult<PyProbeSpec> {
    let inner = optimize::optimal_probe_z_with_phase(dim, gamma).map_err(py_err)?;
    Ok(PyProbeSpec { inner })
}

/// Runs the oracle table and property checks; returns a summary dict.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn verify<'py>(py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let opts = VerifyOptions {
        seed,
        mutate_derivative_sign: false,
    };
    let summary = py.detach(|| run_verify(&opts));
    let d = PyDict::new(py);
    d.set_item("passed", summary.passed)?;
    d.set_item("cases_total", summary.cases_total)?;
    d.set_item("cases_failed", summary.cases_failed)?;
    d.set_item("properties_total", summary.properties_total)?;
    d.set_item("properties_failed", summary.properties_failed)?;
    d.set_item("failures", summary.failures().collect::<Vec<_>>())?;
    Ok(d)
}

#[pymodule]
mod qwalk_py {
    #[pymodule_export]
    use super::{
        evolve, fi, optimal_probe_z, optimize_probe, qfi, qfi_fidelity, trajectory, verify, PyCoinFamily,
        PyEvolution, PyProbeSpec,
    };
}
