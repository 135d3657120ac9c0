//! Python bindings for the `hjc` core crate.

use hjc_core as core;

use core::disorder::{self, DisorderSpec};
use core::etrate::{self, ETParams, Lineshape};
use core::model::CavityGauge;
use core::polaron;
use core::{quantum_ops, Detunings, ModelParams, SolverOptions, SparseHermitian, Truncation};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::NotConverged { .. } | core::Error::EnsembleFailures { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn solver_options(n_pairs: usize, tol: f64, max_iter: usize, seed: u64) -> SolverOptions {
    SolverOptions {
        n_pairs,
        tol,
        max_iter,
        seed,
        ..SolverOptions::default()
    }
}

/// Model parameters; energies in units of the vibrational frequency.
#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (n_molecules, lambda_e, omega_rabi, delta_e=0.0, m_sym_max=6, m_nonsym_max=2, m_total_max=None, gauge="paper"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_molecules: usize,
        lambda_e: f64,
        omega_rabi: f64,
        delta_e: f64,
        m_sym_max: u32,
        m_nonsym_max: u32,
        m_total_max: Option<u32>,
        gauge: &str,
    ) -> PyResult<Self> {
        let gauge = match gauge {
            "paper" => CavityGauge::Paper,
            "real" => CavityGauge::Real,
            other => return Err(PyValueError::new_err(format!("unknown gauge {other:?}"))),
        };
        let mut trunc = Truncation::new(m_sym_max, m_nonsym_max);
        trunc.m_total_max = m_total_max;
        let inner = ModelParams::new(n_molecules, lambda_e, omega_rabi)
            .with_delta_e(delta_e)
            .with_trunc(trunc)
            .with_gauge(gauge);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_molecules(&self) -> usize {
        self.inner.n_molecules
    }
    #[getter]
    fn lambda_e(&self) -> f64 {
        self.inner.lambda_e
    }
    #[getter]
    fn omega_rabi(&self) -> f64 {
        self.inner.omega_rabi
    }
    #[getter]
    fn delta_e(&self) -> f64 {
        self.inner.delta_e
    }

    fn basis_dim(&self) -> PyResult<usize> {
        Ok(core::Basis::new(&self.inner).map_err(to_py)?.dim())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Sparse Hermitian Hamiltonian in the plane-wave basis.
#[pyclass(name = "Hamiltonian")]
struct PyHamiltonian {
    inner: SparseHermitian,
}

#[pymethods]
impl PyHamiltonian {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn matvec(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.inner.apply(&x).map_err(to_py)
    }

    /// Row-major list of rows.
    fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.inner.dim();
        self.inner.to_dense().chunks(n).map(<[Complex64]>::to_vec).collect()
    }

    #[pyo3(signature = (n_pairs=1, tol=1e-9, max_iter=20_000, seed=0))]
    fn lowest_eigenpairs(&self, n_pairs: usize, tol: f64, max_iter: usize, seed: u64) -> PyResult<PyEigenResult> {
        let r = core::solver::lowest_eigenpairs_with(&self.inner, &solver_options(n_pairs, tol, max_iter, seed))
            .map_err(to_py)?;
        Ok(PyEigenResult {
            eigenvalues: r.eigenvalues,
            eigenvectors: r.eigenvectors,
            residuals: r.residuals,
            iterations: r.iterations,
            converged: r.converged,
        })
    }
}

#[pyclass(name = "EigenResult", get_all)]
struct PyEigenResult {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<Complex64>>,
    residuals: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[pyclass(name = "P0Result", get_all)]
struct PyP0Result {
    p0: f64,
    bound: f64,
    ground_energy: f64,
    residual: f64,
    dim: usize,
    degeneracy: usize,
}

#[pymethods]
impl PyP0Result {
    fn __repr__(&self) -> String {
        format!("P0Result(p0={}, bound={}, dim={})", self.p0, self.bound, self.dim)
    }
}

#[pyclass(name = "EnsembleStats", get_all)]
struct PyEnsembleStats {
    sigma: f64,
    omega_rabi: f64,
    n_ok: usize,
    n_failed: usize,
    min: f64,
    max: f64,
    mean: f64,
    std: f64,
    percentiles: Vec<f64>,
    bound: f64,
    samples: Option<Vec<f64>>,
}

#[pyclass(name = "RateResult", get_all)]
struct PyRateResult {
    rate: f64,
    reduced_rate: f64,
    n_channels: usize,
}

#[pyfunction]
#[pyo3(signature = (params, detunings=None))]
fn build_hamiltonian(params: &PyModelParams, detunings: Option<Vec<f64>>) -> PyResult<PyHamiltonian> {
    let d = detunings.map(Detunings);
    let inner = core::build_hjc(&params.inner, d.as_ref()).map_err(to_py)?;
    Ok(PyHamiltonian { inner })
}

/// Squared overlap of the ground state with the bare lower dressed state.
#[pyfunction]
#[pyo3(signature = (params, detunings=None, n_pairs=2, tol=1e-9, max_iter=20_000, seed=0))]
fn compute_p0(
    py: Python<'_>,
    params: &PyModelParams,
    detunings: Option<Vec<f64>>,
    n_pairs: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> PyResult<PyP0Result> {
    let d = detunings.map(Detunings);
    let opts = solver_options(n_pairs, tol, max_iter, seed);
    let r = py
        .detach(|| polaron::compute_p0(&params.inner, d.as_ref(), &opts))
        .map_err(to_py)?;
    Ok(PyP0Result {
        p0: r.p0,
        bound: r.bound,
        ground_energy: r.ground_energy,
        residual: r.residual,
        dim: r.dim,
        degeneracy: r.degeneracy,
    })
}

#[pyfunction]
fn p0_bound(lambda_e: f64, n_molecules: usize) -> f64 {
    polaron::p0_bound(lambda_e, n_molecules)
}

#[pyfunction]
#[pyo3(signature = (params, sigma, n_realizations, seed=0, keep_samples=false, n_pairs=2, tol=1e-9, max_iter=20_000))]
#[allow(clippy::too_many_arguments)]
fn ensemble_p0(
    py: Python<'_>,
    params: &PyModelParams,
    sigma: f64,
    n_realizations: usize,
    seed: u64,
    keep_samples: bool,
    n_pairs: usize,
    tol: f64,
    max_iter: usize,
) -> PyResult<PyEnsembleStats> {
    let spec = DisorderSpec {
        sigma,
        n_realizations,
        seed,
    };
    let opts = solver_options(n_pairs, tol, max_iter, seed);
    let s = py
        .detach(|| disorder::ensemble_p0(&params.inner, &spec, &opts, keep_samples))
        .map_err(to_py)?;
    Ok(PyEnsembleStats {
        sigma: s.sigma,
        omega_rabi: s.omega_rabi,
        n_ok: s.n_ok,
        n_failed: s.n_failed,
        min: s.min,
        max: s.max,
        mean: s.mean,
        std: s.std,
        percentiles: s.percentiles.to_vec(),
        bound: s.bound,
        samples: s.samples,
    })
}

/// `⟨m|D(λ)|n⟩` for harmonic-oscillator number states.
#[pyfunction]
fn displacement_element(m: u32, n: u32, lambda_: f64) -> f64 {
    quantum_ops::displacement_element(m, n, lambda_)
}

#[pyfunction]
fn fc_factor(m: u32, n: u32, lambda_rel: f64) -> f64 {
    quantum_ops::fc_factor(m, n, lambda_rel)
}

#[pyfunction]
#[pyo3(signature = (lambda_d, lambda_a, n_molecules=1.0, delta_e_drive=0.0, kbt=0.1, gamma_v=0.01, v_coh=0.001, m_max=8, include_stokes_shift=true, lineshape="gaussian"))]
#[allow(clippy::too_many_arguments)]
fn et_params(
    lambda_d: f64,
    lambda_a: f64,
    n_molecules: f64,
    delta_e_drive: f64,
    kbt: f64,
    gamma_v: f64,
    v_coh: f64,
    m_max: u32,
    include_stokes_shift: bool,
    lineshape: &str,
) -> PyResult<PyETParams> {
    let lineshape = match lineshape {
        "gaussian" => Lineshape::Gaussian,
        "lorentzian" => Lineshape::Lorentzian,
        other => return Err(PyValueError::new_err(format!("unknown lineshape {other:?}"))),
    };
    let mut p = ETParams::new(lambda_d, lambda_a)
        .with_n(n_molecules)
        .with_drive(delta_e_drive);
    p.kbt = kbt;
    p.gamma_v = gamma_v;
    p.v_coh = v_coh;
    p.m_max = m_max;
    p.include_stokes_shift = include_stokes_shift;
    p.lineshape = lineshape;
    p.validate().map_err(to_py)?;
    Ok(PyETParams { inner: p })
}

#[pyclass(name = "ETParams", from_py_object)]
#[derive(Clone)]
struct PyETParams {
    inner: ETParams,
}

#[pymethods]
impl PyETParams {
    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn rate(r: etrate::RateResult) -> PyRateResult {
    PyRateResult {
        rate: r.rate,
        reduced_rate: r.reduced_rate,
        n_channels: r.channels.len(),
    }
}

#[pyfunction]
fn et_rate_free(p: &PyETParams) -> PyResult<PyRateResult> {
    etrate::et_rate_free(&p.inner).map(rate).map_err(to_py)
}

#[pyfunction]
fn et_rate_cavity(p: &PyETParams) -> PyResult<PyRateResult> {
    etrate::et_rate_cavity(&p.inner).map(rate).map_err(to_py)
}

/// Large-N, low-temperature limit of `k_cav / k_free`.
#[pyfunction]
fn limit_ratio(lambda_d: f64, lambda_a: f64) -> f64 {
    etrate::eq7_ratio(lambda_d, lambda_a)
}

#[pymodule]
fn hjc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyEigenResult>()?;
    m.add_class::<PyP0Result>()?;
    m.add_class::<PyEnsembleStats>()?;
    m.add_class::<PyETParams>()?;
    m.add_class::<PyRateResult>()?;
    m.add_function(wrap_pyfunction!(build_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(compute_p0, m)?)?;
    m.add_function(wrap_pyfunction!(p0_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_p0, m)?)?;
    m.add_function(wrap_pyfunction!(displacement_element, m)?)?;
    m.add_function(wrap_pyfunction!(fc_factor, m)?)?;
    m.add_function(wrap_pyfunction!(et_params, m)?)?;
    m.add_function(wrap_pyfunction!(et_rate_free, m)?)?;
    m.add_function(wrap_pyfunction!(et_rate_cavity, m)?)?;
    m.add_function(wrap_pyfunction!(limit_ratio, m)?)?;
    Ok(())
}
