//! Python module `avwiretap_py`. Matrices cross the boundary as lists of
//! rows of Python complex numbers.

use avwiretap::channel::{canonicalize_eve, EveState, EveTrace, MainChannel, PowerConfig};
use avwiretap::codebook::{binning_params, sample_codebook, BinningParams, Codebook, SecrecyMode, ToyCaps};
use avwiretap::estimators::{estimate_decode_error, estimate_leakage, DecodeTarget, NoiseModel};
use avwiretap::quantization::{schedule_params, truncation_exponent, truncation_mass};
use avwiretap::rates::{converse_rate_bound, main_mutual_info, sdof, secrecy_rate_at};
use avwiretap::region::{bc_region, default_alpha_grid, mac_region, RateRegion};
use avwiretap::{ComplexMat, Convention, WiretapError};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<Complex64>>;

fn py_err(e: WiretapError) -> PyErr {
    match e {
        WiretapError::ResourceCap(m) => PyRuntimeError::new_err(format!("resource cap exceeded: {m}")),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn mat(rows: &Rows) -> PyResult<ComplexMat> {
    ComplexMat::from_rows(rows).map_err(py_err)
}

fn rows(m: &ComplexMat) -> Rows {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect()).collect()
}

fn conv(name: &str) -> PyResult<Convention> {
    name.parse().map_err(PyValueError::new_err)
}

fn trace_of(states: &[PyRef<'_, PyEveState>]) -> PyResult<EveTrace> {
    EveTrace::new(states.iter().map(|s| s.0.clone()).collect()).map_err(py_err)
}

#[pyclass(name = "MainChannel", frozen)]
struct PyMainChannel(MainChannel);

#[pymethods]
impl PyMainChannel {
    #[new]
    fn new(h: Rows) -> PyResult<Self> {
        MainChannel::new(mat(&h)?).map(Self).map_err(py_err)
    }

    #[getter]
    fn n_t(&self) -> usize {
        self.0.n_t()
    }

    #[getter]
    fn n_r(&self) -> usize {
        self.0.n_r()
    }

    #[getter]
    fn singular_values(&self) -> Vec<f64> {
        self.0.singular_values().to_vec()
    }

    #[pyo3(signature = (pbar, eps_p = 0.0, convention = "full"))]
    fn main_mutual_info(&self, pbar: f64, eps_p: f64, convention: &str) -> PyResult<f64> {
        let pc = PowerConfig::for_channel(&self.0, pbar, eps_p).map_err(py_err)?;
        main_mutual_info(&self.0, &pc, conv(convention)?).map_err(py_err)
    }

    #[pyo3(signature = (pbar, n_e, convention = "full"))]
    fn secrecy_rate(&self, pbar: f64, n_e: usize, convention: &str) -> PyResult<f64> {
        secrecy_rate_at(&self.0, pbar, n_e, conv(convention)?).map_err(py_err)
    }

    #[pyo3(signature = (pbar, n_e, convention = "full"))]
    fn converse_bound(&self, pbar: f64, n_e: usize, convention: &str) -> PyResult<f64> {
        Ok(converse_rate_bound(&self.0, pbar, n_e, conv(convention)?))
    }
}

#[pyclass(name = "EveState", frozen)]
struct PyEveState(EveState);

#[pymethods]
impl PyEveState {
    /// Canonical form of an arbitrary eavesdropper matrix.
    #[staticmethod]
    fn canonicalize(h: Rows) -> PyResult<Self> {
        canonicalize_eve(&mat(&h)?).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn selector(n_e: usize, n_t: usize) -> PyResult<Self> {
        EveState::selector(n_e, n_t).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn haar(n_e: usize, n_t: usize, seed: u64) -> PyResult<Self> {
        let mut rng = avwiretap::mc::stream(seed, avwiretap::mc::op::TRACE, 0);
        EveState::haar(n_e, n_t, &mut rng).map(Self).map_err(py_err)
    }

    #[getter]
    fn matrix(&self) -> Rows {
        rows(self.0.matrix())
    }
}

#[pyclass(name = "PowerConfig", frozen)]
struct PyPowerConfig(PowerConfig);

#[pymethods]
impl PyPowerConfig {
    #[new]
    fn new(pbar: f64, eps_p: f64, n_tr: usize, n_t: usize) -> PyResult<Self> {
        PowerConfig::new(pbar, eps_p, n_tr, n_t).map(Self).map_err(py_err)
    }

    /// Configuration with effective power `p` directly.
    #[staticmethod]
    fn from_power(p: f64, eps_p: f64, n_tr: usize, n_t: usize) -> PyResult<Self> {
        PowerConfig::from_power(p, eps_p, n_tr, n_t).map(Self).map_err(py_err)
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p()
    }

    #[getter]
    fn p_prime(&self) -> f64 {
        self.0.p_prime()
    }

    #[getter]
    fn per_antenna_var(&self) -> f64 {
        self.0.per_antenna_var()
    }
}

#[pyclass(name = "Codebook", frozen)]
struct PyCodebook(Codebook);

#[pymethods]
impl PyCodebook {
    /// Samples a truncated-Gaussian binning codebook with `n_i` bins of
    /// `n_j` codewords.
    #[staticmethod]
    fn sample(n: usize, n_i: usize, n_j: usize, power: &PyPowerConfig, seed: u64) -> PyResult<Self> {
        let bp = BinningParams {
            n,
            rate: ((n_i * n_j) as f64).log2() / n as f64,
            n_i,
            n_j,
            delta_n: 0.0,
            delta_prime: 0.0,
            mode: SecrecyMode::Strong,
        };
        sample_codebook(&bp, &power.0, &ToyCaps::default(), seed)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn n_i(&self) -> usize {
        self.0.n_i()
    }

    #[getter]
    fn n_j(&self) -> usize {
        self.0.n_j()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn acceptance_rate(&self) -> Option<f64> {
        self.0.acceptance_rate()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn codeword(&self, i: usize, j: usize) -> PyResult<Rows> {
        if i >= self.0.n_i() || j >= self.0.n_j() {
            return Err(PyValueError::new_err("codeword index out of range"));
        }
        Ok(rows(self.0.codeword(i, j)))
    }

    /// `(rate, stderr)` of the legitimate receiver's block error.
    fn main_error(&self, channel: &PyMainChannel, trials: usize, seed: u64) -> PyResult<(f64, f64)> {
        let e = estimate_decode_error(&self.0, DecodeTarget::Main(&channel.0), NoiseModel::Gaussian, trials, seed)
            .map_err(py_err)?;
        Ok((e.rate, e.stderr))
    }

    /// `(rate, stderr)` of the eavesdropper's in-bin error given the bin.
    fn eve_error(&self, trace: Vec<PyRef<'_, PyEveState>>, trials: usize, seed: u64) -> PyResult<(f64, f64)> {
        let tr = trace_of(&trace)?;
        let e = estimate_decode_error(&self.0, DecodeTarget::Eve(&tr), NoiseModel::Gaussian, trials, seed)
            .map_err(py_err)?;
        Ok((e.rate, e.stderr))
    }

    /// Variational-distance and mutual-information leakage estimates.
    fn leakage<'py>(
        &self,
        py: Python<'py>,
        trace: Vec<PyRef<'_, PyEveState>>,
        power: &PyPowerConfig,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let tr = trace_of(&trace)?;
        let est = estimate_leakage(&self.0, &tr, &power.0, samples, seed).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("d_hat", est.d_hat)?;
        d.set_item("stderr", est.stderr)?;
        d.set_item("mi_hat", est.mi_hat)?;
        d.set_item("mi_stderr", est.mi_stderr)?;
        d.set_item("leakage_bound", est.leakage_bound)?;
        Ok(d)
    }
}

fn region_dict<'py>(py: Python<'py>, r: &RateRegion) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("raw", r.raw_points.iter().map(|p| (p.r1, p.r2)).collect::<Vec<_>>())?;
    d.set_item("hull", r.hull.iter().map(|p| (p.r1, p.r2)).collect::<Vec<_>>())?;
    d.set_item("max_sum_rate", r.max_sum_rate())?;
    Ok(d)
}

#[pyfunction(name = "sdof")]
fn py_sdof(n_t: usize, n_r: usize, n_e: usize) -> usize {
    sdof(n_t, n_r, n_e)
}

#[pyfunction(name = "mac_region")]
#[pyo3(signature = (h1, h2, pbar, n_e, convention = "full"))]
fn py_mac_region<'py>(
    py: Python<'py>,
    h1: &PyMainChannel,
    h2: &PyMainChannel,
    pbar: f64,
    n_e: usize,
    convention: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let r = mac_region(&h1.0, &h2.0, pbar, n_e, &default_alpha_grid(), conv(convention)?).map_err(py_err)?;
    region_dict(py, &r)
}

#[pyfunction(name = "bc_region")]
#[pyo3(signature = (h1, h2, pbar, n_e, convention = "full"))]
fn py_bc_region<'py>(
    py: Python<'py>,
    h1: &PyMainChannel,
    h2: &PyMainChannel,
    pbar: f64,
    n_e: usize,
    convention: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let r = bc_region(&h1.0, &h2.0, pbar, n_e, conv(convention)?).map_err(py_err)?;
    region_dict(py, &r)
}

#[pyfunction(name = "truncation_mass")]
fn py_truncation_mass(n: usize, n_t: usize, p: f64, eps_p: f64) -> PyResult<f64> {
    truncation_mass(n, n_t, p, eps_p).map_err(py_err)
}

#[pyfunction(name = "truncation_exponent")]
fn py_truncation_exponent(eps_p: f64, n_t: usize) -> PyResult<f64> {
    truncation_exponent(eps_p, n_t).map_err(py_err)
}

/// `(n_i, n_j, rate)` of the binning construction.
#[pyfunction(name = "binning_params")]
#[pyo3(signature = (i_main, i_eve, n, delta_n, delta_prime, mode = "strong"))]
fn py_binning_params(
    i_main: f64,
    i_eve: f64,
    n: usize,
    delta_n: f64,
    delta_prime: f64,
    mode: &str,
) -> PyResult<(usize, usize, f64)> {
    let mode: SecrecyMode = mode.parse().map_err(PyValueError::new_err)?;
    let bp = binning_params(i_main, i_eve, n, delta_n, delta_prime, mode).map_err(py_err)?;
    Ok((bp.n_i, bp.n_j, bp.rate))
}

#[pyfunction(name = "schedule")]
fn py_schedule<'py>(
    py: Python<'py>,
    eps_prime: f64,
    n: u64,
    c_prime: f64,
    alpha_eps: f64,
    alpha_eps_p: f64,
    e_val: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = schedule_params(eps_prime, n, c_prime, alpha_eps, alpha_eps_p, e_val).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("eps_n", s.eps_n)?;
    d.set_item("log_k", s.log_k)?;
    d.set_item("log_m", s.log_m)?;
    d.set_item("resolvability", s.flags.resolvability)?;
    d.set_item("info_tail", s.flags.info_tail)?;
    d.set_item("truncation", s.flags.truncation)?;
    d.set_item("error_exponent", s.flags.error_exponent)?;
    d.set_item("resolvability_length", s.flags.resolvability_length)?;
    d.set_item("grid_length", s.flags.grid_length)?;
    d.set_item("min_n_resolvability", s.min_n_resolvability)?;
    d.set_item("min_n_grid", s.min_n_grid)?;
    Ok(d)
}

#[pymodule]
fn avwiretap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMainChannel>()?;
    m.add_class::<PyEveState>()?;
    m.add_class::<PyPowerConfig>()?;
    m.add_class::<PyCodebook>()?;
    m.add_function(wrap_pyfunction!(py_sdof, m)?)?;
    m.add_function(wrap_pyfunction!(py_mac_region, m)?)?;
    m.add_function(wrap_pyfunction!(py_bc_region, m)?)?;
    m.add_function(wrap_pyfunction!(py_truncation_mass, m)?)?;
    m.add_function(wrap_pyfunction!(py_truncation_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(py_binning_params, m)?)?;
    m.add_function(wrap_pyfunction!(py_schedule, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
