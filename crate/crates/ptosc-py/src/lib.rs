//! Python bindings for the ptosc toolkit.
//!
//! Exposes the scenario types and the main operations: effective-gain
//! algebra, full and eliminated moment dynamics, Gaussian fidelity, PT
//! spectra, probe response, and negativity traces. Complex values cross
//! the boundary as Python complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ptosc::elimination;
use ptosc::entanglement;
use ptosc::moments;
use ptosc::omit;
use ptosc::params;
use ptosc::ptcore;

fn err(e: ptosc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn c(v: Complex64) -> (f64, f64) {
    (v.re, v.im)
}

/// Linearized cavity + oscillator scenario.
#[pyclass(name = "SystemParams")]
#[derive(Clone)]
struct PySystemParams(params::SystemParams);

#[pymethods]
impl PySystemParams {
    #[new]
    fn new(
        omega_m: f64,
        kappa: f64,
        gamma: f64,
        delta: f64,
        g_lin: f64,
        n_th: f64,
    ) -> PyResult<Self> {
        params::SystemParams::new(omega_m, kappa, gamma, delta, g_lin, n_th)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn omega_m(&self) -> f64 {
        self.0.omega_m
    }

    #[getter]
    fn g_lin(&self) -> f64 {
        self.0.g_lin
    }

    fn elimination_trusted(&self) -> bool {
        self.0.elimination_trusted()
    }

    fn with_coupling(&self, g_lin: f64) -> PyResult<Self> {
        let mut p = self.0;
        p.g_lin = g_lin;
        p.validate().map_err(err)?;
        Ok(Self(p))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Eliminated-model constants as a dict.
#[pyfunction]
fn effective_params(py: Python<'_>, p: &PySystemParams) -> PyResult<PyObject> {
    let eff = params::effective_params(&p.0);
    let d = pyo3::types::PyDict::new_bound(py);
    d.set_item("omega_eff", eff.omega_eff)?;
    d.set_item("gamma_eff", eff.gamma_eff)?;
    d.set_item("n_th_eff", eff.n_th_eff)?;
    d.set_item("heating_rate", eff.heating_rate)?;
    Ok(d.into())
}

/// Coupling at which the effective dissipation equals `-target_gain`.
#[pyfunction]
fn balance_coupling(p: &PySystemParams, target_gain: f64) -> PyResult<f64> {
    params::balance_coupling(&p.0, target_gain).map_err(err)
}

/// Modified oscillator initial occupation for the eliminated model,
/// starting from a coherent-like oscillator of occupation `n_b` with an
/// empty cavity.
#[pyfunction]
fn modified_initial_occupation(p: &PySystemParams, n_b: f64) -> PyResult<f64> {
    params::modified_initial(&p.0, &params::InitialMoments::coherent_oscillator(n_b))
        .map(|m| m.n_b)
        .map_err(err)
}

/// Full-model trajectory from a coherent-like oscillator of occupation
/// `n_b0`; returns `(times, n_b, |b|, n_a)`.
#[pyfunction]
fn evolve_full(
    p: &PySystemParams,
    n_b0: f64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let init = moments::MomentState::from_initial_moments(
        &params::InitialMoments::coherent_oscillator(n_b0),
    )
    .map_err(err)?;
    let traj = moments::evolve(&p.0, &init, t_end, dt, sample_every).map_err(err)?;
    let times = traj.times().to_vec();
    let n_b = traj.states().iter().map(|s| s.n_b()).collect();
    let b = traj.states().iter().map(|s| s.mean[1].norm()).collect();
    let n_a = traj.states().iter().map(|s| s.n_a()).collect();
    Ok((times, n_b, b, n_a))
}

/// Eliminated-model trajectory on a time grid, with the corrected bath;
/// returns `(n_b, |b|)`.
#[pyfunction]
fn evolve_effective(
    p: &PySystemParams,
    n_b0: f64,
    times: Vec<f64>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let eff = params::effective_params(&p.0);
    let init = params::modified_initial(&p.0, &params::InitialMoments::coherent_oscillator(n_b0))
        .map_err(err)?;
    let traj = elimination::evolve_effective(&eff, &init, &times).map_err(err)?;
    Ok((
        traj.states().iter().map(|s| s.n_b).collect(),
        traj.states().iter().map(|s| s.b_mean.norm()).collect(),
    ))
}

/// Uhlmann fidelity of two single-mode Gaussian states given as
/// `(b, n_b, bb)` triples with complex `b` and `bb`.
#[pyfunction]
fn gaussian_fidelity(
    a: (Complex64, f64, Complex64),
    b: (Complex64, f64, Complex64),
) -> PyResult<f64> {
    let ta = params::OscillatorMoments::new(a.0, a.1, a.2);
    let tb = params::OscillatorMoments::new(b.0, b.1, b.2);
    elimination::gaussian_fidelity(&ta, &tb).map_err(err)
}

/// PT dimer scenario.
#[pyclass(name = "PtDimerParams")]
#[derive(Clone)]
struct PyPtDimerParams(params::PtDimerParams);

#[pymethods]
impl PyPtDimerParams {
    #[new]
    fn new(omega: f64, gamma_loss: f64, gamma_gain: f64, mu: f64) -> PyResult<Self> {
        params::PtDimerParams::new(omega, gamma_loss, gamma_gain, mu)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn gamma_eff(&self) -> f64 {
        self.0.gamma_eff()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Dimer eigenvalues `(λ+, λ-)` at the stored coupling, as (re, im) pairs.
#[pyfunction]
fn pt_eigenvalues(p: &PyPtDimerParams) -> PyResult<((f64, f64), (f64, f64))> {
    let s = ptcore::eigenvalues(&p.0).map_err(err)?;
    Ok((c(s.lambda_plus), c(s.lambda_minus)))
}

/// Exceptional-point coupling `(γ+γ')/4`.
#[pyfunction]
fn exceptional_point(p: &PyPtDimerParams) -> f64 {
    ptcore::exceptional_point(&p.0)
}

/// Logarithmic negativity trace of the dimer from a rotated two-mode
/// squeezed vacuum with `E_n(0) = en_initial`; returns `(times, en)`.
#[pyfunction]
fn negativity_trace(
    p: &PyPtDimerParams,
    squeezing_r: f64,
    en_initial: f64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let theta =
        entanglement::rotation_angle_for_negativity(squeezing_r, en_initial).map_err(err)?;
    let init = entanglement::rotated_tmsv_initial(squeezing_r, theta);
    let tr = entanglement::negativity_trace(&p.0, &init, t_end, dt, sample_every).map_err(err)?;
    Ok((tr.times, tr.en))
}

/// Negativity of a two-mode squeezed vacuum (equals `2r`).
#[pyfunction]
fn tmsv_negativity(r: f64) -> PyResult<f64> {
    let st = entanglement::tmsv_initial(r);
    entanglement::log_negativity(&entanglement::to_covariance(&st).map_err(err)?).map_err(err)
}

/// OMIT scenario.
#[pyclass(name = "OmitParams")]
#[derive(Clone)]
struct PyOmitParams(omit::OmitParams);

#[pymethods]
impl PyOmitParams {
    #[new]
    #[allow(clippy::too_many_arguments)]
    fn new(
        delta: f64,
        omega_m: f64,
        mu: f64,
        kappa: f64,
        gamma: f64,
        gamma_gain: f64,
        g0: f64,
        drive: f64,
    ) -> PyResult<Self> {
        let p = omit::OmitParams {
            delta,
            omega_m,
            mu,
            kappa,
            gamma,
            gamma_gain,
            g0,
            drive,
        };
        p.validate().map_err(err)?;
        Ok(Self(p))
    }

    #[getter]
    fn omega_m_eff(&self) -> f64 {
        self.0.omega_m_eff()
    }

    #[getter]
    fn gamma_m(&self) -> f64 {
        self.0.gamma_m()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Probe response `χ` at one probe detuning, as an (re, im) pair.
#[pyfunction]
fn omit_chi(p: &PyOmitParams, delta_probe: f64) -> PyResult<(f64, f64)> {
    omit::response(&p.0, delta_probe)
        .map(|r| c(r.chi))
        .map_err(err)
}

/// Transparency-window depth of the response on a probe grid.
#[pyfunction]
fn omit_window_depth(p: &PyOmitParams, grid: Vec<f64>) -> PyResult<f64> {
    Ok(omit::window_depth(
        &omit::spectrum(&p.0, &grid).map_err(err)?,
    ))
}

/// Smallest coupling reaching `target_depth` on the default fine grid.
#[pyfunction]
fn omit_required_coupling(p: &PyOmitParams, target_depth: f64) -> PyResult<f64> {
    omit::required_coupling(&p.0, target_depth, &omit::default_depth_grid(), 0.02).map_err(err)
}

#[pymodule]
fn ptosc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyPtDimerParams>()?;
    m.add_class::<PyOmitParams>()?;
    m.add_function(wrap_pyfunction!(effective_params, m)?)?;
    m.add_function(wrap_pyfunction!(balance_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(modified_initial_occupation, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_full, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_effective, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(pt_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(exceptional_point, m)?)?;
    m.add_function(wrap_pyfunction!(negativity_trace, m)?)?;
    m.add_function(wrap_pyfunction!(tmsv_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(omit_chi, m)?)?;
    m.add_function(wrap_pyfunction!(omit_window_depth, m)?)?;
    m.add_function(wrap_pyfunction!(omit_required_coupling, m)?)?;
    Ok(())
}
