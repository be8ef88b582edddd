//! Scenario file schemas and the named figure presets.
//!
//! Scenarios are flat JSON objects, snake_case, one schema per subcommand.
//! Complex initial moments are split into `_re`/`_im` pairs. Every field
//! has a preset default, so a scenario file only lists overrides.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ptosc::params::{InitialMoments, PtDimerParams, SystemParams};

fn is_false(b: &bool) -> bool {
    !*b
}

/// `evolve`: full vs eliminated dynamics plus fidelity (heating scenario).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveScenario {
    pub omega_m: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub delta: f64,
    pub g_lin: f64,
    pub n_th: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Samples before this time are dropped from the fidelity average.
    pub transient_cutoff: f64,
    /// Disable the bath-occupancy correction of the eliminated model
    /// (debug flag; reverses the heat-flow direction).
    #[serde(default, skip_serializing_if = "is_false")]
    pub raw_bath: bool,
    // optional initial-moment overrides; defaults are the coherent-like
    // oscillator state of occupation n_th with an empty cavity
    #[serde(default)]
    pub b_mean_re: Option<f64>,
    #[serde(default)]
    pub b_mean_im: Option<f64>,
    #[serde(default)]
    pub n_b: Option<f64>,
    #[serde(default)]
    pub bb_re: Option<f64>,
    #[serde(default)]
    pub bb_im: Option<f64>,
    #[serde(default)]
    pub n_a: Option<f64>,
    #[serde(default)]
    pub ab_re: Option<f64>,
    #[serde(default)]
    pub ab_im: Option<f64>,
    #[serde(default)]
    pub a_mean_re: Option<f64>,
    #[serde(default)]
    pub a_mean_im: Option<f64>,
}

impl EvolveScenario {
    pub fn fig2() -> Self {
        Self {
            omega_m: 1.0,
            kappa: 0.1,
            gamma: 1e-5,
            delta: 3.0,
            g_lin: 0.04,
            n_th: 1000.0,
            t_end: 500.0,
            dt: 0.01,
            sample_every: 50,
            transient_cutoff: 50.0,
            raw_bath: false,
            b_mean_re: None,
            b_mean_im: None,
            n_b: None,
            bb_re: None,
            bb_im: None,
            n_a: None,
            ab_re: None,
            ab_im: None,
            a_mean_re: None,
            a_mean_im: None,
        }
    }

    pub fn system(&self) -> ptosc::Result<SystemParams> {
        SystemParams::new(
            self.omega_m,
            self.kappa,
            self.gamma,
            self.delta,
            self.g_lin,
            self.n_th,
        )
    }

    pub fn initial(&self) -> InitialMoments {
        let mut init = InitialMoments::coherent_oscillator(self.n_th);
        let c = |re: Option<f64>, im: Option<f64>, dflt: Complex64| {
            Complex64::new(re.unwrap_or(dflt.re), im.unwrap_or(dflt.im))
        };
        init.b_mean = c(self.b_mean_re, self.b_mean_im, init.b_mean);
        init.n_b = self.n_b.unwrap_or(init.n_b);
        init.bb = c(self.bb_re, self.bb_im, init.bb);
        init.n_a = self.n_a.unwrap_or(init.n_a);
        init.ab = c(self.ab_re, self.ab_im, init.ab);
        init.a_mean = c(self.a_mean_re, self.a_mean_im, init.a_mean);
        init
    }
}

/// `gain-sweep`: Γ_eff and ω_eff over a coupling grid for several
/// detuning/damping families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSweepScenario {
    pub omega_m: f64,
    pub kappa: f64,
    pub n_th: f64,
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub g_min: f64,
    pub g_max: f64,
    pub g_steps: usize,
}

impl GainSweepScenario {
    pub fn fig2() -> Self {
        Self {
            omega_m: 1.0,
            kappa: 0.1,
            n_th: 1000.0,
            deltas: vec![2.0, 3.0],
            gammas: vec![1e-5, 5e-4],
            g_min: 0.0,
            g_max: 0.08,
            g_steps: 400,
        }
    }
}

/// `pt-spectrum`: dimer eigenvalues over a coupling grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtSpectrumScenario {
    pub omega: f64,
    pub gamma_loss: f64,
    pub gamma_gain: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_steps: usize,
}

impl PtSpectrumScenario {
    pub fn fig3() -> Self {
        Self {
            omega: 1.0,
            gamma_loss: 0.004,
            gamma_gain: 0.004,
            mu_min: 0.0,
            mu_max: 0.01,
            mu_steps: 1000,
        }
    }

    pub fn dimer(&self) -> ptosc::Result<PtDimerParams> {
        PtDimerParams::new(
            self.omega,
            self.gamma_loss,
            self.gamma_gain,
            self.mu_max.max(0.0),
        )
    }
}

/// `omit`: probe response spectra and transparency-depth maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmitScenario {
    pub delta: f64,
    pub omega_m: f64,
    pub mu: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_gain: f64,
    pub g0: f64,
    pub drive: f64,
    /// Depth target for the required-coupling search.
    pub target_depth: f64,
    /// Couplings per decade in the depth map.
    pub map_g0_points: usize,
    /// γ_m values in the depth map (from γ' = γ down to γ' = 0).
    pub map_gamma_m_points: usize,
}

impl OmitScenario {
    pub fn fig5() -> Self {
        Self {
            delta: 1.0,
            omega_m: 1.0,
            mu: 0.02,
            kappa: 0.15,
            gamma: 0.02,
            gamma_gain: 0.02,
            g0: 5e-4,
            drive: 10.0,
            target_depth: 0.9,
            map_g0_points: 25,
            map_gamma_m_points: 5,
        }
    }

    pub fn params(&self) -> ptosc::omit::OmitParams {
        ptosc::omit::OmitParams {
            delta: self.delta,
            omega_m: self.omega_m,
            mu: self.mu,
            kappa: self.kappa,
            gamma: self.gamma,
            gamma_gain: self.gamma_gain,
            g0: self.g0,
            drive: self.drive,
        }
    }
}

/// `entangle`: negativity evolution and the dissipation sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleScenario {
    pub omega: f64,
    /// Loss rate γ of oscillator 1 (also the top of the γ_eff sweep).
    pub gamma: f64,
    /// Gain rate γ' for the single plotted trajectory.
    pub gamma_gain: f64,
    pub mu: f64,
    /// Squeezing of the initial two-mode squeezed state.
    pub squeezing_r: f64,
    /// Initial negativity; the squeezed state is rotated along the
    /// tunneling orbit until `E_n(0)` matches.
    pub en_initial: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Number of γ_eff points in the sweep (0 disables the sweep).
    pub sweep_points: usize,
}

impl EntangleScenario {
    pub fn fig6() -> Self {
        Self {
            omega: 1.0,
            gamma: 0.004,
            gamma_gain: 0.004,
            mu: 0.02,
            squeezing_r: 0.11,
            en_initial: 0.1,
            t_end: 200.0,
            dt: 0.01,
            sample_every: 50,
            sweep_points: 10,
        }
    }

    pub fn dimer(&self, gamma_gain: f64) -> ptosc::Result<PtDimerParams> {
        PtDimerParams::new(self.omega, self.gamma, gamma_gain, self.mu)
    }
}

/// `oracle-check`: Fock-space cross-validation of the moment engines.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleScenario {
    /// "optomech" or "dimer".
    pub model: String,
    pub cutoff_a: usize,
    pub cutoff_b: usize,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    // optomech parameters
    #[serde(default)]
    pub omega_m: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub g_lin: Option<f64>,
    #[serde(default)]
    pub n_th: Option<f64>,
    #[serde(default)]
    pub alpha_b_re: Option<f64>,
    #[serde(default)]
    pub alpha_b_im: Option<f64>,
    // dimer parameters
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub gamma_loss: Option<f64>,
    #[serde(default)]
    pub gamma_gain: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub squeezing_r: Option<f64>,
}

impl OracleScenario {
    pub fn optomech_default() -> Self {
        Self {
            model: "optomech".into(),
            cutoff_a: 12,
            cutoff_b: 12,
            t_end: 5.0,
            dt: 0.002,
            sample_every: 250,
            omega_m: Some(1.0),
            kappa: Some(1.0),
            gamma: Some(0.01),
            delta: Some(3.0),
            g_lin: Some(0.05),
            n_th: Some(0.0),
            alpha_b_re: Some(1.0),
            alpha_b_im: Some(0.0),
            omega: None,
            gamma_loss: None,
            gamma_gain: None,
            mu: None,
            squeezing_r: None,
        }
    }

    pub fn dimer_default() -> Self {
        Self {
            model: "dimer".into(),
            cutoff_a: 12,
            cutoff_b: 12,
            t_end: 50.0,
            dt: 0.01,
            sample_every: 500,
            omega_m: None,
            kappa: None,
            gamma: None,
            delta: None,
            g_lin: None,
            n_th: None,
            alpha_b_re: None,
            alpha_b_im: None,
            omega: Some(1.0),
            gamma_loss: Some(0.004),
            gamma_gain: Some(0.004),
            mu: Some(0.02),
            squeezing_r: Some(0.05),
        }
    }
}
