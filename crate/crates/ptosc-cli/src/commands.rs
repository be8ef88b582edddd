//! Subcommand runners. Each produces a set of named output files plus a
//! JSON summary; nothing touches the filesystem until a run has fully
//! succeeded, so a failed run leaves no partial outputs.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use ptosc::elimination::{evolve_effective, evolve_effective_raw_bath, fidelity_trace};
use ptosc::entanglement::{
    death_time, log_negativity, negativity_trace, rotated_tmsv_initial,
    rotation_angle_for_negativity, time_avg, to_covariance,
};
use ptosc::io;
use ptosc::moments::{evolve, reduced_oscillator, MomentState};
use ptosc::omit::{
    default_depth_grid, default_spectrum_grid, required_coupling, spectrum, window_center,
    window_depth,
};
use ptosc::oracle::{
    compare_dimer, compare_optomech, fock_evolve, FockConfig, FockInit, FockModel, ModeInit,
};
use ptosc::params::{balance_coupling, effective_params, modified_initial, SystemParams};
use ptosc::ptcore::{exceptional_point, sweep};

use crate::scenarios::*;

/// Error class determines the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inadmissible scenario (exit 1).
    Scenario(String),
    /// Numerical failure during the run (exit 2).
    Run(ptosc::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Scenario(m) => write!(f, "scenario error: {m}"),
            CliError::Run(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

fn scenario_err(e: ptosc::Error) -> CliError {
    CliError::Scenario(e.to_string())
}

pub struct Outputs {
    /// `(file name, contents)` pairs, written by the caller on success.
    pub files: Vec<(String, String)>,
    pub summary: Value,
}

impl Outputs {
    fn new(summary: Value) -> Self {
        Self {
            files: Vec::new(),
            summary,
        }
    }

    fn push(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }
}

pub fn run_evolve(sc: &EvolveScenario) -> Result<Outputs, CliError> {
    let p = sc.system().map_err(scenario_err)?;
    let init = sc.initial();
    let state0 = MomentState::from_initial_moments(&init).map_err(scenario_err)?;
    let full = evolve(&p, &state0, sc.t_end, sc.dt, sc.sample_every).map_err(CliError::Run)?;

    let eff = effective_params(&p);
    let eff_init = modified_initial(&p, &init).map_err(scenario_err)?;
    let eff_traj = if sc.raw_bath {
        evolve_effective_raw_bath(&eff, p.n_th, &eff_init, full.times())
    } else {
        evolve_effective(&eff, &eff_init, full.times())
    }
    .map_err(CliError::Run)?;

    let reduced = full.map(reduced_oscillator);
    let ft = fidelity_trace(&reduced, &eff_traj).map_err(CliError::Run)?;
    let avg_f = ft.time_averaged(sc.transient_cutoff);

    let mut max_rel: f64 = 0.0;
    for ((t, st), e) in full.iter().zip(eff_traj.states().iter()) {
        if t >= sc.transient_cutoff {
            max_rel = max_rel.max((st.n_b() - e.n_b).abs() / st.n_b().max(1.0));
        }
    }

    let mut out = Outputs::new(json!({
        "gamma_eff": eff.gamma_eff,
        "omega_eff": eff.omega_eff,
        "n_th_eff": eff.n_th_eff,
        "heating_rate": eff.heating_rate,
        "elimination_trusted": p.elimination_trusted(),
        "time_avg_fidelity": avg_f,
        "max_rel_nb_dev": max_rel,
       "transient_cutoff": sc.transient_cutoff,
    }));
    out.push("full.csv", io::moment_trajectory_csv(&full));
    out.push("effective.csv", io::oscillator_trajectory_csv(&eff_traj));
    out.push("fidelity.csv", io::fidelity_csv(&ft));
    Ok(out)
}

pub fn run_gain_sweep(sc: &GainSweepScenario) -> Result<Outputs, CliError> {
    if sc.g_steps < 2 || sc.deltas.is_empty() || sc.gammas.is_empty() {
        return Err(CliError::Scenario(
            "need g_steps >= 2 and nonempty grids".into(),
        ));
    }
    let mut families = Vec::new();
    for &gamma in &sc.gammas {
        for &delta in &sc.deltas {
            let p = SystemParams::new(sc.omega_m, sc.kappa, gamma, delta, 0.0, sc.n_th)
                .map_err(scenario_err)?;
            families.push(p);
        }
    }
    let rows: Vec<(f64, f64, f64, f64, f64, f64)> = families
        .par_iter()
        .flat_map_iter(|p| {
            (0..sc.g_steps).map(move |k| {
                let g = sc.g_min + (sc.g_max - sc.g_min) * k as f64 / (sc.g_steps - 1) as f64;
                let mut q = *p;
                q.g_lin = g;
                let eff = effective_params(&q);
                (
                    g,
                    p.delta,
                    p.gamma,
                    eff.gamma_eff,
                    eff.omega_eff,
                    eff.heating_rate,
                )
            })
        })
        .collect();

    let balanced: Vec<Value> = families
        .iter()
        .map(|p| {
            let g_star = balance_coupling(p, p.gamma).ok();
            let g_zero = balance_coupling(p, 0.0).ok();
            json!({
                "delta": p.delta,
                "gamma": p.gamma,
                "g_zero_crossing": g_zero,
                "g_balanced": g_star,
            })
        })
        .collect();

    let mut out = Outputs::new(json!({ "families": balanced }));
    out.push("gain_sweep.csv", io::gain_sweep_csv(&rows));
    Ok(out)
}

pub fn run_pt_spectrum(sc: &PtSpectrumScenario) -> Result<Outputs, CliError> {
    if sc.mu_steps < 2 || !(sc.mu_max > sc.mu_min) {
        return Err(CliError::Scenario(
            "need mu_steps >= 2 and mu_max > mu_min".into(),
        ));
    }
    let p = sc.dimer().map_err(scenario_err)?;
    let grid: Vec<f64> = (0..sc.mu_steps)
        .map(|k| sc.mu_min + (sc.mu_max - sc.mu_min) * k as f64 / (sc.mu_steps - 1) as f64)
        .collect();
    let specs = sweep(&p, &grid).map_err(CliError::Run)?;
    let mut out = Outputs::new(json!({
        "mu_ep": exceptional_point(&p),
        "gamma_loss": sc.gamma_loss,
        "gamma_gain": sc.gamma_gain,
    }));
    out.push("pt_spectrum.csv", io::pt_sweep_csv(&specs));
    Ok(out)
}

pub fn run_omit(sc: &OmitScenario) -> Result<Outputs, CliError> {
    let p = sc.params();
    p.validate().map_err(scenario_err)?;
    if !(sc.target_depth > 0.0 && sc.target_depth < 1.0) {
        return Err(CliError::Scenario(format!(
            "target_depth must be in (0,1), got {}",
            sc.target_depth
        )));
    }
    let grid = default_spectrum_grid();
    let spec = spectrum(&p, &grid).map_err(CliError::Run)?;
    let depth = window_depth(&spec);
    let center = window_center(&spec);

    let no_gain = ptosc::omit::OmitParams {
        gamma_gain: 0.0,
        ..p
    };
    let spec_ng = spectrum(&no_gain, &grid).map_err(CliError::Run)?;

    // depth map over (g0, γ_m)
    let depth_grid = default_depth_grid();
    let g0s: Vec<f64> = (0..sc.map_g0_points)
        .map(|k| 1e-5 * (2e-2f64 / 1e-5).powf(k as f64 / (sc.map_g0_points - 1).max(1) as f64))
        .collect();
    let gms: Vec<f64> = (0..sc.map_gamma_m_points)
        .map(|k| {
            let gain = sc.gamma * (1.0 - k as f64 / (sc.map_gamma_m_points - 1).max(1) as f64);
            (sc.gamma - gain) / 2.0
        })
        .collect();
    let map: Result<Vec<(f64, f64, f64)>, ptosc::Error> = g0s
        .par_iter()
        .flat_map_iter(|&g0| gms.iter().map(move |&gm| (g0, gm)))
        .map(|(g0, gm)| {
            let q = ptosc::omit::OmitParams {
                g0,
                gamma: sc.gamma,
                gamma_gain: sc.gamma - 2.0 * gm,
                ..p
            };
            Ok((g0, gm, window_depth(&spectrum(&q, &depth_grid)?)))
        })
        .collect();
    let map = map.map_err(CliError::Run)?;

    let req = required_coupling(&p, sc.target_depth, &depth_grid, 0.02).map_err(CliError::Run)?;
    let req_ng =
        required_coupling(&no_gain, sc.target_depth, &depth_grid, 0.02).map_err(CliError::Run)?;

    let mut out = Outputs::new(json!({
        "depth": depth,
        "window_center": center,
        "omega_m_eff": p.omega_m_eff(),
        "gamma_m": p.gamma_m(),
        "target_depth": sc.target_depth,
        "required_g0": req,
        "required_g0_no_gain": req_ng,
        "amplification_ratio": req_ng / req,
    }));
    out.push("chi.csv", io::omit_spectrum_csv(&spec));
    out.push("chi_no_gain.csv", io::omit_spectrum_csv(&spec_ng));
    out.push("depth_map.csv", io::depth_map_csv(&map));
    Ok(out)
}

pub fn run_entangle(sc: &EntangleScenario) -> Result<Outputs, CliError> {
    if !(sc.squeezing_r > 0.0) {
        return Err(CliError::Scenario(format!(
            "squeezing_r must be > 0, got {}",
            sc.squeezing_r
        )));
    }
    let theta =
        rotation_angle_for_negativity(sc.squeezing_r, sc.en_initial).map_err(scenario_err)?;
    let init = rotated_tmsv_initial(sc.squeezing_r, theta);
    let en0 =
        log_negativity(&to_covariance(&init).map_err(CliError::Run)?).map_err(CliError::Run)?;

    let p = sc.dimer(sc.gamma_gain).map_err(scenario_err)?;
    let trace =
        negativity_trace(&p, &init, sc.t_end, sc.dt, sc.sample_every).map_err(CliError::Run)?;
    let en_avg = time_avg(&trace, sc.t_end).map_err(CliError::Run)?;
    let ts = death_time(&trace, sc.t_end).map_err(CliError::Run)?;

    let sweep_rows: Result<Vec<(f64, f64, Option<f64>)>, ptosc::Error> = (0..sc.sweep_points)
        .into_par_iter()
        .map(|k| {
            let gamma_eff = sc.gamma * k as f64 / (sc.sweep_points - 1).max(1) as f64;
            let q = ptosc::params::PtDimerParams::new(
                sc.omega,
                sc.gamma,
                sc.gamma - 2.0 * gamma_eff,
                sc.mu,
            )?;
            let tr = negativity_trace(&q, &init, sc.t_end, sc.dt, sc.sample_every)?;
            Ok((
                gamma_eff,
                time_avg(&tr, sc.t_end)?,
                death_time(&tr, sc.t_end)?,
            ))
        })
        .collect();
    let sweep_rows = sweep_rows.map_err(CliError::Run)?;

    let mut out = Outputs::new(json!({
        "en_initial": en0,
        "rotation_angle": theta,
        "en_avg": en_avg,
        "death_time": ts.unwrap_or(-1.0),
        "gamma_eff": p.gamma_eff(),
        "mu_ep": exceptional_point(&p),
    }));
    out.push("negativity.csv", io::negativity_csv(&trace));
    if sc.sweep_points > 0 {
        out.push(
            "negativity_sweep.csv",
            io::negativity_sweep_csv(&sweep_rows),
        );
    }
    Ok(out)
}

pub fn run_oracle_check(sc: &OracleScenario) -> Result<Outputs, CliError> {
    let cfg = FockConfig::new(sc.cutoff_a, sc.cutoff_b).map_err(scenario_err)?;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::Scenario(format!("missing field {name} for model {}", sc.model)))
    };
    match sc.model.as_str() {
        "optomech" => {
            let p = SystemParams::new(
                need(sc.omega_m, "omega_m")?,
                need(sc.kappa, "kappa")?,
                need(sc.gamma, "gamma")?,
                need(sc.delta, "delta")?,
                need(sc.g_lin, "g_lin")?,
                need(sc.n_th, "n_th")?,
            )
            .map_err(scenario_err)?;
            let alpha = Complex64::new(sc.alpha_b_re.unwrap_or(0.0), sc.alpha_b_im.unwrap_or(0.0));
            let run = fock_evolve(
                &cfg,
                &FockModel::Optomech(p),
                &FockInit::Product(ModeInit::Vacuum, ModeInit::Coherent(alpha)),
                sc.t_end,
                sc.dt,
                sc.sample_every,
            )
            .map_err(CliError::Run)?;
            let init = ptosc::params::InitialMoments {
                b_mean: alpha,
                n_b: alpha.norm_sqr(),
                bb: alpha * alpha,
                n_a: 0.0,
                ab: Complex64::new(0.0, 0.0),
                a_mean: Complex64::new(0.0, 0.0),
            };
            let state0 = MomentState::from_initial_moments(&init).map_err(scenario_err)?;
            let traj =
                evolve(&p, &state0, sc.t_end, sc.dt, sc.sample_every).map_err(CliError::Run)?;
            let devs = compare_optomech(&run, &traj).map_err(CliError::Run)?;
            let d = run.diagnostics;
            let mut out = Outputs::new(json!({
                "model": "optomech",
                "deviations": devs.iter().map(|(n, v)| json!({"observable": n, "max_dev": v})).collect::<Vec<_>>(),
                "max_deviation": devs.iter().map(|(_, v)| *v).fold(0.0f64, f64::max),
                "max_trace_dev": d.max_trace_dev,
                "min_density_eigenvalue": d.min_eigenvalue,
                "max_leakage": d.max_leakage,
            }));
            out.push("engine_trace.csv", io::moment_trajectory_csv(&traj));
            let oracle_as_traj = run.trace.map(|m| ptosc::params::OscillatorMoments {
                b_mean: m.m2,
                n_b: m.n2,
                bb: m.o2o2,
            });
            out.push(
                "oracle_trace.csv",
                io::oscillator_trajectory_csv(&oracle_as_traj),
            );
            Ok(out)
        }
        "dimer" => {
            let p = ptosc::params::PtDimerParams::new(
                need(sc.omega, "omega")?,
                need(sc.gamma_loss, "gamma_loss")?,
                need(sc.gamma_gain, "gamma_gain")?,
                need(sc.mu, "mu")?,
            )
            .map_err(scenario_err)?;
            let r = need(sc.squeezing_r, "squeezing_r")?;
            let run = fock_evolve(
                &cfg,
                &FockModel::Dimer(p),
                &FockInit::Tmsv(r),
                sc.t_end,
                sc.dt,
                sc.sample_every,
            )
            .map_err(CliError::Run)?;
            let traj = ptosc::entanglement::evolve_dimer(
                &p,
                &ptosc::entanglement::tmsv_initial(r),
                sc.t_end,
                sc.dt,
                sc.sample_every,
            )
            .map_err(CliError::Run)?;
            let devs = compare_dimer(&run, &traj).map_err(CliError::Run)?;
            let d = run.diagnostics;

            let en_engine: Result<Vec<f64>, ptosc::Error> = traj
                .states()
                .iter()
                .map(|st| log_negativity(&to_covariance(st)?))
                .collect();
            let en_engine = en_engine.map_err(CliError::Run)?;
            let en_oracle: Result<Vec<f64>, ptosc::Error> = run
                .trace
                .iter()
                .map(|(t, m)| log_negativity(&to_covariance(&m.dimer_state(t))?))
                .collect();
            let en_oracle = en_oracle.map_err(CliError::Run)?;

            let mut out = Outputs::new(json!({
                "model": "dimer",
                "deviations": devs.iter().map(|(n, v)| json!({"observable": n, "max_dev": v})).collect::<Vec<_>>(),
                "max_deviation": devs.iter().map(|(_, v)| *v).fold(0.0f64, f64::max),
                "max_trace_dev": d.max_trace_dev,
                "min_density_eigenvalue": d.min_eigenvalue,
                "max_leakage": d.max_leakage,
            }));
            out.push(
                "engine_negativity.csv",
                io::negativity_csv(&ptosc::entanglement::NegativityTrace {
                    times: traj.times().to_vec(),
                    en: en_engine,
                }),
            );
            out.push(
                "oracle_negativity.csv",
                io::negativity_csv(&ptosc::entanglement::NegativityTrace {
                    times: run.trace.times().to_vec(),
                    en: en_oracle,
                }),
            );
            Ok(out)
        }
        other => Err(CliError::Scenario(format!(
            "unknown model {other:?}; expected \"optomech\" or \"dimer\""
        ))),
    }
}
