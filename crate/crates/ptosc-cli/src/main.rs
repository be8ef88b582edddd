//! `ptosc` — scenario-driven runs of the PT-oscillator simulation toolkit.
//!
//! Each subcommand reads a flat JSON scenario (or a named preset), runs
//! deterministically, and writes CSV files plus a `summary.json` into the
//! output directory. Exit codes: 0 success, 1 malformed scenario, 2
//! numerical failure.

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod commands;
mod scenarios;

use commands::{CliError, Outputs};
use scenarios::*;

#[derive(Parser)]
#[command(name = "ptosc", version, about = "PT-symmetric oscillator simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario JSON file; omit to use the preset.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Named preset (fig2, fig3, fig5, fig6); each subcommand has a default.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for CSV files and summary.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps (default: rayon's choice).
    #[arg(long)]
    threads: Option<usize>,
    /// Print the effective scenario instead of running.
    #[arg(long)]
    dump_scenario: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full vs eliminated oscillator dynamics with Gaussian fidelity.
    Evolve(Common),
    /// Effective gain and frequency over coupling/detuning families.
    GainSweep(Common),
    /// PT dimer eigenvalue sweep over the tunneling coupling.
    PtSpectrum(Common),
    /// Probe absorption/dispersion spectra and transparency depth maps.
    Omit(Common),
    /// Negativity evolution and the dissipation sweep.
    Entangle(Common),
    /// Fock-space oracle cross-check of the moment engines.
    OracleCheck(Common),
}

fn load_scenario<S: DeserializeOwned + Serialize + Clone>(
    common: &Common,
    preset_of: impl Fn(&str) -> Option<S>,
    default: S,
) -> Result<S, CliError> {
    match (&common.scenario, &common.preset) {
        (Some(_), Some(_)) => Err(CliError::Scenario(
            "give either --scenario or --preset, not both".into(),
        )),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Scenario(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Scenario(format!("cannot parse {}: {e}", path.display())))
        }
        (None, Some(name)) => {
            preset_of(name).ok_or_else(|| CliError::Scenario(format!("unknown preset {name:?}")))
        }
        (None, None) => Ok(default),
    }
}

fn write_outputs(out_dir: &Path, outputs: &Outputs) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Scenario(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut summary = outputs.summary.clone();
    if let Some(map) = summary.as_object_mut() {
        map.insert(
            "outputs".into(),
            serde_json::json!(outputs
                .files
                .iter()
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>()),
        );
    }
    for (name, contents) in &outputs.files {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Scenario(format!("cannot write {}: {e}", path.display())))?;
    }
    let pretty = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(out_dir.join("summary.json"), pretty + "\n")
        .map_err(|e| CliError::Scenario(format!("cannot write summary.json: {e}")))?;
    Ok(())
}

fn dispatch(
    common: &Common,
    run: impl FnOnce() -> Result<Outputs, CliError> + Send,
) -> Result<(), CliError> {
    let outputs = match common.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Scenario(format!("cannot build a {n}-thread pool: {e}")))?;
            pool.install(run)?
        }
        None => run()?,
    };
    write_outputs(&common.out, &outputs)?;
    println!(
        "wrote {} file(s) and summary.json to {}",
        outputs.files.len(),
        common.out.display()
    );
    Ok(())
}

fn maybe_dump<S: Serialize>(common: &Common, sc: &S) -> bool {
    if common.dump_scenario {
        println!(
            "{}",
            serde_json::to_string_pretty(sc).expect("scenario serializes")
        );
        true
    } else {
        false
    }
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Evolve(c) => {
            let sc = load_scenario(
                &c,
                |n| (n == "fig2").then(EvolveScenario::fig2),
                EvolveScenario::fig2(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_evolve(&sc))
        }
        Command::GainSweep(c) => {
            let sc = load_scenario(
                &c,
                |n| (n == "fig2").then(GainSweepScenario::fig2),
                GainSweepScenario::fig2(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_gain_sweep(&sc))
        }
        Command::PtSpectrum(c) => {
            let sc = load_scenario(
                &c,
                |n| (n == "fig3" || n == "fig6").then(PtSpectrumScenario::fig3),
                PtSpectrumScenario::fig3(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_pt_spectrum(&sc))
        }
        Command::Omit(c) => {
            let sc = load_scenario(
                &c,
                |n| (n == "fig5").then(OmitScenario::fig5),
                OmitScenario::fig5(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_omit(&sc))
        }
        Command::Entangle(c) => {
            let sc = load_scenario(
                &c,
                |n| (n == "fig6").then(EntangleScenario::fig6),
                EntangleScenario::fig6(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_entangle(&sc))
        }
        Command::OracleCheck(c) => {
            let sc = load_scenario(
                &c,
                |n| match n {
                    "optomech" => Some(OracleScenario::optomech_default()),
                    "dimer" => Some(OracleScenario::dimer_default()),
                    _ => None,
                },
                OracleScenario::optomech_default(),
            )?;
            if maybe_dump(&c, &sc) {
                return Ok(());
            }
            dispatch(&c, || commands::run_oracle_check(&sc))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Scenario(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Run(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
