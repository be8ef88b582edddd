//! End-to-end checks of the `ptosc` binary: determinism, scenario error
//! handling, and the shape of the emitted files.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptosc"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

fn short_evolve_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(
        &path,
        r#"{
            "omega_m": 1.0, "kappa": 0.1, "gamma": 1e-5, "delta": 3.0,
            "g_lin": 0.04, "n_th": 1000.0,
            "t_end": 20.0, "dt": 0.01, "sample_every": 100,
            "transient_cutoff": 5.0
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn identical_scenarios_give_byte_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = short_evolve_scenario(tmp.path());
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = bin()
            .args(["evolve", "--scenario"])
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["full.csv", "effective.csv", "fidelity.csv", "summary.json"] {
        assert_eq!(
            read(&tmp.path().join("a"), name),
            read(&tmp.path().join("b"), name),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn malformed_scenario_exits_one_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["evolve", "--scenario"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert!(!out.exists(), "no partial outputs on a malformed scenario");
}

#[test]
fn numerical_failure_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("sc.json");
    std::fs::write(
        &sc,
        r#"{"omega_m":1.0,"kappa":0.1,"gamma":1e-5,"delta":3.0,"g_lin":0.04,
            "n_th":1000.0,"t_end":10.0,"dt":9.0,"sample_every":10,"transient_cutoff":0.0}"#,
    )
    .unwrap();
    let status = bin()
        .args(["evolve", "--scenario"])
        .arg(&sc)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_scenario_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("sc.json");
    std::fs::write(
        &sc,
        r#"{"omega_m":1.0,"kappa":0.1,"gamma":1e-5,"delta":3.0,"g_lin":0.04,
            "n_th":1000.0,"t_end":10.0,"dt":0.01,"sample_every":10,
            "transient_cutoff":0.0,"typo_field":1}"#,
    )
    .unwrap();
    let status = bin()
        .args(["evolve", "--scenario"])
        .arg(&sc)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn pt_spectrum_branches_merge_above_the_exceptional_point() {
    let tmp = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["pt-spectrum", "--preset", "fig6", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(tmp.path(), "pt_spectrum.csv");
    let mut merged = 0usize;
    let mut split = 0usize;
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (mu, im_lp, im_lm) = (cols[0], cols[2], cols[4]);
        if mu > 0.0021 {
            assert!(
                (im_lp - im_lm).abs() < 1e-12,
                "Im branches split at mu = {mu}"
            );
            merged += 1;
        } else if mu < 0.0019 && mu > 0.0 {
            assert!(
                im_lp > im_lm,
                "Im branches merged below the EP at mu = {mu}"
            );
            split += 1;
        }
    }
    assert!(merged > 100 && split > 100);
    let summary = read(tmp.path(), "summary.json");
    assert!(summary.contains("\"mu_ep\": 0.002"));
}

#[test]
fn presets_dump_as_valid_scenarios() {
    for (cmd, preset) in [
        ("evolve", "fig2"),
        ("gain-sweep", "fig2"),
        ("pt-spectrum", "fig3"),
        ("omit", "fig5"),
        ("entangle", "fig6"),
        ("oracle-check", "dimer"),
    ] {
        let out = bin()
            .args([cmd, "--preset", preset, "--dump-scenario"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("{cmd} preset dump is not JSON: {e}"));
        assert!(v.is_object());
    }
}

#[test]
fn preset_and_scenario_together_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = short_evolve_scenario(tmp.path());
    let status = bin()
        .args(["evolve", "--preset", "fig2", "--scenario"])
        .arg(&scenario)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("sc.json");
    std::fs::write(
        &sc,
        r#"{"omega":1.0,"gamma":0.004,"gamma_gain":0.004,"mu":0.02,
            "squeezing_r":0.11,"en_initial":0.1,"t_end":20.0,"dt":0.01,
            "sample_every":100,"sweep_points":4}"#,
    )
    .unwrap();
    for (dir, threads) in [("one", "1"), ("four", "4")] {
        let status = bin()
            .args(["entangle", "--scenario"])
            .arg(&sc)
            .args(["--threads", threads, "--out"])
            .arg(tmp.path().join(dir))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["negativity.csv", "negativity_sweep.csv"] {
        assert_eq!(
            read(&tmp.path().join("one"), name),
            read(&tmp.path().join("four"), name),
            "{name} depends on the thread count"
        );
    }
}
