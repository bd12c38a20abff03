use std::fs;

use tqd_sim::experiments::commands::{run_command, Command};
use tqd_sim::experiments::ExperimentConfig;
use tqd_sim::Error;

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn header(csv: &str) -> Vec<&str> {
    csv.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect()
}

#[test]
fn config_file_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let mut cfg = ExperimentConfig::default();
    cfg.seed = 11;
    cfg.system.g_hz = 50e6;
    cfg.sweep.values = Some(vec![3.0, 5.0]);
    fs::write(&path, toml::to_string(&cfg).unwrap()).unwrap();
    let loaded = ExperimentConfig::load(Some(&path), &[]).unwrap();
    assert_eq!(loaded, cfg);
    assert_eq!(loaded.hash(), cfg.hash());

    let overridden = ExperimentConfig::load(Some(&path), &["system.g_hz=60e6".into()]).unwrap();
    assert_eq!(overridden.system.g_hz, 60e6);
    assert_ne!(overridden.hash(), cfg.hash());
}

#[test]
fn artifacts_write_to_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    for a in run_command(Command::Coupling, &cfg).unwrap() {
        a.write_to(dir.path()).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join(&a.name)).unwrap(), a.contents);
    }
    let missing = dir.path().join("no/such/dir");
    let a = &run_command(Command::Spectrum, &cfg).unwrap()[0];
    assert!(matches!(a.write_to(&missing), Err(Error::Io { .. })));
}

#[test]
fn spectrum_columns_agree() {
    let cfg = ExperimentConfig::default();
    let a = &run_command(Command::Spectrum, &cfg).unwrap()[0];
    assert_eq!(
        header(&a.contents),
        ["eps_q_hz", "E_g_hz", "E_e_hz", "E_f_hz", "E_g_analytic_hz", "E_e_analytic_hz", "E_f_analytic_hz"]
    );
    for r in rows(&a.contents) {
        let scale = r[3] - r[1];
        for k in 0..3 {
            assert!((r[1 + k] - r[4 + k]).abs() <= 1e-9 * scale, "{r:?}");
        }
    }
}

#[test]
fn coupling_is_linear_in_resonator_frequency() {
    let cfg = ExperimentConfig::default();
    let a = &run_command(Command::Coupling, &cfg).unwrap()[0];
    let v: serde_json::Value = serde_json::from_str(&a.contents).unwrap();
    let cos_theta = v["cos_theta"].as_f64().unwrap();
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 11);
    let ratio0 = pts[0]["g0_hz"].as_f64().unwrap() / pts[0]["f_r_hz"].as_f64().unwrap();
    for p in pts {
        let (f, g0, g) = (p["f_r_hz"].as_f64().unwrap(), p["g0_hz"].as_f64().unwrap(), p["g_hz"].as_f64().unwrap());
        assert!((g0 / f - ratio0).abs() <= 1e-12 * ratio0);
        assert!((g - g0 * cos_theta).abs() <= 1e-9 * g0);
    }
}

#[test]
fn population_rows_are_normalized() {
    let cfg = ExperimentConfig::default();
    let a = &run_command(Command::Population, &cfg).unwrap()[0];
    for r in rows(&a.contents) {
        for n in 0..3 {
            let s: f64 = r[1 + 3 * n..4 + 3 * n].iter().sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        // The excited state is the antisymmetric combination.
        assert!((r[6] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sweetspot_is_flat_in_eps_d_at_zero_dipolar_detuning() {
    let cfg = ExperimentConfig::default();
    let a = &run_command(Command::Sweetspot, &cfg).unwrap()[0];
    let mut zero_rows = 0;
    for r in rows(&a.contents) {
        if r[0] == 0.0 {
            zero_rows += 1;
            assert!(r[3].abs() < 1e-6);
            assert!((r[4] - r[6]).abs() <= 0.01 * r[6].abs());
        } else {
            assert!(r[3].abs() > 1e-6);
        }
    }
    assert!(zero_rows > 0);
}

#[test]
fn gate_command_outputs_and_validation() {
    let mut cfg = ExperimentConfig::default();
    cfg.sweep.values = Some(vec![6.0]);
    cfg.output.samples = 20;
    let arts = run_command(Command::GateIswap, &cfg).unwrap();
    let names: Vec<&str> = arts.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["gate-iswap.csv", "gate-iswap_traj_000.csv", "gate-iswap.json"]);
    let traj = &arts[1].contents;
    let h = header(traj);
    assert_eq!(h[0], "t_s");
    assert_eq!(*h.last().unwrap(), "fidelity");
    assert!(h.contains(&"pop_ge0") && h.contains(&"pop_eg0"));
    let rs = rows(traj);
    assert_eq!(rs.len(), 21);
    assert_eq!(rs[0][h.iter().position(|c| *c == "pop_ge0").unwrap()], 1.0);

    let json: serde_json::Value = serde_json::from_str(&arts[2].contents).unwrap();
    let rec = &json["records"][0];
    assert_eq!(rec["parameter"], "delta_over_g");
    assert!(rec["convergence"]["converged"].as_bool().unwrap());
    assert_eq!(rec["config_hash"], json["config_hash"]);

    let mut bad = ExperimentConfig::default();
    bad.system.f_osc_hz = -1.0;
    assert!(matches!(run_command(Command::GateIswap, &bad), Err(Error::Config(_))));
    let mut bad = ExperimentConfig::default();
    bad.sweep.values = Some(vec![0.0]);
    assert!(run_command(Command::GateIswap, &bad).is_err());
}
