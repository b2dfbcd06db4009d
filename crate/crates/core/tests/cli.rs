use dipolar_shield::cli::{self, compute_point, RunConfig, SweepPoint};
use dipolar_shield::interaction::InteractionOptions;
use dipolar_shield::monomer::MoleculeParams;
use dipolar_shield::observables::cross_sections;
use dipolar_shield::pair_basis::{preset, BasisSpec, Parity};
use dipolar_shield::propagator::{solve_block, PropagationConfig};
use dipolar_shield::units;
use std::path::{Path, PathBuf};
use std::process::Command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// A sweep small enough for tests.
fn small(dir: &Path, extra: &[&str]) -> RunConfig {
    let mut o: Vec<String> = [
        "basis.preset=\"small\"",
        "basis.l_max=2",
        "basis.m_tot=[0, 1]",
        "sweep.fields_kv_cm=[23.0, 24.5]",
        "sweep.energies_uk=[10.0]",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    o.push(format!("output.dir=\"{}\"", dir.display()));
    o.extend(extra.iter().map(|s| s.to_string()));
    RunConfig::load(None, &o).unwrap()
}

#[test]
fn reference_config_lists_the_defaults() {
    let text = std::fs::read_to_string(configs().join("reference.toml")).unwrap();
    assert_eq!(RunConfig::from_toml_str(&text).unwrap(), RunConfig::default());
}

#[test]
fn shipped_configs_validate_and_round_trip() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(Some(&path), &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn sweep_point_matches_direct_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &[]);
    let pt = SweepPoint { field_kv_cm: 24.5, b_gauss: 0.0, e_coll_uk: 10.0 };
    let rec = compute_point(&cfg, &pt).unwrap();
    let p = MoleculeParams::caf();
    let e = units::microkelvin_to_au(10.0);
    let solve = |m| {
        let spec = BasisSpec::new(5, 2, m, Parity::Even, preset("small").unwrap().0);
        solve_block(&p, 24.5, 0.0, e, &spec, &InteractionOptions::default(), &PropagationConfig::default()).unwrap()
    };
    let (s0, s1) = (solve(0), solve(1));
    let o = cross_sections(&[(1.0, &s0), (2.0, &s1)], p.reduced_mass()).unwrap();
    assert_eq!(rec.observables, o);
}

#[test]
fn sweeps_are_deterministic_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &[]);
    let first = cli::run_field_sweep(&cfg, 2).unwrap();
    assert_eq!(first.exit_code(), 0);
    assert_eq!(first.points, 2);
    let csv = std::fs::read(&first.outputs[0]).unwrap();

    // fresh directory, different worker count
    let dir2 = tempfile::tempdir().unwrap();
    let cfg2 = small(dir2.path(), &[]);
    let second = cli::run_field_sweep(&cfg2, 1).unwrap();
    assert_eq!(std::fs::read(&second.outputs[0]).unwrap(), csv);

    // interrupted run: one point missing
    let points: Vec<PathBuf> = std::fs::read_dir(dir.path().join("points")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(points.len(), 2);
    std::fs::remove_file(&points[0]).unwrap();
    std::fs::remove_file(&first.outputs[0]).unwrap();
    let resumed = cli::run_field_sweep(&cfg, 2).unwrap();
    assert_eq!(std::fs::read(&resumed.outputs[0]).unwrap(), csv);

    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("field_kVcm,B_G,Ecoll_uK,Mtot_list,quantity,Lin,value,units\n"));
    assert!(text.contains(",0;1,k_loss,,"));
}

#[test]
fn timestamp_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &["output.timestamp=true", "output.format=\"json\"", "sweep.fields_kv_cm=[24.5]"]);
    let s = cli::run_field_sweep(&cfg, 1).unwrap();
    assert!(s.outputs[0].extension().unwrap() == "json");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&s.outputs[0]).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().any(|r| r["quantity"] == "sigma_el" && r["value"].as_f64().unwrap() > 0.0));
    let cfg = small(dir.path(), &["output.timestamp=true", "sweep.fields_kv_cm=[24.5]"]);
    let s = cli::run_field_sweep(&cfg, 1).unwrap();
    let text = std::fs::read_to_string(&s.outputs[0]).unwrap();
    assert!(text.starts_with("# generated "));
}

#[test]
fn single_value_convergence_axis_has_zero_change() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &["convergence.axis=\"l_max\"", "convergence.values=[2]", "sweep.fields_kv_cm=[24.5]"]);
    let s = cli::run_convergence(&cfg, 1).unwrap();
    let text = std::fs::read_to_string(&s.outputs[0]).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let col = rdr.headers().unwrap().iter().position(|h| h == "rel_change").unwrap();
    let mut n = 0;
    for r in rdr.records() {
        assert_eq!(&r.unwrap()[col], "0");
        n += 1;
    }
    assert!(n > 0);
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dipolar-shield")).args(args).env("RUST_LOG", "off").output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let out = bin(&["validate-config"]);
    assert_eq!(out.status.code(), Some(0));
    let printed = RunConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(printed, RunConfig::default());

    assert_eq!(bin(&["validate-config", "--set", "basis.preset=\"nonsense\""]).status.code(), Some(2));
    assert_eq!(bin(&["validate-config", "--set", "sweep.energies_uk=[-1.0]"]).status.code(), Some(2));
    assert_eq!(bin(&["validate-config", "--set", "no_such_section.x=1"]).status.code(), Some(2));
    assert_eq!(bin(&["validate-config", "--config", "/nonexistent.toml"]).status.code(), Some(2));

    // the minimal preset cannot be used at 20 kV/cm, so one of two points fails
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&[
        "sweep-field",
        "--jobs",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "basis.preset=\"minimal\"",
        "--set",
        "basis.l_max=2",
        "--set",
        "sweep.fields_kv_cm=[20.0, 24.5]",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep-field.csv")).unwrap();
    assert!(text.contains("2.45000000000e1,"));
    assert!(!text.contains("2.00000000000e1,"));

    let out = bin(&["stark-map", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("stark-map.csv").exists());
}
