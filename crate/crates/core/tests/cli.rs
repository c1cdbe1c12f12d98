use std::path::Path;
use std::process::{Command, Output};

use spde_core::harness::{read_report, sidecar_path, ExperimentConfig};

fn spde(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spde"));
    cmd.args(args).env_remove("SPDE_SEED");
    if let Some(seed) = env_seed {
        cmd.env("SPDE_SEED", seed);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "modes = 4,8\ntaus = 1/8,1/16\nref_tau = 1/32\nsamples = 6\n";

#[test]
fn mesh_dump_columns() {
    let out = spde(&["mesh-dump"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,t,step"));
    // Defaults: T = 0.5, gamma = 0.7, nominal step 2^-8.
    assert_eq!(text.lines().count(), 1 + 694 + 1);
    assert!(text.lines().last().unwrap().starts_with("694,5e-1,"));
}

#[test]
fn validation_errors_exit_with_one() {
    assert_eq!(spde(&["converge-space", "--gamma", "0.3"], None).status.code(), Some(1));
    assert_eq!(spde(&["solve", "--spectrum", "power:9"], None).status.code(), Some(1));
    assert_eq!(spde(&["solve", "--no-such-flag"], None).status.code(), Some(1));
    assert_eq!(spde(&["solve"], Some("minus-one")).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gamma = 0.7\nsampels = 3\n");
    let out = spde(&["solve", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key"));
}

#[test]
fn seed_flag_overrides_environment() {
    let a = spde(&["solve", "--seed", "5"], Some("9")).stdout;
    let b = spde(&["solve", "--seed", "5"], None).stdout;
    let c = spde(&["solve"], Some("5")).stdout;
    let d = spde(&["solve"], Some("9")).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_ne!(a, d);
}

#[test]
fn convergence_report_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_path = dir.path().join("space.csv");
    let out = spde(
        &["converge-space", "--config", &cfg, "--seed", "3", "--out", out_path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_report(&out_path).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.rows[0].samples, 6);
    let meta = std::fs::read_to_string(sidecar_path(&out_path)).unwrap();
    let recovered = ExperimentConfig::parse(&meta).unwrap();
    assert_eq!(recovered.seed, 3);
    assert_eq!(recovered.modes, vec![4, 8]);
}

#[test]
fn output_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for cmd in ["converge-space", "converge-time"] {
        let files: Vec<Vec<u8>> = ["1", "4"]
            .iter()
            .map(|w| {
                let path = dir.path().join(format!("{cmd}-{w}.csv"));
                let out = spde(
                    &[cmd, "--config", &cfg, "--workers", w, "--out", path.to_str().unwrap()],
                    None,
                );
                assert!(out.status.success());
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1], "{cmd}");
    }
}

#[test]
fn diagnose_noise_summary() {
    let out = spde(&["diagnose-noise", "--spectrum", "power:0.5"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("assumption3 power:0.5 alpha=0.75: PASS"));
    assert!(text.contains("fails as expected"));
}

#[test]
fn galerkin_dirac_solve() {
    let out = spde(&["solve", "--variant", "galerkin", "--datum", "dirac", "--samples", "1"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("k,coefficient"));
    assert_eq!(text.lines().count(), 129);
}
