use std::path::Path;
use std::process::{Command, Output};

fn primordia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primordia")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn steady_prints_one_row() {
    let o = primordia(&["steady"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("m0,e0,f0,b0,k_on,k_off"));
    let vals: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(vals[0], 2.0);
    assert!((vals[3] - 8.0 / 29.0).abs() < 1e-12);
    assert!((vals[4] - 0.0525).abs() < 1e-12);
    assert!((vals[10] + 3.6e5).abs() < 1e-6);
}

#[test]
fn dispersion_row_count() {
    let o = primordia(&["dispersion", "--k2-max", "50", "--points", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 501);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), 50.0);
    assert_eq!(last.len(), 5 + 14);
}

#[test]
fn patternspace_cell_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = primordia(&["patternspace", "--axis1", "m0:0.1:5:100", "--axis2", "alpha:0:12:100", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("patternspace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10_001);
    assert!(csv.starts_with("m0,alpha,condUC1"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "patternspace");
    assert_eq!(manifest["parameters"]["alpha"], 4.0);
}

#[test]
fn patternspace_is_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_primordia"))
            .args(["patternspace", "--axis1", "m0:0.5:4:12", "--axis2", "alpha:0:8:9", "--mode", "coupled"])
            .env("PRIMORDIA_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let o = primordia(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("usage"));
    assert_eq!(primordia(&[]).status.code(), Some(1));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "tau = 1\ntau = 2\n").unwrap();
    let o = primordia(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1") && err.contains("line 2"), "{err}");
    assert_eq!(primordia(&["steady", "--config", "/no/such/file.cfg"]).status.code(), Some(1));
    assert_eq!(primordia(&["patternspace", "--axis1", "m0:0:1", "--axis2", "alpha:0:1:2"]).status.code(), Some(1));
    assert_eq!(primordia(&["patternspace", "--axis1", "nope:0:1:3", "--axis2", "alpha:0:1:2"]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    // a simulation whose first step clips far more than the allowed fraction
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blowup.cfg");
    std::fs::write(&cfg, "[parameters]\nalpha = 400\n[grid]\nnx = 8\nny = 8\nLx = 2\nLy = 2\n[time]\ndt = 5\nt_final = 50\n[initial]\nnoise_amplitude = 0.5\npriming = saturated\n").unwrap();
    let out = dir.path().join("out");
    let o = primordia(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    // partial outputs survive the abort
    assert!(out.join("diagnostics.csv").exists());
    assert!(out.join("manifest.json").exists());
}

fn simulate_into(dir: &Path, cfg: &Path) -> Output {
    primordia(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "[simulation]\npreset = periodic_traction\n[grid]\nnx = 12\nny = 12\n[time]\nt_final = 2\n[output]\noutput_every = 5\nsnapshot_fields = m, uy\n",
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(simulate_into(&a, &cfg).status.code(), Some(0));
    assert_eq!(simulate_into(&b, &cfg).status.code(), Some(0));
    for name in ["diagnostics.csv", "m_000000.txt", "m_000005.txt", "m_000010.txt", "uy_000010.txt"] {
        let (x, y) = (std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["parameters"]["m0"], 0.75);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn growth_check_passes() {
    let o = primordia(&["growth-check", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
