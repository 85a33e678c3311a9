use std::path::Path;
use std::process::{Command, Output};

use opflow::cli::manifest::{verify, RunManifest, MANIFEST_NAME};

fn opflow(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opflow"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("OPFLOW_CONFIG")
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path) -> RunManifest {
    serde_json::from_slice(&std::fs::read(out.join(MANIFEST_NAME)).unwrap()).unwrap()
}

#[test]
fn specgraph_is_deterministic_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["specgraph", "--samples", "32", "--grid", "200"];
    assert_eq!(opflow(&a, &args).status.code(), Some(0));
    assert_eq!(opflow(&b, &args).status.code(), Some(0));
    let csv = std::fs::read(a.join("specgraph.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("specgraph.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("theta,branch_index,lambda\n"));
    let m = manifest(&a);
    assert_eq!(m.command, "specgraph");
    assert_eq!(m.parameters["samples"], "32");
    assert_eq!(m.output_files.len(), 1);
    assert!(verify(&a, &m).is_empty());
    std::fs::write(a.join("specgraph.csv"), "tampered").unwrap();
    assert_eq!(verify(&a, &m), vec!["specgraph.csv".to_string()]);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(opflow(dir.path(), &["specgraph", "--samples", "4"]).status.code(), Some(2));
    assert_eq!(opflow(dir.path(), &["specgraph", "--grid", "ten"]).status.code(), Some(2));
    assert_eq!(opflow(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(opflow(dir.path(), &["specflow", "--path", "spiral"]).status.code(), Some(2));
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    assert_eq!(opflow(&blocker.join("sub"), &["specflow", "--path", "const"]).status.code(), Some(2));
}

#[test]
fn specflow_builtin_paths() {
    let dir = tempfile::tempdir().unwrap();
    for (path, flow) in [("const", 0), ("cross", 1), ("robin", 1)] {
        let out = dir.path().join(path);
        let o = opflow(&out, &["specflow", "--path", path, "--grid", "200", "--samples", "32"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("specflow.json")).unwrap()).unwrap();
        assert_eq!(report["flow"], flow);
        let crossings = report["crossings"].as_array().unwrap();
        let signed: i64 = crossings.iter().map(|c| c["direction"].as_i64().unwrap()).sum();
        assert_eq!(signed, flow);
        assert!(report["partition"].as_array().unwrap().len() >= 2);
        for c in crossings {
            assert!(c["theta_lo"].as_f64().unwrap() < c["theta_hi"].as_f64().unwrap());
        }
        assert!(verify(&out, &manifest(&out)).is_empty());
    }
}

#[test]
fn dichotomy_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(opflow(dir.path(), &["dichotomy", "--points", "6", "--grid", "200"]).status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("dichotomy.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,riesz_lower_bound,gap_dist"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][0], 1e-4);
    assert!(rows[0][1] >= 0.9 && rows[0][2] <= 0.2);
    assert_eq!(rows[5][0], 0.9);
    assert!(rows[5][1] < 0.5);
}

#[test]
fn identities_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = opflow(dir.path(), &["identities", "--dim", "6", "--trials", "40"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("resolvent_identity"));
    let strict = opflow(dir.path(), &["identities", "--dim", "6", "--trials", "40", "--tolerance", "1e-30"]);
    assert_eq!(strict.status.code(), Some(1));
    // manifests are written even when the check fails
    assert!(verify(dir.path(), &manifest(dir.path())).is_empty());
}

#[test]
fn surgery_output_follows_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = opflow(&out, &["--seed", seed, "surgery", "--trials", "10", "--dim", "5"]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out.join("surgery.csv")).unwrap()
    };
    assert_eq!(run("a", "3"), run("b", "3"));
    assert_ne!(run("c", "3"), run("d", "4"));
}

#[test]
fn homotopy_demo_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = opflow(dir.path(), &["homotopy-demo", "--grid", "32", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let h = std::fs::read_to_string(dir.path().join("homotopy.csv")).unwrap();
    assert_eq!(h.lines().count(), 6);
    let d = std::fs::read_to_string(dir.path().join("discretization.csv")).unwrap();
    assert_eq!(d.lines().next(), Some("n,delta"));
    assert_eq!(manifest(dir.path()).output_files.len(), 2);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# shared settings\nsamples = 24\ngrid = 120\ntrials = 3\n").unwrap();

    let out = dir.path().join("flag");
    let o = opflow(&out, &["--config", cfg.to_str().unwrap(), "specgraph", "--grid", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!((m.parameters["samples"].as_str(), m.parameters["grid"].as_str()), ("24", "100"));
    assert_eq!(m.input_hashes.len(), 1);

    let out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_opflow"))
        .args(["specgraph", "--out"])
        .arg(&out)
        .env("OPFLOW_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&out).parameters["grid"], "120");

    let missing = opflow(&out, &["--config", "/nonexistent/opflow.conf", "specgraph"]);
    assert_eq!(missing.status.code(), Some(2));
}
