use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn ewlab(mode: &str, config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewlab"))
        .args([mode, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("EWLAB_THREADS")
        .output()
        .unwrap()
}

fn report(dir: &Path, mode: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{mode}.json"))).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn classify_homogeneous_hopf() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewlab("classify", &bundled("hopf_homogeneous.toml"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "classify");
    assert_eq!(r["result"]["genus"], 0);
    assert_eq!(r["tool"], "ewlab");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn scan_genus1_matches_four_branch_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(bundled("genus1.toml")).unwrap().replace("n_re = 41\nn_im = 41", "n_re = 25\nn_im = 25");
    let path = write(dir.path(), "g1.toml", &cfg);
    let out = ewlab("scan", &path, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "scan");
    let matches = r["result"]["matches"].as_array().unwrap();
    assert_eq!(matches.len(), 4);
    assert!(matches.iter().all(|m| m["distance"].as_f64().unwrap() < 1e-4));
    let csv = std::fs::read_to_string(dir.path().join("discriminant.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 25 * 25);
}

#[test]
fn check_names_the_violated_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = std::fs::read_to_string(bundled("genus3.toml")).unwrap();
    cfg.push_str("\n[perturb]\nindex = 300\ndq = [1e-3, 0.0]\n");
    let path = write(dir.path(), "bad.toml", &cfg);
    let out = ewlab("check", &path, dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("jet_consistency"), "{err}");
    let r = report(dir.path(), "check");
    assert!(r["result"]["failed"].as_array().unwrap().iter().any(|f| f == "jet_consistency"));

    let clean = ewlab("check", &bundled("genus3.toml"), dir.path());
    assert_eq!(clean.status.code(), Some(0), "{}", String::from_utf8_lossy(&clean.stderr));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "");
    let out = ewlab("simulate", &empty, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jet.q"));
    let gcd = write(dir.path(), "gcd.toml", "[jet]\nq = [0.0, 0.5]\n[params]\nlambda_re = 0.0\nc = -0.25\n[seifert]\nm = 2\nn = 4\n");
    let out = ewlab("simulate", &gcd, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd(m,n) must be 1"));
}

#[test]
fn numerical_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // Im q = 2 is out of range for (2,1).
    let cfg = "[jet]\nq = [0.0, 2.0]\n[params]\nlambda_re = 0.0\nc = -0.25\n[seifert]\nm = 2\nn = 1\n[numerics]\nlength = 1.0\n";
    let out = ewlab("reconstruct", &write(dir.path(), "bad.toml", cfg), dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = bundled("hopf_homogeneous.toml");
    for mode in ["simulate", "reconstruct", "energy"] {
        assert_eq!(ewlab(mode, &cfg, a.path()).status.code(), Some(0));
        assert_eq!(ewlab(mode, &cfg, b.path()).status.code(), Some(0));
    }
    for f in ["trajectory.csv", "simulate.json", "torus.obj", "curve.csv", "reconstruct.json", "energy.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let e = report(a.path(), "energy");
    let wm = e["result"]["w_mesh"].as_f64().unwrap();
    assert!((wm - 2.0 * std::f64::consts::PI.powi(2)).abs() < 0.01 * wm);
    let obj = std::fs::read_to_string(a.path().join("torus.obj")).unwrap();
    assert!(obj.starts_with('#') && obj.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn thread_cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[jet]\nq = [0.0, 0.5]\n[params]\nlambda_re = 0.0\nc = -0.25\n[numerics]\nlength = 3.141592653589793\n[grid]\nn_re = 5\nn_im = 5\n";
    let path = write(dir.path(), "c.toml", cfg);
    let run = |threads: &str, out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_ewlab"))
            .args(["scan", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(out)
            .env("EWLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    assert_eq!(run("1", &one).status.code(), Some(0));
    assert_eq!(run("4", &four).status.code(), Some(0));
    assert_eq!(
        std::fs::read(one.join("discriminant.csv")).unwrap(),
        std::fs::read(four.join("discriminant.csv")).unwrap()
    );
    assert_eq!(run("zero", &one).status.code(), Some(1));
}
