use std::path::Path;
use std::process::{Command, Output};

fn triangulab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triangulab")).args(args).output().expect("binary runs")
}

fn run_config(dir: &Path, name: &str, body: &str) -> Output {
    let out = dir.join(name);
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, format!("output_dir = {:?}\n{body}", out.display().to_string())).unwrap();
    triangulab(&["run", "--config", path.to_str().unwrap()])
}

#[test]
fn list_shows_every_experiment() {
    let out = triangulab(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "sigma-equality",
        "spectral-mapping",
        "macaev-norms",
        "resolvent-profile",
        "levinson",
        "fractional-powers",
        "ebeta-asymptotics",
        "semigroup-ebeta",
        "growth-frac",
        "growth-ebeta",
        "symbol-trace",
        "prop54",
        "boundedness",
        "annulus-jialpha",
        "witness",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from list");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown-experiment", "experiment = \"nope\"\n"),
        ("unknown-key", "experiment = \"witness\"\n[grid]\nsize = 4\n"),
        ("malformed", "experiment = \"witness\n"),
        ("bad-value", "experiment = \"sigma-equality\"\n[grid]\nn = 1\n"),
        ("wrong-kind", "experiment = \"growth-ebeta\"\n[kernel]\nkind = \"jialpha\"\n"),
        ("aliasing", "experiment = \"prop54\"\n[grid]\nn = 64\n[ladder]\nxi = [32.0, 64.0]\n"),
    ] {
        let out = run_config(dir.path(), name, body);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = triangulab(&["run", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn passing_run_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "sigma", "experiment = \"sigma-equality\"\nsamples = 10\n[grid]\nn = 12\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sigma/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "sigma-equality");
    assert_eq!(summary["config_echo"]["samples"], 10);
    assert_eq!(summary["artifacts"][0], "sigma_equality.csv");
    for check in summary["checks"].as_array().unwrap() {
        for key in ["name", "paper_anchor", "value", "threshold", "pass"] {
            assert!(check.get(key).is_some(), "check lacks {key}");
        }
    }
    let csv = std::fs::read_to_string(dir.path().join("sigma/sigma_equality.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn failing_check_exits_1() {
    // a coarse grid cannot reach the outer radius of the annulus
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "annulus", "experiment = \"annulus-jialpha\"\n[grid]\nn = 64\n");
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL")));
    assert!(dir.path().join("annulus/summary.json").exists());
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let body = "experiment = \"macaev-norms\"\nseed = 7\nsamples = 5\n[grid]\nn = 8\n";
    assert!(run_config(dir.path(), "a", body).status.success());
    assert!(run_config(dir.path(), "b", body).status.success());
    for file in ["random_norms.csv", "fractional_norms.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let other = "experiment = \"macaev-norms\"\nseed = 8\nsamples = 5\n[grid]\nn = 8\n";
    assert!(run_config(dir.path(), "c", other).status.success());
    assert_ne!(
        std::fs::read(dir.path().join("a/random_norms.csv")).unwrap(),
        std::fs::read(dir.path().join("c/random_norms.csv")).unwrap()
    );
}

#[test]
fn symbol_trace_csv_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "trace", "experiment = \"symbol-trace\"\n[ladder]\nxi = [1.0, 2.0, 4.0]\n");
    assert!(out.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trace/symbol_trace.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "xi,re_s_tilde,im_s_tilde,re_s_tilde1,im_s_tilde1,re_g,im_g,abs_g");
    assert_eq!(csv.lines().count(), 7);
}
