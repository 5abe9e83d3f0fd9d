//! End-to-end checks of the command-line front end: output values,
//! exit codes, file round-trips, and the fault-injection path.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn subfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subfrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.split_whitespace()
        .find_map(|tok| tok.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key}= in: {text}"))
        .parse()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subfrac-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const BASE_CONFIG: &str = r#"
[problem]
rho = 0.5
horizon = 1.0

[basis]
kind = "sine"
cutoff = 4

[initial]
kind = "expression"
expression = "0.2*sin(x) + 0.02*sin(2*x)"

[output]
times = [0.5, 1.0]
"#;

#[test]
fn ml_values_match_library_identities() {
    let out = subfrac(&["ml", "--rho", "1", "--z", "-2"]);
    assert!(out.status.success());
    let v = field(&stdout(&out), "value");
    assert!((v - (-2.0f64).exp()).abs() < 1e-15);

    let out = subfrac(&["ml", "--kernel", "--rho", "0.5", "--lambda", "0", "--t", "4"]);
    assert!(out.status.success());
    let k = field(&stdout(&out), "kernel");
    assert!((k - 0.28209479177387814).abs() < 1e-16, "{k}");
}

#[test]
fn accuracy_refusal_exits_three() {
    // rho > 1 far outside the series radius: no regime certifies
    let out = subfrac(&["ml", "--rho", "1.7", "--z", "-60"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_two() {
    let out = subfrac(&["ml", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = subfrac(&["solve", "--config", "/nonexistent/run.toml", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));

    let dir = scratch("badkey");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, format!("{BASE_CONFIG}\n[problem.extra]\nx = 1\n")).unwrap();
    let out = subfrac(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn coefficient_dump_round_trips() {
    let dir = scratch("roundtrip");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, BASE_CONFIG).unwrap();
    let a = dir.join("a");
    let out = subfrac(&["solve", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // feed the dumped spectrum back in as the initial data
    let cfg2 = dir.join("again.toml");
    std::fs::write(
        &cfg2,
        format!(
            r#"
[problem]
rho = 0.5
horizon = 1.0

[basis]
kind = "sine"
cutoff = 4

[initial]
kind = "coefficients_csv"
path = "a/coefficients.csv"

[output]
times = [0.5, 1.0]
"#
        ),
    )
    .unwrap();
    let b = dir.join("b");
    let out = subfrac(&["solve", "--config", cfg2.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for name in ["coefficients.csv", "slice_000.csv", "slice_001.csv"] {
        let xa = std::fs::read(a.join(name)).unwrap();
        let xb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(xa, xb, "{name} differs after round-trip");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_passes_clean_and_catches_injected_fault() {
    let dir = scratch("verify");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, BASE_CONFIG).unwrap();
    let out = subfrac(&["--quiet", "verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verification PASS"));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, format!("{BASE_CONFIG}\n[inject]\nmode = 1\ndelta = 1e-3\n")).unwrap();
    let out = subfrac(&["--quiet", "verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("verification FAIL"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_report_file_lists_all_checks() {
    let dir = scratch("report");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, BASE_CONFIG).unwrap();
    let out = subfrac(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    for check in [
        "pde-residual-spectral",
        "pde-residual-sampled",
        "initial-condition",
        "uniqueness-projections",
        "truncation-tail",
    ] {
        assert!(text.contains(check), "report lacks {check}:\n{text}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn norms_sandwich_holds() {
    let dir = scratch("norms");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, BASE_CONFIG).unwrap();
    let out = subfrac(&["norms", "--config", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("equivalence cutoff="));
    assert!(text.contains("ok=true"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn torus_solve_writes_expected_grid() {
    let dir = scratch("torus");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        r#"
[problem]
rho = 0.7
horizon = 2.0

[basis]
kind = "torus"
dimension = 1
cutoff = 3

[initial]
kind = "expression"
expression = "cos(x) + 0.1*sin(2*x)"

[forcing]
kind = "separable"
constant = 0.25

[forcing.spatial]
kind = "expression"
expression = "cos(x)"

[output]
times = [1.0]
grid = 32
"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = subfrac(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let slice = std::fs::read_to_string(out_dir.join("slice_000.csv")).unwrap();
    let rows = slice.lines().filter(|l| !l.starts_with('#') && !l.starts_with('x')).count();
    assert_eq!(rows, 32);
    assert!(Path::new(&out_dir.join("manifest.txt")).exists());
    std::fs::remove_dir_all(&dir).unwrap();
}
