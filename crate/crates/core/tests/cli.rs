mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stancu_nno::io::read_numeric_csv;

fn stancu(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stancu-nno"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn with_config(cmd: &str, toml: &str, extra: &[&str]) -> (tempfile::TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, toml).unwrap();
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = stancu(&args, &dir.path().join("out"));
    (dir, out)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kernel_check_passes_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = stancu(&["kernel-check"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("kernel_check.json"));
    assert_eq!(report["all_passed"], true);
}

#[test]
fn kernel_check_fails_with_short_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = stancu(&["kernel-check", "--truncation", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&dir.path().join("kernel_check.json"))["all_passed"], false);
}

#[test]
fn approximate_default_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = stancu(&["approximate"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_numeric_csv(&dir.path().join("approximate.csv")).unwrap();
    assert_eq!(header, ["s", "f_true", "F_a0_b0", "F_a0.5_b0.5", "F_a1_b2"]);
    assert_eq!(rows.len(), 1001);
    for row in rows.iter().step_by(25) {
        let oracle = common::classical_1d(common::paper_f, 50, row[0]);
        assert!((row[2] - oracle).abs() < 1e-12);
    }
}

#[test]
fn approximate_constant_function() {
    let (dir, out) = with_config("approximate", "function = \"constant\"\nconstant = -1.75\ngrid_size = 101\n", &[]);
    assert!(out.status.success());
    let (_, rows) = read_numeric_csv(&dir.path().join("out/approximate.csv")).unwrap();
    for row in rows {
        assert!(row[2..].iter().all(|v| (v - row[1]).abs() < 1e-12));
    }
}

#[test]
fn converge_synthetic_slope() {
    let (dir, out) = with_config("converge", "synthetic_errors = true\n", &[]);
    assert!(out.status.success());
    let report = json(&dir.path().join("out/convergence.json"));
    let slope = report["fitted_slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 1e-6);
    assert_eq!(report["entries"].as_array().unwrap().len(), 100);
}

#[test]
fn converge_single_resolution_is_degenerate() {
    let (dir, out) = with_config("converge", "n_list = [50]\ngrid_size = 201\n", &[]);
    assert!(out.status.success());
    let report = json(&dir.path().join("out/convergence.json"));
    assert_eq!(report["entries"].as_array().unwrap().len(), 1);
    assert!(report["fitted_slope"].is_null());
    assert_eq!(report["degenerate"], true);
}

#[test]
fn converge_small_sweep_decays() {
    let (dir, out) = with_config("converge", "n_list = [10, 100, 1000]\ngrid_size = 2001\n", &[]);
    assert!(out.status.success());
    let (header, rows) = read_numeric_csv(&dir.path().join("out/convergence.csv")).unwrap();
    assert_eq!(header, ["n", "max_error", "mean_abs_error", "bound"]);
    assert!(rows[2][1] < rows[0][1] / 20.0);
    assert!(rows.iter().all(|r| r[1] <= r[3]));
}

#[test]
fn nodes_shift_values() {
    let dir = tempfile::tempdir().unwrap();
    assert!(stancu(&["nodes"], dir.path()).status.success());
    let (_, rows) = read_numeric_csv(&dir.path().join("nodes.csv")).unwrap();
    assert_eq!(rows.len(), 51);
    assert!((rows[0][3] - 0.5 / 50.5).abs() < 1e-15);
    assert!((rows[50][2] - 50.5 / 50.5).abs() < 1e-15);

    let zero = tempfile::tempdir().unwrap();
    assert!(stancu(&["nodes", "--alpha", "0", "--beta", "0"], zero.path()).status.success());
    let (_, rows) = read_numeric_csv(&zero.path().join("nodes.csv")).unwrap();
    assert!(rows.iter().all(|r| r[3] == 0.0));
    let meta = json(&zero.path().join("nodes.json"));
    assert_eq!(meta["enclosure_holds"], true);
}

#[test]
fn denoise_single_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = stancu(&["denoise", "--n", "400"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_numeric_csv(&dir.path().join("denoise.csv")).unwrap();
    assert_eq!(header, ["s", "truth", "noisy_nearest", "reconstruction"]);
    assert_eq!(rows.len(), 1000);
    let meta = json(&dir.path().join("denoise.json"));
    assert_eq!(meta["seed"], 42);
    assert!(meta["generator"].as_str().unwrap().contains("ChaCha20"));
    assert!(meta["rmse"].as_f64().unwrap() < 0.15);
}

#[test]
fn denoise_batch_table() {
    let dir = tempfile::tempdir().unwrap();
    assert!(stancu(&["denoise", "--batch"], dir.path()).status.success());
    let (_, rows) = read_numeric_csv(&dir.path().join("denoise_batch.csv")).unwrap();
    let ns: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(ns, [100.0, 200.0, 400.0, 600.0, 800.0, 1000.0]);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}

#[test]
fn denoise_reads_signal_file() {
    let first = tempfile::tempdir().unwrap();
    assert!(stancu(&["denoise", "--n", "300", "--seed", "5"], first.path()).status.success());
    let signal = first.path().join("signal.csv");
    let second = tempfile::tempdir().unwrap();
    let out = stancu(&["denoise", "--signal", signal.to_str().unwrap()], second.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(first.path().join("denoise.csv")).unwrap(),
        fs::read(second.path().join("denoise.csv")).unwrap()
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    for cmd in [&["denoise"][..], &["approximate"], &["nodes"], &["kernel-check"]] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(stancu(cmd, a.path()).status.success());
        assert!(stancu(cmd, b.path()).status.success());
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(
                fs::read(a.path().join(&name)).unwrap(),
                fs::read(b.path().join(&name)).unwrap(),
                "{cmd:?} {name:?}"
            );
        }
    }
}

#[test]
fn invalid_config_is_an_error() {
    let (_dir, out) = with_config("converge", "n_lits = [10]\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_lits"));

    let (_dir, out) = with_config("approximate", "alpha = 2.0\nbeta = 1.0\n", &[]);
    assert_eq!(out.status.code(), Some(2));

    let (_dir, out) = with_config("approximate", "function = \"nope\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("function"));
}

#[test]
fn flags_override_config_file() {
    let (dir, out) = with_config("nodes", "n = 20\nalpha = 0.25\nbeta = 0.5\n", &["--n", "30"]);
    assert!(out.status.success());
    let resolved = json(&dir.path().join("out/resolved_config.json"));
    assert_eq!(resolved["n"], 30);
    assert_eq!(resolved["alpha"], 0.25);
    assert!(resolved.get("out").is_none());
}
