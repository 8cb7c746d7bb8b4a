use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracspec::io::{read_metadata, read_table, Table};

fn fracspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(args)
        .env_remove("FRACSPEC_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok_table(args: &[&str]) -> Table {
    let out = fracspec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    read_table(out.stdout.as_slice()).unwrap()
}

fn summary_value(text: &str, key: &str) -> f64 {
    let field = text
        .split_whitespace()
        .find_map(|w| w.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text:?}"));
    field.parse().unwrap()
}

fn read(path: &Path) -> Table {
    read_table(fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn solve_riccati_is_a_sigmoid_to_one() {
    let t = ok_table(&["solve", "--equation", "riccati", "--alpha", "0.75", "--x0", "0", "--t-max", "10"]);
    assert_eq!(t.header, ["t", "x_spectral"]);
    let x = t.column("x_spectral").unwrap();
    assert_eq!(x.len(), 1001);
    assert_eq!(x[0], 0.0);
    assert!(x.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(x[1000] > 0.9 && x[1000] < 1.0);
}

#[test]
fn solve_logistic_integer_order_matches_closed_form() {
    let t = ok_table(&["solve", "--equation", "logistic", "--alpha", "1", "--x0", "0.75", "--lambda", "1"]);
    let sp = t.column("x_spectral").unwrap();
    let cf = t.column("x_closed_form").unwrap();
    let gap = sp.iter().zip(cf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-10, "{gap}");
}

#[test]
fn solve_cubic_decays_monotonically() {
    let t = ok_table(&["solve", "--equation", "cubic", "--alpha", "0.75", "--a", "1", "--b", "1", "--x0", "1"]);
    let x = t.column("x_spectral").unwrap();
    assert!((x[0] - 1.0).abs() < 1e-12);
    assert!(x.windows(2).all(|w| w[1] <= w[0]));
    assert!(x[x.len() - 1] < 0.1);
}

#[test]
fn residual_summary_and_table_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = fracspec(&["residual", "--equation", "logistic", "--alpha", "0.75", "--x0", "0.75", "--lambda", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    let max = summary_value(&summary, "max|delta|");
    assert!(max < 0.01, "{max}");
    let t = read(&path);
    assert_eq!(t.header, ["t", "delta", "short_asymptote", "long_asymptote"]);
    assert_eq!(t.rows(), 400);
    assert!(t.comments[0].starts_with("fitted_short_exponent="));
    let from_table = t.column("delta").unwrap().iter().map(|d| d.abs()).fold(0.0, f64::max);
    assert!((from_table - max).abs() <= 1e-6 * max);
    let short = summary_value(&summary, "fitted_short_exponent");
    assert!((short - 1.5).abs() < 0.075, "{short}");
}

#[test]
fn residual_integer_order_vanishes() {
    let out = fracspec(&["residual", "--equation", "riccati", "--alpha", "1", "--x0", "0.5"]);
    assert!(out.status.success());
    let max = summary_value(&String::from_utf8(out.stderr).unwrap(), "max|delta|");
    assert!(max < 1e-12, "{max}");
    let t = read_table(out.stdout.as_slice()).unwrap();
    assert!(t.column("short_asymptote").unwrap().iter().all(|v| v.is_nan()));
}

#[test]
fn residual_custom_windows() {
    let out = fracspec(&["residual", "--alpha", "0.9", "--x0", "0.5", "--windows", "1e-4:1e-3,300:1000"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stderr).unwrap();
    assert!((summary_value(&s, "fitted_short_exponent") - 1.8).abs() < 0.02);
    assert!((summary_value(&s, "fitted_long_exponent") + 0.9).abs() < 0.02);
}

#[test]
fn integrate_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = fracspec(&["integrate", "--equation", "riccati", "--alpha", "1", "--x0", "0", "--t-max", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = read(&path);
    let err = t
        .column("t")
        .unwrap()
        .iter()
        .zip(t.column("x").unwrap())
        .map(|(t, x)| (x - t.tanh()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "{err}");
    let meta = read_metadata(fs::File::open(dir.path().join("x.csv.meta")).unwrap()).unwrap();
    for key in ["alpha", "h", "kind", "params", "corrector_iters"] {
        assert!(meta.contains_key(key), "{key}");
    }
    assert_eq!(meta["kind"], "riccati");
    assert_eq!(meta["h"], "0.001");
    assert_eq!(meta["two_phase"], "false");
}

#[test]
fn integrate_fixed_point_stays_put() {
    let t = ok_table(&["integrate", "--equation", "riccati", "--alpha", "0.6", "--x0", "1", "--t-max", "1", "--h", "0.01"]);
    assert!(t.column("x").unwrap().iter().all(|&x| x == 1.0));
}

#[test]
fn compare_integer_order_is_integrator_limited() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = fracspec(&["compare", "--equation", "logistic", "--alpha", "1", "--x0", "0.75", "--t-max", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(summary_value(&String::from_utf8(out.stdout).unwrap(), "max|delta|") < 1e-4);
    assert_eq!(read(&path).header, ["t", "x_num", "x_spectral", "delta"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = fracspec(&["residual", "--equation", "cubic", "--alpha", "0.5", "--points", "60", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn usage_and_validation_errors_exit_1() {
    let cases: &[&[&str]] = &[
        &["nonsense"],
        &["solve", "--alpha", "abc"],
        &["solve", "--equation", "riccati", "--lambda", "2"],
        &["solve", "--equation", "logistic", "--a", "2"],
        &["solve", "--alpha", "1.5"],
        &["solve", "--equation", "logistic", "--x0", "0.4"],
        &["residual", "--grid", "linear"],
        &["integrate", "--h", "0"],
        &["integrate", "--t-max", "1000"],
        &["sweep", "--out", "/nonexistent/never", "--alpha", ""],
    ];
    for args in cases {
        let out = fracspec(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(fracspec(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_riccati_alphas_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracspec(&["sweep", "--equation", "riccati", "--alpha", "0.5,0.75,0.9,1", "--x0", "0", "--points", "80", "--out", dir.path().to_str().unwrap(), "--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for a in ["0.5", "0.75", "0.9", "1"] {
        assert!(dir.path().join(format!("riccati_{a}_0_na.csv")).exists(), "{a}");
    }
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 5);
    assert!(index.starts_with("file,kind,alpha,x0,lambda,max_abs_delta\n"));
    assert!(!dir.path().join("MANIFEST.partial").exists());
}

#[test]
fn sweep_logistic_rescaled_overlay_coincides() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(["sweep", "--equation", "logistic", "--alpha", "0.75", "--lambda", "0.5,1,2", "--points", "120", "--out", dir.path().to_str().unwrap()])
        .env("FRACSPEC_WORKERS", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = read(&dir.path().join("logistic_0.75_0.75_rescaled.csv"));
    assert_eq!(t.header, ["t", "lambda_0.5", "lambda_1", "lambda_2"]);
    let base = t.column("lambda_1").unwrap();
    for name in ["lambda_0.5", "lambda_2"] {
        let gap = t.column(name).unwrap().iter().zip(base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-10, "{name}: {gap}");
    }
}

#[test]
fn sweep_worker_env_must_be_a_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(["sweep", "--points", "20", "--out", dir.path().to_str().unwrap()])
        .env("FRACSPEC_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_member_failure_leaves_partial_manifest() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where one member's CSV should go makes that write fail
    fs::create_dir(dir.path().join("riccati_0.9_0_na.csv")).unwrap();
    let out = fracspec(&["sweep", "--alpha", "0.5,0.9", "--points", "30", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let manifest = fs::read_to_string(dir.path().join("MANIFEST.partial")).unwrap();
    assert!(manifest.contains("ok riccati_0.5_0_na.csv"));
    assert!(manifest.contains("failed riccati_0.9_0_na.csv"));
    assert!(!dir.path().join("index.csv").exists());
}

#[test]
fn ml_table_is_hidden_but_works() {
    let help = String::from_utf8(fracspec(&["--help"]).stdout).unwrap();
    assert!(!help.contains("ml-table"));
    let out = fracspec(&["ml-table", "--alpha", "1", "--z", "0,-1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z,value,accuracy");
    let e1: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((e1 - (-1f64).exp()).abs() < 1e-15);
}
