use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qdunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdunkl"))
        .args(args)
        .env_remove("QDUNKL_THREADS")
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    serde_json::from_slice::<Value>(&out.stdout)
        .expect("stdout is JSON")
        .as_array()
        .expect("array of reports")
        .clone()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn trivial_inversion_passes() {
    let out = qdunkl(&["verify", "--suite", "inversion", "--theta1", "0", "--theta2", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = reports(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["check"], "inversion");
    assert_eq!(r[0]["residual"], 0.0);
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn gaussian_fixed_point_passes() {
    let out = qdunkl(&["verify", "--suite", "gaussian", "--alpha", "0.5", "--theta1", "pi/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = reports(&out);
    assert!(r.iter().any(|x| x["check"] == "gaussian_fixed_point"));
    assert!(r.iter().all(|x| x["pass"] == true));
}

#[test]
fn heisenberg_report_shape_and_failure_code() {
    // the Gaussian product sits below the compared constant when chi1 + chi2 > 0
    let out = qdunkl(&[
        "verify", "--suite", "heisenberg", "--chi1", "0.5", "--chi2", "1.0", "--theta1", "1.0",
        "--theta2", "0.7", "--moment-samples", "5",
    ]);
    let r = reports(&out);
    let random = r.iter().find(|x| x["check"] == "heisenberg_random").unwrap();
    assert!(random["ratio"].as_f64().unwrap() >= 1.0);
    let eq = r.iter().find(|x| x["check"] == "heisenberg_gaussian_equality").unwrap();
    assert!((eq["params"]["ratio"].as_f64().unwrap() - 0.49).abs() < 1e-9);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL heisenberg_gaussian_equality"));
}

#[test]
fn zero_weight_heisenberg_passes_with_caveat() {
    let out = qdunkl(&["verify", "--suite", "heisenberg,frqft", "--moment-samples", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("|x1||x2|"));
    let r = reports(&out);
    let f = r.iter().find(|x| x["check"] == "frqft_gaussian").unwrap();
    assert_eq!(f["params"]["sharp_constant"], 4.0);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suite", "plancherel,bounds", "--seed", "7", "--samples", "3"];
    let a = qdunkl(&args);
    let b = qdunkl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_qdunkl"))
        .args(args)
        .env("QDUNKL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(threaded.stdout, a.stdout);
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(qdunkl(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(qdunkl(&["verify", "--theta1", "tau"]).status.code(), Some(2));
    assert_eq!(qdunkl(&["transform2d"]).status.code(), Some(2));
    assert_eq!(
        qdunkl(&["transform2d", "--signal", "hermite(1)"]).status.code(),
        Some(2)
    );
    assert_eq!(qdunkl(&["kernel", "--theta", "0", "--x", "1", "--y", "1"]).status.code(), Some(2));
}

#[test]
fn transform2d_hermite_eigenrelation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = qdunkl(&[
        "transform2d", "--signal", "hermite(1,2)", "--theta1", "pi/3", "--theta2", "pi/2",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 48 * 48);
    // H_{1,2} picks up e^{i pi/3} on the left and e^{j pi} = -1 on the right
    let (c, s) = ((std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 3.0).sin());
    let input_dir = tempfile::tempdir().unwrap();
    let input = input_dir.path().join("in.csv");
    qdunkl(&[
        "transform2d", "--signal", "hermite(1,2)", "--theta1", "0", "--theta2", "0",
        "--output", input.to_str().unwrap(),
    ]);
    for (o, i) in rows.iter().zip(csv_rows(&input)) {
        let h = i[2];
        assert!((o[2] + c * h).abs() < 1e-8);
        assert!((o[3] + s * h).abs() < 1e-8);
        assert!(o[4].abs() < 1e-8 && o[5].abs() < 1e-8);
    }
}

#[test]
fn transform2d_compare_and_identity_echo() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.json");
    let out = qdunkl(&[
        "transform2d", "--signal", "gaussian(0.8)", "--chi1", "0.5", "--theta1", "0", "--theta2",
        "0", "--format", "json", "--output", input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let echoed = dir.path().join("echo.json");
    qdunkl(&[
        "transform2d", "--input", input.to_str().unwrap(), "--chi1", "0.5", "--theta1", "0",
        "--theta2", "0", "--format", "json", "--output", echoed.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read_to_string(&input).unwrap(),
        std::fs::read_to_string(&echoed).unwrap()
    );
    let cmp = qdunkl(&[
        "transform2d", "--input", input.to_str().unwrap(), "--chi1", "0.5", "--theta1", "pi/3",
        "--theta2", "2pi/5", "--compare", "--nmax", "30", "--mmax", "30", "--output", dir.path().join("t.csv").to_str().unwrap(),
    ]);
    assert_eq!(cmp.status.code(), Some(0), "{}", String::from_utf8_lossy(&cmp.stderr));
    let report: Value = serde_json::from_slice(&cmp.stderr).unwrap();
    // e^{-0.8 x^2} is not band-limited; its spectrum decays like (0.3/1.3)^{n/2}
    assert!(report["residual"].as_f64().unwrap() <= 1e-7);
    // a field on the wrong grid is rejected
    let wrong = qdunkl(&[
        "transform2d", "--input", input.to_str().unwrap(), "--chi1", "0.5", "--n", "40",
    ]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn kernel_point_and_batch() {
    let out = qdunkl(&["kernel", "--chi", "0.5", "--theta", "pi/2", "--x", "0", "--y", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let k: Vec<f64> = v["kernel"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(k[0], 1.0);
    assert!(k[1].abs() < 1e-15 && k[2] == 0.0 && k[3] == 0.0);
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pts.csv");
    std::fs::write(&input, "x,y\n1,2\n-3,0.5\n").unwrap();
    let output = dir.path().join("k.csv");
    let out = qdunkl(&[
        "kernel", "--chi", "1.2", "--theta", "1.1", "--axis", "k", "--input",
        input.to_str().unwrap(), "--output", output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&output);
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r[2].hypot(r[5]) <= 1.0 + 1e-12);
        assert_eq!((r[3], r[4]), (0.0, 0.0));
    }
}

#[test]
fn one_dimensional_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.csv");
    let s = dir.path().join("s.csv");
    let common = ["transform1d", "--chi", "0.7", "--theta", "1.3", "--axis", "j", "--side", "right", "--signal", "hermite(3)"];
    let mut a: Vec<&str> = common.to_vec();
    a.extend(["--output", q.to_str().unwrap()]);
    let mut b: Vec<&str> = common.to_vec();
    b.extend(["--path", "spectral", "--output", s.to_str().unwrap()]);
    assert_eq!(qdunkl(&a).status.code(), Some(0));
    assert_eq!(qdunkl(&b).status.code(), Some(0));
    for (x, y) in csv_rows(&q).iter().zip(csv_rows(&s)) {
        for k in 1..5 {
            assert!((x[k] - y[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn hankel_ground_state_is_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let out = qdunkl(&[
        "hankel", "--nu", "0.8", "--theta", "1.0", "--signal", "laguerre(0)", "--unweighted",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for r in csv_rows(&path) {
        let want = r[0].powf(1.3) * (-0.5 * r[0] * r[0]).exp();
        assert!((r[1] - want).abs() < 1e-9 && r[2].abs() < 1e-9);
    }
}

#[test]
fn moments_csv_batch() {
    let out = qdunkl(&["moments", "--signal", "hermite(1,0)", "--p", "1,2", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,chi1,chi2,theta1,theta2,ratio,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}
