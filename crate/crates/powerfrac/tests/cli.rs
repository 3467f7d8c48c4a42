use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerfrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn ml_power_of_two() {
    let out = run(&["ml", "--k", "1", "--l", "1", "--p", "2", "--tau", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("tau,value,terms_used"));
    assert_eq!(text.lines().count(), 2);
    let v = column(&text, 1)[0];
    assert!((v - 8.0).abs() <= 4.0 * f64::EPSILON * 8.0, "{v}");
}

#[test]
fn ml_cancellation_exits_3() {
    // the alternating terms reach 1e55 while the value is about 0.05
    let out = run(&["ml", "--k", "0.5", "--l", "1", "--p", "10", "--tau", "-5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cancel"));
}

#[test]
fn ml_grid_matches_library() {
    let out = run(&["ml", "--k", "0.5", "--l", "1", "--p", "e", "--grid", "0:1:5"]);
    let text = stdout(&out);
    let taus = column(&text, 0);
    let values = column(&text, 1);
    assert_eq!(taus.len(), 5);
    for (tau, v) in taus.iter().zip(values) {
        let lib = powerfrac_core::specfun::power_ml(0.5, 1.0, std::f64::consts::E, *tau, 1e-17).unwrap();
        assert_eq!(v, lib.value);
    }
}

#[test]
fn ml_invalid_k_exits_2() {
    let out = run(&["ml", "--k", "0", "--l", "1", "--p", "2", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k > 0"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--seedless", "verify", "--suite", "reductions"]).status.code(), Some(2));
    assert_eq!(run(&["ml", "--k", "1", "--l", "1", "--p", "2", "--grid", "0:1:1"]).status.code(), Some(2));
    let bad_weight = run(&[
        "deriv", "--f", "t", "--alpha", "0.5", "--beta", "1", "--p", "2", "--weight", "t^3", "--grid", "0:1:3",
    ]);
    assert_eq!(bad_weight.status.code(), Some(2));
    let bad_alpha = run(&["deriv", "--f", "t", "--alpha", "1", "--beta", "1", "--p", "2", "--grid", "0:1:3"]);
    assert_eq!(bad_alpha.status.code(), Some(2));
}

#[test]
fn divergent_closed_form_exits_3() {
    // |mu ln p| delta^-beta = 9 ln 3 > 1
    let out = run(&[
        "taylor", "--example", "sin", "--alpha", "0.9", "--beta", "1", "--p", "3", "--orders", "1", "--grid", "0:1:3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("l=1"));
}

#[test]
fn deriv_of_constant_is_zero() {
    let out = run(&["deriv", "--f", "const:3", "--alpha", "0.4", "--beta", "1.2", "--p", "2", "--grid", "0:1:4"]);
    assert!(out.status.success());
    assert!(column(&stdout(&out), 1).iter().all(|&v| v == 0.0));
}

#[test]
fn deriv_forms_agree_and_vanish_at_base() {
    let common = [
        "deriv", "--f", "sin", "--alpha", "0.5", "--beta", "0.8", "--p", "3", "--weight", "exp(-1*t)", "--a", "0.2",
        "--grid", "0.2:1.2:6",
    ];
    let quad = stdout(&run(&[&common[..], &["--form", "quadrature"]].concat()));
    let series = stdout(&run(&[&common[..], &["--form", "series"]].concat()));
    assert_eq!(quad.lines().next(), Some("t,value"));
    assert_eq!(series.lines().next(), Some("t,value,terms_used"));
    let (q, s) = (column(&quad, 1), column(&series, 1));
    assert_eq!(q[0], 0.0);
    assert_eq!(s[0], 0.0);
    for (a, b) in q.iter().zip(&s) {
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }
}

#[test]
fn integ_of_one_with_unit_weight() {
    // chi + ln p phi t^beta / Gamma(beta + 1) with alpha = 0.5, beta = 1, p = e
    let out = run(&["integ", "--f", "const:1", "--alpha", "0.5", "--beta", "1", "--p", "e", "--grid", "0:1:3"]);
    let v = column(&stdout(&out), 1);
    for (t, got) in [0.0, 0.5, 1.0].iter().zip(v) {
        let exact = 0.5 + 0.5 * t;
        assert!((got - exact).abs() < 1e-14, "t={t}");
    }
}

#[test]
fn taylor_order_zero_is_constant() {
    let out = run(&[
        "taylor", "--example", "cos", "--alpha", "0.1", "--beta", "1.5", "--p", "2", "--orders", "0,2", "--grid",
        "0:1:5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("t,f,A_0,A_2"));
    assert!(column(&text, 2).iter().all(|&v| v == 1.0));
}

#[test]
fn taylor_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths = |tag: &str| (dir.path().join(format!("{tag}.csv")), dir.path().join(format!("{tag}.svg")));
    let make = |tag: &str| {
        let (csv, svg) = paths(tag);
        let out = run(&[
            "taylor", "--example", "sin", "--alpha", "0.1", "--beta", "1.5", "--p", "2", "--grid", "0:1:201",
            "--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        (fs::read(csv).unwrap(), fs::read(svg).unwrap())
    };
    let (a, b) = (make("a"), make("b"));
    assert_eq!(a, b);
    let csv = String::from_utf8(a.0).unwrap();
    assert!(csv.starts_with("t,f,A_1,A_2,A_3\n"));
    assert_eq!(csv.lines().count(), 202);
    assert!(!csv.contains('\r'));
    let svg = String::from_utf8(a.1).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ml.csv");
    let out = run(&["--out", path.to_str().unwrap(), "ml", "--k", "1", "--l", "1", "--p", "2", "--tau", "1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(path).unwrap(), "tau,value,terms_used\n1.0,2.0,17\n");
}

#[test]
fn verify_reductions_passes() {
    let out = run(&["verify", "--suite", "reductions", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let trailer = text.lines().last().unwrap();
    assert!(trailer.starts_with("MAX ") && trailer.ends_with(" PASS"), "{trailer}");
    assert_eq!(text.lines().nth(0).unwrap().split('\t').count(), 5);
}

#[test]
fn verify_failure_exits_1() {
    let out = run(&["verify", "--suite", "reductions", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
}

#[test]
fn negative_grid_start() {
    let out = run(&["ml", "--k", "0.5", "--l", "1", "--p", "e", "--grid", "-1:1:3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(column(&text, 0), vec![-1.0, 0.0, 1.0]);
    // E_{1/2}(-1) = e erfc(1)
    assert!((column(&text, 1)[0] - 0.427_583_576_155_807).abs() < 1e-15);
}
