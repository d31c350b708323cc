use std::path::PathBuf;
use std::process::{Command, Output};

fn fvelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvelab"))
        .args(args)
        .env_remove("FVELAB_QUAD_POINTS")
        .output()
        .expect("spawn fvelab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fvelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Values on the `alphas:` line of a design summary.
fn alphas(summary: &str) -> Vec<f64> {
    let line = summary.lines().find(|l| l.starts_with("alphas:")).unwrap();
    line["alphas:".len()..]
        .split(',')
        .map(|s| s.trim().parse().unwrap())
        .collect()
}

#[test]
fn design_quartic_method_ii() {
    let out = scratch("q4.json");
    let o = fvelab(&[
        "design",
        "--k",
        "4",
        "--method",
        "II",
        "--params",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let a = alphas(&stdout(&o));
    assert!(
        (a[0] - 0.8222).abs() < 1e-4 && (a[1] - 0.2720).abs() < 1e-4,
        "{a:?}"
    );
    assert!(stdout(&o).contains("max orthogonality order: 4"));

    let spec = format!("file:{}", out.display());
    let c = fvelab(&["check", "--scheme", &spec, "--r", "4"]);
    assert_eq!(stdout(&c).trim(), "PASS");
}

#[test]
fn design_quintic_family() {
    let o = fvelab(&[
        "design",
        "--k",
        "5",
        "--method",
        "quintic",
        "--params",
        "0.9682458365518543",
    ]);
    assert!(o.status.success());
    let a = alphas(&stdout(&o));
    assert!((a[1] - 0.629941).abs() < 1e-6, "{a:?}");
}

#[test]
fn method_ii_rejects_odd_order() {
    let o = fvelab(&["design", "--k", "3", "--method", "II", "--params", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not valid for odd order"));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_reports_pass_and_fail() {
    let cases = [
        ("preset:scheme-3-1", "3", "FAIL (max r = 2)"),
        ("preset:scheme-4-1", "4", "PASS"),
        ("preset:gauss-5", "5", "PASS"),
    ];
    for (scheme, r, want) in cases {
        let o = fvelab(&["check", "--scheme", scheme, "--r", r]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want, "{scheme} r={r}");
    }
}

#[test]
fn solve_prints_error_columns() {
    let o = fvelab(&[
        "solve",
        "--scheme",
        "preset:scheme-3-1",
        "--problem",
        "example-6-1",
        "--N",
        "8",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "err_h1",
            "err_l2",
            "err_ui_h1",
            "err_ui_l2",
            "err_p1",
            "err_p0"
        ]
    );
    for line in text.lines() {
        let v: f64 = line.split(' ').nth(1).unwrap().parse().unwrap();
        assert!(v > 0.0 && v < 1e-2, "{line}");
    }
}

#[test]
fn study_writes_table_and_csv() {
    let out = scratch("study.csv");
    let o = fvelab(&[
        "study",
        "--scheme",
        "preset:scheme-4-1",
        "--problem",
        "example-6-1",
        "--levels",
        "2,4,8,16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let md = stdout(&o);
    assert!(md.contains("| 1/16 |"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("h,err_h1,eoc_h1"));
    assert!(lines[1].starts_with("5.0000E-01,"));
    assert!(lines[4].starts_with("6.2500E-02,"));
    let rate: f64 = lines[4].split(',').nth(2).unwrap().parse().unwrap();
    assert!((rate - 4.0).abs() < 0.05);
}

#[test]
fn profile_rows_cover_every_element() {
    let out = scratch("profile.csv");
    let o = fvelab(&[
        "profile",
        "--scheme",
        "preset:scheme-4-1",
        "--problem",
        "example-6-1",
        "--N",
        "16",
        "--samples",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("xi,abs_err_value,abs_err_deriv,element_index")
    );
    assert_eq!(lines.count(), 16 * 9);
}

#[test]
fn quadrature_override_is_validated() {
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_fvelab"))
            .args([
                "solve",
                "--scheme",
                "preset:scheme-3-1",
                "--problem",
                "example-6-1",
                "--N",
                "4",
            ])
            .env("FVELAB_QUAD_POINTS", value)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
    assert!(run("8").status.success());
}

#[test]
fn bad_sources_and_usage_exit_2() {
    assert_eq!(
        fvelab(&["check", "--scheme", "scheme-3-1", "--r", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fvelab(&["check", "--scheme", "preset:nope", "--r", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fvelab(&["check", "--scheme", "preset:scheme-3-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fvelab(&[]).status.code(), Some(2));
}

#[test]
fn ill_posed_scheme_is_a_numerical_failure() {
    let path = scratch("ill.json");
    std::fs::write(&path, r#"{"k": 4, "alphas": [0.9, 0.2]}"#).unwrap();
    let spec = format!("file:{}", path.display());
    let o = fvelab(&[
        "solve",
        "--scheme",
        &spec,
        "--problem",
        "example-6-1",
        "--N",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}
