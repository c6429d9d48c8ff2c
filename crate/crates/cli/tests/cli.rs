use std::process::{Command, Output};

fn lfock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfock"))
        .args(args)
        .output()
        .expect("spawn lfock")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn figure_output_is_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["fig1", "--grid", "0:5:21"],
        &["fig2", "--grid", "0.02:0.9:12"],
        &["fig3a", "--grid", "0.05:0.6:8"],
        &["fig3b", "--grid", "0.05:0.6:8", "--format", "json"],
    ];
    for args in runs {
        let a = lfock(args);
        let b = lfock(args);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_starts_with_metadata_and_leaves_gaps_empty() {
    let o = lfock(&["fig1", "--alpha", "-1", "--grid", "0:2:3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let meta: serde_json::Value =
        serde_json::from_str(lines.next().unwrap().strip_prefix('#').unwrap()).unwrap();
    assert_eq!(meta["command"], "fig1");
    assert_eq!(lines.next(), Some("lambda,Q[alpha=-1],note"));
    // λ = 1 cancels α = −1, so Q is undefined there
    let mid = lines.nth(1).unwrap();
    assert!(mid.starts_with("1.0,,"), "{mid}");
}

#[test]
fn json_writes_missing_values_as_null() {
    let o = lfock(&[
        "fig3b", "--lambda", "1", "--grid", "0:0.3:2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let q = &v["series"][0]["values"];
    assert!(q[0].is_null());
    assert!(q[1].as_f64().unwrap() > 0.0);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("lfock-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ket.csv");
    let o = lfock(&[
        "state",
        "lambda_ket",
        "--lambda",
        "1",
        "--n",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    let h = 0.5f64.sqrt();
    let first: Vec<f64> = rows[0]
        .split(',')
        .take(5)
        .map(|f| f.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - h).abs() <= 1e-15);
    assert_eq!(&first[3..], &[0.0, 0.0]);
    assert!(rows[1].starts_with("1.0,"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_passes() {
    let o = lfock(&["verify", "poisson"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).starts_with("suite,status,checks,max_err,failures\npoisson,pass,"));
    let o = lfock(&["verify"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        stdout(&o).lines().filter(|l| l.contains(",pass,")).count(),
        10
    );
}

#[test]
fn usage_errors_exit_1() {
    let cases: [&[&str]; 7] = [
        &[],
        &["fig1", "--grid", "0:5"],
        &["fig2", "--grid", "1:0:10"],
        &["fig1", "--alpha", "1,2,3"],
        &["verify", "bogus"],
        &["state", "bogus"],
        &["state", "lambda_cs", "--truncation", "-3"],
    ];
    for args in cases {
        let o = lfock(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(lfock(&["--help"]).status.code(), Some(0));
    assert_eq!(lfock(&["fig2", "--help"]).status.code(), Some(0));
}

#[test]
fn numerical_errors_exit_3() {
    let o = lfock(&["state", "lambda_ss", "--lambda", "2", "--xi", "0.99"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
}
