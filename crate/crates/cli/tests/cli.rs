use std::process::{Command, Output};

fn twb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twb"))
        .args(args)
        .output()
        .expect("failed to run twb")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn last_row(out: &Output) -> Vec<String> {
    stdout(out)
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect()
}

#[test]
fn survival_thermal_reference() {
    let out = twb(&["survival", "--lambda", "1", "--nth", "1", "--ns", "0"]);
    assert!(out.status.success());
    let row = last_row(&out);
    let t_s: f64 = row[4].parse().unwrap();
    let t_0: f64 = row[5].parse().unwrap();
    assert!((t_s - 0.359_304_135).abs() < 1e-8);
    assert_eq!(t_s, t_0);
    assert_eq!(row[7], "closed_form");
}

#[test]
fn survival_phase_sensitive_uses_bisection() {
    let out = twb(&[
        "survival", "--lambda", "1", "--nth", "0.5", "--ns", "0.07", "--theta", "pi/5",
    ]);
    assert!(out.status.success());
    let row = last_row(&out);
    assert!((row[4].parse::<f64>().unwrap() - 0.587_13).abs() < 1e-5);
    assert_eq!(row[7], "bisection");
}

#[test]
fn survival_physical_time_scaling() {
    let unit = last_row(&twb(&[
        "survival", "--lambda", "1", "--nth", "1", "--ns", "0.1",
    ]));
    let scaled = last_row(&twb(&[
        "survival", "--lambda", "1", "--nth", "1", "--ns", "0.1", "--gamma", "2",
    ]));
    let a: f64 = unit[4].parse().unwrap();
    let b: f64 = scaled[4].parse().unwrap();
    assert!((a / 2.0 - b).abs() < 1e-12);
}

#[test]
fn pure_loss_json_reports_inf() {
    let out = twb(&["survival", "--lambda", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["t_s"], "inf");
    assert_eq!(v["results"]["t_0"], "inf");
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        vec!["survival", "--lambda", "-1"],
        vec!["survival", "--lambda", "1", "--nth", "-0.5"],
        vec!["charpoly", "--lambda", "1", "--exp-gt", "1.5"],
    ] {
        let out = twb(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with("error: "), "{err}");
        assert_eq!(err.trim_end().lines().count(), 1);
    }
}

#[test]
fn truncation_error_exits_3() {
    let out = twb(&[
        "oracle-compare",
        "--lambda",
        "1",
        "--t",
        "0.1",
        "--cutoff",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn fig1_empty_sweep_is_header_only() {
    let out = twb(&["fig1", "--nth", "1", "--ns-count", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim_end(), "lambda,n_th,n_s,t_s,t_0,G");
}

#[test]
fn fig1_rows_are_ordered_and_negative() {
    let out = twb(&[
        "fig1",
        "--nth",
        "0.001",
        "--lambda",
        "0.1,0.55,1",
        "--ns-count",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 15);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], [0.1, 0.55, 1.0][i / 5]);
        assert!(r[5] < 0.0);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["fig1", "--nth", "1", "--ns-count", "20"];
    assert_eq!(twb(&args).stdout, twb(&args).stdout);
}

#[test]
fn charpoly_writes_roots_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    let out = twb(&[
        "charpoly",
        "--lambda",
        "1",
        "--x-count",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,q");
    assert_eq!(csv.lines().count(), 12);
    let side = std::fs::read_to_string(dir.path().join("q.csv.roots.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&side).unwrap();
    assert_eq!(v["results"]["negative_roots"], 1);
    let min = v["results"]["min_eigenvalue"].as_f64().unwrap();
    assert!((min + 0.118_89).abs() < 1e-5);
}

#[test]
fn evolve_matches_exp_gt_form() {
    let t = (1.0f64 / 0.55).ln().to_string();
    let a = twb(&["evolve", "--lambda", "1", "--nth", "0.5", "--t", &t]);
    let b = twb(&[
        "evolve", "--lambda", "1", "--nth", "0.5", "--exp-gt", "0.55",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a).lines().count(), 5);
    let parse = |o: &Output| -> Vec<f64> {
        stdout(o)
            .lines()
            .skip(1)
            .flat_map(|l| {
                l.split(',')
                    .skip(1)
                    .map(|x| x.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    for (x, y) in parse(&a).iter().zip(parse(&b)) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn oracle_compare_small_case() {
    let out = twb(&[
        "oracle-compare",
        "--lambda",
        "0.3",
        "--nth",
        "0.2",
        "--ns",
        "0.05",
        "--theta",
        "1",
        "--t",
        "0.3",
        "--cutoff",
        "14",
        "--trunc-tol",
        "1e-4",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["pass"], true);
    assert_eq!(v["results"]["verdicts_agree"], true);
}

#[test]
fn help_mentions_time_units() {
    let out = twb(&["survival", "--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1/Γ"));
}
