use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .output()
        .expect("spawn qss")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&qss(&full))).unwrap()
}

#[test]
fn invalid_invocations_never_exit_zero() {
    let cases: &[&[&str]] = &[
        &[],
        &["teleport"],
        &["run", "--trials", "0"],
        &["run", "--trials", "-5"],
        &["run", "--cheat", "eve"],
        &["run", "--format", "xml"],
        &["run", "--secret", "1,0,0"],
        &["run", "--secret", "0,0,0,0"],
        &["run", "--secret", "nan,0,0,1"],
        &["run", "--secret-polar", "1"],
        &["run", "--secret", "1,0,0,0", "--secret-polar", "0,0"],
        &["run", "--bob-angle", "30"],
        &["run", "--cheat", "bob", "--cheat-basis-angle", "abc"],
        &["run", "--seed", "-1"],
        &["sweep", "--step", "0"],
        &["sweep", "--start", "10", "--stop", "0"],
        &["sweep", "--who", "alice"],
        &["shor", "--error", "W:3"],
        &["shor", "--error", "X:9"],
        &["shor", "--error", "measure:1"],
        &["oracle", "--bogus"],
    ];
    for args in cases {
        let code = qss(args).status.code();
        assert!(
            matches!(code, Some(c) if c != 0),
            "{args:?} exited with {code:?}"
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qss(&["sweep", "--step", "0"]).status.code(), Some(2));
    assert_eq!(qss(&["shor", "--error", "W:3"]).status.code(), Some(2));
    assert_eq!(qss(&["run", "--secret", "0,0,0,0"]).status.code(), Some(2));
    assert_eq!(qss(&["run", "--cheat", "eve"]).status.code(), Some(2));
}

#[test]
fn io_failure_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("report.json");
    let out = qss(&["run", "--trials", "10", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qss(&[
        "run",
        "--trials",
        "20",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict_counts"]["NoCheat"], 20);
}

#[test]
fn report_has_the_documented_fields() {
    let v = json(&["run", "--trials", "1000"]);
    for key in [
        "config",
        "exact_distribution",
        "empirical_distribution",
        "verdict_counts",
        "mean_fidelity_before_correction",
        "mean_fidelity_after_correction",
        "paper_comparison",
        "wall_time_ms",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict_counts"]["NoCheat"], 1000);
    assert_eq!(v["mean_fidelity_after_correction"], 1.0);
    assert_eq!(v["exact_distribution"]["11"]["exact"], "1");
    let mut keys: Vec<&String> = v["exact_distribution"]
        .as_object()
        .unwrap()
        .keys()
        .collect();
    keys.sort();
    assert_eq!(keys, ["00", "01", "10", "11"]);
    let total: u64 = ["00", "01", "10", "11"]
        .iter()
        .map(|k| v["empirical_distribution"][k]["count"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 1000);
}

#[test]
fn renormalization_warns_on_stderr() {
    let out = qss(&["run", "--trials", "10", "--secret", "3,0,4,0"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("renormalized"));
    let quiet = qss(&["run", "--trials", "10", "--secret", "0.6,0,0.8,0"]);
    assert!(quiet.stderr.is_empty());
}

fn strip_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let args = [
        "run",
        "--cheat",
        "bob",
        "--cheat-basis-angle",
        "30",
        "--trials",
        "500",
        "--seed",
        "9",
    ];
    let v = json(&args);
    let mut full = args.to_vec();
    full.extend(["--format", "csv"]);
    let csv = stdout(&qss(&full));
    let mut rows = std::collections::HashMap::new();
    for line in csv.lines().skip(1) {
        let mut it = line.splitn(3, ',');
        let (s, k, val) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        rows.insert(format!("{s}/{k}"), val.to_string());
    }
    let num = |key: &str| rows[key].parse::<f64>().unwrap();
    for k in ["00", "01", "10", "11"] {
        assert_eq!(
            num(&format!("exact_distribution/{k}")),
            v["exact_distribution"][k]["probability"].as_f64().unwrap()
        );
        assert_eq!(
            num(&format!("empirical_frequency/{k}")),
            v["empirical_distribution"][k]["frequency"]
                .as_f64()
                .unwrap()
        );
        assert_eq!(
            num(&format!("empirical_count/{k}")),
            v["empirical_distribution"][k]["count"].as_f64().unwrap()
        );
    }
    for key in [
        "mean_fidelity_before_correction",
        "mean_fidelity_after_correction",
    ] {
        assert_eq!(num(&format!("{key}/")), v[key].as_f64().unwrap());
    }
    for p in v["paper_comparison"].as_array().unwrap() {
        let label = p["label"].as_str().unwrap();
        assert_eq!(
            num(&format!("paper_comparison/{label}.max_amp_delta")),
            p["max_amp_delta"].as_f64().unwrap()
        );
        assert_eq!(
            rows[&format!("paper_comparison/{label}.verdict")],
            p["verdict"].as_str().unwrap()
        );
    }
    assert_eq!(
        num("config/secret.beta.re"),
        v["config"]["secret"]["beta"]["re"].as_f64().unwrap()
    );
}

#[test]
fn sweep_json_and_csv_agree() {
    let args = ["sweep", "--start", "0", "--stop", "90", "--step", "15"];
    let v = json(&args);
    let csv = stdout(&qss(&args));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        header,
        [
            "angle_deg",
            "p00",
            "p01",
            "p10",
            "p11",
            "fidelity_after_correction",
            "half_claim_max_deviation"
        ]
    );
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for (line, row) in lines.zip(rows) {
        for (col, cell) in header.iter().zip(line.split(',')) {
            assert_eq!(
                cell.parse::<f64>().unwrap(),
                row[col].as_f64().unwrap(),
                "{col}"
            );
        }
    }
}

#[test]
fn seeded_runs_are_reproducible_and_seed_sensitive() {
    let base = ["run", "--cheat", "both", "--trials", "2000"];
    let a = strip_time(json(&[&base[..], &["--seed", "5"]].concat()));
    let b = strip_time(json(&[&base[..], &["--seed", "5"]].concat()));
    let c = strip_time(json(&[&base[..], &["--seed", "6"]].concat()));
    assert_eq!(a, b);
    assert_ne!(a["empirical_distribution"], c["empirical_distribution"]);
}

#[test]
fn oracle_verdicts() {
    for secret in [
        "1,0,0,0",
        "0.6,0,0.8,0",
        "0.7071067811865476,0,0.7071067811865476,0",
    ] {
        let v = json(&["oracle", "--secret", secret]);
        let states = v["states"].as_array().unwrap();
        assert_eq!(states.len(), 9);
        assert!(states.iter().all(|s| s["verdict"] == "match"), "{secret}");
    }
    let v = json(&["oracle", "--secret", "1,0,0,0"]);
    assert_eq!(
        v["states"][3]["circuit"],
        "0.500000|000> + 0.500000|011> - 0.500000|101> - 0.500000|110>"
    );
}

#[test]
fn shor_single_cases() {
    let v = json(&["shor", "--error", "X:4"]);
    assert_eq!(v["recovered"], 1);
    assert_eq!(v["cases"][0]["min_fidelity"], 1.0);
    let v = json(&["shor", "--error", "none"]);
    assert_eq!(v["cases"][0]["sampled_syndrome"], "000000/00");
    assert_eq!(v["cases"][0]["min_fidelity"], 1.0);
    let v = json(&["shor", "--error", "measure:3:45", "--seed", "2"]);
    assert_eq!(v["recovered"], 1);
}

#[test]
fn table_is_default_for_run() {
    let text = stdout(&qss(&["run", "--trials", "10"]));
    assert!(text.contains("NoCheat"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}
