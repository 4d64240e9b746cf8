use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: tempfile::tempdir().unwrap(),
        };
        ws.write("sq.json", r#"{"num":[0,0,1],"den":[1]}"#);
        ws.write("basilica.json", r#"{"num":[-1,0,1],"den":[1]}"#);
        ws.write("cheb.json", r#"{"num":[-2,0,1],"den":[1]}"#);
        ws.write("c1.json", r#"{"num":["1","0","1"],"den":["1"]}"#);
        ws.write(
            "diag.json",
            r#"{"n":2,"multidegree":[1,1],"terms":[{"exps":[1,0],"coeff":"1"},{"exps":[0,1],"coeff":"-1"}]}"#,
        );
        ws.write(
            "plane.json",
            r#"{"n":3,"multidegree":[1,1,1],"terms":[{"exps":[1,0,0],"coeff":"1"},{"exps":[0,1,0],"coeff":"1"},{"exps":[0,0,1],"coeff":"-1"}]}"#,
        );
        ws
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_dynamo"))
            .args(args)
            .current_dir(self.dir.path())
            .env_remove("DYNAMO_THREADS")
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(
        o.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Data rows of a CSV output: header comments and the column line removed.
fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn height_of_two_under_squaring_is_log_two() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "height", "--map", "sq.json", "--point", "2", "--err", "1e-9", "--json",
    ]);
    let v = json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    let radius = v["result"]["error_radius"].as_f64().unwrap();
    assert!((value - 2f64.ln()).abs() <= 1e-9);
    assert!(radius <= 1e-9);
    assert!(v["result"]["iterations"].is_u64());
}

#[test]
fn height_matches_escape_oracle_for_non_power_map() {
    // 3/2 under z^2 + 1 has no cancellation: numerators grow like their own squares
    let ws = Workspace::new();
    let v = json(&ws.run(&[
        "height", "--map", "c1.json", "--point", "3/2", "--err", "1e-6", "--json",
    ]));
    let value = v["result"]["value"].as_f64().unwrap();
    // ln(max) of the 6th iterate, divided by 2^6, is within 1e-3 of the limit here
    let mut p: u128 = 3;
    let mut q: u128 = 2;
    let mut h = 0.0;
    for k in 1..=6 {
        let (np, nq) = (p * p + q * q, q * q);
        p = np;
        q = nq;
        h = (p.max(q) as f64).ln() / 2f64.powi(k);
    }
    assert!((value - h).abs() < 1e-3, "{value} vs {h}");
}

#[test]
fn preper_reports_tail_and_period() {
    let ws = Workspace::new();
    let v = json(&ws.run(&["preper", "--map", "basilica.json", "--point", "1", "--json"]));
    assert_eq!(
        v["result"],
        serde_json::json!({"status": "preperiodic", "tail": 1, "period": 2})
    );

    let v = json(&ws.run(&["preper", "--map", "basilica.json", "--point", "2", "--json"]));
    assert_eq!(v["result"]["status"], "not_preperiodic");
    assert!(v["result"]["lower_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn negative_points_parse() {
    let ws = Workspace::new();
    let v = json(&ws.run(&["preper", "--map", "cheb.json", "--point", "-1", "--json"]));
    assert_eq!(v["result"]["status"], "preperiodic");
}

#[test]
fn orbit_csv_lists_exact_iterates() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "orbit",
        "--map",
        "c1.json",
        "--point",
        "1/2",
        "--max-iter",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let points: Vec<&str> = rows.iter().take(4).map(|r| r[1].as_str()).collect();
    assert_eq!(points, ["1/2", "5/4", "41/16", "1937/256"]);
    assert_eq!(rows.last().unwrap()[0], "outcome");
}

#[test]
fn periodic_rows_satisfy_the_cycle_equation() {
    let ws = Workspace::new();
    let out = ws.run(&["periodic", "--map", "basilica.json", "--period", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert!(!rows.is_empty());
    for r in rows.iter().filter(|r| r[1] != "inf") {
        let (re, im): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        let z = (re, im);
        let mut w = z;
        for _ in 0..3 {
            w = (w.0 * w.0 - w.1 * w.1 - 1.0, 2.0 * w.0 * w.1);
        }
        assert!(
            ((w.0 - z.0).powi(2) + (w.1 - z.1).powi(2)).sqrt() < 1e-8,
            "{r:?}"
        );
    }
}

#[test]
fn repelling_only_drops_attracting_cycles() {
    let ws = Workspace::new();
    let all = csv_rows(&ws.run(&["periodic", "--map", "basilica.json", "--period", "2"]));
    let rep = csv_rows(&ws.run(&[
        "periodic",
        "--map",
        "basilica.json",
        "--period",
        "2",
        "--repelling-only",
    ]));
    assert!(rep.len() < all.len());
    for r in &rep {
        assert!(r[5].parse::<f64>().unwrap() > 1.0);
    }
}

#[test]
fn classify_recognizes_exceptional_maps() {
    let ws = Workspace::new();
    let v = json(&ws.run(&["classify", "--map", "sq.json", "--json"]));
    assert_eq!(v["result"]["verdict"], "PowerConjugate");
    let v = json(&ws.run(&["classify", "--map", "cheb.json", "--json"]));
    assert_eq!(v["result"]["verdict"], "ChebyshevConjugate");
    let v = json(&ws.run(&["classify", "--map", "c1.json", "--json"]));
    assert_eq!(v["result"]["verdict"], "NonExceptional");
    assert_eq!(v["result"]["pcf"], false);
}

#[test]
fn sphere_chart_points_lie_on_the_unit_sphere() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "sample-measure",
        "--map",
        "basilica.json",
        "--n",
        "50",
        "--depth",
        "20",
        "--chart",
        "sphere",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 50);
    for r in rows {
        let n: f64 = r.iter().map(|x| x.parse::<f64>().unwrap().powi(2)).sum();
        assert!((n - 1.0).abs() < 1e-9);
    }
}

#[test]
fn squaring_samples_lie_on_the_unit_circle() {
    let ws = Workspace::new();
    let out = ws.run(&["sample-measure", "--map", "sq.json", "--n", "100"]);
    for r in csv_rows(&out) {
        let (re, im): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((re.hypot(im) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn identical_arguments_give_identical_bytes() {
    let ws = Workspace::new();
    let args = [
        "sample-measure",
        "--map",
        "basilica.json",
        "--n",
        "200",
        "--seed",
        "11",
    ];
    let a = ws.run(&args);
    let b = ws.run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = ws.run(&[
        "sample-measure",
        "--map",
        "basilica.json",
        "--n",
        "200",
        "--seed",
        "12",
    ]);
    assert_ne!(a.stdout, c.stdout);

    let args = [
        "mm-verify",
        "--hyp",
        "plane.json",
        "--maps",
        "sq.json",
        "sq.json",
        "sq.json",
        "--samples",
        "300",
    ];
    assert_eq!(ws.run(&args).stdout, ws.run(&args).stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let ws = Workspace::new();
    let args = ["sample-measure", "--map", "basilica.json", "--n", "300"];
    let one = Command::new(env!("CARGO_BIN_EXE_dynamo"))
        .args(args)
        .current_dir(ws.dir.path())
        .env("DYNAMO_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, ws.run(&args).stdout);
}

#[test]
fn every_output_embeds_config_and_version() {
    let ws = Workspace::new();
    let out = ws.run(&["height", "--map", "sq.json", "--point", "3", "--seed", "99"]);
    let text = stdout(&out);
    assert!(text.starts_with(&format!("# dynamo {}\n", env!("CARGO_PKG_VERSION"))));
    let config_line = text.lines().find(|l| l.starts_with("# config: ")).unwrap();
    let config: Value = serde_json::from_str(config_line.trim_start_matches("# config: ")).unwrap();
    assert_eq!(config["seed"], 99);
    assert_eq!(config["output"], "csv");

    let v = json(&ws.run(&["height", "--map", "sq.json", "--point", "3", "--json"]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["output"], "json");
    assert_eq!(v["config"]["caps"]["coefficient_digits"], 1_000_000);
}

#[test]
fn curve_orbit_of_the_diagonal_is_fixed() {
    let ws = Workspace::new();
    let v = json(&ws.run(&[
        "curve-orbit",
        "--curve",
        "diag.json",
        "--map",
        "sq.json",
        "sq.json",
        "--json",
    ]));
    assert_eq!(v["result"]["outcome"]["status"], "preperiodic");
    assert_eq!(v["result"]["outcome"]["tail"], 0);
    assert_eq!(v["result"]["outcome"]["period"], 1);
}

#[test]
fn ms_check_certifies_the_diagonal_and_explains_the_plane() {
    let ws = Workspace::new();
    let v = json(&ws.run(&[
        "ms-check",
        "--hyp",
        "diag.json",
        "--map",
        "sq.json",
        "sq.json",
        "--json",
    ]));
    assert!(v["result"]["certificate"].is_object());

    let v = json(&ws.run(&[
        "ms-check",
        "--hyp",
        "plane.json",
        "--map",
        "sq.json",
        "sq.json",
        "sq.json",
        "--json",
    ]));
    assert!(v["result"]["certificate"].is_null());
    assert_eq!(v["result"]["reason"], "depends on 3 blocks");
}

#[test]
fn mm_verify_separates_diagonal_from_plane() {
    let ws = Workspace::new();
    let v = json(&ws.run(&[
        "mm-verify",
        "--hyp",
        "diag.json",
        "--maps",
        "sq.json",
        "sq.json",
        "--samples",
        "1000",
        "--json",
    ]));
    assert!(v["result"]["failed_conditions"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(v["result"]["verdict"]
        .as_str()
        .unwrap()
        .starts_with("preperiodic"));

    let v = json(&ws.run(&[
        "mm-verify",
        "--hyp",
        "plane.json",
        "--maps",
        "sq.json",
        "sq.json",
        "sq.json",
        "--samples",
        "1000",
        "--json",
    ]));
    assert!(!v["result"]["failed_conditions"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(v["result"]["verdict"]
        .as_str()
        .unwrap()
        .starts_with("not preperiodic"));
}

#[test]
fn compare_measures_is_symmetric() {
    let ws = Workspace::new();
    let base = [
        "compare-measures",
        "--hyp",
        "plane.json",
        "--map",
        "sq.json",
        "sq.json",
        "sq.json",
    ];
    let run = |i: &str, j: &str| {
        let mut args = base.to_vec();
        args.extend(["--i", i, "--j", j, "--samples", "500", "--json"]);
        json(&ws.run(&args))["result"]["statistic"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(run("0", "2"), run("2", "0"));
}

#[test]
fn self_test_passes() {
    let ws = Workspace::new();
    let out = ws.run(&["self-test"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r[1], r[2], "{r:?}");
    }
}

#[test]
fn user_errors_exit_with_one() {
    let ws = Workspace::new();
    let cases: [&[&str]; 7] = [
        &["height", "--map", "missing.json", "--point", "2"],
        &["height", "--map", "sq.json", "--point", "two"],
        &["height", "--map", "sq.json", "--point", "2", "--err", "-1"],
        &["frobnicate"],
        &["periodic", "--map", "sq.json"],
        &[
            "mm-verify",
            "--hyp",
            "plane.json",
            "--maps",
            "sq.json",
            "sq.json",
        ],
        &["curve-orbit", "--curve", "diag.json", "--map", "sq.json"],
    ];
    for args in cases {
        let out = ws.run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn malformed_map_files_are_user_errors() {
    let ws = Workspace::new();
    ws.write("bad.json", r#"{"num": [1, 2"#);
    ws.write("zero.json", r#"{"num":[0],"den":[0]}"#);
    for name in ["bad.json", "zero.json"] {
        let out = ws.run(&["classify", "--map", name]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(name));
    }
}

#[test]
fn computation_errors_exit_with_two() {
    let ws = Workspace::new();
    // a digit cap this small is hit on the first exact step
    let out = ws.run(&[
        "height",
        "--map",
        "c1.json",
        "--point",
        "123456789/7",
        "--max-digits",
        "5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bad_thread_count_is_a_user_error() {
    let ws = Workspace::new();
    let out = Command::new(env!("CARGO_BIN_EXE_dynamo"))
        .args(["self-test"])
        .current_dir(ws.dir.path())
        .env("DYNAMO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let ws = Workspace::new();
    let out = ws.run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mm-verify"));
}
