use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_reachbound");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("REACHBOUND_WORKERS")
        .output()
        .expect("binary runs")
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&doc)
        .expect("schema compiles")
}

fn validated(name: &str, text: &str) -> Value {
    let doc: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    let s = schema(name);
    if let Err(errors) = s.validate(&doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} schema violations: {msgs:?}");
    }
    doc
}

fn ok_json(name: &str, args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    validated(name, &String::from_utf8(out.stdout).unwrap())
}

fn err_json(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    validated("error", String::from_utf8(out.stderr).unwrap().trim())
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("expected a number, got {v}"))
}

#[test]
fn bound_on_circle_point() {
    // f = x²+y²−1 at (1,0): Df = (2,0), Df† = (1/2,0)ᵀ, D²f = 2I,
    // so γ = ‖Df†‖·‖D²f‖/2 = 1/2 and 1/(5γ) = 0.4.
    let gamma = 0.5 * 2.0 / 2.0;
    // ‖f‖₁ = 3 and ‖(1,0,1)‖ scaling gives cond = 6 at this point.
    let cond: f64 = 6.0;
    let doc = ok_json("bound", &["bound", "--poly", "x0^2+x1^2-1", "--point", "1,0"]);
    let r = &doc["result"];
    assert!((num(&r["bound_gamma"]) - 1.0 / (5.0 * gamma)).abs() < 1e-12);
    assert!((num(&r["bound_cond_local"]) - 1.0 / cond).abs() < 1e-12);
    assert!(num(&r["best"]) <= 1.0);
    assert_eq!(doc["config"]["n"], 2);
    assert!(doc["seed"].is_u64());
}

#[test]
fn bound_global_and_table() {
    let doc = ok_json("bound", &["bound", "--poly", "x0^2+x1^2-1", "--global", "--R", "2"]);
    let b = num(&doc["result"]["bound_cond_global"]);
    assert!(b > 0.0 && b <= 1.0);

    let out = run(&["bound", "--poly", "x0^2+x1^2-1", "--point", "1,0", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for route in ["gamma", "kantorovich", "cond_local"] {
        assert!(text.lines().any(|l| l.starts_with(route)), "{text}");
    }
    let out = run(&["bound", "--poly", "x0^2+x1^2-1", "--point", "1,0", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("gamma,0.4"));
}

#[test]
fn bound_errors_map_to_exit_codes() {
    let e = err_json(&["bound", "--poly", "x0^2", "--point", "0"], 2);
    assert_eq!(e["error"], "NonSurjective");
    // Newton from a nearby point lands on the circle
    let doc = ok_json("bound", &["bound", "--poly", "x0^2+x1^2-1", "--point", "0.9,0.1"]);
    let p = doc["result"]["point"].as_array().unwrap();
    assert!((num(&p[0]).hypot(num(&p[1])) - 1.0).abs() < 1e-12);
    let e = err_json(&["bound", "--poly", "x0^2+x1^2+1", "--point", "0.3,0.2"], 2);
    assert_eq!(e["error"], "NotAZero");
    let e = err_json(&["bound", "--poly", "x0^^2", "--point", "0"], 3);
    assert_eq!(e["error"], "Syntax");
    err_json(&["bound", "--poly", "x0^2+x1^2-1", "--point", "1,0,0"], 3);
    err_json(&["bound", "--bogus"], 3);
}

#[test]
fn bound_reads_json_poly_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("circle.json");
    fs::write(
        &poly,
        r#"{"n":2,"q":1,"degrees":[2],"polys":[[{"exp":[2,0],"coef":1.0},{"exp":[0,2],"coef":1.0},{"exp":[0,0],"coef":-1.0}]]}"#,
    )
    .unwrap();
    let cfg = dir.path().join("bound.toml");
    fs::write(&cfg, format!("poly_file = {:?}\npoint = [0.0, 1.0]\n", poly.to_str().unwrap())).unwrap();
    let cfg = cfg.to_str().unwrap();

    let doc = ok_json("bound", &["bound", "--config", cfg]);
    assert_eq!(doc["result"]["point"], serde_json::json!([0.0, 1.0]));
    // flags win over the file
    let doc = ok_json("bound", &["bound", "--config", cfg, "--point", "-1,0"]);
    assert_eq!(doc["result"]["point"], serde_json::json!([-1.0, 0.0]));
    assert!((num(&doc["result"]["bound_gamma"]) - 0.4).abs() < 1e-12);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "poly = \"x0\"\npoints = [0.0]\n").unwrap();
    let e = err_json(&["bound", "--config", bad.to_str().unwrap()], 3);
    assert!(e["message"].as_str().unwrap().contains("points"));
}

#[test]
fn estimate_benchmarks() {
    let doc = ok_json(
        "estimate",
        &["estimate", "--poly", "x0^2+x1^2-1", "--samples", "500", "--seed", "7", "--R", "1.5"],
    );
    let e = num(&doc["result"]["estimate"]);
    assert!((e - 1.0).abs() <= 0.02, "{e}");
    assert_eq!(doc["result"]["sample_points"], 500);
    assert_eq!(doc["config"]["min_sep"], 1.5e-3);

    let doc = ok_json(
        "estimate",
        &["estimate", "--poly", "x1-x0^2", "--samples", "1000", "--seed", "7", "--R", "3"],
    );
    let e = num(&doc["result"]["estimate"]);
    assert!((e - 0.5).abs() <= 0.025, "{e}");
}

#[test]
fn estimate_policy_and_errors() {
    let e = err_json(
        &["estimate", "--poly", "x0^2+x1^2+1", "--samples", "10", "--seed", "1", "--max-probes", "200"],
        2,
    );
    assert_eq!(e["error"], "EmptySample");
    err_json(&["estimate", "--poly", "x0^2+x1^2-1", "--samples", "10"], 3);

    let doc = ok_json("estimate", &["estimate", "--poly", "x0^2+x1^2-1", "--samples", "50", "--auto-seed"]);
    let seed = doc["seed"].as_u64().unwrap();
    assert_eq!(doc["config"]["seed"].as_u64(), Some(seed));
    let again = ok_json(
        "estimate",
        &["estimate", "--poly", "x0^2+x1^2-1", "--samples", "50", "--seed", &seed.to_string()],
    );
    assert_eq!(again["result"], doc["result"]);
}

#[test]
fn estimate_exports_samples_and_local() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    let doc = ok_json(
        "estimate",
        &[
            "estimate", "--poly", "x1-x0^2", "--samples", "400", "--seed", "3", "--R", "5", "--center", "2,4",
            "--ball", "1", "--export-samples", csv.to_str().unwrap(),
        ],
    );
    let local = &doc["result"]["local"];
    assert!(num(&local["estimate"]) > 0.5 && num(&local["estimate"]) <= 1.0);
    assert!(doc["result"]["global"].is_null());
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x0,x1,residual"));
    assert_eq!(lines.count(), 400);
}

#[test]
fn identical_reports_across_reruns_and_workers() {
    let args = ["estimate", "--poly", "x0^2+x1^2+x2^2-1", "--samples", "200", "--seed", "11", "--R", "1.5"];
    let with = |w: &str| {
        let out = Command::new(BIN).args(args).args(["--workers", w]).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(with("1"), with("1"));
    let a: Value = serde_json::from_slice(&with("1")).unwrap();
    let b: Value = serde_json::from_slice(&with("3")).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(b["config"]["workers"], 3);

    let out = Command::new(BIN)
        .args(args)
        .env("REACHBOUND_WORKERS", "2")
        .output()
        .unwrap();
    let c: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["config"]["workers"], 2);
    assert_eq!(c["result"], a["result"]);
}

fn bundled(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn mc_tail_underpowered_run_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = run(&["mc-tail", &bundled("thm23_n1.toml"), "--trials", "100", "--out-dir", out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("skipped (underpowered)"), "{text}");
    assert!(!text.contains("FAIL"));

    let doc = validated("mc_tail", &fs::read_to_string(dir.path().join("tail.json")).unwrap());
    assert_eq!(doc["result"]["underpowered"], true);
    assert_eq!(doc["result"]["trials"], 100);
    assert_eq!(doc["config"]["experiment"]["trials"], 100);
    let csv = fs::read_to_string(dir.path().join("tail.csv")).unwrap();
    assert!(csv.starts_with("t,empirical,wilson_lo,wilson_hi,theoretical,undecided"));
    assert_eq!(csv.lines().count(), 1 + doc["result"]["points"].as_array().unwrap().len());
}

#[test]
fn mc_tail_counts_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let counts = |w: &str| {
        let out = run(&[
            "mc-tail", &bundled("thm22_n1.toml"), "--trials", "60", "--seed", "5", "--workers", w, "--format", "json",
            "--out-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["result"].clone()
    };
    assert_eq!(counts("1"), counts("4"));
}

#[test]
fn mc_tail_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let base = "statistic = \"log_inv_reach_R\"\nt_grid = [4]\nseed = 1\n[geometry]\nn = 1\ndegrees = [2]\nR = 1.0\n";

    let p = write("a.toml", &format!("{base}[model]\nkind = \"uniform_continuous\"\n"));
    let e = err_json(&["mc-tail", &p], 3);
    assert!(e["message"].as_str().unwrap().contains("trials"));

    let p = write("b.toml", &format!("trials = 5\n{base}[model]\nkind = \"bit_uniform\"\ntua = 3\n"));
    let e = err_json(&["mc-tail", &p], 3);
    assert!(e["message"].as_str().unwrap().contains("tua"));

    let p = write("c.json", r#"{"model":{"kind":"uniform_continuous"},"geometry":{"n":1,"degrees":[2],"R":1.0},"statistic":"log_inv_reach_R","t_grid":[4],"trials":5}"#);
    let e = err_json(&["mc-tail", &p, "--out-dir", dir.path().to_str().unwrap()], 3);
    assert!(e["message"].as_str().unwrap().contains("--seed"));
}

#[test]
fn worstcase_values() {
    let out = run(&["worstcase", "--n", "1", "--q", "1", "--D", "2", "--tau", "1", "--R", "1", "--format", "table"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "12291");
    // 4·1·(2·1)^{1+1+2}·(5+0+0+0) + 0 + 0
    let want = 4 * 2u64.pow(4) * 5;
    let doc = ok_json("worstcase", &["worstcase", "--n", "1", "--q", "1", "--D", "1", "--tau", "0"]);
    assert_eq!(doc["result"]["integer_part"], want.to_string());
    assert_eq!(doc["config"]["D"], 1);

    // one more bit adds 4n(2D)^{1+q+2n} + 1
    let at = |tau: &str| {
        let d = ok_json("worstcase", &["worstcase", "--n", "2", "--q", "1", "--D", "3", "--tau", tau]);
        d["result"]["integer_part"].as_str().unwrap().parse::<u128>().unwrap()
    };
    assert_eq!(at("8") - at("7"), 4 * 2 * 6u128.pow(6) + 1);
    err_json(&["worstcase", "--n", "0", "--q", "1", "--D", "2", "--tau", "1"], 3);
}
