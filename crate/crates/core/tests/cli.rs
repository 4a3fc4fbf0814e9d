use std::process::Command;

use ricci_soliton::cli::{run_with_io, LogLevel};
use serde_json::Value;

fn soliton(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(args)
        .env_remove("SOLITON_LOG")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[&str], log: LogLevel) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("soliton").chain(args.iter().copied());
    let code = run_with_io(argv, &mut out, &mut err, log);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn schema_for(definition: &str) -> jsonschema::JSONSchema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/schemas/soliton-output.schema.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    doc["$ref"] = Value::String(format!("#/definitions/{definition}"));
    jsonschema::JSONSchema::compile(&doc).expect("schema compiles")
}

fn assert_valid(definition: &str, text: &str) -> Value {
    let v: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"));
    let schema = schema_for(definition);
    if let Err(errors) = schema.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{definition}: {msgs:?}");
    }
    v
}

#[test]
fn classify_example() {
    let (code, out, err) =
        soliton(&["classify", "--lambda", "0", "--mu", "-1", "--a0", "1", "--t0", "0", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v = assert_valid("classify", &out);
    assert_eq!(v["family"], "G1_CIGAR");
    assert!(err.is_empty());
}

#[test]
#[allow(clippy::approx_constant)] // the literal value a user types
fn catalog_example_has_cone_angle_pi() {
    let (code, out, _) = soliton(&["catalog", "--family", "g6", "--nu", "3.14159", "--format", "json"]);
    assert_eq!(code, 0);
    let v = assert_valid("catalog", &out);
    assert_eq!(v["family"], "G6");
    let angle = v["report"]["outer_end"]["angle"].as_f64().unwrap();
    assert_eq!(v["report"]["outer_end"]["kind"], "CONE_END");
    assert!((angle - 3.14159).abs() < 1e-4, "{angle}");
}

#[test]
fn missing_a0_exits_with_usage() {
    let (code, out, err) = soliton(&["integrate", "--lambda", "0", "--mu", "1"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("--a0"), "{err}");
}

#[test]
fn numerical_failure_exits_2() {
    let (code, out, err) = soliton(&["integrate", "--lambda", "1", "--mu", "1", "--a0", "3", "--tol", "1e-300"]);
    assert_eq!(code, 2, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("integrate_profile"), "{err}");
}

#[test]
fn malformed_input_never_panics() {
    let cases: &[&[&str]] = &[
        &[],
        &["bogus"],
        &["integrate", "--lambda"],
        &["integrate", "--lambda", "1e999", "--mu", "1", "--a0", "1"],
        &["integrate", "--lambda", "0", "--mu", "1", "--a0", "-1"],
        &["integrate", "--lambda", "0", "--mu", "1", "--a0", "1", "--samples", "0"],
        &["integrate", "--lambda", "0", "--mu", "1", "--a0", "1", "--window", "2,1"],
        &["metric", "--lambda", "0", "--mu", "-1", "--a0", "1"],
        &["metric", "--family", "g1", "--lambda", "0"],
        &["catalog", "--family", "g6", "--nu", "7"],
        &["catalog", "--family", "g1", "--nu", "-1"],
        &["energy", "--family", "g1", "--window", "5,6"],
        &["verify", "--config", "/nonexistent/soliton.cfg", "--family", "g1"],
    ];
    for args in cases {
        let (code, out, err) = in_process(args, LogLevel::Quiet);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = soliton(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["integrate", "classify", "metric", "report", "verify", "energy", "catalog"] {
        assert!(out.contains(sub), "{sub}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["report", "--family", "g7", "--nu", "9.42", "--format", "json"];
    assert_eq!(soliton(&args), soliton(&args));
}

#[test]
fn every_json_output_matches_its_schema() {
    let cases: &[(&str, &[&str])] = &[
        ("integrate", &["integrate", "--lambda", "1", "--mu", "1", "--a0", "3"]),
        ("integrate", &["integrate", "--lambda", "0", "--mu", "1", "--a0", "1", "--samples", "7"]),
        ("classify", &["classify", "--lambda", "-2", "--mu", "1", "--a0", "1"]),
        ("metric", &["metric", "--family", "g2", "--nu", "1", "--samples", "11"]),
        ("metric", &["metric", "--lambda", "0", "--mu", "-1", "--a0", "1", "--r-range", "0,2"]),
        ("report", &["report", "--family", "g3", "--nu", "1"]),
        ("report", &["report", "--lambda", "-1", "--mu", "-1", "--a0", "3", "--t0", "0.5"]),
        ("verify", &["verify", "--family", "g8", "--nu", "3.14159"]),
        ("energy", &["energy", "--family", "g1", "--nu", "1"]),
        ("catalog", &["catalog", "--family", "g4+"]),
    ];
    for (def, args) in cases {
        let mut argv = args.to_vec();
        argv.extend(["--format", "json"]);
        let (code, out, err) = in_process(&argv, LogLevel::Quiet);
        assert_eq!(code, 0, "{argv:?}: {err}");
        assert_valid(def, &out);
    }
}

#[test]
fn csv_headers() {
    let cases: &[(&str, &[&str])] = &[
        ("t,a,dadt", &["integrate", "--lambda", "0", "--mu", "1", "--a0", "1"]),
        ("r,b,db_dr,K", &["metric", "--family", "g1", "--nu", "1", "--samples", "5"]),
        ("family", &["classify", "--lambda", "0", "--mu", "-1", "--a0", "1"]),
        ("r,tracefree,laplace,potential,killing", &["verify", "--family", "g1"]),
        ("key,value", &["report", "--family", "g1"]),
    ];
    for (header, args) in cases {
        let (code, out, err) = in_process(args, LogLevel::Quiet);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_eq!(out.lines().next(), Some(*header), "{args:?}");
    }
}

#[test]
fn csv_values_round_trip_at_17_digits() {
    let (_, out, _) = in_process(&["metric", "--family", "g1", "--nu", "1", "--samples", "3"], LogLevel::Quiet);
    let row: Vec<&str> = out.lines().nth(2).unwrap().split(',').collect();
    let b: f64 = row[1].parse().unwrap();
    let db: f64 = row[2].parse().unwrap();
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
    // g1(1) is a shift of b = tanh r, so b' = 1 - b^2
    assert!((db - (1.0 - b * b)).abs() < 1e-9, "{b} {db}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# cigar, but flags turn it into the exploding soliton\nlambda = 0\nmu = -1\na0 = 1\nformat = json\n")
        .unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, _) = in_process(&["classify", "--config", cfg], LogLevel::Quiet);
    assert_eq!(code, 0);
    assert_eq!(assert_valid("classify", &out)["family"], "G1_CIGAR");
    let (code, out, _) = in_process(&["classify", "--config", cfg, "--mu", "1"], LogLevel::Quiet);
    assert_eq!(code, 0);
    assert_eq!(assert_valid("classify", &out)["family"], "G2_EXPLODING");

    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    let (code, _, err) = in_process(&["classify", "--config", bad.to_str().unwrap()], LogLevel::Quiet);
    assert_eq!(code, 1);
    assert!(err.contains("colour"));
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metric.csv");
    let (code, out, _) = in_process(
        &["metric", "--family", "g1", "--samples", "4", "--out", path.to_str().unwrap()],
        LogLevel::Quiet,
    );
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn logging_stays_on_stderr() {
    let args = ["classify", "--lambda", "0", "--mu", "-1", "--a0", "1"];
    let (_, quiet_out, quiet_err) = in_process(&args, LogLevel::Quiet);
    let (_, debug_out, debug_err) = in_process(&args, LogLevel::Debug);
    assert_eq!(quiet_out, debug_out);
    assert!(quiet_err.is_empty());
    assert!(debug_err.contains("[debug]") && debug_err.contains("[info]"));

    let out = Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(args)
        .env("SOLITON_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), quiet_out);
    assert!(String::from_utf8(out.stderr).unwrap().contains("[info] classify"));
}
