use kkgreen::scenario::{emit_reports, parse_scenario, run, OutputFormat};
use kkgreen::Error;
use serde_json::{json, Value};
use std::path::Path;
use std::process::Command;

fn base() -> Value {
    json!({
        "schema": "kkgreen/scenario@1",
        "name": "host-quick",
        "units": "natural",
        "model": {
            "oscillators": [{ "name": "host", "omega_T": 1.0, "omega_p": 0.3, "gamma": 0.1, "sign": 1 }],
            "background": ["host"],
            "mollify_m": 0.5
        },
        "domain": { "edge_m": 1.0, "resolution": 4 },
        "frequencies": { "omega_min": 0.5, "omega_max": 2.0, "nodes": 2 },
        "pairs": [{ "r_m": [0.3, 0.25, -0.2], "r_prime_m": [-0.3, -0.2, 0.25] }],
        "checks": ["kk", "analyticity", "sumrule", "noise", "unequal_time"]
    })
}

fn errors_of(doc: &Value) -> Vec<String> {
    match parse_scenario(&doc.to_string()) {
        Err(Error::Validation(errs)) => errs,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn quick_scenario_passes() {
    let loaded = parse_scenario(&base().to_string()).unwrap();
    assert!(loaded.warnings.is_empty());
    let outcome = run(&loaded);
    for r in &outcome.reports {
        assert!(r.passed, "{} failed: {:?} {:?}", r.check, r.error, r.metrics);
    }
    assert_eq!(outcome.reports.len(), 5);
}

#[test]
fn vacuum_preset_solves_exactly() {
    let mut doc = base();
    doc["model"] = json!("vacuum");
    doc["checks"] = json!(["solve"]);
    let outcome = run(&parse_scenario(&doc.to_string()).unwrap());
    let r = &outcome.reports[0];
    assert!(r.passed, "{:?} {:?}", r.error, r.metrics);
}

#[test]
fn resolution_above_the_caps_is_rejected() {
    let mut doc = base();
    doc["domain"]["resolution"] = json!(64);
    let errs = errors_of(&doc);
    assert!(errs.iter().any(|e| e.contains("64") && e.contains("20")), "{errs:?}");
}

#[test]
fn unknown_check_lists_the_valid_ones() {
    let mut doc = base();
    doc["checks"] = json!(["kk", "telepathy"]);
    let errs = errors_of(&doc);
    assert!(errs.iter().any(|e| e.contains("telepathy") && e.contains("unequal_time")), "{errs:?}");
}

#[test]
fn close_pairs_and_sharp_interfaces_are_rejected() {
    let mut doc = base();
    doc["pairs"] = json!([{ "r_m": [0.0, 0.0, 0.0], "r_prime_m": [0.1, 0.0, 0.0] }]);
    doc["model"]["regions"] = json!([{ "shape": { "kind": "ball", "center_m": [0, 0, 0], "radius_m": 0.3 }, "oscillators": ["host"] }]);
    doc["model"]["background"] = json!([]);
    doc["model"]["mollify_m"] = json!(0.1);
    let errs = errors_of(&doc);
    assert!(errs.len() >= 2, "{errs:?}");
}

#[test]
fn unknown_fields_and_schema_versions_are_rejected() {
    let mut doc = base();
    doc["colour"] = json!("blue");
    assert!(matches!(parse_scenario(&doc.to_string()), Err(Error::Parse { .. })));
    let mut doc = base();
    doc["schema"] = json!("kkgreen/scenario@99");
    assert!(parse_scenario(&doc.to_string()).is_err());
    match parse_scenario("{\n  \"schema\": \"kkgreen/scenario@1\",\n  oops\n}") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn acausal_damping_warns_and_fails_analyticity() {
    let mut doc = base();
    doc["model"]["oscillators"][0]["gamma"] = json!(-0.1);
    doc["checks"] = json!(["analyticity"]);
    let loaded = parse_scenario(&doc.to_string()).unwrap();
    assert!(loaded.warnings.iter().any(|w| w.contains("causal")), "{:?}", loaded.warnings);
    let outcome = run(&loaded);
    assert!(!outcome.passed());
}

#[test]
fn reports_are_deterministic() {
    let text = base().to_string();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = emit_reports(&run(&parse_scenario(&text).unwrap()), a.path(), OutputFormat::Both).unwrap();
    let mb = emit_reports(&run(&parse_scenario(&text).unwrap()), b.path(), OutputFormat::Both).unwrap();
    assert_eq!(ma.digest, mb.digest);
    assert_eq!(ma.files, mb.files);
    for f in ma.files.iter().filter(|f| f.as_str() != "manifest.json") {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn format_flags_select_outputs() {
    let loaded = parse_scenario(&base().to_string()).unwrap();
    let outcome = run(&loaded);
    let dir = tempfile::tempdir().unwrap();
    let json_only = emit_reports(&outcome, &dir.path().join("j"), OutputFormat::Json).unwrap();
    assert!(json_only.files.iter().all(|f| f.ends_with(".json")));
    assert!(json_only.files.iter().any(|f| f == "sumrule.json"));
    let csv_only = emit_reports(&outcome, &dir.path().join("c"), OutputFormat::Csv).unwrap();
    assert!(csv_only.files.iter().any(|f| f.ends_with(".csv")));
    let csv = csv_only.files.iter().find(|f| f.starts_with("sumrule") && f.ends_with(".csv")).unwrap();
    let body = std::fs::read_to_string(dir.path().join("c").join(csv)).unwrap();
    assert_eq!(body.lines().next(), Some("cutoff,abs_residual"));
}

#[test]
fn unwritable_output_directory_is_an_error() {
    let loaded = parse_scenario(&base().to_string()).unwrap();
    let outcome = run(&loaded);
    let file = tempfile::NamedTempFile::new().unwrap();
    assert!(emit_reports(&outcome, &file.path().join("sub"), OutputFormat::Json).is_err());
}

#[test]
fn bundled_scenarios_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let loaded = kkgreen::scenario::load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(format!("{}.json", loaded.scenario.name), path.file_name().unwrap().to_string_lossy());
        count += 1;
    }
    assert_eq!(count, 4);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kkgreen"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, base().to_string()).unwrap();
    let mut bad = base();
    bad["model"]["oscillators"][0]["gamma"] = json!(-0.1);
    bad["name"] = json!("acausal");
    bad["checks"] = json!(["analyticity"]);
    let failing = dir.path().join("bad.json");
    std::fs::write(&failing, bad.to_string()).unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{").unwrap();

    let out = dir.path().join("out");
    let st = cli().args(["run", good.to_str().unwrap(), "--format", "json"]).env("KKGREEN_OUT", &out).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(out.join("host-quick/manifest.json").exists());
    assert!(String::from_utf8_lossy(&st.stdout).contains("sumrule"));

    let st = cli().args(["run", failing.to_str().unwrap(), "--out", out.to_str().unwrap(), "--units", "natural"]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));

    let st = cli().args(["validate", broken.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = cli().args(["validate", good.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let st = cli().args(["run", dir.path().join("missing.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let st = cli().arg("list-checks").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&st.stdout);
    for check in ["kk", "analyticity", "solve", "sumrule", "curl", "noise", "unequal_time"] {
        assert!(listing.contains(check));
    }
}
