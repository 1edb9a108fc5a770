use std::io::Write;
use std::path::PathBuf;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("sdefi").chain(args.iter().copied());
    let code = sdefi::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--output", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn analyze_two_body() {
    let f = data("two_body.json");
    let (code, text, _) = run(&["analyze", &f, "--kbound", "10"]);
    assert_eq!(code, 0);
    assert!(text.contains("weak PASS M: r^2*w"), "{text}");
    assert!(text.contains("weak FAIL E"), "{text}");
    assert!(text.contains("residual generator = 1/2*r^2 + 1/2"), "{text}");

    let v = json(&["analyze", &f, "--kbound", "10"]);
    assert!(v["resonance_error"].as_str().unwrap().contains("not defined at the origin"));
    let weak = v["searches"].as_array().unwrap().iter().find(|s| s["mode"] == "weak").unwrap();
    assert_eq!(weak["result"]["basis"], serde_json::json!(["r^2*w"]));
}

#[test]
fn resonance_lotka_volterra() {
    let v = json(&["resonance", &data("lv3.json"), "--kbound", "10"]);
    let verdict = v["verdicts"].as_array().unwrap().iter().find(|x| x["kind"] == "NO_WEAK_ANALYTIC").expect("verdict");
    assert_eq!(verdict["epistemic_status"]["status"], "certified");
    assert!(verdict["epistemic_status"]["reason"].as_str().unwrap().contains("half-plane"));
    for x in v["verdicts"].as_array().unwrap() {
        assert!(x["theorem"].is_string() && x["hypotheses_checked"].is_array() && x["epistemic_status"].is_object());
    }
    let z = json(&["resonance", &data("lv3.json"), "--lattice", "z"]);
    assert_eq!(z["integer_lattices"].as_array().unwrap().len(), 2);
}

#[test]
fn search_gbm() {
    let v = json(&["search", &data("gbm.json"), "--mode", "weak", "--dmin", "-1", "--dmax", "1"]);
    assert_eq!(v["basis"], serde_json::json!(["x^-1"]));
    let v = json(&["search", &data("gbm.json"), "--mode", "strong", "--dmin", "-1", "--dmax", "1"]);
    assert_eq!(v["basis"], serde_json::json!([]));
}

#[test]
fn check_commands() {
    let f = data("two_body.json");
    let v = json(&["check-strong", &f, "--candidate", "r^2*w"]);
    assert_eq!(v["checks"][0]["holds"], false);
    assert_eq!(v["checks"][0]["residuals"][0]["poly"], "r");
    let v = json(&["check-weak", &f]);
    let names: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| (c["name"].as_str().unwrap().to_string(), c["holds"].as_bool().unwrap())).collect();
    assert_eq!(names, vec![("E".to_string(), false), ("M".to_string(), true)]);

    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"[{{"c": ["1/1", "0/1"], "e": [2, 0, 0, 1]}}]"#).unwrap();
    let v = json(&["check-weak", &f, "--candidate", file.path().to_str().unwrap()]);
    assert_eq!(v["checks"][0]["holds"], true);
}

#[test]
fn perturb_oscillator() {
    let v = json(&["perturb", &data("oscillator.json"), "--u", "0.37", "--lbound", "8", "--degree", "4"]);
    assert_eq!(v["plan"]["exponents"], serde_json::json!([1, 2]));
    assert_eq!(v["verification"]["pass"], true);
    assert_eq!(v["system"]["noise_dim"], 1);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", &data("martingale.json"), "--seed", "3", "--paths", "400", "--step", "0.01"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a, b);
    assert_eq!(a["checks"][0]["report"]["mode"], "weak");
    assert_eq!(a["checks"][0]["report"]["pass"], true);
    assert_eq!(a["config"]["seed"], 3);
}

#[test]
fn analyze_with_simulation() {
    let v = json(&["analyze", &data("gbm.json"), "--dmin", "-1", "--dmax", "1", "--simulate", "--seed", "1", "--paths", "500", "--step", "0.01"]);
    let sim = v["simulation"]["checks"].as_array().unwrap();
    assert_eq!(sim.len(), 2);
    assert_eq!(sim[0]["name"], "inverse");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["simulate", &data("gbm.json")]).0, 2, "missing --seed");
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["search", &data("gbm.json"), "--bogus"]).0, 2);
    assert_eq!(run(&["search", "/nonexistent.json"]).0, 2);
    assert_eq!(run(&["search", &data("gbm.json"), "--dmin", "3", "--dmax", "1"]).0, 2);
    // an equilibrium with a singular Jacobian cannot be perturbed
    assert_eq!(run(&["perturb", &data("martingale.json")]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, r#"{{"dim": 1, "drift": [[{{"c": "0.5", "e": [1]}}]]}}"#).unwrap();
    let (code, _, err) = run(&["search", bad.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("1/2"), "{err}");
}

#[test]
fn data_files_round_trip() {
    for entry in std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")).unwrap() {
        let path = entry.unwrap().path();
        let loaded = sdefi::cli::parse_system(&path).unwrap();
        let text = sdefi::cli::serialize_system(&loaded);
        assert_eq!(sdefi::cli::serialize_system(&sdefi::cli::parse_system_str(&text).unwrap()), text, "{}", path.display());
    }
}
