use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use foliaquant::checks::exit_code;
use foliaquant::cli::{main_with, EXIT_MODEL, EXIT_USAGE};
use foliaquant_core::report::CheckResult;
use foliaquant_core::Error;
use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(format!("{name}.toml"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{name}.toml"))
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foliaquant")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_model(src: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(src.as_bytes()).unwrap();
    f
}

fn status_of<'a>(report: &'a Value, name: &str) -> &'a str {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
}

#[test]
fn bundled_models_pass() {
    for m in ["darboux3", "scaled", "darboux5"] {
        let out = bin(&["all", model(m).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{m}: {}", String::from_utf8_lossy(&out.stdout));
        let r = json(&out);
        assert_eq!(r["summary"]["fail"], 0);
        assert_eq!(r["exit_code"], 0);
    }
}

#[test]
fn report_shape() {
    let out = bin(&["check-prequant", model("darboux3").to_str().unwrap()]);
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["tool"], "foliaquant");
    assert_eq!(r["command"], "check-prequant");
    assert_eq!(r["model"], "darboux3");
    assert_eq!(r["derived"]["bivector"], "(-1)*Dq^Dp");
    assert!(r.get("wall_time_ms").is_none());
    let checks = r["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for c in checks {
        assert!(!c["anchor"].as_str().unwrap().is_empty(), "{}", c["name"]);
        assert!(c["samples"].is_u64());
    }
    let total: u64 = ["pass", "fail", "inconclusive", "skipped"]
        .iter()
        .map(|k| r["summary"][k].as_u64().unwrap())
        .sum();
    assert_eq!(total as usize, checks.len());
}

#[test]
fn timings_are_opt_in() {
    let out = bin(&["check-structure", model("darboux3").to_str().unwrap(), "--timings"]);
    assert!(json(&out)["wall_time_ms"].is_u64());
}

#[test]
fn flags_override_model_options() {
    let out = bin(&[
        "check-structure",
        model("darboux3").to_str().unwrap(),
        "--seed",
        "9",
        "--samples",
        "5",
        "--max-degree",
        "2",
    ]);
    let r = json(&out);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["options"]["samples"], 5);
    assert_eq!(r["options"]["max_degree"], 2);
}

#[test]
fn model_options_apply_without_flags() {
    let src = std::fs::read_to_string(model("darboux3")).unwrap();
    let f = temp_model(&format!("{src}\n[options]\nseed = 77\nsamples = 4\n"));
    let r = json(&bin(&["check-structure", f.path().to_str().unwrap()]));
    assert_eq!(r["seed"], 77);
    assert_eq!(r["options"]["samples"], 4);
}

#[test]
fn reports_depend_only_on_the_seed() {
    let path = model("scaled");
    let run = |seed: &str| bin(&["all", path.to_str().unwrap(), "--seed", seed]).stdout;
    assert_eq!(run("3"), run("3"));
    let (a, b) = (run("3"), run("4"));
    assert_ne!(a, b);
}

#[test]
fn text_format() {
    let out = bin(&["check-polarization", model("darboux3").to_str().unwrap(), "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("foliaquant check-polarization on darboux3"));
    assert!(text.lines().any(|l| l.starts_with("pass") && l.contains("polarization.isotropic")));
    assert!(text.contains("0 failed"));
}

#[test]
fn negative_controls_exit_one() {
    for (f, cmd, check) in [
        ("isotropy_failure", "check-polarization", "polarization.isotropic"),
        ("transverse_bivector", "check-structure", "structure.subordinate"),
        ("transverse_bivector", "check-structure", "structure.schouten_square"),
        ("flat_connection", "check-prequant", "prequant.condition"),
        ("flat_connection", "check-prequant", "prequant.chern_form"),
    ] {
        let out = bin(&[cmd, fixture(f).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{f}");
        assert_eq!(status_of(&json(&out), check), "fail", "{f}: {check}");
    }
}

#[test]
fn p_squared_is_rejected_but_pairs_still_commute() {
    let out = bin(&["all", fixture("p_squared").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(status_of(&r, "polarization.algebra.p2"), "fail");
    assert_eq!(status_of(&r, "dirac.invariance.p2"), "fail");
    assert_eq!(status_of(&r, "dirac.invariance.q"), "pass");
    assert_eq!(status_of(&r, "dirac.pairs"), "pass");
    let pairs = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "dirac.pairs").unwrap();
    assert!(pairs["note"].as_str().unwrap().contains("p2"));
}

#[test]
fn usage_errors() {
    assert_eq!(bin(&["all", "--bogus", "x"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(bin(&["all"]).status.code(), Some(EXIT_USAGE));
    let bad_format = bin(&["all", model("darboux3").to_str().unwrap(), "--format", "xml"]);
    assert_eq!(bad_format.status.code(), Some(EXIT_USAGE));
    let help = bin(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify-dirac"));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn model_errors() {
    let missing = bin(&["all", "/nonexistent/model.toml"]);
    assert_eq!(missing.status.code(), Some(EXIT_MODEL));
    assert!(missing.stdout.is_empty());

    let f = temp_model("name = \"x\"\n[chart]\nleaf = [\"q\", \"p\"\n");
    let out = bin(&["all", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_MODEL));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column"));

    let f = temp_model(
        "[chart]\ntransverse = [\"s\"]\nleaf = [\"q\", \"p\"]\n[structure]\nomega = [{ on = [\"p\", \"q\"], value = \"1 + r\" }]\n",
    );
    let out = bin(&["all", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_MODEL));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5") && err.contains("`r`"), "{err}");
}

#[test]
fn degenerate_form_is_a_failed_check() {
    let f = temp_model(
        "[chart]\ntransverse = [\"s\"]\nleaf = [\"q\", \"p\"]\n[structure]\nomega = [{ on = [\"p\", \"q\"], value = \"0\" }]\n",
    );
    let out = bin(&["check-structure", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(status_of(&json(&out), "structure.symplectic"), "fail");
}

#[test]
fn library_entry_point_matches_binary() {
    let path = model("darboux3");
    let args = ["foliaquant", "check-calculus", path.to_str().unwrap()];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(main_with(args, &mut out, &mut err), 0);
    assert!(err.is_empty());
    assert_eq!(out, bin(&args[1..]).stdout);
}

#[test]
fn exit_code_precedence() {
    let pass = CheckResult::pass("a", 1);
    let fail = CheckResult::fail("b", "x", 1);
    let unsure = CheckResult::from_outcome("c", Err(Error::Inconclusive("x".into())), 1);
    let skipped = CheckResult::skipped("d", "n/a");
    assert_eq!(exit_code(&[pass.clone(), skipped.clone()]), 0);
    assert_eq!(exit_code(&[pass.clone(), unsure.clone()]), 2);
    assert_eq!(exit_code(&[unsure, fail, pass]), 1);
}
