use super::*;
use crate::config::parse_config;

fn config(extra: &str) -> SuiteConfig {
    parse_config(&format!("protocol = \"schnorr\"\np = 23\nq = 11\ng = 2\nx = 3\n{extra}")).unwrap()
}

#[test]
fn schnorr_suite_passes() {
    let report = run_suite(&config("")).unwrap();
    assert!(report.passed(), "{}", emit_report(&report, EmitFormat::Human));
    assert_eq!(report.checks.len(), CheckName::ALL.len());
    let hvzk = report.check(CheckName::Hvzk).unwrap();
    assert_eq!(hvzk.details["distance"], "0/1");
    let global = report.check(CheckName::GlobalSections).unwrap();
    assert_eq!(global.details["sweep_recoveries"], 1210);
    assert_eq!(global.details["witnesses"], json!([3]));
    assert_eq!(report.check(CheckName::LiteralGluing).unwrap().verdict, Verdict::Informational);
}

#[test]
fn chaum_pedersen_suite_passes() {
    let text = "protocol = \"chaum_pedersen\"\np = 23\nq = 11\ng = 2\nh = 4\nx = 3\n";
    let report = run_suite(&parse_config(text).unwrap()).unwrap();
    assert!(report.passed(), "{}", emit_report(&report, EmitFormat::Human));
    assert_eq!(report.parameters.h, Some(4));
}

#[test]
fn constant_response_simulator_fails() {
    let report = run_suite(&config("epsilon = \"0/1\"\nsimulator = \"constant_response\"\n")).unwrap();
    assert!(!report.passed());
    let gluing = report.check(CheckName::DistributionalGluing).unwrap();
    assert_eq!(gluing.verdict, Verdict::Fail);
    assert_eq!(gluing.details["commitment_distance"], "10/11");
    assert!(!gluing.counterexamples.is_empty());
}

#[test]
fn machine_report_shape() {
    let report = run_suite(&config("checks = [\"completeness\", \"hvzk\"]\n")).unwrap();
    let text = emit_report(&report, EmitFormat::Machine);
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["overall"], "pass");
    assert_eq!(value["checks"].as_array().unwrap().len(), 2);
    assert!(!text.contains("elapsed"));
    assert_eq!(text, emit_report(&run_suite(&config("checks = [\"hvzk\", \"completeness\"]\n")).unwrap(), EmitFormat::Machine));
}

#[test]
fn empty_selection_is_degenerate() {
    let report = run_suite(&config("checks = []\n")).unwrap();
    assert!(report.passed());
    assert!(report.degenerate);
    assert!(report.checks.is_empty());
    assert!(emit_report(&report, EmitFormat::Human).contains("no checks selected"));
}

#[test]
fn random_witness_is_reproducible() {
    let cfg = parse_config("protocol = \"schnorr\"\np = 47\nq = 23\ng = 2\nx = \"random\"\nseed = 11\nchecks = [\"completeness\", \"tamper\", \"hvzk\"]\n").unwrap();
    let a = emit_report(&run_suite(&cfg).unwrap(), EmitFormat::Machine);
    let b = emit_report(&run_suite(&cfg).unwrap(), EmitFormat::Machine);
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 11"));
}
