use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigma-sheaf"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg("--config").arg(path).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn shipped_configs_exit_codes() {
    for (name, code) in [
        ("schnorr-23.toml", 0),
        ("chaum-pedersen-23.toml", 0),
        ("schnorr-47-random.toml", 0),
        ("faulty-simulator.toml", 1),
    ] {
        let out = run(&["suite"], &config(name));
        assert_eq!(out.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn machine_report_is_reproducible() {
    let path = config("schnorr-47-random.toml");
    let (a, b) = (run(&["suite", "--emit", "machine"], &path), run(&["suite", "--emit", "machine"], &path));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["parameters"]["seed"], 2024);
    assert_eq!(report["overall"], "pass");
}

#[test]
fn faulty_simulator_names_failing_checks() {
    let out = run(&["suite", "--emit", "human"], &config("faulty-simulator.toml"));
    let text = stdout(&out);
    assert!(text.contains("overall: fail"), "{text}");
    let report = run(&["suite", "--emit", "machine"], &config("faulty-simulator.toml"));
    let report: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    let failing: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["verdict"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["hvzk", "coverings", "distributional_gluing", "local_triviality"]);
}

#[test]
fn bad_config_exits_with_located_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "protocol = \"schnorr\"\np = 23\nq = 12\ng = 2\nx = 3\n").unwrap();
    let out = run(&["suite"], &path);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains("q not prime"), "{err}");
    assert!(out.stdout.is_empty());

    std::fs::write(&path, "protocol = \"schnorr\"\np = 23\nq = 11\ng = 2\nx = 3\nbogus = 1\n").unwrap();
    let out = run(&["suite"], &path);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));

    let out = run(&["suite"], &dir.path().join("missing.toml"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn epsilon_override_is_validated() {
    let out = run(&["suite", "--epsilon", "1/0"], &config("schnorr-23.toml"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--epsilon"));
}

#[test]
fn demo_prints_verifying_transcripts() {
    let out = run(&["demo", "--seed", "5"], &config("schnorr-23.toml"));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.ends_with("verifies=true")), "{text}");
    assert_eq!(text, stdout(&run(&["demo", "--seed", "5"], &config("schnorr-23.toml"))));
}

#[test]
fn site_and_dist_dumps() {
    let site = stdout(&run(&["site"], &config("schnorr-23.toml")));
    assert!(site.starts_with("# objects 518\n"), "{}", &site[..site.len().min(80)]);
    let dist = stdout(&run(&["dist", "--shape", "a"], &config("schnorr-23.toml")));
    assert!(dist.ends_with("# distance 0/1\n"), "{dist}");
    let faulty = stdout(&run(&["dist", "--shape", "a,e,z"], &config("faulty-simulator.toml")));
    assert!(faulty.contains("# distance 10/11"), "{faulty}");
}
