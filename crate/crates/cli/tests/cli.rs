//! End-to-end checks of the binary: exit codes, report contents, and the
//! canonical-output round trip.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasifix"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn verify_exit_codes_follow_the_verdict() {
    let p3 = fixture("P3.json");
    let p3 = p3.to_str().unwrap();

    let failing = run(&["verify", p3, "--k", "1"]);
    assert_eq!(code(&failing), 1);
    let text = stdout(&failing);
    assert!(text.contains("1/2"), "witness left side missing:\n{text}");
    assert!(text.contains("9/20"), "binding chain sum missing:\n{text}");
    assert!(text.contains("a -> b -> c"), "chain missing:\n{text}");

    let passing = run(&["verify", p3, "--k", "2"]);
    assert_eq!(code(&passing), 0);
    assert!(!stdout(&passing).contains("FAIL"));

    let minimal = run(&["verify", p3, "--minimal-k"]);
    assert_eq!(code(&minimal), 0);
    assert_eq!(stdout(&minimal), "minimal K: 10/9\n");
}

#[test]
fn verify_rejects_unreadable_and_malformed_input() {
    assert_eq!(code(&run(&["verify", "missing.json"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let output = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("bad.json"));

    let negative = dir.path().join("negative.json");
    fs::write(&negative, r#"{"points": ["a"], "K": "1", "D": [["-1"]]}"#).unwrap();
    assert_eq!(code(&run(&["verify", negative.to_str().unwrap()])), 2);

    let zero_k = run(&["verify", fixture("P3.json").to_str().unwrap(), "--k", "0"]);
    assert_eq!(code(&zero_k), 2);
}

#[test]
fn derive_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = fixture("P3.json");
    let derive_to = |input: &Path, name: &str| -> PathBuf {
        let out = dir.path().join(name);
        let status = bin()
            .args(["derive", input.to_str().unwrap(), "--conjugate", "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        out
    };

    let once = derive_to(&p3, "conj1.json");
    let twice = derive_to(&once, "conj2.json");
    let thrice = derive_to(&twice, "conj3.json");

    // Conjugation is an involution: on canonical files the round trip is
    // byte-identical, and twice-conjugated input equals the original space.
    assert_eq!(fs::read(&once).unwrap(), fs::read(&thrice).unwrap());
    let original: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&p3).unwrap()).unwrap();
    let roundtripped: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&twice).unwrap()).unwrap();
    assert_eq!(original, roundtripped);

    assert_eq!(code(&run(&["derive", p3.to_str().unwrap()])), 2);
}

#[test]
fn classify_covers_cauchy_convergence_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let space_text = fs::read_to_string(fixture("T3.json")).unwrap();
    fs::write(dir.path().join("T3.json"), space_text).unwrap();
    let seq = dir.path().join("seq.json");
    fs::write(&seq, r#"{"space": "T3.json", "entries": ["p", "q", "r", "r", "r"]}"#).unwrap();
    let seq = seq.to_str().unwrap();

    let cauchy = run(&["classify", seq, "--kind", "left_k", "--epsilon", "1/20"]);
    assert_eq!(code(&cauchy), 0);
    assert!(stdout(&cauchy).contains("n0 = 2"));

    let convergence = run(&["classify", seq, "--limit", "r", "--mode", "d", "--epsilon", "1/100"]);
    assert_eq!(code(&convergence), 0);
    assert!(stdout(&convergence).contains("from index 2"));

    let limits = run(&["classify", seq, "--mode", "d", "--epsilon", "1/20"]);
    assert_eq!(code(&limits), 0);
    assert_eq!(stdout(&limits), "limits: r\n");

    let failing = run(&["classify", seq, "--limit", "p", "--mode", "d", "--epsilon", "1/100"]);
    assert_eq!(code(&failing), 1);

    // An alternating prefix fails the Cauchy classification.
    let alternating = dir.path().join("alt.json");
    fs::write(&alternating, r#"{"space": "T3.json", "entries": ["p", "q", "p", "q", "p", "q"]}"#)
        .unwrap();
    let verdict = run(&["classify", alternating.to_str().unwrap(), "--kind", "left_k", "--epsilon", "1/2"]);
    assert_eq!(code(&verdict), 1);

    // Flag combinations that do not select an operation are usage errors.
    assert_eq!(code(&run(&["classify", seq, "--epsilon", "1/2"])), 2);
    assert_eq!(code(&run(&["classify", seq, "--kind", "nope", "--epsilon", "1/2"])), 2);
    assert_eq!(code(&run(&["classify", seq, "--epsilon", "0"])), 2);
}

#[test]
fn solve_reports_fixed_points_and_cycles() {
    let t3 = fixture("T3.json");
    let map = fixture("T3-map.json");
    let solved = run(&["solve", t3.to_str().unwrap(), map.to_str().unwrap(), "--x0", "p"]);
    assert_eq!(code(&solved), 0);
    let text = stdout(&solved);
    assert!(text.contains("p -> q -> r"));
    assert!(text.contains("fixed point at index 2"));

    let dir = tempfile::tempdir().unwrap();
    let swap = dir.path().join("swap.json");
    fs::write(&swap, r#"{"f": {"p": "q", "q": "p", "r": "r"}}"#).unwrap();
    let cycled = run(&["solve", t3.to_str().unwrap(), swap.to_str().unwrap(), "--x0", "p"]);
    assert_eq!(code(&cycled), 1);
    assert!(stdout(&cycled).contains("cycle of length 2"));

    let unknown = run(&["solve", t3.to_str().unwrap(), map.to_str().unwrap(), "--x0", "z"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn certify_certifies_and_rejects() {
    let problem = fixture("T3-problem.json");
    let problem = problem.to_str().unwrap();

    let passing = run(&["certify", problem]);
    assert_eq!(code(&passing), 0);
    let text = stdout(&passing);
    assert!(text.contains("fixed point: r"));
    assert!(text.contains("lambda: 1/10"));

    // Identical runs produce byte-identical certificates.
    let first = run(&["certify", problem, "--json"]);
    let second = run(&["certify", problem, "--json"]);
    assert_eq!(first.stdout, second.stdout);

    assert_eq!(code(&run(&["certify", problem, "--profile", "fix3"])), 2);

    // A problem whose map breaks the contraction fails with exit 1.
    let dir = tempfile::tempdir().unwrap();
    for name in ["T3.json", "T3-pair.json"] {
        fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    fs::write(dir.path().join("swap.json"), r#"{"f": {"p": "q", "q": "p", "r": "r"}}"#).unwrap();
    let failing_problem = dir.path().join("problem.json");
    fs::write(
        &failing_problem,
        r#"{"space": "T3.json", "map": "swap.json", "pair": "T3-pair.json", "profile": "fix1"}"#,
    )
    .unwrap();
    let failing = run(&["certify", failing_problem.to_str().unwrap()]);
    assert_eq!(code(&failing), 1);
    let text = stdout(&failing);
    assert!(text.contains("contraction"));
    assert!(text.contains("FAILED"));
    assert!(text.contains("fixed point: none"));
}

#[test]
fn certify_works_for_every_profile() {
    let problem = fixture("T3-problem.json");
    for profile in ["fix1", "fix1_right", "bicomplete", "bicomplete_min", "subseq", "fix2"] {
        let output = run(&["certify", problem.to_str().unwrap(), "--profile", profile]);
        assert_eq!(code(&output), 0, "profile {profile}");
        assert!(stdout(&output).contains("fixed point: r"), "profile {profile}");
    }
}

#[test]
fn search_modes_run_clean_and_reject_bad_config() {
    let oracle = run(&["search", "--mode", "d2-oracle", "--points", "3", "--trials", "10", "--seed", "5"]);
    assert_eq!(code(&oracle), 0);

    let soundness =
        run(&["search", "--mode", "soundness", "--points", "3", "--trials", "50", "--seed", "5"]);
    assert_eq!(code(&soundness), 0);
    assert!(stdout(&soundness).contains("0 counterexamples"));

    assert_eq!(code(&run(&["search", "--mode", "nope"])), 2);
    assert_eq!(code(&run(&["search", "--mode", "d2-oracle", "--points", "6"])), 2);
    assert_eq!(
        code(&run(&["search", "--mode", "soundness", "--grid", "1/4,1/2"])),
        2,
        "grid without zero is invalid"
    );
}

#[test]
fn json_outputs_are_valid_json() {
    let p3 = fixture("P3.json");
    let report = run(&["verify", p3.to_str().unwrap(), "--k", "1", "--json"]);
    let value: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(value["minimal_k"], "10/9");
    assert_eq!(value["d2_holds"], false);
    assert_eq!(value["d2_witness"]["chain"]["total"], "9/20");

    let cert = run(&["certify", fixture("T3-problem.json").to_str().unwrap(), "--json"]);
    let value: serde_json::Value = serde_json::from_slice(&cert.stdout).unwrap();
    assert_eq!(value["fixed_point"], "r");
    assert_eq!(value["lambda"], "1/10");
    assert_eq!(value["bound_residuals"], serde_json::json!(["0", "3/20"]));
}
