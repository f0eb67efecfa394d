use std::path::Path;
use std::process::{Command, Output};

fn distproof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distproof")).args(args).output().unwrap()
}

fn report(args: &[&str], out: &Path) -> (i32, String) {
    let mut all = args.to_vec();
    let path = out.to_str().unwrap();
    all.extend(["--out", path]);
    let o = distproof(&all);
    (o.status.code().unwrap(), std::fs::read_to_string(out).unwrap_or_default())
}

#[test]
fn oracle_session_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--mode", "oracle-session", "--n", "64", "--trials", "10", "--seed", "3"];
    let (code, a) = report(&args, &dir.path().join("a.txt"));
    let (_, b) = report(&args, &dir.path().join("b.txt"));
    assert_eq!(code, 0, "{a}");
    assert_eq!(a, b);
    assert!(a.starts_with("# distproof report v1\n[run]\nmode = oracle-session\n"));
    assert_eq!(a.lines().filter(|l| l.starts_with("honest trial=")).count(), 10);
    assert!(a.contains("reference_d_samples = "));
}

#[test]
fn cheating_provers_are_expected_to_be_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--mode", "general-argument", "--n", "64", "--trials", "5", "--distance", "0.6"];
    let mut args = base.to_vec();
    args.extend(["--adversary", "representation-swap", "--backend", "spot-check"]);
    let (code, text) = report(&args, &dir.path().join("r.txt"));
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("rejected.backend"), "{text}");

    // demanding acceptance of a far input fails the threshold
    let mut args = base.to_vec();
    args.extend(["--expect", "accept"]);
    let (code, text) = report(&args, &dir.path().join("f.txt"));
    assert_eq!(code, 1, "{text}");
    assert!(text.ends_with("result = fail\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(distproof(&["--mode", "oracle-session", "--adversary", "nobody"]).status.code(), Some(2));
    assert_eq!(distproof(&["--mode", "nothing"]).status.code(), Some(2));
    assert_eq!(distproof(&["--mode", "serve-prover"]).status.code(), Some(2));
}

#[test]
fn brute_force_and_separate_prover_process() {
    let o = distproof(&["--mode", "brute-force", "--n", "3", "--grains", "5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{text}");
    assert!(text.contains("pass reduction checks"));

    let o = distproof(&["--mode", "oracle-session", "--n", "32", "--trials", "2", "--spawn-prover"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}
