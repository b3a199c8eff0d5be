//! End-to-end tests of the real binary: exit codes, output bytes, and the
//! cross-command round trips the file formats promise.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_charkit"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const DEADLOCK: &str = "states: s0\nlabels: a\n";

/// a.b + a on the left, a.b on the right.
const SEPARATING: &str = "states: u u1 dead v v1\nlabels: a b\n\
trans: u a u1\ntrans: u a dead\ntrans: u1 b dead\n\
trans: v a v1\ntrans: v1 b dead\n";

#[test]
fn gen_deadlock_bisim() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "d.lts", DEADLOCK);
    let (code, stdout, _) = run(&["gen", "--lts", &lts, "--semantics", "bisim"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("max X(s0) = [a]ff"), "{stdout}");
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let a = run(&["gen", "--lts", &lts, "--semantics", "bfb"]);
    let b = run(&["gen", "--lts", &lts, "--semantics", "bfb"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn gen_without_label_preorder_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "d.lts", DEADLOCK);
    let (code, stdout, stderr) = run(&["gen", "--lts", &lts, "--semantics", "extleq"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("labelle"), "{stderr}");
    // closing the (empty) preorder to the identity fixes it
    let (code, stdout, _) = run(&[
        "gen",
        "--lts",
        &lts,
        "--semantics",
        "extleq",
        "--close-preorder",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("max X(s0) = [a]ff"));
}

#[test]
fn solve_single_state_bisim() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "d.lts", DEADLOCK);
    let (code, stdout, _) = run(&["solve", "--lts", &lts, "--semantics", "bisim"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "s0 s0\n");
}

#[test]
fn solve_separating_instance_simulation_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let (code, stdout, _) = run(&["solve", "--lts", &lts, "--semantics", "simleq"]);
    assert_eq!(code, 0);
    let pairs: Vec<&str> = stdout.lines().collect();
    assert!(pairs.contains(&"u v"));
    assert!(pairs.contains(&"v u"));
    // the min solution stays inside the max one
    let (code, min_out, _) = run(&[
        "solve",
        "--lts",
        &lts,
        "--semantics",
        "simleq",
        "--mode",
        "min",
    ]);
    assert_eq!(code, 0);
    for line in min_out.lines() {
        assert!(pairs.contains(&line), "min pair {line} missing from max");
    }
}

#[test]
fn check_reflexive_bisim() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let (code, stdout, _) = run(&[
        "check",
        "--lts",
        &lts,
        "--semantics",
        "bisim",
        "u",
        "u",
        "--oracle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "related\n");
}

#[test]
fn check_separates_simulation_equivalence_from_bisimilarity() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let (code, stdout, _) = run(&[
        "check",
        "--lts",
        &lts,
        "--semantics",
        "simeq",
        "u",
        "v",
        "--oracle",
    ]);
    assert_eq!((code, stdout.as_str()), (0, "related\n"));
    let (code, stdout, _) = run(&[
        "check",
        "--lts",
        &lts,
        "--semantics",
        "bisim",
        "u",
        "v",
        "--oracle",
    ]);
    assert_eq!((code, stdout.as_str()), (3, "unrelated\n"));
}

#[test]
fn check_ready_simulation_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    // u1 enables b, dead enables nothing: ready sets differ both ways
    let (code, stdout, _) = run(&[
        "check",
        "--lts",
        &lts,
        "--semantics",
        "rs",
        "u1",
        "dead",
        "--oracle",
    ]);
    assert_eq!((code, stdout.as_str()), (3, "unrelated\n"));
}

#[test]
fn check_unknown_state_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let (code, _, stderr) = run(&["check", "--lts", &lts, "--semantics", "bisim", "u", "w"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("unknown state `w`"), "{stderr}");
}

#[test]
fn parse_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "bad.lts", "states: p\ntrans: p a p\n");
    let (code, _, stderr) = run(&["gen", "--lts", &lts, "--semantics", "bisim"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("undeclared label `a`"), "{stderr}");
}

#[test]
fn validation_failure_exits_1_and_closure_repairs() {
    let dir = tempfile::tempdir().unwrap();
    // preorder missing reflexive pairs
    let lts = write(
        dir.path(),
        "open.lts",
        "states: p\nlabels: a b\nlabelle: a b\n",
    );
    let (code, _, stderr) = run(&["gen", "--lts", &lts, "--semantics", "extleq"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("preorder not reflexive"), "{stderr}");
    let (code, _, _) = run(&[
        "gen",
        "--lts",
        &lts,
        "--semantics",
        "extleq",
        "--close-preorder",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn mc_tautology_and_empty_least_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "d.lts", DEADLOCK);
    let tautology = write(dir.path(), "t.decl", "max X(s0) = tt\n");
    let (code, stdout, _) = run(&["mc", "--lts", &lts, "--decl", &tautology, "s0", "X(s0)"]);
    assert_eq!((code, stdout.as_str()), (0, "related\n"));
    let identity = write(dir.path(), "i.decl", "min X(s0) = X(s0)\n");
    let (code, stdout, _) = run(&["mc", "--lts", &lts, "--decl", &identity, "s0", "X(s0)"]);
    assert_eq!((code, stdout.as_str()), (3, "unrelated\n"));
}

#[test]
fn mc_agrees_with_check_on_handwritten_bisim_declaration() {
    let dir = tempfile::tempdir().unwrap();
    let lts_text = "states: p q\nlabels: a\ntrans: p a q\n";
    let lts = write(dir.path(), "pq.lts", lts_text);
    let decl = write(
        dir.path(),
        "bisim.decl",
        "max X(p) = [a]X(q) /\\ <a>X(q)\nmax X(q) = [a]ff\n",
    );
    for (l, r) in [("p", "p"), ("p", "q"), ("q", "p"), ("q", "q")] {
        let query = format!("X({r})");
        let (mc_code, mc_out, _) = run(&["mc", "--lts", &lts, "--decl", &decl, l, &query]);
        let (check_code, check_out, _) = run(&[
            "check",
            "--lts",
            &lts,
            "--semantics",
            "bisim",
            l,
            r,
            "--oracle",
        ]);
        assert_eq!(mc_code, check_code, "({l}, {r})");
        assert_eq!(mc_out, check_out, "({l}, {r})");
    }
}

#[test]
fn gen_out_file_feeds_mc() {
    let dir = tempfile::tempdir().unwrap();
    let lts = write(dir.path(), "s.lts", SEPARATING);
    let decl = dir.path().join("simeq.decl");
    let (code, stdout, _) = run(&[
        "gen",
        "--lts",
        &lts,
        "--semantics",
        "simeq",
        "--out",
        decl.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let header = std::fs::read_to_string(&decl).unwrap();
    assert!(header.starts_with("# semantics: simeq, mode: max, query: X(q) /\\ Y(q)\n"));
    let (code, stdout, _) = run(&[
        "mc",
        "--lts",
        &lts,
        "--decl",
        decl.to_str().unwrap(),
        "u",
        "X(v) /\\ Y(v)",
    ]);
    assert_eq!((code, stdout.as_str()), (0, "related\n"));
}

#[test]
fn difftest_small_run_is_clean() {
    let (code, stdout, _) = run(&[
        "difftest",
        "--trials",
        "5",
        "--max-states",
        "4",
        "--seed",
        "21",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "trials=5 comparisons=50 mismatches=0\n");
}

#[test]
fn difftest_single_semantics_and_json() {
    let (code, stdout, _) = run(&[
        "difftest",
        "--trials",
        "3",
        "--max-states",
        "3",
        "--semantics",
        "prebis",
        "--json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "{\"trials\":3,\"comparisons\":3,\"mismatches\":0}\n"
    );
}

#[test]
fn difftest_rejects_bad_density() {
    let (code, _, stderr) = run(&["difftest", "--trials", "1", "--density", "1.5"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("density"), "{stderr}");
}

#[test]
fn difftest_zero_trials_exits_1() {
    let (code, _, stderr) = run(&["difftest", "--trials", "0"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("at least one trial"), "{stderr}");
}
