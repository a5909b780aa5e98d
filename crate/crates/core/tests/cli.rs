use std::fs;
use std::process::Command;

use treeevo::cli;
use treeevo::harness::{read_csv, CSV_HEADER};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("treeevo").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn value<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in:\n{out}"))
}

#[test]
fn express_walkthroughs() {
    let (code, out, _) = call(&[
        "express",
        "--problem",
        "order",
        "--l",
        "4",
        "(JOIN (JOIN ~X3 X1) (JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3)))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "leaves"), "~X3 X1 ~X1 ~X2 X4 ~X3");
    assert_eq!(value(&out, "bits"), "1001");
    assert_eq!(value(&out, "fitness"), "2");

    let (code, out, _) = call(&[
        "express",
        "--l",
        "4",
        "(JOIN (JOIN ~X3 J1) (JOIN (JOIN ~X1 J2) (JOIN X2 X4)))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "effective_leaves"), "~X3 ~X1 X2 X4");
    assert_eq!(value(&out, "fitness"), "2");
    assert_eq!(value(&out, "num_junk"), "2");

    let (_, out, _) = call(&["express", "--l", "2", "(NEG_JOIN ~X1 X2)"]);
    assert_eq!(value(&out, "leaves"), "~X1* X2*");
    assert_eq!(value(&out, "expressed"), "X1 ~X2");
    assert_eq!(value(&out, "fitness"), "1");
}

#[test]
fn express_trap_fitness() {
    let (code, out, _) = call(&[
        "express", "--problem", "trap", "--l", "4", "--k", "4", "--delta", "0.25", "~X1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "bits"), "0000");
    assert_eq!(value(&out, "fitness"), "0.75");
}

#[test]
fn express_rejects_bad_input() {
    let (code, _, err) = call(&["express", "--l", "2", "(JOIN X1"]);
    assert_eq!(code, 2);
    assert!(err.contains("tree"), "{err}");
    let (code, _, err) = call(&["express", "--l", "2", "X3"]);
    assert_eq!(code, 2);
    assert!(err.contains("--l"), "{err}");
}

#[test]
fn tiny_run_succeeds() {
    let (code, out, _) = call(&[
        "run", "--algo", "gp", "--problem", "order", "--l", "1", "--pop", "16", "--seed", "7",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "success"), "true");
    assert_eq!(value(&out, "evaluations"), "16");
}

#[test]
fn run_both_prints_two_blocks() {
    let (code, out, _) = call(&["run", "--algo", "both", "--l", "6", "--pop", "60", "--seed", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("algorithm=gp\n"));
    assert!(out.contains("\nalgorithm=pipe\n"));
}

#[test]
fn failed_run_exits_one() {
    let (code, out, _) = call(&[
        "run", "--l", "30", "--pop", "4", "--max-gens", "2", "--seed", "1",
    ]);
    assert_eq!(code, 1);
    assert_eq!(value(&out, "success"), "false");
    assert_eq!(value(&out, "evaluations"), "12");
}

#[test]
fn dump_model_goes_to_stderr() {
    let (code, out, err) = call(&[
        "run", "--algo", "pipe", "--l", "3", "--pop", "20", "--seed", "4", "--dump-model",
    ]);
    assert!(code == 0 || code == 1);
    let generations: usize = value(&out, "generations_used").parse().unwrap();
    assert_eq!(err.matches("# model built").count(), generations);
    if generations > 0 {
        assert!(err.lines().any(|l| l.starts_with("/: {")), "{err}");
    }
}

#[test]
fn usage_errors_name_the_flag() {
    for (args, flag) in [
        (vec!["run", "--pop", "7"], "--pop"),
        (vec!["run", "--l", "0"], "--l"),
        (vec!["run", "--problem", "trap", "--l", "7"], "--k"),
        (vec!["run", "--problem", "trap", "--k", "1", "--l", "4"], "--k"),
        (vec!["run", "--problem", "trap", "--delta", "1.5", "--l", "6"], "--delta"),
        (vec!["run", "--internal-bias", "2"], "--internal-bias"),
        (vec!["bisect", "--runs", "0"], "--runs"),
        (vec!["bisect", "--start-pop", "64", "--max-pop", "32"], "--max-pop"),
        (vec!["sweep", "--plan", "trap", "--sizes", "6,7"], "--sizes"),
        (vec!["run", "--algo", "sgd"], "--algo"),
        (vec!["run", "--frobnicate"], "--frobnicate"),
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn help_lists_flags() {
    let (code, out, _) = call(&["run", "--help"]);
    assert_eq!(code, 0);
    for flag in [
        "--algo", "--problem", "--l", "--k", "--delta", "--neg-join", "--junk", "--pop", "--max-gens",
        "--max-depth", "--seed", "--dump-model",
    ] {
        assert!(out.contains(flag), "missing {flag}");
    }
    let (_, out, _) = call(&["sweep", "--help"]);
    for flag in ["--plan", "--sizes", "--runs", "--out", "--max-pop"] {
        assert!(out.contains(flag), "missing {flag}");
    }
}

#[test]
fn bisect_reports_sizing() {
    let (code, out, _) = call(&["bisect", "--algo", "gp", "--l", "2", "--runs", "5"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "sizing"), "ok");
    let size: usize = value(&out, "min_pop_size").parse().unwrap();
    assert!(size >= 2 && size.is_multiple_of(2));
}

#[test]
fn bisect_ceiling_exits_one() {
    let (code, out, err) = call(&[
        "bisect", "--algo", "pipe", "--problem", "trap", "--l", "33", "--k", "3", "--delta", "1",
        "--runs", "3", "--max-pop", "64", "--max-gens", "20",
    ]);
    assert_eq!(code, 1);
    assert_eq!(value(&out, "sizing"), "failed");
    assert_eq!(value(&out, "ceiling"), "64");
    assert!(err.contains("population sizing failed"), "{err}");
}

#[test]
fn sweep_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let (code, out, _) = call(&[
            "sweep", "--plan", "order", "--sizes", "3,5", "--algo", "both", "--runs", "5", "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(value(&out, "rows"), "4");
    }
    let csv_a = fs::read(a.join("order.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("order.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("order.svg")).unwrap(),
        fs::read(b.join("order.svg")).unwrap()
    );
    let text = String::from_utf8(csv_a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(&a.join("order.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.success_rate == 1.0 && r.seed_base == 1));
}

#[test]
fn sweep_to_unwritable_dir_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let (code, _, err) = call(&[
        "sweep", "--sizes", "2", "--algo", "gp", "--runs", "2", "--out", blocker.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("file"), "{err}");
}

#[test]
fn binary_is_byte_identical_across_invocations() {
    let exe = env!("CARGO_BIN_EXE_treeevo");
    let args = ["run", "--algo", "both", "--l", "8", "--pop", "40", "--seed", "9"];
    let first = Command::new(exe).args(args).output().unwrap();
    let second = Command::new(exe).args(args).output().unwrap();
    assert!(first.status.code().is_some());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());

    let bad = Command::new(exe).args(["run", "--pop", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
