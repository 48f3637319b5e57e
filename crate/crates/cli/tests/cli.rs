use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use biopt_cli::{default_candidates, verify_problem, Candidate, EXIT_MISMATCH, EXIT_OK};
use biopt_core::instances::parse_instance;
use biopt_core::{BranchAndBoundBackend, EnumerationBudget, Problem};

const T1: &str = "BOIP 1\nSENSE min min\nVARS 2\nOBJ1 1 0\nOBJ2 0 1\nB 0 0 3\nB 1 0 3\nCONSTRAINTS 1\nROW 1 1 >= 3\n";
const T1_FRONT: &str = "0 3 : 0 3\n1 2 : 1 2\n2 1 : 2 1\n3 0 : 3 0\n";

fn biopt(args: &[&str]) -> Output {
    biopt_env(args, &[])
}

fn biopt_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biopt"));
    cmd.args(args).env_remove("BIOPT_NODE_LIMIT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Result lines only; the `#` footer carries timings.
fn result_lines(o: &Output) -> String {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name)
}

#[test]
fn gen_writes_the_frozen_knapsack() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k3.boip");
    let o = biopt(&["gen", "--family", "knapsack", "--size", "3", "--seed", "42", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("3 variables, 1 constraints"));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, fs::read_to_string(golden("knapsack-3-seed42.boip")).unwrap());
    parse_instance(&text).unwrap();
}

#[test]
fn gen_to_stdout_and_bad_flags() {
    let o = biopt(&["gen", "--family", "assignment", "--size", "2", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let p = parse_instance(&stdout(&o)).unwrap();
    assert_eq!(p.num_vars(), 4);

    assert_eq!(code(&biopt(&["gen", "--family", "knapsack", "--size", "0"])), 2);
    assert_eq!(code(&biopt(&["gen", "--family", "tsp", "--size", "3"])), 2);
    assert_eq!(code(&biopt(&["gen", "--family", "knapsack", "--size", "3", "--range", "0:9"])), 2);
    assert_eq!(code(&biopt(&["gen", "--family", "knapsack", "--size", "3", "--range", "9"])), 2);
    assert_eq!(code(&biopt(&[])), 2);
    assert_eq!(code(&biopt(&["--help"])), 0);

    let o = biopt(&["gen", "--family", "knapsack", "--size", "3", "-o", "/nonexistent-dir/k.boip"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn solve_t1_with_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write(dir.path(), "t1.boip", T1);
    let t1 = t1.to_str().unwrap();
    for args in [
        vec!["solve", "--alg", "seq", t1],
        vec!["solve", t1],
        vec!["solve", "--alg", "meet", "--threads", "2", t1],
        vec!["solve", "--alg", "split", "--threads", "2", t1],
        vec!["solve", "--alg", "brute", t1],
    ] {
        let o = biopt(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        assert_eq!(result_lines(&o), T1_FRONT, "{args:?}");
        let out = stdout(&o);
        assert!(out.contains("# pareto_size 4\n") && out.contains("# elapsed_ms "));
    }
    assert!(stdout(&biopt(&["solve", t1])).contains("# ip_solves 5\n"));
}

#[test]
fn solve_contract_violations() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write(dir.path(), "t1.boip", T1);
    let t1 = t1.to_str().unwrap();
    assert_eq!(code(&biopt(&["solve", "--alg", "split", "--threads", "1", t1])), 2);
    assert_eq!(code(&biopt(&["solve", "--alg", "meet", "--threads", "1", t1])), 2);
    assert_eq!(code(&biopt(&["solve", "--alg", "seq", "--threads", "2", t1])), 2);
    assert_eq!(code(&biopt(&["solve", "--alg", "fastest", t1])), 2);
}

#[test]
fn solve_reports_parse_errors_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.boip", &T1.replace("OBJ1 1 0", "OBJ1 1 0 7"));
    let o = biopt(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let o = biopt(&["solve", dir.path().join("missing.boip").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn empty_front_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "empty.boip", &T1.replace(">= 3", ">= 7"));
    for alg in ["seq", "meet", "split", "brute"] {
        let o = biopt(&["solve", "--alg", alg, p.to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{alg}");
        assert_eq!(result_lines(&o), "", "{alg}");
    }
}

#[test]
fn max_sense_results_print_user_values() {
    let o = biopt(&["solve", golden("knapsack-3-seed42.boip").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(result_lines(&o), fs::read_to_string(golden("knapsack-3-seed42.front")).unwrap());
}

#[test]
fn node_limit_from_environment() {
    let path = golden("assignment-3-seed42.boip");
    let path = path.to_str().unwrap();
    let o = biopt_env(&["solve", path], &[("BIOPT_NODE_LIMIT", "1")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("node limit"), "{}", stderr(&o));
    let o = biopt_env(&["solve", path], &[("BIOPT_NODE_LIMIT", "lots")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("BIOPT_NODE_LIMIT"));
    assert_eq!(code(&biopt_env(&["solve", path], &[("BIOPT_NODE_LIMIT", "1000000")])), 0);
}

#[test]
fn seq_and_brute_output_is_deterministic() {
    for name in ["assignment-3-seed42.boip", "knapsack-3-seed1.boip"] {
        let path = golden(name);
        for alg in ["seq", "brute"] {
            let a = biopt(&["solve", "--alg", alg, path.to_str().unwrap()]);
            let b = biopt(&["solve", "--alg", alg, path.to_str().unwrap()]);
            assert_eq!(code(&a), 0);
            assert_eq!(result_lines(&a), result_lines(&b), "{name} {alg}");
        }
    }
}

#[test]
fn verify_agreement_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write(dir.path(), "t1.boip", T1);
    let o = biopt(&["verify", t1.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    for name in ["sequential: ok", "splitting: ok", "meeting: ok"] {
        assert!(out.contains(name), "{out}");
    }

    let wide = format!(
        "BOIP 1\nSENSE min min\nVARS 30\nOBJ1 {}\nOBJ2 {}\n{}CONSTRAINTS 0\n",
        vec!["1"; 30].join(" "),
        vec!["-1"; 30].join(" "),
        (0..30).map(|j| format!("B {j} 0 1\n")).collect::<String>()
    );
    let wide = write(dir.path(), "wide.boip", &wide);
    let o = biopt(&["verify", wide.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains(&(1u64 << 30).to_string()), "{}", stderr(&o));
}

#[test]
fn corrupted_algorithm_is_caught() {
    let p: Problem = parse_instance(T1).unwrap();
    let mut candidates = default_candidates(BranchAndBoundBackend::default());
    let mut out = Vec::new();
    let code = verify_problem(&p, EnumerationBudget::default(), &candidates, &mut out).unwrap();
    assert_eq!(code, EXIT_OK);

    // drop the last point of the sequential front
    let broken: Candidate<'static> = (
        "sequential",
        Box::new(|p: &Problem| {
            let (front, _) = biopt_core::sequential_boip(p, &mut BranchAndBoundBackend::default())?;
            let mut pts = front.solutions().to_vec();
            pts.pop();
            Ok(biopt_core::pareto_filter(pts))
        }),
    );
    candidates[0] = broken;
    let mut out = Vec::new();
    let code = verify_problem(&p, EnumerationBudget::default(), &candidates, &mut out).unwrap();
    assert_eq!(code, EXIT_MISMATCH);
    let report = String::from_utf8(out).unwrap();
    assert!(report.contains("sequential: MISMATCH missing [(3,0)] extra []"), "{report}");
    assert!(report.contains("meeting: ok"));
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = biopt(&[
        "bench", "--families", "knapsack", "--sizes", "12", "--reps", "2", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,size,seed,algorithm,threads,elapsed_ms,ip_solves,pareto_size,verified");
    assert_eq!(lines.len(), 9);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    // the printed speedups follow from the CSV
    let records = biopt_harness::read_csv(text.as_bytes()).unwrap();
    let summary = biopt_harness::summarize(&records);
    assert_eq!(stdout(&o).lines().next(), summary.to_string().lines().next());
    assert!(stdout(&o).contains(&summary.to_string()));
}

#[test]
fn bench_unwritable_output_exits_1() {
    let o = biopt(&["bench", "--sizes", "4", "--reps", "1", "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bench_usage_errors() {
    assert_eq!(code(&biopt(&["bench", "--sizes", "4", "--reps", "0", "--out", "/tmp/x.csv"])), 2);
    assert_eq!(code(&biopt(&["bench", "--reps", "1"])), 2);
}
