use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn alwdr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alwdr")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_instance_solves_below_its_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    assert!(alwdr(&["gen", "--seed", "3", "-o", path(&inst)]).status.success());

    let oracle = alwdr(&["oracle", path(&inst)]);
    assert_eq!(oracle.status.code(), Some(0));
    let opt_line = stdout(&oracle).lines().next().unwrap().to_string();
    assert_eq!(opt_line, "optimum 32/1");

    let fpt = alwdr(&["oracle", path(&inst), "--method", "fpt"]);
    assert_eq!(stdout(&fpt).lines().next().unwrap(), opt_line);

    let solve = alwdr(&["solve", path(&inst), "--eps", "1/2", "--json"]);
    assert_eq!(solve.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&solve)).unwrap();
    assert!(v.is_object());
}

#[test]
fn exit_codes_separate_errors_from_caps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    alwdr(&["gen", "--seed", "1", "-o", path(&inst)]);
    assert_eq!(alwdr(&["oracle", path(&inst), "--cap", "1"]).status.code(), Some(2));
    assert_eq!(alwdr(&["round", path(&inst), "--backend", "float"]).status.code(), Some(1));
    assert_eq!(alwdr(&["solve", path(&dir.path().join("missing.txt"))]).status.code(), Some(1));
    assert_eq!(alwdr(&["gap-search", "--max-slots", "3", "--cap", "10"]).status.code(), Some(2));
    assert_eq!(alwdr(&["gap-search", "--max-slots", "2"]).status.code(), Some(0));
}

#[test]
fn matching_reduction_of_seven_triples() {
    let dir = tempfile::tempdir().unwrap();
    let triples = dir.path().join("t.txt");
    fs::write(&triples, "1 1 1\n1 2 1\n1 3 2\n1 3 1\n2 1 2\n3 2 3\n3 3 3\n").unwrap();
    let inst = dir.path().join("f5.txt");
    assert!(alwdr(&["reduce-3dm", path(&triples), "-o", path(&inst)]).status.success());
    let out = alwdr(&["oracle", path(&inst), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["optimum"], "6/1");
}

#[test]
fn bench_on_empty_corpus_writes_header_only() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let report = out.path().join("report");
    let run = alwdr(&["bench", path(corpus.path()), "-o", path(&report)]);
    assert_eq!(run.status.code(), Some(0));
    let csv = fs::read_to_string(report.join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("instance,digest,algorithm"));
}

#[test]
fn bench_writes_one_row_per_run() {
    let corpus = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let file = corpus.path().join(format!("i{seed}.txt"));
        alwdr(&["gen", "--seed", seed, "-o", path(&file)]);
    }
    let out = tempfile::tempdir().unwrap();
    let run = alwdr(&[
        "bench",
        path(corpus.path()),
        "--algorithms",
        "lp,collective",
        "--runs",
        "3",
        "--oracle",
        "-o",
        path(out.path()),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(out.path().join("bench.csv")).unwrap();
    // header + 2 instances × (1 lp + 3 collective)
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn exports_dot_and_lp() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    alwdr(&["gen", "--seed", "5", "-o", path(&inst)]);
    let dot = stdout(&alwdr(&["dump-dag", path(&inst), "--variant", "improved"]));
    assert!(dot.starts_with("digraph"));
    for f in ["edge", "dual", "path"] {
        let lp = alwdr(&["export-lp", path(&inst), "--formulation", f]);
        assert_eq!(lp.status.code(), Some(0), "{f}");
        assert!(!stdout(&lp).is_empty());
    }
}
