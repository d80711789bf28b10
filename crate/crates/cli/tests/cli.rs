use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn listrem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listrem")).args(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn solver() -> Option<String> {
    std::env::var("CHC_SOLVER_CMD").ok().filter(|s| !s.trim().is_empty())
}

fn clause_lines(s: &str) -> usize {
    s.lines().filter(|l| !l.trim().is_empty()).count()
}

#[test]
fn empty_source_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("empty.fun");
    std::fs::write(&src, "").unwrap();
    let out = listrem(&["translate", src.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("no definitions"), "{}", text(&out.stderr));
}

#[test]
fn translate_writes_program_goals_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = listrem(&["translate", corpus("partition.fun").to_str().unwrap(), "-o", d]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let program = std::fs::read_to_string(dir.path().join("partition.chc")).unwrap();
    assert_eq!(clause_lines(&program), 9);
    for g in ["G1", "G2"] {
        let goal = std::fs::read_to_string(dir.path().join(format!("partition.{g}.chc"))).unwrap();
        assert!(goal.starts_with(&format!("{g}. false :-")), "{goal}");
    }
    let manifest = std::fs::read_to_string(dir.path().join("partition.lemmas")).unwrap();
    assert_eq!(clause_lines(&manifest), 2);
    assert!(manifest.contains("==> all_leq("));
}

#[test]
fn auto_transform_of_partition_goal() {
    let out = listrem(&["transform", corpus("partition.fun").to_str().unwrap(), "--goal", "G2", "--auto"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let clauses = text(&out.stdout);
    assert_eq!(clause_lines(&clauses), 3, "{clauses}");
    assert!(!clauses.contains('['));
}

#[test]
fn transform_needs_a_mode() {
    let out = listrem(&["transform", corpus("partition.fun").to_str().unwrap(), "--goal", "G2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frozen_session_replays_to_the_same_clauses() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("session.script");
    let program = corpus("partition.fun");
    let mut child = Command::new(env!("CARGO_BIN_EXE_listrem"))
        .args(["repl", program.to_str().unwrap(), "--goal", "G2"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    let input = format!("unfold c0 1\nundo\nauto\nfreeze {}\nquit\n", script.display());
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("wrote"), "{}", text(&out.stdout));
    let replay = listrem(&[
        "transform",
        program.to_str().unwrap(),
        "--goal",
        "G2",
        "--script",
        script.to_str().unwrap(),
    ]);
    let auto = listrem(&["transform", program.to_str().unwrap(), "--goal", "G2", "--auto"]);
    assert!(replay.status.success(), "{}", text(&replay.stderr));
    assert_eq!(text(&replay.stdout), text(&auto.stdout));
}

#[test]
fn oracle_check_finds_only_real_violations() {
    let program = corpus("partition.fun");
    let ok = listrem(&["oracle-check", program.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", text(&ok.stdout));
    let dir = tempfile::tempdir().unwrap();
    let goals = dir.path().join("bad.chc");
    std::fs::write(&goals, "Bad. false :- B=true, partition(X,L,L1,L2), all_leq(X,L1,B).\n").unwrap();
    let bad = listrem(&[
        "oracle-check",
        program.to_str().unwrap(),
        "--goals",
        goals.to_str().unwrap(),
        "--goal",
        "Bad",
        "--bounds",
        "0,2,2",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(text(&bad.stdout).contains("Bad: violated by"), "{}", text(&bad.stdout));
}

#[test]
fn check_model_exit_codes() {
    let set = corpus("t_g2.chc");
    let good = listrem(&["check-model", set.to_str().unwrap(), corpus("t_g2.model").to_str().unwrap()]);
    assert_eq!(good.status.code(), Some(0));
    let trivial = listrem(&["check-model", set.to_str().unwrap(), corpus("t_g2_trivial.model").to_str().unwrap()]);
    assert_eq!(trivial.status.code(), Some(1));
    assert_eq!(text(&trivial.stdout).matches("INVALID").count(), 1);
}

#[test]
fn solve_without_solver_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_listrem"))
        .args(["solve", corpus("t_g2.chc").to_str().unwrap()])
        .env_remove("CHC_SOLVER_CMD")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("CHC_SOLVER_CMD"));
}

#[test]
fn missing_plan_is_a_usage_error() {
    let out = listrem(&["verify", "/nonexistent/plan", "--solver", "true"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_partition_plan() {
    if solver().is_none() {
        eprintln!("skipped: CHC_SOLVER_CMD not set");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let out = listrem(&["verify", corpus("partition.plan").to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}{}", text(&out.stdout), text(&out.stderr));
    let records = std::fs::read_to_string(report).unwrap();
    assert_eq!(records.lines().filter(|l| l.contains("verdict=sat")).count(), 2, "{records}");
}

#[test]
fn missing_script_fails_its_goal_only() {
    if solver().is_none() {
        eprintln!("skipped: CHC_SOLVER_CMD not set");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus("partition.fun"), dir.path().join("partition.fun")).unwrap();
    let plan = dir.path().join("p.plan");
    std::fs::write(&plan, "program partition.fun\nG1\nG2 script nowhere.script\n").unwrap();
    let out = listrem(&["verify", plan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = text(&out.stdout);
    assert!(report.contains("G1       sat"), "{report}");
    assert!(report.contains("G2       failed"), "{report}");
}
