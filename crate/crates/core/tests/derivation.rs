//! Automatic derivations on the quicksort contracts.

use chc_listrem::frontend::{parse_source, translate, Translation};
use chc_listrem::model::ClauseSet;
use chc_listrem::solver::{solve, SolverConfig};
use chc_listrem::strategy::{Command, DerivationState};
use chc_listrem::syntax::SolverVerdict;

const QUICKSORT: &str = include_str!("../../../corpus/quicksort.fun");

/// Lemmas each goal may use. The count goal gets none: with the ordering
/// lemmas in scope its derived set is much harder for the solver.
fn allowed(tag: &str) -> &'static [&'static str] {
    match tag {
        "G1" | "G2" | "G6" => &[],
        "G3" | "G4" => &["G1", "G2"],
        _ => &["G1", "G2", "G3", "G4"],
    }
}

fn derive(t: &Translation, tag: &str) -> ClauseSet {
    let goal = t.goals.iter().find(|g| g.tag.as_deref() == Some(tag)).unwrap().clone();
    let lemmas = t.lemmas.iter().filter(|l| allowed(tag).contains(&l.name.as_str())).cloned().collect();
    let mut st = DerivationState::new(&t.program, goal, lemmas).with_functions(t.functions.clone());
    st.apply(&Command::Auto).unwrap_or_else(|e| panic!("{tag}: {e}"));
    st.result().unwrap()
}

fn quicksort() -> Translation {
    translate(&parse_source(QUICKSORT).unwrap()).unwrap()
}

#[test]
fn every_goal_derives_list_free() {
    let t = quicksort();
    for g in &t.goals {
        let tag = g.tag.as_deref().unwrap();
        let res = derive(&t, tag);
        assert!(res.clauses.iter().all(|c| !c.mentions_list()), "{tag}");
        assert_eq!(res.clauses.iter().filter(|c| c.is_goal()).count(), 1, "{tag}");
    }
}

#[test]
fn sortedness_goal_needs_no_script() {
    let res = derive(&quicksort(), "G5");
    let goal = res.clauses.iter().find(|c| c.is_goal()).unwrap();
    assert_eq!(goal.body.len(), 1, "{goal}");
    assert!(goal.body[0].pred.starts_with("new"));
}

#[test]
fn derived_sets_are_satisfiable() {
    let Some(mut cfg) = SolverConfig::from_env() else {
        eprintln!("skipped: CHC_SOLVER_CMD not set");
        return;
    };
    cfg.timeout = std::time::Duration::from_secs(60);
    let t = quicksort();
    for g in &t.goals {
        let tag = g.tag.as_deref().unwrap();
        let v = solve(&derive(&t, tag), &cfg).unwrap();
        assert!(matches!(v, SolverVerdict::Sat(_)), "{tag}: {v:?}");
    }
}

#[test]
fn broken_contract_derives_unsatisfiable() {
    let Some(cfg) = SolverConfig::from_env() else {
        eprintln!("skipped: CHC_SOLVER_CMD not set");
        return;
    };
    let src = QUICKSORT.replace("isSorted(0, res) &&", "isSorted(1, res) &&");
    let t = translate(&parse_source(&src).unwrap()).unwrap();
    let v = solve(&derive(&t, "G5"), &cfg).unwrap();
    assert_eq!(v, SolverVerdict::Unsat);
}
