use super::ast::{Expr, Type};
use super::*;
use crate::matching::clause_equivalent;
use crate::model::{Clause, ClauseSet};
use crate::syntax::{parse_chc, parse_clause_in};
use crate::transform::tests::PARTITION;

pub(crate) const PARTITION_SRC: &str = include_str!("../../../../corpus/partition.fun");
pub(crate) const QUICKSORT_SRC: &str = include_str!("../../../../corpus/quicksort.fun");

const QUICKSORT_CHC: &str = "
quicksort([],[]).
quicksort([X|Xs],Ys) :- X>=0, partition(X,Xs,Littles,Bigs), quicksort(Littles,Ls), quicksort(Bigs,Bs), append(Ls,[X|Bs],Ys).
append([],Xs,Xs).
append([X|Xs],Ys,[X|Zs]) :- X>=0, append(Xs,Ys,Zs).
count(X,[],N) :- X>=0, N=0.
count(X,[Y|Ys],N) :- X>=0, X=Y, N=M+1, count(X,Ys,M).
count(X,[Y|Ys],N) :- X>=0, Y>=0, X=\\=Y, N=M, count(X,Ys,M).
isSorted(A,[],B) :- A>=0, B=true.
isSorted(A,[X|Xs],B) :- X>=0, A>X, B=false.
isSorted(A,[X|Xs],B) :- A>=0, A=<X, isSorted(X,Xs,B).
";

const QUICKSORT_GOALS: &[(&str, &str)] = &[
    ("G1", "false :- B=false, partition(X,L,L1,L2), all_grt(X,L1,B)."),
    ("G2", "false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B)."),
    ("G3", "false :- B1=true, B2=false, all_grt(A,B,B1), quicksort(B,C), all_grt(A,C,B2)."),
    ("G4", "false :- B1=true, B2=false, all_leq(A,B,B1), quicksort(B,C), all_leq(A,C,B2)."),
    ("G5", "false :- B1=false, quicksort(L,S), isSorted(0,S,B1)."),
    ("G6", "false :- N1=/=N2, count(X,L,N1), quicksort(L,S), count(X,S,N2)."),
    (
        "G7",
        "false :- B1=true, B2=true, B3=true, B4=true, B5=false, all_grt(X,Xs,B1), isSorted(0,Xs,B2), \
         all_leq(X,Ys,B3), isSorted(0,Ys,B4), append(Xs,[X|Ys],Zs), isSorted(0,Zs,B5).",
    ),
    ("G7_nil", "false :- B1=true, B2=false, isSorted(0,L,B1), append(L,[],S), isSorted(0,S,B2)."),
];

/// Every clause of `got` is equivalent to a distinct clause of `want`.
fn same_clauses(got: &[Clause], want: &[Clause]) {
    assert_eq!(got.len(), want.len(), "got:\n{}", got.iter().map(|c| format!("{c}\n")).collect::<String>());
    let mut used = vec![false; want.len()];
    for g in got {
        let hit = want.iter().enumerate().position(|(i, w)| !used[i] && clause_equivalent(g, w));
        match hit {
            Some(i) => used[i] = true,
            None => panic!("no counterpart for {g}"),
        }
    }
}

fn program(src: &str) -> ClauseSet {
    translate_program(&parse_source(src).unwrap()).unwrap()
}

#[test]
fn parses_partition() {
    let fs = parse_source(PARTITION_SRC).unwrap();
    let names: Vec<&str> = fs.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["all_grt", "all_leq", "partition"]);
    assert!(fs[2].ensuring.is_some());
    assert_eq!(fs[2].ret, Type::Tuple(vec![Type::List, Type::List]));
    assert!(fs[0].ensuring.is_none());
}

#[test]
fn parses_quicksort() {
    let fs = parse_source(QUICKSORT_SRC).unwrap();
    let names: Vec<&str> = fs.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["all_grt", "all_leq", "partition", "quicksort", "append", "count", "isSorted"]);
    assert!(fs[4].require.is_some());
}

#[test]
fn rejects_bare_function_name() {
    let err = parse_source("def f(x: Nat): Nat = f").unwrap_err();
    assert!(matches!(err, FrontendError::Unsupported { .. }), "{err}");
    assert!(err.to_string().contains("must be applied"));
}

#[test]
fn rejects_type_parameters() {
    assert!(parse_source("def f[A](x: A): A = x").is_err());
    assert!(parse_source("def f(x: List[Int]): Nat = 0").is_err());
}

#[test]
fn reports_position() {
    let err = parse_source("def f(x: Nat): Nat =\n  x +").unwrap_err();
    assert!(err.to_string().contains(":2:"), "{err}");
}

#[test]
fn identity() {
    let cs = program("def id(x: Nat): Nat = x");
    assert_eq!(cs.clauses.len(), 1);
    assert_eq!(cs.clauses[0].to_string(), "id(X,X) :- X>=0.");
}

#[test]
fn partition_translation_matches_expected() {
    let got = program(PARTITION_SRC);
    let want = parse_chc(PARTITION).unwrap();
    assert_eq!(got.signatures, want.signatures);
    same_clauses(&got.clauses, &want.clauses);
}

#[test]
fn quicksort_translation_matches_expected() {
    let got = program(QUICKSORT_SRC);
    let mut want = parse_chc(PARTITION).unwrap();
    want.extend(&parse_chc(QUICKSORT_CHC).unwrap()).unwrap();
    same_clauses(&got.clauses, &want.clauses);
}

#[test]
fn goals_match_expected() {
    let fs = parse_source(QUICKSORT_SRC).unwrap();
    let cs = translate_program(&fs).unwrap();
    let (goals, lemmas) = translate_contracts(&fs).unwrap();
    let tags: Vec<&str> = goals.iter().map(|g| g.tag.as_deref().unwrap()).collect();
    let want_tags: Vec<&str> = QUICKSORT_GOALS.iter().map(|(t, _)| *t).collect();
    assert_eq!(tags, want_tags);
    for (g, (tag, text)) in goals.iter().zip(QUICKSORT_GOALS) {
        let want = parse_clause_in(text, &cs).unwrap();
        assert!(clause_equivalent(g, &want), "{tag}: got {g}");
        assert!(g.is_goal());
    }
    let names: Vec<&str> = lemmas.iter().map(|l| l.name.as_str()).collect();
    assert_eq!(names, want_tags);
    assert_eq!(lemmas[2].conclusion.to_string(), "all_grt(A,S,true)");
    assert_eq!(lemmas[5].conclusion.pred, "count");
}

#[test]
fn no_contract_no_goals() {
    let (goals, lemmas) = translate_contracts(&parse_source("def id(x: Nat): Nat = x").unwrap()).unwrap();
    assert!(goals.is_empty() && lemmas.is_empty());
}

#[test]
fn contracts_only_use_catamorphisms() {
    let src = format!("{PARTITION_SRC}\ndef f(l: List[Nat]): Nat = 0 ensuring {{ res => partition(0, l) == res }}");
    let err = translate_contracts(&parse_source(&src).unwrap()).unwrap_err();
    assert!(err.to_string().contains("not a catamorphism"), "{err}");
}

#[test]
fn catamorphisms_recognized_exactly() {
    let fs = parse_source(QUICKSORT_SRC).unwrap();
    let catas: Vec<&str> = fs.iter().filter(|f| recognize_cata(f).is_some()).map(|f| f.name.as_str()).collect();
    assert_eq!(catas, ["all_grt", "all_leq", "count", "isSorted"]);
}

#[test]
fn is_sorted_decomposition() {
    let fs = parse_source(QUICKSORT_SRC).unwrap();
    let is_sorted = recognize_cata(fs.iter().find(|f| f.name == "isSorted").unwrap()).unwrap();
    assert_eq!(is_sorted.base, Expr::Bool(true));
    assert_eq!(is_sorted.update, vec![Expr::Var("x".into())]);
    let count = recognize_cata(fs.iter().find(|f| f.name == "count").unwrap()).unwrap();
    assert_eq!(count.base, Expr::Int(0));
    assert_eq!(count.update, vec![Expr::Var("a".into())]);
    assert_eq!(count.params, ["a"]);
}

#[test]
fn rejects_non_structural_recursion() {
    let src = "def f(a: Nat, l: List[Nat]): Nat = { l match { case Nil() => 0 case Cons(x, xs) => f(a, l) } }";
    let fs = parse_source(src).unwrap();
    assert!(recognize_cata(&fs[0]).is_none());
}

#[test]
fn empty_source_has_no_definitions() {
    let err = translate(&parse_source("// nothing here\n").unwrap()).unwrap_err();
    assert_eq!(err.to_string(), "no definitions");
}
