//! SMT-LIB2 Horn emission and solver reply parsing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Atom, AtomicConstraint, Clause, ClauseSet, LinExpr, Rel, Sort, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ListMode {
    /// Reject any list-sorted term.
    #[default]
    Reject,
    /// Declare integer lists as an algebraic datatype.
    Adt,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("list-sorted term {0} outside ADT mode")]
    ListTerm(String),
    #[error("sort {0} is not supported by the emitter")]
    UnsupportedSort(Sort),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverVerdict {
    /// Optional model: predicate name to the solver's definition text.
    Sat(Option<BTreeMap<String, String>>),
    Unsat,
    Unknown(String),
}

impl SolverVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolverVerdict::Sat(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolverVerdict::Sat(_) => "sat",
            SolverVerdict::Unsat => "unsat",
            SolverVerdict::Unknown(_) => "unknown",
        }
    }
}

pub fn emit_smtlib_horn(cs: &ClauseSet) -> Result<String, EmitError> {
    emit_smtlib_horn_with(cs, ListMode::Reject)
}

pub fn emit_smtlib_horn_with(cs: &ClauseSet, mode: ListMode) -> Result<String, EmitError> {
    let mut out = String::from("(set-logic HORN)\n");
    if mode == ListMode::Adt {
        out.push_str("(declare-datatypes ((IntList 0)) (((nil) (cons (head Int) (tail IntList)))))\n");
    }
    for (p, sorts) in &cs.signatures {
        let ss: Vec<String> = sorts.iter().map(|s| sort_name(s, mode)).collect::<Result<_, _>>()?;
        writeln!(out, "(declare-fun {} ({}) Bool)", symbol(p), ss.join(" ")).unwrap();
    }
    for c in &cs.clauses {
        writeln!(out, "(assert {})", clause_formula(c, mode)?).unwrap();
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn symbol(name: &str) -> String {
    if name.chars().all(|c| c.is_alphanumeric() || c == '_') && !name.starts_with(|c: char| c.is_ascii_digit()) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn sort_name(s: &Sort, mode: ListMode) -> Result<String, EmitError> {
    match (s, mode) {
        (Sort::Int, _) => Ok("Int".into()),
        (Sort::Bool, _) => Ok("Bool".into()),
        (Sort::List(e), ListMode::Adt) if **e == Sort::Int => Ok("IntList".into()),
        (Sort::List(_), ListMode::Adt) => Err(EmitError::UnsupportedSort(s.clone())),
        (Sort::List(_), ListMode::Reject) => Err(EmitError::ListTerm(s.to_string())),
    }
}

fn term(t: &Term, mode: ListMode) -> Result<String, EmitError> {
    match t {
        Term::Var(v) => {
            if v.sort.is_list() && mode == ListMode::Reject {
                return Err(EmitError::ListTerm(v.name.clone()));
            }
            Ok(symbol(&v.name))
        }
        Term::Int(n) => Ok(int(*n)),
        Term::Bool(b) => Ok(b.to_string()),
        Term::Nil(_) if mode == ListMode::Adt => Ok("nil".into()),
        Term::Cons(h, tl) if mode == ListMode::Adt => Ok(format!("(cons {} {})", term(h, mode)?, term(tl, mode)?)),
        other => Err(EmitError::ListTerm(other.to_string())),
    }
}

fn int(n: i64) -> String {
    if n < 0 {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

fn lin(e: &LinExpr) -> String {
    let mut parts: Vec<String> = e
        .coeffs
        .iter()
        .map(|(v, c)| if *c == 1 { symbol(v) } else { format!("(* {} {})", int(*c), symbol(v)) })
        .collect();
    if e.constant != 0 || parts.is_empty() {
        parts.push(int(e.constant));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn constraint(c: &AtomicConstraint) -> String {
    match c {
        AtomicConstraint::Lin { rel, lhs, rhs } => {
            let (l, r) = (lin(lhs), lin(rhs));
            match rel {
                Rel::Eq => format!("(= {l} {r})"),
                Rel::Ne => format!("(not (= {l} {r}))"),
                Rel::Le => format!("(<= {l} {r})"),
                Rel::Lt => format!("(< {l} {r})"),
                Rel::Ge => format!("(>= {l} {r})"),
                Rel::Gt => format!("(> {l} {r})"),
            }
        }
        AtomicConstraint::BoolBind { var, value } => format!("(= {} {value})", symbol(var)),
        AtomicConstraint::BoolEq { lhs, rhs } => format!("(= {} {})", symbol(lhs), symbol(rhs)),
    }
}

fn atom(a: &Atom, mode: ListMode) -> Result<String, EmitError> {
    if a.args.is_empty() {
        return Ok(symbol(&a.pred));
    }
    let args: Vec<String> = a.args.iter().map(|t| term(t, mode)).collect::<Result<_, _>>()?;
    Ok(format!("({} {})", symbol(&a.pred), args.join(" ")))
}

fn clause_formula(c: &Clause, mode: ListMode) -> Result<String, EmitError> {
    let mut premises: Vec<String> = c.constraint.conjuncts.iter().map(constraint).collect();
    for a in &c.body {
        premises.push(atom(a, mode)?);
    }
    let head = match &c.head {
        Some(h) => atom(h, mode)?,
        None => "false".into(),
    };
    let body = match premises.len() {
        0 => head,
        1 => format!("(=> {} {head})", premises[0]),
        _ => format!("(=> (and {}) {head})", premises.join(" ")),
    };
    let vars = c.var_sorts();
    if vars.is_empty() {
        return Ok(body);
    }
    let decls: Vec<String> = vars
        .iter()
        .map(|(v, s)| Ok(format!("({} {})", symbol(v), sort_name(s, mode)?)))
        .collect::<Result<_, EmitError>>()?;
    Ok(format!("(forall ({}) {body})", decls.join(" ")))
}

/// Maps solver stdout to a verdict. Model extraction is best effort.
pub fn parse_solver_output(text: &str) -> SolverVerdict {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("sat") => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            let defs = extract_definitions(&rest);
            SolverVerdict::Sat(if defs.is_empty() { None } else { Some(defs) })
        }
        Some("unsat") => SolverVerdict::Unsat,
        _ => SolverVerdict::Unknown(text.to_string()),
    }
}

fn extract_definitions(text: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut rest = text;
    while let Some(i) = rest.find("(define-fun ") {
        let start = &rest[i..];
        let mut depth = 0i32;
        let mut end = start.len();
        for (k, ch) in start.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        end = k + 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        let def = &start[..end];
        if let Some(name) = def["(define-fun ".len()..].split_whitespace().next() {
            out.insert(name.trim_matches('|').to_string(), def.to_string());
        }
        rest = &start[end..];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_chc;

    #[test]
    fn t_g2_has_three_assertions() {
        let cs = parse_chc(
            "pl(A,B) :- A=true, B>=0.\npl(A,B) :- B>=0, pl(A,B).\nfalse :- A=false, pl(A,B).",
        )
        .unwrap();
        let s = emit_smtlib_horn(&cs).unwrap();
        assert_eq!(s.matches("(assert (forall").count(), 3);
        assert_eq!(s.matches("(check-sat)").count(), 1);
        assert!(s.starts_with("(set-logic HORN)"));
    }

    #[test]
    fn empty_set_is_header_and_check_sat() {
        let s = emit_smtlib_horn(&ClauseSet::new()).unwrap();
        assert_eq!(s, "(set-logic HORN)\n(check-sat)\n");
    }

    #[test]
    fn ground_fact_has_no_quantifier() {
        let cs = parse_chc("qss(true).").unwrap();
        let s = emit_smtlib_horn(&cs).unwrap();
        assert!(s.contains("(assert (qss true))"), "{s}");
    }

    #[test]
    fn lists_rejected_unless_adt() {
        let cs = parse_chc("p([X|Xs]) :- p(Xs).").unwrap();
        assert!(emit_smtlib_horn(&cs).is_err());
        let s = emit_smtlib_horn_with(&cs, ListMode::Adt).unwrap();
        assert!(s.contains("(cons X Xs)"));
    }

    #[test]
    fn verdicts() {
        assert_eq!(parse_solver_output("sat\n"), SolverVerdict::Sat(None));
        assert_eq!(parse_solver_output("unsat"), SolverVerdict::Unsat);
        assert!(matches!(parse_solver_output("segfault"), SolverVerdict::Unknown(_)));
        let v = parse_solver_output("sat\n(\n (define-fun pl ((x!0 Bool) (x!1 Int)) Bool (and x!0 (>= x!1 0)))\n)");
        match v {
            SolverVerdict::Sat(Some(m)) => assert!(m["pl"].contains(">= x!1 0")),
            other => panic!("{other:?}"),
        }
    }
}
