//! External CHC solver invocation and candidate model checking.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use thiserror::Error;
use wait_timeout::ChildExt;

use crate::engine::{self, SatVerdict};
use crate::model::{is_list_free, Atom, AtomicConstraint, Clause, ClauseSet, Constraint, ModelError, Subst};
use crate::syntax::smtlib::{emit_smtlib_horn, parse_solver_output, EmitError, SolverVerdict};
use crate::syntax::{parse_clause_in, ParseError};

pub const SOLVER_ENV: &str = "CHC_SOLVER_CMD";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Command template. `{file}` is replaced by the path of the SMT-LIB
    /// file; without a placeholder the path is appended.
    pub command: String,
    pub timeout: Duration,
    /// Directory where `.smt2` files are kept instead of being deleted.
    pub keep_temps: Option<PathBuf>,
}

impl SolverConfig {
    pub fn new(command: impl Into<String>) -> Self {
        SolverConfig { command: command.into(), timeout: Duration::from_secs(60), keep_temps: None }
    }

    /// Reads the command from `CHC_SOLVER_CMD`, if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()).map(SolverConfig::new)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("clause set still mentions lists")]
    NotListFree,
    #[error("zero timeout")]
    ZeroTimeout,
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("bad solver command `{0}`")]
    BadCommand(String),
    #[error("cannot run solver `{command}`: {source}")]
    Launch { command: String, source: std::io::Error },
    #[error("temporary file: {0}")]
    TempFile(std::io::Error),
}

static COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Clauses whose head repeats in their body are left out of the query: they
/// do not change the least model, and Spacer can stall on them.
pub fn solve(cs: &ClauseSet, cfg: &SolverConfig) -> Result<SolverVerdict, SolveError> {
    if !is_list_free(cs) {
        return Err(SolveError::NotListFree);
    }
    if cfg.timeout.is_zero() {
        return Err(SolveError::ZeroTimeout);
    }
    let mut query = cs.clone();
    query.clauses.retain(|c| !c.is_tautology());
    let text = emit_smtlib_horn(&query)?;
    let (path, _guard) = match &cfg.keep_temps {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(SolveError::TempFile)?;
            let n = COUNTER.fetch_add(1, Ordering::SeqCst);
            let p = dir.join(format!("query-{}-{n}.smt2", std::process::id()));
            std::fs::write(&p, &text).map_err(SolveError::TempFile)?;
            (p, None)
        }
        None => {
            let f = tempfile::Builder::new().suffix(".smt2").tempfile().map_err(SolveError::TempFile)?;
            std::fs::write(f.path(), &text).map_err(SolveError::TempFile)?;
            (f.path().to_path_buf(), Some(f))
        }
    };
    run_solver(&cfg.command, &path, cfg.timeout)
}

fn run_solver(template: &str, path: &std::path::Path, timeout: Duration) -> Result<SolverVerdict, SolveError> {
    let file = path.display().to_string();
    let mut words = shlex::split(template).filter(|w| !w.is_empty()).ok_or_else(|| SolveError::BadCommand(template.into()))?;
    if words.is_empty() {
        return Err(SolveError::BadCommand(template.into()));
    }
    if words.iter().any(|w| w.contains("{file}")) {
        for w in &mut words {
            *w = w.replace("{file}", &file);
        }
    } else {
        words.push(file);
    }
    let launch = |source| SolveError::Launch { command: template.to_string(), source };
    let mut child = Command::new(&words[0])
        .args(&words[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(launch)?;
    let mut stdout = child.stdout.take().expect("piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    match child.wait_timeout(timeout).map_err(launch)? {
        Some(_) => {
            let out = reader.join().unwrap_or_default();
            Ok(parse_solver_output(&out))
        }
        None => {
            let _ = child.kill();
            let _ = child.wait();
            Ok(SolverVerdict::Unknown(format!("timeout after {}s", timeout.as_secs_f64())))
        }
    }
}

/// Interpretation of one predicate as a disjunction of constraints over its
/// formal arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub params: Vec<String>,
    pub disjuncts: Vec<Constraint>,
}

pub type Model = BTreeMap<String, Interpretation>;

#[derive(Debug, Error)]
pub enum ModelCheckError {
    #[error("model has no interpretation for {0}")]
    MissingPredicate(String),
    #[error("model line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("model for {0} mentions variables other than its arguments")]
    ForeignVariable(String),
    #[error("clause {0} expands to more than {1} conjunctive queries")]
    TooLarge(usize, usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Reads a model, one predicate per line:
/// `pl(A,B) := A=true, B>=0 ; A=false.` with `;` between disjuncts. A
/// disjunct `true` is the empty conjunction, and `false` alone is the empty
/// disjunction. Lines starting with `%` or `#` are comments.
pub fn parse_model(text: &str, context: &ClauseSet) -> Result<Model, ModelCheckError> {
    let mut model = Model::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| ModelCheckError::Syntax { line: n + 1, message: message.into() };
        let (head, body) = line.split_once(":=").ok_or_else(|| err("expected `:=`"))?;
        let body = body.trim().strip_suffix('.').ok_or_else(|| err("missing final `.`"))?;
        let head = head.trim();
        let mut params = Vec::new();
        let mut disjuncts = Vec::new();
        let mut pred = String::new();
        for d in body.split(';').map(str::trim) {
            let text = match d {
                "true" => format!("{head}."),
                "false" => continue,
                _ => format!("{head} :- {d}."),
            };
            let c = parse_clause_in(&text, context)?;
            if !c.body.is_empty() {
                return Err(err("model formulas take constraints only"));
            }
            let h = c.head.ok_or_else(|| err("missing predicate"))?;
            pred = h.pred.clone();
            params = h.args.iter().map(|t| t.as_var().map(|v| v.name.clone())).collect::<Option<Vec<_>>>()
                .ok_or_else(|| err("arguments must be variables"))?;
            disjuncts.push(c.constraint);
        }
        if pred.is_empty() {
            let c = parse_clause_in(&format!("{head}."), context)?;
            let h = c.head.ok_or_else(|| err("missing predicate"))?;
            pred = h.pred.clone();
            params = h.args.iter().filter_map(|t| t.as_var().map(|v| v.name.clone())).collect();
        }
        model.insert(pred, Interpretation { params, disjuncts });
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseReport {
    pub index: usize,
    pub clause: String,
    pub validity: Validity,
}

impl fmt::Display for ClauseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.validity {
            Validity::Valid => "valid",
            Validity::Invalid => "INVALID",
            Validity::Unknown => "unknown",
        };
        write!(f, "{:>3} {v:<8} {}", self.index + 1, self.clause)
    }
}

/// Upper bound on conjunctive queries per clause.
pub const QUERY_CAP: usize = 100_000;

fn instantiate(m: &Model, a: &Atom) -> Result<Vec<Constraint>, ModelCheckError> {
    let interp = m.get(&a.pred).ok_or_else(|| ModelCheckError::MissingPredicate(a.pred.clone()))?;
    let s: Subst = interp.params.iter().cloned().zip(a.args.iter().cloned()).collect();
    interp.disjuncts.iter().map(|d| Ok(d.substitute(&s)?)).collect()
}

fn negate(a: &AtomicConstraint) -> Vec<Vec<AtomicConstraint>> {
    match a {
        AtomicConstraint::Lin { rel, lhs, rhs } => {
            vec![vec![AtomicConstraint::Lin { rel: rel.negate(), lhs: lhs.clone(), rhs: rhs.clone() }]]
        }
        AtomicConstraint::BoolBind { var, value } => vec![vec![AtomicConstraint::bind(var.clone(), !value)]],
        AtomicConstraint::BoolEq { lhs, rhs } => vec![
            vec![AtomicConstraint::bind(lhs.clone(), true), AtomicConstraint::bind(rhs.clone(), false)],
            vec![AtomicConstraint::bind(lhs.clone(), false), AtomicConstraint::bind(rhs.clone(), true)],
        ],
    }
}

/// Conjunction of DNFs, as a DNF.
fn product(parts: &[Vec<Vec<AtomicConstraint>>], cap: usize) -> Option<Vec<Vec<AtomicConstraint>>> {
    let mut acc: Vec<Vec<AtomicConstraint>> = vec![vec![]];
    for p in parts {
        if acc.len().saturating_mul(p.len()) > cap {
            return None;
        }
        acc = acc
            .iter()
            .flat_map(|a| p.iter().map(move |b| a.iter().chain(b).cloned().collect()))
            .collect();
    }
    Some(acc)
}

fn check_clause(c: &Clause, m: &Model) -> Result<Validity, ModelCheckError> {
    let mut parts: Vec<Vec<Vec<AtomicConstraint>>> = vec![vec![c.constraint.conjuncts.clone()]];
    for a in &c.body {
        parts.push(instantiate(m, a)?.into_iter().map(|d| d.conjuncts).collect());
    }
    if let Some(h) = &c.head {
        // Not (d1 or d2 ...) is the conjunction of the negated disjuncts,
        // each of which is a disjunction of negated conjuncts.
        for d in instantiate(m, h)? {
            parts.push(d.conjuncts.iter().flat_map(negate).collect());
        }
    }
    let queries = product(&parts, QUERY_CAP).ok_or(ModelCheckError::TooLarge(0, QUERY_CAP))?;
    let mut unknown = false;
    for q in queries {
        match engine::is_sat(&Constraint::new(q)) {
            SatVerdict::Unsat => {}
            SatVerdict::Sat => return Ok(Validity::Invalid),
            SatVerdict::Unknown => unknown = true,
        }
    }
    Ok(if unknown { Validity::Unknown } else { Validity::Valid })
}

/// Decides, clause by clause, whether replacing every atom by its
/// interpretation gives a valid implication.
pub fn check_model(cs: &ClauseSet, m: &Model) -> Result<Vec<ClauseReport>, ModelCheckError> {
    for (p, interp) in m {
        for d in &interp.disjuncts {
            if d.vars().keys().any(|v| !interp.params.contains(v)) {
                return Err(ModelCheckError::ForeignVariable(p.clone()));
            }
        }
    }
    cs.clauses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let validity = check_clause(c, m).map_err(|e| match e {
                ModelCheckError::TooLarge(_, cap) => ModelCheckError::TooLarge(i + 1, cap),
                e => e,
            })?;
            Ok(ClauseReport { index: i, clause: c.to_string(), validity })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_chc;

    const T_G2: &str = "pl(A,B) :- A=true, B>=0.\npl(A,B) :- B>=0, pl(A,B).\nfalse :- A=false, pl(A,B).\n";

    fn verdicts(cs: &str, model: &str) -> Vec<Validity> {
        let cs = parse_chc(cs).unwrap();
        let m = parse_model(model, &cs).unwrap();
        check_model(&cs, &m).unwrap().into_iter().map(|r| r.validity).collect()
    }

    #[test]
    fn partition_model_is_valid() {
        assert_eq!(verdicts(T_G2, "pl(A,B) := A=true, B>=0."), vec![Validity::Valid; 3]);
    }

    #[test]
    fn trivial_model_fails_the_goal() {
        assert_eq!(verdicts(T_G2, "pl(A,B) := true."), vec![Validity::Valid, Validity::Valid, Validity::Invalid]);
    }

    #[test]
    fn fact_model() {
        assert_eq!(verdicts("p(0).", "p(X) := X=0."), vec![Validity::Valid]);
        assert_eq!(verdicts("p(0).", "p(X) := false."), vec![Validity::Invalid]);
        assert_eq!(verdicts("p(0).", "p(X) := X=<0 ; X>=5."), vec![Validity::Valid]);
    }

    #[test]
    fn missing_predicate_is_an_error() {
        let cs = parse_chc(T_G2).unwrap();
        let e = check_model(&cs, &Model::new()).unwrap_err();
        assert!(matches!(e, ModelCheckError::MissingPredicate(p) if p == "pl"));
    }

    #[test]
    fn lists_are_refused() {
        let cs = parse_chc("p([X|Xs]) :- p(Xs).").unwrap();
        assert!(matches!(solve(&cs, &SolverConfig::new("true")), Err(SolveError::NotListFree)));
    }

    #[test]
    fn missing_binary_is_a_launch_error() {
        let cs = parse_chc(T_G2).unwrap();
        let cfg = SolverConfig::new("/nonexistent/solver {file}");
        assert!(matches!(solve(&cs, &cfg), Err(SolveError::Launch { .. })));
    }

    #[test]
    fn timeout_gives_unknown() {
        let cs = parse_chc(T_G2).unwrap();
        let mut cfg = SolverConfig::new("sleep 5");
        cfg.timeout = Duration::from_millis(200);
        assert!(matches!(solve(&cs, &cfg).unwrap(), SolverVerdict::Unknown(_)));
    }

    #[test]
    fn canned_output_is_parsed() {
        let cs = parse_chc(T_G2).unwrap();
        assert_eq!(solve(&cs, &SolverConfig::new("sh -c 'echo unsat' {file}")).unwrap(), SolverVerdict::Unsat);
        assert!(solve(&cs, &SolverConfig::new("sh -c 'echo sat' {file}")).unwrap().is_sat());
    }
}
