//! Derivation state for the list-removal transformation, driven either by
//! scripts of primitive commands or by the automatic strategy.

mod auto;
mod script;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use auto::{auto_define, Proposal};
pub use script::{Command, Script, ScriptError};

use crate::model::{Clause, ClauseSet, NameSupply, Sort, Term};
use crate::syntax::parse_clause_in;
use crate::transform::{
    self, infer_catamorphisms, CataSpec, DefStatus, Definition, Functionality, Lemma, TransformError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_iterations: usize,
    pub max_definitions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_iterations: 50, max_definitions: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkClause {
    pub id: String,
    pub clause: Clause,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("`{command}`: {source}")]
    Transform { command: String, source: TransformError },
    #[error("`{command}`: {message}")]
    Command { command: String, message: String },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("definition limit {0} reached")]
    DefinitionLimit(usize),
    #[error("no rule applies to {0}")]
    Stuck(String),
}

#[derive(Debug, Clone)]
pub struct DerivationState {
    /// The original clauses, goals removed.
    pub program: ClauseSet,
    pub catas: Vec<CataSpec>,
    pub functions: Functionality,
    pub lemmas: Vec<Lemma>,
    pub defs: Vec<Definition>,
    /// Clauses still to be processed, in order.
    pub work: Vec<WorkClause>,
    /// Finished list-free clauses.
    pub tg: Vec<Clause>,
    pub trace: Vec<Command>,
    pub names: NameSupply,
    pub limits: Limits,
    pub iterations: usize,
    next_id: usize,
}

fn command_error(cmd: &Command, message: impl Into<String>) -> StrategyError {
    StrategyError::Command { command: cmd.to_string(), message: message.into() }
}

impl DerivationState {
    pub fn new(program: &ClauseSet, goal: Clause, lemmas: Vec<Lemma>) -> DerivationState {
        let mut p = ClauseSet { signatures: program.signatures.clone(), clauses: Vec::new() };
        p.clauses = program.clauses.iter().filter(|c| !c.is_goal()).cloned().collect();
        let catas = infer_catamorphisms(&p);
        let functions = Functionality::infer(&p, &catas);
        DerivationState {
            program: p,
            catas,
            functions,
            lemmas,
            defs: Vec::new(),
            work: vec![WorkClause { id: "c0".into(), clause: goal }],
            tg: Vec::new(),
            trace: Vec::new(),
            names: NameSupply::new(),
            limits: Limits::default(),
            iterations: 0,
            next_id: 1,
        }
    }

    pub fn with_functions(mut self, functions: Functionality) -> Self {
        self.functions = functions;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub(crate) fn cata_names(&self) -> BTreeSet<String> {
        self.catas.iter().map(|c| c.pred.clone()).collect()
    }

    /// Program signatures plus those of the definitions, for parsing.
    pub fn context(&self) -> ClauseSet {
        let mut cs = ClauseSet { signatures: self.program.signatures.clone(), clauses: Vec::new() };
        for d in &self.defs {
            let _ = cs.declare(d.pred(), d.head().sorts());
        }
        cs
    }

    pub fn taken_names(&self) -> BTreeSet<String> {
        let mut t: BTreeSet<String> = self.program.signatures.keys().cloned().collect();
        t.extend(self.defs.iter().map(|d| d.pred().to_string()));
        t
    }

    /// Clauses used for unfolding: the program and the unused definitions.
    fn unfold_program(&self) -> ClauseSet {
        let mut cs = self.program.clone();
        for d in self.defs.iter().filter(|d| d.status == DefStatus::Unused) {
            let _ = cs.push(d.clause.clone());
        }
        cs
    }

    pub fn def(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.pred() == name)
    }

    pub fn clause(&self, id: &str) -> Option<&Clause> {
        self.work.iter().find(|w| w.id == id).map(|w| &w.clause)
    }

    fn position(&self, cmd: &Command, id: &str) -> Result<usize, StrategyError> {
        self.work.iter().position(|w| w.id == id).ok_or_else(|| command_error(cmd, format!("no work clause {id}")))
    }

    fn fresh_id(&mut self) -> String {
        let id = format!("c{}", self.next_id);
        self.next_id += 1;
        id
    }

    pub fn is_finished(&self) -> bool {
        self.work.is_empty()
    }

    /// The transformed clauses as a set.
    pub fn result(&self) -> Result<ClauseSet, StrategyError> {
        ClauseSet::from_clauses(self.tg.clone())
            .map_err(|e| StrategyError::Transform { command: "result".into(), source: e.into() })
    }

    /// The clause set whose least model the derivation preserves on the
    /// original predicates: program, unused definitions, non-goal work
    /// clauses and non-goal transformed clauses.
    pub fn semantic_snapshot(&self) -> ClauseSet {
        let mut cs = self.program.clone();
        for d in self.defs.iter().filter(|d| d.status == DefStatus::Unused) {
            let _ = cs.push(d.clause.clone());
        }
        for c in self.work.iter().map(|w| &w.clause).chain(&self.tg) {
            if !c.is_goal() {
                let _ = cs.push(c.clone());
            }
        }
        cs
    }

    /// Applies a command and records it in the trace. `auto` records the
    /// primitive commands it issues instead of itself.
    pub fn apply(&mut self, cmd: &Command) -> Result<(), StrategyError> {
        if *cmd == Command::Auto {
            return self.run_auto();
        }
        self.execute(cmd)?;
        self.trace.push(cmd.clone());
        Ok(())
    }

    pub fn run_script(&mut self, script: &Script) -> Result<(), StrategyError> {
        for cmd in &script.commands {
            self.apply(cmd)?;
        }
        Ok(())
    }

    fn execute(&mut self, cmd: &Command) -> Result<(), StrategyError> {
        let tx = |e: TransformError| StrategyError::Transform { command: cmd.to_string(), source: e };
        let cata_names = self.cata_names();
        let is_cata = |p: &str| cata_names.contains(p);
        match cmd {
            Command::Define(text) => {
                let c = parse_clause_in(text, &self.context()).map_err(|e| command_error(cmd, e.to_string()))?;
                let head = c.head.clone().ok_or_else(|| command_error(cmd, "a definition needs a head"))?;
                let mut head_vars = Vec::new();
                for t in &head.args {
                    match t.as_var() {
                        Some(v) => head_vars.push(v.name.clone()),
                        None => return Err(command_error(cmd, "definition heads take variables only")),
                    }
                }
                let d = transform::define(&c.constraint, &c.body, &head_vars, &head.pred, &self.taken_names())
                    .map_err(tx)?;
                self.defs.push(d);
            }
            Command::UnfoldDef { def, atom } => {
                let k = self.defs.iter().position(|d| d.pred() == def).ok_or_else(|| command_error(cmd, format!("no definition {def}")))?;
                if self.defs[k].status != DefStatus::Unused {
                    return Err(command_error(cmd, format!("{def} is already unfolded")));
                }
                let clause = self.defs[k].clause.clone();
                let i = match atom {
                    Some(i) => *i,
                    None => auto::select_unfold_atom(&clause, &is_cata)
                        .ok_or_else(|| command_error(cmd, "definition body has no atom"))?,
                };
                let mut prog = self.unfold_program();
                prog.clauses.retain(|c| c.head.as_ref().map(|h| h.pred.as_str()) != Some(def.as_str()));
                let out = transform::unfold(&clause, i, &prog, &mut self.names).map_err(tx)?;
                self.defs[k].status = DefStatus::Unfolded;
                for c in out {
                    let id = self.fresh_id();
                    self.work.push(WorkClause { id, clause: c });
                }
            }
            Command::Unfold { clause, atom } => {
                let pos = self.position(cmd, clause)?;
                let out = transform::unfold(&self.work[pos].clause, *atom, &self.unfold_program(), &mut self.names)
                    .map_err(tx)?;
                let fresh: Vec<WorkClause> =
                    out.into_iter().map(|c| WorkClause { id: self.fresh_id(), clause: c }).collect();
                self.work.splice(pos..=pos, fresh);
            }
            Command::Fold { clause, def, mode, pins } => {
                let pos = self.position(cmd, clause)?;
                let d = self.def(def).ok_or_else(|| command_error(cmd, format!("no definition {def}")))?;
                let r = transform::fold(&self.work[pos].clause, d, *mode, pins.as_deref(), &is_cata).map_err(tx)?;
                self.work[pos].clause = r;
            }
            Command::Lemma { clause, lemma, pins } => {
                let pos = self.position(cmd, clause)?;
                let l = self
                    .lemmas
                    .iter()
                    .find(|l| l.name == *lemma)
                    .ok_or_else(|| command_error(cmd, format!("no lemma {lemma}")))?;
                let r = transform::apply_lemma(&self.work[pos].clause, l, pins.as_deref(), &is_cata).map_err(tx)?;
                self.work[pos].clause = r;
            }
            Command::Total { clause, pred, params, list } => {
                let pos = self.position(cmd, clause)?;
                let spec = self
                    .catas
                    .iter()
                    .find(|s| s.pred == *pred)
                    .ok_or_else(|| command_error(cmd, format!("{pred} is not a catamorphism")))?
                    .clone();
                let c = &self.work[pos].clause;
                let sorts = c.var_sorts();
                let terms = params
                    .iter()
                    .map(|p| parse_scalar(p, &sorts))
                    .collect::<Option<Vec<Term>>>()
                    .ok_or_else(|| command_error(cmd, "bad parameter"))?;
                if terms.len() != spec.params.len() {
                    return Err(command_error(cmd, format!("{pred} takes {} parameters", spec.params.len())));
                }
                let list_term = match sorts.get(list) {
                    Some(s) if s.is_list() => Term::var(list.clone(), s.clone()),
                    _ => return Err(command_error(cmd, format!("{list} is not a list variable of the clause"))),
                };
                let (r, _) = transform::add_total_cata(c, &spec, &terms, &list_term, &mut self.names).map_err(tx)?;
                self.work[pos].clause = r;
            }
            Command::Remove { clause, anchor, companions } => {
                let pos = self.position(cmd, clause)?;
                let r = transform::remove_true_conjunct(
                    &self.work[pos].clause,
                    *anchor,
                    companions,
                    &self.lemmas,
                    &self.functions,
                )
                .map_err(tx)?;
                self.work[pos].clause = r;
            }
            Command::Cleanup => {
                let clauses: Vec<Clause> = self.work.iter().map(|w| w.clause.clone()).collect();
                let mut kept = transform::cleanup(&clauses);
                self.work.retain(|w| match kept.iter().position(|k| *k == w.clause) {
                    Some(i) => {
                        kept.remove(i);
                        true
                    }
                    None => false,
                });
            }
            Command::Emit { clause } => {
                let pos = self.position(cmd, clause)?;
                if self.work[pos].clause.mentions_list() {
                    return Err(command_error(cmd, "clause still mentions lists"));
                }
                let w = self.work.remove(pos);
                self.tg.push(w.clause);
            }
            Command::Auto => unreachable!("handled by apply"),
        }
        Ok(())
    }
}

fn parse_scalar(text: &str, sorts: &std::collections::BTreeMap<String, Sort>) -> Option<Term> {
    match text {
        "true" => Some(Term::Bool(true)),
        "false" => Some(Term::Bool(false)),
        _ => match text.parse::<i64>() {
            Ok(n) => Some(Term::Int(n)),
            Err(_) => match sorts.get(text) {
                Some(s) if !s.is_list() => Some(Term::var(text, s.clone())),
                _ => None,
            },
        },
    }
}

/// Renders a term as it would be parsed back by `total`.
pub(crate) fn scalar_text(t: &Term) -> String {
    t.to_string()
}

impl fmt::Display for DerivationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "definitions:")?;
        for d in &self.defs {
            let st = if d.status == DefStatus::Unused { "unused" } else { "unfolded" };
            writeln!(f, "  [{st}] {}", d.clause)?;
        }
        writeln!(f, "work:")?;
        for w in &self.work {
            writeln!(f, "  {}: {}", w.id, w.clause)?;
        }
        writeln!(f, "transformed:")?;
        for c in &self.tg {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_chc;
    use crate::transform::tests::PARTITION;

    fn state(goal: &str) -> DerivationState {
        let p = parse_chc(PARTITION).unwrap();
        let g = parse_clause_in(goal, &p).unwrap();
        DerivationState::new(&p, g, vec![])
    }

    const G2: &str = "false :- A=false, partition(X,L,L1,L2), all_leq(X,L2,A).";

    #[test]
    fn auto_removes_lists_from_partition_goal() {
        let mut st = state(G2);
        st.apply(&Command::Auto).unwrap();
        for c in &st.tg {
            println!("{c}");
        }
        println!("{}", Script { commands: st.trace.clone() });
        assert!(st.is_finished());
        assert_eq!(st.tg.len(), 3);
        assert!(st.iterations <= 10);
        assert!(!st.result().unwrap().clauses.iter().any(Clause::mentions_list));
    }

    #[test]
    fn trace_replays_to_the_same_result() {
        let mut st = state(G2);
        st.apply(&Command::Auto).unwrap();
        let mut again = state(G2);
        again.run_script(&Script { commands: st.trace.clone() }).unwrap();
        assert_eq!(again.tg, st.tg);
    }

    #[test]
    fn list_free_goal_is_emitted_unchanged() {
        let mut st = state("false :- X>=1, X=<0.");
        st.apply(&Command::Auto).unwrap();
        assert_eq!(st.tg.len(), 1);
        assert_eq!(st.iterations, 0);
    }

    #[test]
    fn every_step_preserves_the_bounded_model() {
        use crate::oracle::{bounded_lfp, restrict, DomainBounds};
        let mut st = state(G2);
        st.apply(&Command::Auto).unwrap();
        let b = DomainBounds::default();
        let mut replay = state(G2);
        for cmd in st.trace.clone() {
            let preds: BTreeSet<String> = replay.semantic_snapshot().signatures.keys().cloned().collect();
            let before = restrict(&bounded_lfp(&replay.semantic_snapshot(), &b).unwrap(), &preds);
            replay.apply(&cmd).unwrap();
            let after = restrict(&bounded_lfp(&replay.semantic_snapshot(), &b).unwrap(), &preds);
            assert_eq!(before, after, "step `{cmd}` changed the bounded model");
        }
    }
}
