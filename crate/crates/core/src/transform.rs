//! Transformation rules: definition, unfolding, folding, lemma application,
//! totality-based catamorphism insertion, removal of always-true conjunctions
//! and clause cleanup.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::engine::{self, SatVerdict};
use crate::matching::{self, MatchOptions};
use crate::model::{
    free_vars, rename_apart, Atom, AtomicConstraint, Clause, ClauseSet, Constraint, ModelError, NameSupply, Origin,
    Rel, Sort, Subst, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefStatus {
    Unused,
    Unfolded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub clause: Clause,
    pub status: DefStatus,
}

impl Definition {
    pub fn head(&self) -> &Atom {
        self.clause.head.as_ref().expect("definitions have a head")
    }

    pub fn pred(&self) -> &str {
        &self.head().pred
    }
}

/// `premises, premise_constraint ==> conclusion`, valid in the least model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub name: String,
    pub premises: Vec<Atom>,
    pub premise_constraint: Constraint,
    pub conclusion: Atom,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.premise_constraint.conjuncts.iter().map(|c| c.to_string()).collect();
        parts.extend(self.premises.iter().map(|a| a.to_string()));
        write!(f, "{}: {} ==> {}", self.name, parts.join(", "), self.conclusion)
    }
}

/// A parameterized catamorphism: structural recursion over one list argument
/// with extra parameters and a single integer or boolean output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CataSpec {
    pub pred: String,
    pub params: Vec<usize>,
    pub list_pos: usize,
    pub output_pos: usize,
    pub output_sort: Sort,
    pub total: bool,
}

impl CataSpec {
    pub fn arity(&self) -> usize {
        self.params.len() + 2
    }

    pub fn instantiate(&self, params: &[Term], list: Term, output: Term) -> Atom {
        let mut args = vec![Term::Int(0); self.arity()];
        for (pos, t) in self.params.iter().zip(params) {
            args[*pos] = t.clone();
        }
        args[self.list_pos] = list;
        args[self.output_pos] = output;
        Atom::new(self.pred.clone(), args)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("head variable {0} is list-sorted")]
    ListHeadVar(String),
    #[error("head variable {0} does not occur in the definition body")]
    HeadVarNotInBody(String),
    #[error("predicate name {0} is already in use")]
    NameCollision(String),
    #[error("atom index {index} out of range (body has {len} atoms)")]
    AtomIndex { index: usize, len: usize },
    #[error("predicate {0} has no defining clauses")]
    NoDefiningClauses(String),
    #[error("definition {0} does not match the clause body")]
    NoMatch(String),
    #[error("fold safety: definition {0} is still unused and the clause is one of its own clauses")]
    FoldSafety(String),
    #[error("local-variable escape: {0} occurs outside the folded atoms")]
    LocalEscape(String),
    #[error("folding with {0} would not remove any atom")]
    NoProgress(String),
    #[error("lemma {0}: premises do not match the clause body")]
    NoPremiseMatch(String),
    #[error("goal is not a lemma candidate: {0}")]
    NotALemma(String),
    #[error("{0} is not known to be total")]
    NonTotal(String),
    #[error("list argument {0} does not occur in the clause")]
    ListArgAbsent(String),
    #[error("locality violation: {0} occurs elsewhere in the clause")]
    Locality(String),
    #[error("no lemma justifies {0}")]
    MissingJustification(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Recognizes parameterized catamorphisms among the predicates of `cs`.
pub fn infer_catamorphisms(cs: &ClauseSet) -> Vec<CataSpec> {
    let mut out = Vec::new();
    'pred: for (pred, sig) in &cs.signatures {
        let lists: Vec<usize> = (0..sig.len()).filter(|i| sig[*i].is_list()).collect();
        if lists.len() != 1 || sig.len() < 2 {
            continue;
        }
        let list_pos = lists[0];
        let output_pos = sig.len() - 1;
        if output_pos == list_pos || !matches!(sig[output_pos], Sort::Int | Sort::Bool) {
            continue;
        }
        let clauses: Vec<&Clause> = cs.defining(pred).collect();
        let (mut has_nil, mut has_cons) = (false, false);
        for c in &clauses {
            let head = c.head.as_ref().unwrap();
            match &head.args[list_pos] {
                Term::Nil(_) => {
                    has_nil = true;
                    if !c.body.is_empty() {
                        continue 'pred;
                    }
                }
                Term::Cons(h, t) => {
                    has_cons = true;
                    let (Some(_), Some(tail)) = (h.as_var(), t.as_var()) else { continue 'pred };
                    if c.body.len() > 1 {
                        continue 'pred;
                    }
                    if let Some(b) = c.body.first() {
                        if b.pred != *pred || b.args[list_pos].as_var() != Some(tail) {
                            continue 'pred;
                        }
                    }
                }
                _ => continue 'pred,
            }
        }
        if !(has_nil && has_cons) {
            continue;
        }
        out.push(CataSpec {
            pred: pred.clone(),
            params: (0..sig.len()).filter(|i| *i != list_pos && *i != output_pos).collect(),
            list_pos,
            output_pos,
            output_sort: sig[output_pos].clone(),
            total: true,
        });
    }
    out
}

/// Predicates that denote total functions, with their output positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Functionality {
    outputs: BTreeMap<String, Vec<usize>>,
}

impl Functionality {
    pub fn declare(&mut self, pred: impl Into<String>, outputs: Vec<usize>) {
        self.outputs.insert(pred.into(), outputs);
    }

    pub fn outputs(&self, pred: &str) -> Option<&[usize]> {
        self.outputs.get(pred).map(Vec::as_slice)
    }

    pub fn is_total(&self, pred: &str) -> bool {
        self.outputs.contains_key(pred)
    }

    /// Guesses output positions of the list-manipulating predicates of a
    /// clause set produced by translating total functions. Positions up to
    /// the first list argument are inputs. A later list position is an input
    /// when it is a plain variable in every base clause and is passed through
    /// unchanged to every recursive call.
    pub fn infer(cs: &ClauseSet, catas: &[CataSpec]) -> Functionality {
        let mut f = Functionality::default();
        for c in catas {
            f.declare(c.pred.clone(), vec![c.output_pos]);
        }
        for (pred, sig) in &cs.signatures {
            if f.is_total(pred) {
                continue;
            }
            let Some(first) = sig.iter().position(Sort::is_list) else { continue };
            let clauses: Vec<&Clause> = cs.defining(pred).collect();
            if clauses.is_empty() {
                continue;
            }
            let mut outs = Vec::new();
            for (p, sort) in sig.iter().enumerate().skip(first + 1) {
                let input = sort.is_list()
                    && clauses.iter().all(|c| {
                        let h = &c.head.as_ref().unwrap().args[p];
                        let rec: Vec<&Atom> = c.body.iter().filter(|a| a.pred == *pred).collect();
                        match h.as_var() {
                            None => false,
                            Some(v) => rec.iter().all(|a| a.args[p].as_var() == Some(v)),
                        }
                    });
                if !input {
                    outs.push(p);
                }
            }
            if !outs.is_empty() {
                f.declare(pred.clone(), outs);
            }
        }
        f
    }
}

/// Introduces a definition `name(head_vars) :- constraint, atoms`.
pub fn define(
    constraint: &Constraint,
    atoms: &[Atom],
    head_vars: &[String],
    name: &str,
    taken: &BTreeSet<String>,
) -> Result<Definition, TransformError> {
    if taken.contains(name) {
        return Err(TransformError::NameCollision(name.to_string()));
    }
    let mut sorts = BTreeMap::new();
    for a in atoms {
        a.collect_vars(&mut sorts);
    }
    let mut all = constraint.vars();
    all.extend(sorts.clone());
    let mut args = Vec::new();
    for v in head_vars {
        let sort = sorts.get(v).ok_or_else(|| TransformError::HeadVarNotInBody(v.clone()))?;
        if sort.is_list() {
            return Err(TransformError::ListHeadVar(v.clone()));
        }
        args.push(Term::var(v.clone(), sort.clone()));
    }
    let clause = Clause::new(Some(Atom::new(name, args)), constraint.clone(), atoms.to_vec())
        .with_origin(Origin::Definition);
    Ok(Definition { clause, status: DefStatus::Unused })
}

fn resolve(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match s.get(&v.name) {
            Some(b) => resolve(b, s),
            None => t.clone(),
        },
        Term::Cons(h, tl) => Term::cons(resolve(h, s), resolve(tl, s)),
        _ => t.clone(),
    }
}

/// Unifies list structure syntactically; scalar positions become equality
/// constraints. Variables of `b` are bound in preference to those of `a`.
fn unify(a: &Term, b: &Term, s: &mut Subst, eqs: &mut Vec<AtomicConstraint>) -> bool {
    let (a, b) = (resolve(a, s), resolve(b, s));
    if a == b {
        return true;
    }
    match (&a, &b) {
        (_, Term::Var(v)) if v.sort.is_list() => {
            if a.occurs(&v.name) {
                return false;
            }
            s.insert(v.name.clone(), a.clone());
            true
        }
        (Term::Var(v), _) if v.sort.is_list() => {
            if b.occurs(&v.name) {
                return false;
            }
            s.insert(v.name.clone(), b.clone());
            true
        }
        (Term::Nil(_), Term::Nil(_)) => true,
        (Term::Cons(h1, t1), Term::Cons(h2, t2)) => unify(h1, h2, s, eqs) && unify(t1, t2, s, eqs),
        (Term::Nil(_), Term::Cons(..)) | (Term::Cons(..), Term::Nil(_)) => false,
        _ => match matching::scalar_eq(&a, &b) {
            Ok(Some(k)) => {
                eqs.push(k);
                true
            }
            Ok(None) => true,
            Err(()) => false,
        },
    }
}

/// `Some((x, y))` when the conjunct is an equality between two distinct
/// variables.
fn var_pair(k: &AtomicConstraint) -> Option<(String, String)> {
    match k {
        AtomicConstraint::BoolEq { lhs, rhs } if lhs != rhs => Some((lhs.clone(), rhs.clone())),
        AtomicConstraint::Lin { rel: Rel::Eq, lhs, rhs } => {
            let d = lhs.minus(rhs);
            if d.constant != 0 || d.coeffs.len() != 2 {
                return None;
            }
            let mut it = d.coeffs.iter();
            let (x, cx) = it.next()?;
            let (y, cy) = it.next()?;
            (*cx == -*cy && cx.abs() == 1).then(|| (x.clone(), y.clone()))
        }
        _ => None,
    }
}

/// Propagates variable-variable equalities, projects the constraint onto the
/// atom variables and drops redundant conjuncts. `None` when the constraint
/// is unsatisfiable. Names in `prefer` (and head variables above all) survive
/// equality propagation.
pub fn normalize_clause(c: &Clause, prefer: &BTreeSet<String>) -> Option<Clause> {
    let mut c = c.clone();
    loop {
        let head_vars: BTreeSet<String> = c.head.iter().flat_map(|h| h.vars().into_keys()).collect();
        let found = c.constraint.conjuncts.iter().enumerate().find_map(|(i, k)| {
            var_pair(k).filter(|(a, b)| !(head_vars.contains(a) && head_vars.contains(b))).map(|p| (i, p))
        });
        let Some((i, (a, b))) = found else { break };
        let rank = |v: &String| (head_vars.contains(v), prefer.contains(v), !v.starts_with(NameSupply::PREFIX));
        let (keep, gone) = if rank(&a) >= rank(&b) { (a, b) } else { (b, a) };
        c.constraint.conjuncts.remove(i);
        c = c.rename(&[(gone, keep)].into());
    }
    if engine::is_sat(&c.constraint) == SatVerdict::Unsat {
        return None;
    }
    let atom_vars: BTreeSet<String> = c.atom_vars().into_keys().collect();
    let (inside, outside): (Vec<AtomicConstraint>, Vec<AtomicConstraint>) = c
        .constraint
        .conjuncts
        .iter()
        .cloned()
        .partition(|k| k.collect_vars_set().is_subset(&atom_vars));
    let combined = if outside.is_empty() {
        Constraint::new(inside)
    } else {
        let projected = engine::project(&c.constraint, &atom_vars);
        Constraint::new(projected.conjuncts.into_iter().chain(inside).collect())
    };
    let simplified = engine::simplify(&combined);
    if simplified.conjuncts.iter().any(|k| *k == AtomicConstraint::falsity()) {
        return None;
    }
    c.constraint = simplified;
    Some(c)
}

/// Resolves body atom `index` of `c` against every defining clause of its
/// predicate in `program`. Unsatisfiable resolvents are dropped.
pub fn unfold(
    c: &Clause,
    index: usize,
    program: &ClauseSet,
    names: &mut NameSupply,
) -> Result<Vec<Clause>, TransformError> {
    let atom = c.body.get(index).ok_or(TransformError::AtomIndex { index, len: c.body.len() })?;
    let defining: Vec<&Clause> = program.defining(&atom.pred).collect();
    if defining.is_empty() {
        return Err(TransformError::NoDefiningClauses(atom.pred.clone()));
    }
    let original = free_vars(c);
    let mut out = Vec::new();
    for d in defining {
        let d = rename_apart(d, &original, names);
        let head = d.head.as_ref().unwrap();
        let mut s = Subst::new();
        let mut eqs = Vec::new();
        if !atom.args.iter().zip(&head.args).all(|(a, b)| unify(a, b, &mut s, &mut eqs)) {
            continue;
        }
        let full = |t: &Term| resolve(t, &s);
        let sub_atom = |a: &Atom| Atom::new(a.pred.clone(), a.args.iter().map(full).collect());
        let mut body: Vec<Atom> = c.body[..index].iter().map(sub_atom).collect();
        body.extend(d.body.iter().map(sub_atom));
        body.extend(c.body[index + 1..].iter().map(sub_atom));
        let mut conjuncts = c.constraint.conjuncts.clone();
        conjuncts.extend(d.constraint.conjuncts.iter().cloned());
        conjuncts.extend(eqs);
        let resolvent = Clause {
            head: c.head.as_ref().map(sub_atom),
            constraint: Constraint::new(conjuncts),
            body,
            tag: None,
            origin: if c.is_goal() { Origin::Goal } else { Origin::Derived },
        };
        if let Some(n) = normalize_clause(&resolvent, &original) {
            out.push(n);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldMode {
    /// Variables local to the definition body must be local in the clause.
    Strict,
    /// Matched catamorphism atoms whose list variable is still used elsewhere
    /// are kept, and other escapes are tolerated. The result has a weaker
    /// body, which keeps the one-directional correctness of the strategy.
    Generalizing,
}

/// Replaces an instance of `d`'s body inside `c` by `d`'s head.
pub fn fold(
    c: &Clause,
    d: &Definition,
    mode: FoldMode,
    pinned: Option<&[usize]>,
    is_cata: &dyn Fn(&str) -> bool,
) -> Result<Clause, TransformError> {
    if d.status == DefStatus::Unused && c.head.as_ref().is_some_and(|h| h.pred == d.pred()) {
        return Err(TransformError::FoldSafety(d.pred().to_string()));
    }
    let opts = MatchOptions { pinned: pinned.map(<[usize]>::to_vec), ..Default::default() };
    let dc = &d.clause;
    let m = matching::match_body(&dc.body, &dc.constraint, &c.body, &c.constraint, &opts)
        .ok_or_else(|| TransformError::NoMatch(d.pred().to_string()))?;
    fold_with_match(c, d, &m.subst, &m.used(), mode, is_cata)
}

pub(crate) fn fold_with_match(
    c: &Clause,
    d: &Definition,
    subst: &Subst,
    used: &BTreeSet<usize>,
    mode: FoldMode,
    is_cata: &dyn Fn(&str) -> bool,
) -> Result<Clause, TransformError> {
    let head_vars: BTreeSet<String> = d.head().vars().into_keys().collect();
    if let Some(v) = head_vars.iter().find(|v| !subst.contains_key(*v)) {
        return Err(TransformError::HeadVarNotInBody(v.clone()));
    }
    let new_atom = d.head().substitute(subst);
    let mut outside: BTreeSet<String> = c.head.iter().flat_map(|h| h.vars().into_keys()).collect();
    outside.extend(c.constraint.vars().into_keys());
    for (j, a) in c.body.iter().enumerate() {
        if !used.contains(&j) {
            outside.extend(a.vars().into_keys());
        }
    }
    let mut remove: BTreeSet<usize> = used.clone();
    match mode {
        FoldMode::Strict => {
            let body_vars: BTreeSet<String> = d.clause.var_sorts().into_keys().collect();
            let head_image: BTreeSet<String> = new_atom.vars().into_keys().collect();
            let mut seen = BTreeSet::new();
            for e in body_vars.difference(&head_vars) {
                let Some(t) = subst.get(e) else { continue };
                let Some(v) = t.as_var() else {
                    return Err(TransformError::LocalEscape(format!("{e} bound to {t}")));
                };
                if outside.contains(&v.name) || head_image.contains(&v.name) || !seen.insert(v.name.clone()) {
                    return Err(TransformError::LocalEscape(v.name.clone()));
                }
            }
        }
        FoldMode::Generalizing => {
            for j in used {
                let a = &c.body[*j];
                if is_cata(&a.pred) && a.args.iter().any(|t| t.mentions_list() && t.collect_var_names().iter().any(|v| outside.contains(v))) {
                    remove.remove(j);
                }
            }
            if remove.is_empty() || remove.iter().all(|j| is_cata(&c.body[*j].pred)) && remove.len() < used.len() {
                return Err(TransformError::NoProgress(d.pred().to_string()));
            }
        }
    }
    let first = *used.iter().next().unwrap_or(&0);
    let mut body = Vec::new();
    for (j, a) in c.body.iter().enumerate() {
        if j == first {
            body.push(new_atom.clone());
        }
        if !remove.contains(&j) {
            body.push(a.clone());
        }
    }
    if c.body.is_empty() {
        body.push(new_atom);
    }
    Ok(Clause { head: c.head.clone(), constraint: c.constraint.clone(), body, tag: None, origin: derived(c) })
}

fn derived(c: &Clause) -> Origin {
    if c.is_goal() {
        Origin::Goal
    } else {
        Origin::Derived
    }
}

/// Where a new atom related to the matched atoms goes: after the last of
/// them, skipping catamorphism atoms that already follow it.
fn insertion_point(c: &Clause, used: &BTreeSet<usize>, is_cata: &dyn Fn(&str) -> bool) -> usize {
    let Some(last) = used.iter().next_back() else { return c.body.len() };
    let mut pos = last + 1;
    while pos < c.body.len() && is_cata(&c.body[pos].pred) {
        pos += 1;
    }
    pos
}

/// Adds the conclusion of `l` for the first match of its premises.
pub fn apply_lemma(
    c: &Clause,
    l: &Lemma,
    pinned: Option<&[usize]>,
    is_cata: &dyn Fn(&str) -> bool,
) -> Result<Clause, TransformError> {
    let opts = MatchOptions { pinned: pinned.map(<[usize]>::to_vec), ..Default::default() };
    let m = matching::match_body(&l.premises, &l.premise_constraint, &c.body, &c.constraint, &opts)
        .ok_or_else(|| TransformError::NoPremiseMatch(l.name.clone()))?;
    conclude(c, l, &m.subst, &m.used(), is_cata)
}

/// Every clause obtainable by one application of `l` whose conclusion is not
/// already in the body.
pub fn lemma_instances(c: &Clause, l: &Lemma, is_cata: &dyn Fn(&str) -> bool) -> Vec<Clause> {
    let all = matching::match_body_all(&l.premises, &l.premise_constraint, &c.body, &c.constraint, &MatchOptions::default(), 64);
    let mut out = Vec::new();
    for m in all {
        let concl = l.conclusion.substitute(&m.subst);
        if c.body.contains(&concl) {
            continue;
        }
        if let Ok(r) = conclude(c, l, &m.subst, &m.used(), is_cata) {
            out.push(r);
        }
    }
    out
}

fn conclude(
    c: &Clause,
    l: &Lemma,
    subst: &Subst,
    used: &BTreeSet<usize>,
    is_cata: &dyn Fn(&str) -> bool,
) -> Result<Clause, TransformError> {
    let mut unbound: Vec<String> = l.conclusion.vars().into_keys().filter(|v| !subst.contains_key(v)).collect();
    if let Some(v) = unbound.pop() {
        return Err(TransformError::NotALemma(format!("conclusion variable {v} is not bound by the premises")));
    }
    let concl = l.conclusion.substitute(subst);
    let pos = insertion_point(c, used, is_cata);
    let mut body = c.body.clone();
    body.insert(pos, concl);
    Ok(Clause { head: c.head.clone(), constraint: c.constraint.clone(), body, tag: None, origin: derived(c) })
}

/// Appends a catamorphism atom with a fresh output variable.
pub fn add_total_cata(
    c: &Clause,
    spec: &CataSpec,
    params: &[Term],
    list_arg: &Term,
    names: &mut NameSupply,
) -> Result<(Clause, String), TransformError> {
    if !spec.total {
        return Err(TransformError::NonTotal(spec.pred.clone()));
    }
    let vars = free_vars(c);
    let list_vars = list_arg.collect_var_names();
    if let Some(v) = list_vars.iter().find(|v| !vars.contains(*v)) {
        return Err(TransformError::ListArgAbsent(v.clone()));
    }
    let fresh = names.fresh(&vars);
    let atom = spec.instantiate(params, list_arg.clone(), Term::var(fresh.clone(), spec.output_sort.clone()));
    let pos = c
        .body
        .iter()
        .position(|a| a.args.iter().any(|t| list_vars.iter().any(|v| t.occurs(v))))
        .map_or(c.body.len(), |p| p + 1);
    let mut body = c.body.clone();
    body.insert(pos, atom);
    Ok((Clause { head: c.head.clone(), constraint: c.constraint.clone(), body, tag: None, origin: derived(c) }, fresh))
}

/// Whether some single-premise lemma derives `companion` from `anchor`.
pub fn lemma_justifies(lemmas: &[Lemma], anchor: &Atom, companion: &Atom, constraint: &Constraint) -> bool {
    lemmas.iter().any(|l| {
        l.premises.len() == 1 && {
            let pattern = vec![l.premises[0].clone(), l.conclusion.clone()];
            let target = vec![anchor.clone(), companion.clone()];
            let opts = MatchOptions { pinned: Some(vec![0, 1]), ..Default::default() };
            matching::match_body(&pattern, &l.premise_constraint, &target, constraint, &opts).is_some()
        }
    })
}

/// Deletes a total atom together with lemma-justified companions.
pub fn remove_true_conjunct(
    c: &Clause,
    anchor: usize,
    companions: &[usize],
    lemmas: &[Lemma],
    functions: &Functionality,
) -> Result<Clause, TransformError> {
    let len = c.body.len();
    let get = |i: usize| c.body.get(i).ok_or(TransformError::AtomIndex { index: i, len });
    let a = get(anchor)?;
    let outputs = functions.outputs(&a.pred).ok_or_else(|| TransformError::NonTotal(a.pred.clone()))?;
    let input_vars: BTreeSet<String> = (0..a.args.len())
        .filter(|i| !outputs.contains(i))
        .flat_map(|i| a.args[i].collect_var_names())
        .collect();
    // Totality only gives some output, so outputs must be distinct free variables.
    let mut out_names = BTreeSet::new();
    for &i in outputs {
        match a.args[i].as_var() {
            Some(v) if !input_vars.contains(&v.name) && out_names.insert(v.name.clone()) => {}
            _ => return Err(TransformError::Locality(a.args[i].to_string())),
        }
    }
    let mut local: BTreeSet<String> = outputs.iter().flat_map(|i| a.args[*i].collect_var_names()).collect();
    for &k in companions {
        let comp = get(k)?;
        if !lemma_justifies(lemmas, a, comp, &c.constraint) {
            return Err(TransformError::MissingJustification(comp.to_string()));
        }
        local.extend(comp.collect_var_names().into_iter().filter(|v| !input_vars.contains(v)));
    }
    let removed: BTreeSet<usize> = std::iter::once(anchor).chain(companions.iter().copied()).collect();
    let mut rest: BTreeSet<String> = c.head.iter().flat_map(|h| h.vars().into_keys()).collect();
    rest.extend(c.constraint.vars().into_keys());
    for (j, b) in c.body.iter().enumerate() {
        if !removed.contains(&j) {
            rest.extend(b.vars().into_keys());
        }
    }
    if let Some(v) = local.iter().find(|v| rest.contains(*v)) {
        return Err(TransformError::Locality(v.clone()));
    }
    let body = c.body.iter().enumerate().filter(|(j, _)| !removed.contains(j)).map(|(_, b)| b.clone()).collect();
    Ok(Clause { head: c.head.clone(), constraint: c.constraint.clone(), body, tag: None, origin: derived(c) })
}

/// Drops unsatisfiable clauses and clauses subsumed by another clause. Of two
/// clauses subsuming each other the earlier one stays.
pub fn cleanup(cs: &[Clause]) -> Vec<Clause> {
    let mut kept: Vec<Clause> = Vec::new();
    for c in cs {
        if engine::is_sat(&c.constraint) == SatVerdict::Unsat {
            continue;
        }
        if kept.iter().any(|k| matching::subsumes(k, c)) {
            continue;
        }
        kept.retain(|k| !matching::subsumes(c, k));
        kept.push(c.clone());
    }
    kept
}

impl Lemma {
    /// Reads a proved goal as an implication. The conclusion is the last
    /// catamorphism atom whose output is constrained to `false` (the lemma
    /// concludes `true`) or to differ from another variable (the lemma
    /// concludes that value).
    pub fn from_goal(name: &str, goal: &Clause, catas: &[CataSpec]) -> Result<Lemma, TransformError> {
        if !goal.is_goal() {
            return Err(TransformError::NotALemma(format!("{name} is not a goal")));
        }
        for (i, a) in goal.body.iter().enumerate().rev() {
            let Some(spec) = catas.iter().find(|s| s.pred == a.pred) else { continue };
            let Some(out) = a.args[spec.output_pos].as_var() else { continue };
            for (k, conj) in goal.constraint.conjuncts.iter().enumerate() {
                let replacement = match conj {
                    AtomicConstraint::BoolBind { var, value: false } if *var == out.name => Some(Term::Bool(true)),
                    AtomicConstraint::Lin { rel: Rel::Ne, lhs, rhs } => {
                        match (lhs.as_single_var(), rhs.as_single_var()) {
                            (Some(x), Some(y)) if x == out.name && lhs.coeffs[x] == 1 && rhs.coeffs[y] == 1 && lhs.constant == 0 && rhs.constant == 0 => {
                                Some(Term::int_var(y))
                            }
                            (Some(x), Some(y)) if y == out.name && lhs.coeffs[x] == 1 && rhs.coeffs[y] == 1 && lhs.constant == 0 && rhs.constant == 0 => {
                                Some(Term::int_var(x))
                            }
                            _ => None,
                        }
                    }
                    _ => None,
                };
                let Some(value) = replacement else { continue };
                let mut conclusion = a.clone();
                conclusion.args[spec.output_pos] = value;
                let mut premises = goal.body.clone();
                premises.remove(i);
                let mut constraint = goal.constraint.clone();
                constraint.conjuncts.remove(k);
                return Ok(Lemma { name: name.to_string(), premises, premise_constraint: constraint, conclusion });
            }
        }
        Err(TransformError::NotALemma(format!("{name}: no negated catamorphism conclusion")))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::matching::clause_equivalent;
    use crate::syntax::{parse_chc, parse_clause, parse_clause_in};

    pub(crate) const PARTITION: &str = "
all_grt(X,[],B) :- X>=0, B=true.
all_grt(X,[Y|Ys],B) :- X=<Y, X>=0, B=false.
all_grt(X,[Y|Ys],B) :- X>Y, Y>=0, all_grt(X,Ys,B).
all_leq(X,[],B) :- X>=0, B=true.
all_leq(X,[Y|Ys],B) :- X>Y, Y>=0, B=false.
all_leq(X,[Y|Ys],B) :- X=<Y, X>=0, all_leq(X,Ys,B).
partition(X,[],[],[]).
partition(X,[Y|Ys],[Y|L1s],L2s) :- X>Y, Y>=0, partition(X,Ys,L1s,L2s).
partition(X,[Y|Ys],L1s,[Y|L2s]) :- X=<Y, X>=0, partition(X,Ys,L1s,L2s).
";

    fn program() -> ClauseSet {
        parse_chc(PARTITION).unwrap()
    }

    fn cl(text: &str) -> Clause {
        parse_clause_in(text, &program()).unwrap()
    }

    fn no_cata(_: &str) -> bool {
        false
    }

    #[test]
    fn catamorphisms_are_recognized() {
        let specs = infer_catamorphisms(&program());
        let names: Vec<&str> = specs.iter().map(|s| s.pred.as_str()).collect();
        assert_eq!(names, vec!["all_grt", "all_leq"]);
        assert_eq!(specs[0].params, vec![0]);
        assert_eq!(specs[0].list_pos, 1);
        assert_eq!(specs[0].output_sort, Sort::Bool);
    }

    #[test]
    fn partition_outputs_are_inferred() {
        let p = program();
        let f = Functionality::infer(&p, &infer_catamorphisms(&p));
        assert_eq!(f.outputs("partition"), Some(&[2usize, 3][..]));
        assert_eq!(f.outputs("all_leq"), Some(&[2usize][..]));
    }

    #[test]
    fn define_checks_head() {
        let body = cl("p :- partition(B,C,D,E), all_leq(B,E,A).").body;
        let d = define(&Constraint::default(), &body, &["A".into(), "B".into()], "pl", &BTreeSet::new()).unwrap();
        assert_eq!(d.clause.to_string(), "pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).");
        let err = define(&Constraint::default(), &body, &["C".into()], "pl", &BTreeSet::new());
        assert!(matches!(err, Err(TransformError::ListHeadVar(_))));
        let taken: BTreeSet<String> = ["pl".to_string()].into();
        assert!(matches!(
            define(&Constraint::default(), &body, &["A".into()], "pl", &taken),
            Err(TransformError::NameCollision(_))
        ));
    }

    #[test]
    fn unfold_partition_gives_three_clauses() {
        let one = cl("pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).");
        let out = unfold(&one, 0, &program(), &mut NameSupply::new()).unwrap();
        assert_eq!(out.len(), 3);
        assert!(clause_equivalent(&out[0], &cl("pl(A,B) :- all_leq(B,[],A).")));
        // Exact unfolding yields B>Y, Y>=0, hence B>=1 after projection.
        assert!(clause_equivalent(&out[1], &cl("pl(A,B) :- B>=1, partition(B,D,E,F), all_leq(B,F,A).")));
        assert!(clause_equivalent(&out[2], &cl("pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), all_leq(B,[C|F],A).")));
    }

    #[test]
    fn unfold_all_leq_drops_unsat() {
        let four = cl("pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), all_leq(B,[C|F],A).");
        let out = unfold(&four, 1, &program(), &mut NameSupply::new()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(clause_equivalent(&out[0], &cl("pl(A,B) :- B>=0, partition(B,D,E,F), all_leq(B,F,A).")));
        let two = cl("pl(A,B) :- all_leq(B,[],A).");
        let out = unfold(&two, 0, &program(), &mut NameSupply::new()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].to_string(), "pl(A,B) :- B>=0, A=true.");
    }

    #[test]
    fn unfold_errors() {
        let c = cl("pl(A,B) :- all_leq(B,[],A).");
        assert!(matches!(unfold(&c, 3, &program(), &mut NameSupply::new()), Err(TransformError::AtomIndex { .. })));
        let c = parse_clause("p(X) :- q(X).").unwrap();
        assert!(matches!(unfold(&c, 0, &program(), &mut NameSupply::new()), Err(TransformError::NoDefiningClauses(_))));
    }

    fn pl_def(status: DefStatus) -> Definition {
        Definition { clause: cl("pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A)."), status }
    }

    #[test]
    fn fold_goal_and_recursive_clause() {
        let g2 = cl("false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B).");
        let f = fold(&g2, &pl_def(DefStatus::Unused), FoldMode::Strict, None, &no_cata).unwrap();
        assert_eq!(f.to_string(), "false :- B=false, pl(B,X).");

        let seven = cl("pl(A,B) :- B>=0, partition(B,D,E,F), all_leq(B,F,A).");
        assert!(matches!(
            fold(&seven, &pl_def(DefStatus::Unused), FoldMode::Strict, None, &no_cata),
            Err(TransformError::FoldSafety(_))
        ));
        let eight = fold(&seven, &pl_def(DefStatus::Unfolded), FoldMode::Strict, None, &no_cata).unwrap();
        assert_eq!(eight.to_string(), "pl(A,B) :- B>=0, pl(A,B).");
    }

    #[test]
    fn strict_fold_rejects_escape() {
        let c = cl("false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B), all_grt(X,L1,B).");
        assert!(matches!(
            fold(&c, &pl_def(DefStatus::Unused), FoldMode::Strict, None, &no_cata),
            Err(TransformError::LocalEscape(_))
        ));
    }

    #[test]
    fn lemma_from_goal_and_application() {
        let g2 = cl("false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B).");
        let specs = infer_catamorphisms(&program());
        let l = Lemma::from_goal("G2", &g2, &specs).unwrap();
        assert_eq!(l.to_string(), "G2: partition(X,L,L1,L2) ==> all_leq(X,L2,true)");
        let c = cl("p(A) :- B>=0, partition(B,C,D,E), all_grt(B,D,A).");
        let is_cata = |p: &str| specs.iter().any(|s| s.pred == p);
        let r = apply_lemma(&c, &l, None, &is_cata).unwrap();
        assert_eq!(r.to_string(), "p(A) :- B>=0, partition(B,C,D,E), all_grt(B,D,A), all_leq(B,E,true).");
        let none = cl("p(A) :- all_grt(A,D,true).");
        assert!(matches!(apply_lemma(&none, &l, None, &is_cata), Err(TransformError::NoPremiseMatch(_))));
        assert!(lemma_instances(&r, &l, &is_cata).is_empty());
    }

    #[test]
    fn total_cata_insertion() {
        let specs = infer_catamorphisms(&program());
        let c = cl("p(A) :- partition(A,C,D,E).");
        let (r, fresh) = add_total_cata(&c, &specs[1], &[Term::Int(0)], &Term::var("E", Sort::list_of(Sort::Int)), &mut NameSupply::new()).unwrap();
        assert_eq!(r.to_string(), format!("p(A) :- partition(A,C,D,E), all_leq(0,E,{fresh})."));
        let mut non_total = specs[1].clone();
        non_total.total = false;
        assert!(add_total_cata(&c, &non_total, &[Term::Int(0)], &Term::var("E", Sort::list_of(Sort::Int)), &mut NameSupply::new()).is_err());
    }

    #[test]
    fn true_conjunct_removal() {
        let p = program();
        let specs = infer_catamorphisms(&p);
        let funcs = Functionality::infer(&p, &specs);
        let g1 = Lemma::from_goal("G1", &cl("false :- B=false, partition(X,L,L1,L2), all_grt(X,L1,B)."), &specs).unwrap();
        let g2 = Lemma::from_goal("G2", &cl("false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B)."), &specs).unwrap();
        let c = cl("p(A) :- B>=0, partition(B,C,D,E), all_grt(B,D,true), all_leq(B,E,true), all_leq(B,F,A).");
        let r = remove_true_conjunct(&c, 0, &[1, 2], &[g1.clone(), g2.clone()], &funcs).unwrap();
        assert_eq!(r.to_string(), "p(A) :- B>=0, all_leq(B,F,A).");
        assert!(matches!(remove_true_conjunct(&c, 0, &[1, 2], std::slice::from_ref(&g1), &funcs), Err(TransformError::MissingJustification(_))));
        let shared = cl("p(A) :- partition(B,C,D,E), all_leq(B,D,A).");
        assert!(matches!(remove_true_conjunct(&shared, 0, &[], &[], &funcs), Err(TransformError::Locality(_))));
        let alone = cl("p(B) :- partition(B,C,D,E).");
        assert_eq!(remove_true_conjunct(&alone, 0, &[], &[], &funcs).unwrap().to_string(), "p(B).");
    }

    #[test]
    fn cleanup_examples() {
        let three = cl("pl(A,B) :- B>=1, partition(B,D,E,F), all_leq(B,F,A).");
        let seven = cl("pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), B=<C, all_leq(B,F,A).");
        let out = cleanup(&[three.clone(), seven.clone()]);
        assert_eq!(out, vec![seven.clone()]);
        let six = cl("pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), B>C, A=false.");
        assert!(cleanup(&[six]).is_empty());
        let five = cl("pl(A,B) :- A=true, B>=0.");
        assert_eq!(cleanup(&[five.clone(), three.clone()]), vec![five, three]);
    }
}
