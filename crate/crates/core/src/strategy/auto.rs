//! The automatic strategy: repeat Define-Fold, Unfold and lemma
//! replacement until every clause is list-free.

use std::collections::BTreeSet;

use super::{Command, DerivationState, StrategyError};
use crate::matching::{self, MatchOptions};
use crate::model::{Atom, Clause, ClauseSet, Constraint, Sort, Subst, Term};
use crate::transform::{self, DefStatus, Definition, FoldMode};

/// What [`auto_define`] suggests for a clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proposal {
    /// Fold with this existing definition.
    Existing(String),
    /// Introduce this definition.
    New(Definition),
}

/// Leftmost non-catamorphism atom with a list argument, else the leftmost
/// catamorphism atom over a constructor, else the leftmost catamorphism.
pub(crate) fn select_unfold_atom(c: &Clause, is_cata: &dyn Fn(&str) -> bool) -> Option<usize> {
    let listy = |a: &Atom| a.has_list_arg();
    c.body
        .iter()
        .position(|a| listy(a) && !is_cata(&a.pred))
        .or_else(|| {
            c.body
                .iter()
                .position(|a| is_cata(&a.pred) && a.args.iter().any(|t| t.sort().is_list() && t.is_constructor()))
        })
        .or_else(|| c.body.iter().position(|a| is_cata(&a.pred)))
        .or(if c.body.is_empty() { None } else { Some(0) })
}

/// Groups the list-argument atoms of the body into blocks connected by
/// shared list variables, ordered by their first atom.
pub(crate) fn list_blocks(c: &Clause) -> Vec<Vec<usize>> {
    let idx: Vec<usize> = (0..c.body.len()).filter(|&i| c.body[i].has_list_arg()).collect();
    let list_vars = |a: &Atom| -> BTreeSet<String> {
        a.vars().into_iter().filter(|(_, s)| s.is_list()).map(|(v, _)| v).collect()
    };
    let mut blocks: Vec<(BTreeSet<String>, Vec<usize>)> = Vec::new();
    for i in idx {
        let vs = list_vars(&c.body[i]);
        let mut merged = (vs.clone(), vec![i]);
        let mut rest = Vec::new();
        for b in blocks {
            if b.0.is_disjoint(&vs) {
                rest.push(b);
            } else {
                merged.0.extend(b.0);
                merged.1.extend(b.1);
            }
        }
        rest.push(merged);
        blocks = rest;
    }
    let mut out: Vec<Vec<usize>> = blocks
        .into_iter()
        .map(|(_, mut b)| {
            b.sort_unstable();
            b
        })
        .collect();
    out.sort();
    out
}

fn first_occurrence_scalars(atoms: &[Atom]) -> Vec<(String, Sort)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    fn walk(t: &Term, seen: &mut BTreeSet<String>, out: &mut Vec<(String, Sort)>) {
        match t {
            Term::Var(v) if !v.sort.is_list() => {
                if seen.insert(v.name.clone()) {
                    out.push((v.name.clone(), v.sort.clone()));
                }
            }
            Term::Cons(h, tl) => {
                walk(h, seen, out);
                walk(tl, seen, out);
            }
            _ => {}
        }
    }
    for a in atoms {
        for t in &a.args {
            walk(t, &mut seen, &mut out);
        }
    }
    out
}

/// Replaces every top-level scalar constant of the body by a fresh variable.
fn abstract_constants(body: &[Atom], avoid: &BTreeSet<String>) -> (Vec<Atom>, Vec<(String, Term)>) {
    let mut abstracted = Vec::new();
    let mut consts = Vec::new();
    let mut n = 0;
    for a in body {
        let mut args = Vec::new();
        for t in &a.args {
            match t {
                Term::Int(_) | Term::Bool(_) => {
                    let name = loop {
                        n += 1;
                        let k = format!("K{n}");
                        if !avoid.contains(&k) {
                            break k;
                        }
                    };
                    consts.push((name.clone(), t.clone()));
                    args.push(Term::var(name, t.sort()));
                }
                _ => args.push(t.clone()),
            }
        }
        abstracted.push(Atom::new(a.pred.clone(), args));
    }
    (abstracted, consts)
}

/// A definition for the block of body atoms `block`. If an existing
/// definition differs from the block only at constant positions, those
/// positions become extra head parameters. Returns the definition clause and,
/// the fold pins, and whether it generalizes an existing definition.
pub(crate) fn propose_block(c: &Clause, block: &[usize], defs: &[Definition], name: &str) -> (Clause, Vec<usize>, bool) {
    let atoms: Vec<Atom> = block.iter().map(|&i| c.body[i].clone()).collect();
    for d in defs {
        let dc = &d.clause;
        if !dc.constraint.is_empty() || dc.body.len() != atoms.len() {
            continue;
        }
        let avoid: BTreeSet<String> = dc.var_sorts().into_keys().collect();
        let (abstracted, consts) = abstract_constants(&dc.body, &avoid);
        if consts.is_empty() {
            continue;
        }
        let Some(m) = matching::match_body(&abstracted, &Constraint::default(), &atoms, &c.constraint, &MatchOptions::default())
        else {
            continue;
        };
        let kept: Vec<&(String, Term)> = consts.iter().filter(|(k, v)| m.subst.get(k) != Some(v)).collect();
        if kept.is_empty() {
            continue;
        }
        let restore: Subst =
            consts.iter().filter(|kv| !kept.contains(kv)).map(|(k, v)| (k.clone(), v.clone())).collect();
        let body: Vec<Atom> = abstracted.iter().map(|a| a.substitute(&restore)).collect();
        let mut args = d.head().args.clone();
        args.extend(kept.iter().map(|(k, v)| Term::var(k.clone(), v.sort())));
        let pins = m.image.iter().map(|t| block[t.expect("no optional atoms")]).collect();
        let clause = Clause::new(Some(Atom::new(name, args)), Constraint::default(), body);
        return (clause, pins, true);
    }
    let args = first_occurrence_scalars(&atoms).into_iter().map(|(v, s)| Term::var(v, s)).collect();
    (Clause::new(Some(Atom::new(name, args)), Constraint::default(), atoms), block.to_vec(), false)
}

/// Suggests how to make progress on `c`: an existing definition it folds
/// with, or a new definition for its first block of list atoms.
pub fn auto_define(
    c: &Clause,
    defs: &[Definition],
    is_cata: &dyn Fn(&str) -> bool,
    name: &str,
) -> Option<Proposal> {
    for d in defs {
        if transform::fold(c, d, FoldMode::Strict, None, is_cata).is_ok() {
            return Some(Proposal::Existing(d.pred().to_string()));
        }
    }
    let block = list_blocks(c).into_iter().next()?;
    let (clause, _, _) = propose_block(c, &block, defs, name);
    Some(Proposal::New(Definition { clause, status: DefStatus::Unused }))
}

/// Whether some defining clause of the atom's predicate is ruled out by a
/// constructor in the atom.
fn discriminated(a: &Atom, program: &ClauseSet) -> bool {
    let positions: Vec<usize> =
        (0..a.args.len()).filter(|&p| a.args[p].sort().is_list() && a.args[p].is_constructor()).collect();
    if positions.is_empty() {
        return false;
    }
    let mut defining = program.defining(&a.pred).peekable();
    defining.peek().is_some()
        && defining.any(|c| {
            let h = c.head.as_ref().unwrap();
            positions.iter().any(|&p| {
                matches!((&a.args[p], &h.args[p]), (Term::Nil(_), Term::Cons(..)) | (Term::Cons(..), Term::Nil(_)))
            })
        })
}

fn list_measure(c: &Clause, is_cata: &dyn Fn(&str) -> bool) -> (usize, usize) {
    let listy: Vec<&Atom> = c.body.iter().filter(|a| a.has_list_arg()).collect();
    (listy.iter().filter(|a| !is_cata(&a.pred)).count(), listy.len())
}

impl DerivationState {
    fn step(&mut self, cmd: Command) -> Result<(), StrategyError> {
        self.apply(&cmd)
    }

    fn pending_defs(&self) -> Vec<String> {
        self.defs.iter().filter(|d| d.status == DefStatus::Unused).map(|d| d.pred().to_string()).collect()
    }

    pub(crate) fn run_auto(&mut self) -> Result<(), StrategyError> {
        loop {
            let pending = self.pending_defs();
            if self.work.is_empty() && pending.is_empty() {
                return Ok(());
            }
            if !pending.is_empty() || self.work.iter().any(|w| w.clause.mentions_list()) {
                self.iterations += 1;
                if self.iterations > self.limits.max_iterations {
                    return Err(StrategyError::IterationLimit(self.limits.max_iterations));
                }
            }
            let ids: Vec<String> = self.work.iter().map(|w| w.id.clone()).collect();
            for id in ids {
                self.define_fold(&id)?;
            }
            let fresh = self.pending_defs();
            for name in &fresh {
                self.unfold_definition(name)?;
            }
            if !fresh.is_empty() {
                self.step(Command::Cleanup)?;
            }
            let ids: Vec<String> = self.work.iter().map(|w| w.id.clone()).collect();
            for id in ids {
                self.replace_with_lemmas(&id)?;
            }
        }
    }

    fn define_fold(&mut self, id: &str) -> Result<(), StrategyError> {
        for _ in 0..128 {
            let c = self.clause(id).expect("work clause").clone();
            if !c.mentions_list() {
                return self.step(Command::Emit { clause: id.to_string() });
            }
            if self.try_fold_existing(id, true)? || self.try_remove(id)? {
                continue;
            }
            // A block that differs from a definition only at constants gets
            // its own generalized definition rather than a lossy fold.
            let blocks = list_blocks(&c);
            let general = blocks.iter().find(|b| propose_block(&c, b, &self.defs, "").2).cloned();
            if general.is_none() && self.try_fold_existing(id, false)? {
                continue;
            }
            let Some(block) = general.or_else(|| blocks.into_iter().next()) else {
                return Err(StrategyError::Stuck(c.to_string()));
            };
            if self.defs.len() >= self.limits.max_definitions {
                return Err(StrategyError::DefinitionLimit(self.limits.max_definitions));
            }
            let name = self.fresh_def_name();
            let (def, pins, _) = propose_block(&c, &block, &self.defs, &name);
            self.step(Command::Define(def.to_string()))?;
            self.step(Command::Fold { clause: id.to_string(), def: name, mode: FoldMode::Strict, pins: Some(pins) })?;
        }
        Err(StrategyError::Stuck(self.clause(id).expect("work clause").to_string()))
    }

    fn fresh_def_name(&self) -> String {
        let taken = self.taken_names();
        (1..).map(|n| format!("new{n}")).find(|n| !taken.contains(n)).expect("unbounded")
    }

    /// Folds with an existing definition. Strict folds come before
    /// generalizing ones, and within each mode fewer completed catamorphism
    /// atoms come first.
    /// With `exact`, only strict folds matching every definition atom.
    fn try_fold_existing(&mut self, id: &str, exact: bool) -> Result<bool, StrategyError> {
        let c = self.clause(id).expect("work clause").clone();
        let cata_names = self.cata_names();
        let is_cata = |p: &str| cata_names.contains(p);
        let before = list_measure(&c, &is_cata);
        let max_k = self.defs.iter().map(|d| d.clause.body.iter().filter(|a| is_cata(&a.pred)).count()).max().unwrap_or(0);
        let modes: &[FoldMode] = if exact { &[FoldMode::Strict] } else { &[FoldMode::Strict, FoldMode::Generalizing] };
        for &mode in modes {
            // Completing every optional atom lets parameters follow the
            // clause head rather than whichever atom happens to match.
            let ks: Vec<usize> = if exact { vec![0] } else { std::iter::once(0).chain((1..=max_k).rev()).collect() };
            for k in ks {
                for di in 0..self.defs.len() {
                    let d = &self.defs[di];
                    if d.status == DefStatus::Unused && c.head.as_ref().is_some_and(|h| h.pred == d.pred()) {
                        continue;
                    }
                    let dc = &d.clause;
                    let optional: BTreeSet<usize> = (0..dc.body.len()).filter(|&i| is_cata(&dc.body[i].pred)).collect();
                    if k > optional.len() || k >= dc.body.len() {
                        continue;
                    }
                    let opts = MatchOptions {
                        optional: if k > 0 { optional } else { BTreeSet::new() },
                        max_missing: k,
                        ..Default::default()
                    };
                    let matches = matching::match_body_all(&dc.body, &dc.constraint, &c.body, &c.constraint, &opts, 16);
                    for m in matches {
                        let def = d.pred().to_string();
                        if k == 0 {
                            let Ok(r) = transform::fold_with_match(&c, d, &m.subst, &m.used(), mode, &is_cata) else {
                                continue;
                            };
                            if list_measure(&r, &is_cata) >= before || strands(&c, &r, &m.used(), &is_cata) {
                                continue;
                            }
                            let pins = m.image.iter().map(|t| t.unwrap()).collect();
                            self.step(Command::Fold { clause: id.to_string(), def, mode, pins: Some(pins) })?;
                            return Ok(true);
                        }
                        let Some(totals) = self.completion(id, d, &m.subst, &m.missing()) else { continue };
                        let mut trial = self.clone();
                        if totals.into_iter().try_for_each(|t| trial.step(t)).is_err() {
                            continue;
                        }
                        let c2 = trial.clause(id).expect("work clause").clone();
                        let d = &trial.defs[di];
                        let all = matching::match_body_all(&dc.body, &dc.constraint, &c2.body, &c2.constraint, &MatchOptions::default(), 16);
                        let found = all.into_iter().find_map(|m2| {
                            let r = transform::fold_with_match(&c2, d, &m2.subst, &m2.used(), mode, &is_cata).ok()?;
                            (list_measure(&r, &is_cata) < before && !strands(&c2, &r, &m2.used(), &is_cata)).then(|| m2.image.iter().map(|t| t.unwrap()).collect::<Vec<_>>())
                        });
                        if let Some(pins) = found {
                            trial.step(Command::Fold { clause: id.to_string(), def, mode, pins: Some(pins) })?;
                            *self = trial;
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// `total` commands adding the missing catamorphism atoms of a partial
    /// match. The list argument must be bound and the output must not be
    /// constrained anywhere else in the definition.
    fn completion(&self, id: &str, d: &Definition, subst: &Subst, missing: &[usize]) -> Option<Vec<Command>> {
        let dc = &d.clause;
        let c = self.clause(id)?;
        let mut chosen: Subst = Subst::new();
        let mut cmds = Vec::new();
        for &i in missing {
            let a = &dc.body[i];
            let spec = self.catas.iter().find(|s| s.pred == a.pred)?;
            let list = match subst.get(&a.args[spec.list_pos].as_var()?.name)? {
                Term::Var(v) => v.name.clone(),
                _ => return None,
            };
            let out = a.args[spec.output_pos].as_var()?;
            if subst.contains_key(&out.name)
                || dc.constraint.vars().contains_key(&out.name)
                || dc.body.iter().enumerate().any(|(j, b)| j != i && b.occurs(&out.name))
            {
                return None;
            }
            let mut params = Vec::new();
            for &p in &spec.params {
                let t = match &a.args[p] {
                    Term::Var(v) => match subst.get(&v.name).or(chosen.get(&v.name)) {
                        Some(t) => t.clone(),
                        None => {
                            // Reuse a parameter the clause already passes to
                            // this catamorphism, else a neutral constant.
                            let head_vars = c.head.as_ref().map(Atom::vars).unwrap_or_default();
                            let candidates: Vec<&Term> = c
                                .body
                                .iter()
                                .filter(|b| b.pred == a.pred)
                                .map(|b| &b.args[p])
                                .filter(|t| matches!(t, Term::Var(_)))
                                .collect();
                            let seen = candidates
                                .iter()
                                .find(|t| t.as_var().is_some_and(|v| head_vars.contains_key(&v.name)))
                                .or(candidates.first())
                                .map(|t| (*t).clone());
                            let t = seen.unwrap_or(if v.sort == Sort::Bool { Term::Bool(true) } else { Term::Int(0) });
                            chosen.insert(v.name.clone(), t.clone());
                            t
                        }
                    },
                    t => t.clone(),
                };
                if !matches!(t, Term::Var(_) | Term::Int(_) | Term::Bool(_)) {
                    return None;
                }
                params.push(super::scalar_text(&t));
            }
            cmds.push(Command::Total { clause: id.to_string(), pred: a.pred.clone(), params, list });
        }
        Some(cmds)
    }

    /// Removes a total atom whose outputs are unused, with the companions
    /// the lemmas derive from it.
    fn try_remove(&mut self, id: &str) -> Result<bool, StrategyError> {
        let c = self.clause(id).expect("work clause").clone();
        for (i, a) in c.body.iter().enumerate() {
            if !self.functions.is_total(&a.pred) {
                continue;
            }
            let companions: Vec<usize> = (0..c.body.len())
                .filter(|&j| j != i && transform::lemma_justifies(&self.lemmas, a, &c.body[j], &c.constraint))
                .collect();
            if transform::remove_true_conjunct(&c, i, &companions, &self.lemmas, &self.functions).is_ok() {
                self.step(Command::Remove { clause: id.to_string(), anchor: i, companions })?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn unfold_definition(&mut self, name: &str) -> Result<(), StrategyError> {
        let cata_names = self.cata_names();
        let is_cata = |p: &str| cata_names.contains(p);
        let d = self.def(name).expect("definition").clone();
        let atom = select_unfold_atom(&d.clause, &is_cata);
        let before: BTreeSet<String> = self.work.iter().map(|w| w.id.clone()).collect();
        self.step(Command::UnfoldDef { def: name.to_string(), atom })?;
        for _ in 0..256 {
            let next = self.work.iter().filter(|w| !before.contains(&w.id)).find_map(|w| {
                w.clause.body.iter().position(|a| discriminated(a, &self.program)).map(|j| (w.id.clone(), j))
            });
            match next {
                Some((id, j)) => self.step(Command::Unfold { clause: id, atom: j })?,
                None => return Ok(()),
            }
        }
        Err(StrategyError::Stuck(format!("unfolding of {name} does not terminate")))
    }

    /// Adds lemma conclusions not already implied by the body, to a fixpoint.
    fn replace_with_lemmas(&mut self, id: &str) -> Result<(), StrategyError> {
        let cata_names = self.cata_names();
        let is_cata = |p: &str| cata_names.contains(p);
        for _ in 0..64 {
            let c = self.clause(id).expect("work clause").clone();
            let mut found = None;
            'lemmas: for l in &self.lemmas {
                for m in matching::match_body_all(&l.premises, &l.premise_constraint, &c.body, &c.constraint, &MatchOptions::default(), 64) {
                    let concl = l.conclusion.substitute(&m.subst);
                    if present(&concl, &c) {
                        continue;
                    }
                    let pins: Vec<usize> = m.image.iter().map(|t| t.unwrap()).collect();
                    if transform::apply_lemma(&c, l, Some(&pins), &is_cata).is_ok() {
                        found = Some((l.name.clone(), pins));
                        break 'lemmas;
                    }
                }
            }
            match found {
                Some((lemma, pins)) => self.step(Command::Lemma { clause: id.to_string(), lemma, pins: Some(pins) })?,
                None => return Ok(()),
            }
        }
        Err(StrategyError::Stuck(format!("lemma replacement on {id} does not terminate")))
    }
}

/// Whether the body already contains the atom, up to equalities the
/// constraint entails.
/// Whether folding `c` into `r` leaves a list variable of a folded atom
/// occurring only in catamorphism atoms whose output is a variable: the
/// link between that output and the folded atoms would be lost.
fn strands(c: &Clause, r: &Clause, used: &BTreeSet<usize>, is_cata: &dyn Fn(&str) -> bool) -> bool {
    let lists = |a: &Atom| -> BTreeSet<String> {
        a.vars().into_iter().filter(|(_, s)| s.is_list()).map(|(v, _)| v).collect()
    };
    let folded: BTreeSet<String> = used.iter().flat_map(|&j| lists(&c.body[j])).collect();
    folded.iter().any(|v| {
        let holders: Vec<&Atom> = r.body.iter().filter(|a| a.occurs(v)).collect();
        !holders.is_empty()
            && holders.iter().all(|a| is_cata(&a.pred) && a.args.last().is_some_and(|t| t.as_var().is_some()))
    })
}

fn present(concl: &Atom, c: &Clause) -> bool {
    let fixed: Subst = concl.vars().into_iter().map(|(v, s)| (v.clone(), Term::var(v, s))).collect();
    let opts = MatchOptions { fixed, ..Default::default() };
    matching::match_atoms(std::slice::from_ref(concl), &Constraint::default(), &c.body, &c.constraint, &opts).is_some()
}
