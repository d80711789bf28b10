//! One-way matching of atom conjunctions modulo constraint entailment.
//!
//! A pattern (atoms plus constraint) matches a target when a substitution of
//! the pattern variables sends every pattern atom onto a distinct target atom
//! and the target constraint entails the instantiated pattern constraint.
//! Integer and boolean positions that cannot be matched syntactically (a
//! pattern variable bound twice, or a pattern constant against a target
//! variable) become equalities that the target constraint must entail.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine;
use crate::model::{Atom, AtomicConstraint, Clause, Constraint, LinExpr, Rel, Sort, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub subst: Subst,
    /// Target index for each pattern atom; `None` for an optional atom left
    /// unmatched.
    pub image: Vec<Option<usize>>,
}

impl Match {
    pub fn used(&self) -> BTreeSet<usize> {
        self.image.iter().flatten().copied().collect()
    }

    pub fn missing(&self) -> Vec<usize> {
        self.image.iter().enumerate().filter(|(_, t)| t.is_none()).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct MatchOptions {
    /// Restricts the target atoms pattern atom `i` may map to.
    pub pinned: Option<Vec<usize>>,
    /// Pattern atoms that may stay unmatched.
    pub optional: BTreeSet<usize>,
    /// Upper bound on how many optional atoms may stay unmatched.
    pub max_missing: usize,
    /// Bindings fixed before the search starts.
    pub fixed: Subst,
}

struct Search<'a> {
    pattern: &'a [Atom],
    pattern_constraint: &'a Constraint,
    target: &'a [Atom],
    target_constraint: &'a Constraint,
    opts: &'a MatchOptions,
    allowed_missing: usize,
}

#[derive(Clone, Default)]
struct Partial {
    subst: Subst,
    pending: Vec<AtomicConstraint>,
    image: Vec<Option<usize>>,
    missing: usize,
}

fn term_lin(t: &Term) -> Option<LinExpr> {
    match t {
        Term::Var(v) if v.sort == Sort::Int => Some(LinExpr::var(v.name.clone())),
        Term::Int(n) => Some(LinExpr::constant(*n)),
        _ => None,
    }
}

/// Equality between two scalar terms, or `Err(())` if it is plainly false or
/// the terms are not scalar.
pub(crate) fn scalar_eq(a: &Term, b: &Term) -> Result<Option<AtomicConstraint>, ()> {
    if a == b {
        return Ok(None);
    }
    match (a, b) {
        (Term::Bool(_), Term::Bool(_)) | (Term::Int(_), Term::Int(_)) => Err(()),
        (Term::Var(x), Term::Bool(v)) | (Term::Bool(v), Term::Var(x)) if x.sort == Sort::Bool => {
            Ok(Some(AtomicConstraint::bind(x.name.clone(), *v)))
        }
        (Term::Var(x), Term::Var(y)) if x.sort == Sort::Bool && y.sort == Sort::Bool => {
            Ok(Some(AtomicConstraint::BoolEq { lhs: x.name.clone(), rhs: y.name.clone() }))
        }
        _ => match (term_lin(a), term_lin(b)) {
            (Some(l), Some(r)) => Ok(Some(AtomicConstraint::lin(l, Rel::Eq, r))),
            _ => Err(()),
        },
    }
}

fn match_term(p: &Term, t: &Term, st: &mut Partial) -> bool {
    match p {
        Term::Var(v) => match st.subst.get(&v.name) {
            Some(bound) => {
                let bound = bound.clone();
                if bound == *t {
                    true
                } else if v.sort.is_list() {
                    false
                } else {
                    match scalar_eq(&bound, t) {
                        Ok(Some(k)) => {
                            st.pending.push(k);
                            true
                        }
                        Ok(None) => true,
                        Err(()) => false,
                    }
                }
            }
            None => {
                if t.sort() != v.sort {
                    return false;
                }
                st.subst.insert(v.name.clone(), t.clone());
                true
            }
        },
        Term::Int(_) | Term::Bool(_) => match scalar_eq(p, t) {
            Ok(Some(k)) => {
                st.pending.push(k);
                true
            }
            Ok(None) => true,
            Err(()) => false,
        },
        Term::Nil(_) => matches!(t, Term::Nil(_)),
        Term::Cons(ph, pt) => match t {
            Term::Cons(th, tt) => match_term(ph, th, st) && match_term(pt, tt, st),
            _ => false,
        },
    }
}

fn match_atom(p: &Atom, t: &Atom, st: &mut Partial) -> bool {
    p.pred == t.pred && p.args.len() == t.args.len() && p.args.iter().zip(&t.args).all(|(a, b)| match_term(a, b, st))
}

impl Search<'_> {
    /// Depth-first search; `found` returns true to stop.
    fn run(&self, i: usize, st: Partial, found: &mut dyn FnMut(Partial) -> bool) -> bool {
        if i == self.pattern.len() {
            return match self.accept(st) {
                Some(done) => found(done),
                None => false,
            };
        }
        let used: BTreeSet<usize> = st.image.iter().flatten().copied().collect();
        let candidates: Vec<usize> = match &self.opts.pinned {
            Some(pins) => pins.get(i).into_iter().copied().collect(),
            None => (0..self.target.len()).collect(),
        };
        for j in candidates {
            if used.contains(&j) || j >= self.target.len() {
                continue;
            }
            let mut next = st.clone();
            if match_atom(&self.pattern[i], &self.target[j], &mut next) {
                next.image.push(Some(j));
                if self.run(i + 1, next, found) {
                    return true;
                }
            }
        }
        if self.opts.optional.contains(&i) && st.missing < self.allowed_missing {
            let mut next = st;
            next.image.push(None);
            next.missing += 1;
            return self.run(i + 1, next, found);
        }
        false
    }

    fn accept(&self, st: Partial) -> Option<Partial> {
        if st.missing != self.allowed_missing {
            return None;
        }
        let bound: BTreeSet<String> = st.subst.keys().cloned().collect();
        let relevant = if self.pattern_constraint.is_empty() {
            Constraint::default()
        } else {
            let pc_vars: BTreeSet<String> = self.pattern_constraint.vars().into_keys().collect();
            if pc_vars.is_subset(&bound) {
                self.pattern_constraint.clone()
            } else {
                engine::project(self.pattern_constraint, &bound)
            }
        };
        let required = relevant.substitute(&st.subst).ok()?;
        let required = Constraint::new(required.conjuncts.into_iter().chain(st.pending.iter().cloned()).collect());
        if required.is_empty() || engine::entails(self.target_constraint, &required) {
            Some(st)
        } else {
            None
        }
    }
}

/// Finds the first match in declared order. Matches with fewer missing
/// optional atoms are preferred.
pub fn match_atoms(
    pattern: &[Atom],
    pattern_constraint: &Constraint,
    target: &[Atom],
    target_constraint: &Constraint,
    opts: &MatchOptions,
) -> Option<Match> {
    let max_missing = opts.max_missing.min(opts.optional.len());
    for allowed_missing in 0..=max_missing {
        let search = Search { pattern, pattern_constraint, target, target_constraint, opts, allowed_missing };
        let start = Partial { subst: opts.fixed.clone(), ..Partial::default() };
        let mut result = None;
        search.run(0, start, &mut |p| {
            result = Some(Match { subst: p.subst, image: p.image });
            true
        });
        if result.is_some() {
            return result;
        }
    }
    None
}

/// All matches without missing atoms, in search order, up to `limit`.
/// Every match leaving exactly `opts.max_missing` optional atoms unmatched.
pub fn match_all(
    pattern: &[Atom],
    pattern_constraint: &Constraint,
    target: &[Atom],
    target_constraint: &Constraint,
    opts: &MatchOptions,
    limit: usize,
) -> Vec<Match> {
    let allowed_missing = opts.max_missing.min(opts.optional.len());
    let search = Search { pattern, pattern_constraint, target, target_constraint, opts, allowed_missing };
    let start = Partial { subst: opts.fixed.clone(), ..Partial::default() };
    let mut out = Vec::new();
    search.run(0, start, &mut |p| {
        out.push(Match { subst: p.subst, image: p.image });
        out.len() >= limit
    });
    out
}

/// Pseudo-atom standing for a clause head so that heads only match heads.
fn head_atom(c: &Clause) -> Atom {
    match &c.head {
        Some(h) => Atom::new(format!("head {}", h.pred), h.args.clone()),
        None => Atom::new("head false", vec![]),
    }
}

/// True when `general` subsumes `specific`: some instance of `general` has
/// the same head, a sub-multiset of the body atoms, and a constraint entailed
/// by the constraint of `specific`.
pub fn subsumes(general: &Clause, specific: &Clause) -> bool {
    let mut pattern = vec![head_atom(general)];
    pattern.extend(general.body.iter().cloned());
    let mut target = vec![head_atom(specific)];
    target.extend(specific.body.iter().cloned());
    let renamed = rename_pattern(&pattern, &general.constraint, &target, &specific.constraint);
    match_atoms(&renamed.0, &renamed.1, &target, &specific.constraint, &MatchOptions::default()).is_some()
}

/// Variants up to renaming and constraint equivalence: mutual subsumption
/// with the same number of body atoms.
pub fn clause_equivalent(a: &Clause, b: &Clause) -> bool {
    a.body.len() == b.body.len() && subsumes(a, b) && subsumes(b, a)
}

/// Renames pattern variables that clash with target variables, so that
/// pattern constraint variables left unbound by the atoms cannot be confused
/// with target variables.
fn rename_pattern(
    pattern: &[Atom],
    pc: &Constraint,
    target: &[Atom],
    tc: &Constraint,
) -> (Vec<Atom>, Constraint, BTreeMap<String, String>) {
    let mut taken: BTreeSet<String> = tc.vars().into_keys().collect();
    for a in target {
        taken.extend(a.vars().into_keys());
    }
    let mut pvars: BTreeSet<String> = pc.vars().into_keys().collect();
    for a in pattern {
        pvars.extend(a.vars().into_keys());
    }
    let mut map = BTreeMap::new();
    let mut n = 0usize;
    for v in pvars {
        if taken.contains(&v) {
            let fresh = loop {
                n += 1;
                let f = format!("P_{n}");
                if !taken.contains(&f) && !map.values().any(|x: &String| *x == f) {
                    break f;
                }
            };
            map.insert(v, fresh);
        }
    }
    (pattern.iter().map(|a| a.rename(&map)).collect(), pc.rename(&map), map)
}

/// Matches a definition body, taken as pattern, against a clause body.
/// Pattern variables are renamed apart first; the returned substitution is
/// keyed by the original pattern names.
pub fn match_body(
    pattern: &[Atom],
    pattern_constraint: &Constraint,
    target: &[Atom],
    target_constraint: &Constraint,
    opts: &MatchOptions,
) -> Option<Match> {
    let (renamed, rpc, map) = rename_pattern(pattern, pattern_constraint, target, target_constraint);
    let back: BTreeMap<String, String> = map.iter().map(|(o, n)| (n.clone(), o.clone())).collect();
    let mut ropts = opts.clone();
    ropts.fixed = opts.fixed.iter().map(|(k, v)| (map.get(k).cloned().unwrap_or_else(|| k.clone()), v.clone())).collect();
    let m = match_atoms(&renamed, &rpc, target, target_constraint, &ropts)?;
    let subst = m.subst.into_iter().map(|(k, v)| (back.get(&k).cloned().unwrap_or(k), v)).collect();
    Some(Match { subst, image: m.image })
}

/// Like [`match_body`] but returns every match, up to `limit`.
pub fn match_body_all(
    pattern: &[Atom],
    pattern_constraint: &Constraint,
    target: &[Atom],
    target_constraint: &Constraint,
    opts: &MatchOptions,
    limit: usize,
) -> Vec<Match> {
    let (renamed, rpc, map) = rename_pattern(pattern, pattern_constraint, target, target_constraint);
    let back: BTreeMap<String, String> = map.iter().map(|(o, n)| (n.clone(), o.clone())).collect();
    let mut ropts = opts.clone();
    ropts.fixed = opts.fixed.iter().map(|(k, v)| (map.get(k).cloned().unwrap_or_else(|| k.clone()), v.clone())).collect();
    match_all(&renamed, &rpc, target, target_constraint, &ropts, limit)
        .into_iter()
        .map(|m| Match {
            subst: m.subst.into_iter().map(|(k, v)| (back.get(&k).cloned().unwrap_or(k), v)).collect(),
            image: m.image,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_clause;

    fn c(text: &str) -> Clause {
        parse_clause(text).unwrap()
    }

    #[test]
    fn specialized_clause_is_subsumed() {
        let three = c("pl(A,B) :- B>=1, partition(B,D,E,F), all_leq(B,F,A).");
        let seven = c("pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), B=<C, all_leq(B,F,A).");
        assert!(subsumes(&seven, &three));
        assert!(!subsumes(&three, &seven));
    }

    #[test]
    fn renaming_variants_are_equivalent() {
        let a = c("p(X,Y) :- X>Y, q(X,L), r(L,Y).");
        let b = c("p(A,B) :- A>=B+1, q(A,M), r(M,B).");
        assert!(clause_equivalent(&a, &b));
        let d = c("p(A,B) :- A>=B, q(A,M), r(M,B).");
        assert!(!clause_equivalent(&a, &d));
    }

    #[test]
    fn constant_pattern_needs_entailment() {
        let pattern = c("d(X) :- isSorted(0,L,X).");
        let target = c("h(A) :- K=0, isSorted(K,F,A).");
        let m = match_body(&pattern.body, &pattern.constraint, &target.body, &target.constraint, &MatchOptions::default());
        assert!(m.is_some());
        let target = c("h(A) :- K>=0, isSorted(K,F,A).");
        let m = match_body(&pattern.body, &pattern.constraint, &target.body, &target.constraint, &MatchOptions::default());
        assert!(m.is_none());
    }

    #[test]
    fn optional_atoms_may_be_missing() {
        let pattern = c("qss(A) :- quicksort(B,C), isSorted(0,C,A).");
        let target = c("h(X) :- quicksort(D,F), append(F,G,H).");
        let opts = MatchOptions { optional: [1].into(), max_missing: 1, ..Default::default() };
        let m = match_body(&pattern.body, &pattern.constraint, &target.body, &target.constraint, &opts).unwrap();
        assert_eq!(m.image, vec![Some(0), None]);
        assert_eq!(m.subst["C"].to_string(), "F");
    }

    #[test]
    fn goals_only_match_goals() {
        assert!(!subsumes(&c("p(X) :- q(X)."), &c("false :- q(X).")));
        assert!(subsumes(&c("false :- q(X)."), &c("false :- X>=0, q(X), r(X).")));
    }
}
