//! Bounded bottom-up evaluation of the least model.
//!
//! Constraints are evaluated by direct arithmetic on ground values, so this
//! module shares nothing with the symbolic constraint engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{Atom, AtomicConstraint, Clause, ClauseSet, Constraint, Sort, Subst, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainBounds {
    pub int_min: i64,
    pub int_max: i64,
    pub max_list_len: usize,
    pub max_iterations: usize,
    /// Refuse bounds that give more ground terms than this.
    pub term_cap: usize,
}

impl Default for DomainBounds {
    fn default() -> Self {
        DomainBounds { int_min: 0, int_max: 2, max_list_len: 3, max_iterations: 1000, term_cap: 1_000_000 }
    }
}

impl DomainBounds {
    pub fn new(int_min: i64, int_max: i64, max_list_len: usize) -> Self {
        DomainBounds { int_min, int_max, max_list_len, ..Default::default() }
    }

    fn ints(&self) -> impl Iterator<Item = i64> {
        self.int_min..=self.int_max
    }

    /// Number of ground integer lists within bounds, saturating.
    pub fn list_count(&self) -> usize {
        let n = (self.int_max - self.int_min + 1).max(0) as usize;
        let mut total: usize = 0;
        let mut layer: usize = 1;
        for _ in 0..=self.max_list_len {
            total = total.saturating_add(layer);
            layer = layer.saturating_mul(n);
        }
        total
    }

    fn contains(&self, t: &Term) -> bool {
        match t {
            Term::Int(n) => (self.int_min..=self.int_max).contains(n),
            Term::Bool(_) => true,
            Term::Nil(_) => true,
            Term::Cons(..) => {
                let mut len = 0;
                let mut cur = t;
                while let Term::Cons(h, tl) = cur {
                    if !self.contains(h) {
                        return false;
                    }
                    len += 1;
                    cur = tl;
                }
                len <= self.max_list_len && matches!(cur, Term::Nil(_))
            }
            Term::Var(_) => false,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("bounds give {count} ground terms, over the cap of {cap}")]
    TooManyTerms { count: usize, cap: usize },
    #[error("int_min {0} exceeds int_max {1}")]
    EmptyRange(i64, i64),
    #[error("goal clause given to bounded_lfp: {0}")]
    GoalClause(String),
}

/// Ground terms of each sort, built once per evaluation.
struct Pools {
    ints: Vec<Term>,
    bools: Vec<Term>,
    lists: BTreeMap<Sort, Vec<Term>>,
    bounds: DomainBounds,
}

impl Pools {
    fn new(b: DomainBounds) -> Pools {
        Pools {
            ints: b.ints().map(Term::Int).collect(),
            bools: vec![Term::Bool(false), Term::Bool(true)],
            lists: BTreeMap::new(),
            bounds: b,
        }
    }

    fn of(&mut self, s: &Sort) -> &[Term] {
        match s {
            Sort::Int => &self.ints,
            Sort::Bool => &self.bools,
            Sort::List(elem) => {
                if !self.lists.contains_key(s) {
                    let elems = match elem.as_ref() {
                        Sort::Int => self.ints.clone(),
                        Sort::Bool => self.bools.clone(),
                        _ => Vec::new(),
                    };
                    let nil = Term::Nil(elem.as_ref().clone());
                    let mut all = vec![nil.clone()];
                    let mut layer = vec![nil];
                    for _ in 0..self.bounds.max_list_len {
                        let mut next = Vec::new();
                        for e in &elems {
                            for tl in &layer {
                                next.push(Term::cons(e.clone(), tl.clone()));
                            }
                        }
                        all.extend(next.iter().cloned());
                        layer = next;
                    }
                    self.lists.insert(s.clone(), all);
                }
                &self.lists[s]
            }
        }
    }
}

fn ground(t: &Term, s: &Subst) -> Option<Term> {
    match t {
        Term::Var(v) => s.get(&v.name).cloned(),
        Term::Cons(h, tl) => Some(Term::cons(ground(h, s)?, ground(tl, s)?)),
        other => Some(other.clone()),
    }
}

/// Matches a pattern against a ground term, extending `s`.
fn match_ground(p: &Term, g: &Term, s: &mut Subst) -> bool {
    match (p, g) {
        (Term::Var(v), _) => match s.get(&v.name) {
            Some(bound) => bound == g,
            None => {
                s.insert(v.name.clone(), g.clone());
                true
            }
        },
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Bool(a), Term::Bool(b)) => a == b,
        (Term::Nil(_), Term::Nil(_)) => true,
        (Term::Cons(ph, pt), Term::Cons(gh, gt)) => match_ground(ph, gh, s) && match_ground(pt, gt, s),
        _ => false,
    }
}

fn holds(c: &Constraint, s: &Subst) -> bool {
    let int = |v: &str| match s.get(v) {
        Some(Term::Int(n)) => Some(*n),
        _ => None,
    };
    let boolean = |v: &str| match s.get(v) {
        Some(Term::Bool(b)) => Some(*b),
        _ => None,
    };
    c.conjuncts.iter().all(|a| match a {
        AtomicConstraint::Lin { rel, lhs, rhs } => match (lhs.eval(&int), rhs.eval(&int)) {
            (Some(l), Some(r)) => rel.holds(l, r),
            _ => false,
        },
        AtomicConstraint::BoolBind { var, value } => boolean(var) == Some(*value),
        AtomicConstraint::BoolEq { lhs, rhs } => boolean(lhs).is_some() && boolean(lhs) == boolean(rhs),
    })
}

type Index = BTreeMap<String, Vec<Atom>>;

/// Calls `found` on every ground instance of `c` whose body atoms are in
/// `index` and whose constraint holds. Stops when `found` returns true.
fn instances(c: &Clause, index: &Index, pools: &mut Pools, found: &mut dyn FnMut(&Subst) -> bool) -> bool {
    let sorts = c.var_sorts();
    let empty = Vec::new();
    let mut partial: Vec<Subst> = vec![Subst::new()];
    for a in &c.body {
        let facts = index.get(&a.pred).unwrap_or(&empty);
        let mut next = Vec::new();
        for s in &partial {
            for f in facts {
                let mut s2 = s.clone();
                if a.args.iter().zip(&f.args).all(|(p, g)| match_ground(p, g, &mut s2)) {
                    next.push(s2);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return false;
        }
    }
    for s in partial {
        let free: Vec<(&String, &Sort)> = sorts.iter().filter(|(v, _)| !s.contains_key(*v)).collect();
        if enumerate(&free, s, c, pools, found) {
            return true;
        }
    }
    false
}

fn enumerate(
    free: &[(&String, &Sort)],
    s: Subst,
    c: &Clause,
    pools: &mut Pools,
    found: &mut dyn FnMut(&Subst) -> bool,
) -> bool {
    match free.split_first() {
        None => holds(&c.constraint, &s) && found(&s),
        Some(((v, sort), rest)) => {
            let values = pools.of(sort).to_vec();
            for t in values {
                let mut s2 = s.clone();
                s2.insert((*v).clone(), t);
                if enumerate(rest, s2, c, pools, found) {
                    return true;
                }
            }
            false
        }
    }
}

fn check_bounds(b: &DomainBounds) -> Result<(), OracleError> {
    if b.int_min > b.int_max {
        return Err(OracleError::EmptyRange(b.int_min, b.int_max));
    }
    let count = b.list_count().saturating_add((b.int_max - b.int_min + 1) as usize).saturating_add(2);
    if count > b.term_cap {
        return Err(OracleError::TooManyTerms { count, cap: b.term_cap });
    }
    Ok(())
}

/// All ground atoms derivable within bounds. Atoms with an argument outside
/// the bounds are not derived.
pub fn bounded_lfp(cs: &ClauseSet, b: &DomainBounds) -> Result<BTreeSet<Atom>, OracleError> {
    check_bounds(b)?;
    if let Some(g) = cs.goals().next() {
        return Err(OracleError::GoalClause(g.to_string()));
    }
    let mut pools = Pools::new(*b);
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    for _ in 0..b.max_iterations {
        let mut index: Index = BTreeMap::new();
        for a in &atoms {
            index.entry(a.pred.clone()).or_default().push(a.clone());
        }
        let mut derived = Vec::new();
        for c in &cs.clauses {
            let head = c.head.as_ref().expect("no goals");
            instances(c, &index, &mut pools, &mut |s| {
                if let Some(args) = head.args.iter().map(|t| ground(t, s)).collect::<Option<Vec<Term>>>() {
                    if args.iter().all(|t| b.contains(t)) {
                        derived.push(Atom::new(head.pred.clone(), args));
                    }
                }
                false
            });
        }
        let before = atoms.len();
        atoms.extend(derived);
        if atoms.len() == before {
            break;
        }
    }
    Ok(atoms)
}

/// A ground instance of a goal whose constraint holds and whose body atoms
/// are derivable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub subst: Subst,
    pub body: Vec<Atom>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binds: Vec<String> = self.subst.iter().map(|(v, t)| format!("{v}={t}")).collect();
        let body: Vec<String> = self.body.iter().map(|a| a.to_string()).collect();
        write!(f, "{} with {}", body.join(", "), binds.join(", "))
    }
}

pub fn goal_violated(atoms: &BTreeSet<Atom>, g: &Clause, b: &DomainBounds) -> Option<Witness> {
    let mut index: Index = BTreeMap::new();
    for a in atoms {
        index.entry(a.pred.clone()).or_default().push(a.clone());
    }
    let mut pools = Pools::new(*b);
    let mut witness = None;
    instances(g, &index, &mut pools, &mut |s| {
        let body = g.body.iter().map(|a| a.substitute(s)).collect();
        witness = Some(Witness { subst: s.clone(), body });
        true
    });
    witness
}

/// Atoms whose predicate is in `preds`.
pub fn restrict(atoms: &BTreeSet<Atom>, preds: &BTreeSet<String>) -> BTreeSet<Atom> {
    atoms.iter().filter(|a| preds.contains(&a.pred)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_chc, parse_clause_in};
    use crate::transform::tests::PARTITION;

    fn atom(cs: &ClauseSet, text: &str) -> Atom {
        parse_clause_in(&format!("{text}."), cs).unwrap().head.unwrap()
    }

    #[test]
    fn partition_atoms() {
        let cs = parse_chc(PARTITION).unwrap();
        let lfp = bounded_lfp(&cs, &DomainBounds::new(0, 1, 2)).unwrap();
        assert!(lfp.contains(&atom(&cs, "partition(1,[0],[0],[])")));
        assert!(lfp.contains(&atom(&cs, "all_leq(1,[1],true)")));
        assert!(!lfp.contains(&atom(&cs, "partition(1,[1],[1],[])")));
    }

    /// Hand-enumerated least model of all_leq over values 0..1 and lists of
    /// length at most 1.
    #[test]
    fn all_leq_table() {
        let cs = parse_chc(PARTITION).unwrap();
        let lfp = bounded_lfp(&cs, &DomainBounds::new(0, 1, 1)).unwrap();
        let got: BTreeSet<String> = lfp.iter().filter(|a| a.pred == "all_leq").map(|a| a.to_string()).collect();
        let want: BTreeSet<String> = [
            "all_leq(0,[],true)",
            "all_leq(1,[],true)",
            "all_leq(0,[0],true)",
            "all_leq(0,[1],true)",
            "all_leq(1,[0],false)",
            "all_leq(1,[1],true)",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn fact_only() {
        let cs = parse_chc("p(0).").unwrap();
        let lfp = bounded_lfp(&cs, &DomainBounds::default()).unwrap();
        assert_eq!(lfp.len(), 1);
    }

    #[test]
    fn goals_and_witnesses() {
        let cs = parse_chc(PARTITION).unwrap();
        let b = DomainBounds::new(0, 1, 2);
        let lfp = bounded_lfp(&cs, &b).unwrap();
        let g2 = parse_clause_in("false :- A=false, partition(X,L,L1,L2), all_leq(X,L2,A).", &cs).unwrap();
        assert_eq!(goal_violated(&lfp, &g2, &b), None);
        let swapped = parse_clause_in("false :- A=false, partition(X,L,L1,L2), all_leq(X,L1,A).", &cs).unwrap();
        assert!(goal_violated(&lfp, &swapped, &b).is_some());
        assert_eq!(goal_violated(&BTreeSet::new(), &g2, &b), None);
    }

    #[test]
    fn refuses_huge_bounds() {
        let b = DomainBounds::new(0, 9, 7);
        assert!(matches!(bounded_lfp(&ClauseSet::new(), &b), Err(OracleError::TooManyTerms { .. })));
    }

    #[test]
    fn monotone_in_bounds() {
        let cs = parse_chc(PARTITION).unwrap();
        let small = bounded_lfp(&cs, &DomainBounds::new(0, 1, 1)).unwrap();
        let large = bounded_lfp(&cs, &DomainBounds::new(0, 2, 2)).unwrap();
        assert!(small.is_subset(&large));
    }
}
