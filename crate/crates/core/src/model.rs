//! Sorts, terms, constraints, atoms and clauses.
//!
//! Every value here is immutable once built; the transformation rules build
//! new clauses instead of editing existing ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    List(Box<Sort>),
}

impl Sort {
    pub fn list_of(elem: Sort) -> Sort {
        Sort::List(Box::new(elem))
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Sort::List(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::List(e) => write!(f, "List({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var { name: name.into(), sort }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Int(i64),
    Bool(bool),
    Nil(Sort),
    Cons(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn int_var(name: impl Into<String>) -> Term {
        Term::var(name, Sort::Int)
    }

    pub fn bool_var(name: impl Into<String>) -> Term {
        Term::var(name, Sort::Bool)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Cons(Box::new(head), Box::new(tail))
    }

    /// Sort of the term. `Nil` carries its element sort, so this is total.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::Int(_) => Sort::Int,
            Term::Bool(_) => Sort::Bool,
            Term::Nil(elem) => Sort::list_of(elem.clone()),
            Term::Cons(h, _) => Sort::list_of(h.sort()),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_constructor(&self) -> bool {
        matches!(self, Term::Nil(_) | Term::Cons(..))
    }

    pub fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            Term::Var(v) => {
                out.insert(v.name.clone(), v.sort.clone());
            }
            Term::Cons(h, t) => {
                h.collect_vars(out);
                t.collect_vars(out);
            }
            _ => {}
        }
    }

    pub fn collect_var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out.into_keys().collect()
    }

    pub fn mentions_list(&self) -> bool {
        self.sort().is_list()
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v.name == name,
            Term::Cons(h, t) => h.occurs(name) || t.occurs(name),
            _ => false,
        }
    }

    /// Checks that `Cons` heads agree with the element sort of their tails.
    pub fn well_sorted(&self) -> bool {
        match self {
            Term::Cons(h, t) => {
                h.well_sorted() && t.well_sorted() && t.sort() == Sort::list_of(h.sort())
            }
            _ => true,
        }
    }

    pub(crate) fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(v) => match map.get(&v.name) {
                Some(n) => Term::var(n.clone(), v.sort.clone()),
                None => self.clone(),
            },
            Term::Cons(h, t) => Term::cons(h.rename(map), t.rename(map)),
            _ => self.clone(),
        }
    }

    pub fn substitute(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v) => s.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::Cons(h, t) => Term::cons(h.substitute(s), t.substitute(s)),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v.name),
            Term::Int(n) => write!(f, "{n}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::Nil(_) => write!(f, "[]"),
            Term::Cons(h, t) => {
                write!(f, "[{h}")?;
                let mut tail = t.as_ref();
                while let Term::Cons(h2, t2) = tail {
                    write!(f, ",{h2}")?;
                    tail = t2.as_ref();
                }
                match tail {
                    Term::Nil(_) => write!(f, "]"),
                    other => write!(f, "|{other}]"),
                }
            }
        }
    }
}

/// Simultaneous substitution from variable names to terms.
pub type Subst = BTreeMap<String, Term>;

/// Linear integer expression `sum(coeff * var) + constant` with no zero
/// coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<String, i64>,
    pub constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), 1);
        LinExpr { coeffs, constant: 0 }
    }

    pub fn add_term(&mut self, name: &str, coeff: i64) {
        let entry = self.coeffs.entry(name.to_string()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(name);
        }
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(v, *c);
        }
        out.constant += other.constant;
        out
    }

    pub fn scale(&self, k: i64) -> LinExpr {
        if k == 0 {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: self.constant * k,
        }
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        self.plus(&other.scale(-1))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn as_single_var(&self) -> Option<&str> {
        if self.constant == 0 && self.coeffs.len() == 1 {
            let (v, c) = self.coeffs.iter().next().unwrap();
            if *c == 1 {
                return Some(v);
            }
        }
        None
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.coeffs {
            out.add_term(map.get(v).unwrap_or(v), *c);
        }
        out
    }

    /// Replaces integer variables by integer terms; any other term sort is a
    /// sort error reported by the caller.
    fn substitute(&self, s: &Subst) -> Result<LinExpr, ModelError> {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.coeffs {
            match s.get(v) {
                None => out.add_term(v, *c),
                Some(Term::Var(w)) if w.sort == Sort::Int => out.add_term(&w.name, *c),
                Some(Term::Int(n)) => out.constant += c * n,
                Some(other) => {
                    return Err(ModelError::IllSortedSubst {
                        var: v.clone(),
                        expected: Sort::Int,
                        found: other.sort(),
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<i64>) -> Option<i64> {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            acc += c * env(v)?;
        }
        Some(acc)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let pos = self.coeffs.iter().filter(|(_, c)| **c > 0);
        let neg = self.coeffs.iter().filter(|(_, c)| **c < 0);
        for (v, c) in pos.chain(neg) {
            let abs = c.abs();
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else if *c < 0 {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            if abs == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{abs}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "-{}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "=\\=",
            Rel::Le => "=<",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Le => Rel::Gt,
            Rel::Lt => Rel::Ge,
            Rel::Ge => Rel::Lt,
            Rel::Gt => Rel::Le,
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Rel::Eq => lhs == rhs,
            Rel::Ne => lhs != rhs,
            Rel::Le => lhs <= rhs,
            Rel::Lt => lhs < rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomicConstraint {
    Lin { rel: Rel, lhs: LinExpr, rhs: LinExpr },
    BoolBind { var: String, value: bool },
    /// Equality between two boolean variables, produced when unification
    /// meets two boolean argument positions.
    BoolEq { lhs: String, rhs: String },
}

impl AtomicConstraint {
    pub fn lin(lhs: LinExpr, rel: Rel, rhs: LinExpr) -> Self {
        AtomicConstraint::Lin { rel, lhs, rhs }
    }

    pub fn falsity() -> Self {
        AtomicConstraint::lin(LinExpr::constant(0), Rel::Eq, LinExpr::constant(1))
    }

    pub fn bind(var: impl Into<String>, value: bool) -> Self {
        AtomicConstraint::BoolBind { var: var.into(), value }
    }

    pub fn int_vars(&self) -> Vec<&String> {
        match self {
            AtomicConstraint::Lin { lhs, rhs, .. } => lhs.vars().chain(rhs.vars()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn bool_vars(&self) -> Vec<&String> {
        match self {
            AtomicConstraint::BoolBind { var, .. } => vec![var],
            AtomicConstraint::BoolEq { lhs, rhs } => vec![lhs, rhs],
            _ => Vec::new(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        for v in self.int_vars() {
            out.insert(v.clone(), Sort::Int);
        }
        for v in self.bool_vars() {
            out.insert(v.clone(), Sort::Bool);
        }
    }

    pub fn collect_vars_set(&self) -> BTreeSet<String> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out.into_keys().collect()
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            AtomicConstraint::Lin { rel, lhs, rhs } => AtomicConstraint::Lin {
                rel: *rel,
                lhs: lhs.rename(map),
                rhs: rhs.rename(map),
            },
            AtomicConstraint::BoolBind { var, value } => {
                AtomicConstraint::BoolBind { var: r(var), value: *value }
            }
            AtomicConstraint::BoolEq { lhs, rhs } => {
                AtomicConstraint::BoolEq { lhs: r(lhs), rhs: r(rhs) }
            }
        }
    }

    /// Applies a substitution. Boolean variables mapped to constants turn
    /// into bindings, trivially true results are dropped (`None`).
    pub fn substitute(&self, s: &Subst) -> Result<Option<Self>, ModelError> {
        let bool_target = |v: &String| -> Result<Result<String, bool>, ModelError> {
            match s.get(v) {
                None => Ok(Ok(v.clone())),
                Some(Term::Var(w)) if w.sort == Sort::Bool => Ok(Ok(w.name.clone())),
                Some(Term::Bool(b)) => Ok(Err(*b)),
                Some(other) => Err(ModelError::IllSortedSubst {
                    var: v.clone(),
                    expected: Sort::Bool,
                    found: other.sort(),
                }),
            }
        };
        Ok(match self {
            AtomicConstraint::Lin { rel, lhs, rhs } => {
                let lhs = lhs.substitute(s)?;
                let rhs = rhs.substitute(s)?;
                Some(AtomicConstraint::Lin { rel: *rel, lhs, rhs })
            }
            AtomicConstraint::BoolBind { var, value } => match bool_target(var)? {
                Ok(name) => Some(AtomicConstraint::BoolBind { var: name, value: *value }),
                Err(b) if b == *value => None,
                Err(_) => Some(AtomicConstraint::falsity()),
            },
            AtomicConstraint::BoolEq { lhs, rhs } => match (bool_target(lhs)?, bool_target(rhs)?) {
                (Ok(a), Ok(b)) if a == b => None,
                (Ok(a), Ok(b)) => Some(AtomicConstraint::BoolEq { lhs: a, rhs: b }),
                (Ok(a), Err(v)) | (Err(v), Ok(a)) => Some(AtomicConstraint::BoolBind { var: a, value: v }),
                (Err(x), Err(y)) if x == y => None,
                (Err(_), Err(_)) => Some(AtomicConstraint::falsity()),
            },
        })
    }
}

impl fmt::Display for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicConstraint::Lin { rel, lhs, rhs } => {
                let rhs_s = rhs.to_string();
                // `X=< -1` rather than `X=<-1`, which would lex as `=<-`.
                let sep = if rhs_s.starts_with('-') { " " } else { "" };
                write!(f, "{lhs}{}{sep}{rhs_s}", rel.symbol())
            }
            AtomicConstraint::BoolBind { var, value } => write!(f, "{var}={value}"),
            AtomicConstraint::BoolEq { lhs, rhs } => write!(f, "{lhs}={rhs}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Constraint {
    pub conjuncts: Vec<AtomicConstraint>,
}

impl Constraint {
    pub fn new(conjuncts: Vec<AtomicConstraint>) -> Self {
        Constraint { conjuncts }
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn and(&self, other: &Constraint) -> Constraint {
        let mut conjuncts = self.conjuncts.clone();
        conjuncts.extend(other.conjuncts.iter().cloned());
        Constraint { conjuncts }
    }

    pub fn with(&self, extra: AtomicConstraint) -> Constraint {
        let mut conjuncts = self.conjuncts.clone();
        conjuncts.push(extra);
        Constraint { conjuncts }
    }

    pub fn vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        for c in &self.conjuncts {
            c.collect_vars(&mut out);
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Constraint {
        Constraint { conjuncts: self.conjuncts.iter().map(|c| c.rename(map)).collect() }
    }

    pub fn substitute(&self, s: &Subst) -> Result<Constraint, ModelError> {
        let mut conjuncts = Vec::new();
        for c in &self.conjuncts {
            if let Some(c) = c.substitute(s)? {
                conjuncts.push(c);
            }
        }
        Ok(Constraint { conjuncts })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn occurs(&self, name: &str) -> bool {
        self.args.iter().any(|a| a.occurs(name))
    }

    pub fn collect_var_names(&self) -> BTreeSet<String> {
        self.vars().into_keys().collect()
    }

    pub fn has_list_arg(&self) -> bool {
        self.args.iter().any(Term::mentions_list)
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.rename(map)).collect() }
    }

    pub fn substitute(&self, s: &Subst) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.substitute(s)).collect() }
    }

    pub fn sorts(&self) -> Vec<Sort> {
        self.args.iter().map(Term::sort).collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Origin {
    #[default]
    Program,
    Goal,
    Definition,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    /// `None` is the `false` head of a goal.
    pub head: Option<Atom>,
    pub constraint: Constraint,
    pub body: Vec<Atom>,
    pub tag: Option<String>,
    pub origin: Origin,
}

impl Clause {
    pub fn new(head: Option<Atom>, constraint: Constraint, body: Vec<Atom>) -> Self {
        let origin = if head.is_none() { Origin::Goal } else { Origin::Program };
        Clause { head, constraint, body, tag: None, origin }
    }

    pub fn fact(head: Atom) -> Self {
        Clause::new(Some(head), Constraint::default(), Vec::new())
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn is_goal(&self) -> bool {
        self.head.is_none()
    }

    /// The head also occurs in the body, so the clause derives nothing new.
    pub fn is_tautology(&self) -> bool {
        self.head.as_ref().is_some_and(|h| self.body.contains(h))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(self.body.iter())
    }

    /// Variables with their sorts; constraint-only variables get the sort
    /// implied by the constraint they appear in.
    pub fn var_sorts(&self) -> BTreeMap<String, Sort> {
        let mut out = self.constraint.vars();
        for a in self.atoms() {
            a.collect_vars(&mut out);
        }
        out
    }

    pub fn atom_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        for a in self.atoms() {
            a.collect_vars(&mut out);
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Clause {
        Clause {
            head: self.head.as_ref().map(|h| h.rename(map)),
            constraint: self.constraint.rename(map),
            body: self.body.iter().map(|a| a.rename(map)).collect(),
            tag: self.tag.clone(),
            origin: self.origin,
        }
    }

    pub fn mentions_list(&self) -> bool {
        self.atoms().any(Atom::has_list_arg)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Some(h) => write!(f, "{h}")?,
            None => write!(f, "false")?,
        }
        let mut parts: Vec<String> = self.constraint.conjuncts.iter().map(|c| c.to_string()).collect();
        parts.extend(self.body.iter().map(|a| a.to_string()));
        if !parts.is_empty() || self.head.is_none() {
            write!(f, " :- {}", parts.join(", "))?;
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClauseSet {
    pub signatures: BTreeMap<String, Vec<Sort>>,
    pub clauses: Vec<Clause>,
}

impl ClauseSet {
    pub fn new() -> Self {
        ClauseSet::default()
    }

    /// Builds a set and infers signatures from the atoms that occur.
    pub fn from_clauses(clauses: Vec<Clause>) -> Result<Self, ModelError> {
        let mut cs = ClauseSet { signatures: BTreeMap::new(), clauses: Vec::new() };
        for c in clauses {
            cs.push(c)?;
        }
        Ok(cs)
    }

    pub fn push(&mut self, c: Clause) -> Result<(), ModelError> {
        for a in c.atoms() {
            self.declare(&a.pred, a.sorts())?;
        }
        self.clauses.push(c);
        Ok(())
    }

    pub fn declare(&mut self, pred: &str, sorts: Vec<Sort>) -> Result<(), ModelError> {
        match self.signatures.get(pred) {
            Some(existing) if *existing != sorts => Err(ModelError::SignatureMismatch {
                pred: pred.to_string(),
                declared: existing.clone(),
                found: sorts,
            }),
            Some(_) => Ok(()),
            None => {
                self.signatures.insert(pred.to_string(), sorts);
                Ok(())
            }
        }
    }

    pub fn defining(&self, pred: &str) -> impl Iterator<Item = &Clause> + '_ {
        let pred = pred.to_string();
        self.clauses.iter().filter(move |c| c.head.as_ref().is_some_and(|h| h.pred == pred))
    }

    pub fn goals(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.is_goal())
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn extend(&mut self, other: &ClauseSet) -> Result<(), ModelError> {
        for c in &other.clauses {
            self.push(c.clone())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("ill-sorted substitution for {var}: expected {expected}, found {found}")]
    IllSortedSubst { var: String, expected: Sort, found: Sort },
    #[error("predicate {pred} declared as {declared:?} but used with {found:?}")]
    SignatureMismatch { pred: String, declared: Vec<Sort>, found: Vec<Sort> },
    #[error("variable {var} used with sorts {first} and {second}")]
    VarSortConflict { var: String, first: Sort, second: Sort },
    #[error("ill-sorted list term {0}")]
    IllSortedTerm(String),
}

pub fn free_vars(c: &Clause) -> BTreeSet<String> {
    c.var_sorts().into_keys().collect()
}

/// Generates fresh names `V_0, V_1, ...` skipping anything already taken.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameSupply {
    next: usize,
}

impl NameSupply {
    pub const PREFIX: &'static str = "V_";

    pub fn new() -> Self {
        NameSupply::default()
    }

    pub fn fresh(&mut self, avoid: &BTreeSet<String>) -> String {
        loop {
            let name = format!("{}{}", Self::PREFIX, self.next);
            self.next += 1;
            if !avoid.contains(&name) {
                return name;
            }
        }
    }

    pub fn counter(&self) -> usize {
        self.next
    }
}

/// Renames the clause variables that clash with `avoid`. Returns the renamed
/// clause; variables not in `avoid` keep their names.
pub fn rename_apart(c: &Clause, avoid: &BTreeSet<String>, names: &mut NameSupply) -> Clause {
    let vars = free_vars(c);
    let mut taken: BTreeSet<String> = avoid.union(&vars).cloned().collect();
    let mut map = BTreeMap::new();
    for v in vars.iter().filter(|v| avoid.contains(*v)) {
        let fresh = names.fresh(&taken);
        taken.insert(fresh.clone());
        map.insert(v.clone(), fresh);
    }
    c.rename(&map)
}

/// Applies a simultaneous, sort-preserving substitution to every component.
pub fn apply_subst(c: &Clause, s: &Subst) -> Result<Clause, ModelError> {
    let sorts = c.var_sorts();
    for (v, t) in s {
        if let Some(sort) = sorts.get(v) {
            if *sort != t.sort() {
                return Err(ModelError::IllSortedSubst {
                    var: v.clone(),
                    expected: sort.clone(),
                    found: t.sort(),
                });
            }
        }
    }
    Ok(Clause {
        head: c.head.as_ref().map(|h| h.substitute(s)),
        constraint: c.constraint.substitute(s)?,
        body: c.body.iter().map(|a| a.substitute(s)).collect(),
        tag: c.tag.clone(),
        origin: c.origin,
    })
}

pub fn is_list_free(cs: &ClauseSet) -> bool {
    cs.signatures.values().all(|sig| sig.iter().all(|s| !s.is_list()))
        && cs.clauses.iter().all(|c| !c.mentions_list())
}

/// Checks every well-sortedness invariant of a clause set.
pub fn validate(cs: &ClauseSet) -> Result<(), ModelError> {
    for c in &cs.clauses {
        validate_clause(c)?;
        for a in c.atoms() {
            match cs.signatures.get(&a.pred) {
                Some(sig) if *sig == a.sorts() => {}
                Some(sig) => {
                    return Err(ModelError::SignatureMismatch {
                        pred: a.pred.clone(),
                        declared: sig.clone(),
                        found: a.sorts(),
                    })
                }
                None => {
                    return Err(ModelError::SignatureMismatch {
                        pred: a.pred.clone(),
                        declared: Vec::new(),
                        found: a.sorts(),
                    })
                }
            }
        }
    }
    Ok(())
}

pub fn validate_clause(c: &Clause) -> Result<(), ModelError> {
    let mut seen: BTreeMap<String, Sort> = BTreeMap::new();
    let mut note = |name: &String, sort: &Sort| -> Result<(), ModelError> {
        match seen.get(name) {
            Some(s) if s != sort => Err(ModelError::VarSortConflict {
                var: name.clone(),
                first: s.clone(),
                second: sort.clone(),
            }),
            _ => {
                seen.insert(name.clone(), sort.clone());
                Ok(())
            }
        }
    };
    fn term_vars(t: &Term, out: &mut Vec<(String, Sort)>) {
        match t {
            Term::Var(v) => out.push((v.name.clone(), v.sort.clone())),
            Term::Cons(h, tl) => {
                term_vars(h, out);
                term_vars(tl, out);
            }
            _ => {}
        }
    }
    for a in c.atoms() {
        for t in &a.args {
            if !t.well_sorted() {
                return Err(ModelError::IllSortedTerm(t.to_string()));
            }
            let mut vs = Vec::new();
            term_vars(t, &mut vs);
            for (n, s) in vs {
                note(&n, &s)?;
            }
        }
    }
    for k in &c.constraint.conjuncts {
        for v in k.int_vars() {
            note(v, &Sort::Int)?;
        }
        for v in k.bool_vars() {
            note(v, &Sort::Bool)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_clause;

    fn names(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_vars_of_derived_clauses() {
        let c = parse_clause("pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).").unwrap();
        assert_eq!(free_vars(&c), names(&["A", "B", "C", "D", "E"]));
        let c = parse_clause("false :- .").unwrap();
        assert!(free_vars(&c).is_empty());
        let c = parse_clause("qss(true).").unwrap();
        assert!(free_vars(&c).is_empty());
    }

    #[test]
    fn rename_apart_only_touches_clashes() {
        let mut ns = NameSupply::new();
        let c = parse_clause("p(A) :- q(A).").unwrap();
        let r = rename_apart(&c, &names(&["A"]), &mut ns);
        let fv = free_vars(&r);
        assert_eq!(fv.len(), 1);
        assert!(!fv.contains("A"));

        let c = parse_clause("p(A) :- q(B).").unwrap();
        assert_eq!(rename_apart(&c, &BTreeSet::new(), &mut ns), c);

        let c = parse_clause("p(A,B) :- q(B).").unwrap();
        let r = rename_apart(&c, &names(&["B"]), &mut ns);
        let fv = free_vars(&r);
        assert!(fv.contains("A") && !fv.contains("B"));
    }

    #[test]
    fn subst_examples() {
        let c = parse_clause("p(X) :- X>=0.").unwrap();
        let s: Subst = [("X".to_string(), Term::int_var("Y"))].into();
        assert_eq!(apply_subst(&c, &s).unwrap().to_string(), "p(Y) :- Y>=0.");

        let c = parse_clause("p([Z|L]) :- q(L).").unwrap();
        let lst = Term::cons(Term::int_var("Y"), Term::var("Ys", Sort::list_of(Sort::Int)));
        let s: Subst = [("L".to_string(), lst)].into();
        assert_eq!(apply_subst(&c, &s).unwrap().to_string(), "p([Z,Y|Ys]) :- q([Y|Ys]).");

        let c = parse_clause("p(N) :- N=M+1.").unwrap();
        let s: Subst = [("M".to_string(), Term::Int(2))].into();
        assert_eq!(apply_subst(&c, &s).unwrap().to_string(), "p(N) :- N=3.");
    }

    #[test]
    fn ill_sorted_subst_is_rejected() {
        let c = parse_clause("p(X) :- X>=0.").unwrap();
        let s: Subst = [("X".to_string(), Term::Bool(true))].into();
        assert!(matches!(apply_subst(&c, &s), Err(ModelError::IllSortedSubst { .. })));
    }

    #[test]
    fn bool_subst_folds_bindings() {
        let c = parse_clause("p(B) :- B=true.").unwrap();
        let s: Subst = [("B".to_string(), Term::Bool(true))].into();
        assert_eq!(apply_subst(&c, &s).unwrap().to_string(), "p(true).");
        let s: Subst = [("B".to_string(), Term::Bool(false))].into();
        assert_eq!(apply_subst(&c, &s).unwrap().to_string(), "p(false) :- 0=1.");
    }

    #[test]
    fn empty_set_is_list_free() {
        assert!(is_list_free(&ClauseSet::new()));
    }
}
