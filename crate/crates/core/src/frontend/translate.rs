//! Translation of function definitions to clauses and of contracts to goals.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{ArithOp, CmpOp, Expr, FunDef, Pattern, Type};
use super::cata::recognize_cata;
use super::FrontendError;
use crate::model::{Atom, AtomicConstraint, Clause, ClauseSet, Constraint, LinExpr, Rel, Sort, Subst, Term};
use crate::transform::{infer_catamorphisms, Functionality, Lemma};

/// Everything produced from one source file.
#[derive(Debug, Clone)]
pub struct Translation {
    pub program: ClauseSet,
    /// Tagged `G1`, `G2`, ... in source order.
    pub goals: Vec<Clause>,
    pub lemmas: Vec<Lemma>,
    /// Input/output positions of every translated function.
    pub functions: Functionality,
}

pub fn translate(fs: &[FunDef]) -> Result<Translation, FrontendError> {
    if fs.is_empty() {
        return Err(FrontendError::Empty);
    }
    let program = translate_program(fs)?;
    let (goals, lemmas) = translate_contracts(fs)?;
    let mut functions = Functionality::default();
    for f in fs {
        let n = f.params.len();
        functions.declare(f.name.clone(), (n..n + f.ret.flatten().len()).collect());
    }
    Ok(Translation { program, goals, lemmas, functions })
}

pub(crate) fn sort_of(t: &Type) -> Sort {
    match t {
        Type::Nat | Type::Int => Sort::Int,
        Type::Bool => Sort::Bool,
        Type::List => Sort::list_of(Sort::Int),
        Type::Tuple(_) => unreachable!("tuples are flattened before sorting"),
    }
}

/// Source variable `xs` becomes clause variable `Xs`.
fn capitalize(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => "V".into(),
    }
}

fn signature(f: &FunDef) -> Vec<Sort> {
    f.params.iter().map(|(_, t)| t).chain(f.ret.flatten().iter()).map(sort_of).collect::<Vec<_>>()
}

fn lin(t: &Term) -> Option<LinExpr> {
    match t {
        Term::Int(n) => Some(LinExpr::constant(*n)),
        Term::Var(v) if v.sort == Sort::Int => Some(LinExpr::var(v.name.clone())),
        _ => None,
    }
}

fn rel(op: CmpOp) -> Rel {
    match op {
        CmpOp::Eq => Rel::Eq,
        CmpOp::Ne => Rel::Ne,
        CmpOp::Lt => Rel::Lt,
        CmpOp::Le => Rel::Le,
        CmpOp::Gt => Rel::Gt,
        CmpOp::Ge => Rel::Ge,
    }
}

/// Variable names already used in one clause.
#[derive(Debug, Clone, Default)]
struct Names(BTreeSet<String>);

impl Names {
    /// `base` itself when free, else `base1`, `base2`, ...
    fn fresh(&mut self, base: &str) -> String {
        if self.0.insert(base.to_string()) {
            return base.to_string();
        }
        self.numbered(base)
    }

    /// Always suffixed: `base1`, `base2`, ...
    fn numbered(&mut self, base: &str) -> String {
        (1..).map(|k| format!("{base}{k}")).find(|n| self.0.insert(n.clone())).unwrap()
    }
}

/// One symbolic execution path through a function body.
#[derive(Debug, Clone)]
struct Path {
    head: Vec<Term>,
    constraints: Vec<AtomicConstraint>,
    atoms: Vec<Atom>,
    elements: Vec<String>,
    nil_case: bool,
    names: Names,
    env: BTreeMap<String, Vec<Term>>,
}

impl Path {
    fn refine(&mut self, var: &str, t: &Term) {
        let s: Subst = [(var.to_string(), t.clone())].into();
        self.head = self.head.iter().map(|x| x.substitute(&s)).collect();
        self.atoms = self.atoms.iter().map(|a| a.substitute(&s)).collect();
        for vs in self.env.values_mut() {
            *vs = vs.iter().map(|x| x.substitute(&s)).collect();
        }
    }

    fn rename(&mut self, from: &str, to: &str) {
        let m: BTreeMap<String, String> = [(from.to_string(), to.to_string())].into();
        self.head = self.head.iter().map(|x| x.rename(&m)).collect();
        self.atoms = self.atoms.iter().map(|a| a.rename(&m)).collect();
        self.constraints = self.constraints.iter().map(|c| c.rename(&m)).collect();
        for vs in self.env.values_mut() {
            *vs = vs.iter().map(|x| x.rename(&m)).collect();
        }
    }
}

struct Sigs<'a> {
    fs: BTreeMap<&'a str, &'a FunDef>,
}

impl<'a> Sigs<'a> {
    fn new(fs: &'a [FunDef]) -> Self {
        Sigs { fs: fs.iter().map(|f| (f.name.as_str(), f)).collect() }
    }
}

struct BodyTranslator<'a> {
    sigs: &'a Sigs<'a>,
    function: &'a str,
}

type Branches = Vec<(Path, Vec<Term>)>;

impl BodyTranslator<'_> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, FrontendError> {
        Err(FrontendError::Translate { function: self.function.to_string(), message: message.into() })
    }

    fn scalar(&self, e: &Expr, p: Path) -> Result<Vec<(Path, Term)>, FrontendError> {
        let mut out = Vec::new();
        for (p, vs) in self.expr(e, p)? {
            match <[Term; 1]>::try_from(vs) {
                Ok([t]) => out.push((p, t)),
                Err(_) => return self.fail("a tuple is used where a single value is expected"),
            }
        }
        Ok(out)
    }

    /// Values of a sequence of expressions, concatenated.
    fn exprs(&self, es: &[Expr], p: Path) -> Result<Branches, FrontendError> {
        let mut acc: Branches = vec![(p, Vec::new())];
        for e in es {
            let mut next = Vec::new();
            for (p, vs) in acc {
                for (p2, ws) in self.expr(e, p)? {
                    let mut all = vs.clone();
                    all.extend(ws);
                    next.push((p2, all));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    fn expr(&self, e: &Expr, p: Path) -> Result<Branches, FrontendError> {
        match e {
            Expr::Var(x) => match p.env.get(x).cloned() {
                Some(vs) => Ok(vec![(p, vs)]),
                None => self.fail(format!("unbound variable `{x}`")),
            },
            Expr::Int(n) => Ok(vec![(p, vec![Term::Int(*n)])]),
            Expr::Bool(b) => Ok(vec![(p, vec![Term::Bool(*b)])]),
            Expr::Nil => Ok(vec![(p, vec![Term::Nil(Sort::Int)])]),
            Expr::Cons(h, t) => {
                let mut out = Vec::new();
                for (p, hv) in self.scalar(h, p)? {
                    for (p, tv) in self.scalar(t, p)? {
                        out.push((p, vec![Term::cons(hv.clone(), tv)]));
                    }
                }
                Ok(out)
            }
            Expr::Tuple(es) => self.exprs(es, p),
            Expr::Proj(e, k) => {
                let mut out = Vec::new();
                for (p, vs) in self.expr(e, p)? {
                    match vs.get(k - 1) {
                        Some(v) => out.push((p, vec![v.clone()])),
                        None => return self.fail(format!("projection _{k} out of range")),
                    }
                }
                Ok(out)
            }
            Expr::Call(f, args) => {
                let Some(def) = self.sigs.fs.get(f.as_str()) else {
                    return self.fail(format!("call to undefined function `{f}`"));
                };
                if def.params.len() != args.len() {
                    return self.fail(format!("`{f}` expects {} arguments", def.params.len()));
                }
                let mut out = Vec::new();
                for (mut p, mut vs) in self.exprs(args, p)? {
                    let mut results = Vec::new();
                    for t in def.ret.flatten() {
                        let base = match t {
                            Type::Bool => "B",
                            Type::List => "R",
                            _ => "M",
                        };
                        results.push(Term::var(p.names.fresh(base), sort_of(&t)));
                    }
                    vs.extend(results.iter().cloned());
                    p.atoms.push(Atom::new(f.clone(), vs));
                    out.push((p, results));
                }
                Ok(out)
            }
            Expr::Arith(op, a, b) => {
                let mut out = Vec::new();
                for (p, x) in self.scalar(a, p)? {
                    for (mut p, y) in self.scalar(b, p)? {
                        let (Some(lx), Some(ly)) = (lin(&x), lin(&y)) else {
                            return self.fail("arithmetic on a non-integer value");
                        };
                        let value = match op {
                            ArithOp::Add => lx.plus(&ly),
                            ArithOp::Sub => lx.minus(&ly),
                            ArithOp::Mul if lx.is_constant() => ly.scale(lx.constant),
                            ArithOp::Mul if ly.is_constant() => lx.scale(ly.constant),
                            ArithOp::Mul => return self.fail("non-linear multiplication"),
                        };
                        if value.is_constant() {
                            out.push((p, vec![Term::Int(value.constant)]));
                            continue;
                        }
                        let n = p.names.fresh("N");
                        p.constraints.push(AtomicConstraint::lin(LinExpr::var(n.clone()), Rel::Eq, value));
                        out.push((p, vec![Term::int_var(n)]));
                    }
                }
                Ok(out)
            }
            Expr::Cmp(..) => Ok(self
                .cond(e, p)?
                .into_iter()
                .map(|(p, b)| (p, vec![Term::Bool(b)]))
                .collect()),
            Expr::If(c, a, b) => {
                let mut out = Vec::new();
                for (p, taken) in self.cond(c, p)? {
                    out.extend(self.expr(if taken { a } else { b }, p)?);
                }
                Ok(out)
            }
            Expr::Match(x, cases) => {
                let subject = match p.env.get(x).map(Vec::as_slice) {
                    Some([t]) => t.clone(),
                    _ => return self.fail(format!("match subject `{x}` is not a list variable")),
                };
                let mut out = Vec::new();
                for case in cases {
                    let mut q = p.clone();
                    match (&case.pattern, &subject) {
                        (Pattern::Nil, Term::Var(v)) => {
                            q.refine(&v.name, &Term::Nil(Sort::Int));
                            q.nil_case = true;
                        }
                        (Pattern::Nil, Term::Nil(_)) => {}
                        (Pattern::Cons(h, t), Term::Var(v)) => {
                            let hv = q.names.fresh(&capitalize(h));
                            let tv = q.names.fresh(&capitalize(t));
                            let (ht, tt) = (Term::int_var(hv.clone()), Term::var(tv, Sort::list_of(Sort::Int)));
                            q.refine(&v.name, &Term::cons(ht.clone(), tt.clone()));
                            q.env.insert(h.clone(), vec![ht]);
                            q.env.insert(t.clone(), vec![tt]);
                            q.elements.push(hv);
                        }
                        (Pattern::Cons(h, t), Term::Cons(ht, tt)) => {
                            q.env.insert(h.clone(), vec![(**ht).clone()]);
                            q.env.insert(t.clone(), vec![(**tt).clone()]);
                        }
                        _ => continue,
                    }
                    let guarded = match &case.guard {
                        Some(g) => self.cond(g, q)?.into_iter().filter(|(_, b)| *b).map(|(q, _)| q).collect(),
                        None => vec![q],
                    };
                    for q in guarded {
                        out.extend(self.expr(&case.body, q)?);
                    }
                }
                Ok(out)
            }
            Expr::Let(names, value, rest) => {
                let mut out = Vec::new();
                let before = p.names.0.clone();
                for (mut p, vs) in self.expr(value, p)? {
                    if names.len() == vs.len() {
                        let mut renamed = Vec::new();
                        for (n, v) in names.iter().zip(vs) {
                            let wanted = capitalize(n);
                            match v.as_var() {
                                Some(var) if !before.contains(&var.name) && !p.names.0.contains(&wanted) => {
                                    p.names.0.insert(wanted.clone());
                                    p.rename(&var.name.clone(), &wanted);
                                    renamed.push(Term::var(wanted, var.sort.clone()));
                                }
                                _ => renamed.push(v),
                            }
                        }
                        for (n, v) in names.iter().zip(&renamed) {
                            p.env.insert(n.clone(), vec![v.clone()]);
                        }
                    } else if names.len() == 1 {
                        p.env.insert(names[0].clone(), vs);
                    } else {
                        return self.fail(format!("cannot bind {} names to {} values", names.len(), vs.len()));
                    }
                    out.extend(self.expr(rest, p)?);
                }
                Ok(out)
            }
            Expr::Head(_) | Expr::Tail(_) => self.fail("list observers may only appear in contracts"),
            Expr::And(..) | Expr::Or(..) | Expr::Implies(..) | Expr::Forall(..) => {
                self.fail("logical connectives may only appear in conditions and contracts")
            }
        }
    }

    /// Splits a path on a condition; each result carries the truth value taken.
    fn cond(&self, e: &Expr, p: Path) -> Result<Vec<(Path, bool)>, FrontendError> {
        match e {
            Expr::Bool(b) => Ok(vec![(p, *b)]),
            Expr::Cmp(op, a, b) => {
                let mut out = Vec::new();
                for (p, x) in self.scalar(a, p)? {
                    for (p, y) in self.scalar(b, p)? {
                        out.extend(self.compare(*op, &x, &y, p)?);
                    }
                }
                Ok(out)
            }
            Expr::And(a, b) => {
                let mut out = Vec::new();
                for (p, t) in self.cond(a, p)? {
                    if t {
                        out.extend(self.cond(b, p)?);
                    } else {
                        out.push((p, false));
                    }
                }
                Ok(out)
            }
            Expr::Or(a, b) => {
                let mut out = Vec::new();
                for (p, t) in self.cond(a, p)? {
                    if t {
                        out.push((p, true));
                    } else {
                        out.extend(self.cond(b, p)?);
                    }
                }
                Ok(out)
            }
            _ => {
                let mut out = Vec::new();
                for (p, v) in self.scalar(e, p)? {
                    match &v {
                        Term::Bool(b) => out.push((p, *b)),
                        Term::Var(x) if x.sort == Sort::Bool => {
                            for b in [true, false] {
                                let mut q = p.clone();
                                q.constraints.push(AtomicConstraint::bind(x.name.clone(), b));
                                out.push((q, b));
                            }
                        }
                        _ => return self.fail("condition is not boolean"),
                    }
                }
                Ok(out)
            }
        }
    }

    fn compare(&self, op: CmpOp, x: &Term, y: &Term, p: Path) -> Result<Vec<(Path, bool)>, FrontendError> {
        let r = rel(op);
        match (x, y) {
            (Term::Bool(a), Term::Bool(b)) if matches!(op, CmpOp::Eq | CmpOp::Ne) => {
                Ok(vec![(p, (a == b) == (op == CmpOp::Eq))])
            }
            (Term::Var(v), Term::Bool(b)) | (Term::Bool(b), Term::Var(v))
                if v.sort == Sort::Bool && matches!(op, CmpOp::Eq | CmpOp::Ne) =>
            {
                let mut out = Vec::new();
                for value in [*b, !*b] {
                    let mut q = p.clone();
                    q.constraints.push(AtomicConstraint::bind(v.name.clone(), value));
                    out.push((q, (value == *b) == (op == CmpOp::Eq)));
                }
                Ok(out)
            }
            _ => {
                let (Some(lx), Some(ly)) = (lin(x), lin(y)) else {
                    return self.fail("comparison between unsupported values");
                };
                if lx.is_constant() && ly.is_constant() {
                    return Ok(vec![(p, r.holds(lx.constant, ly.constant))]);
                }
                let mut t = p.clone();
                t.constraints.push(AtomicConstraint::lin(lx.clone(), r, ly.clone()));
                let mut f = p;
                f.constraints.push(AtomicConstraint::lin(lx, r.negate(), ly));
                Ok(vec![(t, true), (f, false)])
            }
        }
    }
}

/// One clause per execution path of every function body.
pub fn translate_program(fs: &[FunDef]) -> Result<ClauseSet, FrontendError> {
    let sigs = Sigs::new(fs);
    let mut cs = ClauseSet::new();
    for f in fs {
        cs.declare(&f.name, signature(f))?;
    }
    for f in fs {
        for c in translate_function(f, &sigs)? {
            cs.push(c)?;
        }
    }
    Ok(cs)
}

fn translate_function(f: &FunDef, sigs: &Sigs<'_>) -> Result<Vec<Clause>, FrontendError> {
    let tr = BodyTranslator { sigs, function: &f.name };
    let mut names = Names::default();
    let mut head = Vec::new();
    let mut env = BTreeMap::new();
    for (x, t) in &f.params {
        if matches!(t, Type::Tuple(_)) {
            return tr.fail("tuple-typed parameters are not supported");
        }
        let v = Term::var(names.fresh(&capitalize(x)), sort_of(t));
        head.push(v.clone());
        env.insert(x.clone(), vec![v]);
    }
    let start = Path {
        head,
        constraints: Vec::new(),
        atoms: Vec::new(),
        elements: Vec::new(),
        nil_case: false,
        names,
        env,
    };
    let outs = f.ret.flatten();
    let mut clauses = Vec::new();
    for (mut p, vs) in tr.expr(&f.body, start)? {
        if vs.len() != outs.len() {
            return tr.fail(format!("body yields {} values, the return type has {}", vs.len(), outs.len()));
        }
        let mut args = p.head.clone();
        for (t, v) in outs.iter().zip(vs) {
            let v = match (t, v) {
                (Type::Bool, Term::Bool(b)) => {
                    let n = p.names.fresh("B");
                    p.constraints.push(AtomicConstraint::bind(n.clone(), b));
                    Term::bool_var(n)
                }
                (Type::Nat | Type::Int, Term::Int(k)) => {
                    let n = p.names.fresh("N");
                    p.constraints.push(AtomicConstraint::lin(LinExpr::var(n.clone()), Rel::Eq, LinExpr::constant(k)));
                    Term::int_var(n)
                }
                (t, v) if v.sort() == sort_of(t) => v,
                (t, v) => return tr.fail(format!("result {v} does not have type {t}")),
            };
            args.push(v);
        }
        let mut nonneg: Vec<String> = Vec::new();
        if !(p.nil_case && f.ret.mentions_list()) {
            for ((_, t), term) in f.params.iter().zip(&p.head) {
                if *t == Type::Nat {
                    if let Some(v) = term.as_var() {
                        nonneg.push(v.name.clone());
                    }
                }
            }
            nonneg.extend(p.elements.iter().cloned());
        }
        let mut seen = BTreeSet::new();
        let mut conjuncts: Vec<AtomicConstraint> = nonneg
            .into_iter()
            .filter(|v| seen.insert(v.clone()))
            .map(|v| AtomicConstraint::lin(LinExpr::var(v), Rel::Ge, LinExpr::constant(0)))
            .collect();
        conjuncts.extend(p.constraints);
        clauses.push(Clause::new(Some(Atom::new(f.name.clone(), args)), Constraint::new(conjuncts), p.atoms));
    }
    Ok(clauses)
}

/// One goal per pair of precondition case and postcondition conjunct, and a
/// lemma for every goal that has a catamorphism conclusion.
pub fn translate_contracts(fs: &[FunDef]) -> Result<(Vec<Clause>, Vec<Lemma>), FrontendError> {
    let catas: BTreeMap<&str, &FunDef> =
        fs.iter().filter(|f| recognize_cata(f).is_some()).map(|f| (f.name.as_str(), f)).collect();
    let mut goals = Vec::new();
    let mut counter = 0;
    for f in fs {
        let Some((res, post)) = &f.ensuring else { continue };
        let ctx = ContractCtx { f, res, catas: &catas };
        let cases = match &f.require {
            Some(r) => dnf(r).map_err(|m| ctx.error(m))?,
            None => vec![Vec::new()],
        };
        for conjunct in conjuncts(post) {
            counter += 1;
            let base = format!("G{counter}");
            let mut ordered: Vec<&Vec<&Expr>> = cases.iter().collect();
            ordered.sort_by_key(|c| has_nil_test(c));
            let mut taken = BTreeSet::new();
            for case in ordered {
                for goal in ctx.goals(case, conjunct)? {
                    let stem = if has_nil_test(case) { format!("{base}_nil") } else { base.clone() };
                    let tag = (1..)
                        .map(|k| if k == 1 { stem.clone() } else { format!("{stem}_{k}") })
                        .find(|t| taken.insert(t.clone()))
                        .unwrap();
                    goals.push(goal.with_tag(tag));
                }
            }
        }
    }
    let program = translate_program(fs)?;
    let specs = infer_catamorphisms(&program);
    let lemmas = goals
        .iter()
        .filter_map(|g| Lemma::from_goal(g.tag.as_deref().unwrap_or("G"), g, &specs).ok())
        .collect();
    Ok((goals, lemmas))
}

fn conjuncts(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::And(a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        e => vec![e],
    }
}

/// Disjunctive normal form over literals; implications are not allowed here.
fn dnf(e: &Expr) -> Result<Vec<Vec<&Expr>>, String> {
    match e {
        Expr::And(a, b) => {
            let (l, r) = (dnf(a)?, dnf(b)?);
            Ok(l.iter().flat_map(|x| r.iter().map(move |y| x.iter().chain(y).copied().collect())).collect())
        }
        Expr::Or(a, b) => {
            let mut v = dnf(a)?;
            v.extend(dnf(b)?);
            Ok(v)
        }
        Expr::Implies(..) => Err("implication inside a premise".into()),
        Expr::Forall(..) => Err("forall inside a premise".into()),
        e => Ok(vec![vec![e]]),
    }
}

fn nil_test(e: &Expr) -> Option<&str> {
    match e {
        Expr::Cmp(CmpOp::Eq, a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Var(x), Expr::Nil) | (Expr::Nil, Expr::Var(x)) => Some(x),
            _ => None,
        },
        _ => None,
    }
}

fn has_nil_test(case: &[&Expr]) -> bool {
    case.iter().any(|e| nil_test(e).is_some())
}

fn observed(e: &Expr, out: &mut BTreeSet<String>) {
    super::parser::visit(e, &mut |e| {
        if let Expr::Head(x) | Expr::Tail(x) = e {
            if let Expr::Var(v) = x.as_ref() {
                out.insert(v.clone());
            }
        }
    });
}

struct ContractCtx<'a> {
    f: &'a FunDef,
    res: &'a str,
    catas: &'a BTreeMap<&'a str, &'a FunDef>,
}

/// Goal under construction.
#[derive(Default)]
struct GoalState {
    names: Names,
    env: BTreeMap<String, Term>,
    /// Result variables.
    results: Vec<Term>,
    atoms: Vec<Atom>,
    constraints: Vec<AtomicConstraint>,
}

impl ContractCtx<'_> {
    fn error(&self, message: impl Into<String>) -> FrontendError {
        FrontendError::Contract { function: self.f.name.clone(), message: message.into() }
    }

    fn goals(&self, case: &[&Expr], conjunct: &Expr) -> Result<Vec<Clause>, FrontendError> {
        let mut body = conjunct;
        let mut bound = Vec::new();
        while let Expr::Forall(x, _, inner) = body {
            bound.push(x.as_str());
            body = inner;
        }
        let (premises, conclusion): (Vec<Vec<&Expr>>, &Expr) = match body {
            Expr::Implies(p, q) => (dnf(p).map_err(|m| self.error(m))?, q),
            q => (vec![Vec::new()], q),
        };
        let mut out = Vec::new();
        for extra in premises {
            for concl in conjuncts(conclusion) {
                let lits: Vec<&Expr> = case.iter().copied().chain(extra.iter().copied()).collect();
                if let Some(g) = self.goal(&lits, concl, &bound)? {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }

    /// `None` when the case is contradictory.
    fn goal(&self, premises: &[&Expr], conclusion: &Expr, bound: &[&str]) -> Result<Option<Clause>, FrontendError> {
        let mut st = GoalState::default();
        let mut nil = BTreeSet::new();
        let mut cons = BTreeSet::new();
        for p in premises {
            match nil_test(p) {
                Some(x) => {
                    nil.insert(x.to_string());
                }
                None => observed(p, &mut cons),
            }
        }
        observed(conclusion, &mut cons);
        if nil.intersection(&cons).next().is_some() {
            return Ok(None);
        }
        let mut head_args = Vec::new();
        for (x, t) in &self.f.params {
            let term = if nil.contains(x) {
                Term::Nil(Sort::Int)
            } else if cons.contains(x) {
                let h = st.names.fresh("X");
                let tl = st.names.fresh(&capitalize(x));
                Term::cons(Term::int_var(h), Term::var(tl, Sort::list_of(Sort::Int)))
            } else {
                Term::var(st.names.fresh(&capitalize(x)), sort_of(t))
            };
            head_args.push(term.clone());
            st.env.insert(x.clone(), term);
        }
        for t in self.f.ret.flatten() {
            let base = if t == Type::List { "S" } else { "R" };
            let v = Term::var(st.names.fresh(base), sort_of(&t));
            st.results.push(v.clone());
            head_args.push(v);
        }
        if st.results.len() == 1 {
            st.env.insert(self.res.to_string(), st.results[0].clone());
        }
        for x in bound {
            let v = Term::int_var(st.names.fresh(&capitalize(x)));
            st.env.insert(x.to_string(), v);
        }
        for p in premises {
            if nil_test(p).is_none() {
                self.literal(p, true, &mut st)?;
            }
        }
        self.literal(conclusion, false, &mut st)?;
        let result_vars: BTreeSet<String> =
            st.results.iter().filter_map(|t| t.as_var().map(|v| v.name.clone())).collect();
        let (later, earlier): (Vec<Atom>, Vec<Atom>) =
            st.atoms.into_iter().partition(|a| result_vars.iter().any(|r| a.occurs(r)));
        let mut body = earlier;
        body.push(Atom::new(self.f.name.clone(), head_args));
        body.extend(later);
        Ok(Some(Clause::new(None, Constraint::new(st.constraints), body)))
    }

    /// Encodes a premise (asserted) or the conclusion (negated).
    fn literal(&self, e: &Expr, positive: bool, st: &mut GoalState) -> Result<(), FrontendError> {
        match e {
            Expr::Bool(b) => {
                if *b != positive {
                    st.constraints.push(AtomicConstraint::falsity());
                }
                Ok(())
            }
            Expr::Call(..) => {
                let v = self.term(e, st)?;
                match v.as_var() {
                    Some(x) if x.sort == Sort::Bool => {
                        st.constraints.push(AtomicConstraint::bind(x.name.clone(), positive));
                        Ok(())
                    }
                    _ => Err(self.error("a literal call must return a Boolean")),
                }
            }
            Expr::Cmp(op, a, b) => {
                let (x, y) = (self.term(a, st)?, self.term(b, st)?);
                let (Some(lx), Some(ly)) = (lin(&x), lin(&y)) else {
                    return Err(self.error("comparisons in contracts must be between integers"));
                };
                let r = if positive { rel(*op) } else { rel(*op).negate() };
                st.constraints.push(AtomicConstraint::lin(lx, r, ly));
                Ok(())
            }
            _ => Err(self.error("unsupported contract literal")),
        }
    }

    fn term(&self, e: &Expr, st: &mut GoalState) -> Result<Term, FrontendError> {
        match e {
            Expr::Var(x) => st.env.get(x).cloned().ok_or_else(|| self.error(format!("unbound variable `{x}`"))),
            Expr::Int(n) => Ok(Term::Int(*n)),
            Expr::Bool(b) => Ok(Term::Bool(*b)),
            Expr::Nil => Ok(Term::Nil(Sort::Int)),
            Expr::Proj(inner, k) => match inner.as_ref() {
                Expr::Var(x) if x == self.res => {
                    st.results.get(k - 1).cloned().ok_or_else(|| self.error(format!("projection _{k} out of range")))
                }
                _ => Err(self.error("projections apply only to the result")),
            },
            Expr::Head(inner) | Expr::Tail(inner) => match self.term(inner, st)? {
                Term::Cons(h, t) => Ok(if matches!(e, Expr::Head(_)) { *h } else { *t }),
                _ => Err(self.error("list observers apply only to parameters")),
            },
            Expr::Arith(op, a, b) => {
                let (x, y) = (self.term(a, st)?, self.term(b, st)?);
                let (Some(lx), Some(ly)) = (lin(&x), lin(&y)) else {
                    return Err(self.error("arithmetic on a non-integer value"));
                };
                let value = match op {
                    ArithOp::Add => lx.plus(&ly),
                    ArithOp::Sub => lx.minus(&ly),
                    ArithOp::Mul if lx.is_constant() => ly.scale(lx.constant),
                    ArithOp::Mul if ly.is_constant() => lx.scale(ly.constant),
                    ArithOp::Mul => return Err(self.error("non-linear multiplication")),
                };
                let n = st.names.numbered("N");
                st.constraints.push(AtomicConstraint::lin(LinExpr::var(n.clone()), Rel::Eq, value));
                Ok(Term::int_var(n))
            }
            Expr::Call(g, args) => {
                let Some(def) = self.catas.get(g.as_str()) else {
                    return Err(self.error(format!("`{g}` is not a catamorphism")));
                };
                let mut ts = Vec::new();
                for a in args {
                    ts.push(self.term(a, st)?);
                }
                let out = match def.ret {
                    Type::Bool => Term::bool_var(st.names.numbered("B")),
                    _ => Term::int_var(st.names.numbered("N")),
                };
                ts.push(out.clone());
                st.atoms.push(Atom::new(g.clone(), ts));
                Ok(out)
            }
            _ => Err(self.error("unsupported expression in a contract")),
        }
    }
}
