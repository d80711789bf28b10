//! Satisfiability, entailment and projection for conjunctions of linear
//! integer relations and boolean bindings.
//!
//! Integer part: equalities are eliminated by substitution on a unit
//! coefficient, strict inequalities are tightened (`a < b` becomes
//! `a <= b - 1`), and the rest goes through Fourier-Motzkin elimination with
//! gcd tightening. A satisfying integer point is rebuilt by back-substitution
//! with a small bounded search. Disequalities are split lazily, only when the
//! candidate point violates them.
//!
//! Boolean part: bindings and boolean equalities never mix with arithmetic,
//! so they are decided by union-find.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{AtomicConstraint, Constraint, LinExpr, Rel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatVerdict {
    Sat,
    Unsat,
    Unknown,
}

/// Limits guarding the exponential corners of the procedure.
#[derive(Debug, Clone, Copy)]
pub struct EngineLimits {
    pub max_splits: usize,
    pub max_rows: usize,
    pub max_search_nodes: usize,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits { max_splits: 16, max_rows: 4000, max_search_nodes: 20_000 }
    }
}

type Coeffs = BTreeMap<String, i128>;

/// `sum(coeffs) + constant`, compared against zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coeffs: Coeffs,
    constant: i128,
}

impl Row {
    fn from_diff(lhs: &LinExpr, rhs: &LinExpr) -> Row {
        let d = lhs.minus(rhs);
        Row {
            coeffs: d.coeffs.iter().map(|(v, c)| (v.clone(), *c as i128)).collect(),
            constant: d.constant as i128,
        }
    }

    fn neg(&self) -> Row {
        Row {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
            constant: -self.constant,
        }
    }

    fn shift(&self, k: i128) -> Row {
        Row { coeffs: self.coeffs.clone(), constant: self.constant + k }
    }

    fn add_scaled(&mut self, other: &Row, k: i128) {
        for (v, c) in &other.coeffs {
            let e = self.coeffs.entry(v.clone()).or_insert(0);
            *e += c * k;
            if *e == 0 {
                self.coeffs.remove(v);
            }
        }
        self.constant += other.constant * k;
    }

    fn scale(&self, k: i128) -> Row {
        Row {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: self.constant * k,
        }
    }

    fn gcd(&self) -> i128 {
        self.coeffs.values().fold(0, |g, c| gcd(g, c.abs()))
    }

    fn value(&self, env: &BTreeMap<String, i128>) -> i128 {
        self.constant + self.coeffs.iter().map(|(v, c)| c * env.get(v).copied().unwrap_or(0)).sum::<i128>()
    }

    fn too_big(&self) -> bool {
        const LIMIT: i128 = 1 << 60;
        self.constant.abs() > LIMIT || self.coeffs.values().any(|c| c.abs() > LIMIT)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Tightens `row <= 0` by the gcd of its coefficients.
fn tighten(row: Row) -> Row {
    let g = row.gcd();
    if g <= 1 {
        return row;
    }
    Row {
        coeffs: row.coeffs.iter().map(|(v, c)| (v.clone(), c / g)).collect(),
        constant: div_ceil(row.constant, g),
    }
}

#[derive(Debug, Clone, Default)]
struct IntSystem {
    eqs: Vec<Row>,
    les: Vec<Row>,
    nes: Vec<Row>,
}

impl IntSystem {
    fn vars(&self) -> BTreeSet<String> {
        self.eqs
            .iter()
            .chain(&self.les)
            .chain(&self.nes)
            .flat_map(|r| r.coeffs.keys().cloned())
            .collect()
    }

    fn push(&mut self, rel: Rel, d: Row) {
        match rel {
            Rel::Eq => self.eqs.push(d),
            Rel::Ne => self.nes.push(d),
            Rel::Le => self.les.push(d),
            Rel::Lt => self.les.push(d.shift(1)),
            Rel::Ge => self.les.push(d.neg()),
            Rel::Gt => self.les.push(d.neg().shift(1)),
        }
    }

    /// Adds the negation of `rel(d)` as one or two alternative systems.
    fn negated(&self, rel: Rel, d: &Row) -> Vec<IntSystem> {
        let mut out = Vec::new();
        let with = |rel: Rel, d: Row| {
            let mut s = self.clone();
            s.push(rel, d);
            s
        };
        match rel {
            Rel::Eq => {
                out.push(with(Rel::Lt, d.clone()));
                out.push(with(Rel::Gt, d.clone()));
            }
            other => out.push(with(other.negate(), d.clone())),
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
struct BoolSystem {
    parent: BTreeMap<String, String>,
    value: BTreeMap<String, bool>,
    conflict: bool,
}

impl BoolSystem {
    fn find(&mut self, v: &str) -> String {
        let p = self.parent.get(v).cloned().unwrap_or_else(|| v.to_string());
        if p == v {
            self.parent.entry(v.to_string()).or_insert_with(|| v.to_string());
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(v.to_string(), r.clone());
        r
    }

    fn bind(&mut self, v: &str, b: bool) {
        let r = self.find(v);
        match self.value.get(&r) {
            Some(x) if *x != b => self.conflict = true,
            _ => {
                self.value.insert(r, b);
            }
        }
    }

    fn union(&mut self, a: &str, b: &str) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        self.parent.insert(rb.clone(), ra.clone());
        if let Some(vb) = self.value.remove(&rb) {
            self.bind(&ra, vb);
        }
    }

    fn known(&self, v: &str) -> bool {
        self.parent.contains_key(v)
    }

    fn value_of(&mut self, v: &str) -> Option<bool> {
        if !self.known(v) {
            return None;
        }
        let r = self.find(v);
        self.value.get(&r).copied()
    }
}

fn split(c: &Constraint) -> (IntSystem, BoolSystem) {
    let mut ints = IntSystem::default();
    let mut bools = BoolSystem::default();
    for k in &c.conjuncts {
        match k {
            AtomicConstraint::Lin { rel, lhs, rhs } => ints.push(*rel, Row::from_diff(lhs, rhs)),
            AtomicConstraint::BoolBind { var, value } => bools.bind(var, *value),
            AtomicConstraint::BoolEq { lhs, rhs } => bools.union(lhs, rhs),
        }
    }
    (ints, bools)
}

enum Outcome {
    Sat(BTreeMap<String, i128>),
    Unsat,
    Unknown,
}

/// Result of eliminating equalities: remaining inequalities plus the
/// substitutions made, in elimination order.
struct Reduced {
    les: Vec<Row>,
    nes: Vec<Row>,
    solved: Vec<(String, Row)>,
}

fn eliminate_equalities(sys: &IntSystem, protect: &BTreeSet<String>) -> Result<Reduced, Outcome> {
    let mut eqs = sys.eqs.clone();
    let mut les = sys.les.clone();
    let mut nes = sys.nes.clone();
    let mut solved: Vec<(String, Row)> = Vec::new();
    let mut kept_eqs = Vec::new();
    while let Some(mut eq) = eqs.pop() {
        let g = eq.gcd();
        if g == 0 {
            if eq.constant != 0 {
                return Err(Outcome::Unsat);
            }
            continue;
        }
        if eq.constant % g != 0 {
            return Err(Outcome::Unsat);
        }
        if g > 1 {
            eq = Row {
                coeffs: eq.coeffs.iter().map(|(v, c)| (v.clone(), c / g)).collect(),
                constant: eq.constant / g,
            };
        }
        let pick = eq
            .coeffs
            .iter()
            .filter(|(v, c)| c.abs() == 1 && !protect.contains(*v))
            .map(|(v, _)| v.clone())
            .next();
        let Some(x) = pick else {
            kept_eqs.push(eq);
            continue;
        };
        // x = -(rest)/a with a = +-1
        let a = eq.coeffs[&x];
        let mut rest = eq.clone();
        rest.coeffs.remove(&x);
        let expr = rest.scale(-a);
        let subst = |r: &mut Row| {
            if let Some(c) = r.coeffs.remove(&x) {
                r.add_scaled(&expr, c);
            }
        };
        eqs.iter_mut().for_each(subst);
        les.iter_mut().for_each(subst);
        nes.iter_mut().for_each(subst);
        kept_eqs.iter_mut().for_each(subst);
        for (_, e) in solved.iter_mut() {
            subst(e);
        }
        solved.push((x, expr));
    }
    for eq in kept_eqs {
        if eq.coeffs.is_empty() {
            if eq.constant != 0 {
                return Err(Outcome::Unsat);
            }
            continue;
        }
        les.push(eq.clone());
        les.push(eq.neg());
    }
    Ok(Reduced { les, nes, solved })
}

/// Normalizes a set of `<= 0` rows: tightens, drops trivial ones, keeps the
/// strongest constant per coefficient vector. `None` on a constant conflict.
fn normalize(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut best: BTreeMap<Coeffs, i128> = BTreeMap::new();
    for r in rows {
        let r = tighten(r);
        if r.coeffs.is_empty() {
            if r.constant > 0 {
                return None;
            }
            continue;
        }
        let e = best.entry(r.coeffs).or_insert(i128::MIN);
        *e = (*e).max(r.constant);
    }
    Some(best.into_iter().map(|(coeffs, constant)| Row { coeffs, constant }).collect())
}

/// One Fourier-Motzkin step. Returns the rows that mention `x` (kept for
/// back-substitution) and the resulting system without `x`.
fn fm_step(rows: Vec<Row>, x: &str) -> (Vec<Row>, Vec<Row>) {
    let (with, without): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| r.coeffs.contains_key(x));
    let mut out = without;
    let pos: Vec<&Row> = with.iter().filter(|r| r.coeffs[x] > 0).collect();
    let neg: Vec<&Row> = with.iter().filter(|r| r.coeffs[x] < 0).collect();
    for p in &pos {
        for n in &neg {
            let a = p.coeffs[x];
            let b = -n.coeffs[x];
            let mut r = p.scale(b);
            r.add_scaled(n, a);
            r.coeffs.remove(x);
            out.push(r);
        }
    }
    (with, out)
}

fn pick_var(rows: &[Row], candidates: &BTreeSet<String>) -> Option<String> {
    candidates
        .iter()
        .min_by_key(|v| {
            let p = rows.iter().filter(|r| r.coeffs.get(*v).is_some_and(|c| *c > 0)).count();
            let n = rows.iter().filter(|r| r.coeffs.get(*v).is_some_and(|c| *c < 0)).count();
            (p * n) as i64 - (p + n) as i64
        })
        .cloned()
}

fn solve_conjunction(sys: &IntSystem, limits: &EngineLimits) -> Outcome {
    let reduced = match eliminate_equalities(sys, &BTreeSet::new()) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let Some(mut rows) = normalize(reduced.les.clone()) else {
        return Outcome::Unsat;
    };
    let mut remaining: BTreeSet<String> = rows.iter().flat_map(|r| r.coeffs.keys().cloned()).collect();
    let mut levels: Vec<(String, Vec<Row>)> = Vec::new();
    while let Some(x) = pick_var(&rows, &remaining) {
        remaining.remove(&x);
        let (with, out) = fm_step(rows, &x);
        levels.push((x, with));
        match normalize(out) {
            None => return Outcome::Unsat,
            Some(r) => rows = r,
        }
        if rows.len() > limits.max_rows || rows.iter().any(Row::too_big) {
            return Outcome::Unknown;
        }
    }
    let mut env = BTreeMap::new();
    let mut budget = limits.max_search_nodes;
    let mut complete = true;
    if !assign(&levels, levels.len(), &mut env, &mut budget, &mut complete) {
        return if complete { Outcome::Unsat } else { Outcome::Unknown };
    }
    for (x, expr) in reduced.solved.iter().rev() {
        let v = expr.value(&env);
        env.insert(x.clone(), v);
    }
    // Variables only present in disequalities default to 0.
    for r in &sys.nes {
        for v in r.coeffs.keys() {
            env.entry(v.clone()).or_insert(0);
        }
    }
    Outcome::Sat(env)
}

/// Assigns variables in reverse elimination order, searching a bounded
/// window of candidate values when the rational shadow has no integer point.
fn assign(
    levels: &[(String, Vec<Row>)],
    k: usize,
    env: &mut BTreeMap<String, i128>,
    budget: &mut usize,
    complete: &mut bool,
) -> bool {
    if k == 0 {
        return true;
    }
    if *budget == 0 {
        *complete = false;
        return false;
    }
    *budget -= 1;
    let (x, rows) = &levels[k - 1];
    let (mut lo, mut hi) = (i128::MIN, i128::MAX);
    for r in rows {
        let a = r.coeffs[x];
        let mut rest = r.clone();
        rest.coeffs.remove(x);
        let s = rest.value(env);
        // a*x + s <= 0
        if a > 0 {
            hi = hi.min(div_floor(-s, a));
        } else {
            lo = lo.max(div_ceil(s, -a));
        }
    }
    if lo > hi {
        return false;
    }
    const WINDOW: i128 = 6;
    let start = 0i128.clamp(lo, hi);
    let mut candidates = vec![start];
    for d in 1..=WINDOW {
        for c in [start.saturating_add(d), start.saturating_sub(d)] {
            if c >= lo && c <= hi && !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    let exhaustive = hi.saturating_sub(lo) <= 2 * WINDOW;
    for c in candidates {
        env.insert(x.clone(), c);
        if assign(levels, k - 1, env, budget, complete) {
            return true;
        }
    }
    env.remove(x);
    if !exhaustive {
        *complete = false;
    }
    false
}

fn solve_ints(sys: &IntSystem, limits: &EngineLimits, splits: usize) -> SatVerdict {
    match solve_conjunction(&IntSystem { nes: Vec::new(), ..sys.clone() }, limits) {
        Outcome::Unsat => SatVerdict::Unsat,
        Outcome::Unknown => SatVerdict::Unknown,
        Outcome::Sat(env) => {
            let violated = sys.nes.iter().position(|r| r.value(&env) == 0);
            let Some(i) = violated else {
                return SatVerdict::Sat;
            };
            if splits >= limits.max_splits {
                return SatVerdict::Unknown;
            }
            let mut rest = sys.clone();
            let d = rest.nes.remove(i);
            let mut lt = rest.clone();
            lt.les.push(d.shift(1));
            let mut gt = rest;
            gt.les.push(d.neg().shift(1));
            match solve_ints(&lt, limits, splits + 1) {
                SatVerdict::Sat => SatVerdict::Sat,
                first => match (first, solve_ints(&gt, limits, splits + 1)) {
                    (_, SatVerdict::Sat) => SatVerdict::Sat,
                    (SatVerdict::Unsat, SatVerdict::Unsat) => SatVerdict::Unsat,
                    _ => SatVerdict::Unknown,
                },
            }
        }
    }
}

pub fn is_sat(c: &Constraint) -> SatVerdict {
    is_sat_with(c, &EngineLimits::default())
}

pub fn is_sat_with(c: &Constraint, limits: &EngineLimits) -> SatVerdict {
    let (ints, bools) = split(c);
    if bools.conflict {
        return SatVerdict::Unsat;
    }
    solve_ints(&ints, limits, 0)
}

/// True only if every solution of `c1` satisfies `c2`.
pub fn entails(c1: &Constraint, c2: &Constraint) -> bool {
    let limits = EngineLimits::default();
    let (ints, mut bools) = split(c1);
    if bools.conflict {
        return true;
    }
    let int_verdict = solve_ints(&ints, &limits, 0);
    if int_verdict == SatVerdict::Unsat {
        return true;
    }
    c2.conjuncts.iter().all(|k| match k {
        AtomicConstraint::BoolBind { var, value } => bools.value_of(var) == Some(*value),
        AtomicConstraint::BoolEq { lhs, rhs } => {
            if lhs == rhs {
                return true;
            }
            if bools.known(lhs) && bools.known(rhs) && bools.find(lhs) == bools.find(rhs) {
                return true;
            }
            matches!((bools.value_of(lhs), bools.value_of(rhs)), (Some(a), Some(b)) if a == b)
        }
        AtomicConstraint::Lin { rel, lhs, rhs } => {
            let d = Row::from_diff(lhs, rhs);
            ints.negated(*rel, &d).iter().all(|s| solve_ints(s, &limits, 0) == SatVerdict::Unsat)
        }
    })
}

pub fn equivalent(c1: &Constraint, c2: &Constraint) -> bool {
    entails(c1, c2) && entails(c2, c1)
}

fn render_le(r: &Row) -> AtomicConstraint {
    // sum(pos) - sum(neg) + c <= 0
    let (lhs, rhs) = sides(r);
    if lhs.coeffs.is_empty() {
        AtomicConstraint::lin(rhs, Rel::Ge, lhs)
    } else {
        AtomicConstraint::lin(lhs, Rel::Le, rhs)
    }
}

fn render_rel(r: &Row, rel: Rel) -> AtomicConstraint {
    let r = if r.coeffs.values().all(|c| *c < 0) { r.neg() } else { r.clone() };
    let (lhs, rhs) = sides(&r);
    AtomicConstraint::lin(lhs, rel, rhs)
}

/// Splits `row <op> 0` into `positive terms <op> negated negative terms - c`.
fn sides(r: &Row) -> (LinExpr, LinExpr) {
    let mut lhs = LinExpr::default();
    let mut rhs = LinExpr::constant(-(r.constant as i64));
    for (v, c) in &r.coeffs {
        if *c > 0 {
            lhs.add_term(v, *c as i64);
        } else {
            rhs.add_term(v, (-c) as i64);
        }
    }
    (lhs, rhs)
}

/// Existentially eliminates every variable outside `keep`. The result is
/// entailed by `c`; it is the exact projection when elimination only needs
/// unit-coefficient substitutions and Fourier-Motzkin on unit rows.
pub fn project(c: &Constraint, keep: &BTreeSet<String>) -> Constraint {
    let (ints, mut bools) = split(c);
    if bools.conflict {
        return Constraint::new(vec![AtomicConstraint::falsity()]);
    }
    let mut out = Vec::new();

    // Booleans: one binding per bound class, equalities inside free classes.
    let bool_vars: Vec<String> = bools.parent.keys().cloned().collect();
    let mut class_rep: BTreeMap<String, String> = BTreeMap::new();
    for v in bool_vars.iter().filter(|v| keep.contains(*v)) {
        let r = bools.find(v);
        if let Some(b) = bools.value.get(&r) {
            out.push(AtomicConstraint::bind(v.clone(), *b));
        } else if let Some(first) = class_rep.get(&r) {
            out.push(AtomicConstraint::BoolEq { lhs: first.clone(), rhs: v.clone() });
        } else {
            class_rep.insert(r, v.clone());
        }
    }

    // Integers: substitute away non-kept variables through equalities first.
    let all = ints.vars();
    let kept: BTreeSet<String> = all.iter().filter(|v| keep.contains(*v)).cloned().collect();
    let reduced = match eliminate_equalities(&ints, &kept) {
        Ok(r) => r,
        Err(_) => return Constraint::new(vec![AtomicConstraint::falsity()]),
    };
    let Some(mut rows) = normalize(reduced.les) else {
        return Constraint::new(vec![AtomicConstraint::falsity()]);
    };
    let mut eliminate: BTreeSet<String> =
        rows.iter().flat_map(|r| r.coeffs.keys().cloned()).filter(|v| !keep.contains(v)).collect();
    while let Some(x) = pick_var(&rows, &eliminate) {
        eliminate.remove(&x);
        let (_, out_rows) = fm_step(rows, &x);
        match normalize(out_rows) {
            Some(r) => rows = r,
            None => return Constraint::new(vec![AtomicConstraint::falsity()]),
        }
        if rows.len() > EngineLimits::default().max_rows {
            // Give up on the remaining rows that mention eliminated variables.
            rows.retain(|r| r.coeffs.keys().all(|v| keep.contains(v)));
        }
    }
    // Equalities over kept variables were substituted into one of their own
    // variables; rebuild them from the solved list.
    for (x, expr) in &reduced.solved {
        if keep.contains(x) && expr.coeffs.keys().all(|v| keep.contains(v)) {
            let mut r = expr.neg();
            r.coeffs.insert(x.clone(), 1);
            out.push(render_rel(&r, Rel::Eq));
        }
    }
    // Pairs r <= 0 and -r <= 0 are equalities.
    let mut used = vec![false; rows.len()];
    for i in 0..rows.len() {
        if used[i] {
            continue;
        }
        let neg = rows[i].neg();
        if let Some(j) = (i + 1..rows.len()).find(|j| !used[*j] && rows[*j] == neg) {
            used[j] = true;
            used[i] = true;
            out.push(render_rel(&rows[i], Rel::Eq));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if !used[i] {
            out.push(render_le(r));
        }
    }
    for r in &reduced.nes {
        if r.coeffs.keys().all(|v| keep.contains(v)) {
            if r.coeffs.is_empty() {
                if r.constant == 0 {
                    return Constraint::new(vec![AtomicConstraint::falsity()]);
                }
                continue;
            }
            out.push(render_rel(r, Rel::Ne));
        }
    }
    let result = Constraint::new(out);
    if is_sat(&result) == SatVerdict::Unsat {
        return Constraint::new(vec![AtomicConstraint::falsity()]);
    }
    simplify(&result)
}

fn is_trivial(k: &AtomicConstraint) -> bool {
    match k {
        AtomicConstraint::Lin { rel, lhs, rhs } => {
            let d = lhs.minus(rhs);
            d.is_constant() && rel.holds(d.constant, 0)
        }
        AtomicConstraint::BoolEq { lhs, rhs } => lhs == rhs,
        _ => false,
    }
}

/// Canonical key of a conjunct, so that `X>Y` and `Y<X` count as duplicates.
fn canonical(k: &AtomicConstraint) -> Vec<(Rel, Row)> {
    match k {
        AtomicConstraint::Lin { rel, lhs, rhs } => {
            let mut s = IntSystem::default();
            s.push(*rel, Row::from_diff(lhs, rhs));
            let mut out: Vec<(Rel, Row)> = s.les.into_iter().map(|r| (Rel::Le, tighten(r))).collect();
            for r in s.eqs.into_iter() {
                let r = if r.coeffs.values().next().is_some_and(|c| *c < 0) { r.neg() } else { r };
                out.push((Rel::Eq, r));
            }
            for r in s.nes.into_iter() {
                let r = if r.coeffs.values().next().is_some_and(|c| *c < 0) { r.neg() } else { r };
                out.push((Rel::Ne, r));
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Drops duplicate, trivially true and entailed conjuncts, keeping the
/// original spelling of the survivors. An unsatisfiable input collapses to a
/// single falsity.
pub fn simplify(c: &Constraint) -> Constraint {
    if is_sat(c) == SatVerdict::Unsat {
        return Constraint::new(vec![AtomicConstraint::falsity()]);
    }
    let mut seen = BTreeSet::new();
    let mut kept: Vec<AtomicConstraint> = Vec::new();
    for k in &c.conjuncts {
        if is_trivial(k) {
            continue;
        }
        let key = match k {
            AtomicConstraint::Lin { .. } => format!("{:?}", canonical(k)),
            AtomicConstraint::BoolEq { lhs, rhs } if lhs > rhs => format!("{rhs}={lhs}"),
            other => other.to_string(),
        };
        if seen.insert(key) {
            kept.push(k.clone());
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<AtomicConstraint> =
            kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, k)| k.clone()).collect();
        if entails(&Constraint::new(others), &Constraint::new(vec![kept[i].clone()])) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Constraint::new(kept)
}

/// Integer value forced on `var` by the constraint, if any.
pub fn forced_int(c: &Constraint, var: &str) -> Option<i64> {
    let keep: BTreeSet<String> = [var.to_string()].into();
    let p = project(c, &keep);
    for k in &p.conjuncts {
        if let AtomicConstraint::Lin { rel: Rel::Eq, lhs, rhs } = k {
            let d = lhs.minus(rhs);
            if d.coeffs.len() == 1 {
                let coeff = d.coeffs[var];
                if coeff.abs() == 1 && (-d.constant) % coeff == 0 {
                    return Some(-d.constant / coeff);
                }
            }
        }
    }
    None
}

/// Boolean value forced on `var`, if any.
pub fn forced_bool(c: &Constraint, var: &str) -> Option<bool> {
    let (_, mut bools) = split(c);
    bools.value_of(var)
}
