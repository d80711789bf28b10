//! Reader for the Prolog-like clause syntax.
//!
//! ```text
//! clause     ::= [label "."] head [":-" item {"," item}] "."
//! label      ::= VAR | INT
//! head       ::= "false" | atom
//! item       ::= atom | expr relop expr
//! relop      ::= "=" | "=\=" | "=/=" | "=<" | "<" | ">=" | ">"
//! atom       ::= IDENT ["(" term {"," term} ")"]
//! term       ::= VAR | INT | "-" INT | "true" | "false" | list
//! list       ::= "[" "]" | "[" term {"," term} ["|" term] "]"
//! expr       ::= ["-"] mono {("+" | "-") mono}
//! mono       ::= INT | VAR | INT "*" VAR | "true" | "false"
//! ```
//!
//! Variables are clause-local. Sorts are inferred across the whole text by
//! unification; anything left undetermined defaults to `Int`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use super::lexer::{tokenize, LexError, SourceSpan, Tok, Token};
use crate::model::{Atom, AtomicConstraint, Clause, ClauseSet, Constraint, LinExpr, Rel, Sort, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{second}: sort conflict: {message} (first use at {first})")]
    SortConflict { first: SourceSpan, second: SourceSpan, message: String },
}

impl ParseError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ParseError::Syntax { span, .. } => span,
            ParseError::SortConflict { second, .. } => second,
        }
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError::Syntax { span: e.span, message: e.message }
    }
}

#[derive(Debug, Clone)]
enum RawTerm {
    Var(String, SourceSpan),
    Int(i64, SourceSpan),
    Bool(bool, SourceSpan),
    Nil(SourceSpan),
    Cons(Box<RawTerm>, Box<RawTerm>, SourceSpan),
}

impl RawTerm {
    fn span(&self) -> &SourceSpan {
        match self {
            RawTerm::Var(_, s) | RawTerm::Int(_, s) | RawTerm::Bool(_, s) | RawTerm::Nil(s) => s,
            RawTerm::Cons(_, _, s) => s,
        }
    }
}

#[derive(Debug, Clone)]
enum RawOperand {
    Bool(bool),
    Lin(Vec<(i64, Option<(String, SourceSpan)>)>),
}

#[derive(Debug, Clone)]
struct RawAtom {
    pred: String,
    args: Vec<RawTerm>,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum RawItem {
    Atom(RawAtom),
    Rel(Rel, RawOperand, RawOperand, SourceSpan),
}

#[derive(Debug, Clone)]
struct RawClause {
    label: Option<String>,
    head: Option<RawAtom>,
    items: Vec<RawItem>,
}

pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.peek())))
        }
    }

    pub(crate) fn error(&self, message: String) -> ParseError {
        ParseError::Syntax { span: self.span(), message }
    }
}

fn rel_of(sym: &str) -> Option<Rel> {
    Some(match sym {
        "=" => Rel::Eq,
        "=\\=" | "=/=" => Rel::Ne,
        "=<" => Rel::Le,
        "<" => Rel::Lt,
        ">=" => Rel::Ge,
        ">" => Rel::Gt,
        _ => return None,
    })
}

fn parse_raw_clause(cur: &mut Cursor) -> Result<RawClause, ParseError> {
    let mut label = None;
    if matches!(cur.peek(), Tok::Var(_) | Tok::Int(_)) && matches!(cur.peek_at(1), Tok::Sym(".")) {
        label = Some(match cur.bump() {
            Tok::Var(s) => s,
            Tok::Int(n) => n.to_string(),
            _ => unreachable!(),
        });
        cur.bump();
    }
    let head = match cur.peek().clone() {
        Tok::Ident(s) if s == "false" => {
            cur.bump();
            None
        }
        Tok::Ident(_) => Some(parse_atom(cur)?),
        other => return Err(cur.error(format!("expected clause head, found {other}"))),
    };
    let mut items = Vec::new();
    if cur.eat_sym(":-") {
        if !cur.is_sym(".") {
            loop {
                items.push(parse_item(cur)?);
                if !cur.eat_sym(",") {
                    break;
                }
            }
        }
    } else if head.is_none() {
        return Err(cur.error("goal clause needs `:-`".into()));
    }
    cur.expect_sym(".")?;
    Ok(RawClause { label, head, items })
}

fn parse_atom(cur: &mut Cursor) -> Result<RawAtom, ParseError> {
    let span = cur.span();
    let pred = match cur.bump() {
        Tok::Ident(s) => s,
        other => return Err(ParseError::Syntax { span, message: format!("expected predicate, found {other}") }),
    };
    let mut args = Vec::new();
    if cur.eat_sym("(") {
        loop {
            args.push(parse_term(cur)?);
            if !cur.eat_sym(",") {
                break;
            }
        }
        cur.expect_sym(")")?;
    }
    Ok(RawAtom { pred, args, span })
}

fn parse_term(cur: &mut Cursor) -> Result<RawTerm, ParseError> {
    let span = cur.span();
    match cur.bump() {
        Tok::Var(s) => Ok(RawTerm::Var(s, span)),
        Tok::Int(n) => Ok(RawTerm::Int(n, span)),
        Tok::Sym("-") => match cur.bump() {
            Tok::Int(n) => Ok(RawTerm::Int(-n, span)),
            other => Err(ParseError::Syntax { span, message: format!("expected integer after `-`, found {other}") }),
        },
        Tok::Ident(s) if s == "true" => Ok(RawTerm::Bool(true, span)),
        Tok::Ident(s) if s == "false" => Ok(RawTerm::Bool(false, span)),
        Tok::Sym("[") => {
            if cur.eat_sym("]") {
                return Ok(RawTerm::Nil(span));
            }
            let mut elems = vec![parse_term(cur)?];
            while cur.eat_sym(",") {
                elems.push(parse_term(cur)?);
            }
            let tail = if cur.eat_sym("|") { parse_term(cur)? } else { RawTerm::Nil(cur.span()) };
            cur.expect_sym("]")?;
            Ok(elems
                .into_iter()
                .rev()
                .fold(tail, |acc, e| RawTerm::Cons(Box::new(e), Box::new(acc), span.clone())))
        }
        other => Err(ParseError::Syntax { span, message: format!("expected term, found {other}") }),
    }
}

fn parse_item(cur: &mut Cursor) -> Result<RawItem, ParseError> {
    let span = cur.span();
    if let Tok::Ident(s) = cur.peek() {
        if s != "true" && s != "false" {
            return Ok(RawItem::Atom(parse_atom(cur)?));
        }
    }
    let lhs = parse_operand(cur)?;
    let rel = match cur.peek() {
        Tok::Sym(s) => rel_of(s),
        _ => None,
    };
    let Some(rel) = rel else {
        return Err(cur.error(format!("expected relational operator, found {}", cur.peek())));
    };
    cur.bump();
    let rhs = parse_operand(cur)?;
    Ok(RawItem::Rel(rel, lhs, rhs, span))
}

fn parse_operand(cur: &mut Cursor) -> Result<RawOperand, ParseError> {
    match cur.peek() {
        Tok::Ident(s) if s == "true" => {
            cur.bump();
            return Ok(RawOperand::Bool(true));
        }
        Tok::Ident(s) if s == "false" => {
            cur.bump();
            return Ok(RawOperand::Bool(false));
        }
        _ => {}
    }
    let mut monos = Vec::new();
    let mut sign = if cur.eat_sym("-") { -1 } else { 1 };
    loop {
        let span = cur.span();
        let mono = match cur.bump() {
            Tok::Int(n) => {
                if cur.eat_sym("*") {
                    let vspan = cur.span();
                    match cur.bump() {
                        Tok::Var(v) => (sign * n, Some((v, vspan))),
                        other => return Err(ParseError::Syntax { span: vspan, message: format!("expected variable after `*`, found {other}") }),
                    }
                } else {
                    (sign * n, None)
                }
            }
            Tok::Var(v) => (sign, Some((v, span))),
            other => return Err(ParseError::Syntax { span, message: format!("expected arithmetic term, found {other}") }),
        };
        monos.push(mono);
        if cur.eat_sym("+") {
            sign = 1;
        } else if cur.eat_sym("-") {
            sign = -1;
        } else {
            break;
        }
    }
    Ok(RawOperand::Lin(monos))
}

#[derive(Debug, Clone)]
enum Kind {
    Unknown,
    Int,
    Bool,
    List(usize),
}

/// Union-find over sort slots, one per variable occurrence class and per
/// predicate argument position.
struct SortTable {
    parent: Vec<usize>,
    kind: Vec<Kind>,
    span: Vec<SourceSpan>,
}

impl SortTable {
    fn new() -> Self {
        SortTable { parent: Vec::new(), kind: Vec::new(), span: Vec::new() }
    }

    fn fresh(&mut self, kind: Kind, span: &SourceSpan) -> usize {
        self.parent.push(self.parent.len());
        self.kind.push(kind);
        self.span.push(span.clone());
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.parent[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.parent[x] = r;
        r
    }

    fn describe(&mut self, x: usize) -> String {
        let r = self.find(x);
        match self.kind[r].clone() {
            Kind::Unknown => "?".into(),
            Kind::Int => "Int".into(),
            Kind::Bool => "Bool".into(),
            Kind::List(e) => format!("List({})", self.describe(e)),
        }
    }

    fn unify(&mut self, a: usize, b: usize, at: &SourceSpan) -> Result<(), ParseError> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        let merged = match (self.kind[ra].clone(), self.kind[rb].clone()) {
            (Kind::Unknown, k) | (k, Kind::Unknown) => k,
            (Kind::Int, Kind::Int) => Kind::Int,
            (Kind::Bool, Kind::Bool) => Kind::Bool,
            (Kind::List(x), Kind::List(y)) => {
                self.parent[rb] = ra;
                self.kind[ra] = Kind::List(x);
                return self.unify(x, y, at);
            }
            _ => {
                let message = format!("{} versus {}", self.describe(ra), self.describe(rb));
                return Err(ParseError::SortConflict {
                    first: self.span[ra].clone(),
                    second: at.clone(),
                    message,
                });
            }
        };
        self.parent[rb] = ra;
        self.kind[ra] = merged;
        Ok(())
    }

    fn resolve(&mut self, x: usize) -> Sort {
        let r = self.find(x);
        match self.kind[r].clone() {
            Kind::Unknown | Kind::Int => Sort::Int,
            Kind::Bool => Sort::Bool,
            Kind::List(e) => Sort::list_of(self.resolve(e)),
        }
    }

    fn is_bool(&mut self, x: usize) -> bool {
        let r = self.find(x);
        matches!(self.kind[r], Kind::Bool)
    }
}

struct Inference {
    table: SortTable,
    preds: BTreeMap<String, (Vec<usize>, SourceSpan)>,
    /// Per clause: variable name to slot.
    vars: Vec<BTreeMap<String, usize>>,
}

impl Inference {
    fn var_slot(&mut self, clause: usize, name: &str, span: &SourceSpan) -> usize {
        if let Some(s) = self.vars[clause].get(name) {
            return *s;
        }
        let s = self.table.fresh(Kind::Unknown, span);
        self.vars[clause].insert(name.to_string(), s);
        s
    }

    fn term_slot(&mut self, clause: usize, t: &RawTerm) -> Result<usize, ParseError> {
        Ok(match t {
            RawTerm::Var(v, span) => self.var_slot(clause, v, span),
            RawTerm::Int(_, span) => self.table.fresh(Kind::Int, span),
            RawTerm::Bool(_, span) => self.table.fresh(Kind::Bool, span),
            RawTerm::Nil(span) => {
                let e = self.table.fresh(Kind::Unknown, span);
                self.table.fresh(Kind::List(e), span)
            }
            RawTerm::Cons(h, tl, span) => {
                let hs = self.term_slot(clause, h)?;
                let ts = self.term_slot(clause, tl)?;
                let s = self.table.fresh(Kind::List(hs), span);
                self.table.unify(s, ts, tl.span())?;
                s
            }
        })
    }

    fn atom(&mut self, clause: usize, a: &RawAtom) -> Result<(), ParseError> {
        let slots = match self.preds.get(&a.pred) {
            Some((slots, first)) => {
                if slots.len() != a.args.len() {
                    return Err(ParseError::SortConflict {
                        first: first.clone(),
                        second: a.span.clone(),
                        message: format!(
                            "predicate {} used with arity {} and {}",
                            a.pred,
                            slots.len(),
                            a.args.len()
                        ),
                    });
                }
                slots.clone()
            }
            None => {
                let slots: Vec<usize> =
                    a.args.iter().map(|t| self.table.fresh(Kind::Unknown, t.span())).collect();
                self.preds.insert(a.pred.clone(), (slots.clone(), a.span.clone()));
                slots
            }
        };
        for (t, s) in a.args.iter().zip(slots) {
            let ts = self.term_slot(clause, t)?;
            self.table.unify(s, ts, t.span())?;
        }
        Ok(())
    }

    fn operand(&mut self, clause: usize, o: &RawOperand, span: &SourceSpan) -> Result<Option<usize>, ParseError> {
        match o {
            RawOperand::Bool(_) => Ok(Some(self.table.fresh(Kind::Bool, span))),
            RawOperand::Lin(monos) => {
                if let [(1, Some((v, vspan)))] = monos.as_slice() {
                    return Ok(Some(self.var_slot(clause, v, vspan)));
                }
                for (_, v) in monos {
                    if let Some((v, vspan)) = v {
                        let s = self.var_slot(clause, v, vspan);
                        let int = self.table.fresh(Kind::Int, vspan);
                        self.table.unify(s, int, vspan)?;
                    }
                }
                Ok(None)
            }
        }
    }

    fn item(&mut self, clause: usize, item: &RawItem) -> Result<(), ParseError> {
        match item {
            RawItem::Atom(a) => self.atom(clause, a),
            RawItem::Rel(rel, lhs, rhs, span) => {
                let l = self.operand(clause, lhs, span)?;
                let r = self.operand(clause, rhs, span)?;
                let int_only = !matches!(rel, Rel::Eq);
                match (l, r) {
                    (Some(a), Some(b)) => {
                        self.table.unify(a, b, span)?;
                        if int_only {
                            let int = self.table.fresh(Kind::Int, span);
                            self.table.unify(a, int, span)?;
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => {
                        let int = self.table.fresh(Kind::Int, span);
                        self.table.unify(a, int, span)?;
                    }
                    (None, None) => {}
                }
                Ok(())
            }
        }
    }
}

struct Builder<'a> {
    inf: &'a mut Inference,
    clause: usize,
}

impl Builder<'_> {
    fn term(&mut self, t: &RawTerm) -> Result<Term, ParseError> {
        Ok(match t {
            RawTerm::Var(v, span) => {
                let s = self.inf.var_slot(self.clause, v, span);
                Term::var(v.clone(), self.inf.table.resolve(s))
            }
            RawTerm::Int(n, _) => Term::Int(*n),
            RawTerm::Bool(b, _) => Term::Bool(*b),
            RawTerm::Nil(_) => {
                // Element sort comes from the enclosing position; resolved below.
                Term::Nil(Sort::Int)
            }
            RawTerm::Cons(h, tl, _) => {
                let h = self.term(h)?;
                let tl = self.term(tl)?;
                let tl = fix_nil(tl, &h.sort());
                Term::cons(h, tl)
            }
        })
    }

    fn atom(&mut self, a: &RawAtom) -> Result<Atom, ParseError> {
        let slots = self.inf.preds[&a.pred].0.clone();
        let mut args = Vec::new();
        for (t, s) in a.args.iter().zip(slots) {
            let term = self.term(t)?;
            let sort = self.inf.table.resolve(s);
            args.push(retype_nil(term, &sort));
        }
        Ok(Atom::new(a.pred.clone(), args))
    }

    fn lin(&mut self, o: &RawOperand) -> LinExpr {
        let mut e = LinExpr::default();
        if let RawOperand::Lin(monos) = o {
            for (c, v) in monos {
                match v {
                    Some((v, _)) => e.add_term(v, *c),
                    None => e.constant += c,
                }
            }
        }
        e
    }

    fn single_var(o: &RawOperand) -> Option<(&String, &SourceSpan)> {
        match o {
            RawOperand::Lin(monos) => match monos.as_slice() {
                [(1, Some((v, s)))] => Some((v, s)),
                _ => None,
            },
            _ => None,
        }
    }

    fn constraint(&mut self, rel: Rel, lhs: &RawOperand, rhs: &RawOperand, span: &SourceSpan) -> Result<AtomicConstraint, ParseError> {
        let is_bool_var = |me: &mut Self, o: &RawOperand| -> Option<String> {
            let (v, s) = Self::single_var(o)?;
            let slot = me.inf.var_slot(me.clause, v, s);
            me.inf.table.is_bool(slot).then(|| v.clone())
        };
        let lb = is_bool_var(self, lhs);
        let rb = is_bool_var(self, rhs);
        match (lhs, rhs, lb, rb) {
            (RawOperand::Bool(a), RawOperand::Bool(b), _, _) => Ok(if a == b {
                AtomicConstraint::lin(LinExpr::constant(0), Rel::Eq, LinExpr::constant(0))
            } else {
                AtomicConstraint::falsity()
            }),
            (_, RawOperand::Bool(b), Some(v), _) | (RawOperand::Bool(b), _, _, Some(v)) => {
                if rel != Rel::Eq {
                    return Err(ParseError::Syntax { span: span.clone(), message: "only `=` is supported on booleans".into() });
                }
                Ok(AtomicConstraint::bind(v, *b))
            }
            (_, _, Some(a), Some(b)) => {
                if rel != Rel::Eq {
                    return Err(ParseError::Syntax { span: span.clone(), message: "only `=` is supported on booleans".into() });
                }
                Ok(AtomicConstraint::BoolEq { lhs: a, rhs: b })
            }
            _ => Ok(AtomicConstraint::lin(self.lin(lhs), rel, self.lin(rhs))),
        }
    }
}

/// Sets the element sort of a `Nil` at the end of a cons chain.
fn fix_nil(t: Term, elem: &Sort) -> Term {
    match t {
        Term::Nil(_) => Term::Nil(elem.clone()),
        other => other,
    }
}

fn retype_nil(t: Term, sort: &Sort) -> Term {
    match (t, sort) {
        (Term::Nil(_), Sort::List(e)) => Term::Nil((**e).clone()),
        (Term::Cons(h, tl), Sort::List(_)) => {
            let tl = retype_nil(*tl, sort);
            Term::Cons(h, Box::new(tl))
        }
        (t, _) => t,
    }
}

/// Parses clause text into a clause set with inferred signatures.
pub fn parse_chc(text: &str) -> Result<ClauseSet, ParseError> {
    parse_chc_named(text, "<input>")
}

pub fn parse_chc_named(text: &str, file: &str) -> Result<ClauseSet, ParseError> {
    let file = Arc::new(PathBuf::from(file));
    let toks = tokenize(text, &file, "%")?;
    let mut cur = Cursor::new(toks);
    let mut raws = Vec::new();
    while !matches!(cur.peek(), Tok::Eof) {
        raws.push(parse_raw_clause(&mut cur)?);
    }
    build(&raws)
}

fn build(raws: &[RawClause]) -> Result<ClauseSet, ParseError> {
    let mut inf = Inference { table: SortTable::new(), preds: BTreeMap::new(), vars: vec![BTreeMap::new(); raws.len()] };
    for (i, rc) in raws.iter().enumerate() {
        if let Some(h) = &rc.head {
            inf.atom(i, h)?;
        }
        for item in &rc.items {
            inf.item(i, item)?;
        }
    }
    let mut cs = ClauseSet::new();
    let pred_names: Vec<String> = inf.preds.keys().cloned().collect();
    for p in pred_names {
        let slots = inf.preds[&p].0.clone();
        let sorts = slots.into_iter().map(|s| inf.table.resolve(s)).collect();
        cs.signatures.insert(p, sorts);
    }
    for (i, rc) in raws.iter().enumerate() {
        let mut b = Builder { inf: &mut inf, clause: i };
        let head = rc.head.as_ref().map(|h| b.atom(h)).transpose()?;
        let mut conjuncts = Vec::new();
        let mut body = Vec::new();
        for item in &rc.items {
            match item {
                RawItem::Atom(a) => body.push(b.atom(a)?),
                RawItem::Rel(rel, l, r, span) => conjuncts.push(b.constraint(*rel, l, r, span)?),
            }
        }
        let mut c = Clause::new(head, Constraint::new(conjuncts), body);
        c.tag = rc.label.clone();
        cs.clauses.push(c);
    }
    Ok(cs)
}

/// Parses exactly one clause.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let cs = parse_chc(text)?;
    match cs.clauses.len() {
        1 => Ok(cs.clauses.into_iter().next().unwrap()),
        n => Err(ParseError::Syntax {
            span: SourceSpan { file: Arc::new(PathBuf::from("<input>")), line: 1, column: 1 },
            message: format!("expected one clause, found {n}"),
        }),
    }
}

/// Parses a clause using the signatures of an existing clause set, so that
/// variables whose sort is only fixed by other clauses resolve correctly.
pub fn parse_clause_in(text: &str, context: &ClauseSet) -> Result<Clause, ParseError> {
    let cs = parse_chc_in(text, "<input>", context)?;
    match cs.clauses.len() {
        1 => Ok(cs.clauses.into_iter().next().unwrap()),
        n => Err(ParseError::Syntax {
            span: SourceSpan { file: Arc::new(PathBuf::from("<input>")), line: 1, column: 1 },
            message: format!("expected one clause, found {n}"),
        }),
    }
}

/// Parses clauses using the signatures of an existing clause set. Only the
/// parsed clauses are returned; the signatures include the context's.
pub fn parse_chc_in(text: &str, file: &str, context: &ClauseSet) -> Result<ClauseSet, ParseError> {
    let mut prelude = String::new();
    for (p, sorts) in &context.signatures {
        prelude.push_str(&signature_fact(p, sorts));
    }
    let mut cur = Cursor::new(tokenize(&prelude, &Arc::new(PathBuf::from("<signatures>")), "%")?);
    let mut raws = Vec::new();
    while !matches!(cur.peek(), Tok::Eof) {
        raws.push(parse_raw_clause(&mut cur)?);
    }
    let n = raws.len();
    let mut cur = Cursor::new(tokenize(text, &Arc::new(PathBuf::from(file)), "%")?);
    while !matches!(cur.peek(), Tok::Eof) {
        raws.push(parse_raw_clause(&mut cur)?);
    }
    let mut cs = build(&raws)?;
    cs.clauses.drain(..n);
    Ok(cs)
}

/// A fact whose argument terms pin the given sorts.
fn signature_fact(pred: &str, sorts: &[Sort]) -> String {
    fn sample(s: &Sort) -> String {
        match s {
            Sort::Int => "0".into(),
            Sort::Bool => "true".into(),
            Sort::List(e) => format!("[{}]", sample(e)),
        }
    }
    if sorts.is_empty() {
        return format!("{pred}.\n");
    }
    let args: Vec<String> = sorts.iter().map(sample).collect();
    format!("{pred}({}).\n", args.join(","))
}
