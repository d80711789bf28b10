//! Recursive-descent parser for `.fun` sources.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use super::ast::{ArithOp, Case, CmpOp, Expr, FunDef, Pattern, Type};
use super::FrontendError;
use crate::syntax::lexer::{tokenize, Tok, Token};
use crate::syntax::SourceSpan;

pub fn parse_source(text: &str) -> Result<Vec<FunDef>, FrontendError> {
    parse_source_named(text, "<input>")
}

pub fn parse_source_named(text: &str, file: &str) -> Result<Vec<FunDef>, FrontendError> {
    let file = Arc::new(PathBuf::from(file));
    let toks = tokenize(text, &file, "//").map_err(|e| FrontendError::Syntax { span: e.span, message: e.message })?;
    let mut p = Parser { toks, pos: 0, scopes: Vec::new() };
    let mut defs = Vec::new();
    while p.peek() != &Tok::Eof {
        defs.push(p.fundef()?);
    }
    let names: BTreeSet<&str> = defs.iter().map(|d| d.name.as_str()).collect();
    for d in &defs {
        check_calls(d, &names)?;
    }
    Ok(defs)
}

fn check_calls(d: &FunDef, names: &BTreeSet<&str>) -> Result<(), FrontendError> {
    let mut exprs = vec![&d.body];
    exprs.extend(d.require.iter());
    exprs.extend(d.ensuring.iter().map(|(_, e)| e));
    let mut missing = None;
    for e in exprs {
        visit(e, &mut |e| {
            if let Expr::Call(f, _) = e {
                if !names.contains(f.as_str()) && missing.is_none() {
                    missing = Some(f.clone());
                }
            }
        });
    }
    match missing {
        Some(f) => Err(FrontendError::Unsupported {
            span: d.span.clone(),
            message: format!("call to undefined function `{f}` in `{}`", d.name),
        }),
        None => Ok(()),
    }
}

/// Pre-order traversal.
pub fn visit<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    match e {
        Expr::Var(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Nil => {}
        Expr::Cons(a, b)
        | Expr::Arith(_, a, b)
        | Expr::Cmp(_, a, b)
        | Expr::And(a, b)
        | Expr::Or(a, b)
        | Expr::Implies(a, b)
        | Expr::Let(_, a, b) => {
            visit(a, f);
            visit(b, f);
        }
        Expr::Call(_, args) | Expr::Tuple(args) => args.iter().for_each(|a| visit(a, f)),
        Expr::If(c, a, b) => {
            visit(c, f);
            visit(a, f);
            visit(b, f);
        }
        Expr::Match(_, cases) => {
            for c in cases {
                if let Some(g) = &c.guard {
                    visit(g, f);
                }
                visit(&c.body, f);
            }
        }
        Expr::Proj(a, _) | Expr::Head(a) | Expr::Tail(a) | Expr::Forall(_, _, a) => visit(a, f),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Variables in scope, innermost last.
    scopes: Vec<String>,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(FrontendError::Syntax { span: self.span(), message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) | Tok::Var(t) if t == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{w}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a lowercase identifier"),
        }
    }

    fn in_scope(&self, x: &str) -> bool {
        self.scopes.iter().any(|s| s == x)
    }

    fn fundef(&mut self) -> PResult<FunDef> {
        let span = self.span();
        self.expect_word("def")?;
        let name = self.ident()?;
        if self.is_sym("[") {
            return self.error(format!("`{name}`: type parameters are not supported"));
        }
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                let p = self.ident()?;
                self.expect_sym(":")?;
                params.push((p, self.ty()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        self.expect_sym(":")?;
        let ret = self.ty()?;
        self.expect_sym("=")?;
        let base = self.scopes.len();
        self.scopes.extend(params.iter().map(|(p, _)| p.clone()));
        let (require, body) = if self.is_sym("{") {
            self.bump();
            let require = if self.is_word("require") {
                self.bump();
                self.expect_sym("(")?;
                let r = self.expr()?;
                self.expect_sym(")")?;
                Some(r)
            } else {
                None
            };
            let body = self.seq()?;
            self.expect_sym("}")?;
            (require, body)
        } else {
            (None, self.expr()?)
        };
        let ensuring = if self.is_word("ensuring") {
            self.bump();
            self.expect_sym("{")?;
            let res = self.ident()?;
            self.expect_sym("=>")?;
            self.scopes.push(res.clone());
            let post = self.expr()?;
            self.expect_sym("}")?;
            Some((res, post))
        } else {
            None
        };
        self.scopes.truncate(base);
        Ok(FunDef { name, params, ret, body, require, ensuring, span })
    }

    fn ty(&mut self) -> PResult<Type> {
        if self.eat_sym("(") {
            let mut ts = vec![self.ty()?];
            while self.eat_sym(",") {
                ts.push(self.ty()?);
            }
            self.expect_sym(")")?;
            return Ok(if ts.len() == 1 { ts.remove(0) } else { Type::Tuple(ts) });
        }
        let t = match self.peek() {
            Tok::Var(s) if s == "Nat" => Type::Nat,
            Tok::Var(s) if s == "Int" || s == "BigInt" => Type::Int,
            Tok::Var(s) if s == "Boolean" => Type::Bool,
            Tok::Var(s) if s == "List" => {
                self.bump();
                self.expect_sym("[")?;
                if !self.is_word("Nat") {
                    return self.error("only List[Nat] is supported");
                }
                self.bump();
                self.expect_sym("]")?;
                return Ok(Type::List);
            }
            _ => return self.unexpected("a type"),
        };
        self.bump();
        Ok(t)
    }

    /// `val` bindings followed by a final expression.
    fn seq(&mut self) -> PResult<Expr> {
        if !self.is_word("val") {
            return self.expr();
        }
        self.bump();
        let names = if self.eat_sym("(") {
            let mut ns = vec![self.ident()?];
            while self.eat_sym(",") {
                ns.push(self.ident()?);
            }
            self.expect_sym(")")?;
            ns
        } else {
            vec![self.ident()?]
        };
        self.expect_sym("=")?;
        let value = self.expr()?;
        let base = self.scopes.len();
        self.scopes.extend(names.iter().cloned());
        let rest = self.seq()?;
        self.scopes.truncate(base);
        Ok(Expr::Let(names, Box::new(value), Box::new(rest)))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.eat_sym("==>") {
            let rhs = self.expr()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut e = self.and()?;
        while self.eat_sym("||") {
            e = Expr::Or(Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut e = self.cmp()?;
        while self.eat_sym("&&") {
            e = Expr::And(Box::new(e), Box::new(self.cmp()?));
        }
        Ok(e)
    }

    fn cmp(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") | Tok::Sym("=/=") | Tok::Sym("=\\=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") | Tok::Sym("=<") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut e = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => ArithOp::Add,
                Tok::Sym("-") => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::Arith(op, Box::new(e), Box::new(self.multiplicative()?));
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut e = self.postfix()?;
        while self.eat_sym("*") {
            e = Expr::Arith(ArithOp::Mul, Box::new(e), Box::new(self.postfix()?));
        }
        Ok(e)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.is_word("match") {
                let Expr::Var(subject) = e else {
                    return self.error("match subjects must be variables");
                };
                self.bump();
                e = Expr::Match(subject, self.cases()?);
            } else if self.eat_sym(".") {
                e = match self.bump() {
                    Tok::Ident(s) if s == "head" => Expr::Head(Box::new(e)),
                    Tok::Ident(s) if s == "tail" => Expr::Tail(Box::new(e)),
                    Tok::Var(s) if s.len() > 1 && s[1..].parse::<usize>().is_ok_and(|k| k >= 1) => {
                        Expr::Proj(Box::new(e), s[1..].parse().unwrap())
                    }
                    t => return self.error(format!("unsupported selector {t}")),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn cases(&mut self) -> PResult<Vec<Case>> {
        self.expect_sym("{")?;
        let mut cases = Vec::new();
        while self.is_word("case") {
            self.bump();
            let base = self.scopes.len();
            let pattern = if self.is_word("Nil") {
                self.bump();
                self.nil_suffix()?;
                Pattern::Nil
            } else if self.is_word("Cons") {
                self.bump();
                self.expect_sym("(")?;
                let h = self.ident()?;
                self.expect_sym(",")?;
                let t = self.ident()?;
                self.expect_sym(")")?;
                self.scopes.push(h.clone());
                self.scopes.push(t.clone());
                Pattern::Cons(h, t)
            } else {
                return self.unexpected("`Nil()` or `Cons(_, _)`");
            };
            let guard = if self.is_word("if") {
                self.bump();
                Some(self.expr()?)
            } else {
                None
            };
            self.expect_sym("=>")?;
            let body = self.seq()?;
            self.scopes.truncate(base);
            cases.push(Case { pattern, guard, body });
        }
        if cases.is_empty() {
            return self.unexpected("`case`");
        }
        self.expect_sym("}")?;
        Ok(cases)
    }

    /// Optional `[Nat]` then `()`.
    fn nil_suffix(&mut self) -> PResult<()> {
        if self.eat_sym("[") {
            self.expect_word("Nat")?;
            self.expect_sym("]")?;
        }
        self.expect_sym("(")?;
        self.expect_sym(")")
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut es = vec![self.expr()?];
                while self.eat_sym(",") {
                    es.push(self.expr()?);
                }
                self.expect_sym(")")?;
                Ok(if es.len() == 1 { es.remove(0) } else { Expr::Tuple(es) })
            }
            Tok::Sym("{") => {
                self.bump();
                let e = self.seq()?;
                self.expect_sym("}")?;
                Ok(e)
            }
            Tok::Var(s) if s == "Nil" => {
                self.bump();
                self.nil_suffix()?;
                Ok(Expr::Nil)
            }
            Tok::Var(s) if s == "Cons" => {
                self.bump();
                self.expect_sym("(")?;
                let h = self.expr()?;
                self.expect_sym(",")?;
                let t = self.expr()?;
                self.expect_sym(")")?;
                Ok(Expr::Cons(Box::new(h), Box::new(t)))
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "true" => return Ok(Expr::Bool(true)),
                    "false" => return Ok(Expr::Bool(false)),
                    "if" => {
                        self.expect_sym("(")?;
                        let c = self.expr()?;
                        self.expect_sym(")")?;
                        let a = self.expr()?;
                        self.expect_word("else")?;
                        let b = self.expr()?;
                        return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
                    }
                    "forall" => return self.forall(),
                    _ => {}
                }
                if self.eat_sym("(") {
                    let mut args = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.expect_sym(")")?;
                    return Ok(Expr::Call(s, args));
                }
                if self.in_scope(&s) {
                    Ok(Expr::Var(s))
                } else if self.is_sym("[") {
                    Err(FrontendError::Unsupported { span, message: format!("polymorphic use of `{s}`") })
                } else {
                    Err(FrontendError::Unsupported {
                        span,
                        message: format!("`{s}` is not a variable in scope; functions must be applied"),
                    })
                }
            }
            _ => self.unexpected("an expression"),
        }
    }

    /// `forall((a: Nat) => body)`, after the keyword.
    fn forall(&mut self) -> PResult<Expr> {
        self.expect_sym("(")?;
        self.expect_sym("(")?;
        let x = self.ident()?;
        self.expect_sym(":")?;
        let t = self.ty()?;
        if t != Type::Nat {
            return self.error("forall may only range over Nat");
        }
        self.expect_sym(")")?;
        self.expect_sym("=>")?;
        self.scopes.push(x.clone());
        let body = self.expr()?;
        self.scopes.pop();
        self.expect_sym(")")?;
        Ok(Expr::Forall(x, t, Box::new(body)))
    }
}
