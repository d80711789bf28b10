//! Structural recognition of parameterized catamorphisms in source form.

use super::ast::{Expr, FunDef, Pattern, Type};

/// `f(p, Nil) = base`, `f(p, Cons(x, xs)) = step(p, x, f(update(p, x), xs))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CataFun {
    pub name: String,
    /// Scalar parameters, in order.
    pub params: Vec<String>,
    pub list_param: String,
    pub base: Expr,
    pub head: String,
    pub tail: String,
    /// Guarded Cons cases, in order; together they form the step.
    pub step: Vec<(Option<Expr>, Expr)>,
    /// Arguments of the recursive call at the scalar positions.
    pub update: Vec<Expr>,
}

pub fn recognize_cata(f: &FunDef) -> Option<CataFun> {
    if !matches!(f.ret, Type::Nat | Type::Int | Type::Bool) {
        return None;
    }
    let lists: Vec<usize> = (0..f.params.len()).filter(|i| f.params[*i].1 == Type::List).collect();
    let [list_pos] = lists[..] else { return None };
    if f.params.iter().any(|(_, t)| matches!(t, Type::Tuple(_))) {
        return None;
    }
    let list_param = f.params[list_pos].0.clone();
    let Expr::Match(subject, cases) = &f.body else { return None };
    if *subject != list_param {
        return None;
    }
    let mut base = None;
    let mut step = Vec::new();
    let mut cons_names: Option<(String, String)> = None;
    let mut update: Option<Vec<Expr>> = None;
    for c in cases {
        match &c.pattern {
            Pattern::Nil => {
                if c.guard.is_some() || base.is_some() || !matches!(c.body, Expr::Int(_) | Expr::Bool(_)) {
                    return None;
                }
                base = Some(c.body.clone());
            }
            Pattern::Cons(h, t) => {
                match &cons_names {
                    Some((h0, t0)) if h0 != h || t0 != t => return None,
                    _ => cons_names = Some((h.clone(), t.clone())),
                }
                let scope = Scope { f, list_pos, tail: t };
                if let Some(g) = &c.guard {
                    if !scope.step_expr(g, &mut None) {
                        return None;
                    }
                }
                if !scope.step_expr(&c.body, &mut update) {
                    return None;
                }
                step.push((c.guard.clone(), c.body.clone()));
            }
        }
    }
    let (head, tail) = cons_names?;
    let params: Vec<String> =
        f.params.iter().enumerate().filter(|(i, _)| *i != list_pos).map(|(_, (p, _))| p.clone()).collect();
    let update = update.unwrap_or_else(|| params.iter().map(|p| Expr::Var(p.clone())).collect());
    Some(CataFun { name: f.name.clone(), params, list_param, base: base?, head, tail, step, update })
}

struct Scope<'a> {
    f: &'a FunDef,
    list_pos: usize,
    tail: &'a str,
}

impl Scope<'_> {
    /// Arithmetic, comparisons and conditionals over scalars, plus recursive
    /// calls on the tail that all share one parameter update.
    fn step_expr(&self, e: &Expr, update: &mut Option<Vec<Expr>>) -> bool {
        match e {
            Expr::Var(x) => x != self.tail && *x != self.f.params[self.list_pos].0,
            Expr::Int(_) | Expr::Bool(_) => true,
            Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                self.step_expr(a, update) && self.step_expr(b, update)
            }
            Expr::If(c, a, b) => self.step_expr(c, update) && self.step_expr(a, update) && self.step_expr(b, update),
            Expr::Call(g, args) if *g == self.f.name && args.len() == self.f.params.len() => {
                if args[self.list_pos] != Expr::Var(self.tail.to_string()) {
                    return false;
                }
                let scalars: Vec<Expr> =
                    args.iter().enumerate().filter(|(i, _)| *i != self.list_pos).map(|(_, a)| a.clone()).collect();
                if !scalars.iter().all(|a| self.step_expr(a, &mut None) && !calls(a)) {
                    return false;
                }
                match update {
                    Some(u) => *u == scalars,
                    None => {
                        *update = Some(scalars);
                        true
                    }
                }
            }
            _ => false,
        }
    }
}

fn calls(e: &Expr) -> bool {
    let mut found = false;
    super::parser::visit(e, &mut |e| found |= matches!(e, Expr::Call(..)));
    found
}
