//! Syntax of the contract-annotated functional source language.

use std::fmt;

use crate::syntax::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Nat,
    Int,
    Bool,
    /// `List[Nat]`; the only list type.
    List,
    Tuple(Vec<Type>),
}

impl Type {
    /// Component types of a flattened result.
    pub fn flatten(&self) -> Vec<Type> {
        match self {
            Type::Tuple(ts) => ts.iter().flat_map(Type::flatten).collect(),
            t => vec![t.clone()],
        }
    }

    pub fn mentions_list(&self) -> bool {
        self.flatten().contains(&Type::List)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => write!(f, "Nat"),
            Type::Int => write!(f, "Int"),
            Type::Bool => write!(f, "Boolean"),
            Type::List => write!(f, "List[Nat]"),
            Type::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Nil,
    Cons(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub pattern: Pattern,
    pub guard: Option<Expr>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Int(i64),
    Bool(bool),
    Nil,
    Cons(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `subject match { cases }`; the subject is a variable.
    Match(String, Vec<Case>),
    /// `val x = e; rest` or `val (a, b) = e; rest`.
    Let(Vec<String>, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    /// `e._k`, with `k` counted from 1.
    Proj(Box<Expr>, usize),
    Head(Box<Expr>),
    Tail(Box<Expr>),
    Forall(String, Type, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub body: Expr,
    pub require: Option<Expr>,
    /// Result variable and postcondition.
    pub ensuring: Option<(String, Expr)>,
    pub span: SourceSpan,
}

impl FunDef {
    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|(_, t)| t.clone()).collect()
    }
}
