//! Concrete syntaxes: the clause language, SMT-LIB2 Horn output and solver
//! replies.

pub mod chc;
pub mod lexer;
pub mod smtlib;

pub use chc::{parse_chc, parse_chc_in, parse_chc_named, parse_clause, parse_clause_in, ParseError};
pub use lexer::SourceSpan;
pub use smtlib::{emit_smtlib_horn, emit_smtlib_horn_with, parse_solver_output, EmitError, ListMode, SolverVerdict};

use crate::model::{Clause, ClauseSet};

/// Prints one clause per line, prefixed by its label when it has one.
pub fn print_chc(cs: &ClauseSet) -> String {
    cs.clauses.iter().map(|c| format!("{}\n", print_clause(c))).collect()
}

pub fn print_clause(c: &Clause) -> String {
    match &c.tag {
        Some(t) if is_label(t) => format!("{t}. {c}"),
        _ => c.to_string(),
    }
}

fn is_label(t: &str) -> bool {
    let mut chars = t.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() => t.chars().all(|c| c.is_ascii_digit()),
        Some(c) if c.is_uppercase() => chars.all(|c| c.is_alphanumeric() || c == '_'),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_prints_empty() {
        assert_eq!(print_chc(&ClauseSet::new()), "");
    }
}
