//! Front end for a small first-order functional language with contracts:
//! parsing, catamorphism recognition and translation to clauses.

pub mod ast;
mod cata;
mod parser;
mod translate;

use thiserror::Error;

pub use cata::{recognize_cata, CataFun};
pub use parser::{parse_source, parse_source_named, visit};
pub use translate::{translate, translate_contracts, translate_program, Translation};

use crate::model::ModelError;
use crate::syntax::SourceSpan;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: unsupported: {message}")]
    Unsupported { span: SourceSpan, message: String },
    #[error("in function `{function}`: {message}")]
    Translate { function: String, message: String },
    #[error("in the contract of `{function}`: {message}")]
    Contract { function: String, message: String },
    #[error("no definitions")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[cfg(test)]
mod tests;
