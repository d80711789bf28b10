//! Constrained Horn clauses over integers, booleans and integer lists, and a
//! fold/unfold transformation that removes the list arguments.

pub mod engine;
pub mod frontend;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod strategy;
pub mod syntax;
pub mod transform;
