//! Compiler from a small typed functional language to a functional subset
//! of Go, together with the two evaluators used to check it: an interpreter
//! for the source IR and an interpreter for the emitted Go fragment.

pub mod backend;
pub mod codegen;
pub mod dict_pass;
pub mod emit;
pub mod go_ast;
pub mod ir;
pub mod oracle;
pub mod parser;
