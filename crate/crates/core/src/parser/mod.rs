//! Surface syntax: lexing, parsing, name and type resolution, and a
//! printer producing text that parses back to the same program.
//!
//! ```text
//! datatype 'a list = Nil | Cons 'a ('a list)
//! fun hd2 :: 'a list => 'a option where
//!   hd2 xs = case xs of Nil => None
//!                     | Cons x Nil => None
//!                     | Cons x (Cons y xs) => Some y
//! class monoid <= semigroup where
//!   zero :: 'a
//! instance Nat :: semigroup where
//!   a + Zero = a
//! definition a :: int where a = 10
//! ```

mod grammar;
mod infer;
mod lexer;
pub mod pretty;
mod resolve;
pub mod syntax;

use std::fmt;

use serde::Serialize;

use crate::ir::{self, Program, Term, Type};

pub use resolve::{Positions, NIL_PREFIX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl Default for SourcePos {
    fn default() -> Self {
        SourcePos { line: 1, column: 1 }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticKind {
    Lex,
    Parse,
    Scope,
    Type,
    Arity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub pos: SourcePos,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = format!("{:?}", self.kind).to_lowercase();
        write!(f, "{}: {kind} error: {}", self.pos, self.message)
    }
}

impl Diagnostic {
    /// Whether the diagnostic comes from lexing or parsing, as opposed to
    /// name or type resolution.
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, DiagnosticKind::Lex | DiagnosticKind::Parse)
    }
}

/// Parses and fully resolves a source file.
pub fn parse_program(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let (tokens, mut errors) = lexer::lex(src);
    let (decls, mut parse_errors) = grammar::parse_decls(&tokens);
    errors.append(&mut parse_errors);
    if !errors.is_empty() {
        errors.sort_by_key(|d| d.pos);
        return Err(errors);
    }
    let (program, positions, errors) = resolve::resolve_program(&decls);
    if !errors.is_empty() {
        return Err(errors);
    }
    let program = infer::resolve_types_at(&program, &positions)?;
    let problems = ir::validate(&program);
    if !problems.is_empty() {
        return Err(problems
            .into_iter()
            .map(|d| Diagnostic {
                pos: program
                    .decls
                    .iter()
                    .position(|decl| decl.name() == d.decl)
                    .map(|i| positions.decl(i))
                    .unwrap_or_default(),
                kind: match d.kind {
                    ir::DiagnosticKind::CtorArityMismatch
                    | ir::DiagnosticKind::EquationArityMismatch
                    | ir::DiagnosticKind::ArityExceedsSignature
                    | ir::DiagnosticKind::TypeArity => DiagnosticKind::Arity,
                    ir::DiagnosticKind::UnknownName
                    | ir::DiagnosticKind::UnboundVariable
                    | ir::DiagnosticKind::UnknownClass
                    | ir::DiagnosticKind::UnknownType
                    | ir::DiagnosticKind::DuplicateName
                    | ir::DiagnosticKind::NonLinearPattern => DiagnosticKind::Scope,
                    _ => DiagnosticKind::Type,
                },
                message: d.message,
            })
            .collect());
    }
    Ok(program)
}

/// Fills in missing annotations of a program whose unknown types are
/// written as metavariables (type variables named `?...`).
pub fn resolve_types(p: &Program) -> Result<Program, Vec<Diagnostic>> {
    infer::resolve_types_at(p, &Positions::default())
}

/// A resolved call of a top-level entry point.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryTerm {
    pub term: Term,
    pub ty: Type,
    /// Placeholder variables standing for `nil` arguments, in order.
    pub nil_vars: Vec<String>,
}

/// Builds the term `entry a1 ... an` from whitespace-separated atomic
/// argument terms, e.g. `Zero (Cons Zero Nil)`. The literal `nil` stands
/// for an absent value.
pub fn parse_entry(p: &Program, entry: &str, args: &str) -> Result<EntryTerm, Vec<Diagnostic>> {
    let (tokens, errors) = lexer::lex(args);
    if !errors.is_empty() {
        return Err(errors);
    }
    let atoms = grammar::parse_atoms(&tokens).map_err(|e| vec![e])?;
    let head = syntax::STerm::Name(entry.to_string(), SourcePos::default());
    let call = atoms
        .into_iter()
        .fold(head, |f, a| syntax::STerm::App(Box::new(f), Box::new(a)));
    resolve_entry(p, &call)
}

/// Parses and resolves a closed term over `p`.
pub fn parse_term(p: &Program, src: &str) -> Result<EntryTerm, Vec<Diagnostic>> {
    let (tokens, errors) = lexer::lex(src);
    if !errors.is_empty() {
        return Err(errors);
    }
    let t = grammar::parse_term(&tokens).map_err(|e| vec![e])?;
    resolve_entry(p, &t)
}

fn resolve_entry(p: &Program, t: &syntax::STerm) -> Result<EntryTerm, Vec<Diagnostic>> {
    let mut r = resolve::Resolver::for_entry(p);
    let term = r.term(t, &mut Vec::new(), &[]);
    if !r.errors.is_empty() {
        return Err(r.errors);
    }
    let nil_vars = r.nil_vars;
    let (term, ty) = infer::resolve_term(p, &term, &nil_vars).map_err(|message| {
        vec![Diagnostic {
            pos: t.pos(),
            kind: DiagnosticKind::Type,
            message,
        }]
    })?;
    Ok(EntryTerm { term, ty, nil_vars })
}
