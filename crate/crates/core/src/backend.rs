//! Evaluation backends behind one interface, looked up by name. `oracle`
//! interprets the elaborated IR; `fragment` compiles to Go and runs the
//! fragment evaluator.

use std::cell::OnceCell;

use thiserror::Error;

use crate::codegen::{AdaptationTable, Codegen, CodegenError};
use crate::dict_pass::{self, ElabError};
use crate::go_ast::{geval_expr, GFailure, GoProgram, MATCH_FAILED};
use crate::ir::{Program, Term};
use crate::oracle::{self, Env, Failure, OValue};
use crate::parser::EntryTerm;

/// Go programs take more evaluation steps than the IR for the same work;
/// the fragment backend scales the fuel it is given by this factor.
pub const GO_FUEL_FACTOR: u64 = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(OValue),
    MatchFailed,
    OutOfFuel,
}

impl Outcome {
    pub fn render(&self) -> String {
        match self {
            Outcome::Value(v) => v.render(),
            Outcome::MatchFailed => MATCH_FAILED.into(),
            Outcome::OutOfFuel => "out of fuel".into(),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error("result is a function and has no printed form")]
    Unprintable,
    #[error("evaluation crashed: {0}")]
    Crashed(String),
}

/// A parsed program together with its elaborated form and the adaptation
/// table used when compiling it.
pub struct Session {
    pub source: Program,
    pub elaborated: Program,
    pub table: AdaptationTable,
    go: OnceCell<Result<GoProgram, CodegenError>>,
}

impl Session {
    pub fn new(source: Program, table: AdaptationTable) -> Result<Session, ElabError> {
        let elaborated = dict_pass::elaborate(&source)?;
        Ok(Session {
            source,
            elaborated,
            table,
            go: OnceCell::new(),
        })
    }

    pub fn codegen(&self) -> Result<Codegen<'_>, CodegenError> {
        Codegen::new(&self.elaborated, &self.table)
    }

    /// The compiled program, built on first use.
    pub fn go_program(&self) -> Result<&GoProgram, CodegenError> {
        self.go
            .get_or_init(|| self.codegen()?.program("main"))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn elaborate_entry(&self, entry: &EntryTerm) -> Result<Term, ElabError> {
        dict_pass::elaborate_term(&self.source, &entry.term)
    }
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Evaluates an entry call resolved against `session.source`.
    fn run(&self, session: &Session, entry: &EntryTerm, fuel: u64) -> Result<Outcome, BackendError>;
}

pub struct OracleBackend;

impl Backend for OracleBackend {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn run(&self, session: &Session, entry: &EntryTerm, fuel: u64) -> Result<Outcome, BackendError> {
        let t = session.elaborate_entry(entry)?;
        let env = entry
            .nil_vars
            .iter()
            .fold(Env::new(), |env, n| env.bind(n.clone(), OValue::Absent));
        match oracle::eval(&session.elaborated, &t, &env, fuel) {
            Ok(OValue::Closure(_) | OValue::Suspended(_)) => Err(BackendError::Unprintable),
            Ok(v) => Ok(Outcome::Value(v)),
            Err(Failure::MatchFailed) => Ok(Outcome::MatchFailed),
            Err(Failure::OutOfFuel) => Ok(Outcome::OutOfFuel),
            Err(Failure::Stuck(msg)) => Err(BackendError::Crashed(msg)),
        }
    }
}

pub struct FragmentBackend;

impl Backend for FragmentBackend {
    fn name(&self) -> &'static str {
        "fragment"
    }

    fn run(&self, session: &Session, entry: &EntryTerm, fuel: u64) -> Result<Outcome, BackendError> {
        let t = session.elaborate_entry(entry)?;
        let cg = session.codegen()?;
        let prog = session.go_program()?;
        let e = cg.entry_expr(&t)?;
        match geval_expr(prog, &e, Vec::new(), fuel.saturating_mul(GO_FUEL_FACTOR)) {
            Ok(v) => cg
                .erase(&v)
                .map(Outcome::Value)
                .ok_or(BackendError::Unprintable),
            Err(GFailure::Panic(msg)) if msg == MATCH_FAILED => Ok(Outcome::MatchFailed),
            Err(GFailure::OutOfFuel) => Ok(Outcome::OutOfFuel),
            Err(other) => Err(BackendError::Crashed(other.to_string())),
        }
    }
}

pub struct Registry {
    backends: Vec<Box<dyn Backend>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            backends: Vec::new(),
        }
    }

    pub fn register(&mut self, backend: Box<dyn Backend>) {
        self.backends.retain(|b| b.name() != backend.name());
        self.backends.push(backend);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Backend> {
        self.backends
            .iter()
            .find(|b| b.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.backends.iter().map(|b| b.name()).collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(OracleBackend));
        r.register(Box::new(FragmentBackend));
        r
    }
}
