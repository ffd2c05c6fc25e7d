//! Surface syntax tree, before name resolution and type elaboration.

use num_bigint::BigInt;

use super::SourcePos;

#[derive(Clone, Debug, PartialEq)]
pub enum SType {
    /// `'a`, optionally with a sort annotation `('a :: c)`.
    Var(String, Vec<String>, SourcePos),
    App(String, Vec<SType>, SourcePos),
    Fun(Box<SType>, Box<SType>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SPat {
    Var(String, SourcePos),
    Con(String, Vec<SPat>, SourcePos),
}

#[derive(Clone, Debug, PartialEq)]
pub enum STerm {
    /// Lowercase name: a local variable or a top-level function/method.
    Name(String, SourcePos),
    Ctor(String, SourcePos),
    Int(BigInt, SourcePos),
    Str(String, SourcePos),
    App(Box<STerm>, Box<STerm>),
    Abs(String, Option<SType>, Box<STerm>, SourcePos),
    Case(Box<STerm>, Vec<(SPat, STerm)>, SourcePos),
    Let(String, Box<STerm>, Box<STerm>, SourcePos),
    If(Box<STerm>, Box<STerm>, Box<STerm>, SourcePos),
}

impl STerm {
    pub fn pos(&self) -> SourcePos {
        match self {
            STerm::Name(_, p)
            | STerm::Ctor(_, p)
            | STerm::Int(_, p)
            | STerm::Str(_, p)
            | STerm::Abs(_, _, _, p)
            | STerm::Case(_, _, p)
            | STerm::Let(_, _, _, p)
            | STerm::If(_, _, _, p) => *p,
            STerm::App(f, _) => f.pos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SEquation {
    pub name: String,
    pub params: Vec<SPat>,
    pub rhs: STerm,
    pub pos: SourcePos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SDecl {
    Data {
        name: String,
        params: Vec<String>,
        ctors: Vec<(String, Vec<SType>)>,
        pos: SourcePos,
    },
    Fun {
        name: String,
        signature: SType,
        equations: Vec<SEquation>,
        pos: SourcePos,
    },
    Class {
        name: String,
        superclasses: Vec<String>,
        methods: Vec<(String, SType, SourcePos)>,
        pos: SourcePos,
    },
    Instance {
        head: SType,
        class: String,
        constraints: Vec<(String, Vec<String>)>,
        equations: Vec<SEquation>,
        pos: SourcePos,
    },
    Definition {
        name: String,
        signature: SType,
        rhs: STerm,
        pos: SourcePos,
    },
}

impl SDecl {
    pub fn pos(&self) -> SourcePos {
        match self {
            SDecl::Data { pos, .. }
            | SDecl::Fun { pos, .. }
            | SDecl::Class { pos, .. }
            | SDecl::Instance { pos, .. }
            | SDecl::Definition { pos, .. } => *pos,
        }
    }
}
