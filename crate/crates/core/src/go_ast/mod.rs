//! The functional fragment of Go: structs, empty interfaces, generic
//! functions constrained by `any`, returns, ifs and type assertions, plus the
//! few extensions generated code needs (`==`, `&&`, `panic`, blank names,
//! block statements and function types).

mod check;
mod eval;
mod render;

use crate::ir::builtins::BaseValue;
use crate::ir::Name;

pub use check::{check_wf, check_wf_with, Strictness, WfDiagnostic, WfKind};
pub use eval::{
    geval, geval_expr, go_eq, GClosure, GEnv, GFailure, GValue, Machine, DEFAULT_GO_FUEL,
};
pub use render::{fill_template, go_type, quote, render, render_decl, render_expr};

pub const BLANK: &str = "_";
pub const MATCH_FAILED: &str = "match failed";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GoType {
    Param(Name),
    Struct(Name, Vec<GoType>),
    Iface(Name, Vec<GoType>),
    Func(Vec<GoType>, Vec<GoType>),
    /// The empty interface.
    Any,
    /// A host type supplied by the adaptation table, e.g. `*big.Int`.
    Opaque(String),
}

impl GoType {
    pub fn bool() -> GoType {
        GoType::Opaque("bool".into())
    }

    pub fn is_interface(&self) -> bool {
        matches!(self, GoType::Iface(..) | GoType::Any)
    }

    pub fn subst(&self, map: &[(Name, GoType)]) -> GoType {
        match self {
            GoType::Param(p) => map
                .iter()
                .find(|(n, _)| n == p)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            GoType::Struct(n, args) => {
                GoType::Struct(n.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
            GoType::Iface(n, args) => {
                GoType::Iface(n.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
            GoType::Func(ps, rs) => GoType::Func(
                ps.iter().map(|a| a.subst(map)).collect(),
                rs.iter().map(|a| a.subst(map)).collect(),
            ),
            GoType::Any | GoType::Opaque(_) => self.clone(),
        }
    }

    pub fn mentions_func(&self) -> bool {
        match self {
            GoType::Func(..) => true,
            GoType::Struct(_, args) | GoType::Iface(_, args) => {
                args.iter().any(GoType::mentions_func)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeBody {
    Struct(Vec<(Name, GoType)>),
    Interface,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: TypeBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: Name,
    pub type_params: Vec<Name>,
    pub params: Vec<(Name, GoType)>,
    pub results: Vec<GoType>,
    pub body: Stmt,
    /// Destructors are printed in the compact `f(p T)(R...)` layout.
    pub destructor: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoDecl {
    Type(TypeDecl),
    Func(FuncDecl),
}

impl GoDecl {
    pub fn name(&self) -> &str {
        match self {
            GoDecl::Type(t) => &t.name,
            GoDecl::Func(f) => &f.name,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoProgram {
    pub package: Name,
    pub imports: Vec<String>,
    pub decls: Vec<GoDecl>,
}

impl GoProgram {
    pub fn func(&self, name: &str) -> Option<&FuncDecl> {
        self.decls.iter().find_map(|d| match d {
            GoDecl::Func(f) if f.name == name => Some(f),
            _ => None,
        })
    }
}

/// What a printing-rule template computes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimOp {
    /// A primitive constant of the source language, e.g. `int.plus`.
    Builtin(Name),
    /// A literal host value.
    Value(BaseValue),
}

/// A printing-rule instantiation: Go text with `%1`, `%2`, ... holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prim {
    pub template: String,
    pub op: PrimOp,
    pub args: Vec<GoExpr>,
    pub arg_types: Vec<GoType>,
    pub result: GoType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoExpr {
    Var(Name),
    /// Call of a top-level function. Empty `type_args` on a generic callee
    /// leaves them to inference.
    Call {
        func: Name,
        type_args: Vec<GoType>,
        args: Vec<GoExpr>,
    },
    StructLit {
        ty: GoType,
        fields: Vec<GoExpr>,
    },
    FuncLit {
        params: Vec<(Name, GoType)>,
        results: Vec<GoType>,
        body: Box<Stmt>,
    },
    Field {
        target: Box<GoExpr>,
        field: Name,
    },
    Conv {
        ty: GoType,
        inner: Box<GoExpr>,
    },
    Nil,
    CallExpr {
        target: Box<GoExpr>,
        args: Vec<GoExpr>,
    },
    Eq(Box<GoExpr>, Box<GoExpr>),
    And(Box<GoExpr>, Box<GoExpr>),
    Prim(Box<Prim>),
}

impl GoExpr {
    pub fn var(name: impl Into<Name>) -> GoExpr {
        GoExpr::Var(name.into())
    }

    pub fn call(func: impl Into<Name>, type_args: Vec<GoType>, args: Vec<GoExpr>) -> GoExpr {
        GoExpr::Call {
            func: func.into(),
            type_args,
            args,
        }
    }

    pub fn conv(ty: GoType, inner: GoExpr) -> GoExpr {
        GoExpr::Conv {
            ty,
            inner: Box::new(inner),
        }
    }

    pub fn field(target: GoExpr, field: impl Into<Name>) -> GoExpr {
        GoExpr::Field {
            target: Box::new(target),
            field: field.into(),
        }
    }

    pub fn call_expr(target: GoExpr, args: Vec<GoExpr>) -> GoExpr {
        GoExpr::CallExpr {
            target: Box::new(target),
            args,
        }
    }

    pub fn eq(a: GoExpr, b: GoExpr) -> GoExpr {
        GoExpr::Eq(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conj(conds: Vec<GoExpr>) -> Option<GoExpr> {
        conds
            .into_iter()
            .reduce(|a, b| GoExpr::And(Box::new(a), Box::new(b)))
    }

    pub fn func_lit(params: Vec<(Name, GoType)>, results: Vec<GoType>, body: Stmt) -> GoExpr {
        GoExpr::FuncLit {
            params,
            results,
            body: Box::new(body),
        }
    }
}

/// Statements in continuation form: every statement but the terminal ones
/// carries the statement that follows it. `Done` ends a nested block or
/// `if` body that falls through to the enclosing `rest`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Return(Vec<GoExpr>),
    Define {
        names: Vec<Name>,
        value: GoExpr,
        rest: Box<Stmt>,
    },
    Assert {
        value: Name,
        ok: Name,
        target: GoExpr,
        ty: GoType,
        rest: Box<Stmt>,
    },
    If {
        cond: GoExpr,
        then: Box<Stmt>,
        rest: Box<Stmt>,
    },
    Block {
        inner: Box<Stmt>,
        rest: Box<Stmt>,
    },
    Panic(String),
    Done,
}

impl Stmt {
    pub fn ret(e: GoExpr) -> Stmt {
        Stmt::Return(vec![e])
    }

    pub fn define(names: Vec<Name>, value: GoExpr, rest: Stmt) -> Stmt {
        Stmt::Define {
            names,
            value,
            rest: Box::new(rest),
        }
    }

    pub fn if_then(cond: GoExpr, then: Stmt, rest: Stmt) -> Stmt {
        Stmt::If {
            cond,
            then: Box::new(then),
            rest: Box::new(rest),
        }
    }

    pub fn block(inner: Stmt, rest: Stmt) -> Stmt {
        Stmt::Block {
            inner: Box::new(inner),
            rest: Box::new(rest),
        }
    }

    /// Whether control can not fall off the end (Go's terminating
    /// statements, restricted to this fragment).
    pub fn terminates(&self) -> bool {
        match self {
            Stmt::Return(_) | Stmt::Panic(_) => true,
            Stmt::Define { rest, .. } | Stmt::Assert { rest, .. } | Stmt::If { rest, .. } => {
                rest.terminates()
            }
            Stmt::Block { inner, rest } => match **rest {
                Stmt::Done => inner.terminates(),
                _ => rest.terminates(),
            },
            Stmt::Done => false,
        }
    }

    /// Appends `next` where this statement falls through.
    pub fn then(self, next: Stmt) -> Stmt {
        match self {
            Stmt::Done => next,
            Stmt::Define { names, value, rest } => Stmt::define(names, value, rest.then(next)),
            Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest,
            } => Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest: Box::new(rest.then(next)),
            },
            Stmt::If { cond, then, rest } => Stmt::if_then(cond, *then, rest.then(next)),
            Stmt::Block { inner, rest } => Stmt::block(*inner, rest.then(next)),
            terminal => terminal,
        }
    }

    /// Inlines every block into the surrounding statement list.
    pub fn flatten_blocks(self) -> Stmt {
        match self {
            Stmt::Block { inner, rest } => inner.flatten_blocks().then(rest.flatten_blocks()),
            Stmt::Define { names, value, rest } => {
                Stmt::define(names, value, rest.flatten_blocks())
            }
            Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest,
            } => Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest: Box::new(rest.flatten_blocks()),
            },
            Stmt::If { cond, then, rest } => {
                Stmt::if_then(cond, then.flatten_blocks(), rest.flatten_blocks())
            }
            other => other,
        }
    }

    /// Number of top-level block statements in this statement list.
    pub fn block_count(&self) -> usize {
        match self {
            Stmt::Block { rest, .. } => 1 + rest.block_count(),
            Stmt::Define { rest, .. } | Stmt::Assert { rest, .. } | Stmt::If { rest, .. } => {
                rest.block_count()
            }
            _ => 0,
        }
    }
}
