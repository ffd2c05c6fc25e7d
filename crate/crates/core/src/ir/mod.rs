//! The typed intermediate representation.
//!
//! A [`Program`] is a flat list of declarations: datatypes, multi-equation
//! functions, type classes, instances and constants. Terms are fully
//! annotated (binder types, scrutinee types and type arguments of every
//! reference), so later passes never need to run inference.
//!
//! After dictionary elaboration the same data model is reused: classes turn
//! into record-like datatypes, constraints into explicit dictionary
//! parameters and method references into [`Term::Method`] projections.

pub mod builtins;
mod index;
pub mod typing;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use index::{Entity, ProgramIndex, TypeEntity};
pub use validate::{arity, validate, ArityError, Diagnostic, DiagnosticKind};

pub type Name = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "TypeRepr", from = "TypeRepr")]
pub enum Type {
    Var(Name),
    Con(Name, Vec<Type>),
    Fun(Box<Type>, Box<Type>),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TypeRepr {
    Var {
        name: Name,
    },
    Con {
        name: Name,
        args: Vec<TypeRepr>,
    },
    Fun {
        arg: Box<TypeRepr>,
        result: Box<TypeRepr>,
    },
}

impl From<Type> for TypeRepr {
    fn from(ty: Type) -> Self {
        match ty {
            Type::Var(name) => TypeRepr::Var { name },
            Type::Con(name, args) => TypeRepr::Con {
                name,
                args: args.into_iter().map(Into::into).collect(),
            },
            Type::Fun(arg, result) => TypeRepr::Fun {
                arg: Box::new((*arg).into()),
                result: Box::new((*result).into()),
            },
        }
    }
}

impl From<TypeRepr> for Type {
    fn from(repr: TypeRepr) -> Self {
        match repr {
            TypeRepr::Var { name } => Type::Var(name),
            TypeRepr::Con { name, args } => {
                Type::Con(name, args.into_iter().map(Into::into).collect())
            }
            TypeRepr::Fun { arg, result } => {
                Type::Fun(Box::new((*arg).into()), Box::new((*result).into()))
            }
        }
    }
}

impl Type {
    pub fn var(name: impl Into<Name>) -> Type {
        Type::Var(name.into())
    }

    pub fn con(name: impl Into<Name>, args: Vec<Type>) -> Type {
        Type::Con(name.into(), args)
    }

    pub fn base(name: impl Into<Name>) -> Type {
        Type::Con(name.into(), Vec::new())
    }

    pub fn fun(arg: Type, result: Type) -> Type {
        Type::Fun(Box::new(arg), Box::new(result))
    }

    /// Builds `a1 => a2 => ... => result`.
    pub fn arrows(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, arg| Type::fun(arg, acc))
    }

    /// Splits off up to `n` argument types. Returns `None` when the type has
    /// fewer than `n` arrows.
    pub fn split_arrows(&self, n: usize) -> Option<(Vec<Type>, Type)> {
        let mut args = Vec::with_capacity(n);
        let mut cur = self;
        for _ in 0..n {
            match cur {
                Type::Fun(arg, result) => {
                    args.push((**arg).clone());
                    cur = result;
                }
                _ => return None,
            }
        }
        Some((args, cur.clone()))
    }

    /// Number of top-level arrows.
    pub fn arrow_count(&self) -> usize {
        match self {
            Type::Fun(_, result) => 1 + result.arrow_count(),
            _ => 0,
        }
    }

    pub fn subst(&self, map: &[(Name, Type)]) -> Type {
        match self {
            Type::Var(v) => map
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, ty)| ty.clone())
                .unwrap_or_else(|| self.clone()),
            Type::Con(name, args) => {
                Type::Con(name.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
            Type::Fun(arg, result) => Type::fun(arg.subst(map), result.subst(map)),
        }
    }

    /// Type variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Type::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Type::Fun(arg, result) => {
                arg.collect_vars(out);
                result.collect_vars(out);
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) => false,
            Type::Con(_, args) => args.iter().all(Type::is_ground),
            Type::Fun(arg, result) => arg.is_ground() && result.is_ground(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(v) => write!(f, "'{v}"),
            Type::Con(name, args) => match args.len() {
                0 => write!(f, "{name}"),
                1 => {
                    if matches!(args[0], Type::Fun(..)) {
                        write!(f, "({}) {name}", args[0])
                    } else {
                        write!(f, "{} {name}", args[0])
                    }
                }
                _ => {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ") {name}")
                }
            },
            Type::Fun(arg, result) => {
                if matches!(**arg, Type::Fun(..)) {
                    write!(f, "({arg}) => {result}")
                } else {
                    write!(f, "{arg} => {result}")
                }
            }
        }
    }
}

/// A class constraint `var :: class`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub var: Name,
    pub class: Name,
}

/// A declared type parameter together with the classes it must belong to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TyParam {
    pub name: Name,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<Name>,
}

impl TyParam {
    pub fn plain(name: impl Into<Name>) -> Self {
        TyParam {
            name: name.into(),
            classes: Vec::new(),
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.classes.iter().map(|class| Constraint {
            var: self.name.clone(),
            class: class.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Pattern {
    Var {
        name: Name,
    },
    Con {
        ctor: Name,
        #[serde(default)]
        type_args: Vec<Type>,
        #[serde(default)]
        args: Vec<Pattern>,
    },
}

impl Pattern {
    pub fn var(name: impl Into<Name>) -> Pattern {
        Pattern::Var { name: name.into() }
    }

    pub fn con(ctor: impl Into<Name>, type_args: Vec<Type>, args: Vec<Pattern>) -> Pattern {
        Pattern::Con {
            ctor: ctor.into(),
            type_args,
            args,
        }
    }

    /// Bound variables, left to right, duplicates included.
    pub fn vars(&self) -> Vec<&Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Name>) {
        match self {
            Pattern::Var { name } => out.push(name),
            Pattern::Con { args, .. } => args.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Pattern::Var { .. } => 0,
            Pattern::Con { args, .. } => 1 + args.iter().map(Pattern::depth).max().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Literal {
    Int(BigInt),
    Str(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub pattern: Pattern,
    pub body: Term,
}

/// Where a dictionary comes from: a dictionary parameter in scope or an
/// instance (applied to the dictionaries its own constraints need), followed
/// by a chain of superclass projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstancePath {
    pub root: DictRoot,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub projections: Vec<SuperProjection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DictRoot {
    Param {
        name: Name,
    },
    Instance {
        name: Name,
        type_args: Vec<Type>,
        args: Vec<InstancePath>,
    },
}

/// Selects the superclass dictionary `superclass` stored in a dictionary of
/// class `class`, under the record label `field`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperProjection {
    pub class: Name,
    pub superclass: Name,
    pub field: Name,
}

impl InstancePath {
    pub fn param(name: impl Into<Name>) -> Self {
        InstancePath {
            root: DictRoot::Param { name: name.into() },
            projections: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Var {
        name: Name,
    },
    /// Reference to a top-level function, constant, constructor, class
    /// method or builtin, with the instantiation of its type parameters.
    Ref {
        name: Name,
        #[serde(default)]
        type_args: Vec<Type>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        dicts: Vec<InstancePath>,
    },
    App {
        fun: Box<Term>,
        arg: Box<Term>,
    },
    Abs {
        binder: Name,
        ty: Type,
        body: Box<Term>,
    },
    Case {
        scrutinee: Box<Term>,
        ty: Type,
        clauses: Vec<Clause>,
    },
    Lit {
        lit: Literal,
    },
    /// Method projection out of a dictionary (elaborated programs only).
    Method {
        dict: InstancePath,
        class: Name,
        method: Name,
        ty: Type,
    },
    /// Dictionary record value (elaborated programs only). Method fields are
    /// suspended: they are evaluated when the method is projected and called.
    DictLit {
        class: Name,
        ty: Type,
        supers: Vec<InstancePath>,
        methods: Vec<Term>,
    },
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var { name: name.into() }
    }

    pub fn reference(name: impl Into<Name>, type_args: Vec<Type>) -> Term {
        Term::Ref {
            name: name.into(),
            type_args,
            dicts: Vec::new(),
        }
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App {
            fun: Box::new(fun),
            arg: Box::new(arg),
        }
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn abs(binder: impl Into<Name>, ty: Type, body: Term) -> Term {
        Term::Abs {
            binder: binder.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn case(scrutinee: Term, ty: Type, clauses: Vec<(Pattern, Term)>) -> Term {
        Term::Case {
            scrutinee: Box::new(scrutinee),
            ty,
            clauses: clauses
                .into_iter()
                .map(|(pattern, body)| Clause { pattern, body })
                .collect(),
        }
    }

    pub fn int(value: impl Into<BigInt>) -> Term {
        Term::Lit {
            lit: Literal::Int(value.into()),
        }
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App { fun, arg } = cur {
            args.push(&**arg);
            cur = fun;
        }
        args.reverse();
        (cur, args)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn mentions_free(&self, name: &str) -> bool {
        self.free_vars().contains(name)
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var { name } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            Term::Ref { dicts, .. } => dicts.iter().for_each(|d| d.collect_free(bound, out)),
            Term::App { fun, arg } => {
                fun.collect_free(bound, out);
                arg.collect_free(bound, out);
            }
            Term::Abs { binder, body, .. } => {
                bound.push(binder.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::Case {
                scrutinee, clauses, ..
            } => {
                scrutinee.collect_free(bound, out);
                for clause in clauses {
                    let vars = clause.pattern.vars();
                    let n = vars.len();
                    bound.extend(vars.into_iter().cloned());
                    clause.body.collect_free(bound, out);
                    bound.truncate(bound.len() - n);
                }
            }
            Term::Lit { .. } => {}
            Term::Method { dict, .. } => dict.collect_free(bound, out),
            Term::DictLit {
                supers, methods, ..
            } => {
                supers.iter().for_each(|d| d.collect_free(bound, out));
                methods.iter().for_each(|m| m.collect_free(bound, out));
            }
        }
    }

    /// Number of AST nodes; used to bound generated test programs.
    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Ref { .. } | Term::Lit { .. } | Term::Method { .. } => 1,
            Term::App { fun, arg } => 1 + fun.size() + arg.size(),
            Term::Abs { body, .. } => 1 + body.size(),
            Term::Case {
                scrutinee, clauses, ..
            } => 1 + scrutinee.size() + clauses.iter().map(|c| c.body.size()).sum::<usize>(),
            Term::DictLit { methods, .. } => 1 + methods.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl InstancePath {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match &self.root {
            DictRoot::Param { name } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            DictRoot::Instance { args, .. } => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub params: Vec<Pattern>,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtorDecl {
    pub name: Name,
    pub fields: Vec<Type>,
}

/// Field layout of a dictionary record. `call_arity` is set for method
/// fields, which hold uncurried functions of that many parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordField {
    pub label: Name,
    pub call_arity: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataDecl {
    pub name: Name,
    pub ty_params: Vec<Name>,
    pub ctors: Vec<CtorDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<Vec<RecordField>>,
}

/// An explicit dictionary parameter introduced by elaboration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictParam {
    pub name: Name,
    pub class: Name,
    pub var: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunDecl {
    pub name: Name,
    pub ty_params: Vec<TyParam>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dict_params: Vec<DictParam>,
    pub signature: Type,
    pub equations: Vec<Equation>,
}

impl FunDecl {
    pub fn arity(&self) -> usize {
        self.equations.first().map_or(0, |eq| eq.params.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSig {
    pub name: Name,
    pub signature: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub name: Name,
    pub ty_param: Name,
    pub superclasses: Vec<Name>,
    pub methods: Vec<MethodSig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDef {
    pub name: Name,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDecl {
    pub class: Name,
    pub tycon: Name,
    pub ty_params: Vec<TyParam>,
    pub methods: Vec<MethodDef>,
}

impl InstanceDecl {
    /// The instance head type, e.g. `'a list`.
    pub fn head(&self) -> Type {
        Type::con(
            self.tycon.clone(),
            self.ty_params
                .iter()
                .map(|p| Type::var(p.name.clone()))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstDecl {
    pub name: Name,
    pub signature: Type,
    pub rhs: Term,
}

impl ConstDecl {
    pub fn ty_params(&self) -> Vec<Name> {
        self.signature.free_vars()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Declaration {
    Data(DataDecl),
    Fun(FunDecl),
    Class(ClassDecl),
    Instance(InstanceDecl),
    Const(ConstDecl),
}

impl Declaration {
    /// Display name used in diagnostics.
    pub fn name(&self) -> String {
        match self {
            Declaration::Data(d) => d.name.clone(),
            Declaration::Fun(f) => f.name.clone(),
            Declaration::Class(c) => c.name.clone(),
            Declaration::Instance(i) => format!("{}::{}", i.tycon, i.class),
            Declaration::Const(c) => c.name.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub decls: Vec<Declaration>,
}

impl Program {
    pub fn new(decls: Vec<Declaration>) -> Self {
        Program { decls }
    }

    pub fn index(&self) -> ProgramIndex<'_> {
        ProgramIndex::new(self)
    }

    pub fn has_classes(&self) -> bool {
        self.decls
            .iter()
            .any(|d| matches!(d, Declaration::Class(_) | Declaration::Instance(_)))
    }

    pub fn fun(&self, name: &str) -> Option<&FunDecl> {
        self.decls.iter().find_map(|d| match d {
            Declaration::Fun(f) if f.name == name => Some(f),
            _ => None,
        })
    }

    pub fn data(&self, name: &str) -> Option<&DataDecl> {
        self.decls.iter().find_map(|d| match d {
            Declaration::Data(data) if data.name == name => Some(data),
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IR serialization cannot fail")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Program> {
        serde_json::from_str(text)
    }
}
