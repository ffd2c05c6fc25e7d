//! Translation of class-free programs into the functional Go fragment.
//!
//! Datatypes become an empty interface plus one struct and one destructor
//! per constructor (a single struct for one-constructor types), functions
//! become generic Go functions whose equations are lowered into nested type
//! assertions, and dictionaries become structs of uncurried functions.

pub mod adapt;
mod body;
pub mod names;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::go_ast::{FuncDecl, GValue, GoDecl, GoExpr, GoProgram, GoType, Stmt, TypeBody, TypeDecl};
use crate::ir::builtins::{ANY, FALSE, TRUE};
use crate::ir::{ConstDecl, DataDecl, Declaration, FunDecl, Name, Program, ProgramIndex, Type};
use crate::oracle::OValue;

pub use adapt::{AdaptationTable, ConstRule, TypeRule};
pub use body::{classify_application, Saturation, SaturationReport};
pub use names::is_keyword;

use adapt::Active;
use body::FnCx;
use names::{dest_name, exported, field_name, local, GlobalNames};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CodegenError {
    #[error("adaptation error: {0}")]
    Adaptation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("ill-typed input: {0}")]
    Type(String),
}

/// How IR names map to Go names; also written out as the build manifest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameMap {
    /// Datatypes and dictionary records to their Go type.
    pub types: BTreeMap<Name, Name>,
    /// Constructors to the struct that represents them.
    pub ctors: BTreeMap<Name, Name>,
    pub destructors: BTreeMap<Name, Name>,
    /// Functions and constants.
    pub values: BTreeMap<Name, Name>,
    /// Go structs back to constructors.
    pub structs: BTreeMap<Name, Name>,
}

fn is_multi(d: &DataDecl) -> bool {
    d.ctors.len() > 1 && d.record.is_none()
}

pub struct Codegen<'a> {
    program: &'a Program,
    index: ProgramIndex<'a>,
    active: Active,
    names: NameMap,
    globals: HashSet<Name>,
    imports: RefCell<BTreeSet<String>>,
}

impl<'a> Codegen<'a> {
    pub fn new(p: &'a Program, table: &AdaptationTable) -> Result<Self, CodegenError> {
        if p.has_classes() {
            return Err(CodegenError::Unsupported(
                "classes and instances must be elaborated into dictionaries first".into(),
            ));
        }
        let active = Active::new(table, p)?;
        let mut g = GlobalNames::default();
        let mut names = NameMap::default();
        for d in &p.decls {
            match d {
                Declaration::Data(data) => {
                    if active.types.contains_key(&data.name) {
                        continue;
                    }
                    let ty = g.claim(exported(&data.name));
                    names.types.insert(data.name.clone(), ty.clone());
                    for c in &data.ctors {
                        let s = if is_multi(data) {
                            g.claim(exported(&c.name))
                        } else {
                            ty.clone()
                        };
                        names.ctors.insert(c.name.clone(), s.clone());
                        names.structs.insert(s.clone(), c.name.clone());
                        if !c.fields.is_empty() && data.record.is_none() {
                            let dest = g.claim(dest_name(&exported(&c.name)));
                            names.destructors.insert(c.name.clone(), dest);
                        }
                    }
                }
                Declaration::Fun(FunDecl { name, .. }) | Declaration::Const(ConstDecl { name, .. }) => {
                    let go = g.claim(exported(name));
                    names.values.insert(name.clone(), go);
                }
                Declaration::Class(_) | Declaration::Instance(_) => unreachable!("checked above"),
            }
        }
        Ok(Codegen {
            program: p,
            index: p.index(),
            active,
            names,
            globals: g.taken().clone(),
            imports: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn names(&self) -> &NameMap {
        &self.names
    }

    fn use_imports(&self, imports: &[String]) {
        self.imports.borrow_mut().extend(imports.iter().cloned());
    }

    pub(crate) fn go_name(&self, ir: &str) -> Result<&Name, CodegenError> {
        self.names
            .values
            .get(ir)
            .ok_or_else(|| CodegenError::Type(format!("no Go name for `{ir}`")))
    }

    /// Translates an IR type; `tparams` maps type variables to Go type
    /// parameter names.
    pub(crate) fn go_type(&self, t: &Type, tparams: &[(Name, Name)]) -> Result<GoType, CodegenError> {
        Ok(match t {
            Type::Var(v) => GoType::Param(
                tparams
                    .iter()
                    .find(|(ir, _)| ir == v)
                    .map(|(_, go)| go.clone())
                    .unwrap_or_else(|| local(v)),
            ),
            Type::Fun(a, r) => GoType::Func(
                vec![self.go_type(a, tparams)?],
                vec![self.go_type(r, tparams)?],
            ),
            Type::Con(name, args) => {
                if let Some(rule) = self.active.types.get(name) {
                    self.use_imports(&rule.imports);
                    return Ok(GoType::Opaque(rule.go.clone()));
                }
                if name == ANY {
                    return Ok(GoType::Any);
                }
                let Some(data) = self.index.data(name) else {
                    return Err(CodegenError::Type(format!(
                        "type `{name}` has no Go representation"
                    )));
                };
                let args = args
                    .iter()
                    .map(|a| self.go_type(a, tparams))
                    .collect::<Result<Vec<_>, _>>()?;
                let go = self.names.types[&data.name].clone();
                if is_multi(data) {
                    GoType::Iface(go, args)
                } else {
                    GoType::Struct(go, args)
                }
            }
        })
    }

    fn data_decls(&self, d: &DataDecl) -> Result<Vec<GoDecl>, CodegenError> {
        if self.active.types.contains_key(&d.name) {
            return Ok(Vec::new());
        }
        let tparams = type_params(&d.ty_params, &self.globals);
        let params: Vec<Name> = tparams.iter().map(|(_, go)| go.clone()).collect();
        let param_tys: Vec<GoType> = params.iter().cloned().map(GoType::Param).collect();
        let mut out = Vec::new();
        if let Some(record) = &d.record {
            let ctor = &d.ctors[0];
            let mut fields = Vec::new();
            for (f, ty) in record.iter().zip(&ctor.fields) {
                let gty = match f.call_arity {
                    Some(k) => {
                        let (args, res) = ty.split_arrows(k).ok_or_else(|| {
                            CodegenError::Type(format!("method `{}` has fewer than {k} arguments", f.label))
                        })?;
                        GoType::Func(
                            args.iter()
                                .map(|a| self.go_type(a, &tparams))
                                .collect::<Result<_, _>>()?,
                            vec![self.go_type(&res, &tparams)?],
                        )
                    }
                    None => self.go_type(ty, &tparams)?,
                };
                fields.push((exported(&f.label), gty));
            }
            out.push(GoDecl::Type(TypeDecl {
                name: self.names.types[&d.name].clone(),
                params,
                body: TypeBody::Struct(fields),
            }));
            return Ok(out);
        }
        if is_multi(d) {
            out.push(GoDecl::Type(TypeDecl {
                name: self.names.types[&d.name].clone(),
                params: params.clone(),
                body: TypeBody::Interface,
            }));
        }
        for c in &d.ctors {
            let s = self.names.ctors[&c.name].clone();
            let ftys = c
                .fields
                .iter()
                .map(|f| self.go_type(f, &tparams))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(GoDecl::Type(TypeDecl {
                name: s.clone(),
                params: params.clone(),
                body: TypeBody::Struct(
                    ftys.iter()
                        .enumerate()
                        .map(|(i, t)| (field_name(i), t.clone()))
                        .collect(),
                ),
            }));
            if let Some(dest) = self.names.destructors.get(&c.name) {
                let p = GoExpr::var("p");
                out.push(GoDecl::Func(FuncDecl {
                    name: dest.clone(),
                    type_params: params.clone(),
                    params: vec![("p".into(), GoType::Struct(s, param_tys.clone()))],
                    results: ftys.clone(),
                    body: Stmt::Return(
                        (0..ftys.len())
                            .map(|i| GoExpr::field(p.clone(), field_name(i)))
                            .collect(),
                    ),
                    destructor: true,
                }));
            }
        }
        Ok(out)
    }

    fn fun_decl(&self, f: &FunDecl) -> Result<FuncDecl, CodegenError> {
        let ty_params: Vec<Name> = f.ty_params.iter().map(|p| p.name.clone()).collect();
        let tparams = type_params(&ty_params, &self.globals);
        let mut cx = FnCx::new(self, tparams.clone());
        let (params, results, body) = cx.function(f)?;
        Ok(FuncDecl {
            name: self.go_name(&f.name)?.clone(),
            type_params: tparams.into_iter().map(|(_, go)| go).collect(),
            params,
            results,
            body,
            destructor: false,
        })
    }

    fn const_decl(&self, c: &ConstDecl) -> Result<FuncDecl, CodegenError> {
        let tparams = type_params(&c.ty_params(), &self.globals);
        let mut cx = FnCx::new(self, tparams.clone());
        let result = cx.ty(&c.signature)?;
        let body = cx.stmt(&c.rhs)?;
        Ok(FuncDecl {
            name: self.go_name(&c.name)?.clone(),
            type_params: tparams.into_iter().map(|(_, go)| go).collect(),
            params: Vec::new(),
            results: vec![result],
            body,
            destructor: false,
        })
    }

    /// The whole Go package.
    pub fn program(&self, package: &str) -> Result<GoProgram, CodegenError> {
        let mut decls = Vec::new();
        for d in &self.program.decls {
            match d {
                Declaration::Data(data) => decls.extend(self.data_decls(data)?),
                Declaration::Fun(f) => decls.push(GoDecl::Func(self.fun_decl(f)?)),
                Declaration::Const(c) => decls.push(GoDecl::Func(self.const_decl(c)?)),
                Declaration::Class(_) | Declaration::Instance(_) => {}
            }
        }
        Ok(GoProgram {
            package: package.into(),
            imports: self.imports.borrow().iter().cloned().collect(),
            decls,
        })
    }

    /// Go expression for a closed term. Variables carrying the `nil` marker
    /// become Go `nil`.
    pub fn entry_expr(&self, t: &crate::ir::Term) -> Result<GoExpr, CodegenError> {
        FnCx::new(self, Vec::new()).expr(t)
    }

    /// Statement form of a closed term together with its Go type.
    pub fn stmt_of(&self, t: &crate::ir::Term) -> Result<(Stmt, GoType), CodegenError> {
        let mut cx = FnCx::new(self, Vec::new());
        let ty = cx.type_of(t)?;
        let ty = cx.ty(&ty)?;
        Ok((cx.stmt(t)?, ty))
    }

    /// Maps a Go result back to a source value; `None` for functions.
    pub fn erase(&self, v: &GValue) -> Option<OValue> {
        erase(&self.names, v)
    }
}

/// Go type parameter names for IR type variables.
fn type_params(vars: &[Name], globals: &HashSet<Name>) -> Vec<(Name, Name)> {
    let mut out: Vec<(Name, Name)> = Vec::new();
    for v in vars {
        let mut go = local(v);
        while globals.contains(&go) || out.iter().any(|(_, g)| *g == go) {
            go.push('_');
        }
        out.push((v.clone(), go));
    }
    out
}

/// See [`Codegen::erase`].
pub fn erase(names: &NameMap, v: &GValue) -> Option<OValue> {
    Some(match v {
        GValue::Iface { inner, .. } => return erase(names, inner),
        GValue::Struct {
            ty: GoType::Struct(s, _),
            fields,
        } => OValue::con(
            names.structs.get(s)?.clone(),
            fields
                .iter()
                .map(|f| erase(names, f))
                .collect::<Option<Vec<_>>>()?,
        ),
        GValue::Bool(b) => OValue::con(if *b { TRUE } else { FALSE }, Vec::new()),
        GValue::Int(n) => OValue::Int(n.clone()),
        GValue::Str(s) => OValue::Str(s.clone()),
        GValue::Nil => OValue::Absent,
        _ => return None,
    })
}

/// Result of compiling a program.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub program: GoProgram,
    pub names: NameMap,
}

/// Translates an elaborated, class-free program.
pub fn compile(p: &Program, table: &AdaptationTable, package: &str) -> Result<Compiled, CodegenError> {
    let cg = Codegen::new(p, table)?;
    Ok(Compiled {
        program: cg.program(package)?,
        names: cg.names,
    })
}
