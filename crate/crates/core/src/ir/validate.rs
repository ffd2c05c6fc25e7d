use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{
    builtins, ClassDecl, DataDecl, Declaration, DictRoot, Entity, Equation, InstanceDecl,
    InstancePath, Name, Pattern, Program, ProgramIndex, Term, Type,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticKind {
    DuplicateName,
    UnknownType,
    TypeArity,
    UnboundTypeVar,
    UnknownName,
    UnboundVariable,
    UnknownClass,
    NonLinearPattern,
    CtorArityMismatch,
    EquationArityMismatch,
    ArityExceedsSignature,
    NoEquations,
    EmptyCase,
    EmptyDatatype,
    RefTypeArgs,
    BadInstance,
    MissingMethod,
    UnknownMethod,
    BadMethodSignature,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub decl: String,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.decl, self.kind, self.message)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ArityError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

/// Arity of a function (shared equation parameter count), constant (0),
/// constructor (field count), builtin, or class method (arrow count).
pub fn arity(p: &Program, name: &str) -> Result<usize, ArityError> {
    let index = p.index();
    match index.entity(name) {
        Some(Entity::Fun(f)) => Ok(f.arity()),
        Some(Entity::Const(_)) => Ok(0),
        Some(Entity::Ctor { data, index }) => Ok(data.ctors[index].fields.len()),
        Some(Entity::Builtin(b)) => Ok(builtins::const_arity(b).unwrap_or(0)),
        Some(Entity::Method { class, index }) => Ok(class.methods[index].signature.arrow_count()),
        None => Err(ArityError::UnknownName(name.to_string())),
    }
}

/// Structural well-formedness. Returns an empty list iff the program is
/// well formed. Type correctness of terms is the elaborator's business and
/// is not re-checked here.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let index = p.index();
    let mut v = Validator {
        index: &index,
        out: Vec::new(),
        decl: String::new(),
    };
    v.check_names(p);
    for decl in &p.decls {
        v.decl = decl.name();
        match decl {
            Declaration::Data(d) => v.check_data(d),
            Declaration::Fun(f) => {
                let tvars: Vec<Name> = f.ty_params.iter().map(|t| t.name.clone()).collect();
                for tp in &f.ty_params {
                    v.check_classes(&tp.classes);
                }
                v.check_type(&f.signature, &tvars);
                let mut scope: Vec<Name> = f.dict_params.iter().map(|d| d.name.clone()).collect();
                v.check_equations(&f.equations, &f.signature, &tvars, &mut scope, true);
            }
            Declaration::Const(c) => {
                let tvars = c.ty_params();
                v.check_type(&c.signature, &tvars);
                v.check_term(&c.rhs, &tvars, &mut Vec::new());
            }
            Declaration::Class(c) => v.check_class(c),
            Declaration::Instance(i) => v.check_instance(i),
        }
    }
    v.out
}

struct Validator<'a, 'p> {
    index: &'a ProgramIndex<'p>,
    out: Vec<Diagnostic>,
    decl: String,
}

impl Validator<'_, '_> {
    fn report(&mut self, kind: DiagnosticKind, message: impl Into<String>) {
        self.out.push(Diagnostic {
            decl: self.decl.clone(),
            kind,
            message: message.into(),
        });
    }

    fn check_names(&mut self, p: &Program) {
        let mut values = HashSet::new();
        let mut types = HashSet::new();
        let mut classes = HashSet::new();
        for decl in &p.decls {
            self.decl = decl.name();
            let mut value = |v: &mut Self, name: &str| {
                if !values.insert(name.to_string()) || builtins::is_builtin_const(name) {
                    v.report(
                        DiagnosticKind::DuplicateName,
                        format!("`{name}` is declared twice"),
                    );
                }
            };
            match decl {
                Declaration::Data(d) => {
                    if !types.insert(d.name.clone()) || builtins::is_builtin_type(&d.name) {
                        self.report(
                            DiagnosticKind::DuplicateName,
                            format!("type `{}` is declared twice", d.name),
                        );
                    }
                    for c in &d.ctors {
                        value(self, &c.name);
                    }
                }
                Declaration::Fun(f) => value(self, &f.name),
                Declaration::Const(c) => value(self, &c.name),
                Declaration::Class(c) => {
                    if !classes.insert(c.name.clone()) {
                        self.report(
                            DiagnosticKind::DuplicateName,
                            format!("class `{}` is declared twice", c.name),
                        );
                    }
                    for m in &c.methods {
                        value(self, &m.name);
                    }
                }
                Declaration::Instance(_) => {}
            }
        }
    }

    fn check_classes(&mut self, classes: &[Name]) {
        for c in classes {
            // After elaboration a constraint names its dictionary record.
            let record = self.index.data(c).is_some_and(|d| d.record.is_some());
            if self.index.class(c).is_none() && !record {
                self.report(DiagnosticKind::UnknownClass, format!("unknown class `{c}`"));
            }
        }
    }

    fn check_type(&mut self, ty: &Type, tvars: &[Name]) {
        match ty {
            Type::Var(v) => {
                if !tvars.contains(v) {
                    self.report(
                        DiagnosticKind::UnboundTypeVar,
                        format!("type variable '{v} is not bound"),
                    );
                }
            }
            Type::Con(name, args) => {
                match self.index.type_arity(name) {
                    None => self.report(
                        DiagnosticKind::UnknownType,
                        format!("unknown type `{name}`"),
                    ),
                    Some(n) if n != args.len() => self.report(
                        DiagnosticKind::TypeArity,
                        format!("`{name}` takes {n} type arguments, given {}", args.len()),
                    ),
                    Some(_) => {}
                }
                for a in args {
                    self.check_type(a, tvars);
                }
            }
            Type::Fun(a, r) => {
                self.check_type(a, tvars);
                self.check_type(r, tvars);
            }
        }
    }

    fn check_data(&mut self, d: &DataDecl) {
        if d.ctors.is_empty() {
            self.report(
                DiagnosticKind::EmptyDatatype,
                format!("`{}` has no constructors", d.name),
            );
        }
        let mut seen = HashSet::new();
        for p in &d.ty_params {
            if !seen.insert(p) {
                self.report(
                    DiagnosticKind::DuplicateName,
                    format!("type parameter '{p} repeated"),
                );
            }
        }
        for c in &d.ctors {
            for f in &c.fields {
                self.check_type(f, &d.ty_params);
            }
        }
        if let Some(record) = &d.record {
            if d.ctors.len() != 1 || record.len() != d.ctors[0].fields.len() {
                self.report(
                    DiagnosticKind::CtorArityMismatch,
                    "record layout does not match its constructor",
                );
            }
        }
    }

    fn check_class(&mut self, c: &ClassDecl) {
        self.check_classes(&c.superclasses);
        let tvars = vec![c.ty_param.clone()];
        for m in &c.methods {
            self.check_type(&m.signature, &tvars);
            if !m.signature.free_vars().contains(&c.ty_param) {
                self.report(
                    DiagnosticKind::BadMethodSignature,
                    format!("method `{}` does not mention the class variable", m.name),
                );
            }
        }
        for sup in &c.superclasses {
            if self.index.entails(sup, &c.name) {
                self.report(
                    DiagnosticKind::UnknownClass,
                    format!("cyclic superclass `{sup}`"),
                );
            }
        }
    }

    fn check_instance(&mut self, inst: &InstanceDecl) {
        let Some(class) = self.index.class(&inst.class) else {
            self.report(
                DiagnosticKind::UnknownClass,
                format!("unknown class `{}`", inst.class),
            );
            return;
        };
        let tvars: Vec<Name> = inst.ty_params.iter().map(|p| p.name.clone()).collect();
        match self.index.data(&inst.tycon) {
            Some(d) if d.ty_params.len() == tvars.len() => {}
            Some(d) => self.report(
                DiagnosticKind::BadInstance,
                format!("`{}` takes {} type parameters", d.name, d.ty_params.len()),
            ),
            None if builtins::is_builtin_type(&inst.tycon) && tvars.is_empty() => {}
            None => self.report(
                DiagnosticKind::UnknownType,
                format!("unknown type `{}`", inst.tycon),
            ),
        }
        let distinct: HashSet<&Name> = tvars.iter().collect();
        if distinct.len() != tvars.len() {
            self.report(
                DiagnosticKind::BadInstance,
                "instance type parameters must be distinct",
            );
        }
        for tp in &inst.ty_params {
            self.check_classes(&tp.classes);
        }
        for m in &class.methods {
            if !inst.methods.iter().any(|d| d.name == m.name) {
                self.report(
                    DiagnosticKind::MissingMethod,
                    format!("method `{}` is not defined", m.name),
                );
            }
        }
        let head = inst.head();
        for def in &inst.methods {
            let Some(sig) = class.methods.iter().find(|m| m.name == def.name) else {
                self.report(
                    DiagnosticKind::UnknownMethod,
                    format!("`{}` is not a method of `{}`", def.name, class.name),
                );
                continue;
            };
            let sig = sig
                .signature
                .subst(&[(class.ty_param.clone(), head.clone())]);
            let mut scope = Vec::new();
            self.check_equations(&def.equations, &sig, &tvars, &mut scope, false);
        }
    }

    fn check_equations(
        &mut self,
        eqs: &[Equation],
        sig: &Type,
        tvars: &[Name],
        scope: &mut Vec<Name>,
        require_nonempty: bool,
    ) {
        if eqs.is_empty() {
            if require_nonempty {
                self.report(DiagnosticKind::NoEquations, "function has no equations");
            }
            return;
        }
        let m = eqs[0].params.len();
        if sig.split_arrows(m).is_none() {
            self.report(
                DiagnosticKind::ArityExceedsSignature,
                format!("{m} parameters but the signature `{sig}` has fewer arrows"),
            );
        }
        for eq in eqs {
            if eq.params.len() != m {
                self.report(
                    DiagnosticKind::EquationArityMismatch,
                    format!("equation has {} parameters, expected {m}", eq.params.len()),
                );
            }
            let mut bound = Vec::new();
            for p in &eq.params {
                self.check_pattern(p, tvars);
                bound.extend(p.vars().into_iter().cloned());
            }
            let mut seen = HashSet::new();
            for b in &bound {
                if !seen.insert(b) {
                    self.report(
                        DiagnosticKind::NonLinearPattern,
                        format!("variable `{b}` bound twice"),
                    );
                }
            }
            let mark = scope.len();
            scope.extend(bound);
            self.check_term(&eq.rhs, tvars, scope);
            scope.truncate(mark);
        }
    }

    fn check_pattern(&mut self, p: &Pattern, tvars: &[Name]) {
        match p {
            Pattern::Var { .. } => {}
            Pattern::Con {
                ctor,
                type_args,
                args,
            } => {
                match self.index.ctor(ctor) {
                    None => self.report(
                        DiagnosticKind::UnknownName,
                        format!("unknown constructor `{ctor}`"),
                    ),
                    Some((data, decl)) => {
                        if decl.fields.len() != args.len() {
                            self.report(
                                DiagnosticKind::CtorArityMismatch,
                                format!(
                                    "`{ctor}` has {} fields, pattern gives {}",
                                    decl.fields.len(),
                                    args.len()
                                ),
                            );
                        }
                        if data.ty_params.len() != type_args.len() {
                            self.report(
                                DiagnosticKind::RefTypeArgs,
                                format!(
                                    "pattern `{ctor}` needs {} type arguments",
                                    data.ty_params.len()
                                ),
                            );
                        }
                    }
                }
                for t in type_args {
                    self.check_type(t, tvars);
                }
                for a in args {
                    self.check_pattern(a, tvars);
                }
            }
        }
    }

    fn check_path(&mut self, path: &InstancePath, scope: &[Name], tvars: &[Name]) {
        match &path.root {
            DictRoot::Param { name } => {
                if !scope.contains(name) {
                    self.report(
                        DiagnosticKind::UnboundVariable,
                        format!("dictionary `{name}` not in scope"),
                    );
                }
            }
            DictRoot::Instance {
                name,
                type_args,
                args,
            } => {
                if self.index.entity(name).is_none() {
                    self.report(
                        DiagnosticKind::UnknownName,
                        format!("unknown instance `{name}`"),
                    );
                }
                for t in type_args {
                    self.check_type(t, tvars);
                }
                for a in args {
                    self.check_path(a, scope, tvars);
                }
            }
        }
    }

    fn check_term(&mut self, t: &Term, tvars: &[Name], scope: &mut Vec<Name>) {
        match t {
            Term::Var { name } => {
                if !scope.contains(name) {
                    self.report(
                        DiagnosticKind::UnboundVariable,
                        format!("variable `{name}` is not bound"),
                    );
                }
            }
            Term::Ref {
                name,
                type_args,
                dicts,
            } => {
                match self.index.scheme(name) {
                    None => self.report(
                        DiagnosticKind::UnknownName,
                        format!("unknown name `{name}`"),
                    ),
                    Some((params, _)) if params.len() != type_args.len() => self.report(
                        DiagnosticKind::RefTypeArgs,
                        format!(
                            "`{name}` takes {} type arguments, given {}",
                            params.len(),
                            type_args.len()
                        ),
                    ),
                    Some(_) => {}
                }
                for ty in type_args {
                    self.check_type(ty, tvars);
                }
                for d in dicts {
                    self.check_path(d, scope, tvars);
                }
            }
            Term::App { fun, arg } => {
                self.check_term(fun, tvars, scope);
                self.check_term(arg, tvars, scope);
            }
            Term::Abs { binder, ty, body } => {
                self.check_type(ty, tvars);
                scope.push(binder.clone());
                self.check_term(body, tvars, scope);
                scope.pop();
            }
            Term::Case {
                scrutinee,
                ty,
                clauses,
            } => {
                self.check_type(ty, tvars);
                self.check_term(scrutinee, tvars, scope);
                if clauses.is_empty() {
                    self.report(DiagnosticKind::EmptyCase, "case expression without clauses");
                }
                for c in clauses {
                    self.check_pattern(&c.pattern, tvars);
                    let vars = c.pattern.vars();
                    let mut seen = HashSet::new();
                    for v in &vars {
                        if !seen.insert(*v) {
                            self.report(
                                DiagnosticKind::NonLinearPattern,
                                format!("variable `{v}` bound twice"),
                            );
                        }
                    }
                    let mark = scope.len();
                    scope.extend(vars.into_iter().cloned());
                    self.check_term(&c.body, tvars, scope);
                    scope.truncate(mark);
                }
            }
            Term::Lit { .. } => {}
            Term::Method { dict, ty, .. } => {
                self.check_type(ty, tvars);
                self.check_path(dict, scope, tvars);
            }
            Term::DictLit {
                ty,
                supers,
                methods,
                ..
            } => {
                self.check_type(ty, tvars);
                for s in supers {
                    self.check_path(s, scope, tvars);
                }
                for m in methods {
                    self.check_term(m, tvars, scope);
                }
            }
        }
    }
}
