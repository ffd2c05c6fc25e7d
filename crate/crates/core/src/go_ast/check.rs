//! Static well-formedness of fragment programs: name resolution, arities,
//! a small type system with identical-type assignability, Go's scoping and
//! unused-variable rules, and termination of function bodies.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{FuncDecl, GoDecl, GoExpr, GoType, Stmt, TypeBody, TypeDecl, BLANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WfKind {
    UnknownName,
    UnknownType,
    Arity,
    TypeMismatch,
    NotInterface,
    NotStruct,
    NotFunction,
    MultiValueMisuse,
    MissingReturn,
    UnusedVariable,
    NoNewVariables,
    BlankRead,
    Redeclared,
    DuplicateDecl,
    /// A construct outside the core grammar, reported only under
    /// [`Strictness::Core`].
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfDiagnostic {
    pub decl: String,
    pub kind: WfKind,
    pub message: String,
}

impl fmt::Display for WfDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.decl, self.kind, self.message)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Accepts `==`, `&&`, `panic`, blank names, blocks and function types.
    #[default]
    Extended,
    /// Additionally reports each use of those extensions.
    Core,
}

pub fn check_wf(decls: &[GoDecl]) -> Vec<WfDiagnostic> {
    check_wf_with(decls, Strictness::Extended)
}

pub fn check_wf_with(decls: &[GoDecl], strictness: Strictness) -> Vec<WfDiagnostic> {
    let mut types = HashMap::new();
    let mut funcs = HashMap::new();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for d in decls {
        if !seen.insert(d.name().to_string()) {
            out.push(WfDiagnostic {
                decl: d.name().to_string(),
                kind: WfKind::DuplicateDecl,
                message: format!("`{}` declared twice", d.name()),
            });
            continue;
        }
        match d {
            GoDecl::Type(t) => {
                types.insert(t.name.as_str(), t);
            }
            GoDecl::Func(f) => {
                funcs.insert(f.name.as_str(), f);
            }
        }
    }
    let globals = Globals { types, funcs };
    for d in decls {
        let mut cx = Checker {
            g: &globals,
            strictness,
            decl: d.name().to_string(),
            type_params: Vec::new(),
            scopes: Vec::new(),
            out: Vec::new(),
        };
        match d {
            GoDecl::Type(t) => cx.type_decl(t),
            GoDecl::Func(f) => cx.func_decl(f),
        }
        out.extend(cx.out);
    }
    out
}

struct Globals<'a> {
    types: HashMap<&'a str, &'a TypeDecl>,
    funcs: HashMap<&'a str, &'a FuncDecl>,
}

struct Local {
    name: String,
    ty: GoType,
    used: bool,
    param: bool,
}

struct Checker<'a> {
    g: &'a Globals<'a>,
    strictness: Strictness,
    decl: String,
    type_params: Vec<String>,
    scopes: Vec<Vec<Local>>,
    out: Vec<WfDiagnostic>,
}

/// Type of the untyped `nil` literal; never appears in declarations.
fn nil_type() -> GoType {
    GoType::Opaque("untyped nil".into())
}

fn is_nil(t: &GoType) -> bool {
    *t == nil_type()
}

/// Type of an erroneous expression; compatible with everything so that one
/// mistake is reported once.
fn invalid() -> GoType {
    GoType::Opaque("invalid type".into())
}

fn show(t: &GoType) -> String {
    super::render::go_type(t)
}

/// `nil` is assignable to interfaces, functions and pointers.
fn nilable(t: &GoType) -> bool {
    match t {
        GoType::Iface(..) | GoType::Any | GoType::Func(..) => true,
        GoType::Opaque(s) => s.starts_with('*'),
        _ => false,
    }
}

fn assignable(value: &GoType, target: &GoType) -> bool {
    value == target
        || *value == invalid()
        || *target == invalid()
        || (is_nil(value) && nilable(target))
}

impl Checker<'_> {
    fn report(&mut self, kind: WfKind, message: impl Into<String>) {
        self.out.push(WfDiagnostic {
            decl: self.decl.clone(),
            kind,
            message: message.into(),
        });
    }

    fn extension(&mut self, what: &str) {
        if self.strictness == Strictness::Core {
            self.report(
                WfKind::Extension,
                format!("{what} is an extension of the core fragment"),
            );
        }
    }

    fn type_decl(&mut self, t: &TypeDecl) {
        self.type_params = t.params.clone();
        self.check_type_params(&t.params);
        if let TypeBody::Struct(fields) = &t.body {
            let mut names = HashSet::new();
            for (name, ty) in fields {
                if !names.insert(name) {
                    self.report(
                        WfKind::DuplicateDecl,
                        format!("field `{name}` declared twice"),
                    );
                }
                self.check_type(ty);
            }
        }
    }

    fn check_type_params(&mut self, params: &[String]) {
        let mut seen = HashSet::new();
        for p in params {
            if !seen.insert(p) {
                self.report(
                    WfKind::Redeclared,
                    format!("type parameter `{p}` declared twice"),
                );
            }
        }
    }

    fn check_type(&mut self, t: &GoType) {
        match t {
            GoType::Param(p) => {
                if !self.type_params.contains(p) {
                    self.report(WfKind::UnknownType, format!("unknown type parameter `{p}`"));
                }
            }
            GoType::Struct(n, args) | GoType::Iface(n, args) => {
                let want_struct = matches!(t, GoType::Struct(..));
                match self.g.types.get(n.as_str()) {
                    None => self.report(WfKind::UnknownType, format!("unknown type `{n}`")),
                    Some(d) => {
                        let is_struct = matches!(d.body, TypeBody::Struct(_));
                        if is_struct != want_struct {
                            let kind = if want_struct {
                                WfKind::NotStruct
                            } else {
                                WfKind::NotInterface
                            };
                            self.report(kind, format!("`{n}` used with the wrong kind"));
                        }
                        if d.params.len() != args.len() {
                            self.report(
                                WfKind::Arity,
                                format!(
                                    "`{n}` takes {} type arguments, got {}",
                                    d.params.len(),
                                    args.len()
                                ),
                            );
                        }
                    }
                }
                for a in args {
                    self.check_type(a);
                }
            }
            GoType::Func(ps, rs) => {
                self.extension("a function type");
                for a in ps.iter().chain(rs) {
                    self.check_type(a);
                }
            }
            GoType::Any => {}
            GoType::Opaque(s) => {
                if s.trim().is_empty() || is_nil(t) {
                    self.report(WfKind::UnknownType, "empty host type");
                }
            }
        }
    }

    fn func_decl(&mut self, f: &FuncDecl) {
        self.type_params = f.type_params.clone();
        self.check_type_params(&f.type_params);
        for t in f.params.iter().map(|(_, t)| t).chain(&f.results) {
            self.check_type(t);
        }
        self.scopes.push(Vec::new());
        self.bind_params(&f.params);
        self.stmt(&f.body, &f.results);
        self.pop_scope();
        if !f.body.terminates() {
            self.report(
                WfKind::MissingReturn,
                format!("`{}` may fall off its end", f.name),
            );
        }
    }

    fn bind_params(&mut self, params: &[(String, GoType)]) {
        let mut seen = HashSet::new();
        for (name, ty) in params {
            if name == BLANK {
                self.extension("a blank parameter");
                continue;
            }
            if !seen.insert(name) {
                self.report(
                    WfKind::Redeclared,
                    format!("parameter `{name}` declared twice"),
                );
            }
            self.check_not_type_param(name);
            self.scopes.last_mut().expect("scope").push(Local {
                name: name.clone(),
                ty: ty.clone(),
                used: false,
                param: true,
            });
        }
    }

    fn check_not_type_param(&mut self, name: &str) {
        if self.type_params.iter().any(|p| p == name) {
            self.report(
                WfKind::Redeclared,
                format!("`{name}` shadows a type parameter"),
            );
        }
    }

    fn pop_scope(&mut self) {
        let scope = self.scopes.pop().expect("scope");
        for l in scope {
            if !l.used && !l.param {
                self.report(
                    WfKind::UnusedVariable,
                    format!("`{}` declared and not used", l.name),
                );
            }
        }
    }

    fn lookup(&mut self, name: &str) -> Option<GoType> {
        for scope in self.scopes.iter_mut().rev() {
            if let Some(l) = scope.iter_mut().rev().find(|l| l.name == name) {
                l.used = true;
                return Some(l.ty.clone());
            }
        }
        None
    }

    fn is_local(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.iter().any(|l| l.name == name))
    }

    /// Binds the names of a `:=` in the innermost scope.
    fn define(&mut self, names: &[String], types: &[GoType], what: &str) {
        let blanks = names.iter().filter(|n| *n == BLANK).count();
        if blanks > 0 {
            self.extension("a blank identifier");
        }
        let mut fresh = 0;
        for (name, ty) in names.iter().zip(types) {
            if name == BLANK {
                continue;
            }
            let scope = self.scopes.last().expect("scope");
            if scope.iter().any(|l| &l.name == name) {
                self.report(WfKind::Redeclared, format!("`{name}` redeclared in {what}"));
                continue;
            }
            if is_nil(ty) {
                self.report(
                    WfKind::TypeMismatch,
                    format!("use of untyped nil for `{name}`"),
                );
            }
            self.check_not_type_param(name);
            fresh += 1;
            self.scopes.last_mut().expect("scope").push(Local {
                name: name.clone(),
                ty: ty.clone(),
                used: false,
                param: false,
            });
        }
        if fresh == 0 && blanks < names.len() {
            self.report(
                WfKind::NoNewVariables,
                format!("no new variables in {what}"),
            );
        }
    }

    fn stmt(&mut self, s: &Stmt, results: &[GoType]) {
        match s {
            Stmt::Return(es) => {
                let got = match es.as_slice() {
                    [single] => self.expr_multi(single),
                    _ => es.iter().map(|e| self.expr(e)).collect(),
                };
                if got.len() != results.len() {
                    self.report(
                        WfKind::Arity,
                        format!("returning {} values, want {}", got.len(), results.len()),
                    );
                } else {
                    for (g, r) in got.iter().zip(results) {
                        if !assignable(g, r) {
                            self.report(
                                WfKind::TypeMismatch,
                                format!("cannot return {} as {}", show(g), show(r)),
                            );
                        }
                    }
                }
            }
            Stmt::Define { names, value, rest } => {
                let got = self.expr_multi(value);
                if got.len() != names.len() {
                    let kind = if got.len() > 1 {
                        WfKind::MultiValueMisuse
                    } else {
                        WfKind::Arity
                    };
                    self.report(
                        kind,
                        format!(
                            "assignment mismatch: {} names, {} values",
                            names.len(),
                            got.len()
                        ),
                    );
                    let filler = vec![invalid(); names.len()];
                    self.define(names, &filler, "definition");
                } else if names.iter().all(|n| n == BLANK) {
                    self.extension("a blank identifier");
                } else {
                    self.define(names, &got, "definition");
                }
                self.stmt(rest, results);
            }
            Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest,
            } => {
                let t = self.expr(target);
                if !t.is_interface() {
                    self.report(
                        WfKind::NotInterface,
                        format!("type assertion on non-interface type {}", show(&t)),
                    );
                }
                self.check_type(ty);
                self.define(
                    &[value.clone(), ok.clone()],
                    &[ty.clone(), GoType::bool()],
                    "type assertion",
                );
                self.stmt(rest, results);
            }
            Stmt::If { cond, then, rest } => {
                let t = self.expr(cond);
                if t != GoType::bool() {
                    self.report(
                        WfKind::TypeMismatch,
                        format!("non-boolean condition of type {}", show(&t)),
                    );
                }
                self.scopes.push(Vec::new());
                self.stmt(then, results);
                self.pop_scope();
                self.stmt(rest, results);
            }
            Stmt::Block { inner, rest } => {
                self.extension("a block statement");
                self.scopes.push(Vec::new());
                self.stmt(inner, results);
                self.pop_scope();
                self.stmt(rest, results);
            }
            Stmt::Panic(_) => self.extension("panic"),
            Stmt::Done => {}
        }
    }

    /// Single-valued expression.
    fn expr(&mut self, e: &GoExpr) -> GoType {
        let ts = self.expr_multi(e);
        match ts.len() {
            1 => ts.into_iter().next().expect("one"),
            0 => {
                self.report(WfKind::MultiValueMisuse, "expression has no value");
                invalid()
            }
            n => {
                self.report(
                    WfKind::MultiValueMisuse,
                    format!("{n}-valued call used as a single value"),
                );
                invalid()
            }
        }
    }

    fn args(&mut self, args: &[GoExpr], params: &[GoType], callee: &str) {
        if args.len() != params.len() {
            self.report(
                WfKind::Arity,
                format!(
                    "`{callee}` takes {} arguments, got {}",
                    params.len(),
                    args.len()
                ),
            );
            for a in args {
                self.expr(a);
            }
            return;
        }
        for (a, p) in args.iter().zip(params) {
            let t = self.expr(a);
            if !assignable(&t, p) {
                self.report(
                    WfKind::TypeMismatch,
                    format!(
                        "argument of type {} passed to `{callee}` as {}",
                        show(&t),
                        show(p)
                    ),
                );
            }
        }
    }

    fn expr_multi(&mut self, e: &GoExpr) -> Vec<GoType> {
        match e {
            GoExpr::Var(n) => {
                if n == BLANK {
                    self.report(WfKind::BlankRead, "cannot use _ as a value");
                    return vec![invalid()];
                }
                match self.lookup(n) {
                    Some(t) => vec![t],
                    None => {
                        self.report(WfKind::UnknownName, format!("undefined: {n}"));
                        vec![invalid()]
                    }
                }
            }
            GoExpr::Call {
                func,
                type_args,
                args,
            } => self.call(func, type_args, args),
            GoExpr::StructLit { ty, fields } => {
                self.check_type(ty);
                let GoType::Struct(n, targs) = ty else {
                    self.report(
                        WfKind::NotStruct,
                        format!("composite literal of type {}", show(ty)),
                    );
                    fields.iter().for_each(|f| {
                        self.expr(f);
                    });
                    return vec![ty.clone()];
                };
                match self.g.types.get(n.as_str()).map(|d| (&d.params, &d.body)) {
                    Some((params, TypeBody::Struct(decl_fields)))
                        if params.len() == targs.len() =>
                    {
                        let map: Vec<_> =
                            params.iter().cloned().zip(targs.iter().cloned()).collect();
                        let want: Vec<GoType> =
                            decl_fields.iter().map(|(_, t)| t.subst(&map)).collect();
                        self.args(fields, &want, n);
                    }
                    _ => fields.iter().for_each(|f| {
                        self.expr(f);
                    }),
                }
                vec![ty.clone()]
            }
            GoExpr::FuncLit {
                params,
                results,
                body,
            } => {
                for t in params.iter().map(|(_, t)| t).chain(results) {
                    self.check_type(t);
                }
                self.scopes.push(Vec::new());
                self.bind_params(params);
                self.stmt(body, results);
                self.pop_scope();
                if !body.terminates() {
                    self.report(
                        WfKind::MissingReturn,
                        "function literal may fall off its end",
                    );
                }
                vec![GoType::Func(
                    params.iter().map(|(_, t)| t.clone()).collect(),
                    results.clone(),
                )]
            }
            GoExpr::Field { target, field } => {
                let t = self.expr(target);
                let GoType::Struct(n, targs) = &t else {
                    self.report(
                        WfKind::NotStruct,
                        format!("field selection on {}", show(&t)),
                    );
                    return vec![invalid()];
                };
                let found = match self.g.types.get(n.as_str()) {
                    Some(TypeDecl {
                        params,
                        body: TypeBody::Struct(fields),
                        ..
                    }) if params.len() == targs.len() => {
                        let map: Vec<_> =
                            params.iter().cloned().zip(targs.iter().cloned()).collect();
                        fields
                            .iter()
                            .find(|(f, _)| f == field)
                            .map(|(_, ft)| ft.subst(&map))
                    }
                    _ => None,
                };
                match found {
                    Some(ft) => vec![ft],
                    None => {
                        self.report(
                            WfKind::UnknownName,
                            format!("{} has no field `{field}`", show(&t)),
                        );
                        vec![invalid()]
                    }
                }
            }
            GoExpr::Conv { ty, inner } => {
                self.check_type(ty);
                if !ty.is_interface() {
                    self.report(
                        WfKind::NotInterface,
                        format!("conversion to non-interface {}", show(ty)),
                    );
                }
                let t = self.expr(inner);
                if is_nil(&t) {
                    self.report(WfKind::TypeMismatch, "conversion of untyped nil");
                }
                vec![ty.clone()]
            }
            GoExpr::Nil => vec![nil_type()],
            GoExpr::CallExpr { target, args } => {
                let t = self.expr(target);
                match t {
                    GoType::Func(ps, rs) => {
                        self.args(args, &ps, "function value");
                        rs
                    }
                    other => {
                        self.report(
                            WfKind::NotFunction,
                            format!("call of non-function {}", show(&other)),
                        );
                        args.iter().for_each(|a| {
                            self.expr(a);
                        });
                        vec![invalid()]
                    }
                }
            }
            GoExpr::Eq(a, b) => {
                self.extension("==");
                let ta = self.expr(a);
                let tb = self.expr(b);
                let ok = if is_nil(&ta) || is_nil(&tb) {
                    nilable(&ta) || nilable(&tb)
                } else {
                    ta == tb && !matches!(ta, GoType::Func(..))
                };
                if !ok {
                    self.report(
                        WfKind::TypeMismatch,
                        format!("cannot compare {} with {}", show(&ta), show(&tb)),
                    );
                }
                vec![GoType::bool()]
            }
            GoExpr::And(a, b) => {
                self.extension("&&");
                for x in [a, b] {
                    let t = self.expr(x);
                    if t != GoType::bool() {
                        self.report(
                            WfKind::TypeMismatch,
                            format!("&& operand of type {}", show(&t)),
                        );
                    }
                }
                vec![GoType::bool()]
            }
            GoExpr::Prim(p) => {
                if p.args.len() != p.arg_types.len() {
                    self.report(
                        WfKind::Arity,
                        format!("template `{}` arity mismatch", p.template),
                    );
                }
                self.args(&p.args, &p.arg_types.clone(), &p.template);
                vec![p.result.clone()]
            }
        }
    }

    fn call(&mut self, func: &str, type_args: &[GoType], args: &[GoExpr]) -> Vec<GoType> {
        if self.is_local(func) {
            self.report(
                WfKind::UnknownName,
                format!("`{func}` is shadowed by a local"),
            );
        }
        let Some(f) = self.g.funcs.get(func).copied() else {
            self.report(WfKind::UnknownName, format!("undefined function {func}"));
            args.iter().for_each(|a| {
                self.expr(a);
            });
            return vec![invalid()];
        };
        for t in type_args {
            self.check_type(t);
        }
        let params: Vec<GoType> = f.params.iter().map(|(_, t)| t.clone()).collect();
        let map: Vec<(String, GoType)> = if !type_args.is_empty() || f.type_params.is_empty() {
            if type_args.len() != f.type_params.len() {
                self.report(
                    WfKind::Arity,
                    format!(
                        "`{func}` takes {} type arguments, got {}",
                        f.type_params.len(),
                        type_args.len()
                    ),
                );
            }
            f.type_params
                .iter()
                .cloned()
                .zip(type_args.iter().cloned())
                .collect()
        } else {
            // Infer from the argument types, as Go does.
            if args.len() != params.len() {
                self.args(args, &params, func);
                return f.results.clone();
            }
            let mut map = Vec::new();
            let mut arg_types = Vec::new();
            for (a, p) in args.iter().zip(&params) {
                let t = self.expr(a);
                unify(p, &t, &f.type_params, &mut map);
                arg_types.push(t);
            }
            let missing: Vec<&String> = f
                .type_params
                .iter()
                .filter(|tp| !map.iter().any(|(n, _)| n == *tp))
                .collect();
            if !missing.is_empty() {
                self.report(
                    WfKind::TypeMismatch,
                    format!("cannot infer type arguments of `{func}`"),
                );
                return f.results.clone();
            }
            for (t, p) in arg_types.iter().zip(&params) {
                let want = p.subst(&map);
                if !assignable(t, &want) {
                    self.report(
                        WfKind::TypeMismatch,
                        format!(
                            "argument of type {} passed to `{func}` as {}",
                            show(t),
                            show(&want)
                        ),
                    );
                }
            }
            return f.results.iter().map(|r| r.subst(&map)).collect();
        };
        let want: Vec<GoType> = params.iter().map(|p| p.subst(&map)).collect();
        self.args(args, &want, func);
        f.results.iter().map(|r| r.subst(&map)).collect()
    }
}

/// First-order matching of a parameter type against an argument type.
fn unify(pattern: &GoType, actual: &GoType, vars: &[String], map: &mut Vec<(String, GoType)>) {
    match (pattern, actual) {
        (GoType::Param(p), _) if vars.contains(p) => {
            if !map.iter().any(|(n, _)| n == p) && !is_nil(actual) {
                map.push((p.clone(), actual.clone()));
            }
        }
        (GoType::Struct(a, xs), GoType::Struct(b, ys))
        | (GoType::Iface(a, xs), GoType::Iface(b, ys))
            if a == b && xs.len() == ys.len() =>
        {
            for (x, y) in xs.iter().zip(ys) {
                unify(x, y, vars, map);
            }
        }
        (GoType::Func(p1, r1), GoType::Func(p2, r2))
            if p1.len() == p2.len() && r1.len() == r2.len() =>
        {
            for (x, y) in p1.iter().zip(p2).chain(r1.iter().zip(r2)) {
                unify(x, y, vars, map);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::super::MATCH_FAILED;
    use super::*;

    fn nat() -> GoType {
        GoType::Iface("Nat".into(), vec![])
    }

    fn nat_decls() -> Vec<GoDecl> {
        vec![
            GoDecl::Type(TypeDecl {
                name: "Nat".into(),
                params: vec![],
                body: TypeBody::Interface,
            }),
            GoDecl::Type(TypeDecl {
                name: "Zero".into(),
                params: vec![],
                body: TypeBody::Struct(vec![]),
            }),
            GoDecl::Type(TypeDecl {
                name: "Suc".into(),
                params: vec![],
                body: TypeBody::Struct(vec![("A".into(), nat())]),
            }),
        ]
    }

    fn func(name: &str, results: Vec<GoType>, body: Stmt) -> GoDecl {
        GoDecl::Func(FuncDecl {
            name: name.into(),
            type_params: vec![],
            params: vec![],
            results,
            body,
            destructor: false,
        })
    }

    fn kinds(ds: &[GoDecl]) -> Vec<WfKind> {
        check_wf(ds).into_iter().map(|d| d.kind).collect()
    }

    #[test]
    fn multi_value_call_must_be_destructured() {
        let mut ds = nat_decls();
        let zero = GoExpr::conv(
            nat(),
            GoExpr::StructLit {
                ty: GoType::Struct("Zero".into(), vec![]),
                fields: vec![],
            },
        );
        ds.push(func(
            "Foo",
            vec![nat(), nat(), nat()],
            Stmt::Return(vec![zero.clone(), zero.clone(), zero]),
        ));
        ds.push(func(
            "Bar",
            vec![nat()],
            Stmt::define(
                vec!["no_tuples".into()],
                GoExpr::call("Foo", vec![], vec![]),
                Stmt::ret(GoExpr::var("no_tuples")),
            ),
        ));
        assert_eq!(kinds(&ds), vec![WfKind::MultiValueMisuse]);
    }

    #[test]
    fn body_must_end_in_return() {
        let mut ds = nat_decls();
        ds.push(func(
            "F",
            vec![nat()],
            Stmt::define(
                vec!["x".into()],
                GoExpr::call("F", vec![], vec![]),
                Stmt::Done,
            ),
        ));
        assert!(kinds(&ds).contains(&WfKind::MissingReturn));
    }

    #[test]
    fn unused_locals_and_blank_reads_are_reported() {
        let mut ds = nat_decls();
        ds.push(func(
            "F",
            vec![nat()],
            Stmt::define(
                vec!["x".into()],
                GoExpr::call("F", vec![], vec![]),
                Stmt::ret(GoExpr::var("_")),
            ),
        ));
        assert_eq!(kinds(&ds), vec![WfKind::BlankRead, WfKind::UnusedVariable]);
    }

    #[test]
    fn assertions_need_interfaces_and_conversions_target_them() {
        let mut ds = nat_decls();
        let zero = GoExpr::StructLit {
            ty: GoType::Struct("Zero".into(), vec![]),
            fields: vec![],
        };
        ds.push(func(
            "F",
            vec![nat()],
            Stmt::Assert {
                value: "_".into(),
                ok: "m".into(),
                target: zero.clone(),
                ty: GoType::Struct("Zero".into(), vec![]),
                rest: Box::new(Stmt::if_then(
                    GoExpr::var("m"),
                    Stmt::ret(GoExpr::conv(GoType::Struct("Zero".into(), vec![]), zero)),
                    Stmt::Panic(MATCH_FAILED.into()),
                )),
            },
        ));
        assert_eq!(
            kinds(&ds),
            vec![
                WfKind::NotInterface,
                WfKind::NotInterface,
                WfKind::TypeMismatch
            ]
        );
    }

    #[test]
    fn core_strictness_flags_extensions() {
        let mut ds = nat_decls();
        ds.push(func("F", vec![nat()], Stmt::Panic(MATCH_FAILED.into())));
        assert!(check_wf(&ds).is_empty());
        let core = check_wf_with(&ds, Strictness::Core);
        assert_eq!(core.len(), 1);
        assert_eq!(core[0].kind, WfKind::Extension);
    }
}
