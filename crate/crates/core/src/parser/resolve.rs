//! Name resolution: surface declarations to IR.
//!
//! Annotations the user did not write (binder types, scrutinee types, type
//! arguments of references and constructor patterns) are filled with fresh
//! type metavariables, written as type variables whose name starts with
//! `?`. Type resolution replaces them afterwards.

use std::collections::{HashMap, HashSet};

use crate::ir::{
    builtins, ClassDecl, ConstDecl, CtorDecl, DataDecl, Declaration, Equation, FunDecl,
    InstanceDecl, MethodDef, MethodSig, Pattern, Program, ProgramIndex, Term, TyParam, Type,
};

use super::syntax::{SDecl, SEquation, SPat, STerm, SType};
use super::{Diagnostic, DiagnosticKind, SourcePos};

/// Source positions kept alongside a resolved program, for diagnostics
/// raised by later phases.
#[derive(Clone, Debug, Default)]
pub struct Positions {
    pub decls: Vec<SourcePos>,
    /// Per declaration, the position of each equation in traversal order
    /// (instance equations flattened method by method).
    pub equations: Vec<Vec<SourcePos>>,
}

impl Positions {
    pub fn decl(&self, i: usize) -> SourcePos {
        self.decls.get(i).copied().unwrap_or_default()
    }

    pub fn equation(&self, decl: usize, eq: usize) -> SourcePos {
        self.equations
            .get(decl)
            .and_then(|e| e.get(eq))
            .copied()
            .unwrap_or_else(|| self.decl(decl))
    }
}

pub fn is_meta(name: &str) -> bool {
    name.starts_with('?')
}

/// Prefix of the placeholder variables standing for `nil` in entry calls.
pub const NIL_PREFIX: &str = "__nil_";

const OPERATOR_NAMES: &[&str] = &["plus", "minus", "times", "less", "less_eq"];

pub struct Resolver<'a> {
    index: ProgramIndex<'a>,
    next_meta: usize,
    pub errors: Vec<Diagnostic>,
    entry_mode: bool,
    pub nil_vars: Vec<String>,
}

fn diag(pos: SourcePos, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        pos,
        kind,
        message: message.into(),
    }
}

type Sorts = Vec<(String, Vec<String>)>;

fn add_sort(sorts: &mut Sorts, var: &str, classes: &[String]) {
    match sorts.iter_mut().find(|(v, _)| v == var) {
        Some((_, cs)) => {
            for c in classes {
                if !cs.contains(c) {
                    cs.push(c.clone());
                }
            }
        }
        None => sorts.push((var.to_string(), classes.to_vec())),
    }
}

/// Converts a type; checks constructor names and arities against the
/// declared datatypes. `sorts` collects sort annotations on variables when
/// given, otherwise annotations are rejected.
fn convert_type(
    st: &SType,
    arities: &HashMap<String, usize>,
    mut sorts: Option<&mut Sorts>,
    errors: &mut Vec<Diagnostic>,
) -> Type {
    match st {
        SType::Var(v, classes, pos) => {
            if !classes.is_empty() {
                match sorts {
                    Some(ref mut s) => add_sort(s, v, classes),
                    None => errors.push(diag(
                        *pos,
                        DiagnosticKind::Type,
                        format!("sort annotation on '{v} is not allowed here"),
                    )),
                }
            }
            Type::var(v.clone())
        }
        SType::App(name, args, pos) => {
            match arities.get(name) {
                None => errors.push(diag(
                    *pos,
                    DiagnosticKind::Scope,
                    format!("unknown type `{name}`"),
                )),
                Some(n) if *n != args.len() => errors.push(diag(
                    *pos,
                    DiagnosticKind::Arity,
                    format!("type `{name}` takes {n} arguments, given {}", args.len()),
                )),
                Some(_) => {}
            }
            let args = args
                .iter()
                .map(|a| convert_type(a, arities, sorts.as_deref_mut(), errors))
                .collect();
            Type::con(name.clone(), args)
        }
        SType::Fun(a, r) => {
            let a = convert_type(a, arities, sorts.as_deref_mut(), errors);
            let r = convert_type(r, arities, sorts, errors);
            Type::fun(a, r)
        }
    }
}

fn stype_pos(st: &SType) -> SourcePos {
    match st {
        SType::Var(_, _, p) | SType::App(_, _, p) => *p,
        SType::Fun(a, _) => stype_pos(a),
    }
}

/// Resolves a list of surface declarations into a program with metas.
pub fn resolve_program(decls: &[SDecl]) -> (Program, Positions, Vec<Diagnostic>) {
    let mut errors = Vec::new();
    let skeleton = skeleton(decls, &mut errors);
    let mut positions = Positions::default();
    let mut out = Vec::new();
    let mut r = Resolver {
        index: skeleton.index(),
        next_meta: 0,
        errors: Vec::new(),
        entry_mode: false,
        nil_vars: Vec::new(),
    };
    for (sdecl, decl) in decls.iter().zip(&skeleton.decls) {
        positions.decls.push(sdecl.pos());
        let mut eq_pos = Vec::new();
        let resolved = r.resolve_decl(sdecl, decl, &mut eq_pos);
        positions.equations.push(eq_pos);
        out.push(resolved);
    }
    errors.append(&mut r.errors);
    (Program::new(out), positions, errors)
}

/// Builds declarations with signatures but without bodies.
fn skeleton(decls: &[SDecl], errors: &mut Vec<Diagnostic>) -> Program {
    let mut arities: HashMap<String, usize> =
        builtins::TYPES.iter().map(|t| (t.to_string(), 0)).collect();
    let mut seen_values: HashSet<String> = HashSet::new();
    let mut seen_classes: HashSet<String> = HashSet::new();
    for d in decls {
        if let SDecl::Data {
            name, params, pos, ..
        } = d
        {
            if arities.insert(name.clone(), params.len()).is_some() {
                errors.push(diag(
                    *pos,
                    DiagnosticKind::Scope,
                    format!("type `{name}` is declared twice"),
                ));
            }
        }
    }
    let class_names: HashSet<&str> = decls
        .iter()
        .filter_map(|d| match d {
            SDecl::Class { name, .. } => Some(name.as_str()),
            _ => None,
        })
        .collect();
    let mut check_value = |name: &str, pos: SourcePos, errors: &mut Vec<Diagnostic>| {
        if !seen_values.insert(name.to_string()) || builtins::is_builtin_const(name) {
            errors.push(diag(
                pos,
                DiagnosticKind::Scope,
                format!("`{name}` is declared twice"),
            ));
        }
    };
    let check_classes = |classes: &[String], pos: SourcePos, errors: &mut Vec<Diagnostic>| {
        for c in classes {
            if !class_names.contains(c.as_str()) {
                errors.push(diag(
                    pos,
                    DiagnosticKind::Scope,
                    format!("unknown class `{c}`"),
                ));
            }
        }
    };
    let mut out = Vec::new();
    for d in decls {
        let decl = match d {
            SDecl::Data {
                name,
                params,
                ctors,
                pos,
            } => {
                let mut seen = HashSet::new();
                for p in params {
                    if !seen.insert(p) {
                        errors.push(diag(
                            *pos,
                            DiagnosticKind::Scope,
                            format!("type parameter '{p} repeated"),
                        ));
                    }
                }
                let ctors = ctors
                    .iter()
                    .map(|(c, fields)| {
                        check_value(c, *pos, errors);
                        let fields = fields
                            .iter()
                            .map(|f| {
                                let t = convert_type(f, &arities, None, errors);
                                for v in t.free_vars() {
                                    if !params.contains(&v) {
                                        errors.push(diag(
                                            stype_pos(f),
                                            DiagnosticKind::Scope,
                                            format!(
                                                "type variable '{v} is not a parameter of `{name}`"
                                            ),
                                        ));
                                    }
                                }
                                t
                            })
                            .collect();
                        CtorDecl {
                            name: c.clone(),
                            fields,
                        }
                    })
                    .collect();
                Declaration::Data(DataDecl {
                    name: name.clone(),
                    ty_params: params.clone(),
                    ctors,
                    record: None,
                })
            }
            SDecl::Fun {
                name,
                signature,
                pos,
                ..
            } => {
                check_value(name, *pos, errors);
                let mut sorts = Sorts::new();
                let sig = convert_type(signature, &arities, Some(&mut sorts), errors);
                let ty_params = sig
                    .free_vars()
                    .into_iter()
                    .map(|v| {
                        let classes = sorts
                            .iter()
                            .find(|(s, _)| *s == v)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_default();
                        check_classes(&classes, *pos, errors);
                        TyParam { name: v, classes }
                    })
                    .collect();
                Declaration::Fun(FunDecl {
                    name: name.clone(),
                    ty_params,
                    dict_params: Vec::new(),
                    signature: sig,
                    equations: Vec::new(),
                })
            }
            SDecl::Definition {
                name,
                signature,
                pos,
                ..
            } => {
                check_value(name, *pos, errors);
                let sig = convert_type(signature, &arities, None, errors);
                Declaration::Const(ConstDecl {
                    name: name.clone(),
                    signature: sig,
                    rhs: Term::int(0),
                })
            }
            SDecl::Class {
                name,
                superclasses,
                methods,
                pos,
            } => {
                if !seen_classes.insert(name.clone()) {
                    errors.push(diag(
                        *pos,
                        DiagnosticKind::Scope,
                        format!("class `{name}` is declared twice"),
                    ));
                }
                check_classes(superclasses, *pos, errors);
                let mut class_var: Option<String> = None;
                let methods =
                    methods
                        .iter()
                        .map(|(m, sig, mpos)| {
                            check_value(m, *mpos, errors);
                            let sig = convert_type(sig, &arities, None, errors);
                            let vars = sig.free_vars();
                            match (vars.as_slice(), &class_var) {
                                ([v], None) => class_var = Some(v.clone()),
                                ([v], Some(cv)) if v == cv => {}
                                _ => errors.push(diag(
                                    *mpos,
                                    DiagnosticKind::Type,
                                    format!(
                                    "method `{m}` must mention exactly the class type variable{}",
                                    class_var.as_ref().map(|v| format!(" '{v}")).unwrap_or_default()
                                ),
                                )),
                            }
                            MethodSig {
                                name: m.clone(),
                                signature: sig,
                            }
                        })
                        .collect();
                Declaration::Class(ClassDecl {
                    name: name.clone(),
                    ty_param: class_var.unwrap_or_else(|| "a".into()),
                    superclasses: superclasses.clone(),
                    methods,
                })
            }
            SDecl::Instance {
                head,
                class,
                constraints,
                pos,
                ..
            } => {
                let mut sorts = Sorts::new();
                let ty = convert_type(head, &arities, Some(&mut sorts), errors);
                for (v, cs) in constraints {
                    add_sort(&mut sorts, v, cs);
                }
                if !class_names.contains(class.as_str()) {
                    errors.push(diag(
                        *pos,
                        DiagnosticKind::Scope,
                        format!("unknown class `{class}`"),
                    ));
                }
                let (tycon, ty_params) = match &ty {
                    Type::Con(tycon, args) => {
                        let mut params: Vec<TyParam> = Vec::new();
                        for a in args {
                            match a {
                                Type::Var(v) if !params.iter().any(|p| p.name == *v) => {
                                    params.push(TyParam::plain(v.clone()))
                                }
                                _ => errors.push(diag(
                                    *pos,
                                    DiagnosticKind::Type,
                                    "instance head must apply a type constructor to distinct type variables",
                                )),
                            }
                        }
                        (tycon.clone(), params)
                    }
                    _ => {
                        errors.push(diag(
                            *pos,
                            DiagnosticKind::Type,
                            "instance head must be a type constructor",
                        ));
                        (String::new(), Vec::new())
                    }
                };
                let mut ty_params = ty_params;
                for (v, cs) in sorts {
                    check_classes(&cs, *pos, errors);
                    match ty_params.iter_mut().find(|p| p.name == v) {
                        Some(p) => p.classes = cs,
                        None => errors.push(diag(
                            *pos,
                            DiagnosticKind::Scope,
                            format!("constrained type variable '{v} does not occur in the instance head"),
                        )),
                    }
                }
                Declaration::Instance(InstanceDecl {
                    class: class.clone(),
                    tycon,
                    ty_params,
                    methods: Vec::new(),
                })
            }
        };
        out.push(decl);
    }
    Program::new(out)
}

impl<'a> Resolver<'a> {
    /// A resolver for terms over an already resolved program, with `nil`
    /// accepted as a placeholder for an absent value.
    pub fn for_entry(program: &'a Program) -> Self {
        Resolver {
            index: program.index(),
            next_meta: 1_000_000,
            errors: Vec::new(),
            entry_mode: true,
            nil_vars: Vec::new(),
        }
    }

    fn index(&self) -> &ProgramIndex<'a> {
        &self.index
    }

    pub fn meta(&mut self) -> Type {
        self.next_meta += 1;
        Type::var(format!("?{}", self.next_meta))
    }

    fn metas(&mut self, n: usize) -> Vec<Type> {
        (0..n).map(|_| self.meta()).collect()
    }

    fn error(&mut self, pos: SourcePos, kind: DiagnosticKind, message: impl Into<String>) {
        self.errors.push(diag(pos, kind, message));
    }

    fn type_arities(&self) -> HashMap<String, usize> {
        let mut out: HashMap<String, usize> =
            builtins::TYPES.iter().map(|t| (t.to_string(), 0)).collect();
        for d in &self.index().program.decls {
            if let Declaration::Data(d) = d {
                out.entry(d.name.clone()).or_insert(d.ty_params.len());
            }
        }
        out
    }

    fn resolve_decl(
        &mut self,
        sdecl: &SDecl,
        decl: &Declaration,
        eq_pos: &mut Vec<SourcePos>,
    ) -> Declaration {
        match (sdecl, decl) {
            (SDecl::Fun { equations, .. }, Declaration::Fun(f)) => {
                let rigid: Vec<String> = f.ty_params.iter().map(|p| p.name.clone()).collect();
                let eqs = self.equations(&f.name, equations, &rigid, eq_pos);
                Declaration::Fun(FunDecl {
                    equations: eqs,
                    ..f.clone()
                })
            }
            (SDecl::Definition { rhs, pos, .. }, Declaration::Const(c)) => {
                eq_pos.push(*pos);
                let rigid = c.ty_params();
                let rhs = self.term(rhs, &mut Vec::new(), &rigid);
                Declaration::Const(ConstDecl { rhs, ..c.clone() })
            }
            (SDecl::Instance { equations, .. }, Declaration::Instance(inst)) => {
                let rigid: Vec<String> = inst.ty_params.iter().map(|p| p.name.clone()).collect();
                let methods_of_class: Vec<String> = self
                    .index()
                    .class(&inst.class)
                    .map(|c| c.methods.iter().map(|m| m.name.clone()).collect())
                    .unwrap_or_default();
                let mut order: Vec<String> = Vec::new();
                for eq in equations {
                    if !methods_of_class.contains(&eq.name) {
                        self.error(
                            eq.pos,
                            DiagnosticKind::Scope,
                            format!("`{}` is not a method of class `{}`", eq.name, inst.class),
                        );
                        continue;
                    }
                    if !order.contains(&eq.name) {
                        order.push(eq.name.clone());
                    }
                }
                let mut methods = Vec::new();
                for m in order {
                    let group: Vec<SEquation> =
                        equations.iter().filter(|e| e.name == m).cloned().collect();
                    let eqs = self.equations(&m, &group, &rigid, eq_pos);
                    methods.push(MethodDef {
                        name: m,
                        equations: eqs,
                    });
                }
                Declaration::Instance(InstanceDecl {
                    methods,
                    ..inst.clone()
                })
            }
            _ => decl.clone(),
        }
    }

    fn equations(
        &mut self,
        name: &str,
        eqs: &[SEquation],
        rigid: &[String],
        eq_pos: &mut Vec<SourcePos>,
    ) -> Vec<Equation> {
        let arity = eqs.first().map_or(0, |e| e.params.len());
        let mut out = Vec::new();
        for eq in eqs {
            eq_pos.push(eq.pos);
            if eq.name != name {
                self.error(
                    eq.pos,
                    DiagnosticKind::Scope,
                    format!(
                        "equation for `{}` inside the definition of `{name}`",
                        eq.name
                    ),
                );
            }
            if eq.params.len() != arity {
                self.error(
                    eq.pos,
                    DiagnosticKind::Arity,
                    format!(
                        "equation has {} parameters, the first one has {arity}",
                        eq.params.len()
                    ),
                );
            }
            let mut scope = Vec::new();
            let params: Vec<Pattern> = eq
                .params
                .iter()
                .map(|p| self.pattern(p, &mut scope))
                .collect();
            let rhs = self.term(&eq.rhs, &mut scope, rigid);
            out.push(Equation { params, rhs });
        }
        out
    }

    /// Lowers a pattern, appending its variables to `bound` and reporting
    /// variables bound twice.
    fn pattern(&mut self, p: &SPat, bound: &mut Vec<String>) -> Pattern {
        match p {
            SPat::Var(x, pos) => {
                if bound.contains(x) {
                    self.error(
                        *pos,
                        DiagnosticKind::Scope,
                        format!("variable `{x}` is bound twice in one pattern"),
                    );
                }
                bound.push(x.clone());
                Pattern::var(x.clone())
            }
            SPat::Con(c, args, pos) => {
                let info = self
                    .index()
                    .ctor(c)
                    .map(|(data, decl)| (data.ty_params.len(), decl.fields.len()));
                let type_args = match info {
                    None => {
                        self.error(
                            *pos,
                            DiagnosticKind::Scope,
                            format!("unknown constructor `{c}`"),
                        );
                        Vec::new()
                    }
                    Some((nparams, nfields)) => {
                        if nfields != args.len() {
                            self.error(
                                *pos,
                                DiagnosticKind::Arity,
                                format!(
                                    "constructor `{c}` has {nfields} fields, pattern gives {}",
                                    args.len()
                                ),
                            );
                        }
                        self.metas(nparams)
                    }
                };
                let args = args.iter().map(|a| self.pattern(a, bound)).collect();
                Pattern::con(c.clone(), type_args, args)
            }
        }
    }

    pub fn term(&mut self, t: &STerm, scope: &mut Vec<String>, rigid: &[String]) -> Term {
        match t {
            STerm::Name(x, pos) => {
                if scope.iter().rev().any(|s| s == x) {
                    return Term::var(x.clone());
                }
                if let Some((params, _)) = self.index().scheme(x) {
                    let n = params.len();
                    return Term::reference(x.clone(), self.metas(n));
                }
                // Operators fall back to integer arithmetic when no class
                // method of that name is declared.
                let int_op = format!("int.{x}");
                if let Some((params, _)) = self.index().scheme(&int_op) {
                    if params.is_empty() && OPERATOR_NAMES.contains(&x.as_str()) {
                        return Term::reference(int_op, Vec::new());
                    }
                }
                if self.entry_mode && x == "nil" {
                    let name = format!("{NIL_PREFIX}{}", self.nil_vars.len());
                    self.nil_vars.push(name.clone());
                    return Term::var(name);
                }
                self.error(*pos, DiagnosticKind::Scope, format!("unknown name `{x}`"));
                Term::var(x.clone())
            }
            STerm::Ctor(c, pos) => match self.index().ctor(c) {
                Some((data, _)) => {
                    let n = data.ty_params.len();
                    Term::reference(c.clone(), self.metas(n))
                }
                None => {
                    self.error(
                        *pos,
                        DiagnosticKind::Scope,
                        format!("unknown constructor `{c}`"),
                    );
                    Term::reference(c.clone(), Vec::new())
                }
            },
            STerm::Int(n, _) => Term::int(n.clone()),
            STerm::Str(s, _) => Term::Lit {
                lit: crate::ir::Literal::Str(s.clone()),
            },
            STerm::App(f, a) => {
                let f = self.term(f, scope, rigid);
                let a = self.term(a, scope, rigid);
                Term::app(f, a)
            }
            STerm::Abs(x, ann, body, pos) => {
                let ty = match ann {
                    Some(st) => self.annotation(st, rigid, *pos),
                    None => self.meta(),
                };
                scope.push(x.clone());
                let body = self.term(body, scope, rigid);
                scope.pop();
                Term::abs(x.clone(), ty, body)
            }
            STerm::Case(scrut, clauses, _) => {
                let scrut = self.term(scrut, scope, rigid);
                let ty = self.meta();
                let clauses = clauses
                    .iter()
                    .map(|(p, body)| {
                        let mut bound = Vec::new();
                        let p = self.pattern(p, &mut bound);
                        let mark = scope.len();
                        scope.extend(bound);
                        let body = self.term(body, scope, rigid);
                        scope.truncate(mark);
                        (p, body)
                    })
                    .collect();
                Term::case(scrut, ty, clauses)
            }
            STerm::Let(x, rhs, body, _) => {
                let rhs = self.term(rhs, scope, rigid);
                let ty = self.meta();
                scope.push(x.clone());
                let body = self.term(body, scope, rigid);
                scope.pop();
                Term::app(Term::abs(x.clone(), ty, body), rhs)
            }
            STerm::If(c, th, el, pos) => {
                let ok = [builtins::TRUE, builtins::FALSE].iter().all(|name| {
                    matches!(self.index().ctor(name), Some((d, _)) if d.name == builtins::BOOL)
                });
                if !ok {
                    self.error(
                        *pos,
                        DiagnosticKind::Scope,
                        "`if` needs `datatype bool = False | True`",
                    );
                }
                let c = self.term(c, scope, rigid);
                let th = self.term(th, scope, rigid);
                let el = self.term(el, scope, rigid);
                Term::case(
                    c,
                    Type::base(builtins::BOOL),
                    vec![
                        (Pattern::con(builtins::TRUE, Vec::new(), Vec::new()), th),
                        (Pattern::con(builtins::FALSE, Vec::new(), Vec::new()), el),
                    ],
                )
            }
        }
    }

    fn annotation(&mut self, st: &SType, rigid: &[String], pos: SourcePos) -> Type {
        let arities = self.type_arities();
        let mut errors = Vec::new();
        let ty = convert_type(st, &arities, None, &mut errors);
        self.errors.append(&mut errors);
        for v in ty.free_vars() {
            if !rigid.contains(&v) {
                self.error(
                    pos,
                    DiagnosticKind::Scope,
                    format!("type variable '{v} is not in scope"),
                );
            }
        }
        ty
    }
}
