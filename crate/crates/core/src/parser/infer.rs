//! Type resolution by first-order unification.
//!
//! Works on IR whose missing annotations are metavariables (`?n`). Type
//! variables of a declaration's signature are rigid. Each declaration is
//! solved on its own against the declared signatures of the others, then
//! every annotation is rewritten with the solution. Metavariables left
//! unconstrained default to the builtin `any`; class constraints are checked
//! once the solution is known.

use std::collections::HashMap;

use crate::ir::{
    builtins, Clause, Declaration, Entity, Equation, Pattern, Program, ProgramIndex, Term, TyParam,
    Type,
};

use super::resolve::{is_meta, Positions};
use super::{Diagnostic, DiagnosticKind, SourcePos};

struct Wanted {
    ty: Type,
    class: String,
}

struct Solver<'p, 'a> {
    index: &'a ProgramIndex<'p>,
    subst: HashMap<String, Type>,
    wanted: Vec<Wanted>,
    next: usize,
}

impl Solver<'_, '_> {
    fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) if is_meta(v) => match self.subst.get(v) {
                Some(t) => self.resolve(t),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn zonk(&self, t: &Type) -> Type {
        match self.resolve(t) {
            Type::Con(n, args) => Type::Con(n, args.iter().map(|a| self.zonk(a)).collect()),
            Type::Fun(a, r) => Type::fun(self.zonk(&a), self.zonk(&r)),
            v => v,
        }
    }

    /// Zonks and defaults any remaining metavariable to `any`.
    fn finish(&self, t: &Type) -> Type {
        match self.zonk(t) {
            Type::Var(v) if is_meta(&v) => Type::base(builtins::ANY),
            Type::Con(n, args) => Type::Con(n, args.iter().map(|a| self.finish(a)).collect()),
            Type::Fun(a, r) => Type::fun(self.finish(&a), self.finish(&r)),
            v => v,
        }
    }

    fn occurs(&self, meta: &str, t: &Type) -> bool {
        match self.resolve(t) {
            Type::Var(v) => v == meta,
            Type::Con(_, args) => args.iter().any(|a| self.occurs(meta, a)),
            Type::Fun(a, r) => self.occurs(meta, &a) || self.occurs(meta, &r),
        }
    }

    fn unify(&mut self, a: &Type, b: &Type) -> Result<(), String> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(m), other) | (other, Type::Var(m)) if is_meta(m) => {
                if self.occurs(m, other) {
                    return Err(format!(
                        "infinite type: {} occurs in {}",
                        self.show(&a),
                        self.show(&b)
                    ));
                }
                self.subst.insert(m.clone(), other.clone());
                Ok(())
            }
            (Type::Con(n, xs), Type::Con(m, ys)) if n == m && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y).map_err(|e| {
                        format!(
                            "{e} (while matching `{}` with `{}`)",
                            self.show(&a),
                            self.show(&b)
                        )
                    })?;
                }
                Ok(())
            }
            (Type::Fun(a1, r1), Type::Fun(a2, r2)) => {
                self.unify(a1, a2)?;
                self.unify(r1, r2)
            }
            _ => Err(format!(
                "type mismatch: `{}` vs `{}`",
                self.show(&a),
                self.show(&b)
            )),
        }
    }

    fn show(&self, t: &Type) -> String {
        rename_metas(&self.zonk(t)).to_string()
    }

    fn fresh(&mut self) -> Type {
        self.next += 1;
        Type::var(format!("?s{}", self.next))
    }

    fn reference(&mut self, name: &str, type_args: &[Type]) -> Result<Type, String> {
        let Some((params, sig)) = self.index.scheme(name) else {
            return Err(format!("unknown name `{name}`"));
        };
        if params.len() != type_args.len() {
            return Err(format!("`{name}` expects {} type arguments", params.len()));
        }
        let map: Vec<(String, Type)> = params
            .iter()
            .cloned()
            .zip(type_args.iter().cloned())
            .collect();
        match self.index.entity(name) {
            Some(Entity::Fun(f)) => {
                for (tp, arg) in f.ty_params.iter().zip(type_args) {
                    for class in &tp.classes {
                        self.wanted.push(Wanted {
                            ty: arg.clone(),
                            class: class.clone(),
                        });
                    }
                }
            }
            Some(Entity::Method { class, .. }) => self.wanted.push(Wanted {
                ty: type_args[0].clone(),
                class: class.name.clone(),
            }),
            _ => {}
        }
        Ok(sig.subst(&map))
    }

    fn pattern(
        &mut self,
        p: &Pattern,
        expected: &Type,
        env: &mut Vec<(String, Type)>,
    ) -> Result<(), String> {
        match p {
            Pattern::Var { name } => {
                env.push((name.clone(), expected.clone()));
                Ok(())
            }
            Pattern::Con {
                ctor,
                type_args,
                args,
            } => {
                let Some((data, _)) = self.index.ctor(ctor) else {
                    return Err(format!("unknown constructor `{ctor}`"));
                };
                let ty = Type::con(data.name.clone(), type_args.clone());
                self.unify(&ty, expected)
                    .map_err(|e| format!("pattern `{ctor}`: {e}"))?;
                let fields = self
                    .index
                    .ctor_fields(ctor, type_args)
                    .ok_or_else(|| format!("bad constructor pattern `{ctor}`"))?;
                if fields.len() != args.len() {
                    return Err(format!("constructor `{ctor}` has {} fields", fields.len()));
                }
                for (a, f) in args.iter().zip(&fields) {
                    self.pattern(a, f, env)?;
                }
                Ok(())
            }
        }
    }

    fn term(&mut self, t: &Term, env: &mut Vec<(String, Type)>) -> Result<Type, String> {
        match t {
            Term::Var { name } => env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| format!("unbound variable `{name}`")),
            Term::Ref {
                name, type_args, ..
            } => self.reference(name, type_args),
            Term::App { fun, arg } => {
                let ft = self.term(fun, env)?;
                let at = self.term(arg, env)?;
                match self.resolve(&ft) {
                    Type::Fun(param, result) => {
                        self.unify(&param, &at).map_err(|e| {
                            format!(
                                "argument has type `{}`, expected `{}`: {e}",
                                self.show(&at),
                                self.show(&param)
                            )
                        })?;
                        Ok(*result)
                    }
                    Type::Var(m) if is_meta(&m) => {
                        let r = self.fresh();
                        self.unify(&ft, &Type::fun(at, r.clone()))?;
                        Ok(r)
                    }
                    other => Err(format!(
                        "`{}` is applied to an argument but has type `{}`",
                        describe_head(fun),
                        self.show(&other)
                    )),
                }
            }
            Term::Abs { binder, ty, body } => {
                env.push((binder.clone(), ty.clone()));
                let bt = self.term(body, env);
                env.pop();
                Ok(Type::fun(ty.clone(), bt?))
            }
            Term::Case {
                scrutinee,
                ty,
                clauses,
            } => {
                let st = self.term(scrutinee, env)?;
                self.unify(ty, &st)?;
                let mut result: Option<Type> = None;
                for c in clauses {
                    let mark = env.len();
                    let r = self
                        .pattern(&c.pattern, ty, env)
                        .and_then(|_| self.term(&c.body, env));
                    env.truncate(mark);
                    let bt = r?;
                    match &result {
                        None => result = Some(bt),
                        Some(prev) => {
                            let prev = prev.clone();
                            self.unify(&prev, &bt)
                                .map_err(|e| format!("case clauses have different types: {e}"))?;
                        }
                    }
                }
                result.ok_or_else(|| "case without clauses".to_string())
            }
            Term::Lit { lit } => Ok(crate::ir::typing::literal_type(lit)),
            Term::Method { .. } | Term::DictLit { .. } => {
                Err("dictionary terms cannot appear before elaboration".into())
            }
        }
    }

    fn finish_pattern(&self, p: &Pattern) -> Pattern {
        match p {
            Pattern::Var { .. } => p.clone(),
            Pattern::Con {
                ctor,
                type_args,
                args,
            } => Pattern::Con {
                ctor: ctor.clone(),
                type_args: type_args.iter().map(|t| self.finish(t)).collect(),
                args: args.iter().map(|a| self.finish_pattern(a)).collect(),
            },
        }
    }

    fn finish_term(&self, t: &Term) -> Term {
        match t {
            Term::Var { .. } | Term::Lit { .. } => t.clone(),
            Term::Ref {
                name,
                type_args,
                dicts,
            } => Term::Ref {
                name: name.clone(),
                type_args: type_args.iter().map(|t| self.finish(t)).collect(),
                dicts: dicts.clone(),
            },
            Term::App { fun, arg } => Term::app(self.finish_term(fun), self.finish_term(arg)),
            Term::Abs { binder, ty, body } => {
                Term::abs(binder.clone(), self.finish(ty), self.finish_term(body))
            }
            Term::Case {
                scrutinee,
                ty,
                clauses,
            } => Term::Case {
                scrutinee: Box::new(self.finish_term(scrutinee)),
                ty: self.finish(ty),
                clauses: clauses
                    .iter()
                    .map(|c| Clause {
                        pattern: self.finish_pattern(&c.pattern),
                        body: self.finish_term(&c.body),
                    })
                    .collect(),
            },
            Term::Method { .. } | Term::DictLit { .. } => t.clone(),
        }
    }

    /// Checks solved class constraints. `sorts` gives the classes each rigid
    /// type variable is known to belong to.
    fn check_wanted(&self, sorts: &[TyParam]) -> Vec<String> {
        let mut errors = Vec::new();
        for w in &self.wanted {
            let ty = self.zonk(&w.ty);
            self.entailed(&ty, &w.class, sorts, &mut errors);
        }
        errors.dedup();
        errors
    }

    fn entailed(&self, ty: &Type, class: &str, sorts: &[TyParam], errors: &mut Vec<String>) {
        match ty {
            Type::Var(v) if is_meta(v) => errors.push(format!(
                "ambiguous type: cannot determine the instance of `{class}` to use"
            )),
            Type::Var(v) => {
                let ok = sorts
                    .iter()
                    .find(|p| p.name == *v)
                    .is_some_and(|p| p.classes.iter().any(|c| self.index.entails(c, class)));
                if !ok {
                    errors.push(format!(
                        "type variable '{v} needs the constraint `'{v} :: {class}`"
                    ));
                }
            }
            Type::Con(tycon, args) => {
                let insts = self.index.instances_for(class, tycon);
                match insts.as_slice() {
                    [] => errors.push(format!("no instance `{tycon} :: {class}`")),
                    [inst] => {
                        for (p, arg) in inst.ty_params.iter().zip(args) {
                            for c in &p.classes {
                                self.entailed(arg, c, sorts, errors);
                            }
                        }
                    }
                    _ => errors.push(format!("overlapping instances `{tycon} :: {class}`")),
                }
            }
            Type::Fun(..) => errors.push(format!("no instance of `{class}` for function types")),
        }
    }
}

fn describe_head(t: &Term) -> String {
    match t.spine().0 {
        Term::Var { name } | Term::Ref { name, .. } => name.clone(),
        _ => "expression".into(),
    }
}

/// Replaces metavariable names by readable `'_1`, `'_2`, ... for messages.
fn rename_metas(t: &Type) -> Type {
    fn go(t: &Type, seen: &mut Vec<String>) -> Type {
        match t {
            Type::Var(v) if is_meta(v) => {
                let i = match seen.iter().position(|s| s == v) {
                    Some(i) => i,
                    None => {
                        seen.push(v.clone());
                        seen.len() - 1
                    }
                };
                Type::var(format!("_{}", i + 1))
            }
            Type::Var(_) => t.clone(),
            Type::Con(n, args) => Type::Con(n.clone(), args.iter().map(|a| go(a, seen)).collect()),
            Type::Fun(a, r) => Type::fun(go(a, seen), go(r, seen)),
        }
    }
    go(t, &mut Vec::new())
}

fn type_error(pos: SourcePos, decl: &str, message: String) -> Diagnostic {
    Diagnostic {
        pos,
        kind: DiagnosticKind::Type,
        message: format!("in `{decl}`: {message}"),
    }
}

/// Fills every metavariable annotation of a program. Diagnostics carry the
/// positions in `positions` when available.
pub fn resolve_types_at(p: &Program, positions: &Positions) -> Result<Program, Vec<Diagnostic>> {
    let index = p.index();
    let mut errors = Vec::new();
    let mut out = Vec::new();
    for (di, decl) in p.decls.iter().enumerate() {
        let mut solver = Solver {
            index: &index,
            subst: HashMap::new(),
            wanted: Vec::new(),
            next: 0,
        };
        let name = decl.name();
        let mut eq_counter = 0;
        let mut check_eqs =
            |solver: &mut Solver, eqs: &[Equation], sig: &Type, errors: &mut Vec<Diagnostic>| {
                for eq in eqs {
                    let pos = positions.equation(di, eq_counter);
                    eq_counter += 1;
                    let Some((args, result)) = sig.split_arrows(eq.params.len()) else {
                        errors.push(Diagnostic {
                            pos,
                            kind: DiagnosticKind::Arity,
                            message: format!(
                                "in `{name}`: {} parameters but the type `{sig}` has fewer arrows",
                                eq.params.len()
                            ),
                        });
                        continue;
                    };
                    let mut env = Vec::new();
                    let r = eq
                        .params
                        .iter()
                        .zip(&args)
                        .try_for_each(|(p, a)| solver.pattern(p, a, &mut env))
                        .and_then(|_| solver.term(&eq.rhs, &mut env))
                        .and_then(|t| {
                            solver.unify(&t, &result).map_err(|e| {
                                format!(
                                    "right-hand side has type `{}`, expected `{}`: {e}",
                                    solver.show(&t),
                                    solver.show(&result)
                                )
                            })
                        });
                    if let Err(e) = r {
                        errors.push(type_error(pos, &name, e));
                    }
                }
            };
        let resolved = match decl {
            Declaration::Fun(f) => {
                let before = errors.len();
                check_eqs(&mut solver, &f.equations, &f.signature, &mut errors);
                if errors.len() == before {
                    for e in solver.check_wanted(&f.ty_params) {
                        errors.push(type_error(positions.decl(di), &name, e));
                    }
                }
                let mut f = f.clone();
                for eq in &mut f.equations {
                    eq.params = eq.params.iter().map(|p| solver.finish_pattern(p)).collect();
                    eq.rhs = solver.finish_term(&eq.rhs);
                }
                Declaration::Fun(f)
            }
            Declaration::Const(c) => {
                let mut env = Vec::new();
                let r = solver.term(&c.rhs, &mut env).and_then(|t| {
                    solver.unify(&t, &c.signature).map_err(|e| {
                        format!(
                            "definition has type `{}`, declared `{}`: {e}",
                            solver.show(&t),
                            c.signature
                        )
                    })
                });
                match r {
                    Err(e) => errors.push(type_error(positions.decl(di), &name, e)),
                    Ok(()) => {
                        for e in solver.check_wanted(&[]) {
                            errors.push(type_error(positions.decl(di), &name, e));
                        }
                    }
                }
                let mut c = c.clone();
                c.rhs = solver.finish_term(&c.rhs);
                Declaration::Const(c)
            }
            Declaration::Instance(inst) => {
                let mut inst = inst.clone();
                match index.class(&inst.class) {
                    None => errors.push(type_error(
                        positions.decl(di),
                        &name,
                        format!("unknown class `{}`", inst.class),
                    )),
                    Some(class) => {
                        let before = errors.len();
                        let head = inst.head();
                        for m in &inst.methods {
                            if let Some(sig) = class.methods.iter().find(|s| s.name == m.name) {
                                let sig = sig
                                    .signature
                                    .subst(&[(class.ty_param.clone(), head.clone())]);
                                check_eqs(&mut solver, &m.equations, &sig, &mut errors);
                            }
                        }
                        for sig in &class.methods {
                            if !inst.methods.iter().any(|m| m.name == sig.name) {
                                errors.push(type_error(
                                    positions.decl(di),
                                    &name,
                                    format!("method `{}` is not defined", sig.name),
                                ));
                            }
                        }
                        if errors.len() == before {
                            for e in solver.check_wanted(&inst.ty_params) {
                                errors.push(type_error(positions.decl(di), &name, e));
                            }
                        }
                        for m in &mut inst.methods {
                            for eq in &mut m.equations {
                                eq.params =
                                    eq.params.iter().map(|p| solver.finish_pattern(p)).collect();
                                eq.rhs = solver.finish_term(&eq.rhs);
                            }
                        }
                    }
                }
                Declaration::Instance(inst)
            }
            other => other.clone(),
        };
        out.push(resolved);
    }
    if errors.is_empty() {
        Ok(Program::new(out))
    } else {
        Err(errors)
    }
}

/// Resolves an entry term: infers its type, checks class constraints and
/// fills annotations. Variables in `free` are given fresh types.
pub fn resolve_term(p: &Program, term: &Term, free: &[String]) -> Result<(Term, Type), String> {
    let index = p.index();
    let mut solver = Solver {
        index: &index,
        subst: HashMap::new(),
        wanted: Vec::new(),
        next: 0,
    };
    let mut env: Vec<(String, Type)> = free
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Type::var(format!("?free{i}"))))
        .collect();
    let ty = solver.term(term, &mut env)?;
    if let Some(e) = solver.check_wanted(&[]).into_iter().next() {
        return Err(e);
    }
    Ok((solver.finish_term(term), solver.finish(&ty)))
}
