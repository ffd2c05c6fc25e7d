//! Terms to Go statements and expressions.

use std::borrow::Cow;
use std::collections::BTreeSet;

use super::names::{exported, suffix, Locals};
use super::{is_multi, CodegenError, Codegen};
use crate::go_ast::{quote, GoExpr, GoType, Prim, PrimOp, Stmt, BLANK, MATCH_FAILED};
use crate::ir::builtins::{self, BaseValue, INT, STRING, TRUE};
use crate::ir::typing::{self, TypeEnv, TypeError};
use crate::ir::{
    Clause, DictRoot, Entity, Equation, FunDecl, InstancePath, Literal, Name, Pattern,
    ProgramIndex, Term, Type,
};
use crate::parser::NIL_PREFIX;

/// Letters for equality-test temporaries; `m`, `p` and `q` are taken by
/// assertions and subvalues.
const EQ_TEMPS: &str = "cdefghijklnorstuvwxyz";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Saturation {
    Exact,
    /// η-expanded by this many parameters.
    Under(usize),
    /// Applied to this many more arguments than the head takes.
    Over(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub head: Name,
    pub arity: usize,
    pub supplied: usize,
    pub saturation: Saturation,
}

/// Number of arguments the Go form of a head takes in one call.
fn head_arity(index: &ProgramIndex<'_>, head: &Term) -> Option<(Name, usize)> {
    match head {
        Term::Ref { name, .. } => {
            let arity = match index.entity(name)? {
                Entity::Fun(f) => f.arity(),
                Entity::Const(_) => 0,
                Entity::Ctor { data, index } => data.ctors[index].fields.len(),
                Entity::Builtin(b) => builtins::const_arity(b)?,
                Entity::Method { .. } => return None,
            };
            Some((name.clone(), arity))
        }
        Term::Method { class, method, .. } => {
            let record = index.data(class)?.record.as_ref()?;
            let k = record.iter().find(|f| f.label == *method)?.call_arity?;
            Some((method.clone(), k))
        }
        _ => None,
    }
}

/// How an application spine relates to the arity of its head; `None` when
/// the head is not a named callable.
pub fn classify_application(index: &ProgramIndex<'_>, t: &Term) -> Option<SaturationReport> {
    let (head, args) = t.spine();
    let (name, arity) = head_arity(index, head)?;
    let n = args.len();
    let saturation = match n.cmp(&arity) {
        std::cmp::Ordering::Equal => Saturation::Exact,
        std::cmp::Ordering::Less => Saturation::Under(arity - n),
        std::cmp::Ordering::Greater => Saturation::Over(n - arity),
    };
    Some(SaturationReport {
        head: name,
        arity,
        supplied: n,
        saturation,
    })
}

/// Rewrites `f x = case x of p1 => b1 | ...` into one equation per clause
/// when that is a pure renaming.
fn normalize_case_form(eqs: &[Equation]) -> Cow<'_, [Equation]> {
    let [eq] = eqs else {
        return Cow::Borrowed(eqs);
    };
    let mut params = Vec::new();
    for p in &eq.params {
        match p {
            Pattern::Var { name } => params.push(name),
            _ => return Cow::Borrowed(eqs),
        }
    }
    let Term::Case {
        scrutinee, clauses, ..
    } = &eq.rhs
    else {
        return Cow::Borrowed(eqs);
    };
    let Term::Var { name: s } = &**scrutinee else {
        return Cow::Borrowed(eqs);
    };
    let Some(j) = params.iter().position(|p| *p == s) else {
        return Cow::Borrowed(eqs);
    };
    for Clause { pattern, body } in clauses {
        let bound = pattern.vars();
        if body.mentions_free(s) && !bound.contains(&s) {
            return Cow::Borrowed(eqs);
        }
        if bound
            .iter()
            .any(|v| params.iter().enumerate().any(|(i, p)| i != j && p == v))
        {
            return Cow::Borrowed(eqs);
        }
    }
    Cow::Owned(
        clauses
            .iter()
            .map(|c| {
                let mut ps = eq.params.clone();
                ps[j] = c.pattern.clone();
                Equation {
                    params: ps,
                    rhs: c.body.clone(),
                }
            })
            .collect(),
    )
}

fn expr_mentions(e: &GoExpr, name: &str) -> bool {
    match e {
        GoExpr::Var(n) => n == name,
        GoExpr::Call { args, .. } => args.iter().any(|a| expr_mentions(a, name)),
        GoExpr::StructLit { fields, .. } => fields.iter().any(|a| expr_mentions(a, name)),
        GoExpr::FuncLit { body, .. } => stmt_mentions(body, name),
        GoExpr::Field { target, .. } | GoExpr::Conv { inner: target, .. } => {
            expr_mentions(target, name)
        }
        GoExpr::Nil => false,
        GoExpr::CallExpr { target, args } => {
            expr_mentions(target, name) || args.iter().any(|a| expr_mentions(a, name))
        }
        GoExpr::Eq(a, b) | GoExpr::And(a, b) => expr_mentions(a, name) || expr_mentions(b, name),
        GoExpr::Prim(p) => p.args.iter().any(|a| expr_mentions(a, name)),
    }
}

/// Whether a statement reads `name`.
fn stmt_mentions(s: &Stmt, name: &str) -> bool {
    match s {
        Stmt::Return(es) => es.iter().any(|e| expr_mentions(e, name)),
        Stmt::Define { value, rest, .. } => expr_mentions(value, name) || stmt_mentions(rest, name),
        Stmt::Assert { target, rest, .. } => {
            expr_mentions(target, name) || stmt_mentions(rest, name)
        }
        Stmt::If { cond, then, rest } => {
            expr_mentions(cond, name) || stmt_mentions(then, name) || stmt_mentions(rest, name)
        }
        Stmt::Block { inner, rest } => stmt_mentions(inner, name) || stmt_mentions(rest, name),
        Stmt::Panic(_) | Stmt::Done => false,
    }
}

fn type_err(e: TypeError) -> CodegenError {
    CodegenError::Type(e.0)
}

/// A translated argument. Trivial arguments have no effects, so they may be
/// moved under a function literal.
struct Arg {
    expr: GoExpr,
    trivial: bool,
}

/// One pending test: match the Go variable `scrut` against `pat`.
struct Item<'t> {
    scrut: Name,
    pat: &'t Pattern,
    ty: Type,
    /// For function parameters: the source variable the parameter is named
    /// after.
    origin: Option<Name>,
}

struct Row<'t> {
    items: Vec<Item<'t>>,
    body: &'t Term,
}

struct RowState<'t> {
    body: &'t Term,
    free: BTreeSet<Name>,
    /// `name := param` bindings placed just before the body.
    defines: Vec<(Name, Name)>,
}

/// Translation state for one Go function.
pub(crate) struct FnCx<'c, 'a> {
    cg: &'c Codegen<'a>,
    tparams: Vec<(Name, Name)>,
    locals: Locals,
    vars: Vec<(Name, GoExpr)>,
    tyenv: TypeEnv,
    q: Name,
    m: Name,
}

impl<'c, 'a> FnCx<'c, 'a> {
    pub fn new(cg: &'c Codegen<'a>, tparams: Vec<(Name, Name)>) -> Self {
        let mut reserved = cg.globals.clone();
        reserved.extend(tparams.iter().map(|(_, go)| go.clone()));
        let mut locals = Locals::new(reserved);
        let q = locals.fresh("q");
        let m = locals.fresh("m");
        FnCx {
            cg,
            tparams,
            locals,
            vars: Vec::new(),
            tyenv: TypeEnv::new(),
            q,
            m,
        }
    }

    pub fn ty(&self, t: &Type) -> Result<GoType, CodegenError> {
        self.cg.go_type(t, &self.tparams)
    }

    fn tys(&self, ts: &[Type]) -> Result<Vec<GoType>, CodegenError> {
        ts.iter().map(|t| self.ty(t)).collect()
    }

    pub fn type_of(&mut self, t: &Term) -> Result<Type, CodegenError> {
        typing::type_of(&self.cg.index, &mut self.tyenv, t).map_err(type_err)
    }

    fn bind(&mut self, ir: &str, go: GoExpr, ty: Type) {
        self.vars.push((ir.to_string(), go));
        self.tyenv.push(ir.to_string(), ty);
    }

    fn mark(&self) -> (usize, usize) {
        (self.vars.len(), self.tyenv.len())
    }

    fn reset(&mut self, (v, t): (usize, usize)) {
        self.vars.truncate(v);
        self.tyenv.truncate(t);
    }

    fn lookup(&self, ir: &str) -> Result<GoExpr, CodegenError> {
        if let Some((_, e)) = self.vars.iter().rev().find(|(n, _)| n == ir) {
            return Ok(e.clone());
        }
        if ir.starts_with(NIL_PREFIX) {
            return Ok(GoExpr::Nil);
        }
        Err(CodegenError::Type(format!("unbound variable `{ir}`")))
    }

    /// Parameters, result types and body of a function.
    pub fn function(
        &mut self,
        f: &FunDecl,
    ) -> Result<(Vec<(Name, GoType)>, Vec<GoType>, Stmt), CodegenError> {
        let mut params = Vec::new();
        for dp in &f.dict_params {
            let g = self.locals.fresh(&dp.name);
            let ty = Type::con(dp.class.clone(), vec![Type::var(dp.var.clone())]);
            params.push((g.clone(), self.ty(&ty)?));
            self.bind(&dp.name, GoExpr::Var(g), ty);
        }
        let eqs = normalize_case_form(&f.equations);
        let Some(first) = eqs.first() else {
            return Err(CodegenError::Type(format!("`{}` has no equations", f.name)));
        };
        let arity = first.params.len();
        let (arg_tys, res) = f.signature.split_arrows(arity).ok_or_else(|| {
            CodegenError::Type(format!("`{}` takes more arguments than its type allows", f.name))
        })?;
        let mut named = Vec::new();
        for (i, (p, t)) in first.params.iter().zip(&arg_tys).enumerate() {
            let (g, origin) = match p {
                Pattern::Var { name } => (self.locals.fresh(name), Some(name.clone())),
                _ => (self.locals.fresh(&format!("x{i}")), None),
            };
            params.push((g.clone(), self.ty(t)?));
            named.push((g, origin));
        }
        let results = vec![self.ty(&res)?];
        let irrefutable = first
            .params
            .iter()
            .all(|p| matches!(p, Pattern::Var { .. }));
        let body = if irrefutable {
            for ((g, origin), t) in named.iter().zip(&arg_tys) {
                let origin = origin.as_ref().expect("variable pattern");
                self.bind(origin, GoExpr::var(g.clone()), t.clone());
            }
            self.stmt(&first.rhs)?
        } else {
            let rows = eqs
                .iter()
                .map(|eq| Row {
                    items: eq
                        .params
                        .iter()
                        .zip(&named)
                        .zip(&arg_tys)
                        .map(|((pat, (g, origin)), t)| Item {
                            scrut: g.clone(),
                            pat,
                            ty: t.clone(),
                            origin: origin.clone(),
                        })
                        .collect(),
                    body: &eq.rhs,
                })
                .collect();
            self.match_rows(rows)?
        };
        Ok((params, results, body))
    }

    /// Statement returning the value of `t`. Case expressions in tail
    /// position are lowered in place.
    pub fn stmt(&mut self, t: &Term) -> Result<Stmt, CodegenError> {
        match t {
            Term::Case {
                scrutinee,
                ty,
                clauses,
            } => self.case_stmt(scrutinee, ty, clauses),
            _ => Ok(Stmt::ret(self.expr(t)?)),
        }
    }

    pub fn expr(&mut self, t: &Term) -> Result<GoExpr, CodegenError> {
        match t {
            Term::Var { name } => self.lookup(name),
            Term::Lit { lit } => self.literal(lit),
            Term::Abs { binder, ty, body } => {
                self.locals.push();
                let mark = self.mark();
                let g = self.locals.fresh(binder);
                let pty = self.ty(ty)?;
                self.bind(binder, GoExpr::var(g.clone()), ty.clone());
                let bty = self.type_of(body)?;
                let rty = self.ty(&bty)?;
                let s = self.stmt(body)?;
                self.reset(mark);
                self.locals.pop();
                Ok(GoExpr::func_lit(vec![(g, pty)], vec![rty], s))
            }
            Term::Case { .. } => {
                let ty = self.type_of(t)?;
                let ty = self.ty(&ty)?;
                self.locals.push();
                let s = self.stmt(t)?;
                self.locals.pop();
                Ok(GoExpr::call_expr(GoExpr::func_lit(vec![], vec![ty], s), vec![]))
            }
            Term::DictLit {
                class,
                ty,
                supers,
                methods,
            } => self.dict_lit(class, ty, supers, methods),
            Term::Ref { .. } | Term::App { .. } | Term::Method { .. } => {
                let (head, args) = t.spine();
                let args = self.args(&args)?;
                self.apply(head, args)
            }
        }
    }

    fn args(&mut self, args: &[&Term]) -> Result<Vec<Arg>, CodegenError> {
        args.iter()
            .map(|a| {
                Ok(Arg {
                    trivial: self.is_trivial(a),
                    expr: self.expr(a)?,
                })
            })
            .collect()
    }

    fn is_trivial(&self, t: &Term) -> bool {
        match t {
            Term::Var { .. } | Term::Lit { .. } | Term::Abs { .. } => true,
            Term::Ref { name, .. } => matches!(
                self.cg.index.entity(name),
                Some(Entity::Ctor { data, index }) if data.ctors[index].fields.is_empty()
            ),
            _ => false,
        }
    }

    fn literal(&self, lit: &Literal) -> Result<GoExpr, CodegenError> {
        let base = match lit {
            Literal::Int(_) => INT,
            Literal::Str(_) => STRING,
        };
        let Some(rule) = self.cg.active.types.get(base) else {
            return Err(CodegenError::Adaptation(format!(
                "no representation for `{base}` literals"
            )));
        };
        self.cg.use_imports(&rule.imports);
        let (template, value) = match lit {
            Literal::Int(n) => {
                let small = i64::try_from(n).is_ok();
                let template = match &rule.literal {
                    Some(l) if small || rule.go != "*big.Int" => l.replace("%v", &n.to_string()),
                    _ if rule.go == "*big.Int" => format!(
                        "func () *big.Int {{ n, _ := new(big.Int).SetString({}, 10); return n; }}()",
                        quote(&n.to_string())
                    ),
                    _ => n.to_string(),
                };
                (template, BaseValue::Int(n.clone()))
            }
            Literal::Str(s) => (quote(s), BaseValue::Str(s.clone())),
        };
        Ok(GoExpr::Prim(Box::new(Prim {
            template,
            op: PrimOp::Value(value),
            args: vec![],
            arg_types: vec![],
            result: GoType::Opaque(rule.go.clone()),
        })))
    }

    fn dict_expr(&mut self, path: &InstancePath) -> Result<GoExpr, CodegenError> {
        let mut e = match &path.root {
            DictRoot::Param { name } => self.lookup(name)?,
            DictRoot::Instance {
                name,
                type_args,
                args,
            } => {
                let args = args
                    .iter()
                    .map(|a| self.dict_expr(a))
                    .collect::<Result<Vec<_>, _>>()?;
                GoExpr::call(self.cg.go_name(name)?.clone(), self.tys(type_args)?, args)
            }
        };
        for p in &path.projections {
            e = GoExpr::field(e, exported(&p.field));
        }
        Ok(e)
    }

    fn dict_lit(
        &mut self,
        class: &str,
        ty: &Type,
        supers: &[InstancePath],
        methods: &[Term],
    ) -> Result<GoExpr, CodegenError> {
        let index = &self.cg.index;
        let data = index
            .data(class)
            .ok_or_else(|| CodegenError::Type(format!("no dictionary type `{class}`")))?;
        let record = data
            .record
            .as_ref()
            .ok_or_else(|| CodegenError::Type(format!("`{class}` is not a dictionary type")))?;
        let dict_ty = self.ty(&Type::con(class.to_string(), vec![ty.clone()]))?;
        let mut fields = supers
            .iter()
            .map(|s| self.dict_expr(s))
            .collect::<Result<Vec<_>, _>>()?;
        let slots = record
            .iter()
            .zip(&data.ctors[0].fields)
            .filter_map(|(f, t)| f.call_arity.map(|k| (k, t)));
        for ((k, fty), m) in slots.zip(methods) {
            let fty = fty.subst(&[(data.ty_params[0].clone(), ty.clone())]);
            let (arg_tys, res) = fty
                .split_arrows(k)
                .ok_or_else(|| CodegenError::Type(format!("bad method type `{fty}`")))?;
            self.locals.push();
            let mut ps = Vec::new();
            for (j, t) in arg_tys.iter().enumerate() {
                ps.push((self.locals.fresh(&suffix(j)), self.ty(t)?));
            }
            let (head, margs) = m.spine();
            let mut args = self.args(&margs)?;
            args.extend(ps.iter().map(|(g, _)| Arg {
                expr: GoExpr::var(g.clone()),
                trivial: true,
            }));
            let e = self.apply(head, args)?;
            self.locals.pop();
            fields.push(GoExpr::func_lit(ps, vec![self.ty(&res)?], Stmt::ret(e)));
        }
        Ok(GoExpr::StructLit {
            ty: dict_ty,
            fields,
        })
    }

    /// Constructor value, converted to its interface for sum types.
    fn ctor_value(
        &self,
        ctor: &str,
        targs: Vec<GoType>,
    ) -> Result<impl Fn(Vec<GoExpr>) -> GoExpr, CodegenError> {
        let (data, _) = self
            .cg
            .index
            .ctor(ctor)
            .ok_or_else(|| CodegenError::Type(format!("unknown constructor `{ctor}`")))?;
        let s = GoType::Struct(self.cg.names.ctors[ctor].clone(), targs.clone());
        let iface = is_multi(data)
            .then(|| GoType::Iface(self.cg.names.types[&data.name].clone(), targs));
        Ok(move |fields: Vec<GoExpr>| {
            let lit = GoExpr::StructLit {
                ty: s.clone(),
                fields,
            };
            match &iface {
                Some(i) => GoExpr::conv(i.clone(), lit),
                None => lit,
            }
        })
    }

    fn adapted_ctor(&self, ctor: &str) -> Option<GoExpr> {
        let rule = self.cg.active.consts.get(ctor)?;
        self.cg.index.ctor(ctor)?;
        self.cg.use_imports(&rule.imports);
        let result = self.ty(&Type::base(builtins::BOOL)).ok()?;
        Some(GoExpr::Prim(Box::new(Prim {
            template: rule.template.clone(),
            op: PrimOp::Value(BaseValue::Bool(ctor == TRUE)),
            args: vec![],
            arg_types: vec![],
            result,
        })))
    }

    fn apply(&mut self, head: &Term, args: Vec<Arg>) -> Result<GoExpr, CodegenError> {
        let arity = head_arity(&self.cg.index, head).map(|(_, a)| a);
        match head {
            Term::Ref {
                name,
                type_args,
                dicts,
            } => {
                let index = &self.cg.index;
                let entity = index
                    .entity(name)
                    .ok_or_else(|| CodegenError::Type(format!("unknown name `{name}`")))?;
                let head_ty = index
                    .ref_type(name, type_args)
                    .ok_or_else(|| CodegenError::Type(format!("bad reference `{name}`")))?;
                let arity = arity.ok_or_else(|| {
                    CodegenError::Unsupported(format!("unelaborated method `{name}`"))
                })?;
                match entity {
                    Entity::Fun(_) | Entity::Const(_) => {
                        let go = self.cg.go_name(name)?.clone();
                        let targs = self.tys(type_args)?;
                        let ds = dicts
                            .iter()
                            .map(|d| self.dict_expr(d))
                            .collect::<Result<Vec<_>, _>>()?;
                        self.saturate(&head_ty, arity, args, &|all| {
                            GoExpr::call(
                                go.clone(),
                                targs.clone(),
                                ds.iter().cloned().chain(all).collect(),
                            )
                        })
                    }
                    Entity::Ctor { .. } => {
                        if let Some(e) = self.adapted_ctor(name) {
                            return self.saturate(&head_ty, 0, args, &|_| e.clone());
                        }
                        let build = self.ctor_value(name, self.tys(type_args)?)?;
                        self.saturate(&head_ty, arity, args, &build)
                    }
                    Entity::Builtin(b) => {
                        let rule = self.cg.active.consts.get(b).ok_or_else(|| {
                            CodegenError::Adaptation(format!("no printing rule for `{b}`"))
                        })?;
                        self.cg.use_imports(&rule.imports);
                        let (arg_tys, res) = head_ty.split_arrows(arity).expect("builtin arity");
                        let arg_types = self.tys(&arg_tys)?;
                        let result = self.ty(&res)?;
                        let template = rule.template.clone();
                        self.saturate(&head_ty, arity, args, &|all| {
                            GoExpr::Prim(Box::new(Prim {
                                template: template.clone(),
                                op: PrimOp::Builtin(b.to_string()),
                                args: all,
                                arg_types: arg_types.clone(),
                                result: result.clone(),
                            }))
                        })
                    }
                    Entity::Method { .. } => unreachable!("no arity"),
                }
            }
            Term::Method { dict, method, .. } => {
                let k = arity.ok_or_else(|| {
                    CodegenError::Type(format!("no dictionary field for method `{method}`"))
                })?;
                let head_ty = self.type_of(head)?;
                let target = GoExpr::field(self.dict_expr(dict)?, exported(method));
                self.saturate(&head_ty, k, args, &|all| {
                    GoExpr::call_expr(target.clone(), all)
                })
            }
            _ => {
                let mut f = self.expr(head)?;
                for a in args {
                    f = GoExpr::call_expr(f, vec![a.expr]);
                }
                Ok(f)
            }
        }
    }

    /// Calls `build` with exactly `m` arguments: extra ones are applied to
    /// the result one at a time, missing ones are η-expanded.
    fn saturate(
        &mut self,
        head_ty: &Type,
        m: usize,
        args: Vec<Arg>,
        build: &dyn Fn(Vec<GoExpr>) -> GoExpr,
    ) -> Result<GoExpr, CodegenError> {
        let n = args.len();
        if n >= m {
            let mut it = args.into_iter();
            let mut e = build(it.by_ref().take(m).map(|a| a.expr).collect());
            for a in it {
                e = GoExpr::call_expr(e, vec![a.expr]);
            }
            return Ok(e);
        }
        let (arg_tys, res) = head_ty
            .split_arrows(m)
            .ok_or_else(|| CodegenError::Type(format!("`{head_ty}` takes fewer than {m} arguments")))?;
        self.locals.push();
        // Arguments with effects are evaluated now, not when the expansion
        // is finally called.
        let mut outer = Vec::new();
        let mut outer_args = Vec::new();
        let mut all = Vec::new();
        for (a, t) in args.into_iter().zip(&arg_tys) {
            if a.trivial {
                all.push(a.expr);
            } else {
                let v = self.locals.fresh("v");
                outer.push((v.clone(), self.ty(t)?));
                outer_args.push(a.expr);
                all.push(GoExpr::var(v));
            }
        }
        let mut ps = Vec::new();
        for (j, t) in arg_tys[n..].iter().enumerate() {
            ps.push((self.locals.fresh(&suffix(j)), self.ty(t)?));
        }
        self.locals.pop();
        all.extend(ps.iter().map(|(g, _)| GoExpr::var(g.clone())));
        let mut e = build(all);
        let mut rty = self.ty(&res)?;
        for p in ps.into_iter().rev() {
            let pty = p.1.clone();
            e = GoExpr::func_lit(vec![p], vec![rty.clone()], Stmt::ret(e));
            rty = GoType::Func(vec![pty], vec![rty]);
        }
        if !outer.is_empty() {
            e = GoExpr::call_expr(GoExpr::func_lit(outer, vec![rty], Stmt::ret(e)), outer_args);
        }
        Ok(e)
    }

    fn case_stmt(
        &mut self,
        scrutinee: &Term,
        ty: &Type,
        clauses: &[Clause],
    ) -> Result<Stmt, CodegenError> {
        let direct = match scrutinee {
            Term::Var { name } => match self.lookup(name)? {
                GoExpr::Var(g) => Some(g),
                _ => None,
            },
            _ => None,
        };
        let (s, define) = match direct {
            Some(g) => (g, None),
            None => {
                let e = self.expr(scrutinee)?;
                (self.locals.fresh("s"), Some(e))
            }
        };
        let rows = clauses
            .iter()
            .map(|c| Row {
                items: vec![Item {
                    scrut: s.clone(),
                    pat: &c.pattern,
                    ty: ty.clone(),
                    origin: None,
                }],
                body: &c.body,
            })
            .collect();
        let body = self.match_rows(rows)?;
        Ok(match define {
            None => body,
            Some(e) => {
                let lhs = if stmt_mentions(&body, &s) { s } else { BLANK.into() };
                Stmt::define(vec![lhs], e, body)
            }
        })
    }

    /// One block per row, tried in order, then a panic.
    fn match_rows(&mut self, rows: Vec<Row<'_>>) -> Result<Stmt, CodegenError> {
        let mut lowered = Vec::new();
        for row in rows {
            self.locals.push();
            let mark = self.mark();
            let mut st = RowState {
                body: row.body,
                free: row.body.free_vars(),
                defines: Vec::new(),
            };
            let s = self.level(row.items, Vec::new(), &mut st)?;
            self.reset(mark);
            self.locals.pop();
            lowered.push(s);
        }
        Ok(lowered
            .into_iter()
            .rev()
            .fold(Stmt::Panic(MATCH_FAILED.into()), |acc, r| Stmt::block(r, acc)))
    }

    /// Tests for one destructuring level: nullary constructor tests are
    /// conjoined into one `if`, then the constructors with fields are taken
    /// apart depth first, ahead of the `pending` siblings.
    fn level<'t>(
        &mut self,
        items: Vec<Item<'t>>,
        pending: Vec<Item<'t>>,
        st: &mut RowState<'_>,
    ) -> Result<Stmt, CodegenError> {
        let mut conds = Vec::new();
        let mut deferred = Vec::new();
        for it in items {
            match it.pat {
                Pattern::Var { name } => {
                    if !st.free.contains(name) {
                        continue;
                    }
                    if it.origin.as_ref() == Some(name) {
                        self.bind(name, GoExpr::var(it.scrut.clone()), it.ty.clone());
                    } else {
                        let g = self.locals.fresh(name);
                        self.bind(name, GoExpr::var(g.clone()), it.ty.clone());
                        st.defines.push((g, it.scrut.clone()));
                    }
                }
                Pattern::Con {
                    ctor,
                    type_args,
                    args,
                } => {
                    if let Some(value) = self.adapted_ctor(ctor) {
                        if !args.is_empty() {
                            return Err(CodegenError::Unsupported(format!(
                                "pattern on adapted constructor `{ctor}`"
                            )));
                        }
                        conds.push(GoExpr::eq(GoExpr::var(it.scrut.clone()), value));
                        continue;
                    }
                    let (data, _) = self.cg.index.ctor(ctor).ok_or_else(|| {
                        CodegenError::Type(format!("unknown constructor `{ctor}`"))
                    })?;
                    if !args.is_empty() {
                        deferred.push(it);
                    } else if is_multi(data) {
                        let value = self.ctor_value(ctor, self.tys(type_args)?)?(vec![]);
                        conds.push(GoExpr::eq(GoExpr::var(it.scrut.clone()), value));
                    }
                }
            }
        }
        deferred.extend(pending);
        let inner = self.step(deferred, st)?;
        Ok(match GoExpr::conj(conds) {
            Some(c) => Stmt::if_then(c, inner, Stmt::Done),
            None => inner,
        })
    }

    fn step<'t>(
        &mut self,
        mut pending: Vec<Item<'t>>,
        st: &mut RowState<'_>,
    ) -> Result<Stmt, CodegenError> {
        if pending.is_empty() {
            // A variable free in the source body may still go unread in Go,
            // e.g. the scrutinee of a case whose clause is a bare variable.
            let body = self.stmt(st.body)?;
            return Ok(st.defines.iter().rev().fold(body, |acc, (g, src)| {
                if stmt_mentions(&acc, g) {
                    Stmt::define(vec![g.clone()], GoExpr::var(src.clone()), acc)
                } else {
                    acc
                }
            }));
        }
        let it = pending.remove(0);
        let Pattern::Con {
            ctor,
            type_args,
            args,
        } = it.pat
        else {
            unreachable!("only constructor patterns are deferred")
        };
        let index = &self.cg.index;
        let (data, _) = index.ctor(ctor).expect("checked by level");
        let ftys = index
            .ctor_fields(ctor, type_args)
            .ok_or_else(|| CodegenError::Type(format!("bad pattern `{ctor}`")))?;
        let mut lhs = Vec::new();
        let mut subs = Vec::new();
        for (sub, fty) in args.iter().zip(ftys) {
            match sub {
                Pattern::Var { name } => {
                    if st.free.contains(name) {
                        let g = self.locals.fresh(name);
                        self.bind(name, GoExpr::var(g.clone()), fty);
                        lhs.push(g);
                    } else {
                        lhs.push(BLANK.to_string());
                    }
                }
                Pattern::Con {
                    ctor: c, args: a, ..
                } => {
                    let tested = !a.is_empty()
                        || self.cg.active.consts.contains_key(c)
                        || self.cg.index.ctor(c).is_some_and(|(d, _)| is_multi(d));
                    if !tested {
                        lhs.push(BLANK.to_string());
                        continue;
                    }
                    let g = if a.is_empty() {
                        self.locals.fresh_letter(EQ_TEMPS)
                    } else {
                        self.locals.fresh("p")
                    };
                    lhs.push(g.clone());
                    subs.push(Item {
                        scrut: g,
                        pat: sub,
                        ty: fty,
                        origin: None,
                    });
                }
            }
        }
        let inner = self.level(subs, pending, st)?;
        for n in &mut lhs {
            if n != BLANK && !stmt_mentions(&inner, n) {
                *n = BLANK.into();
            }
        }
        let blank = lhs.iter().all(|n| n == BLANK);
        let multi = is_multi(data);
        let source = if multi { &self.q } else { &it.scrut };
        let dest = if blank {
            inner
        } else {
            let dest = self.cg.names.destructors[ctor].clone();
            Stmt::define(lhs, GoExpr::call(dest, vec![], vec![GoExpr::var(source.clone())]), inner)
        };
        if !multi {
            return Ok(dest);
        }
        Ok(Stmt::Assert {
            value: if blank { BLANK.into() } else { self.q.clone() },
            ok: self.m.clone(),
            target: GoExpr::var(it.scrut),
            ty: GoType::Struct(self.cg.names.ctors[ctor].clone(), self.tys(type_args)?),
            rest: Box::new(Stmt::if_then(GoExpr::var(self.m.clone()), dest, Stmt::Done)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_form_becomes_equations() {
        let nil = Pattern::con("Nil", vec![], vec![]);
        let eq = Equation {
            params: vec![Pattern::var("xs")],
            rhs: Term::case(
                Term::var("xs"),
                Type::base("l"),
                vec![
                    (nil.clone(), Term::reference("None", vec![])),
                    (Pattern::var("ys"), Term::var("ys")),
                ],
            ),
        };
        let eqs = [eq];
        let out = normalize_case_form(&eqs);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].params, vec![nil]);
    }

    #[test]
    fn scrutinee_used_in_a_body_blocks_normalization() {
        let eq = Equation {
            params: vec![Pattern::var("xs")],
            rhs: Term::case(
                Term::var("xs"),
                Type::base("l"),
                vec![(Pattern::var("ys"), Term::var("xs"))],
            ),
        };
        let eqs = [eq];
        assert!(matches!(normalize_case_form(&eqs), Cow::Borrowed(_)));
    }
}
