//! Big-step evaluator for the fragment. Values carry enough runtime type
//! information for type assertions: interface values remember the dynamic
//! type of what they wrap, and generic functions run with their type
//! parameters bound to ground types.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use thiserror::Error;

use super::{FuncDecl, GoDecl, GoExpr, GoProgram, GoType, PrimOp, Stmt, TypeBody, BLANK};
use crate::ir::builtins::{self, BaseValue};
use crate::ir::Name;

/// Generated code takes several fragment steps per source-level step, so the
/// default budget is larger than the source interpreter's.
pub const DEFAULT_GO_FUEL: u64 = 20_000_000;

/// Nested (non-tail) calls allowed before evaluation stops as out of fuel.
/// Bounds native memory the way fuel bounds time.
pub const MAX_CALL_DEPTH: usize = 100_000;

#[derive(Clone, Debug)]
pub enum GValue {
    Struct {
        ty: GoType,
        fields: Vec<GValue>,
    },
    /// An interface value. `inner` is never itself an interface value.
    Iface {
        dyn_ty: GoType,
        inner: Rc<GValue>,
    },
    Closure(Rc<GClosure>),
    Nil,
    Bool(bool),
    Int(BigInt),
    Str(String),
    /// The results of a call with several return values.
    Multi(Vec<GValue>),
}

#[derive(Debug)]
pub struct GClosure {
    pub params: Vec<Name>,
    pub body: Stmt,
    pub env: GEnv,
    pub types: TypeEnv,
    /// The closure's (ground) function type, its dynamic type when boxed.
    pub ty: GoType,
}

type TypeEnv = Rc<Vec<(Name, GoType)>>;

impl GValue {
    pub fn iface(dyn_ty: GoType, inner: GValue) -> GValue {
        GValue::Iface {
            dyn_ty,
            inner: Rc::new(inner),
        }
    }

    pub fn strukt(ty: GoType, fields: Vec<GValue>) -> GValue {
        GValue::Struct { ty, fields }
    }

    /// Dynamic type recorded when the value is converted to an interface.
    fn dynamic_type(&self) -> Option<GoType> {
        match self {
            GValue::Struct { ty, .. } => Some(ty.clone()),
            GValue::Bool(_) => Some(GoType::bool()),
            GValue::Int(_) => Some(GoType::Opaque("*big.Int".into())),
            GValue::Str(_) => Some(GoType::Opaque("string".into())),
            GValue::Closure(c) => Some(c.ty.clone()),
            GValue::Iface { dyn_ty, .. } => Some(dyn_ty.clone()),
            GValue::Nil | GValue::Multi(_) => None,
        }
    }
}

impl fmt::Display for GValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GValue::Struct { ty, fields } => {
                write!(f, "{}{{", super::render::go_type(ty))?;
                for (i, v) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
            GValue::Iface { inner, .. } => write!(f, "{inner}"),
            GValue::Closure(_) => write!(f, "<func>"),
            GValue::Nil => write!(f, "nil"),
            GValue::Bool(b) => write!(f, "{b}"),
            GValue::Int(n) => write!(f, "{n}"),
            GValue::Str(s) => write!(f, "{}", super::render::quote(s)),
            GValue::Multi(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GFailure {
    #[error("panic: {0}")]
    Panic(String),
    #[error("out of fuel")]
    OutOfFuel,
    #[error("nil dereference")]
    NilDereference,
    /// Only reachable on programs that fail `check_wf`.
    #[error("evaluation stuck: {0}")]
    Stuck(String),
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, GFailure> {
    Err(GFailure::Stuck(msg.into()))
}

/// Go's `==` on values of identical static type.
pub fn go_eq(a: &GValue, b: &GValue) -> Result<bool, GFailure> {
    use GValue::*;
    Ok(match (a, b) {
        (
            Iface {
                dyn_ty: t1,
                inner: x,
            },
            Iface {
                dyn_ty: t2,
                inner: y,
            },
        ) => t1 == t2 && go_eq(x, y)?,
        (Nil, Nil) => true,
        (Nil, Iface { .. } | Closure(_)) | (Iface { .. } | Closure(_), Nil) => false,
        (Struct { ty: t1, fields: xs }, Struct { ty: t2, fields: ys }) => {
            if t1 != t2 || xs.len() != ys.len() {
                false
            } else {
                let mut all = true;
                for (x, y) in xs.iter().zip(ys) {
                    all &= go_eq(x, y)?;
                }
                all
            }
        }
        (Bool(x), Bool(y)) => x == y,
        // Pointer identity is not modelled; generated code compares big
        // integers with `Cmp`.
        (Int(x), Int(y)) => x == y,
        (Str(x), Str(y)) => x == y,
        (Closure(_), Closure(_)) => return stuck("comparing uncomparable func values"),
        _ => return stuck(format!("comparing {a} with {b}")),
    })
}

/// Lexical environment as a persistent list.
#[derive(Clone, Debug, Default)]
pub struct GEnv(Option<Rc<Frame>>);

#[derive(Debug)]
struct Frame {
    name: Name,
    value: GValue,
    next: GEnv,
}

impl GEnv {
    pub fn new() -> GEnv {
        GEnv(None)
    }

    pub fn bind(&self, name: Name, value: GValue) -> GEnv {
        if name == BLANK {
            return self.clone();
        }
        GEnv(Some(Rc::new(Frame {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&GValue> {
        let mut cur = self;
        while let Some(frame) = &cur.0 {
            if frame.name == name {
                return Some(&frame.value);
            }
            cur = &frame.next;
        }
        None
    }
}

enum Flow {
    Return(GValue),
    /// `return f(args)`: the caller enters `f` in its own loop, so tail
    /// recursion runs in constant native stack.
    TailCall(Name, Vec<GoType>, Vec<GValue>),
    TailApply(GValue, Vec<GValue>),
    Next,
}

/// An evaluator bound to one program with a fuel budget.
pub struct Machine<'a> {
    funcs: HashMap<&'a str, &'a FuncDecl>,
    fields: HashMap<&'a str, Vec<&'a str>>,
    fuel: u64,
    depth: usize,
}

impl<'a> Machine<'a> {
    pub fn new(prog: &'a GoProgram, fuel: u64) -> Self {
        let mut funcs = HashMap::new();
        let mut fields = HashMap::new();
        for d in &prog.decls {
            match d {
                GoDecl::Func(f) => {
                    funcs.insert(f.name.as_str(), f);
                }
                GoDecl::Type(t) => {
                    if let TypeBody::Struct(fs) = &t.body {
                        fields.insert(
                            t.name.as_str(),
                            fs.iter().map(|(n, _)| n.as_str()).collect(),
                        );
                    }
                }
            }
        }
        Machine {
            funcs,
            fields,
            fuel,
            depth: 0,
        }
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> Result<(), GFailure> {
        if self.fuel == 0 {
            return Err(GFailure::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// Calls a top-level function with ground type arguments.
    pub fn call(
        &mut self,
        name: &str,
        type_args: Vec<GoType>,
        args: Vec<GValue>,
    ) -> Result<GValue, GFailure> {
        self.nested(|m| {
            let flow = m.enter(name, type_args, args)?;
            m.finish(flow)
        })
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, GFailure>) -> Result<T, GFailure> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(GFailure::OutOfFuel);
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn finish(&mut self, mut flow: Flow) -> Result<GValue, GFailure> {
        loop {
            flow = match flow {
                Flow::Return(v) => return Ok(v),
                Flow::TailCall(name, type_args, args) => self.enter(&name, type_args, args)?,
                Flow::TailApply(f, args) => self.enter_closure(f, args)?,
                Flow::Next => return stuck("function body fell off its end"),
            };
        }
    }

    fn enter(&mut self, name: &str, type_args: Vec<GoType>, args: Vec<GValue>) -> Result<Flow, GFailure> {
        let Some(f) = self.funcs.get(name).copied() else {
            return stuck(format!("undefined function {name}"));
        };
        if args.len() != f.params.len() {
            return stuck(format!("{name} called with {} arguments", args.len()));
        }
        let types = if type_args.is_empty() && !f.type_params.is_empty() {
            let mut map = Vec::new();
            for ((_, p), a) in f.params.iter().zip(&args) {
                if let Some(t) = a.dynamic_type() {
                    infer(p, &t, &f.type_params, &mut map);
                }
            }
            map
        } else {
            f.type_params.iter().cloned().zip(type_args).collect()
        };
        let mut env = GEnv::new();
        for ((p, _), a) in f.params.iter().zip(args) {
            env = env.bind(p.clone(), a);
        }
        self.exec(&f.body, &env, &Rc::new(types))
    }

    pub fn eval(&mut self, e: &GoExpr, env: &GEnv) -> Result<GValue, GFailure> {
        self.expr(e, env, &Rc::new(Vec::new()))
    }

    fn expr(&mut self, e: &GoExpr, env: &GEnv, types: &TypeEnv) -> Result<GValue, GFailure> {
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || self.expr_inner(e, env, types))
    }

    fn exprs(
        &mut self,
        es: &[GoExpr],
        env: &GEnv,
        types: &TypeEnv,
    ) -> Result<Vec<GValue>, GFailure> {
        es.iter().map(|e| self.expr(e, env, types)).collect()
    }

    fn expr_inner(&mut self, e: &GoExpr, env: &GEnv, types: &TypeEnv) -> Result<GValue, GFailure> {
        self.tick()?;
        match e {
            GoExpr::Var(n) => match env.lookup(n) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("unbound variable {n}")),
            },
            GoExpr::Call {
                func,
                type_args,
                args,
            } => {
                let targs = type_args
                    .iter()
                    .map(|t| ground(t, types))
                    .collect::<Result<Vec<_>, _>>()?;
                let args = self.exprs(args, env, types)?;
                self.call(func, targs, args)
            }
            GoExpr::StructLit { ty, fields } => {
                let ty = ground(ty, types)?;
                let fields = self.exprs(fields, env, types)?;
                Ok(GValue::Struct { ty, fields })
            }
            GoExpr::FuncLit {
                params,
                results,
                body,
            } => {
                let ty = GoType::Func(
                    params.iter().map(|(_, t)| t.clone()).collect(),
                    results.clone(),
                );
                Ok(GValue::Closure(Rc::new(GClosure {
                    params: params.iter().map(|(n, _)| n.clone()).collect(),
                    body: (**body).clone(),
                    env: env.clone(),
                    types: types.clone(),
                    ty: ground(&ty, types)?,
                })))
            }
            GoExpr::Field { target, field } => match self.expr(target, env, types)? {
                GValue::Struct {
                    ty: GoType::Struct(name, _),
                    fields,
                } => {
                    let pos = self
                        .fields
                        .get(name.as_str())
                        .and_then(|fs| fs.iter().position(|f| f == field));
                    match pos.and_then(|i| fields.get(i)) {
                        Some(v) => Ok(v.clone()),
                        None => stuck(format!("{name} has no field {field}")),
                    }
                }
                GValue::Nil => Err(GFailure::NilDereference),
                other => stuck(format!("field {field} of {other}")),
            },
            GoExpr::Conv { inner, .. } => match self.expr(inner, env, types)? {
                v @ (GValue::Iface { .. } | GValue::Nil) => Ok(v),
                v => match v.dynamic_type() {
                    Some(dyn_ty) => Ok(GValue::iface(dyn_ty, v)),
                    None => stuck(format!("conversion of {v}")),
                },
            },
            GoExpr::Nil => Ok(GValue::Nil),
            GoExpr::CallExpr { target, args } => {
                let f = self.expr(target, env, types)?;
                let args = self.exprs(args, env, types)?;
                self.apply(f, args)
            }
            GoExpr::Eq(a, b) => {
                let a = self.expr(a, env, types)?;
                let b = self.expr(b, env, types)?;
                Ok(GValue::Bool(go_eq(&a, &b)?))
            }
            GoExpr::And(a, b) => match self.expr(a, env, types)? {
                GValue::Bool(false) => Ok(GValue::Bool(false)),
                GValue::Bool(true) => match self.expr(b, env, types)? {
                    v @ GValue::Bool(_) => Ok(v),
                    v => stuck(format!("&& operand {v}")),
                },
                v => stuck(format!("&& operand {v}")),
            },
            GoExpr::Prim(p) => {
                let args = self.exprs(&p.args, env, types)?;
                match &p.op {
                    PrimOp::Value(b) => Ok(from_base(b.clone())),
                    PrimOp::Builtin(name) => {
                        let mut base = Vec::new();
                        for a in &args {
                            base.push(match a {
                                GValue::Int(n) => BaseValue::Int(n.clone()),
                                GValue::Str(s) => BaseValue::Str(s.clone()),
                                GValue::Bool(b) => BaseValue::Bool(*b),
                                GValue::Nil => return Err(GFailure::NilDereference),
                                v => return stuck(format!("primitive argument {v}")),
                            });
                        }
                        builtins::apply(name, &base)
                            .map(from_base)
                            .map_err(GFailure::Stuck)
                    }
                }
            }
        }
    }

    /// Calls a function value.
    pub fn apply(&mut self, f: GValue, args: Vec<GValue>) -> Result<GValue, GFailure> {
        self.nested(|m| {
            let flow = m.enter_closure(f, args)?;
            m.finish(flow)
        })
    }

    fn enter_closure(&mut self, f: GValue, args: Vec<GValue>) -> Result<Flow, GFailure> {
        let c = match f {
            GValue::Closure(c) => c,
            GValue::Nil => return Err(GFailure::NilDereference),
            other => return stuck(format!("call of {other}")),
        };
        if c.params.len() != args.len() {
            return stuck("function value called with the wrong number of arguments");
        }
        let mut env = c.env.clone();
        for (p, a) in c.params.iter().zip(args) {
            env = env.bind(p.clone(), a);
        }
        self.exec(&c.body, &env, &c.types)
    }

    fn exec(&mut self, s: &Stmt, env: &GEnv, types: &TypeEnv) -> Result<Flow, GFailure> {
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || self.exec_inner(s, env, types))
    }

    fn exec_inner(&mut self, s: &Stmt, env: &GEnv, types: &TypeEnv) -> Result<Flow, GFailure> {
        let mut env = env.clone();
        let mut cur = s;
        loop {
            self.tick()?;
            match cur {
                Stmt::Return(es) => {
                    // Same fuel as evaluating the call expression.
                    match es.as_slice() {
                        [GoExpr::Call {
                            func,
                            type_args,
                            args,
                        }] => {
                            self.tick()?;
                            let targs = type_args
                                .iter()
                                .map(|t| ground(t, types))
                                .collect::<Result<Vec<_>, _>>()?;
                            let args = self.exprs(args, &env, types)?;
                            return Ok(Flow::TailCall(func.clone(), targs, args));
                        }
                        [GoExpr::CallExpr { target, args }] => {
                            self.tick()?;
                            let f = self.expr(target, &env, types)?;
                            let args = self.exprs(args, &env, types)?;
                            return Ok(Flow::TailApply(f, args));
                        }
                        _ => {}
                    }
                    let mut vs = self.exprs(es, &env, types)?;
                    let v = if vs.len() == 1 {
                        vs.pop().expect("one value")
                    } else {
                        GValue::Multi(vs)
                    };
                    return Ok(Flow::Return(v));
                }
                Stmt::Define { names, value, rest } => {
                    let v = self.expr(value, &env, types)?;
                    match (names.as_slice(), v) {
                        ([name], v) => env = env.bind(name.clone(), v),
                        (names, GValue::Multi(vs)) if vs.len() == names.len() => {
                            for (n, v) in names.iter().zip(vs) {
                                env = env.bind(n.clone(), v);
                            }
                        }
                        (_, v) => return stuck(format!("cannot destructure {v}")),
                    }
                    cur = rest;
                }
                Stmt::Assert {
                    value,
                    ok,
                    target,
                    ty,
                    rest,
                } => {
                    let v = self.expr(target, &env, types)?;
                    let want = ground(ty, types)?;
                    let (val, hit) = match v {
                        GValue::Iface { dyn_ty, inner } if want.is_interface() => {
                            (GValue::Iface { dyn_ty, inner }, true)
                        }
                        GValue::Iface { dyn_ty, inner } if dyn_ty == want => (Rc::unwrap_or_clone(inner), true),
                        _ => (GValue::Nil, false),
                    };
                    env = env
                        .bind(value.clone(), val)
                        .bind(ok.clone(), GValue::Bool(hit));
                    cur = rest;
                }
                Stmt::If { cond, then, rest } => {
                    match self.expr(cond, &env, types)? {
                        GValue::Bool(true) => {
                            let flow = self.exec(then, &env, types)?;
                            if !matches!(flow, Flow::Next) {
                                return Ok(flow);
                            }
                        }
                        GValue::Bool(false) => {}
                        v => return stuck(format!("if condition {v}")),
                    }
                    cur = rest;
                }
                Stmt::Block { inner, rest } => {
                    let flow = self.exec(inner, &env, types)?;
                    if !matches!(flow, Flow::Next) {
                        return Ok(flow);
                    }
                    cur = rest;
                }
                Stmt::Panic(msg) => return Err(GFailure::Panic(msg.clone())),
                Stmt::Done => return Ok(Flow::Next),
            }
        }
    }
}

fn from_base(b: BaseValue) -> GValue {
    match b {
        BaseValue::Int(n) => GValue::Int(n),
        BaseValue::Str(s) => GValue::Str(s),
        BaseValue::Bool(b) => GValue::Bool(b),
    }
}

/// Substitutes the current type parameters; fails on leftovers.
fn ground(t: &GoType, types: &TypeEnv) -> Result<GoType, GFailure> {
    let g = t.subst(types);
    if has_param(&g) {
        return stuck(format!("type {} is not ground", super::render::go_type(&g)));
    }
    Ok(g)
}

fn has_param(t: &GoType) -> bool {
    match t {
        GoType::Param(_) => true,
        GoType::Struct(_, args) | GoType::Iface(_, args) => args.iter().any(has_param),
        GoType::Func(ps, rs) => ps.iter().chain(rs).any(has_param),
        GoType::Any | GoType::Opaque(_) => false,
    }
}

/// Binds type parameters by matching a parameter type against the dynamic
/// type of the argument. Only struct-typed parameters are informative.
fn infer(pattern: &GoType, actual: &GoType, vars: &[Name], map: &mut Vec<(Name, GoType)>) {
    match (pattern, actual) {
        (GoType::Param(p), _) if vars.contains(p) => {
            if !map.iter().any(|(n, _)| n == p) {
                map.push((p.clone(), actual.clone()));
            }
        }
        (GoType::Struct(a, xs), GoType::Struct(b, ys)) if a == b && xs.len() == ys.len() => {
            for (x, y) in xs.iter().zip(ys) {
                infer(x, y, vars, map);
            }
        }
        _ => {}
    }
}

/// Calls `entry` with the given ground type arguments and argument values.
pub fn geval(
    prog: &GoProgram,
    entry: &str,
    type_args: Vec<GoType>,
    args: Vec<GValue>,
    fuel: u64,
) -> Result<GValue, GFailure> {
    Machine::new(prog, fuel).call(entry, type_args, args)
}

/// Evaluates a closed expression under the given variable bindings.
pub fn geval_expr(
    prog: &GoProgram,
    e: &GoExpr,
    bindings: Vec<(Name, GValue)>,
    fuel: u64,
) -> Result<GValue, GFailure> {
    let env = bindings
        .into_iter()
        .fold(GEnv::new(), |env, (n, v)| env.bind(n, v));
    Machine::new(prog, fuel).eval(e, &env)
}
