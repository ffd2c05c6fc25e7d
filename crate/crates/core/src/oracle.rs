//! Call-by-value interpreter for class-free programs.
//!
//! Arguments are evaluated left to right before the call, case clauses and
//! function equations are tried top to bottom and the first match wins.
//! Every evaluation step consumes one unit of fuel.

use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ir::builtins::{self, BaseValue};
use crate::ir::{
    DictRoot, Entity, InstancePath, Literal, Name, Pattern, Program, ProgramIndex, Term,
};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub enum OValue {
    Con {
        ctor: Name,
        args: Rc<[OValue]>,
    },
    Closure(Rc<Closure>),
    Int(BigInt),
    Str(String),
    /// A missing value supplied from outside (the `nil` entry argument).
    Absent,
    /// A dictionary method field, evaluated when projected.
    Suspended(Rc<(Term, Env)>),
}

#[derive(Debug)]
pub enum Closure {
    Lambda {
        binder: Name,
        body: Term,
        env: Env,
    },
    /// A top-level callable applied to fewer arguments than it takes.
    Partial {
        target: Callable,
        args: Vec<OValue>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Callable {
    Fun(Name),
    Ctor(Name),
    Builtin(Name),
}

impl OValue {
    pub fn con(ctor: impl Into<Name>, args: Vec<OValue>) -> OValue {
        OValue::Con {
            ctor: ctor.into(),
            args: args.into(),
        }
    }

    /// Canonical rendering: `Ctor(a, b)`, bare nullary constructors,
    /// decimal integers and quoted strings.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

/// Structural equality on first-order values. Closures never compare equal.
impl PartialEq for OValue {
    fn eq(&self, other: &OValue) -> bool {
        match (self, other) {
            (OValue::Con { ctor: a, args: x }, OValue::Con { ctor: b, args: y }) => {
                a == b && x == y
            }
            (OValue::Int(a), OValue::Int(b)) => a == b,
            (OValue::Str(a), OValue::Str(b)) => a == b,
            (OValue::Absent, OValue::Absent) => true,
            _ => false,
        }
    }
}

impl fmt::Display for OValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OValue::Con { ctor, args } => {
                write!(f, "{ctor}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            OValue::Closure(_) | OValue::Suspended(_) => write!(f, "<function>"),
            OValue::Int(n) => write!(f, "{n}"),
            OValue::Str(s) => write!(
                f,
                "{}",
                serde_json::to_string(s).expect("strings serialize")
            ),
            OValue::Absent => write!(f, "nil"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Failure {
    #[error("match failed")]
    MatchFailed,
    #[error("out of fuel")]
    OutOfFuel,
    /// Only reachable on ill-typed input.
    #[error("evaluation stuck: {0}")]
    Stuck(String),
}

/// Lexical environment as a persistent list.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Rc<Frame>>);

#[derive(Debug)]
struct Frame {
    name: Name,
    value: OValue,
    next: Env,
}

impl Env {
    pub fn new() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: Name, value: OValue) -> Env {
        Env(Some(Rc::new(Frame {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn bind_all(&self, bindings: impl IntoIterator<Item = (Name, OValue)>) -> Env {
        bindings
            .into_iter()
            .fold(self.clone(), |env, (n, v)| env.bind(n, v))
    }

    pub fn lookup(&self, name: &str) -> Option<&OValue> {
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

/// Matches a value against a pattern, returning the bindings in pattern
/// order.
pub fn match_pattern(pat: &Pattern, v: &OValue) -> Option<Vec<(Name, OValue)>> {
    let mut out = Vec::new();
    if bind(pat, v, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn bind(pat: &Pattern, v: &OValue, out: &mut Vec<(Name, OValue)>) -> bool {
    match (pat, v) {
        (Pattern::Var { name }, _) => {
            out.push((name.clone(), v.clone()));
            true
        }
        (Pattern::Con { ctor, args, .. }, OValue::Con { ctor: c, args: vs }) => {
            ctor == c && args.len() == vs.len() && args.iter().zip(vs.iter()).all(|(p, v)| bind(p, v, out))
        }
        _ => false,
    }
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Stuck(msg.into()))
}

fn to_base(v: &OValue) -> Result<BaseValue, Failure> {
    match v {
        OValue::Int(n) => Ok(BaseValue::Int(n.clone())),
        OValue::Str(s) => Ok(BaseValue::Str(s.clone())),
        _ => stuck(format!("primitive applied to `{v}`")),
    }
}

fn from_base(b: BaseValue) -> OValue {
    match b {
        BaseValue::Int(n) => OValue::Int(n),
        BaseValue::Str(s) => OValue::Str(s),
        BaseValue::Bool(true) => OValue::con(builtins::TRUE, Vec::new()),
        BaseValue::Bool(false) => OValue::con(builtins::FALSE, Vec::new()),
    }
}

/// An evaluator bound to one program with a fuel budget.
pub struct Oracle<'a> {
    index: ProgramIndex<'a>,
    fuel: u64,
}

impl<'a> Oracle<'a> {
    pub fn new(p: &'a Program, fuel: u64) -> Self {
        Oracle {
            index: p.index(),
            fuel,
        }
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> Result<(), Failure> {
        if self.fuel == 0 {
            return Err(Failure::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval(&mut self, t: &Term, env: &Env) -> Result<OValue, Failure> {
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || self.eval_inner(t, env))
    }

    fn eval_inner(&mut self, t: &Term, env: &Env) -> Result<OValue, Failure> {
        self.tick()?;
        match t {
            Term::Var { name } => match env.lookup(name) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("unbound variable `{name}`")),
            },
            Term::Ref { name, dicts, .. } => {
                let dicts = dicts
                    .iter()
                    .map(|d| self.dict(d, env))
                    .collect::<Result<Vec<_>, _>>()?;
                self.reference(name, dicts)
            }
            Term::App { fun, arg } => {
                let f = self.eval(fun, env)?;
                let a = self.eval(arg, env)?;
                self.apply(f, a)
            }
            Term::Abs { binder, body, .. } => Ok(OValue::Closure(Rc::new(Closure::Lambda {
                binder: binder.clone(),
                body: (**body).clone(),
                env: env.clone(),
            }))),
            Term::Case {
                scrutinee, clauses, ..
            } => {
                let v = self.eval(scrutinee, env)?;
                for c in clauses {
                    if let Some(bs) = match_pattern(&c.pattern, &v) {
                        return self.eval(&c.body, &env.bind_all(bs));
                    }
                }
                Err(Failure::MatchFailed)
            }
            Term::Lit { lit } => Ok(match lit {
                Literal::Int(n) => OValue::Int(n.clone()),
                Literal::Str(s) => OValue::Str(s.clone()),
            }),
            Term::Method {
                dict,
                class,
                method,
                ..
            } => {
                let d = self.dict(dict, env)?;
                let field = self.field(&d, class, method)?;
                self.force(field)
            }
            Term::DictLit {
                class,
                supers,
                methods,
                ..
            } => {
                let Some(data) = self.index.data(class) else {
                    return stuck(format!("no dictionary type `{class}`"));
                };
                let mut args = Vec::new();
                for s in supers {
                    args.push(self.dict(s, env)?);
                }
                for m in methods {
                    args.push(OValue::Suspended(Rc::new((m.clone(), env.clone()))));
                }
                Ok(OValue::con(data.ctors[0].name.clone(), args))
            }
        }
    }

    fn force(&mut self, v: OValue) -> Result<OValue, Failure> {
        match v {
            OValue::Suspended(s) => self.eval(&s.0, &s.1),
            v => Ok(v),
        }
    }

    fn field(&self, dict: &OValue, class: &str, label: &str) -> Result<OValue, Failure> {
        let Some(record) = self.index.data(class).and_then(|d| d.record.as_ref()) else {
            return stuck(format!("no dictionary type `{class}`"));
        };
        let Some(pos) = record.iter().position(|f| f.label == label) else {
            return stuck(format!("dictionary `{class}` has no field `{label}`"));
        };
        match dict {
            OValue::Con { args, .. } if pos < args.len() => Ok(args[pos].clone()),
            _ => stuck(format!("projection of `{label}` from `{dict}`")),
        }
    }

    fn dict(&mut self, path: &InstancePath, env: &Env) -> Result<OValue, Failure> {
        let mut v = match &path.root {
            DictRoot::Param { name } => match env.lookup(name) {
                Some(v) => v.clone(),
                None => return stuck(format!("unbound dictionary `{name}`")),
            },
            DictRoot::Instance { name, args, .. } => {
                let args = args
                    .iter()
                    .map(|d| self.dict(d, env))
                    .collect::<Result<Vec<_>, _>>()?;
                self.reference(name, args)?
            }
        };
        for proj in &path.projections {
            v = self.field(&v, &proj.class, &proj.field)?;
        }
        Ok(v)
    }

    fn arity(&self, target: &Callable) -> usize {
        match target {
            Callable::Fun(name) => match self.index.entity(name) {
                Some(Entity::Fun(f)) => f.dict_params.len() + f.arity(),
                _ => 0,
            },
            Callable::Ctor(name) => self.index.ctor(name).map_or(0, |(_, c)| c.fields.len()),
            Callable::Builtin(name) => builtins::const_arity(name).unwrap_or(0),
        }
    }

    /// Value of a top-level name, given the dictionaries it takes.
    fn reference(&mut self, name: &str, dicts: Vec<OValue>) -> Result<OValue, Failure> {
        let target = match self.index.entity(name) {
            Some(Entity::Const(c)) => return self.eval(&c.rhs, &Env::new()),
            Some(Entity::Fun(_)) => Callable::Fun(name.to_string()),
            Some(Entity::Ctor { .. }) => Callable::Ctor(name.to_string()),
            Some(Entity::Builtin(_)) => Callable::Builtin(name.to_string()),
            Some(Entity::Method { .. }) => return stuck(format!("unelaborated method `{name}`")),
            None => return stuck(format!("unknown name `{name}`")),
        };
        self.saturate(target, dicts)
    }

    fn saturate(&mut self, target: Callable, args: Vec<OValue>) -> Result<OValue, Failure> {
        if args.len() < self.arity(&target) {
            return Ok(OValue::Closure(Rc::new(Closure::Partial { target, args })));
        }
        self.invoke(&target, args)
    }

    pub fn apply(&mut self, f: OValue, arg: OValue) -> Result<OValue, Failure> {
        let OValue::Closure(c) = f else {
            return stuck(format!("applying non-function `{f}`"));
        };
        match &*c {
            Closure::Lambda { binder, body, env } => {
                self.eval(body, &env.bind(binder.clone(), arg))
            }
            Closure::Partial { target, args } => {
                let mut args = args.clone();
                args.push(arg);
                self.saturate(target.clone(), args)
            }
        }
    }

    fn invoke(&mut self, target: &Callable, args: Vec<OValue>) -> Result<OValue, Failure> {
        match target {
            Callable::Ctor(name) => Ok(OValue::con(name.clone(), args)),
            Callable::Builtin(name) => {
                let base = args.iter().map(to_base).collect::<Result<Vec<_>, _>>()?;
                builtins::apply(name, &base)
                    .map(from_base)
                    .map_err(Failure::Stuck)
            }
            Callable::Fun(name) => {
                let Some(f) = self.index.program.fun(name) else {
                    return stuck(format!("unknown function `{name}`"));
                };
                let r = f.dict_params.len();
                let mut env = Env::new();
                for (d, v) in f.dict_params.iter().zip(&args[..r]) {
                    env = env.bind(d.name.clone(), v.clone());
                }
                for eq in &f.equations {
                    let mut bindings = Vec::new();
                    let matched = eq
                        .params
                        .iter()
                        .zip(&args[r..])
                        .all(|(p, v)| bind(p, v, &mut bindings));
                    if matched {
                        return self.eval(&eq.rhs, &env.bind_all(bindings));
                    }
                }
                Err(Failure::MatchFailed)
            }
        }
    }
}

/// Evaluates a closed term with the default environment.
pub fn eval(p: &Program, t: &Term, env: &Env, fuel: u64) -> Result<OValue, Failure> {
    Oracle::new(p, fuel).eval(t, env)
}
