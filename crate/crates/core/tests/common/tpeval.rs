//! Evaluator for programs with classes that never builds dictionaries:
//! every method reference is resolved from the ground type it is
//! instantiated at, by looking up the instance for that type.
//!
//! Same strategy as the oracle otherwise: call by value, arguments left to
//! right, first matching equation or clause wins.

use std::rc::Rc;

use fungo_core::ir::builtins::{self, BaseValue};
use fungo_core::ir::{Entity, Equation, Literal, Name, Pattern, Program, ProgramIndex, Term, Type};

#[derive(Clone, Debug)]
pub enum V {
    Con(Name, Vec<V>),
    Int(num_bigint::BigInt),
    Str(String),
    Lambda(Rc<(Name, Term, Env, Tys)>),
    Partial(Rc<Target>, Vec<V>),
}

#[derive(Debug)]
pub enum Target {
    Ctor(Name, usize),
    Builtin(Name, usize),
    /// Equations together with the type instantiation they run under.
    Equations(Vec<Equation>, Tys),
}

impl Target {
    fn arity(&self) -> usize {
        match self {
            Target::Ctor(_, n) | Target::Builtin(_, n) => *n,
            Target::Equations(eqs, _) => eqs.first().map_or(0, |e| e.params.len()),
        }
    }
}

pub type Env = Vec<(Name, V)>;
pub type Tys = Vec<(Name, Type)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fail {
    MatchFailed,
    OutOfFuel,
    Stuck(String),
}

impl V {
    /// Same format as the oracle's rendering.
    pub fn render(&self) -> String {
        match self {
            V::Con(c, args) if args.is_empty() => c.clone(),
            V::Con(c, args) => {
                let args: Vec<String> = args.iter().map(V::render).collect();
                format!("{c}({})", args.join(", "))
            }
            V::Int(n) => n.to_string(),
            V::Str(s) => serde_json::to_string(s).expect("strings serialize"),
            V::Lambda(_) | V::Partial(..) => "<function>".into(),
        }
    }
}

pub struct TypePassing<'p> {
    index: ProgramIndex<'p>,
    fuel: u64,
}

fn lookup<'e>(env: &'e Env, name: &str) -> Option<&'e V> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
}

fn bind(p: &Pattern, v: &V, out: &mut Env) -> bool {
    match (p, v) {
        (Pattern::Var { name }, _) => {
            out.push((name.clone(), v.clone()));
            true
        }
        (Pattern::Con { ctor, args, .. }, V::Con(c, vs)) => {
            ctor == c && args.len() == vs.len() && args.iter().zip(vs).all(|(p, v)| bind(p, v, out))
        }
        _ => false,
    }
}

impl<'p> TypePassing<'p> {
    pub fn new(p: &'p Program, fuel: u64) -> Self {
        TypePassing {
            index: p.index(),
            fuel,
        }
    }

    fn tick(&mut self) -> Result<(), Fail> {
        if self.fuel == 0 {
            return Err(Fail::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval(&mut self, t: &Term, env: &Env, tys: &Tys) -> Result<V, Fail> {
        self.tick()?;
        match t {
            Term::Var { name } => lookup(env, name)
                .cloned()
                .ok_or_else(|| Fail::Stuck(format!("unbound `{name}`"))),
            Term::Lit { lit } => Ok(match lit {
                Literal::Int(n) => V::Int(n.clone()),
                Literal::Str(s) => V::Str(s.clone()),
            }),
            Term::Ref { name, type_args, .. } => {
                let targs: Vec<Type> = type_args.iter().map(|t| t.subst(tys)).collect();
                self.reference(name, targs)
            }
            Term::App { fun, arg } => {
                let f = self.eval(fun, env, tys)?;
                let a = self.eval(arg, env, tys)?;
                self.apply(f, a)
            }
            Term::Abs { binder, body, .. } => Ok(V::Lambda(Rc::new((
                binder.clone(),
                (**body).clone(),
                env.clone(),
                tys.clone(),
            )))),
            Term::Case {
                scrutinee, clauses, ..
            } => {
                let v = self.eval(scrutinee, env, tys)?;
                for c in clauses {
                    let mut inner = env.clone();
                    if bind(&c.pattern, &v, &mut inner) {
                        return self.eval(&c.body, &inner, tys);
                    }
                }
                Err(Fail::MatchFailed)
            }
            Term::Method { .. } | Term::DictLit { .. } => {
                Err(Fail::Stuck("dictionary terms in a source program".into()))
            }
        }
    }

    fn reference(&mut self, name: &str, targs: Vec<Type>) -> Result<V, Fail> {
        let target = match self.index.entity(name) {
            Some(Entity::Ctor { data, index }) => {
                Target::Ctor(name.to_string(), data.ctors[index].fields.len())
            }
            Some(Entity::Fun(f)) => {
                let tys = f.ty_params.iter().map(|p| p.name.clone()).zip(targs).collect();
                Target::Equations(f.equations.clone(), tys)
            }
            Some(Entity::Const(c)) => {
                let tys: Tys = c.ty_params().into_iter().zip(targs).collect();
                return self.eval(&c.rhs, &Env::new(), &tys);
            }
            Some(Entity::Method { class, index }) => {
                let method = &class.methods[index].name;
                let Some(Type::Con(tycon, args)) = targs.first() else {
                    return Err(Fail::Stuck(format!("`{name}` at a non-ground type")));
                };
                let inst = self
                    .index
                    .instances_for(&class.name, tycon)
                    .first()
                    .copied()
                    .ok_or_else(|| Fail::Stuck(format!("no instance {}::{tycon}", class.name)))?;
                let def = inst
                    .methods
                    .iter()
                    .find(|m| m.name == *method)
                    .ok_or_else(|| Fail::Stuck(format!("instance lacks `{method}`")))?;
                let tys = inst.ty_params.iter().map(|p| p.name.clone()).zip(args.clone()).collect();
                Target::Equations(def.equations.clone(), tys)
            }
            Some(Entity::Builtin(b)) => {
                Target::Builtin(b.to_string(), builtins::const_arity(b).unwrap_or(0))
            }
            None => return Err(Fail::Stuck(format!("unknown `{name}`"))),
        };
        if target.arity() == 0 {
            self.invoke(&target, Vec::new())
        } else {
            Ok(V::Partial(Rc::new(target), Vec::new()))
        }
    }

    fn apply(&mut self, f: V, a: V) -> Result<V, Fail> {
        self.tick()?;
        match f {
            V::Lambda(l) => {
                let (binder, body, env, tys) = &*l;
                let mut env = env.clone();
                env.push((binder.clone(), a));
                self.eval(body, &env, tys)
            }
            V::Partial(target, mut args) => {
                args.push(a);
                if args.len() == target.arity() {
                    self.invoke(&target, args)
                } else {
                    Ok(V::Partial(target, args))
                }
            }
            other => Err(Fail::Stuck(format!("applying {}", other.render()))),
        }
    }

    fn invoke(&mut self, target: &Target, args: Vec<V>) -> Result<V, Fail> {
        match target {
            Target::Ctor(c, _) => Ok(V::Con(c.clone(), args)),
            Target::Builtin(b, _) => {
                let base: Vec<BaseValue> = args
                    .iter()
                    .map(|v| match v {
                        V::Int(n) => Ok(BaseValue::Int(n.clone())),
                        V::Str(s) => Ok(BaseValue::Str(s.clone())),
                        _ => Err(Fail::Stuck("primitive on a non-base value".into())),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(match builtins::apply(b, &base).map_err(Fail::Stuck)? {
                    BaseValue::Int(n) => V::Int(n),
                    BaseValue::Str(s) => V::Str(s),
                    BaseValue::Bool(b) => V::Con(if b { builtins::TRUE } else { builtins::FALSE }.into(), vec![]),
                })
            }
            Target::Equations(eqs, tys) => {
                for eq in eqs {
                    let mut env = Env::new();
                    if eq.params.iter().zip(&args).all(|(p, v)| bind(p, v, &mut env)) {
                        return self.eval(&eq.rhs, &env, tys);
                    }
                }
                Err(Fail::MatchFailed)
            }
        }
    }
}
