//! Dictionary construction.
//!
//! Classes become single-constructor record datatypes (superclass
//! dictionaries first, then one field per method), constrained functions get
//! one leading dictionary parameter per constraint, instances become lifted
//! method functions plus a dictionary constant (or a function from the
//! dictionaries its own constraints need), and every method reference turns
//! into a projection out of a resolved dictionary.

use std::collections::HashSet;

use thiserror::Error;

use crate::ir::typing::super_label;
use crate::ir::{
    Clause, ConstDecl, CtorDecl, DataDecl, Declaration, DictParam, DictRoot, Entity, Equation,
    FunDecl, InstanceDecl, InstancePath, Name, Program, ProgramIndex, RecordField, SuperProjection,
    Term, TyParam, Type,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ElabError {
    #[error("no instance of `{class}` for `{ty}`")]
    MissingInstance { class: Name, ty: Type },
    #[error("overlapping instances of `{class}` for `{ty}`")]
    AmbiguousInstance { class: Name, ty: Type },
    #[error("`{0}` is not a class method, function or instance")]
    Unknown(Name),
}

/// A dictionary parameter in scope together with the constraint it
/// witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InScope {
    pub param: Name,
    pub var: Name,
    pub class: Name,
}

/// Name of the dictionary value produced by an instance.
pub fn dict_name(class: &str, tycon: &str) -> Name {
    format!("{class}_{tycon}")
}

/// Name of the function holding one instance's method implementation.
pub fn method_impl_name(method: &str, tycon: &str) -> Name {
    format!("{method}_{tycon}")
}

/// Constructor of a class's dictionary record.
pub fn dict_ctor(class: &str) -> Name {
    let mut chars = class.chars();
    let head: String = chars
        .next()
        .map(|c| c.to_uppercase().collect())
        .unwrap_or_default();
    format!("{head}{}_dict", chars.as_str())
}

/// Dictionary parameters for a list of constrained type parameters, one per
/// constraint in declaration order. `taken` holds names to avoid.
pub fn dict_params(ty_params: &[TyParam], taken: &HashSet<Name>) -> Vec<DictParam> {
    let mut out: Vec<DictParam> = Vec::new();
    for p in ty_params {
        for class in &p.classes {
            let mut name = format!("{}_", p.name);
            let mut i = 0;
            while taken.contains(&name) || out.iter().any(|d| d.name == name) {
                i += 1;
                name = format!("{}_{i}", p.name);
            }
            out.push(DictParam {
                name,
                class: class.clone(),
                var: p.name.clone(),
            });
        }
    }
    out
}

/// Finds the dictionary witnessing `class` at `ty`.
///
/// A type variable is served from the dictionary parameters in scope,
/// projecting through superclass fields when needed; a type constructor is
/// served by its unique instance, applied to the dictionaries that instance's
/// own constraints require.
pub fn resolve_constraint(
    index: &ProgramIndex<'_>,
    class: &str,
    ty: &Type,
    in_scope: &[InScope],
) -> Result<InstancePath, ElabError> {
    let missing = || ElabError::MissingInstance {
        class: class.to_string(),
        ty: ty.clone(),
    };
    match ty {
        Type::Var(v) => {
            let best = in_scope
                .iter()
                .filter(|s| s.var == *v)
                .filter_map(|s| index.super_path(&s.class, class).map(|path| (s, path)))
                .min_by_key(|(_, path)| path.len())
                .ok_or_else(missing)?;
            let (start, path) = best;
            let mut projections = Vec::new();
            let mut cur = start.class.clone();
            for sup in path {
                projections.push(SuperProjection {
                    field: super_label(&sup, &cur),
                    class: cur,
                    superclass: sup.clone(),
                });
                cur = sup;
            }
            Ok(InstancePath {
                root: DictRoot::Param {
                    name: start.param.clone(),
                },
                projections,
            })
        }
        Type::Con(tycon, args) => {
            let found = index.instances_for(class, tycon);
            let inst = match found.as_slice() {
                [] => return Err(missing()),
                [one] => *one,
                _ => {
                    return Err(ElabError::AmbiguousInstance {
                        class: class.to_string(),
                        ty: ty.clone(),
                    })
                }
            };
            let subst: Vec<(Name, Type)> = inst
                .ty_params
                .iter()
                .map(|p| p.name.clone())
                .zip(args.iter().cloned())
                .collect();
            let mut dicts = Vec::new();
            for p in &inst.ty_params {
                let at = Type::var(p.name.clone()).subst(&subst);
                for c in &p.classes {
                    dicts.push(resolve_constraint(index, c, &at, in_scope)?);
                }
            }
            Ok(InstancePath {
                root: DictRoot::Instance {
                    name: dict_name(class, tycon),
                    type_args: args.clone(),
                    args: dicts,
                },
                projections: Vec::new(),
            })
        }
        Type::Fun(..) => Err(missing()),
    }
}

struct Elaborator<'a> {
    index: ProgramIndex<'a>,
}

impl Elaborator<'_> {
    fn term(&self, t: &Term, scope: &[InScope]) -> Result<Term, ElabError> {
        Ok(match t {
            Term::Ref {
                name,
                type_args,
                dicts,
            } => match self.index.entity(name) {
                Some(Entity::Method { class, index }) => {
                    let ty = type_args
                        .first()
                        .cloned()
                        .ok_or_else(|| ElabError::Unknown(name.clone()))?;
                    Term::Method {
                        dict: resolve_constraint(&self.index, &class.name, &ty, scope)?,
                        class: class.name.clone(),
                        method: class.methods[index].name.clone(),
                        ty,
                    }
                }
                Some(Entity::Fun(f)) if dicts.is_empty() => {
                    let subst: Vec<(Name, Type)> = f
                        .ty_params
                        .iter()
                        .map(|p| p.name.clone())
                        .zip(type_args.iter().cloned())
                        .collect();
                    let mut out = Vec::new();
                    for p in &f.ty_params {
                        let at = Type::var(p.name.clone()).subst(&subst);
                        for c in &p.classes {
                            out.push(resolve_constraint(&self.index, c, &at, scope)?);
                        }
                    }
                    Term::Ref {
                        name: name.clone(),
                        type_args: type_args.clone(),
                        dicts: out,
                    }
                }
                _ => t.clone(),
            },
            Term::App { fun, arg } => Term::app(self.term(fun, scope)?, self.term(arg, scope)?),
            Term::Abs { binder, ty, body } => {
                Term::abs(binder.clone(), ty.clone(), self.term(body, scope)?)
            }
            Term::Case {
                scrutinee,
                ty,
                clauses,
            } => Term::Case {
                scrutinee: Box::new(self.term(scrutinee, scope)?),
                ty: ty.clone(),
                clauses: clauses
                    .iter()
                    .map(|c| {
                        Ok(Clause {
                            pattern: c.pattern.clone(),
                            body: self.term(&c.body, scope)?,
                        })
                    })
                    .collect::<Result<_, ElabError>>()?,
            },
            Term::DictLit {
                class,
                ty,
                supers,
                methods,
            } => Term::DictLit {
                class: class.clone(),
                ty: ty.clone(),
                supers: supers.clone(),
                methods: methods
                    .iter()
                    .map(|m| self.term(m, scope))
                    .collect::<Result<_, _>>()?,
            },
            Term::Var { .. } | Term::Lit { .. } | Term::Method { .. } => t.clone(),
        })
    }

    fn equations(&self, eqs: &[Equation], scope: &[InScope]) -> Result<Vec<Equation>, ElabError> {
        eqs.iter()
            .map(|eq| {
                Ok(Equation {
                    params: eq.params.clone(),
                    rhs: self.term(&eq.rhs, scope)?,
                })
            })
            .collect()
    }

    fn fun(&self, f: &FunDecl) -> Result<FunDecl, ElabError> {
        let dict_params = if f.dict_params.is_empty() {
            dict_params(&f.ty_params, &vars_of(&f.equations))
        } else {
            f.dict_params.clone()
        };
        let scope = in_scope(&dict_params);
        Ok(FunDecl {
            name: f.name.clone(),
            ty_params: f.ty_params.clone(),
            dict_params,
            signature: f.signature.clone(),
            equations: self.equations(&f.equations, &scope)?,
        })
    }

    fn instance(
        &self,
        inst: &InstanceDecl,
        taken: &mut HashSet<Name>,
    ) -> Result<Vec<Declaration>, ElabError> {
        let class = self
            .index
            .class(&inst.class)
            .ok_or_else(|| ElabError::Unknown(inst.class.clone()))?;
        let head = inst.head();
        let subst = [(class.ty_param.clone(), head.clone())];
        let mut out = Vec::new();
        let mut methods = Vec::new();
        for sig in &class.methods {
            let def = inst
                .methods
                .iter()
                .find(|m| m.name == sig.name)
                .ok_or_else(|| ElabError::Unknown(sig.name.clone()))?;
            let name = fresh(method_impl_name(&sig.name, &inst.tycon), taken);
            let dps = dict_params(&inst.ty_params, &vars_of(&def.equations));
            let scope = in_scope(&dps);
            let equations = self.equations(&def.equations, &scope)?;
            let type_args: Vec<Type> = inst
                .ty_params
                .iter()
                .map(|p| Type::var(p.name.clone()))
                .collect();
            methods.push(Term::Ref {
                name: name.clone(),
                type_args,
                dicts: dps
                    .iter()
                    .map(|d| InstancePath::param(d.name.clone()))
                    .collect(),
            });
            out.push(Declaration::Fun(FunDecl {
                name,
                ty_params: inst.ty_params.clone(),
                dict_params: dps,
                signature: sig.signature.subst(&subst),
                equations,
            }));
        }
        let dps = dict_params(&inst.ty_params, &HashSet::new());
        let scope = in_scope(&dps);
        let supers = class
            .superclasses
            .iter()
            .map(|s| resolve_constraint(&self.index, s, &head, &scope))
            .collect::<Result<Vec<_>, _>>()?;
        // The method references above were built against their own
        // parameter names; rebuild them against this declaration's.
        let methods = methods
            .into_iter()
            .map(|m| match m {
                Term::Ref {
                    name, type_args, ..
                } => Term::Ref {
                    name,
                    type_args,
                    dicts: dps
                        .iter()
                        .map(|d| InstancePath::param(d.name.clone()))
                        .collect(),
                },
                other => other,
            })
            .collect();
        let dict = Term::DictLit {
            class: inst.class.clone(),
            ty: head.clone(),
            supers,
            methods,
        };
        let name = dict_name(&inst.class, &inst.tycon);
        let signature = Type::con(inst.class.clone(), vec![head]);
        out.push(if dps.is_empty() {
            Declaration::Const(ConstDecl {
                name,
                signature,
                rhs: dict,
            })
        } else {
            Declaration::Fun(FunDecl {
                name,
                ty_params: inst.ty_params.clone(),
                dict_params: dps,
                signature,
                equations: vec![Equation {
                    params: Vec::new(),
                    rhs: dict,
                }],
            })
        });
        Ok(out)
    }
}

fn in_scope(params: &[DictParam]) -> Vec<InScope> {
    params
        .iter()
        .map(|d| InScope {
            param: d.name.clone(),
            var: d.var.clone(),
            class: d.class.clone(),
        })
        .collect()
}

fn fresh(base: Name, taken: &mut HashSet<Name>) -> Name {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

fn vars_of(eqs: &[Equation]) -> HashSet<Name> {
    let mut out = HashSet::new();
    for eq in eqs {
        for p in &eq.params {
            out.extend(p.vars().into_iter().cloned());
        }
        collect_binders(&eq.rhs, &mut out);
    }
    out
}

fn collect_binders(t: &Term, out: &mut HashSet<Name>) {
    match t {
        Term::Var { name } => {
            out.insert(name.clone());
        }
        Term::App { fun, arg } => {
            collect_binders(fun, out);
            collect_binders(arg, out);
        }
        Term::Abs { binder, body, .. } => {
            out.insert(binder.clone());
            collect_binders(body, out);
        }
        Term::Case {
            scrutinee, clauses, ..
        } => {
            collect_binders(scrutinee, out);
            for c in clauses {
                out.extend(c.pattern.vars().into_iter().cloned());
                collect_binders(&c.body, out);
            }
        }
        Term::DictLit { methods, .. } => methods.iter().for_each(|m| collect_binders(m, out)),
        Term::Ref { .. } | Term::Lit { .. } | Term::Method { .. } => {}
    }
}

fn all_names(p: &Program) -> HashSet<Name> {
    let mut out = HashSet::new();
    for d in &p.decls {
        match d {
            Declaration::Data(d) => {
                out.insert(d.name.clone());
                out.extend(d.ctors.iter().map(|c| c.name.clone()));
            }
            Declaration::Fun(f) => {
                out.insert(f.name.clone());
            }
            Declaration::Const(c) => {
                out.insert(c.name.clone());
            }
            Declaration::Class(c) => {
                out.insert(c.name.clone());
                out.extend(c.methods.iter().map(|m| m.name.clone()));
            }
            Declaration::Instance(i) => {
                out.insert(dict_name(&i.class, &i.tycon));
            }
        }
    }
    out
}

/// Removes all classes and instances. Class-free programs come back
/// unchanged.
pub fn elaborate(p: &Program) -> Result<Program, ElabError> {
    let e = Elaborator { index: p.index() };
    let mut taken = all_names(p);
    let mut decls = Vec::new();
    for d in &p.decls {
        match d {
            Declaration::Class(c) => {
                let alpha = Type::var(c.ty_param.clone());
                let mut fields = Vec::new();
                let mut record = Vec::new();
                for s in &c.superclasses {
                    fields.push(Type::con(s.clone(), vec![alpha.clone()]));
                    record.push(RecordField {
                        label: super_label(s, &c.name),
                        call_arity: None,
                    });
                }
                for m in &c.methods {
                    fields.push(m.signature.clone());
                    record.push(RecordField {
                        label: m.name.clone(),
                        call_arity: Some(m.signature.arrow_count()),
                    });
                }
                let ctor = fresh(dict_ctor(&c.name), &mut taken);
                decls.push(Declaration::Data(DataDecl {
                    name: c.name.clone(),
                    ty_params: vec![c.ty_param.clone()],
                    ctors: vec![CtorDecl { name: ctor, fields }],
                    record: Some(record),
                }));
            }
            Declaration::Instance(inst) => decls.extend(e.instance(inst, &mut taken)?),
            Declaration::Fun(f) => decls.push(Declaration::Fun(e.fun(f)?)),
            Declaration::Const(c) => decls.push(Declaration::Const(ConstDecl {
                name: c.name.clone(),
                signature: c.signature.clone(),
                rhs: e.term(&c.rhs, &[])?,
            })),
            Declaration::Data(_) => decls.push(d.clone()),
        }
    }
    Ok(Program::new(decls))
}

/// Elaborates a closed term over the original program `p` (so that method
/// and instance lookups see the class declarations).
pub fn elaborate_term(p: &Program, t: &Term) -> Result<Term, ElabError> {
    Elaborator { index: p.index() }.term(t, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_params_avoid_taken_names() {
        let tp = vec![TyParam {
            name: "a".into(),
            classes: vec!["semigroup".into(), "monoid".into()],
        }];
        let taken: HashSet<Name> = ["a_".to_string()].into_iter().collect();
        let names: Vec<Name> = dict_params(&tp, &taken)
            .into_iter()
            .map(|d| d.name)
            .collect();
        assert_eq!(names, vec!["a_1", "a_2"]);
    }

    #[test]
    fn ctor_names_are_capitalized() {
        assert_eq!(dict_ctor("monoid"), "Monoid_dict");
    }
}
