//! Type computation for fully annotated terms.
//!
//! No inference happens here: every binder, scrutinee and reference already
//! carries its type, so the type of a term follows syntactically. The same
//! walk doubles as a checker for annotated programs.

use thiserror::Error;

use super::builtins;
use super::{Literal, Name, Pattern, ProgramIndex, Term, Type};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct TypeError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError(msg.into()))
}

/// Scoped variable types; later entries shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    vars: Vec<(Name, Type)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: Name, ty: Type) {
        self.vars.push((name, ty));
    }

    pub fn extend(&mut self, bindings: impl IntoIterator<Item = (Name, Type)>) {
        self.vars.extend(bindings);
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.vars.truncate(len);
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn bindings(&self) -> &[(Name, Type)] {
        &self.vars
    }
}

/// Variables bound by `pattern` when matched against a value of type `ty`.
pub fn pattern_bindings(
    index: &ProgramIndex<'_>,
    pattern: &Pattern,
    ty: &Type,
) -> Result<Vec<(Name, Type)>, TypeError> {
    let mut out = Vec::new();
    bind_pattern(index, pattern, ty, &mut out)?;
    Ok(out)
}

fn bind_pattern(
    index: &ProgramIndex<'_>,
    pattern: &Pattern,
    ty: &Type,
    out: &mut Vec<(Name, Type)>,
) -> Result<(), TypeError> {
    match pattern {
        Pattern::Var { name } => {
            out.push((name.clone(), ty.clone()));
            Ok(())
        }
        Pattern::Con {
            ctor,
            type_args,
            args,
        } => {
            let Some((data, decl)) = index.ctor(ctor) else {
                return err(format!("unknown constructor `{ctor}` in pattern"));
            };
            match ty {
                Type::Con(name, targs) if *name == data.name => {
                    if targs != type_args {
                        return err(format!(
                            "pattern `{ctor}` instantiated at {type_args:?}, scrutinee has {targs:?}"
                        ));
                    }
                }
                _ => {
                    return err(format!(
                        "constructor `{ctor}` of `{}` matched against `{ty}`",
                        data.name
                    ))
                }
            }
            if decl.fields.len() != args.len() {
                return err(format!(
                    "constructor `{ctor}` expects {} subpatterns, got {}",
                    decl.fields.len(),
                    args.len()
                ));
            }
            let fields = index.ctor_fields(ctor, type_args).expect("checked above");
            for (sub, fty) in args.iter().zip(&fields) {
                bind_pattern(index, sub, fty, out)?;
            }
            Ok(())
        }
    }
}

pub fn literal_type(lit: &Literal) -> Type {
    match lit {
        Literal::Int(_) => Type::base(builtins::INT),
        Literal::Str(_) => Type::base(builtins::STRING),
    }
}

/// Computes the type of an annotated term, checking applications and case
/// clauses along the way.
pub fn type_of(
    index: &ProgramIndex<'_>,
    env: &mut TypeEnv,
    term: &Term,
) -> Result<Type, TypeError> {
    match term {
        Term::Var { name } => env
            .lookup(name)
            .cloned()
            .ok_or_else(|| TypeError(format!("unbound variable `{name}`"))),
        Term::Ref {
            name, type_args, ..
        } => index
            .ref_type(name, type_args)
            .ok_or_else(|| TypeError(format!("bad reference `{name}` at {type_args:?}"))),
        Term::App { fun, arg } => {
            let fty = type_of(index, env, fun)?;
            let aty = type_of(index, env, arg)?;
            match fty {
                Type::Fun(param, result) => {
                    if *param != aty {
                        return err(format!("argument of type `{aty}` where `{param}` expected"));
                    }
                    Ok(*result)
                }
                other => err(format!("applying non-function of type `{other}`")),
            }
        }
        Term::Abs { binder, ty, body } => {
            let mark = env.len();
            env.push(binder.clone(), ty.clone());
            let body_ty = type_of(index, env, body);
            env.truncate(mark);
            Ok(Type::fun(ty.clone(), body_ty?))
        }
        Term::Case {
            scrutinee,
            ty,
            clauses,
        } => {
            let sty = type_of(index, env, scrutinee)?;
            if sty != *ty {
                return err(format!("scrutinee has type `{sty}`, annotated `{ty}`"));
            }
            let mut result: Option<Type> = None;
            for clause in clauses {
                let bindings = pattern_bindings(index, &clause.pattern, ty)?;
                let mark = env.len();
                env.extend(bindings);
                let bty = type_of(index, env, &clause.body);
                env.truncate(mark);
                let bty = bty?;
                match &result {
                    None => result = Some(bty),
                    Some(r) if *r == bty => {}
                    Some(r) => return err(format!("case clauses disagree: `{r}` vs `{bty}`")),
                }
            }
            result.ok_or_else(|| TypeError("case without clauses".into()))
        }
        Term::Lit { lit } => Ok(literal_type(lit)),
        Term::Method {
            class, method, ty, ..
        } => {
            // Elaborated programs have no class declarations left; the
            // dictionary record carries the method signatures instead.
            let Some(decl) = index.class(class) else {
                return method_type_from_record(index, class, method, ty);
            };
            let Some(sig) = decl.methods.iter().find(|m| m.name == *method) else {
                return err(format!("class `{class}` has no method `{method}`"));
            };
            Ok(sig.signature.subst(&[(decl.ty_param.clone(), ty.clone())]))
        }
        Term::DictLit { class, ty, .. } => Ok(Type::con(class.clone(), vec![ty.clone()])),
    }
}

fn method_type_from_record(
    index: &ProgramIndex<'_>,
    class: &str,
    method: &str,
    ty: &Type,
) -> Result<Type, TypeError> {
    let Some(data) = index.data(class) else {
        return err(format!("unknown class `{class}`"));
    };
    let Some(record) = &data.record else {
        return err(format!("`{class}` is not a dictionary type"));
    };
    let pos = record
        .iter()
        .position(|f| f.label == method)
        .ok_or_else(|| TypeError(format!("dictionary `{class}` has no method `{method}`")))?;
    let field = &data.ctors[0].fields[pos];
    Ok(field.subst(&[(data.ty_params[0].clone(), ty.clone())]))
}

/// Record label of the superclass dictionary `superclass` inside `class`.
pub fn super_label(superclass: &str, class: &str) -> String {
    let mut chars = superclass.chars();
    let head: String = chars
        .next()
        .map(|c| c.to_uppercase().collect())
        .unwrap_or_default();
    format!("{head}{}_{class}", chars.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superclass_labels_follow_go_export_rules() {
        assert_eq!(super_label("semigroup", "monoid"), "Semigroup_monoid");
    }
}
