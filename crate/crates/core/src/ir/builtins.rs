//! Opaque base types and primitive constants.
//!
//! These exist so that adapted programs can compute with machine strings and
//! arbitrary-precision integers. Comparisons return the program's own `bool`
//! datatype, which must then be declared as `datatype bool = False | True`.

use num_bigint::BigInt;

use super::Type;

pub const INT: &str = "int";
pub const STRING: &str = "string";
/// Type given to otherwise unconstrained instantiations.
pub const ANY: &str = "any";
pub const BOOL: &str = "bool";
pub const TRUE: &str = "True";
pub const FALSE: &str = "False";

pub const TYPES: &[&str] = &[INT, STRING, ANY];

pub fn is_builtin_type(name: &str) -> bool {
    TYPES.contains(&name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sort {
    Int,
    Str,
    Bool,
}

const CONSTS: &[(&str, &[Sort], Sort)] = &[
    ("int.plus", &[Sort::Int, Sort::Int], Sort::Int),
    ("int.minus", &[Sort::Int, Sort::Int], Sort::Int),
    ("int.times", &[Sort::Int, Sort::Int], Sort::Int),
    ("int.less", &[Sort::Int, Sort::Int], Sort::Bool),
    ("int.less_eq", &[Sort::Int, Sort::Int], Sort::Bool),
    ("int.eq", &[Sort::Int, Sort::Int], Sort::Bool),
    ("string.append", &[Sort::Str, Sort::Str], Sort::Str),
    ("string.eq", &[Sort::Str, Sort::Str], Sort::Bool),
];

fn sort_type(sort: Sort) -> Type {
    match sort {
        Sort::Int => Type::base(INT),
        Sort::Str => Type::base(STRING),
        Sort::Bool => Type::base(BOOL),
    }
}

pub fn is_builtin_const(name: &str) -> bool {
    CONSTS.iter().any(|(n, _, _)| *n == name)
}

pub fn const_names() -> impl Iterator<Item = &'static str> {
    CONSTS.iter().map(|(n, _, _)| *n)
}

pub fn const_signature(name: &str) -> Option<Type> {
    CONSTS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, args, res)| Type::arrows(args.iter().map(|s| sort_type(*s)), sort_type(*res)))
}

pub fn const_arity(name: &str) -> Option<usize> {
    CONSTS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, args, _)| args.len())
}

/// Whether the builtin's result is the program's `bool` datatype.
pub fn returns_bool(name: &str) -> bool {
    CONSTS
        .iter()
        .any(|(n, _, res)| *n == name && *res == Sort::Bool)
}

/// Value domain shared by both evaluators for primitive operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseValue {
    Int(BigInt),
    Str(String),
    Bool(bool),
}

pub fn apply(name: &str, args: &[BaseValue]) -> Result<BaseValue, String> {
    use BaseValue::*;
    let out = match (name, args) {
        ("int.plus", [Int(a), Int(b)]) => Int(a + b),
        ("int.minus", [Int(a), Int(b)]) => Int(a - b),
        ("int.times", [Int(a), Int(b)]) => Int(a * b),
        ("int.less", [Int(a), Int(b)]) => Bool(a < b),
        ("int.less_eq", [Int(a), Int(b)]) => Bool(a <= b),
        ("int.eq", [Int(a), Int(b)]) => Bool(a == b),
        ("string.append", [Str(a), Str(b)]) => Str(format!("{a}{b}")),
        ("string.eq", [Str(a), Str(b)]) => Bool(a == b),
        _ => return Err(format!("bad primitive application `{name}` to {args:?}")),
    };
    Ok(out)
}
