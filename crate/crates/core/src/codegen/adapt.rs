//! Adaptation table: host types for base types and printing rules for
//! primitive constants.
//!
//! ```json
//! {"types":  {"int": {"go": "*big.Int", "imports": ["math/big"], "literal": "big.NewInt(%v)"}},
//!  "consts": {"int.plus": {"template": "new(big.Int).Add(%1, %2)", "arity": 2}}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CodegenError;
use crate::ir::builtins::{self, BOOL, FALSE, INT, STRING, TRUE};
use crate::ir::{Name, Program};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRule {
    pub go: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub imports: Vec<String>,
    /// Literal syntax with a `%v` hole for the decimal value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstRule {
    pub template: String,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub imports: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptationTable {
    #[serde(default)]
    pub types: BTreeMap<Name, TypeRule>,
    #[serde(default)]
    pub consts: BTreeMap<Name, ConstRule>,
}

fn rule(template: &str, arity: usize) -> ConstRule {
    ConstRule {
        template: template.into(),
        arity,
        imports: Vec::new(),
    }
}

impl AdaptationTable {
    /// Arbitrary-precision integers, Go strings and Go booleans.
    pub fn standard() -> Self {
        let big = vec!["math/big".to_string()];
        let mut types = BTreeMap::new();
        types.insert(
            INT.into(),
            TypeRule {
                go: "*big.Int".into(),
                imports: big.clone(),
                literal: Some("big.NewInt(%v)".into()),
            },
        );
        types.insert(
            STRING.into(),
            TypeRule {
                go: "string".into(),
                imports: Vec::new(),
                literal: None,
            },
        );
        types.insert(
            BOOL.into(),
            TypeRule {
                go: "bool".into(),
                imports: Vec::new(),
                literal: None,
            },
        );
        let mut consts = BTreeMap::new();
        consts.insert(TRUE.into(), rule("true", 0));
        consts.insert(FALSE.into(), rule("false", 0));
        for (name, template) in [
            ("int.plus", "new(big.Int).Add(%1, %2)"),
            ("int.minus", "new(big.Int).Sub(%1, %2)"),
            ("int.times", "new(big.Int).Mul(%1, %2)"),
            ("int.less", "(%1.Cmp(%2) < 0)"),
            ("int.less_eq", "(%1.Cmp(%2) <= 0)"),
            ("int.eq", "(%1.Cmp(%2) == 0)"),
            ("string.append", "(%1 + %2)"),
            ("string.eq", "(%1 == %2)"),
        ] {
            consts.insert(name.into(), rule(template, 2));
        }
        AdaptationTable { types, consts }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

/// The part of a table that applies to one program.
#[derive(Clone, Debug, Default)]
pub struct Active {
    pub types: BTreeMap<Name, TypeRule>,
    pub consts: BTreeMap<Name, ConstRule>,
}

impl Active {
    /// Selects the rules that apply to `p`. Rules for names the program
    /// does not have are ignored. Only the base types, a declared
    /// `datatype bool = False | True` and primitive constants can be
    /// adapted.
    pub fn new(table: &AdaptationTable, p: &Program) -> Result<Active, CodegenError> {
        let index = p.index();
        let mut active = Active::default();
        for (name, rule) in &table.types {
            if builtins::is_builtin_type(name) {
                active.types.insert(name.clone(), rule.clone());
                continue;
            }
            let Some(data) = index.data(name) else {
                continue;
            };
            let is_bool = name == BOOL
                && data.ty_params.is_empty()
                && data.record.is_none()
                && data.ctors.len() == 2
                && data.ctors.iter().all(|c| c.fields.is_empty())
                && data.ctors.iter().any(|c| c.name == TRUE)
                && data.ctors.iter().any(|c| c.name == FALSE);
            if !is_bool {
                return Err(CodegenError::Adaptation(format!(
                    "type `{name}` can not be adapted; only base types and `datatype bool = False | True` can"
                )));
            }
            for c in &data.ctors {
                if !table.consts.contains_key(&c.name) {
                    return Err(CodegenError::Adaptation(format!(
                        "adapted type `{name}` lacks a rule for constructor `{}`",
                        c.name
                    )));
                }
            }
            active.types.insert(name.clone(), rule.clone());
        }
        for (name, rule) in &table.consts {
            let arity = if let Some(a) = builtins::const_arity(name) {
                a
            } else if let Some((data, ctor)) = index.ctor(name) {
                if !active.types.contains_key(&data.name) {
                    continue;
                }
                ctor.fields.len()
            } else if index.entity(name).is_some() {
                return Err(CodegenError::Adaptation(format!(
                    "`{name}` can not be adapted; only primitives and `bool` constructors can"
                )));
            } else {
                continue;
            };
            if arity != rule.arity {
                return Err(CodegenError::Adaptation(format!(
                    "rule for `{name}` takes {} arguments, the constant takes {arity}",
                    rule.arity
                )));
            }
            active.consts.insert(name.clone(), rule.clone());
        }
        Ok(active)
    }
}
