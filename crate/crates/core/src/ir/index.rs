use std::collections::{HashMap, VecDeque};

use super::builtins;
use super::{
    ClassDecl, ConstDecl, CtorDecl, DataDecl, Declaration, FunDecl, InstanceDecl, Name, Program,
    Type,
};

/// What a value-level name refers to. Constructors, functions, constants,
/// class methods and builtins share one namespace.
#[derive(Clone, Copy, Debug)]
pub enum Entity<'a> {
    Ctor { data: &'a DataDecl, index: usize },
    Fun(&'a FunDecl),
    Const(&'a ConstDecl),
    Method { class: &'a ClassDecl, index: usize },
    Builtin(&'a str),
}

#[derive(Clone, Copy, Debug)]
pub enum TypeEntity<'a> {
    Data(&'a DataDecl),
    Builtin(&'a str),
}

/// Name lookup tables over a program. The first declaration of a name wins;
/// duplicates are reported by `validate`.
#[derive(Debug)]
pub struct ProgramIndex<'a> {
    pub program: &'a Program,
    values: HashMap<&'a str, Entity<'a>>,
    types: HashMap<&'a str, &'a DataDecl>,
    classes: HashMap<&'a str, &'a ClassDecl>,
    instances: Vec<&'a InstanceDecl>,
}

impl<'a> ProgramIndex<'a> {
    pub fn new(program: &'a Program) -> Self {
        let mut values = HashMap::new();
        let mut types = HashMap::new();
        let mut classes = HashMap::new();
        let mut instances = Vec::new();
        for decl in &program.decls {
            match decl {
                Declaration::Data(data) => {
                    types.entry(data.name.as_str()).or_insert(data);
                    for (index, ctor) in data.ctors.iter().enumerate() {
                        values
                            .entry(ctor.name.as_str())
                            .or_insert(Entity::Ctor { data, index });
                    }
                }
                Declaration::Fun(f) => {
                    values.entry(f.name.as_str()).or_insert(Entity::Fun(f));
                }
                Declaration::Const(c) => {
                    values.entry(c.name.as_str()).or_insert(Entity::Const(c));
                }
                Declaration::Class(class) => {
                    classes.entry(class.name.as_str()).or_insert(class);
                    for (index, m) in class.methods.iter().enumerate() {
                        values
                            .entry(m.name.as_str())
                            .or_insert(Entity::Method { class, index });
                    }
                }
                Declaration::Instance(inst) => instances.push(inst),
            }
        }
        ProgramIndex {
            program,
            values,
            types,
            classes,
            instances,
        }
    }

    pub fn entity(&self, name: &str) -> Option<Entity<'a>> {
        if let Some(e) = self.values.get(name) {
            return Some(*e);
        }
        builtins::const_names()
            .find(|n| *n == name)
            .map(Entity::Builtin)
    }

    pub fn type_entity(&self, name: &str) -> Option<TypeEntity<'a>> {
        if let Some(d) = self.types.get(name) {
            return Some(TypeEntity::Data(d));
        }
        builtins::TYPES
            .iter()
            .find(|n| **n == name)
            .map(|n| TypeEntity::Builtin(n))
    }

    pub fn type_arity(&self, name: &str) -> Option<usize> {
        match self.type_entity(name)? {
            TypeEntity::Data(d) => Some(d.ty_params.len()),
            TypeEntity::Builtin(_) => Some(0),
        }
    }

    pub fn data(&self, name: &str) -> Option<&'a DataDecl> {
        self.types.get(name).copied()
    }

    pub fn ctor(&self, name: &str) -> Option<(&'a DataDecl, &'a CtorDecl)> {
        match self.values.get(name)? {
            Entity::Ctor { data, index } => Some((data, &data.ctors[*index])),
            _ => None,
        }
    }

    pub fn class(&self, name: &str) -> Option<&'a ClassDecl> {
        self.classes.get(name).copied()
    }

    pub fn classes(&self) -> impl Iterator<Item = &'a ClassDecl> + '_ {
        self.program.decls.iter().filter_map(|d| match d {
            Declaration::Class(c) => Some(c),
            _ => None,
        })
    }

    pub fn instances(&self) -> &[&'a InstanceDecl] {
        &self.instances
    }

    pub fn instances_for(&self, class: &str, tycon: &str) -> Vec<&'a InstanceDecl> {
        self.instances
            .iter()
            .copied()
            .filter(|i| i.class == class && i.tycon == tycon)
            .collect()
    }

    /// Type parameters and signature of a referenced value.
    pub fn scheme(&self, name: &str) -> Option<(Vec<Name>, Type)> {
        Some(match self.entity(name)? {
            Entity::Ctor { data, index } => {
                let result = Type::con(
                    data.name.clone(),
                    data.ty_params
                        .iter()
                        .map(|p| Type::var(p.clone()))
                        .collect(),
                );
                (
                    data.ty_params.clone(),
                    Type::arrows(data.ctors[index].fields.iter().cloned(), result),
                )
            }
            Entity::Fun(f) => (
                f.ty_params.iter().map(|p| p.name.clone()).collect(),
                f.signature.clone(),
            ),
            Entity::Const(c) => (c.ty_params(), c.signature.clone()),
            Entity::Method { class, index } => (
                vec![class.ty_param.clone()],
                class.methods[index].signature.clone(),
            ),
            Entity::Builtin(b) => (Vec::new(), builtins::const_signature(b)?),
        })
    }

    /// Instantiated type of a reference.
    pub fn ref_type(&self, name: &str, type_args: &[Type]) -> Option<Type> {
        let (params, sig) = self.scheme(name)?;
        if params.len() != type_args.len() {
            return None;
        }
        let map: Vec<(Name, Type)> = params.into_iter().zip(type_args.iter().cloned()).collect();
        Some(sig.subst(&map))
    }

    /// Field types of a constructor at the given type arguments.
    pub fn ctor_fields(&self, ctor: &str, type_args: &[Type]) -> Option<Vec<Type>> {
        let (data, decl) = self.ctor(ctor)?;
        let map: Vec<(Name, Type)> = data
            .ty_params
            .iter()
            .cloned()
            .zip(type_args.iter().cloned())
            .collect();
        Some(decl.fields.iter().map(|f| f.subst(&map)).collect())
    }

    /// Shortest chain of superclass steps from `from` to `to` (empty when
    /// they are equal). Ties resolve in declaration order.
    pub fn super_path(&self, from: &str, to: &str) -> Option<Vec<Name>> {
        let mut queue = VecDeque::new();
        let mut seen = vec![from.to_string()];
        queue.push_back((from.to_string(), Vec::<Name>::new()));
        while let Some((class, path)) = queue.pop_front() {
            if class == to {
                return Some(path);
            }
            let Some(decl) = self.class(&class) else {
                continue;
            };
            for sup in &decl.superclasses {
                if !seen.contains(sup) {
                    seen.push(sup.clone());
                    let mut next = path.clone();
                    next.push(sup.clone());
                    queue.push_back((sup.clone(), next));
                }
            }
        }
        None
    }

    /// Whether `class` is `target` or has it as a transitive superclass.
    pub fn entails(&self, class: &str, target: &str) -> bool {
        self.super_path(class, target).is_some()
    }
}
