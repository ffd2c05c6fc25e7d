//! Prints a resolved (not yet elaborated) program in the surface syntax.
//! Binder annotations are always printed, so parsing the output reproduces
//! the same annotated program.

use std::fmt::Write;

use crate::ir::{
    ClassDecl, ConstDecl, DataDecl, Declaration, Equation, FunDecl, InstanceDecl, Literal, Pattern,
    Program, Term, TyParam, Type,
};

pub fn program(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match d {
            Declaration::Data(d) => data(&mut out, d),
            Declaration::Fun(f) => fun(&mut out, f),
            Declaration::Class(c) => class(&mut out, c),
            Declaration::Instance(i) => instance(&mut out, i),
            Declaration::Const(c) => constant(&mut out, c),
        }
    }
    out
}

fn sort_text(classes: &[String]) -> String {
    if classes.len() == 1 {
        classes[0].clone()
    } else {
        format!("{{{}}}", classes.join(", "))
    }
}

/// Type text; the first occurrence of each variable in `sorts` carries its
/// sort annotation.
fn ty(t: &Type, sorts: &mut Vec<TyParam>) -> String {
    match t {
        Type::Var(v) => match sorts
            .iter()
            .position(|p| p.name == *v && !p.classes.is_empty())
        {
            Some(i) => {
                let p = sorts.remove(i);
                format!("('{v} :: {})", sort_text(&p.classes))
            }
            None => format!("'{v}"),
        },
        Type::Con(name, args) => match args.len() {
            0 => name.clone(),
            1 => format!("{} {name}", atype(&args[0], sorts)),
            _ => {
                let args: Vec<String> = args.iter().map(|a| ty(a, sorts)).collect();
                format!("({}) {name}", args.join(", "))
            }
        },
        Type::Fun(a, r) => {
            let a = match **a {
                Type::Fun(..) => format!("({})", ty(a, sorts)),
                _ => ty(a, sorts),
            };
            format!("{a} => {}", ty(r, sorts))
        }
    }
}

fn atype(t: &Type, sorts: &mut Vec<TyParam>) -> String {
    match t {
        Type::Fun(..) => format!("({})", ty(t, sorts)),
        Type::Con(_, args) if !args.is_empty() => format!("({})", ty(t, sorts)),
        _ => ty(t, sorts),
    }
}

fn plain(t: &Type) -> String {
    ty(t, &mut Vec::new())
}

fn data(out: &mut String, d: &DataDecl) {
    let params = match d.ty_params.len() {
        0 => String::new(),
        1 => format!("'{} ", d.ty_params[0]),
        _ => format!(
            "({}) ",
            d.ty_params
                .iter()
                .map(|p| format!("'{p}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    let ctors: Vec<String> = d
        .ctors
        .iter()
        .map(|c| {
            let mut s = c.name.clone();
            for f in &c.fields {
                s.push(' ');
                s.push_str(&atype(f, &mut Vec::new()));
            }
            s
        })
        .collect();
    let _ = writeln!(out, "datatype {params}{} = {}", d.name, ctors.join(" | "));
}

fn equations(out: &mut String, name: &str, eqs: &[Equation]) {
    for eq in eqs {
        let mut lhs = name.to_string();
        for p in &eq.params {
            lhs.push(' ');
            lhs.push_str(&apat(p));
        }
        let _ = writeln!(out, "  {lhs} = {}", term(&eq.rhs));
    }
}

fn fun(out: &mut String, f: &FunDecl) {
    let mut sorts = f.ty_params.clone();
    let _ = writeln!(
        out,
        "fun {} :: {} where",
        f.name,
        ty(&f.signature, &mut sorts)
    );
    equations(out, &f.name, &f.equations);
}

fn class(out: &mut String, c: &ClassDecl) {
    let supers = if c.superclasses.is_empty() {
        String::new()
    } else {
        format!(" <= {}", c.superclasses.join(", "))
    };
    let _ = writeln!(out, "class {}{supers} where", c.name);
    for m in &c.methods {
        let _ = writeln!(out, "  {} :: {}", m.name, plain(&m.signature));
    }
}

fn instance(out: &mut String, i: &InstanceDecl) {
    let constraints: Vec<String> = i
        .ty_params
        .iter()
        .filter(|p| !p.classes.is_empty())
        .map(|p| format!("'{} :: {}", p.name, sort_text(&p.classes)))
        .collect();
    let when = if constraints.is_empty() {
        String::new()
    } else {
        format!(" when {}", constraints.join(", "))
    };
    let _ = writeln!(
        out,
        "instance {} :: {}{when} where",
        plain(&i.head()),
        i.class
    );
    for m in &i.methods {
        equations(out, &m.name, &m.equations);
    }
}

fn constant(out: &mut String, c: &ConstDecl) {
    let _ = writeln!(
        out,
        "definition {} :: {} where",
        c.name,
        plain(&c.signature)
    );
    let _ = writeln!(out, "  {} = {}", c.name, term(&c.rhs));
}

fn pat(p: &Pattern) -> String {
    match p {
        Pattern::Con { ctor, args, .. } if !args.is_empty() => {
            let args: Vec<String> = args.iter().map(apat).collect();
            format!("{ctor} {}", args.join(" "))
        }
        _ => apat(p),
    }
}

fn apat(p: &Pattern) -> String {
    match p {
        Pattern::Var { name } => name.clone(),
        Pattern::Con { ctor, args, .. } if args.is_empty() => ctor.clone(),
        _ => format!("({})", pat(p)),
    }
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Int(n) if n.sign() == num_bigint::Sign::Minus => format!("(-{})", -n),
        Literal::Int(n) => n.to_string(),
        Literal::Str(s) => {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
    }
}

/// Term text at top level (no surrounding parentheses needed).
pub fn term(t: &Term) -> String {
    match t {
        Term::Abs { binder, ty, body } => format!("\\{binder} :: {}. {}", plain(ty), term(body)),
        Term::Case {
            scrutinee, clauses, ..
        } => {
            let clauses: Vec<String> = clauses
                .iter()
                .map(|c| format!("{} => {}", pat(&c.pattern), arm(&c.body)))
                .collect();
            format!("case {} of {}", term(scrutinee), clauses.join(" | "))
        }
        Term::App { .. } => {
            let (head, args) = t.spine();
            let mut s = atom(head);
            for a in args {
                s.push(' ');
                s.push_str(&atom(a));
            }
            s
        }
        _ => atom(t),
    }
}

/// Clause bodies are parenthesized when they could swallow the following
/// clauses.
fn arm(t: &Term) -> String {
    match t {
        Term::Case { .. } | Term::Abs { .. } => format!("({})", term(t)),
        _ => term(t),
    }
}

fn atom(t: &Term) -> String {
    match t {
        Term::Var { name } | Term::Ref { name, .. } => name.clone(),
        Term::Lit { lit } => literal(lit),
        Term::Method { method, .. } => method.clone(),
        Term::DictLit { class, .. } => format!("<{class} dictionary>"),
        _ => format!("({})", term(t)),
    }
}
