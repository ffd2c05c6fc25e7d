//! Deterministic Go source text. Statements end in explicit semicolons and
//! indentation uses tabs.

use std::fmt::Write;

use super::{FuncDecl, GoDecl, GoExpr, GoProgram, GoType, Prim, PrimOp, Stmt, TypeBody, TypeDecl};

pub fn render(p: &GoProgram) -> String {
    let mut out = format!("package {}\n", p.package);
    let mut imports = p.imports.clone();
    imports.sort();
    imports.dedup();
    if !imports.is_empty() {
        out.push_str("\nimport (\n");
        for i in &imports {
            let _ = writeln!(out, "\t{}", quote(i));
        }
        out.push_str(")\n");
    }
    for d in &p.decls {
        out.push('\n');
        out.push_str(&render_decl(d));
    }
    out
}

pub fn render_decl(d: &GoDecl) -> String {
    match d {
        GoDecl::Type(t) => type_decl(t),
        GoDecl::Func(f) => func_decl(f),
    }
}

fn type_params(params: &[String]) -> String {
    if params.is_empty() {
        String::new()
    } else {
        format!("[{} any]", params.join(", "))
    }
}

fn type_decl(t: &TypeDecl) -> String {
    let head = format!("type {}{}", t.name, type_params(&t.params));
    match &t.body {
        // Non-generic sum types print as `any`, generic ones as the literal
        // empty interface.
        TypeBody::Interface if t.params.is_empty() => format!("{head} any;\n"),
        TypeBody::Interface => format!("{head} interface {{}};\n"),
        TypeBody::Struct(fields) => {
            let mut out = format!("{head} struct {{\n");
            for (name, ty) in fields {
                let _ = writeln!(out, "\t{name} {};", go_type(ty));
            }
            out.push_str("};\n");
            out
        }
    }
}

fn params(ps: &[(String, GoType)]) -> String {
    ps.iter()
        .map(|(n, t)| format!("{n} {}", go_type(t)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn results(rs: &[GoType]) -> String {
    match rs {
        [] => String::new(),
        [one] => format!(" {}", go_type(one)),
        _ => format!(" ({})", types(rs)),
    }
}

fn types(ts: &[GoType]) -> String {
    ts.iter().map(go_type).collect::<Vec<_>>().join(", ")
}

fn func_decl(f: &FuncDecl) -> String {
    let tp = type_params(&f.type_params);
    let mut out = if f.destructor {
        format!(
            "func {}{tp}({})({}) {{\n",
            f.name,
            params(&f.params),
            types(&f.results)
        )
    } else {
        format!(
            "func {}{tp} ({}){} {{\n",
            f.name,
            params(&f.params),
            results(&f.results)
        )
    };
    stmt(&mut out, &f.body, 1);
    out.push_str("}\n");
    out
}

pub fn go_type(t: &GoType) -> String {
    match t {
        GoType::Param(p) => p.clone(),
        GoType::Struct(n, args) | GoType::Iface(n, args) => {
            if args.is_empty() {
                n.clone()
            } else {
                format!("{n}[{}]", types(args))
            }
        }
        GoType::Func(ps, rs) => format!("func({}){}", types(ps), results(rs)),
        GoType::Any => "any".into(),
        GoType::Opaque(text) => text.clone(),
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push('\t');
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    let mut cur = s;
    loop {
        match cur {
            Stmt::Return(es) => {
                indent(out, level);
                let es: Vec<String> = es.iter().map(|e| expr(e, level)).collect();
                let _ = writeln!(out, "return {};", es.join(", "));
                return;
            }
            Stmt::Define { names, value, rest } => {
                indent(out, level);
                let op = if names.iter().all(|n| n == super::BLANK) {
                    "="
                } else {
                    ":="
                };
                let _ = writeln!(out, "{} {op} {};", names.join(", "), expr(value, level));
                cur = rest;
            }
            Stmt::Assert {
                value,
                ok,
                target,
                ty,
                rest,
            } => {
                indent(out, level);
                let _ = writeln!(
                    out,
                    "{value}, {ok} := {}.({});",
                    postfix(target, level),
                    go_type(ty)
                );
                cur = rest;
            }
            Stmt::If { cond, then, rest } => {
                indent(out, level);
                let _ = writeln!(out, "if ({}) {{", expr(cond, level));
                stmt(out, then, level + 1);
                indent(out, level);
                out.push_str("}\n");
                cur = rest;
            }
            Stmt::Block { inner, rest } => {
                indent(out, level);
                out.push_str("{\n");
                stmt(out, inner, level + 1);
                indent(out, level);
                out.push_str("};\n");
                cur = rest;
            }
            Stmt::Panic(msg) => {
                indent(out, level);
                let _ = writeln!(out, "panic({});", quote(msg));
                return;
            }
            Stmt::Done => return,
        }
    }
}

/// Go string literal.
pub fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\x{:02x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn render_expr(e: &GoExpr) -> String {
    expr(e, 0)
}

fn args(es: &[GoExpr], level: usize) -> String {
    es.iter()
        .map(|e| expr(e, level))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Expression in a position that binds tighter than any operator.
fn postfix(e: &GoExpr, level: usize) -> String {
    match e {
        GoExpr::Eq(..) | GoExpr::And(..) | GoExpr::FuncLit { .. } => {
            format!("({})", expr(e, level))
        }
        GoExpr::Prim(p) if !prim_is_primary(p) => format!("({})", expr(e, level)),
        _ => expr(e, level),
    }
}

fn prim_is_primary(p: &Prim) -> bool {
    let t = p.template.trim();
    matches!(p.op, PrimOp::Value(_)) || (t.starts_with('(') && balanced_outer(t))
}

/// Whether the opening parenthesis at the start closes at the very end.
fn balanced_outer(t: &str) -> bool {
    let mut depth = 0i32;
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i + 1 != t.len() {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

fn expr(e: &GoExpr, level: usize) -> String {
    match e {
        GoExpr::Var(n) => n.clone(),
        GoExpr::Call {
            func,
            type_args,
            args: a,
        } => {
            if type_args.is_empty() {
                format!("{func}({})", args(a, level))
            } else {
                format!("{func}[{}]({})", types(type_args), args(a, level))
            }
        }
        GoExpr::StructLit { ty, fields } => format!("{}{{{}}}", go_type(ty), args(fields, level)),
        GoExpr::FuncLit {
            params: ps,
            results: rs,
            body,
        } => {
            let head = format!("func ({}){}", params(ps), results(rs));
            if let Stmt::Return(es) = &**body {
                let es: Vec<String> = es.iter().map(|e| expr(e, level)).collect();
                format!("{head} {{ return {}; }}", es.join(", "))
            } else {
                let mut out = format!("{head} {{\n");
                stmt(&mut out, body, level + 1);
                indent(&mut out, level);
                out.push('}');
                out
            }
        }
        GoExpr::Field { target, field } => format!("{}.{field}", postfix(target, level)),
        GoExpr::Conv { ty, inner } => format!("({}({}))", go_type(ty), expr(inner, level)),
        GoExpr::Nil => "nil".into(),
        GoExpr::CallExpr { target, args: a } => {
            format!("{}({})", postfix(target, level), args(a, level))
        }
        GoExpr::Eq(a, b) => format!("{} == {}", operand(a, level), operand(b, level)),
        GoExpr::And(a, b) => {
            let left = match **a {
                GoExpr::And(..) => expr(a, level),
                _ => operand(a, level),
            };
            format!("{left} && {}", operand(b, level))
        }
        GoExpr::Prim(p) => {
            let rendered: Vec<String> = p.args.iter().map(|a| postfix(a, level)).collect();
            fill_template(&p.template, &rendered)
        }
    }
}

/// Replaces the holes `%1`, `%2`, ... in one left-to-right scan, so that
/// argument text is never rescanned.
pub fn fill_template(template: &str, args: &[String]) -> String {
    let mut out = String::new();
    let mut chars = template.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '%' || !chars.peek().is_some_and(char::is_ascii_digit) {
            out.push(c);
            continue;
        }
        let mut n = 0usize;
        while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
            n = n * 10 + d as usize;
            chars.next();
        }
        match n.checked_sub(1).and_then(|i| args.get(i)) {
            Some(a) => out.push_str(a),
            None => {
                let _ = write!(out, "%{n}");
            }
        }
    }
    out
}

fn operand(e: &GoExpr, level: usize) -> String {
    match e {
        GoExpr::Eq(..) | GoExpr::And(..) => format!("({})", expr(e, level)),
        _ => postfix(e, level),
    }
}
