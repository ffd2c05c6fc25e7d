//! Go identifiers: exported top-level names, the destructor and field
//! naming scheme, and a scoped allocator for local names.

use std::collections::HashSet;

const KEYWORDS: &[&str] = &[
    "break",
    "case",
    "chan",
    "const",
    "continue",
    "default",
    "defer",
    "else",
    "fallthrough",
    "for",
    "func",
    "go",
    "goto",
    "if",
    "import",
    "interface",
    "map",
    "package",
    "range",
    "return",
    "select",
    "struct",
    "switch",
    "type",
    "var",
];

const PREDECLARED: &[&str] = &[
    "any",
    "bool",
    "byte",
    "comparable",
    "complex64",
    "complex128",
    "error",
    "float32",
    "float64",
    "int",
    "int8",
    "int16",
    "int32",
    "int64",
    "rune",
    "string",
    "uint",
    "uint8",
    "uint16",
    "uint32",
    "uint64",
    "uintptr",
    "true",
    "false",
    "iota",
    "nil",
    "append",
    "cap",
    "clear",
    "close",
    "complex",
    "copy",
    "delete",
    "imag",
    "len",
    "make",
    "max",
    "min",
    "new",
    "panic",
    "print",
    "println",
    "real",
    "recover",
];

/// Package names that printing rules may refer to.
pub const PACKAGES: &[&str] = &["big"];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name) || PREDECLARED.contains(&name) || PACKAGES.contains(&name)
}

/// Replaces characters Go does not allow in identifiers.
pub fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    match s.chars().next() {
        None => "x".into(),
        Some(c) if c.is_numeric() => format!("x{s}"),
        _ => s,
    }
}

/// Exported form of an IR name: sanitized with an upper-case first letter.
pub fn exported(name: &str) -> String {
    let s = sanitize(name);
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => s,
    }
}

/// Local form of an IR name; reserved words get a trailing underscore.
pub fn local(name: &str) -> String {
    let mut s = sanitize(name);
    while is_reserved(&s) {
        s.push('_');
    }
    s
}

/// Letter suffixes `a`, `b`, ..., `z`, `aa`, `ab`, ...
pub fn suffix(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Struct field names `A`, `Aa`, `Ab`, ...
pub fn field_name(i: usize) -> String {
    if i == 0 {
        "A".into()
    } else {
        format!("A{}", suffix(i - 1))
    }
}

pub fn dest_name(ctor_go: &str) -> String {
    format!("{ctor_go}_dest")
}

/// Allocates top-level names in declaration order, appending `_` on
/// collision.
#[derive(Debug, Default)]
pub struct GlobalNames {
    taken: HashSet<String>,
}

impl GlobalNames {
    pub fn claim(&mut self, wanted: String) -> String {
        let mut name = wanted;
        while self.taken.contains(&name) || is_reserved(&name) {
            name.push('_');
        }
        self.taken.insert(name.clone());
        name
    }

    pub fn taken(&self) -> &HashSet<String> {
        &self.taken
    }
}

/// Local names of one Go function. Names are never shadowed: a fresh name
/// avoids everything visible in enclosing scopes as well as the reserved
/// set (globals, type parameters, package names).
#[derive(Debug, Default)]
pub struct Locals {
    reserved: HashSet<String>,
    scopes: Vec<HashSet<String>>,
}

impl Locals {
    pub fn new(reserved: HashSet<String>) -> Self {
        Locals {
            reserved,
            scopes: vec![HashSet::new()],
        }
    }

    pub fn is_taken(&self, name: &str) -> bool {
        is_reserved(name) || self.reserved.contains(name) || self.scopes.iter().any(|s| s.contains(name))
    }

    fn take(&mut self, name: String) -> String {
        self.scopes.last_mut().expect("scope").insert(name.clone());
        name
    }

    /// `base` itself when free, otherwise `base` with the first free letter
    /// suffix.
    pub fn fresh(&mut self, base: &str) -> String {
        let base = local(base);
        if !self.is_taken(&base) {
            return self.take(base);
        }
        let mut k = 0;
        loop {
            let candidate = format!("{base}{}", suffix(k));
            if !self.is_taken(&candidate) {
                return self.take(candidate);
            }
            k += 1;
        }
    }

    /// The first free single-letter name out of `letters`, falling back to
    /// [`Locals::fresh`] on the first one.
    pub fn fresh_letter(&mut self, letters: &str) -> String {
        for c in letters.chars() {
            let s = c.to_string();
            if !self.is_taken(&s) {
                return self.take(s);
            }
        }
        let first = letters.chars().next().expect("letters").to_string();
        self.fresh(&first)
    }

    pub fn push(&mut self) {
        self.scopes.push(HashSet::new());
    }

    pub fn pop(&mut self) {
        self.scopes.pop();
    }
}
