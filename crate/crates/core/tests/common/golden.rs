//! Normalizations for comparing generated Go against reference listings.

/// Collapses every whitespace run to one space.
pub fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Go tokens without statement-terminating semicolons.
pub fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ';' {
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else if c == '"' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            out.push(chars[start..i.min(chars.len())].iter().collect());
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if [":=", "==", "!=", "<=", ">=", "&&", "||"].contains(&two.as_str()) {
                out.push(two);
                i += 2;
            } else {
                out.push(c.to_string());
                i += 1;
            }
        }
    }
    out
}

/// Renames identifiers through `map` (pairs of `from`, `to`).
pub fn rename(tokens: Vec<String>, map: &[(&str, &str)]) -> Vec<String> {
    tokens
        .into_iter()
        .map(|t| match map.iter().find(|(from, _)| *from == t) {
            Some((_, to)) => to.to_string(),
            None => t,
        })
        .collect()
}

/// First position where two token streams differ, with some context.
pub fn first_difference(a: &[String], b: &[String]) -> Option<String> {
    let n = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    if n == a.len() && n == b.len() {
        return None;
    }
    let ctx = |t: &[String]| t[n.saturating_sub(6)..(n + 6).min(t.len())].join(" ");
    Some(format!("at token {n}:\n  got:      {}\n  expected: {}", ctx(a), ctx(b)))
}
