use num_bigint::BigInt;

use super::{Diagnostic, DiagnosticKind, SourcePos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase identifier, possibly qualified (`int.plus`) or primed.
    Ident(String),
    /// Uppercase identifier: constructors and type names.
    Upper(String),
    /// Type variable without the leading quote.
    TyVar(String),
    Int(BigInt),
    Str(String),
    Kw(Kw),
    Sym(Sym),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Datatype,
    Fun,
    Class,
    Instance,
    Definition,
    Where,
    When,
    Case,
    Of,
    Let,
    In,
    If,
    Then,
    Else,
}

impl Kw {
    pub fn starts_decl(self) -> bool {
        matches!(
            self,
            Kw::Datatype | Kw::Fun | Kw::Class | Kw::Instance | Kw::Definition
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Eq,
    Bar,
    DoubleColon,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Backslash,
    Dot,
    Plus,
    Minus,
    Star,
    Less,
    LessEq,
}

impl Sym {
    /// Method or builtin name an infix operator stands for.
    pub fn operator_name(self) -> Option<&'static str> {
        Some(match self {
            Sym::Plus => "plus",
            Sym::Minus => "minus",
            Sym::Star => "times",
            Sym::Less => "less",
            Sym::LessEq => "less_eq",
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
    /// First token on its line.
    pub line_start: bool,
}

const QUALIFIERS: &[&str] = &["int", "string"];

fn keyword(word: &str) -> Option<Kw> {
    Some(match word {
        "datatype" => Kw::Datatype,
        "fun" => Kw::Fun,
        "class" => Kw::Class,
        "instance" => Kw::Instance,
        "definition" => Kw::Definition,
        "where" => Kw::Where,
        "when" => Kw::When,
        "case" => Kw::Case,
        "of" => Kw::Of,
        "let" => Kw::Let,
        "in" => Kw::In,
        "if" => Kw::If,
        "then" => Kw::Then,
        "else" => Kw::Else,
        _ => return None,
    })
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
    last_line: usize,
}

impl Lexer {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> SourcePos {
        SourcePos {
            line: self.line,
            column: self.col,
        }
    }

    fn error(&self, pos: SourcePos, message: String) -> Diagnostic {
        Diagnostic {
            pos,
            kind: DiagnosticKind::Lex,
            message,
        }
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('-'), Some('-')) => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('('), Some('*')) => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match (self.peek(0), self.peek(1)) {
                            (Some('*'), Some(')')) => {
                                self.bump();
                                self.bump();
                                depth -= 1;
                            }
                            (Some('('), Some('*')) => {
                                self.bump();
                                self.bump();
                                depth += 1;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                return Err(self.error(start, "unterminated comment".into()))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if !is_ident_char(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn string(&mut self, start: SourcePos) -> Result<Tok, Diagnostic> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.error(start, "unterminated string literal".into()))
                }
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('\\') => s.push('\\'),
                    Some('"') => s.push('"'),
                    other => {
                        return Err(self.error(
                            start,
                            format!("unknown escape `\\{}`", other.unwrap_or(' ')),
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, Diagnostic> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(c) = self.peek(0) else {
            return Ok(None);
        };
        let tok = match c {
            '"' => self.string(pos)?,
            '\'' => {
                self.bump();
                let name = self.word();
                if name.is_empty() || !name.starts_with(|c: char| c.is_alphabetic()) {
                    return Err(self.error(pos, "expected a type variable name after `'`".into()));
                }
                Tok::TyVar(name)
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(d) = self.peek(0).filter(char::is_ascii_digit) {
                    digits.push(d);
                    self.bump();
                }
                Tok::Int(digits.parse().expect("decimal digits"))
            }
            c if (c.is_alphabetic() && c != 'λ') || c == '_' => {
                let mut word = self.word();
                if QUALIFIERS.contains(&word.as_str())
                    && self.peek(0) == Some('.')
                    && self.peek(1).is_some_and(|c| c.is_alphabetic())
                {
                    self.bump();
                    word.push('.');
                    word.push_str(&self.word());
                }
                if let Some(kw) = keyword(&word) {
                    Tok::Kw(kw)
                } else if word.starts_with(char::is_uppercase) {
                    Tok::Upper(word)
                } else {
                    Tok::Ident(word)
                }
            }
            _ => {
                let two: String = [Some(c), self.peek(1)].iter().flatten().collect();
                let (sym, len) = match two.as_str() {
                    "::" => (Sym::DoubleColon, 2),
                    "=>" => (Sym::Arrow, 2),
                    "<=" => (Sym::LessEq, 2),
                    _ => match c {
                        '=' => (Sym::Eq, 1),
                        '|' => (Sym::Bar, 1),
                        '(' => (Sym::LParen, 1),
                        ')' => (Sym::RParen, 1),
                        '{' => (Sym::LBrace, 1),
                        '}' => (Sym::RBrace, 1),
                        ',' => (Sym::Comma, 1),
                        '\\' | 'λ' => (Sym::Backslash, 1),
                        '.' => (Sym::Dot, 1),
                        '+' => (Sym::Plus, 1),
                        '-' => (Sym::Minus, 1),
                        '*' => (Sym::Star, 1),
                        '<' => (Sym::Less, 1),
                        '⇒' => (Sym::Arrow, 1),
                        '⊆' => (Sym::LessEq, 1),
                        other => {
                            return Err(self.error(pos, format!("unexpected character `{other}`")))
                        }
                    },
                };
                for _ in 0..len {
                    self.bump();
                }
                Tok::Sym(sym)
            }
        };
        let line_start = pos.line != self.last_line;
        self.last_line = pos.line;
        Ok(Some(Token {
            tok,
            pos,
            line_start,
        }))
    }
}

/// Splits source text into tokens. Lexing errors are collected; the
/// offending character is skipped so later declarations still get checked.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
        last_line: 0,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    loop {
        match lx.next_token() {
            Ok(Some(t)) => tokens.push(t),
            Ok(None) => break,
            Err(d) => {
                errors.push(d);
                if lx.bump().is_none() {
                    break;
                }
            }
        }
    }
    (tokens, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let (t, e) = lex(src);
        assert!(e.is_empty(), "{e:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn qualified_builtins_are_single_identifiers() {
        assert_eq!(
            toks("int.plus x"),
            vec![Tok::Ident("int.plus".into()), Tok::Ident("x".into())]
        );
        assert_eq!(
            toks("\\x. x"),
            vec![
                Tok::Sym(Sym::Backslash),
                Tok::Ident("x".into()),
                Tok::Sym(Sym::Dot),
                Tok::Ident("x".into())
            ]
        );
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(toks("⇒ ⊆ λ"), toks("=> <= \\"));
    }

    #[test]
    fn comments_nest_and_lines_are_tracked() {
        let (t, e) = lex("a (* x (* y *) *)\n  -- c\n  b");
        assert!(e.is_empty());
        assert_eq!(t.len(), 2);
        assert!(t[1].line_start);
        assert_eq!((t[1].pos.line, t[1].pos.column), (3, 3));
    }

    #[test]
    fn primes_and_type_variables() {
        assert_eq!(
            toks("hd2' 'a"),
            vec![Tok::Ident("hd2'".into()), Tok::TyVar("a".into())]
        );
    }

    #[test]
    fn bad_character_reports_position() {
        let (_, e) = lex("x\n  #");
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].pos.line, e[0].pos.column), (2, 3));
    }
}
