//! Recursive-descent parser for the surface syntax.
//!
//! Declarations are delimited by their leading keyword, so a syntax error
//! only loses the declaration it occurs in. Inside a `where` block the
//! items (equations, method signatures) follow an offside rule: an item
//! starts at a token that begins a line at or left of the column of the
//! first item. A leading `|` on such a line is an optional separator.

use super::lexer::{Kw, Sym, Tok, Token};
use super::syntax::{SDecl, SEquation, SPat, STerm, SType};
use super::{Diagnostic, DiagnosticKind, SourcePos};

type PResult<T> = Result<T, Diagnostic>;

/// Parses a whole token stream into declarations.
pub fn parse_decls(tokens: &[Token]) -> (Vec<SDecl>, Vec<Diagnostic>) {
    let mut decls = Vec::new();
    let mut errors = Vec::new();
    let mut start = 0;
    while start < tokens.len() {
        let mut end = start + 1;
        while end < tokens.len() && !matches!(tokens[end].tok, Tok::Kw(k) if k.starts_decl()) {
            end += 1;
        }
        let mut cur = Cursor::new(&tokens[start..end]);
        match cur.decl() {
            Ok(d) => decls.push(d),
            Err(e) => errors.push(e),
        }
        start = end;
    }
    (decls, errors)
}

/// Parses a whitespace-separated sequence of atomic terms, as used for the
/// arguments of an entry call.
pub fn parse_atoms(tokens: &[Token]) -> PResult<Vec<STerm>> {
    let mut cur = Cursor::new(tokens);
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(cur.atom()?);
    }
    Ok(out)
}

/// Parses a single term spanning the whole token stream.
pub fn parse_term(tokens: &[Token]) -> PResult<STerm> {
    let mut cur = Cursor::new(tokens);
    let t = cur.term()?;
    cur.expect_end()?;
    Ok(t)
}

struct Cursor<'t> {
    toks: &'t [Token],
    i: usize,
}

impl<'t> Cursor<'t> {
    fn new(toks: &'t [Token]) -> Self {
        Cursor { toks, i: 0 }
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'t Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> SourcePos {
        match self.toks.get(self.i).or(self.toks.last()) {
            Some(t) => t.pos,
            None => SourcePos { line: 1, column: 1 },
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            pos: self.pos(),
            kind: DiagnosticKind::Parse,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", describe(t))),
            None => self.error(format!("expected {wanted}, found end of declaration")),
        }
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.i);
        self.i += 1;
        t
    }

    fn eat_sym(&mut self, s: Sym) -> bool {
        if self.peek() == Some(&Tok::Sym(s)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if self.peek() == Some(&Tok::Kw(k)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: Sym) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", sym_text(s)))
        }
    }

    fn expect_kw(&mut self, k: Kw) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", format!("{k:?}").to_lowercase()))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.unexpected("end of declaration")
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.i += 1;
                Ok(s.clone())
            }
            _ => self.unexpected("a lowercase name"),
        }
    }

    /// Lowercase name or a parenthesized operator `(+)`.
    fn value_name(&mut self) -> PResult<String> {
        if let Some(name) = self.paren_operator() {
            return Ok(name);
        }
        self.ident()
    }

    fn paren_operator(&mut self) -> Option<String> {
        if let (Some(Tok::Sym(Sym::LParen)), Some(Tok::Sym(op)), Some(Tok::Sym(Sym::RParen))) =
            (self.peek(), self.peek_at(1), self.peek_at(2))
        {
            let name = op.operator_name()?;
            self.i += 3;
            return Some(name.to_string());
        }
        None
    }

    fn type_name(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) | Some(Tok::Upper(s)) => {
                self.i += 1;
                Ok(s.clone())
            }
            _ => self.unexpected("a type name"),
        }
    }

    /// Splits the remaining tokens into offside-delimited items.
    fn where_items(&mut self) -> Vec<&'t [Token]> {
        let rest = &self.toks[self.i..];
        self.i = self.toks.len();
        let Some(first) = rest.first() else {
            return Vec::new();
        };
        let col = first.pos.column;
        let mut items = Vec::new();
        let mut start = 0;
        for k in 1..=rest.len() {
            let boundary = k == rest.len() || (rest[k].line_start && rest[k].pos.column <= col);
            if boundary {
                let mut item = &rest[start..k];
                if matches!(item.first().map(|t| &t.tok), Some(Tok::Sym(Sym::Bar))) {
                    item = &item[1..];
                }
                if !item.is_empty() {
                    items.push(item);
                }
                start = k;
            }
        }
        items
    }

    fn decl(&mut self) -> PResult<SDecl> {
        let pos = self.pos();
        match self.bump().map(|t| &t.tok) {
            Some(Tok::Kw(Kw::Datatype)) => self.datatype(pos),
            Some(Tok::Kw(Kw::Fun)) => {
                let name = self.value_name()?;
                self.expect_sym(Sym::DoubleColon)?;
                let signature = self.ty()?;
                self.expect_kw(Kw::Where)?;
                let equations = self.equations()?;
                if equations.is_empty() {
                    return self.error(format!("function `{name}` has no equations"));
                }
                Ok(SDecl::Fun {
                    name,
                    signature,
                    equations,
                    pos,
                })
            }
            Some(Tok::Kw(Kw::Class)) => self.class(pos),
            Some(Tok::Kw(Kw::Instance)) => self.instance(pos),
            Some(Tok::Kw(Kw::Definition)) => {
                let name = self.value_name()?;
                self.expect_sym(Sym::DoubleColon)?;
                let signature = self.ty()?;
                self.expect_kw(Kw::Where)?;
                let mut equations = self.equations()?;
                if equations.len() != 1 || !equations[0].params.is_empty() {
                    return Err(Diagnostic {
                        pos,
                        kind: DiagnosticKind::Parse,
                        message: format!(
                            "definition `{name}` needs exactly one equation `{name} = ...`"
                        ),
                    });
                }
                let eq = equations.pop().expect("one equation");
                Ok(SDecl::Definition {
                    name,
                    signature,
                    rhs: eq.rhs,
                    pos,
                })
            }
            _ => {
                self.i = 0;
                self.unexpected("a declaration")
            }
        }
    }

    fn datatype(&mut self, pos: SourcePos) -> PResult<SDecl> {
        let mut params = Vec::new();
        match self.peek() {
            Some(Tok::TyVar(v)) => {
                params.push(v.clone());
                self.i += 1;
            }
            Some(Tok::Sym(Sym::LParen)) => {
                self.i += 1;
                loop {
                    match self.peek() {
                        Some(Tok::TyVar(v)) => {
                            params.push(v.clone());
                            self.i += 1;
                        }
                        _ => return self.unexpected("a type variable"),
                    }
                    if !self.eat_sym(Sym::Comma) {
                        break;
                    }
                }
                self.expect_sym(Sym::RParen)?;
            }
            _ => {}
        }
        let name = self.type_name()?;
        self.expect_sym(Sym::Eq)?;
        let mut ctors = Vec::new();
        self.eat_sym(Sym::Bar);
        loop {
            let ctor = match self.peek() {
                Some(Tok::Upper(c)) => c.clone(),
                _ => return self.unexpected("a constructor name"),
            };
            self.i += 1;
            let mut fields = Vec::new();
            while !self.at_end() && self.peek() != Some(&Tok::Sym(Sym::Bar)) {
                fields.push(self.atype()?);
            }
            ctors.push((ctor, fields));
            if !self.eat_sym(Sym::Bar) {
                break;
            }
        }
        self.expect_end()?;
        Ok(SDecl::Data {
            name,
            params,
            ctors,
            pos,
        })
    }

    fn class(&mut self, pos: SourcePos) -> PResult<SDecl> {
        let name = self.ident()?;
        let mut superclasses = Vec::new();
        if self.eat_sym(Sym::LessEq) {
            loop {
                superclasses.push(self.ident()?);
                if !self.eat_sym(Sym::Comma) {
                    break;
                }
            }
        }
        self.expect_kw(Kw::Where)?;
        let mut methods = Vec::new();
        for item in self.where_items() {
            let mut c = Cursor::new(item);
            let mpos = c.pos();
            let m = c.value_name()?;
            c.expect_sym(Sym::DoubleColon)?;
            let ty = c.ty()?;
            c.expect_end()?;
            methods.push((m, ty, mpos));
        }
        Ok(SDecl::Class {
            name,
            superclasses,
            methods,
            pos,
        })
    }

    fn instance(&mut self, pos: SourcePos) -> PResult<SDecl> {
        let head = self.ty()?;
        self.expect_sym(Sym::DoubleColon)?;
        let class = self.ident()?;
        let mut constraints = Vec::new();
        if self.eat_kw(Kw::When) {
            loop {
                let var = match self.peek() {
                    Some(Tok::TyVar(v)) => v.clone(),
                    _ => return self.unexpected("a type variable"),
                };
                self.i += 1;
                self.expect_sym(Sym::DoubleColon)?;
                constraints.push((var, self.sort()?));
                if !self.eat_sym(Sym::Comma) {
                    break;
                }
            }
        }
        self.expect_kw(Kw::Where)?;
        let equations = self.equations()?;
        Ok(SDecl::Instance {
            head,
            class,
            constraints,
            equations,
            pos,
        })
    }

    fn sort(&mut self) -> PResult<Vec<String>> {
        if self.eat_sym(Sym::LBrace) {
            let mut classes = Vec::new();
            if !self.eat_sym(Sym::RBrace) {
                loop {
                    classes.push(self.ident()?);
                    if !self.eat_sym(Sym::Comma) {
                        break;
                    }
                }
                self.expect_sym(Sym::RBrace)?;
            }
            Ok(classes)
        } else {
            Ok(vec![self.ident()?])
        }
    }

    fn equations(&mut self) -> PResult<Vec<SEquation>> {
        self.where_items()
            .into_iter()
            .map(|item| {
                let mut c = Cursor::new(item);
                let eq = c.equation()?;
                c.expect_end()?;
                Ok(eq)
            })
            .collect()
    }

    fn equation(&mut self) -> PResult<SEquation> {
        let pos = self.pos();
        let prefix = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Sym(Sym::LParen)), Some(Tok::Sym(op)))
                if op.operator_name().is_some()
                    && self.peek_at(2) == Some(&Tok::Sym(Sym::RParen)) =>
            {
                true
            }
            (Some(Tok::Ident(_)), next) => {
                !matches!(next, Some(Tok::Sym(op)) if op.operator_name().is_some())
            }
            _ => false,
        };
        let (name, params) = if prefix {
            let name = self.value_name()?;
            let mut params = Vec::new();
            while !self.at_end() && self.peek() != Some(&Tok::Sym(Sym::Eq)) {
                params.push(self.apat()?);
            }
            (name, params)
        } else {
            let lhs = self.pat()?;
            let op = match self.peek() {
                Some(Tok::Sym(op)) if op.operator_name().is_some() => *op,
                _ => return self.unexpected("an infix operator"),
            };
            self.i += 1;
            let rhs = self.pat()?;
            (
                op.operator_name().expect("checked").to_string(),
                vec![lhs, rhs],
            )
        };
        self.expect_sym(Sym::Eq)?;
        let rhs = self.term()?;
        Ok(SEquation {
            name,
            params,
            rhs,
            pos,
        })
    }

    // Types.

    fn ty(&mut self) -> PResult<SType> {
        let lhs = self.btype()?;
        if self.eat_sym(Sym::Arrow) {
            let rhs = self.ty()?;
            return Ok(SType::Fun(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn btype(&mut self) -> PResult<SType> {
        let mut t = self.atype()?;
        while let Some(Tok::Ident(_)) | Some(Tok::Upper(_)) = self.peek() {
            let pos = self.pos();
            let name = self.type_name()?;
            t = SType::App(name, vec![t], pos);
        }
        Ok(t)
    }

    fn atype(&mut self) -> PResult<SType> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::TyVar(v)) => {
                self.i += 1;
                Ok(SType::Var(v.clone(), Vec::new(), pos))
            }
            Some(Tok::Ident(_)) | Some(Tok::Upper(_)) => {
                let name = self.type_name()?;
                Ok(SType::App(name, Vec::new(), pos))
            }
            Some(Tok::Sym(Sym::LParen)) => {
                self.i += 1;
                if let (Some(Tok::TyVar(v)), Some(Tok::Sym(Sym::DoubleColon))) =
                    (self.peek(), self.peek_at(1))
                {
                    let v = v.clone();
                    self.i += 2;
                    let sort = self.sort()?;
                    self.expect_sym(Sym::RParen)?;
                    return Ok(SType::Var(v, sort, pos));
                }
                let first = self.ty()?;
                if self.eat_sym(Sym::RParen) {
                    return Ok(first);
                }
                let mut args = vec![first];
                while self.eat_sym(Sym::Comma) {
                    args.push(self.ty()?);
                }
                self.expect_sym(Sym::RParen)?;
                let npos = self.pos();
                let name = self.type_name()?;
                Ok(SType::App(name, args, npos))
            }
            _ => self.unexpected("a type"),
        }
    }

    // Patterns.

    fn pat(&mut self) -> PResult<SPat> {
        if let Some(Tok::Upper(c)) = self.peek() {
            let pos = self.pos();
            let c = c.clone();
            self.i += 1;
            let mut args = Vec::new();
            while self.starts_apat() {
                args.push(self.apat()?);
            }
            return Ok(SPat::Con(c, args, pos));
        }
        self.apat()
    }

    fn starts_apat(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::Upper(_)) | Some(Tok::Sym(Sym::LParen))
        )
    }

    fn apat(&mut self) -> PResult<SPat> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(v)) => {
                self.i += 1;
                Ok(SPat::Var(v.clone(), pos))
            }
            Some(Tok::Upper(c)) => {
                self.i += 1;
                Ok(SPat::Con(c.clone(), Vec::new(), pos))
            }
            Some(Tok::Sym(Sym::LParen)) => {
                self.i += 1;
                let p = self.pat()?;
                self.expect_sym(Sym::RParen)?;
                Ok(p)
            }
            _ => self.unexpected("a pattern"),
        }
    }

    // Terms.

    fn term(&mut self) -> PResult<STerm> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Sym(Sym::Backslash)) => {
                self.i += 1;
                let mut binders = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::Ident(x)) => {
                            let x = x.clone();
                            self.i += 1;
                            if self.eat_sym(Sym::DoubleColon) {
                                binders.push((x, Some(self.ty()?)));
                                break;
                            }
                            binders.push((x, None));
                        }
                        Some(Tok::Sym(Sym::LParen)) => {
                            self.i += 1;
                            let x = self.ident()?;
                            self.expect_sym(Sym::DoubleColon)?;
                            let ty = self.ty()?;
                            self.expect_sym(Sym::RParen)?;
                            binders.push((x, Some(ty)));
                        }
                        _ => break,
                    }
                }
                if binders.is_empty() {
                    return self.unexpected("a binder");
                }
                self.expect_sym(Sym::Dot)?;
                let body = self.term()?;
                Ok(binders
                    .into_iter()
                    .rev()
                    .fold(body, |acc, (x, ty)| STerm::Abs(x, ty, Box::new(acc), pos)))
            }
            Some(Tok::Kw(Kw::Case)) => {
                self.i += 1;
                let scrut = self.term()?;
                self.expect_kw(Kw::Of)?;
                self.eat_sym(Sym::Bar);
                let mut clauses = Vec::new();
                loop {
                    let p = self.pat()?;
                    self.expect_sym(Sym::Arrow)?;
                    let body = self.term()?;
                    clauses.push((p, body));
                    if !self.eat_sym(Sym::Bar) {
                        break;
                    }
                }
                Ok(STerm::Case(Box::new(scrut), clauses, pos))
            }
            Some(Tok::Kw(Kw::Let)) => {
                self.i += 1;
                let x = self.ident()?;
                self.expect_sym(Sym::Eq)?;
                let rhs = self.term()?;
                self.expect_kw(Kw::In)?;
                let body = self.term()?;
                Ok(STerm::Let(x, Box::new(rhs), Box::new(body), pos))
            }
            Some(Tok::Kw(Kw::If)) => {
                self.i += 1;
                let c = self.term()?;
                self.expect_kw(Kw::Then)?;
                let t = self.term()?;
                self.expect_kw(Kw::Else)?;
                let e = self.term()?;
                Ok(STerm::If(Box::new(c), Box::new(t), Box::new(e), pos))
            }
            _ => self.comparison(),
        }
    }

    fn binary(op: Sym, pos: SourcePos, l: STerm, r: STerm) -> STerm {
        let f = STerm::Name(op.operator_name().expect("operator").to_string(), pos);
        STerm::App(Box::new(STerm::App(Box::new(f), Box::new(l))), Box::new(r))
    }

    fn comparison(&mut self) -> PResult<STerm> {
        let lhs = self.additive()?;
        let pos = self.pos();
        for op in [Sym::Less, Sym::LessEq] {
            if self.eat_sym(op) {
                let rhs = self.additive()?;
                return Ok(Self::binary(op, pos, lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> PResult<STerm> {
        let mut lhs = self.multiplicative()?;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Some(Tok::Sym(s @ (Sym::Plus | Sym::Minus))) => *s,
                _ => return Ok(lhs),
            };
            self.i += 1;
            let rhs = self.multiplicative()?;
            lhs = Self::binary(op, pos, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<STerm> {
        let mut lhs = self.application()?;
        loop {
            let pos = self.pos();
            if !self.eat_sym(Sym::Star) {
                return Ok(lhs);
            }
            let rhs = self.application()?;
            lhs = Self::binary(Sym::Star, pos, lhs, rhs);
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_))
                | Some(Tok::Upper(_))
                | Some(Tok::Int(_))
                | Some(Tok::Str(_))
                | Some(Tok::Sym(Sym::LParen))
        )
    }

    fn starts_block(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Sym(Sym::Backslash))
                | Some(Tok::Kw(Kw::Case))
                | Some(Tok::Kw(Kw::Let))
                | Some(Tok::Kw(Kw::If))
        )
    }

    fn application(&mut self) -> PResult<STerm> {
        let mut t = self.atom()?;
        loop {
            if self.starts_atom() {
                let a = self.atom()?;
                t = STerm::App(Box::new(t), Box::new(a));
            } else if self.starts_block() {
                // A trailing lambda or case is the last argument.
                let a = self.term()?;
                return Ok(STerm::App(Box::new(t), Box::new(a)));
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> PResult<STerm> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(x)) => {
                self.i += 1;
                Ok(STerm::Name(x.clone(), pos))
            }
            Some(Tok::Upper(c)) => {
                self.i += 1;
                Ok(STerm::Ctor(c.clone(), pos))
            }
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(STerm::Int(n.clone(), pos))
            }
            Some(Tok::Str(s)) => {
                self.i += 1;
                Ok(STerm::Str(s.clone(), pos))
            }
            Some(Tok::Sym(Sym::LParen)) => {
                if let Some(name) = self.paren_operator() {
                    return Ok(STerm::Name(name, pos));
                }
                if let (
                    Some(Tok::Sym(Sym::Minus)),
                    Some(Tok::Int(n)),
                    Some(Tok::Sym(Sym::RParen)),
                ) = (self.peek_at(1), self.peek_at(2), self.peek_at(3))
                {
                    self.i += 4;
                    return Ok(STerm::Int(-n.clone(), pos));
                }
                self.i += 1;
                let t = self.term()?;
                self.expect_sym(Sym::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }
}

fn sym_text(s: Sym) -> &'static str {
    match s {
        Sym::Eq => "=",
        Sym::Bar => "|",
        Sym::DoubleColon => "::",
        Sym::Arrow => "=>",
        Sym::LParen => "(",
        Sym::RParen => ")",
        Sym::LBrace => "{",
        Sym::RBrace => "}",
        Sym::Comma => ",",
        Sym::Backslash => "\\",
        Sym::Dot => ".",
        Sym::Plus => "+",
        Sym::Minus => "-",
        Sym::Star => "*",
        Sym::Less => "<",
        Sym::LessEq => "<=",
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Upper(s) => format!("`{s}`"),
        Tok::TyVar(v) => format!("`'{v}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::Kw(k) => format!("`{}`", format!("{k:?}").to_lowercase()),
        Tok::Sym(s) => format!("`{}`", sym_text(*s)),
    }
}
