//! Lexer and recursive-descent parser for `.catt` sources.

use std::fmt;

use thiserror::Error;

/// Byte range in the source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }

    /// 1-based line and column of the start of the span.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let before = &src[..self.start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Coh,
    Let,
    Star,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Colon,
    Comma,
    Arrow,
    Equals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Coh => f.write_str("'coh'"),
            Tok::Let => f.write_str("'let'"),
            Tok::Star => f.write_str("'*'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrack => f.write_str("'['"),
            Tok::RBrack => f.write_str("']'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Comma => f.write_str("','"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Equals => f.write_str("'='"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let single = |t: Tok, len: usize| (t, Span { start: i, end: i + len });
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' | ')' | '[' | ']' | ':' | ',' | '=' | '*' | '⋆' | '→' => {
                chars.next();
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '=' => Tok::Equals,
                    '→' => Tok::Arrow,
                    _ => Tok::Star,
                };
                out.push(single(t, c.len_utf8()));
            }
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        out.push(single(Tok::Arrow, 2));
                    }
                    _ => return Err(error_at(src, i, "'->'", "'-'")),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        end = j + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &src[i..end];
                let t = match word {
                    "coh" => Tok::Coh,
                    "let" => Tok::Let,
                    "star" => Tok::Star,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((t, Span { start: i, end }));
            }
            other => return Err(error_at(src, i, "a token", &format!("'{other}'"))),
        }
    }
    out.push((Tok::Eof, Span { start: src.len(), end: src.len() }));
    Ok(out)
}

fn error_at(src: &str, pos: usize, expected: &str, found: &str) -> ParseError {
    let (line, col) = Span { start: pos, end: pos }.line_col(src);
    ParseError { line, col, expected: expected.to_string(), found: found.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub ty: SType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SType {
    Star(Span),
    Arrow { src: Box<STerm>, base: Option<Box<SType>>, tgt: Box<STerm>, span: Span },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum STerm {
    Ident(String, Span),
    App(String, Vec<STerm>, Span),
    Coh { ctx: Vec<Binder>, ty: Box<SType>, args: Vec<STerm>, span: Span },
}

impl STerm {
    pub fn span(&self) -> Span {
        match self {
            STerm::Ident(_, s) | STerm::App(_, _, s) | STerm::Coh { span: s, .. } => *s,
        }
    }
}

impl SType {
    pub fn span(&self) -> Span {
        match self {
            SType::Star(s) | SType::Arrow { span: s, .. } => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Coh,
    Let,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub name: String,
    pub ctx: Vec<Binder>,
    pub ty: Option<SType>,
    pub body: Option<STerm>,
    pub span: Span,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

pub fn parse_file(src: &str) -> Result<Vec<Decl>, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0 };
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        out.push(p.decl()?);
    }
    Ok(out)
}

/// Parses a single term, for the command line and tests.
pub fn parse_term(src: &str) -> Result<STerm, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0 };
    let t = p.term()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<SType, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0 };
    let t = p.ty()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

/// Parses a sequence of binders `(x : A) …`.
pub fn parse_context(src: &str) -> Result<Vec<Binder>, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0 };
    let b = p.binders(0)?;
    p.expect(Tok::Eof, "a binder or end of input")?;
    Ok(b)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(error_at(self.src, self.span().start, expected, &self.peek().to_string()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.fail(expected)
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().1)),
            _ => self.fail("an identifier"),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let start = self.span();
        match self.peek() {
            Tok::Coh => {
                self.bump();
                let (name, _) = self.ident()?;
                let ctx = self.binders(1)?;
                self.expect(Tok::Colon, "':'")?;
                let ty = self.ty()?;
                Ok(Decl { kind: DeclKind::Coh, name, ctx, ty: Some(ty), body: None, span: start.to(self.prev_span()) })
            }
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                let ctx = self.binders(0)?;
                let ty = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Equals, "'='")?;
                let body = self.term()?;
                Ok(Decl { kind: DeclKind::Let, name, ctx, ty, body: Some(body), span: start.to(self.prev_span()) })
            }
            _ => self.fail("'coh' or 'let'"),
        }
    }

    fn binders(&mut self, min: usize) -> Result<Vec<Binder>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Ident(_)) {
            let start = self.bump().1;
            let (name, _) = self.ident()?;
            self.expect(Tok::Colon, "':'")?;
            let ty = self.ty()?;
            let end = self.expect(Tok::RParen, "')'")?;
            out.push(Binder { name, ty, span: start.to(end) });
        }
        if out.len() < min {
            return self.fail("a binder '(name : type)'");
        }
        Ok(out)
    }

    fn ty(&mut self) -> Result<SType, ParseError> {
        if *self.peek() == Tok::Star {
            return Ok(SType::Star(self.bump().1));
        }
        let src = self.term()?;
        self.expect(Tok::Arrow, "'->'")?;
        let base = if *self.peek() == Tok::LBrack {
            self.bump();
            let b = self.ty()?;
            self.expect(Tok::RBrack, "']'")?;
            Some(Box::new(b))
        } else {
            None
        };
        let tgt = self.term()?;
        let span = src.span().to(tgt.span());
        Ok(SType::Arrow { src: Box::new(src), base, tgt: Box::new(tgt), span })
    }

    fn args(&mut self) -> Result<Vec<STerm>, ParseError> {
        self.expect(Tok::LBrack, "'['")?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBrack {
            out.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.term()?);
            }
        }
        self.expect(Tok::RBrack, "']' or ','")?;
        Ok(out)
    }

    fn term(&mut self) -> Result<STerm, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let start = self.bump().1;
                if *self.peek() == Tok::LBrack {
                    let args = self.args()?;
                    Ok(STerm::App(name, args, start.to(self.prev_span())))
                } else {
                    Ok(STerm::Ident(name, start))
                }
            }
            Tok::Coh => {
                let start = self.bump().1;
                if *self.peek() == Tok::LParen && *self.peek_at(1) == Tok::LParen {
                    // Parenthesised head: coh ((x : *) … : A)[args]
                    self.bump();
                    let ctx = self.binders(1)?;
                    self.expect(Tok::Colon, "':'")?;
                    let ty = self.ty()?;
                    self.expect(Tok::RParen, "')'")?;
                    let args = self.args()?;
                    return Ok(STerm::Coh { ctx, ty: Box::new(ty), args, span: start.to(self.prev_span()) });
                }
                let ctx = self.binders(1)?;
                self.expect(Tok::Colon, "':'")?;
                let mut ty = self.ty()?;
                let args = if *self.peek() == Tok::LBrack {
                    self.args()?
                } else {
                    // The bracket after a bare target identifier belongs to the coherence.
                    match ty {
                        SType::Arrow { ref mut tgt, .. } => match (**tgt).clone() {
                            STerm::App(name, args, span) => {
                                let ident_end = span.start + name.len();
                                **tgt = STerm::Ident(name, Span { start: span.start, end: ident_end });
                                args
                            }
                            _ => return self.fail("'['"),
                        },
                        SType::Star(_) => return self.fail("'['"),
                    }
                };
                Ok(STerm::Coh { ctx, ty: Box::new(ty), args, span: start.to(self.prev_span()) })
            }
            _ => self.fail("a term"),
        }
    }
}
