use std::fmt;

use thiserror::Error;

/// A term over the loop signature `{*, \, /, ^-1, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    One,
    Mul(Box<Term>, Box<Term>),
    LDiv(Box<Term>, Box<Term>),
    RDiv(Box<Term>, Box<Term>),
    Inv(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn ldiv(a: Term, b: Term) -> Term {
        Term::LDiv(Box::new(a), Box::new(b))
    }

    pub fn rdiv(a: Term, b: Term) -> Term {
        Term::RDiv(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Term) -> Term {
        Term::Inv(Box::new(a))
    }

    /// Pushes variable names in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Term::One => {}
            Term::Mul(a, b) | Term::LDiv(a, b) | Term::RDiv(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Inv(a) => a.collect_vars(out),
        }
    }

    pub fn mentions_inverse(&self) -> bool {
        match self {
            Term::Var(_) | Term::One => false,
            Term::Inv(_) => true,
            Term::Mul(a, b) | Term::LDiv(a, b) | Term::RDiv(a, b) => {
                a.mentions_inverse() || b.mentions_inverse()
            }
        }
    }

    /// The mirror term: products reversed, `\` and `/` exchanged.
    pub fn mirror(&self) -> Term {
        match self {
            Term::Var(_) | Term::One => self.clone(),
            Term::Mul(a, b) => Term::mul(b.mirror(), a.mirror()),
            Term::LDiv(a, b) => Term::rdiv(b.mirror(), a.mirror()),
            Term::RDiv(a, b) => Term::ldiv(b.mirror(), a.mirror()),
            Term::Inv(a) => Term::inv(a.mirror()),
        }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Var(name) => Term::Var(f(name)),
            Term::One => Term::One,
            Term::Mul(a, b) => Term::mul(a.rename(f), b.rename(f)),
            Term::LDiv(a, b) => Term::ldiv(a.rename(f), b.rename(f)),
            Term::RDiv(a, b) => Term::rdiv(a.rename(f), b.rename(f)),
            Term::Inv(a) => Term::inv(a.rename(f)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => f.write_str(name),
            Term::One => f.write_str("1"),
            Term::Mul(a, b) => write!(f, "({a} * {b})"),
            Term::LDiv(a, b) => write!(f, "({a} \\ {b})"),
            Term::RDiv(a, b) => write!(f, "({a} / {b})"),
            Term::Inv(a) => match **a {
                Term::Var(_) | Term::One => write!(f, "{a}^-1"),
                _ => write!(f, "({a})^-1"),
            },
        }
    }
}

/// A universally quantified equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    /// Distinct variables in order of first occurrence, left side first.
    pub variables: Vec<String>,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        let mut variables = Vec::new();
        lhs.collect_vars(&mut variables);
        rhs.collect_vars(&mut variables);
        Identity {
            lhs,
            rhs,
            variables,
        }
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn mentions_inverse(&self) -> bool {
        self.lhs.mentions_inverse() || self.rhs.mentions_inverse()
    }

    pub fn mirror(&self) -> Identity {
        Identity::new(self.lhs.mirror(), self.rhs.mirror())
    }

    /// The same identity with variables renamed `v1, v2, ...` in order of
    /// first occurrence; equal for identities that differ only by renaming.
    pub fn canonical(&self) -> Identity {
        let rename = |name: &str| {
            let i = self.variables.iter().position(|v| v == name).expect("collected");
            format!("v{}", i + 1)
        };
        Identity::new(self.lhs.rename(&rename), self.rhs.rename(&rename))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl std::str::FromStr for Identity {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_identity(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Star,
    Backslash,
    Slash,
    InvMark,
    LParen,
    RParen,
    Equals,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn error(&self, position: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            position,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, SyntaxError> {
        let bytes = self.src.as_bytes();
        let mut out = Vec::new();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(&c) = bytes.get(self.pos) else {
                out.push((start, Tok::End));
                return Ok(out);
            };
            let tok = match c {
                b'a'..=b'z' => {
                    while self.pos < bytes.len()
                        && (bytes[self.pos].is_ascii_lowercase() || bytes[self.pos].is_ascii_digit())
                    {
                        self.pos += 1;
                    }
                    out.push((start, Tok::Ident(self.src[start..self.pos].to_string())));
                    continue;
                }
                b'1' => Tok::One,
                b'*' => Tok::Star,
                b'\\' => Tok::Backslash,
                b'/' => Tok::Slash,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'=' => Tok::Equals,
                b'^' => {
                    let rest = &self.src[self.pos..];
                    let mut chars = rest[1..].char_indices().filter(|(_, ch)| !ch.is_whitespace());
                    match (chars.next(), chars.next()) {
                        (Some((_, '-')), Some((i, '1'))) => {
                            self.pos += 1 + i + 1;
                            out.push((start, Tok::InvMark));
                            continue;
                        }
                        _ => return Err(self.error(start, "expected `^-1`")),
                    }
                }
                _ => {
                    let ch = self.src[start..].chars().next().unwrap_or('?');
                    return Err(self.error(start, format!("unexpected character {ch:?}")));
                }
            };
            self.pos += 1;
            out.push((start, tok));
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            position: self.pos(),
            message: message.into(),
        }
    }

    // div := prod (('\' | '/') prod)*
    fn division(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Backslash => {
                    self.bump();
                    acc = Term::ldiv(acc, self.product()?);
                }
                Tok::Slash => {
                    self.bump();
                    acc = Term::rdiv(acc, self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // prod := postfix (('*')? postfix)*   -- juxtaposition is multiplication
    fn product(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.postfix()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = Term::mul(acc, self.postfix()?);
                }
                Tok::Ident(_) | Tok::One | Tok::LParen => {
                    acc = Term::mul(acc, self.postfix()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn postfix(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.primary()?;
        while *self.peek() == Tok::InvMark {
            self.bump();
            t = Term::inv(t);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        let open = self.pos();
        match self.bump() {
            Tok::Ident(name) => Ok(Term::Var(name)),
            Tok::One => Ok(Term::One),
            Tok::LParen => {
                let inner = self.division()?;
                if *self.peek() != Tok::RParen {
                    return Err(SyntaxError {
                        position: open,
                        message: "unmatched `(`".into(),
                    });
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(SyntaxError {
                position: open,
                message: "unexpected end of input".into(),
            }),
            other => Err(SyntaxError {
                position: open,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser { toks, at: 0 };
    let t = p.division()?;
    if *p.peek() != Tok::End {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

/// Parses `lhs = rhs`.
///
/// Grammar: identifiers `[a-z][a-z0-9]*` are variables, `1` is the identity,
/// `*` (or juxtaposition) multiplies, `\` and `/` divide, `^-1` is a postfix
/// inverse. Multiplication binds tighter than division; every infix operator
/// is left-associative.
pub fn parse_identity(text: &str) -> Result<Identity, SyntaxError> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser { toks, at: 0 };
    let lhs = p.division()?;
    if *p.peek() != Tok::Equals {
        return Err(p.err("expected `=`"));
    }
    p.bump();
    let rhs = p.division()?;
    if *p.peek() != Tok::End {
        return Err(p.err("trailing input"));
    }
    Ok(Identity::new(lhs, rhs))
}
