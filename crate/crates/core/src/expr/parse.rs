//! Recursive-descent parser for the expression DSL.
//!
//! Grammar (whitespace insensitive, positions are 1-based line:col):
//!
//! ```text
//! expression := term (('+' | '-') term)*
//! term       := factor (('*' | '/') factor)*
//! factor     := '-' factor | base ('^' signed-integer)?
//! base       := integer | integer '/' integer | identifier | '(' expression ')'
//! ```
//!
//! `integer '/' integer` at base position lexes as one rational literal
//! (maximal munch), so `3/4^2` is `(3/4)^2`. Identifiers `x1`..`x6` are the
//! chart coordinates; any other `x<digits>` is rejected; everything else is
//! a parameter. Numbers are integers or integer ratios, never decimals.

use std::sync::Arc;

use num::{BigInt, ToPrimitive, Zero};

use super::{negate, Expr, ExprError, Rational, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<(Vec<Token>, (usize, usize)), ExprError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let (tline, tcol) = (line, col);
        if ch.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let n = digits
                .parse::<BigInt>()
                .map_err(|_| syntax(tline, tcol, "malformed integer literal"))?;
            out.push(Token {
                tok: Tok::Int(n),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(name),
                line: tline,
                col: tcol,
            });
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(syntax(tline, tcol, format!("unexpected character `{other}`"))),
        };
        chars.next();
        col += 1;
        out.push(Token {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok((out, (line, col)))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.pos + 1).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ExprError {
        let (line, col) = self.here();
        syntax(line, col, message)
    }

    fn expression(&mut self) -> Result<Expr, ExprError> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    items.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    items.push(negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Sum(items.into())
        })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.factor()?;
                    // Left association keeps `a*b*c` a single flat product.
                    acc = match acc {
                        Expr::Product(items) => {
                            let mut v = items.to_vec();
                            v.push(f);
                            Expr::Product(v.into())
                        }
                        other => Expr::Product([other, f].into()),
                    };
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let f = self.factor()?;
                    acc = Expr::quotient(acc, f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(negate(inner));
        }
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let (cline, ccol) = self.here();
            self.bump();
            let k = self.exponent()?;
            if k == 0 && matches!(&base, Expr::Const(c) if c.is_zero()) {
                return Err(syntax(cline, ccol, "0^0 is undefined"));
            }
            return Ok(Expr::Pow(Arc::new(base), k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        let (line, col) = self.here();
        match self.bump() {
            Some(Token {
                tok: Tok::Int(n), ..
            }) => {
                let v = n
                    .to_i32()
                    .ok_or_else(|| syntax(line, col, "exponent out of range"))?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(syntax(line, col, "expected integer exponent after `^`")),
        }
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Token {
                tok: Tok::Int(n), ..
            }) => {
                // Maximal munch: `int / int` here is one rational literal.
                if matches!(self.peek(), Some(Tok::Slash))
                    && matches!(self.peek2(), Some(Tok::Int(_)))
                {
                    self.bump();
                    let (dline, dcol) = self.here();
                    let Some(Token {
                        tok: Tok::Int(d), ..
                    }) = self.bump()
                    else {
                        unreachable!("peeked an integer token");
                    };
                    if d.is_zero() {
                        return Err(syntax(dline, dcol, "zero denominator in rational literal"));
                    }
                    return Ok(Expr::Const(Rational::new(n, d)));
                }
                Ok(Expr::Const(Rational::from_integer(n)))
            }
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) => match Symbol::from_name(&name) {
                Ok(sym) => Ok(Expr::Sym(sym)),
                Err(ExprError::UnknownCoordinate { name, .. }) => {
                    Err(ExprError::UnknownCoordinate { line, col, name })
                }
                Err(other) => Err(other),
            },
            Some(Token {
                tok: Tok::LParen, ..
            }) => {
                let e = self.expression()?;
                match self.bump() {
                    Some(Token {
                        tok: Tok::RParen, ..
                    }) => Ok(e),
                    _ => Err(syntax(line, col, "unclosed `(`")),
                }
            }
            Some(Token { tok, .. }) => Err(syntax(
                line,
                col,
                format!("expected a number, identifier or `(`, found `{}`", tok_name(&tok)),
            )),
            None => Err(syntax(
                line,
                col,
                "unexpected end of input; expected a number, identifier or `(`",
            )),
        }
    }
}

fn tok_name(tok: &Tok) -> String {
    match tok {
        Tok::Int(n) => n.to_string(),
        Tok::Ident(s) => s.clone(),
        Tok::Plus => "+".into(),
        Tok::Minus => "-".into(),
        Tok::Star => "*".into(),
        Tok::Slash => "/".into(),
        Tok::Caret => "^".into(),
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
    }
}

/// Parse DSL source into an expression tree. The tree is raw (not
/// simplified); structure follows the source exactly.
pub fn parse(source: &str) -> Result<Expr, ExprError> {
    let (tokens, eof) = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        eof,
    };
    let expr = parser.expression()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.err_here("unexpected trailing input"));
    }
    Ok(expr)
}
