//! Recursive-descent parser for the infix grammar in `docs/grammar.md`.

use std::collections::BTreeMap;

use num_traits::{CheckedDiv, Zero};
use thiserror::Error;

use super::{Expr, Func};
use crate::rational::{self, DecimalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at position {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier {name:?} at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("exponent at position {pos} is not an integer")]
    NonIntegerExponent { pos: usize },
    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },
    #[error("number at position {pos} has more than {max} fractional digits", max = rational::MAX_FRACTION_DIGITS)]
    TooManyDigits { pos: usize },
    #[error("number at position {pos} is out of range")]
    NumberOutOfRange { pos: usize },
    #[error("empty input")]
    Empty,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with_constants(text, &BTreeMap::new())
}

/// Parses `text`, replacing each identifier found in `constants` by its value.
pub fn parse_with_constants(
    text: &str,
    constants: &BTreeMap<String, Rational>,
) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        tokens,
        at: 0,
        end: text.len(),
        constants,
    };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Unexpected {
            pos: t.pos,
            found: t.kind.describe(),
            expected: "operator or end of input",
        });
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number(n) => format!("number {n}"),
            Kind::Ident(i) => format!("identifier {i:?}"),
            Kind::Plus => "'+'".into(),
            Kind::Minus => "'-'".into(),
            Kind::Star => "'*'".into(),
            Kind::Slash => "'/'".into(),
            Kind::Caret => "'^'".into(),
            Kind::LParen => "'('".into(),
            Kind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Kind::Plus,
            b'-' => Kind::Minus,
            b'*' => Kind::Star,
            b'/' => Kind::Slash,
            b'^' => Kind::Caret,
            b'(' => Kind::LParen,
            b')' => Kind::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                out.push(Token {
                    kind: Kind::Number(text[pos..i].to_string()),
                    pos,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Kind::Ident(text[pos..i].to_string()),
                    pos,
                });
                continue;
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedChar { pos, ch });
            }
        };
        out.push(Token { kind, pos });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    end: usize,
    constants: &'a BTreeMap<String, Rational>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn peek_kind(&self) -> Option<&Kind> {
        self.peek().map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Unexpected {
                pos: t.pos,
                found: t.kind.describe(),
                expected,
            },
            None => ParseError::Unexpected {
                pos: self.end,
                found: "end of input".into(),
                expected,
            },
        }
    }

    fn expect(&mut self, kind: Kind, expected: &'static str) -> Result<(), ParseError> {
        if self.peek_kind() == Some(&kind) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let first = if self.peek_kind() == Some(&Kind::Minus) {
            self.at += 1;
            negate(self.term()?)
        } else {
            self.term()?
        };
        terms.push(first);
        loop {
            match self.peek_kind() {
                Some(Kind::Plus) => {
                    self.at += 1;
                    terms.push(self.term()?);
                }
                Some(Kind::Minus) => {
                    self.at += 1;
                    terms.push(negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek_kind() {
                Some(Kind::Star) => {
                    self.at += 1;
                    factors.push(self.factor()?);
                }
                Some(Kind::Slash) => {
                    self.at += 1;
                    let pos = self.pos();
                    let divisor = self.factor()?;
                    divide(&mut factors, divisor, pos)?;
                }
                _ => break,
            }
        }
        if factors.len() > 1 {
            factors.retain(|f| !matches!(f, Expr::Const(c) if *c == Rational::from_integer(1)));
        }
        Ok(match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::Mul(factors),
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_kind() != Some(&Kind::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let exp = self.exponent()?;
        Ok(Expr::pow(base, exp))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let pos = self.pos();
        let parenthesized = self.peek_kind() == Some(&Kind::LParen);
        if parenthesized {
            self.at += 1;
        }
        let negative = self.peek_kind() == Some(&Kind::Minus);
        if negative {
            self.at += 1;
        }
        let value = match self.bump() {
            Some(Token {
                kind: Kind::Number(n),
                pos,
            }) => {
                if n.contains('.') {
                    return Err(ParseError::NonIntegerExponent { pos });
                }
                n.parse::<i32>()
                    .map_err(|_| ParseError::NumberOutOfRange { pos })?
            }
            Some(_) => return Err(ParseError::NonIntegerExponent { pos }),
            None => {
                return Err(ParseError::Unexpected {
                    pos: self.end,
                    found: "end of input".into(),
                    expected: "integer exponent",
                })
            }
        };
        if parenthesized {
            // `x^(1/2)` and friends
            if self.peek_kind() != Some(&Kind::RParen) {
                return Err(ParseError::NonIntegerExponent { pos });
            }
            self.at += 1;
        }
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.bump() else {
            return Err(ParseError::Unexpected {
                pos: self.end,
                found: "end of input".into(),
                expected: "number, variable, function or '('",
            });
        };
        match tok.kind {
            Kind::Number(n) => rational::parse_decimal(&n)
                .map(Expr::Const)
                .map_err(|e| match e {
                    DecimalError::TooManyDigits => ParseError::TooManyDigits { pos: tok.pos },
                    DecimalError::Overflow => ParseError::NumberOutOfRange { pos: tok.pos },
                    DecimalError::Malformed => ParseError::Unexpected {
                        pos: tok.pos,
                        found: format!("malformed number {n:?}"),
                        expected: "number",
                    },
                }),
            Kind::Ident(name) => self.identifier(name, tok.pos),
            Kind::LParen => {
                let inner = self.expr()?;
                self.expect(Kind::RParen, "')'")?;
                Ok(inner)
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected("number, variable, function or '('"))
            }
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        let func = match name.as_str() {
            "x" => return Ok(Expr::x()),
            "y" => return Ok(Expr::y()),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "ln" | "log" => Some(Func::Ln),
            _ => None,
        };
        if let Some(func) = func {
            self.expect(Kind::LParen, "'(' after function name")?;
            let arg = self.expr()?;
            self.expect(Kind::RParen, "')'")?;
            return Ok(Expr::apply(func, arg));
        }
        match self.constants.get(&name) {
            Some(c) => Ok(Expr::Const(*c)),
            None => Err(ParseError::UnknownIdentifier { pos, name }),
        }
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        other => Expr::neg(other),
    }
}

fn divide(factors: &mut Vec<Expr>, divisor: Expr, pos: usize) -> Result<(), ParseError> {
    match divisor {
        Expr::Const(c) if c.is_zero() => Err(ParseError::DivisionByZero { pos }),
        Expr::Const(c) => {
            if let Some(Expr::Const(prev)) = factors.last_mut() {
                *prev = prev
                    .checked_div(&c)
                    .ok_or(ParseError::NumberOutOfRange { pos })?;
            } else {
                factors.push(Expr::Const(c.recip()));
            }
            Ok(())
        }
        Expr::Pow(base, n) => {
            let n = n.checked_neg().ok_or(ParseError::NumberOutOfRange { pos })?;
            factors.push(Expr::Pow(base, n));
            Ok(())
        }
        other => {
            factors.push(Expr::pow(other, -1));
            Ok(())
        }
    }
}
