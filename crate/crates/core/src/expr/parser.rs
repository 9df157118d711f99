use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::LambdaExpr;
use crate::exact::{rational_from_decimal, QComplex};

/// Largest accepted `|k|` in `x^k`.
pub const MAX_EXPONENT: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: found {found}, expected one of {}", expected.join(", "))]
    Syntax {
        /// Character offset (0-based) into the source.
        position: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("exponent at position {position} exceeds {MAX_EXPONENT} in magnitude")]
    ExponentOverflow { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::ExponentOverflow { position } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Real(String),
    Imag(String),
    Index,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Real(s) => write!(f, "number '{s}'"),
            Tok::Imag(s) => write!(f, "imaginary '{s}i'"),
            Tok::Index => write!(f, "'n'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const ATOM_START: &[&str] = &["'n'", "number", "imaginary literal", "'('", "'-'"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' | '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                if rational_from_decimal(&text).is_none() {
                    return Err(ParseError::Syntax {
                        position: start,
                        found: format!("malformed number '{text}'"),
                        expected: vec!["decimal literal"],
                    });
                }
                // Imaginary suffix, allowing whitespace before it.
                let mut j = i;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == 'i' {
                    i = j + 1;
                    out.push((Tok::Imag(text), start));
                } else {
                    out.push((Tok::Real(text), start));
                }
                continue;
            }
            'i' => out.push((Tok::Imag("1".into()), start)),
            'n' => out.push((Tok::Index, start)),
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            other => {
                return Err(ParseError::Syntax {
                    position: start,
                    found: format!("character '{other}'"),
                    expected: ATOM_START.to_vec(),
                })
            }
        }
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            found: self.peek().to_string(),
            expected: expected.to_vec(),
        }
    }

    fn expr(&mut self) -> Result<LambdaExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = LambdaExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = LambdaExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<LambdaExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = LambdaExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = LambdaExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<LambdaExpr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let digits = match self.peek() {
            Tok::Real(s) if s.bytes().all(|b| b.is_ascii_digit()) => s.clone(),
            _ => return Err(self.error(&["integer exponent"])),
        };
        self.bump();
        let magnitude: i64 = digits
            .parse()
            .ok()
            .filter(|k| *k <= MAX_EXPONENT)
            .ok_or(ParseError::ExponentOverflow { position: at })?;
        let k = if negative { -magnitude } else { magnitude };
        Ok(LambdaExpr::Pow(Box::new(base), k as i32))
    }

    fn atom(&mut self) -> Result<LambdaExpr, ParseError> {
        match self.peek().clone() {
            Tok::Index => {
                self.bump();
                Ok(LambdaExpr::Index)
            }
            Tok::Real(s) => {
                self.bump();
                let re = rational_from_decimal(&s).expect("validated by the lexer");
                Ok(LambdaExpr::Literal(QComplex::from_real(re)))
            }
            Tok::Imag(s) => {
                self.bump();
                let im = rational_from_decimal(&s).expect("validated by the lexer");
                Ok(LambdaExpr::Literal(QComplex::new(BigRational::zero(), im)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["')'", "'+'", "'-'", "'*'", "'/'", "'^'"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Minus => {
                self.bump();
                Ok(LambdaExpr::Neg(Box::new(self.atom()?)))
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

/// Parses an eigenvalue-family expression.
///
/// A compound literal such as `1+2i` is read as the sum of a real and an
/// imaginary literal; both readings denote the same value, and this one keeps
/// operator precedence unambiguous (`3*1+2i` is `3*1 + 2i`).
pub fn parse_lambda_expr(src: &str) -> Result<LambdaExpr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "end of input"]));
    }
    Ok(e)
}
