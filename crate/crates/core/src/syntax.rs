//! Call-style descriptor syntax shared by regions and functions on the
//! command line, e.g. `indicator(closed_disk(0, 0.5))` or `truncate(identity, 3)`.

use std::fmt;

use crate::exact::QComplex;
use crate::expr::parse_lambda_expr;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("descriptor error at position {position}: {message}")]
pub struct DescriptorError {
    pub position: usize,
    pub message: String,
}

impl DescriptorError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self { position, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Arg {
    Call(Call),
    Scalar { text: String, position: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Call {
    pub name: String,
    pub args: Vec<Arg>,
    pub position: usize,
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl Call {
    pub fn expect_arity(&self, n: usize) -> Result<(), DescriptorError> {
        if self.args.len() == n {
            Ok(())
        } else {
            Err(DescriptorError::new(
                self.position,
                format!("'{}' takes {n} argument(s), got {}", self.name, self.args.len()),
            ))
        }
    }

    pub fn call_arg(&self, i: usize) -> Result<&Call, DescriptorError> {
        match &self.args[i] {
            Arg::Call(c) => Ok(c),
            Arg::Scalar { position, text } => {
                Err(DescriptorError::new(*position, format!("expected a descriptor, found '{text}'")))
            }
        }
    }

    /// A constant complex argument, written in the eigenvalue-expression grammar.
    pub fn scalar_arg(&self, i: usize) -> Result<QComplex, DescriptorError> {
        match &self.args[i] {
            Arg::Scalar { text, position } => {
                let e = parse_lambda_expr(text)
                    .map_err(|e| DescriptorError::new(position + e.position(), e.to_string()))?;
                if !e.is_constant() {
                    return Err(DescriptorError::new(*position, "argument must not depend on n"));
                }
                e.eval_exact(1).map_err(|e| DescriptorError::new(*position, e.to_string()))
            }
            Arg::Call(c) => {
                Err(DescriptorError::new(c.position, format!("expected a number, found '{}'", c.name)))
            }
        }
    }

    pub fn integer_arg(&self, i: usize) -> Result<u64, DescriptorError> {
        match &self.args[i] {
            Arg::Scalar { text, position } => text
                .trim()
                .parse::<u64>()
                .map_err(|_| DescriptorError::new(*position, format!("expected a non-negative integer, found '{text}'"))),
            Arg::Call(c) => Err(DescriptorError::new(c.position, "expected an integer")),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

/// Parses a full descriptor into a call tree.
pub(crate) fn parse_call(src: &str) -> Result<Call, DescriptorError> {
    match parse_arg(src, 0)? {
        Arg::Call(c) => Ok(c),
        Arg::Scalar { position, text } => {
            Err(DescriptorError::new(position, format!("expected a descriptor name, found '{text}'")))
        }
    }
}

fn parse_arg(src: &str, base: usize) -> Result<Arg, DescriptorError> {
    let lead = src.len() - src.trim_start().len();
    let text = src.trim();
    let position = base + lead;
    if text.is_empty() {
        return Err(DescriptorError::new(position, "empty argument"));
    }
    let ident_len = text.find(|c: char| !(is_ident_start(c) || c.is_ascii_digit())).unwrap_or(text.len());
    let ident = &text[..ident_len];
    // A bare `n` or `i` is a scalar, not a descriptor.
    let looks_like_call = ident.len() >= 2 && text.starts_with(is_ident_start);
    if !looks_like_call {
        return Ok(Arg::Scalar { text: text.to_string(), position });
    }
    let rest = text[ident_len..].trim_start();
    if rest.is_empty() {
        return Ok(Arg::Call(Call { name: ident.to_string(), args: Vec::new(), position }));
    }
    if !rest.starts_with('(') || !rest.ends_with(')') {
        return Err(DescriptorError::new(position + ident_len, "expected '(' ... ')' after descriptor name"));
    }
    let open = text.len() - rest.len();
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(DescriptorError::new(position + open + 1 + i, "unbalanced ')'"));
                }
            }
            ',' if depth == 0 => {
                args.push(parse_arg(&inner[start..i], position + open + 1 + start)?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(DescriptorError::new(position + open, "unbalanced '('"));
    }
    if !inner.trim().is_empty() {
        args.push(parse_arg(&inner[start..], position + open + 1 + start)?);
    }
    Ok(Arg::Call(Call { name: ident.to_string(), args, position }))
}
