//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Constant subexpressions with an exact rational value are folded while
//! parsing, so `1/2` is read as the constant one half.

use alloc::string::{String, ToString};
use core::fmt;

use super::expr::{BinOp, Expr, Func};
use crate::num::Num;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    BadNumber(String),
    UnknownFunction(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(f, "unexpected {t:?} at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at offset {}", self.offset)
            }
            ParseErrorKind::BadNumber(t) => write!(f, "malformed number {t:?} at offset {}", self.offset),
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function {name:?} at offset {}", self.offset)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token<'a> {
    Number(&'a str),
    Ident(&'a str),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Token<'_> {
    fn describe(&self) -> String {
        match self {
            Token::Number(s) | Token::Ident(s) => s.to_string(),
            Token::Op(c) => c.to_string(),
            Token::LParen => "(".to_string(),
            Token::RParen => ")".to_string(),
            Token::End => "end of input".to_string(),
        }
    }
}

fn tokenize(text: &str) -> Result<alloc::vec::Vec<(usize, Token<'_>)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = alloc::vec::Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Token::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push((start, Token::Number(&text[start..i])));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(&text[start..i])));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser<'a> {
    tokens: alloc::vec::Vec<(usize, Token<'a>)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token<'a> {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> (usize, Token<'a>) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Token::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.describe()),
        };
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Token::Op(op @ ('+' | '-')) = *self.peek() {
            self.advance();
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = fold(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Token::Op(op @ ('*' | '/')) = *self.peek() {
            self.advance();
            let rhs = self.factor()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = fold(op, lhs, rhs);
        }
        Ok(lhs)
    }

    // Unary minus sits at this level, so `-x^2` reads as `-(x^2)`.
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Token::Op('-') = self.peek() {
            self.advance();
            return Ok(Expr::neg(self.factor()?));
        }
        let base = self.base()?;
        if let Token::Op('^') = self.peek() {
            self.advance();
            let exponent = self.factor()?;
            return Ok(fold(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (offset, tok) = self.advance();
        match tok {
            Token::Number(text) => Num::parse_decimal(text)
                .map(Expr::constant)
                .ok_or_else(|| ParseError {
                    offset,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                }),
            Token::Ident(name) => {
                if *self.peek() != Token::LParen {
                    return Ok(Expr::var(name));
                }
                let func = Func::from_name(name).ok_or_else(|| ParseError {
                    offset,
                    kind: ParseErrorKind::UnknownFunction(name.to_string()),
                })?;
                self.advance();
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::func(func, arg))
            }
            Token::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => {
                self.pos -= usize::from(tok != Token::End);
                Err(self.unexpected())
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Token::RParen {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }
}

/// Builds `a op b`, folding to a constant when both sides are constants and
/// the result is exact.
pub(crate) fn fold(op: BinOp, a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if x.is_exact() && y.is_exact() {
            let folded = match op {
                BinOp::Add => Some(x + y),
                BinOp::Sub => Some(x - y),
                BinOp::Mul => Some(x * y),
                BinOp::Div => x.checked_div(y),
                BinOp::Pow => y
                    .as_integer()
                    .filter(|e| e.abs() <= 128)
                    .and_then(|e| x.powi(e)),
            };
            if let Some(c) = folded.filter(Num::is_exact) {
                return Expr::constant(c);
            }
        }
    }
    Expr::binary(op, a, b)
}

/// Parses an expression in the grammar above.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.unexpected());
    }
    Ok(e)
}

impl core::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_variable() {
        assert_eq!(parse("x^2").unwrap(), Expr::powi(Expr::var("x"), 2));
    }

    #[test]
    fn sqrt_root_node() {
        let e = parse("sqrt(1+cos(x)^2)").unwrap();
        let expected = Expr::sqrt(Expr::int(1) + Expr::powi(Expr::cos(Expr::var("x")), 2));
        assert_eq!(e, expected);
    }

    #[test]
    fn dangling_operator_reports_offset() {
        let err = parse("1 +").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
    }

    #[test]
    fn unknown_function() {
        let err = parse("2*tan(x)").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("tan".into()));
    }

    #[test]
    fn unbalanced_and_trailing_tokens() {
        assert_eq!(parse("(x+1").unwrap_err().offset, 4);
        assert!(matches!(
            parse("x y").unwrap_err().kind,
            ParseErrorKind::UnexpectedToken(_)
        ));
        assert!(matches!(
            parse("x $ 1").unwrap_err().kind,
            ParseErrorKind::UnexpectedChar('$')
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse("-x^2").unwrap();
        assert_eq!(e, Expr::neg(Expr::powi(Expr::var("x"), 2)));
        assert_eq!(parse("(-x)^2").unwrap(), Expr::powi(Expr::neg(Expr::var("x")), 2));
        assert_eq!(parse("-2^2").unwrap(), Expr::int(-4));
        assert_eq!(parse("x*-y").unwrap(), Expr::mul(Expr::var("x"), Expr::neg(Expr::var("y"))));
    }

    #[test]
    fn constants_fold_exactly() {
        assert_eq!(parse("1/2").unwrap(), Expr::ratio(1, 2));
        assert_eq!(parse("-3").unwrap(), Expr::int(-3));
        assert_eq!(parse("2^-2").unwrap(), Expr::ratio(1, 4));
        assert_eq!(parse("0.5*x").unwrap(), Expr::ratio(1, 2) * Expr::var("x"));
        // 1/0 is left unevaluated
        assert!(parse("1/0").unwrap().as_const().is_none());
    }
}
