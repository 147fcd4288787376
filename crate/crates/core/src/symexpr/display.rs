use core::fmt;

use super::expr::{BinOp, Expr, Kind};
use crate::num::Num;

// Binding strength of each printed form. Higher binds tighter.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
// powers and negations
const FACTOR: u8 = 3;
const ATOM: u8 = 5;

fn const_level(c: &Num) -> u8 {
    match c {
        Num::Rat(r) if !r.is_integer() => PRODUCT,
        _ if c.is_negative() => FACTOR,
        _ => ATOM,
    }
}

fn level(e: &Expr) -> u8 {
    match e.kind() {
        Kind::Const(c) => const_level(c),
        Kind::Var(_) | Kind::Func(..) | Kind::Formal { .. } => ATOM,
        Kind::Neg(_) => FACTOR,
        Kind::Binary(BinOp::Add | BinOp::Sub, ..) => SUM,
        Kind::Binary(BinOp::Mul | BinOp::Div, ..) => PRODUCT,
        Kind::Binary(BinOp::Pow, ..) => FACTOR,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e) < min_level {
        f.write_str("(")?;
        write_expr(f, e)?;
        f.write_str(")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.kind() {
        Kind::Const(c) => write!(f, "{c}"),
        Kind::Var(v) => f.write_str(v),
        Kind::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, FACTOR)
        }
        Kind::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            f.write_str(")")
        }
        Kind::Formal { name, order, arg } => {
            if *order == 0 {
                write!(f, "{name}(")?;
            } else {
                write!(f, "{name}[{order}](")?;
            }
            write_expr(f, arg)?;
            f.write_str(")")
        }
        Kind::Binary(op, a, b) => {
            let (sym, left, right) = match op {
                BinOp::Add => (" + ", SUM, PRODUCT),
                BinOp::Sub => (" - ", SUM, PRODUCT),
                BinOp::Mul => ("*", PRODUCT, FACTOR),
                BinOp::Div => ("/", PRODUCT, FACTOR),
                BinOp::Pow => ("^", ATOM, FACTOR),
            };
            write_at(f, a, left)?;
            f.write_str(sym)?;
            write_at(f, b, right)
        }
    }
}

/// Prints in the parser's grammar; `parse(e.to_string())` rebuilds `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
