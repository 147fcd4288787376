//! Univariate symbolic expressions: parsing, printing, differentiation,
//! substitution, simplification and numeric evaluation.
//!
//! Constants are exact rationals until an operation overflows `i128`;
//! floating point enters only at evaluation.

mod diff;
mod display;
mod eval;
mod expr;
mod parse;
mod simplify;

pub use diff::NodeCapExceeded;
pub use eval::{Binding, DomainKind, EvalError, Program};
pub use expr::{BinOp, Expr, Func, Kind, DEFAULT_NODE_CAP};
pub use parse::{parse, ParseError, ParseErrorKind};
