use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::expr::{BinOp, Expr, Func, Kind};

/// Values for the free variables of an expression.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    vars: Vec<(String, f64)>,
}

impl Binding {
    pub fn new() -> Binding {
        Binding::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Binding {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.vars.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.vars.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    SqrtOfNegative,
    DivisionByZero,
    LogOfNonPositive,
    /// A power whose value is not a real number (negative base with a
    /// non-integer exponent, or zero to a negative power).
    InvalidPower,
    /// `Formal` placeholders carry no numeric meaning.
    FormalFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    Unbound(String),
    Domain {
        kind: DomainKind,
        /// The offending subexpression, printed.
        expr: String,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound(v) => write!(f, "unbound variable {v:?}"),
            EvalError::Domain { kind, expr } => {
                let what = match kind {
                    DomainKind::SqrtOfNegative => "square root of a negative number",
                    DomainKind::DivisionByZero => "division by zero",
                    DomainKind::LogOfNonPositive => "logarithm of a non-positive number",
                    DomainKind::InvalidPower => "power with no real value",
                    DomainKind::FormalFunction => "cannot evaluate a formal function",
                };
                write!(f, "{what} in `{expr}`")
            }
        }
    }
}

fn domain(kind: DomainKind, e: &Expr) -> EvalError {
    EvalError::Domain {
        kind,
        expr: e.to_string(),
    }
}

fn apply_func(func: Func, a: f64, node: &Expr) -> Result<f64, EvalError> {
    Ok(match func {
        Func::Sin => libm::sin(a),
        Func::Cos => libm::cos(a),
        Func::Exp => libm::exp(a),
        Func::Sqrt => {
            if a < 0.0 {
                return Err(domain(DomainKind::SqrtOfNegative, node));
            }
            libm::sqrt(a)
        }
        Func::Ln => {
            if a <= 0.0 {
                return Err(domain(DomainKind::LogOfNonPositive, node));
            }
            libm::log(a)
        }
    })
}

fn apply_binary(op: BinOp, a: f64, b: f64, node: &Expr) -> Result<f64, EvalError> {
    Ok(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(domain(DomainKind::DivisionByZero, node));
            }
            a / b
        }
        BinOp::Pow => power(a, b).ok_or_else(|| domain(DomainKind::InvalidPower, node))?,
    })
}

fn power(base: f64, exp: f64) -> Option<f64> {
    if base == 0.0 && exp < 0.0 {
        return None;
    }
    if libm::trunc(exp) == exp && exp.abs() <= 64.0 {
        // repeated multiplication is exact for the small integer powers the
        // series produces, where `pow` may differ in the last bit
        let mut acc = 1.0;
        for _ in 0..(exp.abs() as u32) {
            acc *= base;
        }
        return Some(if exp < 0.0 { 1.0 / acc } else { acc });
    }
    if base < 0.0 && libm::trunc(exp) != exp {
        return None;
    }
    Some(libm::pow(base, exp))
}

impl Expr {
    /// Evaluates in IEEE double precision.
    pub fn evaluate(&self, binding: &Binding) -> Result<f64, EvalError> {
        match self.kind() {
            Kind::Const(c) => Ok(c.to_f64()),
            Kind::Var(v) => binding.get(v).ok_or_else(|| EvalError::Unbound(v.to_string())),
            Kind::Neg(a) => Ok(-a.evaluate(binding)?),
            Kind::Func(func, a) => apply_func(*func, a.evaluate(binding)?, self),
            Kind::Binary(op, a, b) => {
                apply_binary(*op, a.evaluate(binding)?, b.evaluate(binding)?, self)
            }
            Kind::Formal { .. } => Err(domain(DomainKind::FormalFunction, self)),
        }
    }

    /// Evaluates an expression in a single variable.
    pub fn eval_at(&self, var: &str, value: f64) -> Result<f64, EvalError> {
        self.evaluate(&Binding::new().with(var, value))
    }

    /// Flattens the tree into a stack program for repeated evaluation in one
    /// variable. Any other free variable is an error.
    pub fn compile(&self, var: &str) -> Result<Program, EvalError> {
        let mut program = Program {
            ops: Vec::new(),
            nodes: Vec::new(),
        };
        program.emit(self, var)?;
        Ok(program)
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(f64),
    Var,
    Neg,
    Func(Func),
    Binary(BinOp),
}

/// Postfix program compiled from an [`Expr`] in one variable.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    // source node of each op, kept for error reporting
    nodes: Vec<Expr>,
}

impl Program {
    fn emit(&mut self, e: &Expr, var: &str) -> Result<(), EvalError> {
        let op = match e.kind() {
            Kind::Const(c) => Op::Const(c.to_f64()),
            Kind::Var(v) if &**v == var => Op::Var,
            Kind::Var(v) => return Err(EvalError::Unbound(v.to_string())),
            Kind::Neg(a) => {
                self.emit(a, var)?;
                Op::Neg
            }
            Kind::Func(f, a) => {
                self.emit(a, var)?;
                Op::Func(*f)
            }
            Kind::Binary(op, a, b) => {
                self.emit(a, var)?;
                self.emit(b, var)?;
                Op::Binary(*op)
            }
            Kind::Formal { .. } => return Err(domain(DomainKind::FormalFunction, e)),
        };
        self.ops.push(op);
        self.nodes.push(e.clone());
        Ok(())
    }

    pub fn eval(&self, value: f64) -> Result<f64, EvalError> {
        let mut stack: Vec<f64> = Vec::with_capacity(16);
        for (op, node) in self.ops.iter().zip(&self.nodes) {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Var => stack.push(value),
                Op::Neg => {
                    let a = stack.pop().expect("program stack underflow");
                    stack.push(-a);
                }
                Op::Func(f) => {
                    let a = stack.pop().expect("program stack underflow");
                    stack.push(apply_func(f, a, node)?);
                }
                Op::Binary(op) => {
                    let b = stack.pop().expect("program stack underflow");
                    let a = stack.pop().expect("program stack underflow");
                    stack.push(apply_binary(op, a, b, node)?);
                }
            }
        }
        Ok(stack.pop().expect("empty program"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    #[test]
    fn square_at_three() {
        let e = parse("x^2").unwrap();
        assert_eq!(e.eval_at("x", 3.0).unwrap(), 9.0);
    }

    #[test]
    fn critical_slope_at_half_pi() {
        let e = parse("-sin(x)/((1+cos(x)^2)^(3/2))").unwrap();
        let v = e.eval_at("x", core::f64::consts::FRAC_PI_2).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1 + sqrt(x)").unwrap();
        match e.eval_at("x", -1.0) {
            Err(EvalError::Domain { kind, expr }) => {
                assert_eq!(kind, DomainKind::SqrtOfNegative);
                assert_eq!(expr, "sqrt(x)");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(matches!(
            parse("1/x").unwrap().eval_at("x", 0.0),
            Err(EvalError::Domain {
                kind: DomainKind::DivisionByZero,
                ..
            })
        ));
        assert!(matches!(
            parse("ln(x)").unwrap().eval_at("x", 0.0),
            Err(EvalError::Domain {
                kind: DomainKind::LogOfNonPositive,
                ..
            })
        ));
        assert!(matches!(
            parse("x^(1/2)").unwrap().eval_at("x", -2.0),
            Err(EvalError::Domain {
                kind: DomainKind::InvalidPower,
                ..
            })
        ));
    }

    #[test]
    fn unbound_variable() {
        let e = parse("x + y").unwrap();
        assert_eq!(
            e.eval_at("x", 1.0),
            Err(EvalError::Unbound("y".to_string()))
        );
        let b = Binding::new().with("x", 1.0).with("y", 2.0);
        assert_eq!(e.evaluate(&b).unwrap(), 3.0);
    }

    #[test]
    fn program_matches_tree_walk() {
        let e = parse("-sqrt(1 + v^2) + exp(v)/3 - ln(2+sin(v))*cos(v)").unwrap();
        let p = e.compile("v").unwrap();
        for i in -20..20 {
            let v = i as f64 * 0.173;
            assert_eq!(p.eval(v).unwrap(), e.eval_at("v", v).unwrap());
        }
        assert!(parse("x + y").unwrap().compile("x").is_err());
    }
}
