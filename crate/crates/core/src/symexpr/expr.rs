use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use core::cmp::Ordering;

use crate::num::Num;

/// Default cap on the (tree) node count of any expression built by a
/// fallible operation.
pub const DEFAULT_NODE_CAP: usize = 200_000;

/// Elementary functions of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Exp,
    Ln,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Sqrt, Func::Exp, Func::Ln];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// One node of an expression tree.
#[derive(Clone, Debug)]
pub enum Kind {
    Const(Num),
    Var(Arc<str>),
    Neg(Expr),
    Func(Func, Expr),
    Binary(BinOp, Expr, Expr),
    /// `name^(order)(arg)`: an unspecified smooth function and its
    /// derivatives. Only produced programmatically, never by the parser.
    Formal {
        name: Arc<str>,
        order: u32,
        arg: Expr,
    },
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    size: usize,
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn from_kind(kind: Kind) -> Expr {
        let size = 1 + match &kind {
            Kind::Const(_) | Kind::Var(_) => 0,
            Kind::Neg(a) | Kind::Func(_, a) | Kind::Formal { arg: a, .. } => a.size(),
            Kind::Binary(_, a, b) => a.size().saturating_add(b.size()),
        };
        Expr(Arc::new(Node { kind, size }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes in the tree, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn constant(n: impl Into<Num>) -> Expr {
        Expr::from_kind(Kind::Const(n.into()))
    }

    pub fn int(n: i128) -> Expr {
        Expr::constant(Num::int(n))
    }

    pub fn ratio(numer: i128, denom: i128) -> Expr {
        Expr::constant(Num::ratio(numer, denom))
    }

    pub fn zero() -> Expr {
        Expr::constant(Num::ZERO)
    }

    pub fn one() -> Expr {
        Expr::constant(Num::ONE)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_kind(Kind::Var(Arc::from(name)))
    }

    /// Negation; folds constants so `-c` is always a single node.
    pub fn neg(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) => Expr::constant(-c),
            None => Expr::from_kind(Kind::Neg(a)),
        }
    }

    pub fn func(f: Func, a: Expr) -> Expr {
        Expr::from_kind(Kind::Func(f, a))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::from_kind(Kind::Binary(op, a, b))
    }

    pub fn formal(name: &str, order: u32, arg: Expr) -> Expr {
        Expr::from_kind(Kind::Formal {
            name: Arc::from(name),
            order,
            arg,
        })
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Pow, a, b)
    }

    pub fn powi(a: Expr, n: i128) -> Expr {
        Expr::pow(a, Expr::int(n))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::func(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::func(Func::Cos, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::func(Func::Sqrt, a)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::func(Func::Ln, a)
    }

    pub fn as_const(&self) -> Option<Num> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Names of all variables occurring in the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.kind() {
            Kind::Const(_) => {}
            Kind::Var(v) => {
                if !out.contains(&**v) {
                    out.insert(String::from(&**v));
                }
            }
            Kind::Neg(a) | Kind::Func(_, a) | Kind::Formal { arg: a, .. } => a.collect_vars(out),
            Kind::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self.kind() {
            Kind::Const(_) => false,
            Kind::Var(v) => &**v == name,
            Kind::Neg(a) | Kind::Func(_, a) | Kind::Formal { arg: a, .. } => a.contains_var(name),
            Kind::Binary(_, a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    pub(crate) fn rank(&self) -> u8 {
        match self.kind() {
            Kind::Const(_) => 0,
            Kind::Var(_) => 1,
            Kind::Binary(BinOp::Pow, ..) => 2,
            Kind::Func(..) => 3,
            Kind::Formal { .. } => 4,
            Kind::Binary(BinOp::Mul, ..) | Kind::Binary(BinOp::Div, ..) => 5,
            Kind::Neg(_) => 6,
            Kind::Binary(..) => 7,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Expr) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total structural order, used to sort terms and factors canonically.
impl Ord for Expr {
    fn cmp(&self, other: &Expr) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.size().cmp(&other.size()))
            .then_with(|| match (self.kind(), other.kind()) {
                (Kind::Const(a), Kind::Const(b)) => a.cmp(b),
                (Kind::Var(a), Kind::Var(b)) => a.cmp(b),
                (Kind::Neg(a), Kind::Neg(b)) => a.cmp(b),
                (Kind::Func(f, a), Kind::Func(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
                (Kind::Binary(o1, a1, b1), Kind::Binary(o2, a2, b2)) => o1
                    .cmp(o2)
                    .then_with(|| a1.cmp(a2))
                    .then_with(|| b1.cmp(b2)),
                (
                    Kind::Formal {
                        name: n1,
                        order: k1,
                        arg: a1,
                    },
                    Kind::Formal {
                        name: n2,
                        order: k2,
                        arg: a2,
                    },
                ) => n1.cmp(n2).then_with(|| k1.cmp(k2)).then_with(|| a1.cmp(a2)),
                // same rank implies same variant except Add/Sub which are
                // both rank 7 and are separated by the `Binary` arm above
                _ => Ordering::Equal,
            })
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Expr {
        Expr::constant(Num::Float(value))
    }
}

macro_rules! expr_op {
    ($tr:ident, $method:ident, $ctor:ident) => {
        impl core::ops::$tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(self, rhs)
            }
        }
        impl core::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs.clone())
            }
        }
    };
}

expr_op!(Add, add, add);
expr_op!(Sub, sub, sub);
expr_op!(Mul, mul, mul);
expr_op!(Div, div, div);

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
