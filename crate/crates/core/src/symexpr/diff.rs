use alloc::collections::BTreeMap;
use core::fmt;

use super::expr::{BinOp, Expr, Func, Kind};
use crate::num::Num;

/// A fallible symbolic operation produced a tree larger than allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeCapExceeded {
    pub size: usize,
    pub cap: usize,
}

impl fmt::Display for NodeCapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expression grew to {} nodes, above the cap of {}",
            self.size, self.cap
        )
    }
}

fn capped(e: Expr, cap: usize) -> Result<Expr, NodeCapExceeded> {
    if e.size() > cap {
        Err(NodeCapExceeded { size: e.size(), cap })
    } else {
        Ok(e)
    }
}

// Constructors with the trivial identities applied, so derivatives of large
// trees do not fill up with `0*...` and `1*...` nodes.

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if x.is_exact() && y.is_exact() => Expr::constant(x + y),
        (Some(x), _) if x.is_zero() => b,
        (_, Some(y)) if y.is_zero() => a,
        _ => Expr::add(a, b),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if x.is_exact() && y.is_exact() => Expr::constant(x - y),
        (Some(x), _) if x.is_zero() => Expr::neg(b),
        (_, Some(y)) if y.is_zero() => a,
        _ => Expr::sub(a, b),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if x.is_exact() && y.is_exact() => Expr::constant(x * y),
        (Some(x), _) | (_, Some(x)) if x.is_zero() => Expr::zero(),
        (Some(x), _) if x.is_one() => b,
        (_, Some(y)) if y.is_one() => a,
        (Some(x), _) if x == -Num::ONE => Expr::neg(b),
        (_, Some(y)) if y == -Num::ONE => Expr::neg(a),
        _ => Expr::mul(a, b),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        return Expr::zero();
    }
    if b.is_one() {
        return a;
    }
    Expr::div(a, b)
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        return Expr::one();
    }
    if b.is_one() {
        return a;
    }
    Expr::pow(a, b)
}

impl Expr {
    /// Exact symbolic derivative with respect to `var`, simplified.
    pub fn differentiate(&self, var: &str) -> Result<Expr, NodeCapExceeded> {
        self.differentiate_capped(var, super::DEFAULT_NODE_CAP)
    }

    pub fn differentiate_capped(&self, var: &str, cap: usize) -> Result<Expr, NodeCapExceeded> {
        let mut memo = BTreeMap::new();
        let raw = derive(self, var, cap, &mut memo)?;
        capped(raw.simplify(), cap)
    }

    /// Replaces every occurrence of the variable `var` by `with`.
    pub fn substitute(&self, var: &str, with: &Expr) -> Result<Expr, NodeCapExceeded> {
        self.substitute_capped(var, with, super::DEFAULT_NODE_CAP)
    }

    pub fn substitute_capped(
        &self,
        var: &str,
        with: &Expr,
        cap: usize,
    ) -> Result<Expr, NodeCapExceeded> {
        let mut memo = BTreeMap::new();
        replace(self, var, with, cap, &mut memo)
    }
}

fn replace(
    e: &Expr,
    var: &str,
    with: &Expr,
    cap: usize,
    memo: &mut BTreeMap<usize, Expr>,
) -> Result<Expr, NodeCapExceeded> {
    if !e.contains_var(var) {
        return Ok(e.clone());
    }
    if let Some(done) = memo.get(&e.addr()) {
        return Ok(done.clone());
    }
    let out = match e.kind() {
        Kind::Const(_) => e.clone(),
        Kind::Var(_) => with.clone(),
        Kind::Neg(a) => Expr::neg(replace(a, var, with, cap, memo)?),
        Kind::Func(f, a) => Expr::func(*f, replace(a, var, with, cap, memo)?),
        Kind::Formal { name, order, arg } => {
            Expr::formal(name, *order, replace(arg, var, with, cap, memo)?)
        }
        Kind::Binary(op, a, b) => Expr::binary(
            *op,
            replace(a, var, with, cap, memo)?,
            replace(b, var, with, cap, memo)?,
        ),
    };
    let out = capped(out, cap)?;
    memo.insert(e.addr(), out.clone());
    Ok(out)
}

fn derive(
    e: &Expr,
    var: &str,
    cap: usize,
    memo: &mut BTreeMap<usize, Expr>,
) -> Result<Expr, NodeCapExceeded> {
    if !e.contains_var(var) {
        return Ok(Expr::zero());
    }
    if let Some(done) = memo.get(&e.addr()) {
        return Ok(done.clone());
    }
    let out = match e.kind() {
        Kind::Const(_) => Expr::zero(),
        Kind::Var(_) => Expr::one(),
        Kind::Neg(a) => Expr::neg(derive(a, var, cap, memo)?),
        Kind::Func(f, a) => {
            let da = derive(a, var, cap, memo)?;
            let outer = match f {
                Func::Sin => Expr::cos(a.clone()),
                Func::Cos => Expr::neg(Expr::sin(a.clone())),
                Func::Exp => e.clone(),
                Func::Ln => div(Expr::one(), a.clone()),
                Func::Sqrt => div(Expr::one(), mul(Expr::int(2), e.clone())),
            };
            mul(outer, da)
        }
        Kind::Formal { name, order, arg } => {
            let da = derive(arg, var, cap, memo)?;
            mul(Expr::formal(name, order + 1, arg.clone()), da)
        }
        Kind::Binary(op, a, b) => {
            let da = derive(a, var, cap, memo)?;
            let db = derive(b, var, cap, memo)?;
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b.clone()), mul(a.clone(), db)),
                BinOp::Div => div(
                    sub(mul(da, b.clone()), mul(a.clone(), db)),
                    pow(b.clone(), Expr::int(2)),
                ),
                BinOp::Pow => match b.as_const() {
                    // d(a^c) = c a^(c-1) a'
                    Some(c) => mul(
                        mul(Expr::constant(c), pow(a.clone(), Expr::constant(c - Num::ONE))),
                        da,
                    ),
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    None => mul(
                        e.clone(),
                        add(
                            mul(db, Expr::ln(a.clone())),
                            div(mul(b.clone(), da), a.clone()),
                        ),
                    ),
                },
            }
        }
    };
    let out = capped(out, cap)?;
    memo.insert(e.addr(), out.clone());
    Ok(out)
}
