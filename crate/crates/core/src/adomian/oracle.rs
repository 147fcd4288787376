//! Independent construction of `A_n` as a Taylor coefficient:
//! `A_n = (1/n!) d^n/dλ^n H(ψ(λ)) |_{λ=0}` with `ψ(λ) = Σ_{i=0..n} λ^i w_i`.
//!
//! The derivatives are taken by the generic symbolic differentiator, with
//! `H` as a formal function, and the result is expanded back into an
//! [`AbstractPoly`]. Nothing here shares code with the composition sum or
//! the recursion.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use super::poly::{factorial, AbstractPoly, Monomial};
use crate::error::{Error, Result};
use crate::num::{Num, Rational};
use crate::problem::{ProblemSpec, SPACE_VAR, STATE_VAR};
use crate::symexpr::{BinOp, Expr, Kind};

/// The oracle is for testing; its cost grows quickly with the order.
pub const ORACLE_MAX_ORDER: usize = 8;

const LAMBDA: &str = "lambda";
const FORMAL_H: &str = "H";

fn w_name(i: usize) -> String {
    format!("w{i}")
}

/// `ψ(λ) = Σ_{i=0..n} λ^i c_i`.
fn psi(coeffs: &[Expr]) -> Expr {
    let lambda = Expr::var(LAMBDA);
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| match i {
            0 => c.clone(),
            1 => Expr::mul(lambda.clone(), c.clone()),
            _ => Expr::mul(Expr::powi(lambda.clone(), i as i128), c.clone()),
        })
        .reduce(Expr::add)
        .unwrap_or_else(Expr::zero)
}

fn nth_lambda_derivative(e: &Expr, n: usize) -> Result<Expr> {
    let mut d = e.simplify();
    for _ in 0..n {
        d = d.differentiate(LAMBDA)?;
    }
    Ok(d)
}

/// `A_n` by repeated symbolic differentiation in `λ`.
pub fn oracle_polynomial(n: usize) -> Result<AbstractPoly> {
    if n > ORACLE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "oracle order {n} above {ORACLE_MAX_ORDER}"
        )));
    }
    let ws: Vec<Expr> = (0..=n).map(|i| Expr::var(&w_name(i))).collect();
    let composed = Expr::formal(FORMAL_H, 0, psi(&ws));
    let dn = nth_lambda_derivative(&composed, n)?;
    let at_zero = dn.substitute(LAMBDA, &Expr::zero())?.simplify();
    let expanded = expand(&at_zero)?;
    let scale = Rational::one() / factorial(n);
    let mut out = AbstractPoly::zero();
    for ((order, parts), c) in expanded {
        let order = order.ok_or_else(|| {
            Error::InvalidArgument(format!("oracle term without H: {at_zero}"))
        })?;
        let c = c
            .as_rational()
            .ok_or_else(|| Error::InvalidArgument(String::from("inexact oracle coefficient")))?;
        out.add_term(Monomial::new(order, parts), c * scale);
    }
    Ok(out)
}

/// `A_n` for a concrete Hamiltonian (in `v`) and numeric stand-ins
/// `w[0..=n]`, by differentiating `H(ψ(λ))` directly.
pub fn oracle_value(hamiltonian: &Expr, n: usize, w: &[f64]) -> Result<f64> {
    if w.len() <= n {
        return Err(Error::InvalidArgument(format!(
            "need {} stand-in values, got {}",
            n + 1,
            w.len()
        )));
    }
    let coeffs: Vec<Expr> = w[..=n].iter().map(|&c| Expr::from(c)).collect();
    let composed = hamiltonian.substitute(STATE_VAR, &psi(&coeffs))?;
    let dn = nth_lambda_derivative(&composed, n)?;
    let value = dn.eval_at(LAMBDA, 0.0).map_err(|source| Error::Eval {
        context: format!("oracle order {n}"),
        source,
    })?;
    Ok(value / *factorial(n).numer() as f64)
}

/// `ũ_0 ..= ũ_n` for a concrete problem straight from the Taylor form:
/// with `u_k = ũ_k t^k/k!`, `A_k = t^k a_k` and
/// `ũ_{k+1} = -d^k/dλ^k H(Σ_i λ^i ũ'_i/i!) |_{λ=0}`.
/// No Adomian polynomial, composition or multinomial weight is involved.
pub fn oracle_series(problem: &ProblemSpec, n: usize) -> Result<Vec<Expr>> {
    if n > ORACLE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "oracle order {n} above {ORACLE_MAX_ORDER}"
        )));
    }
    let mut coeffs = alloc::vec![problem.initial().clone()];
    let mut scaled_derivs: Vec<Expr> = Vec::new();
    for k in 0..n {
        let d = coeffs[k].differentiate(SPACE_VAR)?;
        scaled_derivs.push(Expr::mul(d, Expr::constant(Num::Rat(Rational::one() / factorial(k)))));
        let composed = problem.hamiltonian().substitute(STATE_VAR, &psi(&scaled_derivs))?;
        let dk = nth_lambda_derivative(&composed, k)?;
        let at_zero = dk.substitute(LAMBDA, &Expr::zero())?;
        coeffs.push(Expr::neg(at_zero).simplify());
    }
    Ok(coeffs)
}

// A polynomial in the w's whose monomials carry at most one formal H factor.
type Key = (Option<u32>, Vec<u32>);
type Poly = BTreeMap<Key, Num>;

fn single(key: Key, c: Num) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(key, c);
    }
    p
}

fn accumulate(into: &mut Poly, key: Key, c: Num) {
    let updated = into.get(&key).copied().unwrap_or(Num::ZERO) + c;
    if updated.is_zero() {
        into.remove(&key);
    } else {
        into.insert(key, updated);
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Result<Poly> {
    let mut out = Poly::new();
    for ((ha, pa), ca) in a {
        for ((hb, pb), cb) in b {
            let h = match (ha, hb) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidArgument(String::from(
                        "product of two H factors in oracle expansion",
                    )))
                }
                (Some(k), None) | (None, Some(k)) => Some(*k),
                (None, None) => None,
            };
            let mut parts = pa.clone();
            parts.extend_from_slice(pb);
            parts.sort_unstable();
            accumulate(&mut out, (h, parts), *ca * *cb);
        }
    }
    Ok(out)
}

fn expand(e: &Expr) -> Result<Poly> {
    let unsupported = || Error::InvalidArgument(format!("cannot expand `{e}` as a polynomial"));
    Ok(match e.kind() {
        Kind::Const(c) => single((None, Vec::new()), *c),
        Kind::Var(name) => {
            let index: u32 = name
                .strip_prefix('w')
                .and_then(|i| i.parse().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(unsupported)?;
            single((None, alloc::vec![index]), Num::ONE)
        }
        Kind::Formal { order, arg, .. } => {
            if !matches!(arg.kind(), Kind::Var(v) if &**v == "w0") {
                return Err(unsupported());
            }
            single((Some(*order), Vec::new()), Num::ONE)
        }
        Kind::Neg(a) => expand(a)?.into_iter().map(|(k, c)| (k, -c)).collect(),
        Kind::Binary(op, a, b) => match op {
            BinOp::Add | BinOp::Sub => {
                let mut out = expand(a)?;
                let sign = if *op == BinOp::Sub { -Num::ONE } else { Num::ONE };
                for (k, c) in expand(b)? {
                    accumulate(&mut out, k, sign * c);
                }
                out
            }
            BinOp::Mul => poly_mul(&expand(a)?, &expand(b)?)?,
            BinOp::Div => {
                let d = b.as_const().filter(|c| !c.is_zero()).ok_or_else(unsupported)?;
                expand(a)?
                    .into_iter()
                    .filter_map(|(k, c)| c.checked_div(d).map(|q| (k, q)))
                    .collect()
            }
            BinOp::Pow => {
                let n = b
                    .as_const()
                    .and_then(|c| c.as_integer())
                    .filter(|&n| n >= 0)
                    .ok_or_else(unsupported)?;
                let base = expand(a)?;
                let mut acc = single((None, Vec::new()), Num::ONE);
                for _ in 0..n {
                    acc = poly_mul(&acc, &base)?;
                }
                acc
            }
        },
        Kind::Func(..) => return Err(unsupported()),
    })
    .map(|p: Poly| p.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}
