//! Rewrite-rule simplification.
//!
//! Sums are flattened into `coefficient * term` lists and like terms are
//! merged; products are flattened into `coefficient * Π base^exponent` and
//! like bases are merged. Fractional powers are never distributed over
//! products, so the rewrite does not shrink the set of points where an
//! expression is defined except where a factor cancels against itself.
//! This is not a canonical form: sums are never expanded.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::expr::{BinOp, Expr, Func, Kind};
use super::parse::fold;
use crate::num::Num;

const MAX_PASSES: usize = 32;

impl Expr {
    /// Value-preserving simplification; idempotent and never increases
    /// [`Expr::size`].
    pub fn simplify(&self) -> Expr {
        let mut current = self.clone();
        for _ in 0..MAX_PASSES {
            let mut memo = BTreeMap::new();
            let next = pass(&current, &mut memo);
            if next.size() > current.size() || next == current {
                return current;
            }
            current = next;
        }
        current
    }
}

fn pass(e: &Expr, memo: &mut BTreeMap<usize, Expr>) -> Expr {
    if matches!(e.kind(), Kind::Const(_) | Kind::Var(_)) {
        return e.clone();
    }
    // shared subtrees are rewritten once; every node stays alive for the
    // whole pass, so addresses are stable keys
    let key = e.addr();
    if let Some(done) = memo.get(&key) {
        return done.clone();
    }
    // The rewrite can restructure a node into something larger; the
    // rebuilt node with only constant folding is the fallback, so no node
    // ever grows.
    let (out, folded) = match e.kind() {
        Kind::Const(_) | Kind::Var(_) => (e.clone(), e.clone()),
        Kind::Neg(a) => {
            let neg = Expr::neg(pass(a, memo));
            (normalize_sum(&neg), neg)
        }
        Kind::Func(f, a) => {
            let a = pass(a, memo);
            (normalize_func(*f, a.clone()), Expr::func(*f, a))
        }
        Kind::Formal { name, order, arg } => {
            let f = Expr::formal(name, *order, pass(arg, memo));
            (f.clone(), f)
        }
        Kind::Binary(op, a, b) => {
            let (a, b) = (pass(a, memo), pass(b, memo));
            let folded = fold(*op, a.clone(), b.clone());
            let out = match op {
                BinOp::Add | BinOp::Sub => normalize_sum(&Expr::binary(*op, a, b)),
                BinOp::Mul | BinOp::Div => normalize_product(&Expr::binary(*op, a, b)),
                BinOp::Pow => normalize_pow(a, b),
            };
            (out, folded)
        }
    };
    let out = if out.size() <= folded.size() { out } else { folded };
    memo.insert(key, out.clone());
    out
}

fn normalize_func(f: Func, a: Expr) -> Expr {
    if let Some(c) = a.as_const() {
        match f {
            Func::Sin | Func::Sqrt if c.is_zero() => return Expr::zero(),
            Func::Cos | Func::Exp if c.is_zero() => return Expr::one(),
            Func::Ln if c.is_one() => return Expr::zero(),
            Func::Sqrt => {
                if let Some(r) = c.exact_sqrt() {
                    return Expr::constant(r);
                }
            }
            _ => {}
        }
    }
    match (f, a.kind()) {
        (Func::Ln, Kind::Func(Func::Exp, inner)) => inner.clone(),
        // sqrt(product) keeps its argument whole; route the rest through the
        // product rules so sqrt(x)*sqrt(x) style merges see one form
        (Func::Sqrt, _) => normalize_product(&Expr::sqrt(a)),
        _ => Expr::func(f, a),
    }
}

fn normalize_pow(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        return Expr::one();
    }
    if b.is_one() {
        return a;
    }
    if a.is_one() {
        return Expr::one();
    }
    if b.as_const().is_some() {
        return normalize_product(&Expr::pow(a, b));
    }
    Expr::pow(a, b)
}

// ---------------------------------------------------------------- products

#[derive(Default)]
struct Product {
    coef: Option<Num>,
    factors: BTreeMap<Expr, Num>,
}

impl Product {
    fn coef(&self) -> Num {
        self.coef.unwrap_or(Num::ONE)
    }

    fn scale(&mut self, k: Num) {
        self.coef = Some(self.coef() * k);
    }

    fn push_factor(&mut self, base: Expr, exp: Num) {
        let slot = self.factors.entry(base).or_insert(Num::ZERO);
        *slot = *slot + exp;
    }

    fn push_const(&mut self, k: Num, exp: Num) {
        if let Some(n) = exp.as_integer() {
            if let Some(v) = k.powi(n) {
                self.scale(v);
                return;
            }
        }
        if let Some(twice) = (exp * Num::int(2)).as_integer() {
            if let Some(v) = k.exact_sqrt().and_then(|r| r.powi(twice)) {
                self.scale(v);
                return;
            }
        }
        self.push_factor(Expr::constant(k), exp);
    }

    fn flatten(&mut self, e: &Expr, exp: Num) {
        let integral = exp.as_integer().is_some();
        match e.kind() {
            Kind::Const(k) => self.push_const(*k, exp),
            Kind::Neg(a) if integral => {
                if exp.as_integer().is_some_and(|n| n % 2 != 0) {
                    self.scale(-Num::ONE);
                }
                self.flatten(a, exp);
            }
            Kind::Binary(BinOp::Mul, a, b) if integral => {
                self.flatten(a, exp);
                self.flatten(b, exp);
            }
            Kind::Binary(BinOp::Div, a, b) if integral => {
                self.flatten(a, exp);
                self.flatten(b, -exp);
            }
            Kind::Binary(BinOp::Pow, a, b) if integral && b.as_const().is_some() => {
                let r = b.as_const().unwrap_or(Num::ONE);
                if r.as_integer().is_some() {
                    self.flatten(a, r * exp);
                } else if let Some(k) = a.as_const() {
                    self.push_const(k, r * exp);
                } else {
                    self.push_factor(a.clone(), r * exp);
                }
            }
            Kind::Func(Func::Sqrt, a) => {
                let half = exp * Num::ratio(1, 2);
                match a.as_const() {
                    Some(k) => self.push_const(k, half),
                    None => self.push_factor(a.clone(), half),
                }
            }
            _ => self.push_factor(e.clone(), exp),
        }
    }

    fn settle(&mut self) {
        self.factors.retain(|_, exp| !exp.is_zero());
        let consts: Vec<(Expr, Num)> = self
            .factors
            .iter()
            .filter(|(b, exp)| b.as_const().is_some() && exp.as_integer().is_some())
            .map(|(b, exp)| (b.clone(), *exp))
            .collect();
        for (base, exp) in consts {
            let k = base.as_const().unwrap_or(Num::ONE);
            if let Some(v) = exp.as_integer().and_then(|n| k.powi(n)) {
                self.factors.remove(&base);
                self.scale(v);
            }
        }
    }

    fn build(&self) -> Expr {
        let coef = self.coef();
        if coef.is_zero() {
            return Expr::zero();
        }
        if self.factors.is_empty() {
            return Expr::constant(coef);
        }
        let magnitude = coef.abs();
        let (numer_c, denom_c) = match magnitude {
            Num::Rat(r) => (Num::int(*r.numer()), Num::int(*r.denom())),
            Num::Float(_) => (magnitude, Num::ONE),
        };
        let mut numer: Option<Expr> = (!numer_c.is_one()).then(|| Expr::constant(numer_c));
        let mut denom: Option<Expr> = (!denom_c.is_one()).then(|| Expr::constant(denom_c));
        for (base, exp) in &self.factors {
            if exp.is_negative() {
                denom = Some(chain(denom, power_form(base, -*exp)));
            } else {
                numer = Some(chain(numer, power_form(base, *exp)));
            }
        }
        let numer = numer.unwrap_or_else(Expr::one);
        let body = match denom {
            Some(d) => Expr::div(numer, d),
            None => numer,
        };
        if coef.is_negative() {
            Expr::neg(body)
        } else {
            body
        }
    }
}

fn chain(acc: Option<Expr>, next: Expr) -> Expr {
    match acc {
        Some(a) => Expr::mul(a, next),
        None => next,
    }
}

fn power_form(base: &Expr, exp: Num) -> Expr {
    if exp.is_one() {
        base.clone()
    } else if exp == Num::ratio(1, 2) {
        Expr::sqrt(base.clone())
    } else {
        Expr::pow(base.clone(), Expr::constant(exp))
    }
}

fn flatten_product(e: &Expr) -> Product {
    let mut p = Product::default();
    p.flatten(e, Num::ONE);
    p.settle();
    p
}

fn normalize_product(e: &Expr) -> Expr {
    flatten_product(e).build()
}

/// Splits a term into its numeric coefficient and coefficient-free rest.
fn split_coefficient(e: &Expr) -> (Num, Expr) {
    match e.kind() {
        Kind::Const(k) => (*k, Expr::one()),
        Kind::Neg(_) | Kind::Binary(BinOp::Mul | BinOp::Div | BinOp::Pow, ..) => {
            let mut p = flatten_product(e);
            let coef = p.coef();
            p.coef = None;
            if coef.is_zero() {
                return (Num::ZERO, Expr::one());
            }
            (coef, p.build())
        }
        _ => (Num::ONE, e.clone()),
    }
}

// -------------------------------------------------------------------- sums

fn collect_terms(e: &Expr, sign: Num, terms: &mut BTreeMap<Expr, Num>) {
    match e.kind() {
        Kind::Binary(BinOp::Add, a, b) => {
            collect_terms(a, sign, terms);
            collect_terms(b, sign, terms);
        }
        Kind::Binary(BinOp::Sub, a, b) => {
            collect_terms(a, sign, terms);
            collect_terms(b, -sign, terms);
        }
        Kind::Neg(a) => collect_terms(a, -sign, terms),
        _ => {
            let (coef, rest) = split_coefficient(e);
            if !coef.is_zero() {
                let slot = terms.entry(rest).or_insert(Num::ZERO);
                *slot = *slot + sign * coef;
            }
        }
    }
}

fn scaled(coef: Num, rest: &Expr) -> Expr {
    if rest.is_one() {
        return Expr::constant(coef);
    }
    let mut p = flatten_product(rest);
    p.scale(coef);
    p.build()
}

fn normalize_sum(e: &Expr) -> Expr {
    let mut terms = BTreeMap::new();
    collect_terms(e, Num::ONE, &mut terms);
    let mut ordered: Vec<(Expr, Num)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    // constant term last
    if let Some(pos) = ordered.iter().position(|(rest, _)| rest.is_one()) {
        let constant = ordered.remove(pos);
        ordered.push(constant);
    }
    let mut acc: Option<Expr> = None;
    for (rest, coef) in ordered {
        acc = Some(match acc {
            None => scaled(coef, &rest),
            Some(a) if coef.is_negative() => Expr::sub(a, scaled(-coef, &rest)),
            Some(a) => Expr::add(a, scaled(coef, &rest)),
        });
    }
    acc.unwrap_or_else(Expr::zero)
}

#[cfg(test)]
mod tests {
    use crate::symexpr::parse;

    fn simp(text: &str) -> alloc::string::String {
        alloc::format!("{}", parse(text).unwrap().simplify())
    }

    #[test]
    fn zero_times_anything_drops_out() {
        assert_eq!(simp("0*sin(x)+x"), "x");
    }

    #[test]
    fn repeated_factor_becomes_power() {
        assert_eq!(simp("x*x"), "x^2");
    }

    #[test]
    fn self_quotient_is_one() {
        assert_eq!(simp("(1+cos(x)^2)/(1+cos(x)^2)"), "1");
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(simp("2*x*y + 3*y*x - x*y*5"), "0");
        assert_eq!(simp("x + x + 1 + 1/2"), "2*x + 3/2");
        assert_eq!(simp("sqrt(x)*sqrt(x)"), "x");
        assert_eq!(simp("sqrt(4)*x"), "2*x");
        assert_eq!(simp("sqrt(2)*sqrt(2)"), "2");
    }

    #[test]
    fn identities() {
        assert_eq!(simp("x^1 + y^0"), "x + 1");
        assert_eq!(simp("ln(exp(x))"), "x");
        assert_eq!(simp("-(-x)"), "x");
        assert_eq!(simp("cos(0) + sin(0)"), "1");
    }

    #[test]
    fn no_distribution_of_fractional_powers() {
        // sqrt(x^2) is |x|, not x
        let e = parse("sqrt(x^2)").unwrap().simplify();
        assert_eq!(e.eval_at("x", -3.0).unwrap(), 3.0);
        let e = parse("sqrt(x*y)").unwrap().simplify();
        let b = crate::symexpr::Binding::new().with("x", -2.0).with("y", -8.0);
        assert_eq!(e.evaluate(&b).unwrap(), 4.0);
    }

    #[test]
    fn idempotent_on_samples() {
        for text in [
            "-sin(x)/((1+cos(x)^2)*sqrt(1+cos(x)^2))",
            "x^2/2 - x*x/2 + 3*x^(1/2)*x^(3/2)",
            "(1+v^2)^(-1/2)*v - v/sqrt(1+v^2)",
        ] {
            let once = parse(text).unwrap().simplify();
            assert_eq!(once.simplify(), once, "{text}");
        }
    }
}
