use alloc::format;
use alloc::vec::Vec;

use super::poly::{factorial, composition_polynomial, MAX_ORDER};
use crate::error::{Error, Result};
use crate::num::{Num, Rational};
use crate::problem::{ProblemSpec, SPACE_VAR, STATE_VAR};
use crate::symexpr::{Expr, NodeCapExceeded, Program};

/// Sign of the time integration, `u_{n+1} = -∫_0^t A_n ds`, which follows
/// from moving `H(u_x)` to the right-hand side of `u_t = -H(u_x)`.
pub const SIGN: i128 = -1;

/// What to do when an order outgrows the node cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CapPolicy {
    #[default]
    Fail,
    /// Keep the orders built so far and record where construction stopped.
    Truncate,
}

/// Adomian series `u = Σ ũ_n(x) t^n / n!` for one problem.
#[derive(Clone, Debug)]
pub struct AdmSeries {
    problem: ProblemSpec,
    coeffs: Vec<Expr>,
    derivs: Vec<Expr>,
    coeff_programs: Vec<Program>,
    deriv_programs: Vec<Program>,
    hamiltonian: Program,
    finite_from: Option<usize>,
    truncated_at: Option<usize>,
}

impl AdmSeries {
    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    /// `ũ_0 ..= ũ_N`.
    pub fn coefficients(&self) -> &[Expr] {
        &self.coeffs
    }

    /// `ũ'_0 ..= ũ'_N`.
    pub fn derivatives(&self) -> &[Expr] {
        &self.derivs
    }

    /// Highest stored order.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// First order from which every coefficient is identically zero, when
    /// the series is known to terminate.
    pub fn finite_from(&self) -> Option<usize> {
        self.finite_from
    }

    /// Order at which construction hit the node cap under
    /// [`CapPolicy::Truncate`].
    pub fn truncated_at(&self) -> Option<usize> {
        self.truncated_at
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.order() {
            return Err(Error::InvalidArgument(format!(
                "order {order} above the {} stored terms",
                self.order()
            )));
        }
        Ok(())
    }

    /// `ũ_n(x)`.
    pub fn coefficient_at(&self, n: usize, x: f64) -> Result<f64> {
        self.check_order(n)?;
        eval(&self.coeff_programs[n], x, || format!("coefficient {n} at x = {x}"))
    }

    pub fn derivative_at(&self, n: usize, x: f64) -> Result<f64> {
        self.check_order(n)?;
        eval(&self.deriv_programs[n], x, || format!("derivative of coefficient {n} at x = {x}"))
    }

    /// `Σ_{n=0..order} ũ_n(x) t^n/n!`, summed left to right.
    pub fn partial_sum(&self, order: usize, x: f64, t: f64) -> Result<f64> {
        self.check_order(order)?;
        let mut sum = 0.0;
        let mut weight = 1.0;
        for n in 0..=order {
            if n > 0 {
                weight *= t / n as f64;
            }
            sum += self.coefficient_at(n, x)? * weight;
        }
        Ok(sum)
    }

    /// `∂_t u_N + H(∂_x u_N)` at `(x, t)`, from the symbolic term
    /// derivatives.
    pub fn residual(&self, order: usize, x: f64, t: f64) -> Result<f64> {
        self.check_order(order)?;
        let mut u_t = 0.0;
        let mut u_x = 0.0;
        let mut weight = 1.0; // t^n/n!
        for n in 0..=order {
            if n > 0 {
                // t^(n-1)/(n-1)! is the previous weight
                u_t += self.coefficient_at(n, x)? * weight;
                weight *= t / n as f64;
            }
            u_x += self.derivative_at(n, x)? * weight;
        }
        let h = eval(&self.hamiltonian, u_x, || format!("H(u_x) at x = {x}, t = {t}"))?;
        Ok(u_t + h)
    }
}

fn eval(p: &Program, at: f64, context: impl FnOnce() -> alloc::string::String) -> Result<f64> {
    p.eval(at).map_err(|source| Error::Eval {
        context: context(),
        source,
    })
}

fn at_order(order: usize) -> impl Fn(NodeCapExceeded) -> Error {
    move |source| Error::NodeCap {
        order: Some(order),
        source,
    }
}

/// Builds `ũ_0 ..= ũ_terms`.
///
/// `ũ_{n+1}` is `SIGN` times `A_n` instantiated with `w_k ↦ ũ'_k`,
/// `H^(k) ↦ H^(k)(u0')`, each monomial weighted by `n!/(p_1!..p_k!)` (the
/// `t`-powers of the separable terms integrated once).
pub fn build_series(problem: &ProblemSpec, terms: usize, policy: CapPolicy) -> Result<AdmSeries> {
    if terms > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "{terms} terms requested, at most {MAX_ORDER} supported"
        )));
    }
    let cap = problem.node_cap();
    let u0 = problem.initial().clone();
    let du0 = u0.differentiate_capped(SPACE_VAR, cap).map_err(at_order(0))?;

    let mut h_derivs: Vec<Expr> = alloc::vec![problem.hamiltonian().simplify()];
    let mut h_at_u0: Vec<Option<Expr>> = Vec::new();

    let mut series = AdmSeries {
        problem: problem.clone(),
        coeffs: Vec::new(),
        derivs: Vec::new(),
        coeff_programs: Vec::new(),
        deriv_programs: Vec::new(),
        hamiltonian: compile(problem.hamiltonian(), STATE_VAR)?,
        finite_from: None,
        truncated_at: None,
    };
    series.push(u0, du0)?;

    for n in 0..terms {
        let next_order = n + 1;
        if series.finite_from.is_some() {
            series.push(Expr::zero(), Expr::zero())?;
            continue;
        }
        let built = (|| -> Result<(Expr, Expr)> {
            let a_n = composition_polynomial(n);
            let n_fact = factorial(n);
            let mut acc: Option<Expr> = None;
            for (m, c) in a_n.terms() {
                let k = m.order as usize;
                while h_derivs.len() <= k {
                    let last = h_derivs.last().expect("seeded with H");
                    let next = last
                        .differentiate_capped(STATE_VAR, cap)
                        .map_err(at_order(next_order))?;
                    h_derivs.push(next);
                }
                while h_at_u0.len() <= k {
                    h_at_u0.push(None);
                }
                if h_at_u0[k].is_none() {
                    let sub = h_derivs[k]
                        .substitute_capped(STATE_VAR, &series.derivs[0], cap)
                        .map_err(at_order(next_order))?
                        .simplify();
                    h_at_u0[k] = Some(sub);
                }
                let hk = h_at_u0[k].clone().expect("filled above");

                let mut weight: Rational = *c * n_fact * Rational::from(SIGN);
                for &p in &m.parts {
                    weight /= factorial(p as usize);
                }
                let mut term = mul(Expr::constant(Num::Rat(weight)), hk);
                for (p, mult) in m.multiplicities() {
                    let d = series.derivs[p as usize].clone();
                    let factor = if mult == 1 { d } else { Expr::powi(d, mult as i128) };
                    term = mul(term, factor);
                }
                acc = Some(match acc {
                    None => term,
                    Some(a) => Expr::add(a, term),
                });
                if acc.as_ref().is_some_and(|a| a.size() > cap) {
                    return Err(at_order(next_order)(NodeCapExceeded {
                        size: acc.as_ref().map_or(0, Expr::size),
                        cap,
                    }));
                }
            }
            let coeff = acc.unwrap_or_else(Expr::zero).simplify();
            if coeff.size() > cap {
                return Err(at_order(next_order)(NodeCapExceeded {
                    size: coeff.size(),
                    cap,
                }));
            }
            let deriv = coeff
                .differentiate_capped(SPACE_VAR, cap)
                .map_err(at_order(next_order))?;
            Ok((coeff, deriv))
        })();
        match built {
            Ok((coeff, deriv)) => series.push(coeff, deriv)?,
            Err(Error::NodeCap { .. }) if policy == CapPolicy::Truncate => {
                series.truncated_at = Some(next_order);
                break;
            }
            Err(e) => return Err(e),
        }
        // With ũ'_1 ≡ 0 every monomial of every later A_n has a vanishing
        // factor, so the series stops at ũ_1.
        if next_order == 1 && series.derivs[1].is_zero() {
            series.finite_from = Some(2);
        }
    }
    Ok(series)
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_one() {
        b
    } else if a.is_zero() || b.is_zero() {
        Expr::zero()
    } else {
        Expr::mul(a, b)
    }
}

fn compile(e: &Expr, var: &str) -> Result<Program> {
    e.compile(var).map_err(|source| Error::Eval {
        context: format!("compiling `{e}`"),
        source,
    })
}

impl AdmSeries {
    fn push(&mut self, coeff: Expr, deriv: Expr) -> Result<()> {
        self.coeff_programs.push(compile(&coeff, SPACE_VAR)?);
        self.deriv_programs.push(compile(&deriv, SPACE_VAR)?);
        self.coeffs.push(coeff);
        self.derivs.push(deriv);
        Ok(())
    }
}
