use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symexpr::{Expr, DEFAULT_NODE_CAP};

/// Variable the Hamiltonian is written in (it stands for `u_x`).
pub const STATE_VAR: &str = "v";
/// Spatial variable of the initial datum and of every series coefficient.
pub const SPACE_VAR: &str = "x";

/// The Cauchy problem `u_t + H(u_x) = 0`, `u(x, 0) = u0(x)` on a bounded
/// spatial window.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    hamiltonian: Expr,
    initial: Expr,
    x_min: f64,
    x_max: f64,
    terms: usize,
    node_cap: usize,
}

impl ProblemSpec {
    /// `hamiltonian` must be an expression in `v`, `initial` one in `x`.
    pub fn new(hamiltonian: Expr, initial: Expr, x_min: f64, x_max: f64) -> Result<ProblemSpec> {
        check_vars(&hamiltonian, STATE_VAR, "hamiltonian")?;
        check_vars(&initial, SPACE_VAR, "initial condition")?;
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidProblem(format!(
                "domain [{x_min}, {x_max}] is empty or unbounded"
            )));
        }
        Ok(ProblemSpec {
            hamiltonian,
            initial,
            x_min,
            x_max,
            terms: 4,
            node_cap: DEFAULT_NODE_CAP,
        })
    }

    pub fn with_terms(mut self, terms: usize) -> ProblemSpec {
        self.terms = terms;
        self
    }

    pub fn with_node_cap(mut self, cap: usize) -> ProblemSpec {
        self.node_cap = cap;
        self
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &Expr {
        &self.initial
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    /// Highest series order `N` (coefficients `0..=N`).
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn node_cap(&self) -> usize {
        self.node_cap
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x_min <= x && x <= self.x_max
    }
}

fn check_vars(e: &Expr, allowed: &str, what: &str) -> Result<()> {
    let stray: Vec<_> = e.free_vars().into_iter().filter(|v| v != allowed).collect();
    match stray.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidProblem(format!(
            "{what} uses unknown variable {v} (expected only {allowed})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    #[test]
    fn rejects_foreign_variables() {
        let h = parse("v^2/2").unwrap();
        let err = ProblemSpec::new(h.clone(), parse("sin(y)").unwrap(), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidProblem(ref m) if m.contains("unknown variable y")));
        assert!(ProblemSpec::new(parse("x*v").unwrap(), parse("x").unwrap(), 0.0, 1.0).is_err());
    }

    #[test]
    fn rejects_degenerate_domain() {
        let h = parse("v^2/2").unwrap();
        let u0 = parse("-x^2").unwrap();
        assert!(ProblemSpec::new(h.clone(), u0.clone(), 1.0, 1.0).is_err());
        assert!(ProblemSpec::new(h.clone(), u0.clone(), 0.0, f64::INFINITY).is_err());
        assert!(ProblemSpec::new(h, u0, -5.0, 5.0).is_ok());
    }
}
