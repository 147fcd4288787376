//! Adomian polynomials in abstract form.
//!
//! `A_n` is written over indeterminates `w_0 .. w_n` (standing for the
//! spatial derivatives `u'_0 .. u'_n`) and formal symbols `H^(k)` (the k-th
//! derivative of the Hamiltonian evaluated at `w_0`). Every monomial has the
//! shape `c * H^(k) * w_{p_1} * .. * w_{p_k}` with all `p_i >= 1`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::compositions::compositions;
use crate::num::Rational;

/// Highest order the exact generators accept (the composition sum has
/// `2^(n-1)` entries).
pub const MAX_ORDER: usize = 20;

/// `H^(order) * Π w_{parts[i]}`, parts sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub order: u32,
    pub parts: Vec<u32>,
}

impl Monomial {
    pub fn new(order: u32, mut parts: Vec<u32>) -> Monomial {
        parts.sort_unstable();
        Monomial { order, parts }
    }

    /// Sum of the `w` subscripts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `(subscript, multiplicity)` pairs in ascending subscript order.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbstractPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl AbstractPoly {
    pub fn zero() -> AbstractPoly {
        AbstractPoly::default()
    }

    /// `A_0 = H^(0)`.
    pub fn seed() -> AbstractPoly {
        let mut p = AbstractPoly::zero();
        p.add_term(Monomial::new(0, Vec::new()), Rational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        let updated = self.coefficient(&m) + c;
        if updated.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, updated);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).copied().unwrap_or_else(Rational::zero)
    }

    /// Drops every monomial with `H^(k)`, `k > max_order`.
    pub fn truncate_order(&self, max_order: u32) -> AbstractPoly {
        AbstractPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.order <= max_order)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to `w_k`. For `k = 0` this
    /// raises the order of `H`, since `H^(j)` is evaluated at `w_0`.
    pub fn partial(&self, k: u32) -> AbstractPoly {
        let mut out = AbstractPoly::zero();
        for (m, c) in &self.terms {
            if k == 0 {
                out.add_term(Monomial::new(m.order + 1, m.parts.clone()), *c);
                continue;
            }
            let count = m.parts.iter().filter(|&&p| p == k).count();
            if count == 0 {
                continue;
            }
            let mut parts = m.parts.clone();
            if let Some(i) = parts.iter().position(|&p| p == k) {
                parts.remove(i);
            }
            out.add_term(Monomial::new(m.order, parts), *c * Rational::from(count as i128));
        }
        out
    }

    /// Multiplies by `c * w_k` (`k >= 1`).
    pub fn times_w(&self, k: u32, c: Rational) -> AbstractPoly {
        let mut out = AbstractPoly::zero();
        for (m, coef) in &self.terms {
            let mut parts = m.parts.clone();
            parts.push(k);
            out.add_term(Monomial::new(m.order, parts), *coef * c);
        }
        out
    }

    pub fn plus(&self, other: &AbstractPoly) -> AbstractPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    /// Evaluates with `h[k] = H^(k)(w_0)` and `w[i] = w_i`.
    pub fn evaluate(&self, h: &[f64], w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let coef = *c.numer() as f64 / *c.denom() as f64;
                m.parts
                    .iter()
                    .fold(coef * h[m.order as usize], |acc, &p| acc * w[p as usize])
            })
            .sum()
    }
}

impl fmt::Display for AbstractPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = *c.numer() < 0;
            let mag = if negative { -*c } else { *c };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "H{}", m.order)?;
            for (p, mult) in m.multiplicities() {
                if mult == 1 {
                    write!(f, "*w{p}")?;
                } else {
                    write!(f, "*w{p}^{mult}")?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: usize) -> Rational {
    Rational::from((1..=n as i128).product::<i128>())
}

/// `A_n` from the composition sum:
/// `A_n = Σ_{k=1..n} 1/k! Σ_{p_1+..+p_k=n} H^(k) w_{p_1}..w_{p_k}`,
/// with ordered compositions that share a multiset merged.
pub fn composition_polynomial(n: usize) -> AbstractPoly {
    assert!(n <= MAX_ORDER, "order {n} above {MAX_ORDER}");
    if n == 0 {
        return AbstractPoly::seed();
    }
    let mut out = AbstractPoly::zero();
    for k in 1..=n {
        let weight = Rational::one() / factorial(k);
        let parts = compositions(n as u32, k as u32).expect("1 <= k <= n");
        for c in parts {
            out.add_term(Monomial::new(k as u32, c), weight);
        }
    }
    out
}

/// `A_n` by the recursion
/// `A_{m+1} = 1/(m+1) Σ_{k=0..m} (k+1) w_{k+1} ∂A_m/∂w_k`, seeded by `A_0`.
pub fn recursion_polynomial(n: usize) -> AbstractPoly {
    assert!(n <= MAX_ORDER, "order {n} above {MAX_ORDER}");
    let mut a = AbstractPoly::seed();
    for m in 0..n {
        let mut next = AbstractPoly::zero();
        for k in 0..=m as u32 {
            let term = a.partial(k).times_w(k + 1, Rational::from((k + 1) as i128));
            next = next.plus(&term);
        }
        let scale = Rational::new(1, m as i128 + 1);
        a = AbstractPoly {
            terms: next.terms.into_iter().map(|(m, c)| (m, c * scale)).collect(),
        };
    }
    a
}
