//! Numeric payload for expression constants.
//!
//! Constants stay exact rationals for as long as the arithmetic fits in
//! `i128`; an overflowing operation degrades to an `f64`.

use core::cmp::Ordering;
use core::fmt;

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug)]
pub enum Num {
    Rat(Rational),
    Float(f64),
}

impl Num {
    pub const ZERO: Num = Num::Rat(Ratio::new_raw(0, 1));
    pub const ONE: Num = Num::Rat(Ratio::new_raw(1, 1));

    pub fn int(n: i128) -> Num {
        Num::Rat(Rational::from_integer(n))
    }

    /// Builds `numer/denom`, panicking on a zero denominator.
    pub fn ratio(numer: i128, denom: i128) -> Num {
        Num::Rat(Rational::new(numer, denom))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Num::Rat(r) => *r.numer() as f64 / *r.denom() as f64,
            Num::Float(f) => f,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_zero(),
            Num::Float(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_one(),
            Num::Float(f) => *f == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Num::Rat(r) => r.is_negative(),
            Num::Float(f) => *f < 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Rat(_))
    }

    /// The integer value when the constant is an exact integer.
    pub fn as_integer(&self) -> Option<i128> {
        match self {
            Num::Rat(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Num::Rat(r) => Some(*r),
            Num::Float(_) => None,
        }
    }

    pub fn abs(self) -> Num {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    pub fn checked_div(self, rhs: Num) -> Option<Num> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self, rhs) {
            (Num::Rat(a), Num::Rat(b)) => match a.checked_div(&b) {
                Some(r) => Num::Rat(r),
                None => Num::Float(self.to_f64() / rhs.to_f64()),
            },
            _ => Num::Float(self.to_f64() / rhs.to_f64()),
        })
    }

    /// Integer power; `None` for `0^negative`.
    pub fn powi(self, exp: i128) -> Option<Num> {
        if exp < 0 {
            if self.is_zero() {
                return None;
            }
            return Num::ONE.checked_div(self.powi(-exp)?);
        }
        let mut acc = Num::ONE;
        let mut base = self;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Some(acc)
    }

    /// Exact square root of a non-negative rational perfect square.
    pub fn exact_sqrt(self) -> Option<Num> {
        let r = self.as_rational()?;
        if r.is_negative() {
            return None;
        }
        let n = r.numer().sqrt();
        let d = r.denom().sqrt();
        (n * n == *r.numer() && d * d == *r.denom()).then(|| Num::Rat(Rational::new(n, d)))
    }

    /// Parses a decimal literal (`12`, `0.25`, `1.5e-3`) exactly when it fits.
    pub fn parse_decimal(text: &str) -> Option<Num> {
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let exact = (|| {
            let mut numer: i128 = 0;
            for c in int_part.chars().chain(frac_part.chars()) {
                let d = c.to_digit(10)? as i128;
                numer = numer.checked_mul(10)?.checked_add(d)?;
            }
            let scale = exponent - frac_part.len() as i32;
            let pow = 10i128.checked_pow(scale.unsigned_abs())?;
            Some(if scale >= 0 {
                Num::Rat(Rational::from_integer(numer.checked_mul(pow)?))
            } else {
                Num::Rat(Rational::new(numer, pow))
            })
        })();
        exact.or_else(|| text.parse::<f64>().ok().map(Num::Float))
    }

    fn rank(&self) -> u8 {
        match self {
            Num::Rat(_) => 0,
            Num::Float(_) => 1,
        }
    }
}

macro_rules! checked_binop {
    ($tr:ident, $method:ident, $checked:ident, $op:tt) => {
        impl core::ops::$tr for Num {
            type Output = Num;
            fn $method(self, rhs: Num) -> Num {
                match (self, rhs) {
                    (Num::Rat(a), Num::Rat(b)) => match a.$checked(&b) {
                        Some(r) => Num::Rat(r),
                        None => Num::Float(self.to_f64() $op rhs.to_f64()),
                    },
                    _ => Num::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
    };
}

checked_binop!(Add, add, checked_add, +);
checked_binop!(Sub, sub, checked_sub, -);
checked_binop!(Mul, mul, checked_mul, *);

impl core::ops::Neg for Num {
    type Output = Num;
    fn neg(self) -> Num {
        match self {
            Num::Rat(r) => match r.numer().checked_neg() {
                Some(n) => Num::Rat(Rational::new_raw(n, *r.denom())),
                None => Num::Float(-self.to_f64()),
            },
            Num::Float(f) => Num::Float(-f),
        }
    }
}

impl From<i128> for Num {
    fn from(n: i128) -> Num {
        Num::int(n)
    }
}

impl From<Rational> for Num {
    fn from(r: Rational) -> Num {
        Num::Rat(r)
    }
}

/// Structural equality: `Rat(1)` and `Float(1.0)` differ.
impl PartialEq for Num {
    fn eq(&self, other: &Num) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Num {}

impl PartialOrd for Num {
    fn partial_cmp(&self, other: &Num) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Num {
    fn cmp(&self, other: &Num) -> Ordering {
        match (self, other) {
            (Num::Rat(a), Num::Rat(b)) => a.cmp(b),
            (Num::Float(a), Num::Float(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Num::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Num::Float(x) if x.is_finite() && libm::trunc(*x) == *x && x.abs() < 1e21 => {
                // keep a decimal point so the literal is read back as written
                write!(f, "{x:.1}")
            }
            Num::Float(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(Num::parse_decimal("0.25"), Some(Num::ratio(1, 4)));
        assert_eq!(Num::parse_decimal("12"), Some(Num::int(12)));
        assert_eq!(Num::parse_decimal("1.5e-3"), Some(Num::ratio(3, 2000)));
        assert_eq!(Num::parse_decimal("2E2"), Some(Num::int(200)));
        assert_eq!(Num::parse_decimal("."), None);
    }

    #[test]
    fn overflow_degrades_to_float() {
        let big = Num::int(i128::MAX / 2);
        let prod = big * Num::int(4);
        assert!(!prod.is_exact());
        assert!((prod.to_f64() / (2.0 * i128::MAX as f64) - 1.0).abs() < 1e-12);
        assert!(!Num::parse_decimal("1e50").unwrap().is_exact());
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(Num::ratio(2, 3).powi(3), Some(Num::ratio(8, 27)));
        assert_eq!(Num::int(2).powi(-2), Some(Num::ratio(1, 4)));
        assert_eq!(Num::ZERO.powi(-1), None);
        assert_eq!(Num::ratio(9, 4).exact_sqrt(), Some(Num::ratio(3, 2)));
        assert_eq!(Num::int(2).exact_sqrt(), None);
        assert_eq!(Num::int(-4).exact_sqrt(), None);
    }

    #[test]
    fn division_by_zero_is_none() {
        assert_eq!(Num::ONE.checked_div(Num::ZERO), None);
        assert_eq!(Num::ONE.checked_div(Num::int(4)), Some(Num::ratio(1, 4)));
    }
}
