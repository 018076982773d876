//! Arbitrary-precision rational numbers. Every numeric quantity in this crate
//! (values, prices, LP entries, welfare) is a `Rational`; floating point is
//! never used in computation.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational, kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d` reduced to lowest terms. Errors on a zero denominator.
    pub fn new(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Truncated decimal expansion with `places` digits, for display only.
    /// The suffix `…` marks an inexact truncation.
    pub fn decimal_approx(&self, places: u32) -> String {
        let sign = if self.0.is_negative() { "-" } else { "" };
        let a = self.0.abs();
        let scale = BigInt::from(10u32).pow(places);
        let scaled = (&a * BigRational::from_integer(scale.clone())).trunc();
        let scaled_int = scaled.to_integer();
        let whole = &scaled_int / &scale;
        let frac = &scaled_int % &scale;
        let exact = a.denom().is_one()
            || (&a * BigRational::from_integer(scale)).is_integer();
        let mut s = format!("{sign}{whole}");
        if places > 0 {
            let frac_str = format!("{:0width$}", frac, width = places as usize);
            let trimmed = frac_str.trim_end_matches('0');
            if !trimmed.is_empty() {
                s.push('.');
                s.push_str(trimmed);
            }
        }
        if !exact {
            s.push('…');
        }
        s
    }
}

/// Renders `p/q`, omitting `/q` when the denominator is 1.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accepts `p` or `p/q` with optionally signed integer parts. Rejects floats,
/// whitespace and zero denominators; unreduced inputs are normalized.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
        let parse_int = |t: &str| -> Result<BigInt> {
            if t.is_empty() || t.contains(|c: char| !c.is_ascii_digit() && c != '-' && c != '+') {
                return Err(bad());
            }
            BigInt::from_str(t).map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::InvalidInput(format!("zero denominator: {s:?}")));
                }
                Ok(Rational(BigRational::new(n, d)))
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

/// Shorthand used throughout tests and constructions.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_lowest_terms() {
        assert_eq!("1/2", rat(2, 4).to_string());
        assert_eq!("-3/2", rat(6, -4).to_string());
        assert_eq!("5", rat(5, 1).to_string());
        assert_eq!("0", Rational::zero().to_string());
    }

    #[test]
    fn parses_plain_and_fraction() {
        assert_eq!(rat(7, 1), "7".parse().unwrap());
        assert_eq!(rat(-7, 3), "-7/3".parse().unwrap());
        assert_eq!(rat(1, 2), "2/4".parse().unwrap());
        assert_eq!(rat(-1, 2), "1/-2".parse().unwrap());
    }

    #[test]
    fn rejects_malformed_input() {
        for s in ["", "1.5", "1/0", "0x2", "1 /2", "3/", "/3", "--1", "1e3"] {
            assert!(s.parse::<Rational>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = rat(1, 3);
        let sum: Rational = (0..3).map(|_| third.clone()).sum();
        assert_eq!(Rational::one(), sum);
        assert_eq!(rat(1, 6), rat(1, 2) - rat(1, 3));
        assert_eq!(rat(3, 2), rat(1, 2) / rat(1, 3));
    }

    #[test]
    fn decimal_approx_marks_truncation() {
        assert_eq!("0.5", rat(1, 2).decimal_approx(6));
        assert_eq!("0.333333…", rat(1, 3).decimal_approx(6));
        assert_eq!("-2", rat(-2, 1).decimal_approx(6));
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(n in -1000i64..1000, d in 1i64..1000) {
            let q = rat(n, d);
            let back: Rational = q.to_string().parse().unwrap();
            prop_assert_eq!(q, back);
        }

        #[test]
        fn ordering_matches_cross_multiplication(a in -50i64..50, b in 1i64..50,
                                                 c in -50i64..50, d in 1i64..50) {
            let lhs = rat(a, b);
            let rhs = rat(c, d);
            prop_assert_eq!(lhs <= rhs, a * d <= c * b);
        }
    }
}
