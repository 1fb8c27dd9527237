//! Arbitrary-precision rationals backed by GMP.

use num_traits::{One, Zero};
use rug::ops::Pow;
use rug::{Integer, Rational};
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Reduced rational with positive denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigRat(Rational);

impl BigRat {
    /// `n/d`; panics if `d == 0`.
    pub fn from_ints(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        BigRat(Rational::from((n, d)))
    }

    /// Parse `n/d` from decimal integer strings.
    pub fn from_strs(n: &str, d: &str) -> Option<Self> {
        let n: Integer = n.parse().ok()?;
        let d: Integer = d.parse().ok()?;
        (d != 0).then(|| BigRat(Rational::from((n, d))))
    }

    pub fn recip(&self) -> Self {
        BigRat(Rational::from(self.0.recip_ref()))
    }

    /// `self^e`; `self` must be nonzero when `e < 0`.
    pub fn pow(&self, e: i32) -> Self {
        BigRat(Rational::from((&self.0).pow(e)))
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0().is_gt()
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0().is_lt()
    }

    pub fn abs(&self) -> Self {
        BigRat(Rational::from(self.0.abs_ref()))
    }

    pub fn numer_string(&self) -> String {
        self.0.numer().to_string()
    }

    pub fn denom_string(&self) -> String {
        self.0.denom().to_string()
    }

    /// Bit length of numerator plus denominator, a rough size measure.
    pub fn bits(&self) -> u64 {
        u64::from(self.0.numer().significant_bits()) + u64::from(self.0.denom().significant_bits())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    /// Numerator and denominator as `i64`s, if both fit.
    pub fn to_i64_parts(&self) -> Option<(i64, i64)> {
        Some((self.0.numer().to_i64()?, self.0.denom().to_i64()?))
    }
}

impl fmt::Display for BigRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for BigRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<i64> for BigRat {
    fn from(n: i64) -> Self {
        BigRat(Rational::from(n))
    }
}

impl Zero for BigRat {
    fn zero() -> Self {
        BigRat(Rational::new())
    }
    fn is_zero(&self) -> bool {
        self.0.cmp0().is_eq()
    }
}

impl One for BigRat {
    fn one() -> Self {
        BigRat(Rational::from(1))
    }
    fn is_one(&self) -> bool {
        self.0 == 1
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&BigRat> for &BigRat {
            type Output = BigRat;
            fn $m(self, o: &BigRat) -> BigRat {
                BigRat(Rational::from((&self.0).$m(&o.0)))
            }
        }
        impl $tr<BigRat> for BigRat {
            type Output = BigRat;
            fn $m(mut self, o: BigRat) -> BigRat {
                (self.0).$am(o.0);
                self
            }
        }
        impl $tr<&BigRat> for BigRat {
            type Output = BigRat;
            fn $m(mut self, o: &BigRat) -> BigRat {
                (self.0).$am(&o.0);
                self
            }
        }
        impl $tr<BigRat> for &BigRat {
            type Output = BigRat;
            fn $m(self, o: BigRat) -> BigRat {
                BigRat(Rational::from((&self.0).$m(&o.0)))
            }
        }
        impl $atr<BigRat> for BigRat {
            fn $am(&mut self, o: BigRat) {
                (self.0).$am(o.0);
            }
        }
        impl $atr<&BigRat> for BigRat {
            fn $am(&mut self, o: &BigRat) {
                (self.0).$am(&o.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Div, div, DivAssign, div_assign);

impl Neg for BigRat {
    type Output = BigRat;
    fn neg(self) -> BigRat {
        BigRat(-self.0)
    }
}

impl Neg for &BigRat {
    type Output = BigRat;
    fn neg(self) -> BigRat {
        BigRat(Rational::from(-&self.0))
    }
}

impl Sum for BigRat {
    fn sum<I: Iterator<Item = BigRat>>(it: I) -> Self {
        it.fold(BigRat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a BigRat> for BigRat {
    fn sum<I: Iterator<Item = &'a BigRat>>(it: I) -> Self {
        it.fold(BigRat::zero(), |a, b| a + b)
    }
}

impl Product for BigRat {
    fn product<I: Iterator<Item = BigRat>>(it: I) -> Self {
        it.fold(BigRat::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_reduces() {
        let a = BigRat::from_ints(2, 4);
        assert_eq!(a.numer_string(), "1");
        assert_eq!(&a + &a, BigRat::one());
        assert_eq!(a.pow(-2), BigRat::from(4));
        assert!((-&a).is_negative());
        assert_eq!(BigRat::from_ints(6, -3).to_i64(), Some(-2));
    }
}
