//! Polynomials and rational functions in the formal symbol `r`.

use super::{int, BigRat, Rat64};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Dense polynomial over `Q`, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·r^k`.
    pub fn monomial(c: BigRat, k: usize) -> Self {
        let mut v = vec![BigRat::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRat {
        self.coeffs.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, r: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c;
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead = d.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRat::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

/// Element of `Q(r)`, kept reduced with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RFunction {
    num: Poly,
    den: Poly,
}

impl RFunction {
    /// Reduce `num/den`. Panics on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "RFunction with zero denominator");
        if num.is_zero() {
            return RFunction {
                num,
                den: Poly::constant(BigRat::one()),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.lead().recip();
        RFunction {
            num: n.scale(&l),
            den: d.scale(&l),
        }
    }

    pub fn zero() -> Self {
        Self::constant(BigRat::zero())
    }

    pub fn one() -> Self {
        Self::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        RFunction {
            num: Poly::constant(c),
            den: Poly::constant(BigRat::one()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    /// The symbol `r`.
    pub fn r() -> Self {
        RFunction::new(Poly::monomial(BigRat::one(), 1), Poly::constant(BigRat::one()))
    }

    /// `c0 + cr·r + cinv/r`.
    pub fn from_lattice(c0: Rat64, cr: Rat64, cinv: Rat64) -> Self {
        let b = |q: Rat64| BigRat::from_ints(*q.numer(), *q.denom());
        // (cinv + c0 r + cr r^2) / r
        RFunction::new(
            Poly::new(vec![b(cinv), b(c0), b(cr)]),
            Poly::monomial(BigRat::one(), 1),
        )
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inv(&self) -> Self {
        RFunction::new(self.den.clone(), self.num.clone())
    }

    /// Specialize at a rational `r`; `None` at a pole.
    pub fn eval(&self, r: &BigRat) -> Option<BigRat> {
        let d = self.den.eval(r);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(r) / d)
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = RFunction::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }
}

impl Add for &RFunction {
    type Output = RFunction;
    fn add(self, o: &RFunction) -> RFunction {
        RFunction::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RFunction {
    type Output = RFunction;
    fn sub(self, o: &RFunction) -> RFunction {
        self + &(-o)
    }
}

impl Neg for &RFunction {
    type Output = RFunction;
    fn neg(self) -> RFunction {
        RFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RFunction {
    type Output = RFunction;
    fn mul(self, o: &RFunction) -> RFunction {
        RFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RFunction {
    type Output = RFunction;
    fn div(self, o: &RFunction) -> RFunction {
        assert!(!o.is_zero(), "RFunction division by zero");
        RFunction::new(&self.num * &o.den, &self.den * &o.num)
    }
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = super::fmt_rat(c);
        terms.push(match k {
            0 => cs,
            1 => format!("{cs}·r"),
            _ => format!("{cs}·r^{k}"),
        });
    }
    terms.join(" + ").replace("+ -", "- ")
}

impl fmt::Display for RFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn r() -> RFunction {
        RFunction::r()
    }

    #[test]
    fn reduces_common_factors() {
        // (r^2 - 1)/(r - 1) = r + 1
        let one = RFunction::one();
        let num = &(&r() * &r()) - &one;
        let den = &r() - &one;
        let q = &num / &den;
        assert_eq!(q, &r() + &one);
        assert_eq!(q.den().degree(), Some(0));
    }

    #[test]
    fn lattice_values() {
        // 2(r-1)/r at r = 3/2 is 2/3
        let e = RFunction::from_lattice(Rat64::from_integer(2), Rat64::from_integer(0), Rat64::from_integer(-2));
        assert_eq!(e.eval(&rat(3, 2)), Some(rat(2, 3)));
        assert_eq!(e.to_string(), "(2·r - 2)/(1·r)");
    }

    #[test]
    fn field_inverse() {
        let a = &(&r() * &RFunction::from_int(3)) - &RFunction::from_int(2);
        assert_eq!(&a * &a.inv(), RFunction::one());
        assert_eq!(a.pow(-2), (&a * &a).inv());
    }
}
