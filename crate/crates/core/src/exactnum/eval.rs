//! Evaluation points: `r = p/q`, `x = t^{pq}`.

use super::{fmt_rat, pow_i, BigRat, Rat64, XExponent};
use crate::error::{Result, WsError};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A rational specialization under which `x`, `x^r` and `x^{1/r}` are all
/// rational: with `r = p/q` and `x = t^{pq}` one has `x^r = t^{p²}` and
/// `x^{1/r} = t^{q²}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalPoint {
    #[serde(with = "rat_string")]
    pub t: BigRat,
    pub p: i64,
    pub q: i64,
}

impl EvalPoint {
    /// Validate `0 < t < 1`, `p > q ≥ 1`, `gcd(p, q) = 1`.
    pub fn new(t: BigRat, p: i64, q: i64) -> Result<Self> {
        if !(t.is_positive() && t < BigRat::one()) {
            return Err(WsError::InvalidInput(format!("t = {} must satisfy 0 < t < 1", fmt_rat(&t))));
        }
        if q < 1 || p <= q {
            return Err(WsError::InvalidInput(format!("need p > q >= 1, got p = {p}, q = {q}")));
        }
        if p.gcd(&q) != 1 {
            return Err(WsError::InvalidInput(format!("p = {p} and q = {q} are not coprime")));
        }
        Ok(EvalPoint { t, p, q })
    }

    /// The three default points used by the suites.
    pub fn defaults() -> Vec<EvalPoint> {
        use super::rat;
        vec![
            EvalPoint::new(rat(2, 3), 3, 2).unwrap(),
            EvalPoint::new(rat(1, 2), 2, 1).unwrap(),
            EvalPoint::new(rat(3, 5), 5, 3).unwrap(),
        ]
    }

    /// `r = p/q`.
    pub fn r(&self) -> BigRat {
        super::rat(self.p, self.q)
    }

    /// The integer `n` with `x^e = t^n`.
    pub fn t_exponent(&self, e: &XExponent) -> Result<i64> {
        let (p, q) = (self.p, self.q);
        let parts = [
            ("c0", e.c0 * Rat64::from_integer(p * q)),
            ("cr", e.cr * Rat64::from_integer(p * p)),
            ("cinv", e.cinv * Rat64::from_integer(q * q)),
        ];
        let total: Rat64 = parts.iter().map(|(_, v)| *v).sum();
        if total.is_integer() {
            return Ok(total.to_integer());
        }
        let (component, value) = parts
            .iter()
            .find(|(_, v)| !v.is_integer())
            .map(|(c, v)| (*c, *v))
            .unwrap_or(("sum", total));
        Err(WsError::NonIntegralExponent {
            exponent: e.to_string(),
            component,
            value: value.to_string(),
        })
    }

    /// `t^n`.
    pub fn tpow(&self, n: i64) -> BigRat {
        pow_i(&self.t, n)
    }

    /// `x^e` as an exact rational.
    pub fn xpow(&self, e: &XExponent) -> Result<BigRat> {
        Ok(self.tpow(self.t_exponent(e)?))
    }

    /// `x^n` for an integer `n`.
    pub fn xpow_int(&self, n: i64) -> BigRat {
        self.tpow(n * self.p * self.q)
    }

    /// `x`.
    pub fn x(&self) -> BigRat {
        self.xpow_int(1)
    }

    /// The bracket `[e]_x = (x^e - x^{-e}) / (x - x^{-1})`.
    pub fn bracket(&self, e: &XExponent) -> Result<BigRat> {
        let n = self.t_exponent(e)?;
        let unit = self.p * self.q;
        let num = self.tpow(n) - self.tpow(-n);
        let den = self.tpow(unit) - self.tpow(-unit);
        Ok(num / den)
    }

    /// `x - x^{-1}`.
    pub fn x_minus_inv(&self) -> BigRat {
        let x = self.x();
        &x - x.recip()
    }

    /// `Q(r)` element specialized at `r = p/q`.
    pub fn eval_rfunction(&self, f: &super::RFunction) -> Result<BigRat> {
        f.eval(&self.r())
            .ok_or_else(|| WsError::DivisionByZero(format!("{f} at r = {}", fmt_rat(&self.r()))))
    }
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, p={}, q={})", fmt_rat(&self.t), self.p, self.q)
    }
}

/// Serde adapter writing a [`BigRat`] as `"n/d"`.
pub mod rat_string {
    use super::super::{fmt_rat, parse_rat, BigRat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{pow_i, rat};

    fn pt() -> EvalPoint {
        EvalPoint::new(rat(2, 3), 3, 2).unwrap()
    }

    #[test]
    fn xpow_examples() {
        assert_eq!(pt().xpow(&XExponent::ZERO).unwrap(), rat(1, 1));
        assert_eq!(pt().xpow(&XExponent::new(0, 2, 0)).unwrap(), pow_i(&rat(2, 3), 18));
        assert_eq!(pt().xpow(&XExponent::new(-1, 0, 2)).unwrap(), rat(4, 9));
    }

    #[test]
    fn non_integral_exponent_names_component() {
        let e = XExponent::from_rats(Rat64::new(1, 7), Rat64::from_integer(0), Rat64::from_integer(0));
        match pt().xpow(&e) {
            Err(WsError::NonIntegralExponent { component, .. }) => assert_eq!(component, "c0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(EvalPoint::new(rat(3, 2), 3, 2).is_err());
        assert!(EvalPoint::new(rat(1, 2), 2, 2).is_err());
        assert!(EvalPoint::new(rat(1, 2), 4, 2).is_err());
        assert!(EvalPoint::new(rat(1, 2), 1, 2).is_err());
    }

    #[test]
    fn bracket_of_one_is_one() {
        assert_eq!(pt().bracket(&XExponent::int(1)).unwrap(), rat(1, 1));
        assert_eq!(pt().bracket(&XExponent::int(0)).unwrap(), rat(0, 1));
        // [2]_x = x + 1/x
        let x = pt().x();
        assert_eq!(pt().bracket(&XExponent::int(2)).unwrap(), &x + x.recip());
    }
}
