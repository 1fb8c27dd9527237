//! Truncated Laurent series with exact coefficients.

use super::{fmt_rat, int, BigRat};
use crate::error::{Result, WsError};
use num_traits::{One, Zero};
use std::fmt;

/// Which variable a series is written in: `z` (expansion near the origin)
/// or `1/z` (expansion near infinity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesVar {
    Z,
    InvZ,
}

/// `Σ_{n=low}^{order} c_n u^n` where `u` is `z` or `1/z`. Coefficients above
/// `order` are unknown, not zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    pub var: SeriesVar,
    low: i64,
    coeffs: Vec<BigRat>,
    order: i64,
}

impl TruncSeries {
    /// Build from coefficients starting at `low`; entries above `order` are dropped.
    pub fn new(var: SeriesVar, low: i64, mut coeffs: Vec<BigRat>, order: i64) -> Self {
        let keep = (order - low + 1).max(0) as usize;
        coeffs.truncate(keep);
        let mut s = TruncSeries { var, low, coeffs, order };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.low = self.order + 1;
            return;
        }
        self.coeffs.drain(..lead);
        self.low += lead as i64;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn zero(var: SeriesVar, order: i64) -> Self {
        Self::new(var, 0, vec![], order)
    }

    pub fn constant(var: SeriesVar, c: BigRat, order: i64) -> Self {
        Self::new(var, 0, vec![c], order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.low)
        }
    }

    /// Coefficient of `u^n`; `None` beyond the truncation order.
    pub fn coeff(&self, n: i64) -> Option<BigRat> {
        if n > self.order {
            return None;
        }
        if n < self.low {
            return Some(BigRat::zero());
        }
        Some(self.coeffs.get((n - self.low) as usize).cloned().unwrap_or_else(BigRat::zero))
    }

    fn coeff_or_zero(&self, n: i64) -> BigRat {
        self.coeff(n).unwrap_or_else(BigRat::zero)
    }

    fn check_var(&self, o: &TruncSeries) {
        assert_eq!(self.var, o.var, "mixing series in z and 1/z");
    }

    pub fn add(&self, o: &TruncSeries) -> TruncSeries {
        self.check_var(o);
        let order = self.order.min(o.order);
        let low = self.low.min(o.low).min(order + 1);
        let coeffs = (low..=order).map(|n| self.coeff_or_zero(n) + o.coeff_or_zero(n)).collect();
        TruncSeries::new(self.var, low, coeffs, order)
    }

    pub fn neg(&self) -> TruncSeries {
        self.scale(&-BigRat::one())
    }

    pub fn sub(&self, o: &TruncSeries) -> TruncSeries {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRat) -> TruncSeries {
        TruncSeries::new(self.var, self.low, self.coeffs.iter().map(|a| a * c).collect(), self.order)
    }

    /// Product; the result is known up to `min(o1 + v2, o2 + v1)`.
    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        self.check_var(o);
        let (v1, v2) = (self.low, o.low);
        let order = (self.order + v2).min(o.order + v1);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return TruncSeries::zero(self.var, order);
        }
        let low = v1 + v2;
        let len = (order - low + 1).max(0) as usize;
        let mut out = vec![BigRat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                out[k] += a * b;
            }
        }
        TruncSeries::new(self.var, low, out, order)
    }

    /// Multiply by `u^k`.
    pub fn shift(&self, k: i64) -> TruncSeries {
        TruncSeries::new(self.var, self.low + k, self.coeffs.clone(), self.order + k)
    }

    /// Substitute `u -> c·u`.
    pub fn rescale_var(&self, c: &BigRat) -> TruncSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * super::pow_i(c, self.low + i as i64))
            .collect();
        TruncSeries::new(self.var, self.low, coeffs, self.order)
    }

    /// Term-by-term exponential. Needs strictly positive support.
    pub fn exp(&self) -> Result<TruncSeries> {
        if let Some(v) = self.valuation() {
            if v <= 0 {
                return Err(WsError::NotPositiveSupport(v));
            }
        }
        let k = self.order.max(0) as usize;
        let f: Vec<BigRat> = (0..=k as i64).map(|n| self.coeff_or_zero(n)).collect();
        // n g_n = Σ_{j=1}^n j f_j g_{n-j}
        let mut g = vec![BigRat::zero(); k + 1];
        g[0] = BigRat::one();
        for n in 1..=k {
            let mut acc = BigRat::zero();
            for j in 1..=n {
                if !f[j].is_zero() {
                    acc += &f[j] * &g[n - j] * int(j as i64);
                }
            }
            g[n] = acc / int(n as i64);
        }
        Ok(TruncSeries::new(self.var, 0, g, self.order))
    }

    /// Logarithm of a series with constant term 1 and no negative part.
    pub fn log(&self) -> Result<TruncSeries> {
        if self.valuation().is_some_and(|v| v < 0) || self.coeff_or_zero(0) != BigRat::one() {
            return Err(WsError::LogNeedsUnitConstant);
        }
        let k = self.order.max(0) as usize;
        let g: Vec<BigRat> = (0..=k as i64).map(|n| self.coeff_or_zero(n)).collect();
        // n f_n = n g_n - Σ_{j=1}^{n-1} j f_j g_{n-j}
        let mut f = vec![BigRat::zero(); k + 1];
        for n in 1..=k {
            let mut acc = &g[n] * int(n as i64);
            for j in 1..n {
                if !f[j].is_zero() {
                    acc -= &f[j] * &g[n - j] * int(j as i64);
                }
            }
            f[n] = acc / int(n as i64);
        }
        Ok(TruncSeries::new(self.var, 0, f, self.order))
    }

    /// `exp(Σ_{m=1}^{K} (1/m) c(m) u^m)` from a table of log coefficients `c(m)`.
    pub fn exp_of_log_coeffs(var: SeriesVar, order: i64, c: impl Fn(i64) -> BigRat) -> Result<TruncSeries> {
        let coeffs: Vec<BigRat> = (1..=order).map(|m| c(m) / int(m)).collect();
        TruncSeries::new(var, 1, coeffs, order).exp()
    }

    /// Exponents `low..=order` with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRat)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.low + i as i64, c))
    }

    /// Equality of the known parts up to `min` of both orders.
    pub fn agrees_with(&self, o: &TruncSeries) -> bool {
        self.first_mismatch(o).is_none()
    }

    /// First exponent where both series are known and differ.
    pub fn first_mismatch(&self, o: &TruncSeries) -> Option<i64> {
        if self.var != o.var {
            return Some(i64::MIN);
        }
        let order = self.order.min(o.order);
        let low = self.low.min(o.low);
        (low..=order).find(|&n| self.coeff_or_zero(n) != o.coeff_or_zero(n))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.var {
            SeriesVar::Z => "z",
            SeriesVar::InvZ => "z^-1",
        };
        let mut parts: Vec<String> = self
            .terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| format!("{}·{v}^{n}", fmt_rat(c)))
            .collect();
        parts.push(format!("O({v}^{})", self.order + 1));
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{pow_i, rat};

    #[test]
    fn exp_of_minus_log_is_linear() {
        // exp(-Σ a^m z^m / m) = 1 - a z
        let a = rat(3, 7);
        let k = 8;
        let s = TruncSeries::exp_of_log_coeffs(SeriesVar::Z, k, |m| -pow_i(&a, m)).unwrap();
        assert_eq!(s.coeff(0), Some(rat(1, 1)));
        assert_eq!(s.coeff(1), Some(-a.clone()));
        for n in 2..=k {
            assert_eq!(s.coeff(n), Some(rat(0, 1)));
        }
        assert_eq!(s.coeff(k + 1), None);
    }

    #[test]
    fn exp_of_zero_and_single_term() {
        let z = TruncSeries::zero(SeriesVar::Z, 6);
        assert_eq!(z.exp().unwrap(), TruncSeries::constant(SeriesVar::Z, rat(1, 1), 6));
        let c = rat(2, 5);
        let s = TruncSeries::new(SeriesVar::Z, 1, vec![c.clone()], 6).exp().unwrap();
        let mut fact = rat(1, 1);
        for n in 0..=6 {
            if n > 0 {
                fact *= int(n);
            }
            assert_eq!(s.coeff(n).unwrap(), pow_i(&c, n) / &fact);
        }
    }

    #[test]
    fn exp_rejects_constant_term() {
        let s = TruncSeries::constant(SeriesVar::Z, rat(1, 1), 4);
        assert_eq!(s.exp(), Err(WsError::NotPositiveSupport(0)));
    }

    #[test]
    fn log_inverts_exp() {
        let s = TruncSeries::new(SeriesVar::Z, 1, vec![rat(1, 2), rat(-3, 4), rat(5, 6)], 10);
        assert_eq!(s.exp().unwrap().log().unwrap(), s);
    }

    #[test]
    fn product_tracks_order() {
        let a = TruncSeries::new(SeriesVar::Z, -1, vec![rat(1, 1), rat(1, 1)], 5);
        let b = TruncSeries::new(SeriesVar::Z, 2, vec![rat(1, 1)], 4);
        let p = a.mul(&b);
        assert_eq!(p.order(), 3);
        assert_eq!(p.coeff(1), Some(rat(1, 1)));
        assert_eq!(p.coeff(2), Some(rat(1, 1)));
    }
}
