//! Symbolic mode coefficients and infinite-product forms.
//!
//! Every contraction in the free field calculus has the shape
//! `exp(Σ_{m≥1} c(m) u^m / m)` where `c(m)` is built from brackets
//! `[α m]_x`. Writing `X = x^m` and `B(α) = X^α − X^{−α}`, the coefficient is a
//! Laurent polynomial in `X` over at most one factor `1 − X^P`, and the
//! exponential becomes a finite product of factors `(1 − x^e u)` and
//! `(x^e u; x^P)_∞`. Identities between theta-function ratios are then
//! checked by comparing canonical product forms exactly.

use crate::error::{Result, WsError};
use crate::exactnum::{int, BigRat, EvalPoint, Rat64, XExponent};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Finite Laurent polynomial in the formal symbol `X` with lattice exponents
/// and integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct XPoly(BTreeMap<XExponent, i64>);

impl XPoly {
    pub fn zero() -> Self {
        XPoly(BTreeMap::new())
    }

    pub fn monomial(e: XExponent, c: i64) -> Self {
        let mut p = XPoly::zero();
        p.add_term(e, c);
        p
    }

    pub fn one() -> Self {
        Self::monomial(XExponent::ZERO, 1)
    }

    /// `B(α) = X^α − X^{−α}`.
    pub fn binom(alpha: XExponent) -> Self {
        let mut p = Self::monomial(alpha, 1);
        p.add_term(-alpha, -1);
        p
    }

    fn add_term(&mut self, e: XExponent, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&XExponent, &i64)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &XPoly) -> XPoly {
        let mut p = self.clone();
        for (e, c) in &o.0 {
            p.add_term(*e, *c);
        }
        p
    }

    pub fn neg(&self) -> XPoly {
        XPoly(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }

    pub fn sub(&self, o: &XPoly) -> XPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &XPoly) -> XPoly {
        let mut p = XPoly::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                p.add_term(*e1 + *e2, c1 * c2);
            }
        }
        p
    }

    /// Multiply by `X^e`.
    pub fn shift(&self, e: XExponent) -> XPoly {
        XPoly(self.0.iter().map(|(k, c)| (*k + e, *c)).collect())
    }

    /// Exact quotient by `B(β)`, or `None` if `B(β)` does not divide.
    pub fn div_binom(&self, beta: XExponent) -> Option<XPoly> {
        if beta.is_zero() {
            return None;
        }
        // N / B(β) = N·X^β / (Y − 1) with Y = X^{2β}; divide coset by coset.
        let step = beta * 2;
        let num = self.shift(beta);
        let mut cosets: Vec<(XExponent, BTreeMap<i64, i64>)> = Vec::new();
        for (e, c) in &num.0 {
            let mut placed = false;
            for (base, terms) in cosets.iter_mut() {
                if let Some(k) = integer_ratio(*e - *base, step) {
                    terms.insert(k, *c);
                    placed = true;
                    break;
                }
            }
            if !placed {
                cosets.push((*e, BTreeMap::from([(0, *c)])));
            }
        }
        let mut out = XPoly::zero();
        for (base, terms) in cosets {
            let lo = *terms.keys().next().unwrap();
            let hi = *terms.keys().last().unwrap();
            // P(Y) = Σ a_k Y^k, Q = P/(Y − 1): q_{k−1} = a_k + q_k, top down
            let mut q = 0i64;
            for k in (lo + 1..=hi).rev() {
                q += terms.get(&k).copied().unwrap_or(0);
                out.add_term(base + step * (k - 1), q);
            }
            if q + terms.get(&lo).copied().unwrap_or(0) != 0 {
                return None;
            }
        }
        Some(out)
    }

    /// `Σ c·x^{e·m}` at an evaluation point.
    pub fn eval(&self, pt: &EvalPoint, m: i64) -> Result<BigRat> {
        let mut acc = BigRat::zero();
        for (e, c) in &self.0 {
            acc += pt.xpow(&(*e * m))? * int(*c);
        }
        Ok(acc)
    }
}

/// `k` with `d = k·step`, if `d` is an integer multiple of `step`.
fn integer_ratio(d: XExponent, step: XExponent) -> Option<i64> {
    let comps = [(d.c0, step.c0), (d.cr, step.cr), (d.cinv, step.cinv)];
    let zero = Rat64::from_integer(0);
    let mut k: Option<Rat64> = None;
    for (a, b) in comps {
        if b == zero {
            if a != zero {
                return None;
            }
            continue;
        }
        let ratio = a / b;
        match k {
            None => k = Some(ratio),
            Some(prev) if prev != ratio => return None,
            _ => {}
        }
    }
    let k = k?;
    k.is_integer().then(|| k.to_integer())
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(e, c)| format!("{c}·X^({e})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `coeff · (x − x^{−1})^{xmx} · X^{xpow} · Π[α n]_x / Π[β n]_x` as a function
/// of the mode number `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketProduct {
    pub coeff: i64,
    pub xmx: i32,
    pub xpow: XExponent,
    pub num: Vec<XExponent>,
    pub den: Vec<XExponent>,
}

impl BracketProduct {
    pub fn constant(c: i64) -> Self {
        BracketProduct { coeff: c, xmx: 0, xpow: XExponent::ZERO, num: vec![], den: vec![] }
    }

    /// `coeff · Π[α n] / Π[β n]`.
    pub fn ratio(coeff: i64, num: &[XExponent], den: &[XExponent]) -> Self {
        BracketProduct { coeff, xmx: 0, xpow: XExponent::ZERO, num: num.to_vec(), den: den.to_vec() }
    }

    pub fn mul(&self, o: &BracketProduct) -> BracketProduct {
        BracketProduct {
            coeff: self.coeff * o.coeff,
            xmx: self.xmx + o.xmx,
            xpow: self.xpow + o.xpow,
            num: self.num.iter().chain(&o.num).copied().collect(),
            den: self.den.iter().chain(&o.den).copied().collect(),
        }
    }

    /// Reciprocal; `coeff` must be `±1`.
    pub fn inv(&self) -> BracketProduct {
        assert!(self.coeff.abs() == 1, "reciprocal of a non-unit coefficient");
        BracketProduct {
            coeff: self.coeff,
            xmx: -self.xmx,
            xpow: -self.xpow,
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn eval(&self, pt: &EvalPoint, n: i64) -> Result<BigRat> {
        let mut v = int(self.coeff) * pt.xpow(&(self.xpow * n))?;
        let xm = pt.x_minus_inv();
        v *= crate::exactnum::pow_i(&xm, self.xmx as i64);
        for a in &self.num {
            v *= pt.bracket(&(*a * n))?;
        }
        for b in &self.den {
            let d = pt.bracket(&(*b * n))?;
            if d.is_zero() {
                return Err(WsError::DivisionByZero(format!("[{b}·{n}]_x vanishes")));
            }
            v /= d;
        }
        Ok(v)
    }

    /// Floating value at real `x` and `r`, for limits that leave the
    /// exact lattice.
    pub fn eval_f64(&self, x: f64, r: f64, n: i64) -> f64 {
        let n = n as f64;
        let br = |e: &XExponent| {
            let k = e.value_at(r) * n;
            (x.powf(k) - x.powf(-k)) / (x - 1.0 / x)
        };
        let mut v = self.coeff as f64 * x.powf(self.xpow.value_at(r) * n) * (x - 1.0 / x).powi(self.xmx);
        for a in &self.num {
            v *= br(a);
        }
        for b in &self.den {
            v /= br(b);
        }
        v
    }

    /// Rewrite over `B(·)` and divide out what divides exactly; at most one
    /// denominator may remain, which becomes the period.
    pub fn to_logform(&self) -> Result<LogForm> {
        // [α n]_x = B(α)/(x − x^{−1}), so each numerator bracket costs one power
        let net = self.xmx - self.num.len() as i32 + self.den.len() as i32;
        if net != 0 {
            return Err(WsError::Precondition(format!(
                "bracket product carries (x - 1/x)^{net}, not a product form"
            )));
        }
        let mut n = XPoly::monomial(self.xpow, self.coeff);
        for a in &self.num {
            n = n.mul(&XPoly::binom(*a));
        }
        let mut left = Vec::new();
        for b in &self.den {
            match n.div_binom(*b) {
                Some(q) => n = q,
                None => left.push(*b),
            }
        }
        // retry leftovers once more, since division order can matter
        let mut still = Vec::new();
        for b in left {
            match n.div_binom(b) {
                Some(q) => n = q,
                None => still.push(b),
            }
        }
        match still.as_slice() {
            [] => Ok(LogForm { num: n, period: None }),
            [b] => Ok(LogForm { num: n.shift(*b).neg(), period: Some(*b * 2) }),
            _ => Err(WsError::Precondition(format!("{} denominators left over", still.len()))),
        }
    }
}

/// `c(m) = num(X) / (1 − X^{period})` with `X = x^m`, or `num(X)` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm {
    pub num: XPoly,
    pub period: Option<XExponent>,
}

impl LogForm {
    pub fn poly(num: XPoly) -> Self {
        LogForm { num, period: None }
    }

    pub fn zero() -> Self {
        Self::poly(XPoly::zero())
    }

    /// Value of `c(m)` at an evaluation point.
    pub fn eval(&self, pt: &EvalPoint, m: i64) -> Result<BigRat> {
        let n = self.num.eval(pt, m)?;
        match &self.period {
            None => Ok(n),
            Some(p) => {
                let d = BigRat::one() - pt.xpow(&(*p * m))?;
                if d.is_zero() {
                    return Err(WsError::DivisionByZero("1 - x^(period m)".into()));
                }
                Ok(n / d)
            }
        }
    }

    fn lift(&self, p: Option<XExponent>) -> Result<XPoly> {
        match (self.period, p) {
            (a, b) if a == b => Ok(self.num.clone()),
            (None, Some(p)) => Ok(self.num.sub(&self.num.shift(p))),
            _ => Err(WsError::Precondition("log forms with different periods".into())),
        }
    }

    pub fn add(&self, o: &LogForm) -> Result<LogForm> {
        let p = self.period.or(o.period);
        Ok(LogForm { num: self.lift(p)?.add(&o.lift(p)?), period: p })
    }

    pub fn neg(&self) -> LogForm {
        LogForm { num: self.num.neg(), period: self.period }
    }

    pub fn sub(&self, o: &LogForm) -> Result<LogForm> {
        self.add(&o.neg())
    }

    /// Multiply every coefficient by `X^e`, i.e. substitute `u → x^e u`.
    pub fn shift(&self, e: XExponent) -> LogForm {
        LogForm { num: self.num.shift(e), period: self.period }
    }

    /// `exp(Σ_{m≥1} c(m) u^m / m)` as a product in `u = v` or `u = 1/v`.
    pub fn to_product(&self, arg: Arg) -> ProductForm {
        let mut pf = ProductForm::one();
        for (e, n) in self.num.terms() {
            let f = match self.period {
                None => Factor::Lin { arg, c: *e },
                Some(p) => Factor::Inf { arg, c: *e, period: p },
            };
            pf.push(f, -n);
        }
        pf
    }
}

/// Which power of the product variable `v` a factor depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arg {
    V,
    InvV,
}

impl Arg {
    fn flip(self) -> Arg {
        match self {
            Arg::V => Arg::InvV,
            Arg::InvV => Arg::V,
        }
    }
}

/// One factor of a product form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// `1 − x^c u`.
    Lin { arg: Arg, c: XExponent },
    /// `(x^c u; x^period)_∞`.
    Inf { arg: Arg, c: XExponent, period: XExponent },
    /// `(x^period; x^period)_∞`.
    Euler { period: XExponent },
}

/// `sign · x^{xconst} · v^{vpow} · Π factor^{count}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductForm {
    pub sign: i64,
    pub xconst: XExponent,
    pub vpow: XExponent,
    pub factors: BTreeMap<Factor, i64>,
}

impl ProductForm {
    pub fn one() -> Self {
        ProductForm { sign: 1, xconst: XExponent::ZERO, vpow: XExponent::ZERO, factors: BTreeMap::new() }
    }

    /// The monomial `sign · v^{e}`.
    pub fn monomial(sign: i64, vpow: XExponent) -> Self {
        ProductForm { sign, vpow, ..Self::one() }
    }

    pub fn push(&mut self, f: Factor, n: i64) {
        if n == 0 {
            return;
        }
        let v = self.factors.entry(f).or_insert(0);
        *v += n;
        if *v == 0 {
            self.factors.remove(&f);
        }
    }

    /// `Θ_p(x^c v) = (p;p)(x^c v;p)(p x^{−c}/v;p)` with `p = x^{period}`.
    pub fn theta(c: XExponent, period: XExponent) -> Self {
        let mut pf = Self::one();
        pf.push(Factor::Euler { period }, 1);
        pf.push(Factor::Inf { arg: Arg::V, c, period }, 1);
        pf.push(Factor::Inf { arg: Arg::InvV, c: period - c, period }, 1);
        pf
    }

    /// `(1 − x^c v)` as a product form.
    pub fn linear(c: XExponent) -> Self {
        let mut pf = Self::one();
        pf.push(Factor::Lin { arg: Arg::V, c }, 1);
        pf
    }

    pub fn mul(&self, o: &ProductForm) -> ProductForm {
        let mut p = self.clone();
        p.sign *= o.sign;
        p.xconst += o.xconst;
        p.vpow += o.vpow;
        for (f, n) in &o.factors {
            p.push(*f, *n);
        }
        p
    }

    pub fn inv(&self) -> ProductForm {
        ProductForm {
            sign: self.sign,
            xconst: -self.xconst,
            vpow: -self.vpow,
            factors: self.factors.iter().map(|(f, n)| (*f, -n)).collect(),
        }
    }

    pub fn div(&self, o: &ProductForm) -> ProductForm {
        self.mul(&o.inv())
    }

    /// Substitute `v → 1/v`.
    pub fn invert_arg(&self) -> ProductForm {
        let mut p = ProductForm { factors: BTreeMap::new(), vpow: -self.vpow, ..self.clone() };
        for (f, n) in &self.factors {
            let g = match *f {
                Factor::Lin { arg, c } => Factor::Lin { arg: arg.flip(), c },
                Factor::Inf { arg, c, period } => Factor::Inf { arg: arg.flip(), c, period },
                e @ Factor::Euler { .. } => e,
            };
            p.push(g, *n);
        }
        p
    }

    /// Substitute `v → x^s v`.
    pub fn scale_arg(&self, s: XExponent) -> Result<ProductForm> {
        let lift = s
            .mul_exp(&self.vpow)
            .ok_or_else(|| WsError::Precondition(format!("x^({s})^({}) leaves the lattice", self.vpow)))?;
        let mut p = ProductForm { factors: BTreeMap::new(), xconst: self.xconst + lift, ..self.clone() };
        for (f, n) in &self.factors {
            let g = match *f {
                Factor::Lin { arg: Arg::V, c } => Factor::Lin { arg: Arg::V, c: c + s },
                Factor::Lin { arg: Arg::InvV, c } => Factor::Lin { arg: Arg::InvV, c: c - s },
                Factor::Inf { arg: Arg::V, c, period } => Factor::Inf { arg: Arg::V, c: c + s, period },
                Factor::Inf { arg: Arg::InvV, c, period } => Factor::Inf { arg: Arg::InvV, c: c - s, period },
                e @ Factor::Euler { .. } => e,
            };
            p.push(g, *n);
        }
        Ok(p)
    }

    /// Unique representative: every infinite product has its offset moved
    /// into a fixed window modulo its period, and every finite factor is
    /// written in `v` rather than `1/v`.
    pub fn canonical(&self) -> ProductForm {
        let mut p = ProductForm { factors: BTreeMap::new(), ..self.clone() };
        let mut lins: Vec<(Arg, XExponent, i64)> = Vec::new();
        for (f, n) in &self.factors {
            match *f {
                Factor::Inf { arg, c, period } => {
                    let k = window_index(c, period);
                    let c2 = c - period * k;
                    p.push(Factor::Inf { arg, c: c2, period }, *n);
                    if k > 0 {
                        for i in 0..k {
                            lins.push((arg, c2 + period * i, -n));
                        }
                    } else {
                        for i in 0..-k {
                            lins.push((arg, c + period * i, *n));
                        }
                    }
                }
                Factor::Lin { arg, c } => lins.push((arg, c, *n)),
                e @ Factor::Euler { .. } => p.push(e, *n),
            }
        }
        for (arg, c, n) in lins {
            match arg {
                Arg::V => p.push(Factor::Lin { arg, c }, n),
                Arg::InvV => {
                    // (1 − x^c/v)^n = (−1)^n x^{cn} v^{−n} (1 − x^{−c} v)^n
                    if n % 2 != 0 {
                        p.sign = -p.sign;
                    }
                    p.xconst += c * n;
                    p.vpow -= XExponent::int(n);
                    p.push(Factor::Lin { arg: Arg::V, c: -c }, n);
                }
            }
        }
        p
    }

    /// True when no factors remain, i.e. the form is `± x^a v^b`.
    pub fn is_monomial(&self) -> bool {
        self.factors.is_empty()
    }

    /// `F(x^s v) / F(v)` in canonical form.
    pub fn quasi_period(&self, s: XExponent) -> Result<ProductForm> {
        Ok(self.scale_arg(s)?.div(self).canonical())
    }
}

/// Index `k` placing `c − k·period` in the window `[0, period)` measured on
/// the leading nonzero coordinate of the period.
fn window_index(c: XExponent, period: XExponent) -> i64 {
    let zero = Rat64::from_integer(0);
    let (a, b) = if period.cr != zero {
        (c.cr, period.cr)
    } else if period.c0 != zero {
        (c.c0, period.c0)
    } else {
        (c.cinv, period.cinv)
    };
    (a / b).floor().to_integer()
}

impl fmt::Display for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x^({}) v^({})", if self.sign < 0 { "-" } else { "" }, self.xconst, self.vpow)?;
        for (fac, n) in &self.factors {
            let s = match fac {
                Factor::Lin { arg: Arg::V, c } => format!("(1 - x^({c}) v)"),
                Factor::Lin { arg: Arg::InvV, c } => format!("(1 - x^({c})/v)"),
                Factor::Inf { arg: Arg::V, c, period } => format!("(x^({c}) v; x^({period}))"),
                Factor::Inf { arg: Arg::InvV, c, period } => format!("(x^({c})/v; x^({period}))"),
                Factor::Euler { period } => format!("(x^({period}); x^({period}))"),
            };
            write!(f, " {s}^{n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn e(c0: i64, cr: i64) -> XExponent {
        XExponent::lin(c0, cr)
    }

    #[test]
    fn binomial_division() {
        // B(2α)/B(α) = X^α + X^{−α}
        let a = e(-1, 1);
        let q = XPoly::binom(a * 2).div_binom(a).unwrap();
        assert_eq!(q, XPoly::monomial(a, 1).add(&XPoly::monomial(-a, 1)));
        assert!(XPoly::binom(e(1, 0)).div_binom(e(0, 1)).is_none());
        // B(3)/B(1) = X^2 + 1 + X^{-2}
        let q = XPoly::binom(e(3, 0)).div_binom(e(1, 0)).unwrap();
        assert_eq!(q.terms().count(), 3);
    }

    #[test]
    fn bracket_product_matches_its_log_form() {
        let pt = EvalPoint::new(rat(2, 3), 3, 2).unwrap();
        // −[m][2(r−1)m]/([rm][(r−1)m])
        let bp = BracketProduct::ratio(-1, &[e(1, 0), e(-2, 2)], &[e(0, 1), e(-1, 1)]);
        let lf = bp.to_logform().unwrap();
        assert_eq!(lf.period, Some(e(0, 2)));
        for m in 1..6 {
            assert_eq!(bp.eval(&pt, m).unwrap(), lf.eval(&pt, m).unwrap());
        }
    }

    #[test]
    fn theta_quasi_periodicity() {
        // Θ_p(p v) = −v^{−1} Θ_p(v) up to the x^c normalization
        let p = e(0, 2);
        let th = ProductForm::theta(e(2, 0), p);
        let q = th.quasi_period(p).unwrap();
        assert!(q.is_monomial());
        assert_eq!(q.sign, -1);
        assert_eq!(q.vpow, XExponent::int(-1));
        assert_eq!(q.xconst, e(-2, 0));
    }

    #[test]
    fn canonical_form_absorbs_shifts() {
        let p = e(0, 2);
        let mut a = ProductForm::one();
        a.push(Factor::Inf { arg: Arg::V, c: e(1, 2), period: p }, 1);
        let mut b = ProductForm::one();
        b.push(Factor::Inf { arg: Arg::V, c: e(1, 0), period: p }, 1);
        b.push(Factor::Lin { arg: Arg::V, c: e(1, 0) }, -1);
        assert_eq!(a.canonical(), b.canonical());
        // (1 − x^c/v) = −x^c v^{−1}(1 − x^{−c} v)
        let mut c = ProductForm::one();
        c.push(Factor::Lin { arg: Arg::InvV, c: e(3, 0) }, 1);
        let cc = c.canonical();
        assert_eq!(cc.sign, -1);
        assert_eq!(cc.vpow, XExponent::int(-1));
        assert_eq!(cc.factors.get(&Factor::Lin { arg: Arg::V, c: e(-3, 0) }), Some(&1));
    }

    #[test]
    fn log_form_of_linear_factor() {
        // exp(−Σ a^m u^m/m) = 1 − a u
        let lf = LogForm::poly(XPoly::monomial(e(2, 0), -1));
        assert_eq!(lf.to_product(Arg::V), ProductForm::linear(e(2, 0)));
    }
}
