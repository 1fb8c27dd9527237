//! Structure functions, the higher currents `T_i`, pair kernels of
//! Λ-monomials and the closed-form fusion and exchange calculus.
//!
//! Kernels are kept symbolic as [`LinProd`]s, products of factors
//! `(1 − x^c z)^n`, so that cancellations and pole positions are exact for
//! generic `x` and `r`. Numbers only appear when a kernel is evaluated at
//! an [`EvalPoint`].

use crate::error::{Result, WsError};
use crate::exactnum::{int, pow_i, BigRat, Domain, EvalPoint, RationalFn, SeriesVar, TruncSeries, XExponent};
use crate::freefield::ParamTable;
use crate::prodform::{BracketProduct, LogForm, XPoly};
use crate::report::CheckReport;
use crate::superdynkin::{EdgeClass, ExtendedMatrix};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

/// `sign · x^{xpow} · z^{zpow} · Π (1 − x^c z)^{n_c}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinProd {
    pub sign: i64,
    pub xpow: XExponent,
    pub zpow: i64,
    pub factors: BTreeMap<XExponent, i64>,
}

impl LinProd {
    pub fn one() -> Self {
        LinProd { sign: 1, xpow: XExponent::ZERO, zpow: 0, factors: BTreeMap::new() }
    }

    /// `(1 − x^c z)^n`.
    pub fn linear(c: XExponent, n: i64) -> Self {
        let mut p = Self::one();
        p.push(c, n);
        p
    }

    fn push(&mut self, c: XExponent, n: i64) {
        let e = self.factors.entry(c).or_insert(0);
        *e += n;
        if *e == 0 {
            self.factors.remove(&c);
        }
    }

    /// `Δ_i(x^e z)`.
    pub fn delta(i: i64, e: XExponent) -> Self {
        let two_r = XExponent::lin(0, 2);
        let mut p = Self::one();
        p.push(two_r - XExponent::int(i) + e, 1);
        p.push(XExponent::int(i) - two_r + e, 1);
        p.push(XExponent::int(i) + e, -1);
        p.push(XExponent::int(-i) + e, -1);
        p
    }

    pub fn mul(&self, o: &LinProd) -> LinProd {
        let mut p = LinProd {
            sign: self.sign * o.sign,
            xpow: self.xpow + o.xpow,
            zpow: self.zpow + o.zpow,
            factors: self.factors.clone(),
        };
        for (c, n) in &o.factors {
            p.push(*c, *n);
        }
        p
    }

    pub fn inv(&self) -> LinProd {
        LinProd {
            sign: self.sign,
            xpow: -self.xpow,
            zpow: -self.zpow,
            factors: self.factors.iter().map(|(c, n)| (*c, -n)).collect(),
        }
    }

    pub fn div(&self, o: &LinProd) -> LinProd {
        self.mul(&o.inv())
    }

    /// Substitute `z → x^e z`.
    pub fn shift(&self, e: XExponent) -> LinProd {
        LinProd {
            sign: self.sign,
            xpow: self.xpow + e * self.zpow,
            zpow: self.zpow,
            factors: self.factors.iter().map(|(c, n)| (*c + e, *n)).collect(),
        }
    }

    /// Substitute `z → 1/z`, using `1 − x^c/z = −x^c z^{−1}(1 − x^{−c} z)`.
    pub fn invert_var(&self) -> LinProd {
        let mut p = LinProd { sign: self.sign, xpow: self.xpow, zpow: -self.zpow, factors: BTreeMap::new() };
        for (c, n) in &self.factors {
            if n % 2 != 0 {
                p.sign = -p.sign;
            }
            p.xpow += *c * *n;
            p.zpow -= n;
            p.push(-*c, *n);
        }
        p
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.xpow.is_zero() && self.zpow == 0 && self.factors.is_empty()
    }

    /// Exact rational function at an evaluation point.
    pub fn to_ratfn(&self, pt: &EvalPoint) -> Result<RationalFn> {
        let mut f = Vec::with_capacity(self.factors.len());
        for (c, n) in &self.factors {
            f.push((pt.xpow(c)?, *n as i32));
        }
        Ok(RationalFn::from_factors(int(self.sign) * pt.xpow(&self.xpow)?, self.zpow, &f))
    }

    /// Value at `z = x^e`.
    pub fn eval_at(&self, pt: &EvalPoint, e: XExponent) -> Result<BigRat> {
        let mut v = int(self.sign) * pt.xpow(&(self.xpow + e * self.zpow))?;
        for (c, n) in &self.factors {
            let b = BigRat::one() - pt.xpow(&(*c + e))?;
            if b.is_zero() && *n < 0 {
                return Err(WsError::DivisionByZero(format!("pole at z = x^({e})")));
            }
            v *= pow_i(&b, *n);
        }
        Ok(v)
    }

    /// Poles away from the origin as `(e, order)` with the pole at `z = x^e`.
    pub fn poles(&self) -> Vec<(XExponent, i64)> {
        self.factors.iter().filter(|(_, n)| **n < 0).map(|(c, n)| (-*c, -n)).collect()
    }

    /// Local data at `z = x^e` after specializing to the point, where
    /// factors that differ symbolically may coincide. With `u = x^{−e} z`
    /// and `G = H(u)/(1−u)^{order}`, returns `order`, `H(1)` and
    /// `H'(1)/H(1)`. A negative order is a zero; then `H(1)` is reported
    /// as zero.
    pub fn pole_data(&self, pt: &EvalPoint, e: XExponent) -> Result<PoleData> {
        let te = pt.t_exponent(&e)?;
        let mut order = 0i64;
        let mut h = int(self.sign) * pt.xpow(&(self.xpow + e * self.zpow))?;
        let mut dlog = int(self.zpow);
        for (c, n) in &self.factors {
            if pt.t_exponent(c)? + te == 0 {
                order -= n;
                continue;
            }
            let w = pt.xpow(&(*c + e))?;
            let b = BigRat::one() - &w;
            dlog -= int(*n) * &w / &b;
            h *= pow_i(&b, *n);
        }
        if order < 0 {
            h = BigRat::zero();
        }
        Ok(PoleData { order, h, dlog })
    }

    /// `lim_{z → x^e} (1 − x^{−e} z) G(z)`: the coefficient of `δ(x^{−e} z)`
    /// in the inside-minus-outside expansion. Zero where `G` is regular.
    pub fn delta_coefficient(&self, pt: &EvalPoint, e: XExponent) -> Result<BigRat> {
        let d = self.pole_data(pt, e)?;
        match d.order {
            ..=0 => Ok(BigRat::zero()),
            1 => Ok(d.h),
            n => Err(WsError::HigherOrderPole { order: n as u32, point: format!("x^({e})") }),
        }
    }

    /// Principal part at `z = x^e` in `u = x^{−e} z`: `(a_1, a_2)` with
    /// `G = a_2/(1−u)² + a_1/(1−u) + regular`. Poles of order three or
    /// more are rejected.
    pub fn principal_part(&self, pt: &EvalPoint, e: XExponent) -> Result<(BigRat, BigRat)> {
        let d = self.pole_data(pt, e)?;
        match d.order {
            ..=0 => Ok((BigRat::zero(), BigRat::zero())),
            1 => Ok((d.h, BigRat::zero())),
            2 => Ok((-(&d.h * &d.dlog), d.h)),
            n => Err(WsError::HigherOrderPole { order: n as u32, point: format!("x^({e})") }),
        }
    }

    /// Log coefficients `c(m)` with `G = exp(Σ c(m) z^m/m)`; needs unit prefactor.
    pub fn to_logform(&self) -> Option<LogForm> {
        if !(self.sign == 1 && self.xpow.is_zero() && self.zpow == 0) {
            return None;
        }
        let mut p = XPoly::zero();
        for (c, n) in &self.factors {
            p = p.add(&XPoly::monomial(*c, -n));
        }
        Some(LogForm::poly(p))
    }
}

impl fmt::Display for LinProd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if !self.xpow.is_zero() {
            write!(f, "x^({}) ", self.xpow)?;
        }
        if self.zpow != 0 {
            write!(f, "z^{} ", self.zpow)?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|(c, n)| format!("(1 - x^({c}) z)^{n}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// See [`LinProd::pole_data`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleData {
    pub order: i64,
    pub h: BigRat,
    pub dlog: BigRat,
}

/// `c(r,x) = [r][r−1](x − x^{−1})`.
pub fn c_rx(pt: &EvalPoint) -> Result<BigRat> {
    Ok(pt.bracket(&XExponent::lin(0, 1))? * pt.bracket(&XExponent::lin(-1, 1))? * pt.x_minus_inv())
}

/// `d_n(r,x) = Π_{l=1}^n [r−l]/[l]`, with `d_0 = 1`.
pub fn d_n(pt: &EvalPoint, n: u32) -> Result<BigRat> {
    let mut v = BigRat::one();
    for l in 1..=n as i64 {
        v *= pt.bracket(&XExponent::lin(-l, 1))? / pt.bracket(&XExponent::int(l))?;
    }
    Ok(v)
}

/// `d_{m+n} / (d_m d_n)` with common bracket factors cancelled first, so it
/// stays finite at integer `r` where `d_m` or `d_n` vanish.
pub fn d_ratio(pt: &EvalPoint, m: u32, n: u32) -> Result<BigRat> {
    let shifted = |l: u32| XExponent::lin(-(l as i64), 1);
    let plain = |l: u32| XExponent::int(l as i64);
    let mut num: Vec<XExponent> = (1..=m + n).map(shifted).collect();
    num.extend((1..=m).chain(1..=n).map(plain));
    let mut den: Vec<XExponent> = (1..=m + n).map(plain).collect();
    den.extend((1..=m).chain(1..=n).map(shifted));
    num.retain(|e| match den.iter().position(|d| d == e) {
        Some(k) => {
            den.swap_remove(k);
            false
        }
        None => true,
    });
    let mut v = BigRat::one();
    for e in &num {
        v *= pt.bracket(e)?;
    }
    for e in &den {
        let b = pt.bracket(e)?;
        if b.is_zero() {
            return Err(WsError::DivisionByZero(format!("d_{{{}}}/(d_{m} d_{n}) has a pole at r = {}", m + n, pt.r())));
        }
        v /= b;
    }
    Ok(v)
}

/// `Δ_i(z)` as an exact rational function.
pub fn delta_fn(i: i64, pt: &EvalPoint) -> Result<RationalFn> {
    LinProd::delta(i, XExponent::ZERO).to_ratfn(pt)
}

/// `Π_{l=1}^{n−1} Δ_1(x^{2l+1})`.
pub fn delta_chain(pt: &EvalPoint, n: i64) -> Result<BigRat> {
    let mut v = BigRat::one();
    for l in 1..n {
        v *= LinProd::delta(1, XExponent::ZERO).eval_at(pt, XExponent::int(2 * l + 1))?;
    }
    Ok(v)
}

/// Log coefficient of `f_{i,j}(z;a)` as a function of the mode.
pub fn f_bracket(i: u32, j: u32, a: XExponent) -> BracketProduct {
    let (lo, hi) = (i.min(j) as i64, i.max(j) as i64);
    if lo == 0 {
        return BracketProduct::constant(0);
    }
    BracketProduct {
        coeff: -1,
        xmx: 2,
        xpow: XExponent::ZERO,
        num: vec![XExponent::lin(-1, 1), XExponent::lin(0, 1), XExponent::int(lo), a - XExponent::int(hi)],
        den: vec![XExponent::int(1), a],
    }
}

/// [`f_bracket`] as a rational function of `X = x^m`.
pub fn f_logform(i: u32, j: u32, a: XExponent) -> Result<LogForm> {
    if i.min(j) == 0 {
        return Ok(LogForm::zero());
    }
    f_bracket(i, j, a).to_logform()
}

/// `log f_{i,j}(x^e z; a)` through order `k`.
pub fn struct_fn_log(i: u32, j: u32, a: XExponent, e: XExponent, pt: &EvalPoint, k: i64) -> Result<TruncSeries> {
    let bp = f_bracket(i, j, a);
    let mut c = Vec::with_capacity(k.max(0) as usize);
    for m in 1..=k {
        c.push(bp.eval(pt, m)? * pt.xpow(&(e * m))? / int(m));
    }
    Ok(TruncSeries::new(SeriesVar::Z, 1, c, k))
}

/// `f_{i,j}(x^e z; a)` through order `k`.
pub fn struct_fn_shifted(i: u32, j: u32, a: XExponent, e: XExponent, pt: &EvalPoint, k: i64) -> Result<TruncSeries> {
    struct_fn_log(i, j, a, e, pt, k)?.exp()
}

/// `f_{i,j}(z; a)` through order `k`.
pub fn struct_fn(i: u32, j: u32, a: XExponent, pt: &EvalPoint, k: i64) -> Result<TruncSeries> {
    struct_fn_shifted(i, j, a, XExponent::ZERO, pt, k)
}

/// Occupation vector `(m_1, …, m_{L+1})` of a Λ-monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WMonomial {
    pub occ: Vec<u32>,
}

impl WMonomial {
    pub fn new(occ: Vec<u32>) -> Self {
        WMonomial { occ }
    }

    pub fn empty(l: usize) -> Self {
        WMonomial { occ: vec![0; l + 1] }
    }

    /// The monomial `Λ_k` alone.
    pub fn single(l: usize, k: usize) -> Self {
        let mut m = Self::empty(l);
        m.occ[k - 1] = 1;
        m
    }

    pub fn degree(&self) -> i64 {
        self.occ.iter().map(|&m| m as i64).sum()
    }

    /// Per-color block offsets `−i+1+2(m_1+…+m_{k−1})`.
    pub fn offsets(&self) -> Vec<i64> {
        let i = self.degree();
        let mut acc = 0;
        self.occ
            .iter()
            .map(|&m| {
                let o = -i + 1 + 2 * acc;
                acc += m as i64;
                o
            })
            .collect()
    }

    /// Elementary factors `(color, x-exponent)`: `Λ_color(x^e z)`.
    pub fn factors(&self) -> Vec<(usize, i64)> {
        let i = self.degree();
        let mut out = Vec::with_capacity(i as usize);
        for (k, &m) in self.occ.iter().enumerate() {
            for _ in 0..m {
                out.push((k + 1, -i + 1 + 2 * out.len() as i64));
            }
        }
        out
    }

    pub fn support_min(&self) -> Option<usize> {
        self.occ.iter().position(|&m| m > 0).map(|p| p + 1)
    }

    pub fn support_max(&self) -> Option<usize> {
        self.occ.iter().rposition(|&m| m > 0).map(|p| p + 1)
    }

    pub fn add(&self, o: &WMonomial) -> WMonomial {
        WMonomial { occ: self.occ.iter().zip(&o.occ).map(|(a, b)| a + b).collect() }
    }

    /// `m_1 + … + m_{k−1}`.
    pub fn below(&self, k: usize) -> i64 {
        self.occ[..k - 1].iter().map(|&m| m as i64).sum()
    }

    /// `m_{k+1} + … + m_{L+1}`.
    pub fn above(&self, k: usize) -> i64 {
        self.occ[k..].iter().map(|&m| m as i64).sum()
    }
}

impl fmt::Display for WMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.occ.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", p.join(","))
    }
}

/// All monomials of degree `i` allowed by the edge classes.
pub fn enumerate_monomials(mat: &ExtendedMatrix, i: u32, cap: u32) -> Result<Vec<WMonomial>> {
    if i > cap {
        return Err(WsError::Precondition(format!("degree {i} exceeds the cap {cap}")));
    }
    let n = mat.l + 1;
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(mat: &ExtendedMatrix, k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<WMonomial>) {
        let n = cur.len();
        if k == n {
            if left == 0 {
                out.push(WMonomial::new(cur.clone()));
            }
            return;
        }
        let max = match mat.edge(k + 1) {
            EdgeClass::Plus => left.min(1),
            EdgeClass::Minus => left,
        };
        for m in (0..=max).rev() {
            cur[k] = m;
            rec(mat, k + 1, left - m, cur, out);
        }
        cur[k] = 0;
    }
    rec(mat, 0, i, &mut cur, &mut out);
    Ok(out)
}

/// `d_n` as used by the current weights of a table, honouring a
/// [`Mutation::DWeight`](crate::freefield::Mutation::DWeight).
pub fn table_d(tbl: &ParamTable, n: u32) -> Result<BigRat> {
    let d = d_n(&tbl.pt, n)?;
    if tbl.mutation == Some(crate::freefield::Mutation::DWeight { n: n as usize }) {
        return Ok(d * tbl.pt.x());
    }
    Ok(d)
}

/// `Π_{k Minus} d_{m_k}`.
pub fn monomial_weight(tbl: &ParamTable, m: &WMonomial) -> Result<BigRat> {
    let mut w = BigRat::one();
    for (k, &mk) in m.occ.iter().enumerate() {
        if tbl.mat.edge(k + 1) == EdgeClass::Minus {
            w *= table_d(tbl, mk)?;
        }
    }
    Ok(w)
}

/// `T_i(z)` as weighted monomials at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WCurrent {
    pub degree: u32,
    pub terms: Vec<(WMonomial, BigRat)>,
}

/// Build `T_i` for the diagram. Monomials whose weight vanishes at the
/// point (`d_n = 0` once `r` is an integer `≤ n`) are left out.
pub fn t_current(tbl: &ParamTable, i: u32) -> Result<WCurrent> {
    let mons = enumerate_monomials(&tbl.mat, i, i)?;
    let mut terms = Vec::with_capacity(mons.len());
    for m in mons {
        let w = monomial_weight(tbl, &m)?;
        if !w.is_zero() {
            terms.push((m, w));
        }
    }
    Ok(WCurrent { degree: i, terms })
}

/// A normal-ordered product of elementary `Λ`'s, as the sorted multiset of
/// `(color, x-exponent)` relative to a reference point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpSymbol(pub Vec<(usize, i64)>);

impl OpSymbol {
    pub fn new(mut v: Vec<(usize, i64)>) -> Self {
        v.sort_unstable();
        OpSymbol(v)
    }

    /// `:A(x^{ea} w) B(x^{eb} w):`.
    pub fn product(a: &WMonomial, ea: i64, b: &WMonomial, eb: i64) -> Self {
        let v = a
            .factors()
            .into_iter()
            .map(|(c, e)| (c, e + ea))
            .chain(b.factors().into_iter().map(|(c, e)| (c, e + eb)))
            .collect();
        Self::new(v)
    }
}

impl fmt::Display for OpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let p: Vec<String> = self.0.iter().map(|(c, e)| format!("L{c}[{e}]")).collect();
        write!(f, ":{}:", p.join(" "))
    }
}

/// `f_{1,1}(z)·φ_{Λk,Λl}(z)` in closed form.
pub fn pair_closed_lin(mat: &ExtendedMatrix, k: usize, l: usize) -> LinProd {
    use std::cmp::Ordering::*;
    match k.cmp(&l) {
        Less => LinProd::delta(1, XExponent::int(-1)),
        Greater => LinProd::delta(1, XExponent::int(1)),
        Equal => match mat.edge(k) {
            EdgeClass::Plus => LinProd::one(),
            EdgeClass::Minus => LinProd::delta(2, XExponent::ZERO),
        },
    }
}

/// [`pair_closed_lin`] as a rational function.
pub fn pair_closed_form(tbl: &ParamTable, k: usize, l: usize) -> Result<RationalFn> {
    pair_closed_lin(&tbl.mat, k, l).to_ratfn(&tbl.pt)
}

/// Log coefficients of [`pair_closed_lin`].
pub fn pair_kernel_logform(tbl: &ParamTable, k: usize, l: usize) -> LogForm {
    pair_closed_lin(&tbl.mat, k, l).to_logform().expect("closed forms have unit prefactor")
}

/// Poles allowed for the exchange of `T_i` and `T_j`: `x^{±(j−i+2k)}`, `1 ≤ k ≤ i`.
pub fn declared_poles(i: i64, j: i64) -> Vec<i64> {
    let (p, q) = (i.min(j), i.max(j));
    let mut v: Vec<i64> = (1..=p).flat_map(|k| [q - p + 2 * k, -(q - p + 2 * k)]).collect();
    v.sort_unstable();
    v
}

/// `f_{i,j}(z)` times all contractions of `A(z_1)B(z_2)`, `z = z_2/z_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairKernel {
    pub kernel: LinProd,
    /// Pole positions allowed for the aggregate of all pairs.
    pub declared: Vec<i64>,
}

impl PairKernel {
    /// Integer pole positions with their orders.
    pub fn poles(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> =
            self.kernel.poles().into_iter().map(|(e, n)| (e.as_int().expect("checked on construction"), n)).collect();
        v.sort_unstable();
        v
    }

    /// Poles outside the declared set.
    pub fn extra_poles(&self) -> Vec<i64> {
        self.poles().into_iter().map(|(e, _)| e).filter(|e| !self.declared.contains(e)).collect()
    }
}

/// `Π_{u=1}^{p} Π_{v=1}^{q−1} Δ_1(x^{−p−q−1+2u+2v} z)`: what separates
/// `f_{p,q}` from the product of shifted `f_{1,1}`'s.
fn fusion_denominator(p: i64, q: i64) -> LinProd {
    let mut d = LinProd::one();
    for u in 1..=p {
        for v in 1..q {
            d = d.mul(&LinProd::delta(1, XExponent::int(-p - q - 1 + 2 * u + 2 * v)));
        }
    }
    d
}

/// The exact kernel of a monomial pair.
pub fn pair_kernel(mat: &ExtendedMatrix, a: &WMonomial, b: &WMonomial) -> Result<PairKernel> {
    let (i, j) = (a.degree(), b.degree());
    let declared = declared_poles(i, j);
    if i == 0 || j == 0 {
        return Ok(PairKernel { kernel: LinProd::one(), declared });
    }
    let mut g = fusion_denominator(i.min(j), i.max(j)).inv();
    for (k, ea) in a.factors() {
        for (l, eb) in b.factors() {
            g = g.mul(&pair_closed_lin(mat, k, l).shift(XExponent::int(eb - ea)));
        }
    }
    for (e, _) in g.poles() {
        match e.as_int() {
            Some(n) if n.abs() <= i + j => {}
            _ => return Err(WsError::UndeclaredPole(format!("x^({e}) in the kernel of {a} and {b}"))),
        }
    }
    Ok(PairKernel { kernel: g, declared })
}

/// The same product built from truncated series: `f_{i,j}` times the
/// shifted contraction series from the parameter tables.
pub fn pair_kernel_series(tbl: &ParamTable, a: &WMonomial, b: &WMonomial, k: i64) -> Result<TruncSeries> {
    let (i, j) = (a.degree() as u32, b.degree() as u32);
    let mut s = struct_fn(i, j, tbl.a(), &tbl.pt, k)?;
    for (ka, ea) in a.factors() {
        for (kb, eb) in b.factors() {
            let phi = crate::freefield::phi_lambda_pair(tbl, ka, kb, k)?;
            let phi = phi.series().expect("series form").rescale_var(&tbl.pt.xpow_int(eb - ea));
            s = s.mul(&phi);
        }
    }
    Ok(s)
}

/// Which limit a fusion takes: `z_1 → x^{±(i+j)} z_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionSign {
    Plus,
    Minus,
}

impl FusionSign {
    pub fn sign(self) -> i64 {
        match self {
            FusionSign::Plus => 1,
            FusionSign::Minus => -1,
        }
    }
}

/// Closed-form fusion of `A` (degree `i`) and `B` (degree `j`): the
/// coefficient and fused monomial, or `None` when the fusion vanishes.
pub fn fuse_monomials(
    mat: &ExtendedMatrix,
    a: &WMonomial,
    b: &WMonomial,
    sign: FusionSign,
    pt: &EvalPoint,
) -> Result<Option<(BigRat, WMonomial)>> {
    let (i, j) = (a.degree(), b.degree());
    let (Some(amin), Some(amax), Some(bmin), Some(bmax)) =
        (a.support_min(), a.support_max(), b.support_min(), b.support_max())
    else {
        return Err(WsError::Precondition("fusion needs nonempty monomials".into()));
    };
    let base = c_rx(pt)? * delta_chain(pt, i.min(j))?;
    let (left, right) = match sign {
        FusionSign::Plus => (bmax, amin),
        FusionSign::Minus => (amax, bmin),
    };
    let coeff = if left < right {
        base
    } else if left == right && mat.edge(left) == EdgeClass::Minus {
        let (ml, nl) = (a.occ[left - 1], b.occ[left - 1]);
        base * d_ratio(pt, ml, nl)?
    } else {
        return Ok(None);
    };
    let coeff = if sign == FusionSign::Plus { -coeff } else { coeff };
    Ok(Some((coeff, a.add(b))))
}

/// Shape of a delta term. With `u = x^{−point} z_2/z_1` and `D = u ∂_u`,
/// a double pole contributes `Dδ(u)` and `δ(u)` times a derivative of the
/// output operator besides the plain `δ(u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeltaKind {
    #[default]
    Delta,
    /// `Dδ(u)` times the output.
    DerivDelta,
    /// `δ(u)` times the output with the marked factor `Λ_c(x^e z_1)`
    /// replaced by `(w∂_w Λ_c)(x^e z_1)`.
    DerivFactor { color: usize, exponent: i64 },
}

impl fmt::Display for DeltaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaKind::Delta => write!(f, "δ"),
            DeltaKind::DerivDelta => write!(f, "Dδ"),
            DeltaKind::DerivFactor { color, exponent } => write!(f, "δ·D(L{color}[{exponent}])"),
        }
    }
}

/// One delta-function term `coefficient · δ(x^{−point} z_2/z_1) · output`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaTerm {
    /// The delta sits at `z_2/z_1 = x^{point}`.
    pub point: i64,
    #[serde(default)]
    pub kind: DeltaKind,
    #[serde(with = "crate::exactnum::rat_string")]
    pub coefficient: BigRat,
    /// Output operator relative to `z_1`.
    pub output: OpSymbol,
}

/// Closed-form exchange of `Λ_l(z_1)` with the monomial `B(z_2)` of degree
/// `i ≥ 1`: the delta terms of the `f_{1,i}`-weighted commutator.
pub fn exchange_with_lambda(mat: &ExtendedMatrix, l: usize, b: &WMonomial, pt: &EvalPoint) -> Result<Vec<DeltaTerm>> {
    let i = b.degree();
    let (Some(bmin), Some(bmax)) = (b.support_min(), b.support_max()) else {
        return Err(WsError::Precondition("exchange needs a monomial of positive degree".into()));
    };
    let n = b.occ.len() - 1;
    let c = c_rx(pt)?;
    let ml = b.occ[l - 1];
    let (kappa, up, down) = if ml != 0 {
        match mat.edge(l) {
            EdgeClass::Plus => return Ok(vec![]),
            EdgeClass::Minus => {
                let k = &c * d_ratio(pt, ml, 1)?;
                (k, i + 1 - 2 * b.below(l), -i - 1 + 2 * b.above(l))
            }
        }
    } else if l < bmin {
        (c, i + 1, i - 1)
    } else if l > bmax {
        (c, -i + 1, -i - 1)
    } else {
        let s = b.below(l);
        (c, i + 1 - 2 * s, i - 1 - 2 * s)
    };
    let lam = WMonomial::single(n, l);
    let term = |point: i64, coefficient: BigRat| DeltaTerm {
        point,
        kind: DeltaKind::Delta,
        coefficient,
        output: OpSymbol::product(&lam, 0, b, point),
    };
    Ok(vec![term(up, kappa.clone()), term(down, -kappa)])
}

/// Delta terms of a pair kernel `G` of `A(z_1) B(z_2)`, one group per pole.
/// A simple pole gives one `δ` term; a double pole `a_2/(1−u)² + a_1/(1−u)`
/// gives `(a_1+a_2)·δ`, `a_2·Dδ` and `−a_2·δ` times each factor derivative of
/// `B`, from `f(u) Dδ(u) = f(1) Dδ(u) − (Df)(1) δ(u)`.
pub fn kernel_delta_terms(pk: &PairKernel, a: &WMonomial, b: &WMonomial, pt: &EvalPoint) -> Result<Vec<DeltaTerm>> {
    let mut out = Vec::new();
    for (e, _) in pk.poles() {
        let (a1, a2) = pk.kernel.principal_part(pt, XExponent::int(e))?;
        let output = OpSymbol::product(a, 0, b, e);
        let mut push = |kind: DeltaKind, coefficient: BigRat| {
            if !coefficient.is_zero() {
                out.push(DeltaTerm { point: e, kind, coefficient, output: output.clone() });
            }
        };
        push(DeltaKind::Delta, &a1 + &a2);
        if !a2.is_zero() {
            push(DeltaKind::DerivDelta, a2.clone());
            for (color, x) in b.factors() {
                push(DeltaKind::DerivFactor { color, exponent: x + e }, -a2.clone());
            }
        }
    }
    Ok(out)
}

/// Closed-form fusion and exchange data against the pair kernels, for every
/// monomial pair of total degree `≤ cap`: fusion limits and fused symbols in
/// both directions, and the delta terms of each `Λ_l` against each monomial.
pub fn check_appendix_data(tbl: &ParamTable, cap: u32) -> Result<CheckReport> {
    let mat = &tbl.mat;
    let pt = &tbl.pt;
    let mut rep = CheckReport::new("appendix_data", format!("{pt}"));
    let mut mons: Vec<Vec<WMonomial>> = Vec::new();
    for i in 0..=cap {
        let mut live = Vec::new();
        for m in enumerate_monomials(mat, i, cap)? {
            if !monomial_weight(tbl, &m)?.is_zero() {
                live.push(m);
            }
        }
        mons.push(live);
    }
    for i in 1..cap {
        for j in 1..=cap - i {
            for a in &mons[i as usize] {
                for b in &mons[j as usize] {
                    let pk = pair_kernel(mat, a, b)?;
                    for sign in [FusionSign::Plus, FusionSign::Minus] {
                        let s = sign.sign();
                        let point = -s * (i + j) as i64;
                        let limit = pk.kernel.delta_coefficient(pt, XExponent::int(point))?;
                        match fuse_monomials(mat, a, b, sign, pt)? {
                            Some((c, m)) => {
                                rep.expect(limit == c, || format!("fusion {a},{b} sign {s}: limit {limit}, closed {c}"));
                                let placed: Vec<(usize, i64)> =
                                    m.factors().into_iter().map(|(k, e)| (k, e - s * j as i64)).collect();
                                rep.expect(OpSymbol::new(placed) == OpSymbol::product(a, 0, b, point), || {
                                    format!("fusion {a},{b} sign {s}: fused symbol {m}")
                                });
                            }
                            None => rep.expect(limit.is_zero(), || format!("fusion {a},{b} sign {s}: limit {limit}, closed 0")),
                        }
                    }
                }
            }
        }
    }
    for i in 1..cap {
        for l in 1..=mat.l + 1 {
            let lam = WMonomial::single(mat.l, l);
            for b in &mons[i as usize] {
                let pk = pair_kernel(mat, &lam, b)?;
                let mut got: BTreeMap<(i64, DeltaKind), BigRat> = BTreeMap::new();
                for t in kernel_delta_terms(&pk, &lam, b, pt)? {
                    *got.entry((t.point, t.kind)).or_insert_with(BigRat::zero) += t.coefficient;
                }
                let mut want: BTreeMap<(i64, DeltaKind), BigRat> = BTreeMap::new();
                for t in exchange_with_lambda(mat, l, b, pt)? {
                    *want.entry((t.point, t.kind)).or_insert_with(BigRat::zero) += t.coefficient;
                }
                got.retain(|_, v| !v.is_zero());
                want.retain(|_, v| !v.is_zero());
                rep.expect(got == want, || format!("exchange Λ{l},{b}: kernel {got:?}, closed {want:?}"));
            }
        }
    }
    Ok(rep)
}

fn series_of(f: &LinProd, pt: &EvalPoint, k: i64) -> Result<TruncSeries> {
    f.to_ratfn(pt)?.expand(Domain::Inside, k)
}

/// The six fusion identities among `Δ_i` and `f_{i,j}` for degrees up to
/// `max_deg`, series identities through order `k`.
///
/// Products of series are compared through their logarithms, which add.
/// Every factor has constant term 1, so equal logs through order `k` means
/// equal series through order `k`.
pub fn check_fusion_identities(a: XExponent, pt: &EvalPoint, max_deg: i64, k: i64) -> CheckReport {
    let mut rep = CheckReport::new("fusion_identities", pt.to_string());
    let f_cache: RefCell<BTreeMap<(i64, i64, i64), TruncSeries>> = RefCell::default();
    let d_cache: RefCell<BTreeMap<i64, TruncSeries>> = RefCell::default();
    let f = |i: i64, j: i64, e: i64| -> Result<TruncSeries> {
        if let Some(s) = f_cache.borrow().get(&(i, j, e)) {
            return Ok(s.clone());
        }
        let s = struct_fn_log(i as u32, j as u32, a, XExponent::int(e), pt, k)?;
        f_cache.borrow_mut().insert((i, j, e), s.clone());
        Ok(s)
    };
    let d1 = |e: i64| -> Result<TruncSeries> {
        if let Some(s) = d_cache.borrow().get(&e) {
            return Ok(s.clone());
        }
        let s = series_of(&LinProd::delta(1, XExponent::int(e)), pt, k)?.log()?;
        d_cache.borrow_mut().insert(e, s.clone());
        Ok(s)
    };
    let mut run = |name: String, r: Result<(TruncSeries, TruncSeries)>| match r {
        Ok((l, rr)) => rep.expect(l.agrees_with(&rr), || format!("{name}: mismatch at order {:?}", l.first_mismatch(&rr))),
        Err(e) => rep.fail(format!("{name}: {e}")),
    };
    for i in 1..=max_deg {
        for j in i..=max_deg {
            run(format!("f_{i}{j} = f_{j}{i}"), (|| Ok((f(i, j, 0)?, f(j, i, 0)?)))());
            run(
                format!("f_{i}{j} as product of f_1{j}"),
                (|| {
                    let mut p = TruncSeries::zero(SeriesVar::Z, k);
                    for s in 1..=i {
                        p = p.add(&f(1, j, -i - 1 + 2 * s)?);
                    }
                    Ok((f(i, j, 0)?, p))
                })(),
            );
        }
    }
    for i in 2..=max_deg {
        run(
            format!("f_1{i} via f_11"),
            (|| {
                let mut lhs = f(1, i, 0)?;
                for s in 1..i {
                    lhs = lhs.add(&d1(-i + 2 * s)?);
                }
                let mut rhs = TruncSeries::zero(SeriesVar::Z, k);
                for s in 1..=i {
                    rhs = rhs.add(&f(1, 1, -i - 1 + 2 * s)?);
                }
                Ok((lhs, rhs))
            })(),
        );
    }
    for sg in [1i64, -1] {
        for i in 1..=max_deg {
            for j in 1..=max_deg {
                run(
                    format!("f_1{i} f_{j}{i} shifted, sign {sg}"),
                    (|| {
                        let lhs = f(1, i, 0)?.add(&f(j, i, sg * (j + 1))?);
                        let mut rhs = f(j + 1, i, sg * j)?;
                        if i <= j {
                            rhs = rhs.add(&d1(sg * i)?);
                        }
                        Ok((lhs, rhs))
                    })(),
                );
                run(
                    format!("f_1{i} f_1{j} shifted by i+j, sign {sg}"),
                    (|| {
                        let lhs = f(1, i, 0)?.add(&f(1, j, sg * (i + j))?);
                        let rhs = f(1, i + j, sg * j)?.add(&d1(sg * i)?);
                        Ok((lhs, rhs))
                    })(),
                );
                for kk in (1 - j)..i {
                    if kk == 0 {
                        continue;
                    }
                    run(
                        format!("f_1{i} f_1{j} transfer {kk}, sign {sg}"),
                        (|| {
                            let lhs = f(1, i, 0)?.add(&f(1, j, sg * (i - j - 2 * kk))?);
                            let rhs = f(1, i - kk, -sg * kk)?.add(&f(1, j + kk, sg * (i - j - kk))?);
                            Ok((lhs, rhs))
                        })(),
                    );
                }
            }
        }
    }
    for i in 2..=max_deg {
        let mut lhs = LinProd::delta(i + 1, XExponent::ZERO);
        let mut rhs = LinProd::one();
        for s in 1..i {
            lhs = lhs.mul(&LinProd::delta(1, XExponent::int(-i + 2 * s)));
        }
        for s in 1..=i {
            rhs = rhs.mul(&LinProd::delta(2, XExponent::int(-i - 1 + 2 * s)));
        }
        rep.expect(lhs == rhs, || format!("Δ_{} product identity, symbolic", i + 1));
        match (lhs.to_ratfn(pt), rhs.to_ratfn(pt)) {
            (Ok(u), Ok(v)) => rep.expect(u == v, || format!("Δ_{} product identity at the point", i + 1)),
            (Err(e), _) | (_, Err(e)) => rep.fail(format!("Δ_{}: {e}", i + 1)),
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::superdynkin::{extend_matrix, standard_diagram, LabelRule};

    fn a10() -> ExtendedMatrix {
        extend_matrix(&standard_diagram(1, 0).unwrap(), None, LabelRule::EpsilonEdges).unwrap()
    }

    fn pt() -> EvalPoint {
        EvalPoint::defaults()[0].clone()
    }

    #[test]
    fn delta_jump_matches_closed_coefficient() {
        let p = pt();
        for i in 1..4 {
            let f = delta_fn(i, &p).unwrap();
            let want = p.bracket(&XExponent::lin(0, 1)).unwrap() * p.bracket(&XExponent::lin(-i, 1)).unwrap()
                / p.bracket(&XExponent::int(i)).unwrap()
                * p.x_minus_inv();
            assert_eq!(f.delta_coefficient(&p.xpow_int(i)).unwrap(), want);
            assert_eq!(f.delta_coefficient(&p.xpow_int(-i)).unwrap(), -want.clone());
            let sym = LinProd::delta(i, XExponent::ZERO);
            assert_eq!(sym.delta_coefficient(&p, XExponent::int(i)).unwrap(), want);
        }
    }

    #[test]
    fn f11_first_coefficient() {
        let p = pt();
        let a = a10().a();
        let s = struct_fn(1, 1, a, &p, 3).unwrap();
        let br = |e: XExponent| p.bracket(&e).unwrap();
        let xm = p.x_minus_inv();
        let want = -(&xm * &xm) * br(XExponent::lin(-1, 1)) * br(XExponent::lin(0, 1)) * br(a - XExponent::int(1))
            / br(a);
        assert_eq!(s.coeff(1).unwrap(), want);
        assert_eq!(struct_fn(0, 3, a, &p, 5).unwrap(), TruncSeries::constant(SeriesVar::Z, BigRat::one(), 5));
    }

    #[test]
    fn f_logform_agrees_with_brackets() {
        let p = pt();
        let a = a10().a();
        for (i, j) in [(1, 1), (1, 2), (2, 3)] {
            let lf = f_logform(i, j, a).unwrap();
            for m in 1..6 {
                assert_eq!(lf.eval(&p, m).unwrap(), f_bracket(i, j, a).eval(&p, m).unwrap());
            }
        }
    }

    #[test]
    fn a10_monomials() {
        let mat = a10();
        let one: Vec<String> = enumerate_monomials(&mat, 1, 4).unwrap().iter().map(|m| m.to_string()).collect();
        assert_eq!(one, ["(1,0,0)", "(0,1,0)", "(0,0,1)"]);
        let two: Vec<String> = enumerate_monomials(&mat, 2, 4).unwrap().iter().map(|m| m.to_string()).collect();
        assert_eq!(two, ["(1,1,0)", "(1,0,1)", "(0,1,1)", "(0,0,2)"]);
        assert_eq!(enumerate_monomials(&mat, 0, 4).unwrap(), vec![WMonomial::empty(2)]);
        assert!(enumerate_monomials(&mat, 5, 4).is_err());
    }

    #[test]
    fn t1_and_t2_weights() {
        let p = pt();
        let tbl = ParamTable::new(a10(), p.clone());
        let t1 = t_current(&tbl, 1).unwrap();
        let r1 = p.bracket(&XExponent::lin(-1, 1)).unwrap();
        assert_eq!(t1.terms[2].1, r1);
        assert_eq!(t1.terms[0].1, rat(1, 1));
        let t2 = t_current(&tbl, 2).unwrap();
        let d2 = r1 * p.bracket(&XExponent::lin(-2, 1)).unwrap() / p.bracket(&XExponent::int(2)).unwrap();
        assert_eq!(t2.terms[3].1, d2);
        assert_eq!(d_n(&p, 0).unwrap(), rat(1, 1));
    }

    #[test]
    fn invert_var_round_trips() {
        let g = LinProd::delta(1, XExponent::int(-1)).mul(&LinProd::linear(XExponent::lin(1, 1), -2));
        assert_eq!(g.invert_var().invert_var(), g);
        // Δ_i is symmetric under z → 1/z
        let d = LinProd::delta(2, XExponent::ZERO);
        assert_eq!(d.invert_var(), d);
    }

    #[test]
    fn single_pair_kernel_poles() {
        let mat = a10();
        let (a, b) = (WMonomial::single(2, 1), WMonomial::single(2, 2));
        let pk = pair_kernel(&mat, &a, &b).unwrap();
        assert_eq!(pk.kernel, LinProd::delta(1, XExponent::int(-1)));
        let poles: Vec<i64> = pk.poles().iter().map(|p| p.0).collect();
        assert_eq!(poles, [0, 2]);
        assert_eq!(pk.declared, [-2, 2]);
        // fermionic-type color with itself: no poles
        assert!(pair_kernel(&mat, &a, &a).unwrap().kernel.is_one());
    }
}
