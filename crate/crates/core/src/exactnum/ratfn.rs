//! Exact rational functions of one variable `z`.

use super::{fmt_rat, pow_i, BigRat, Poly, SeriesVar, TruncSeries};
use crate::error::{Result, WsError};
use num_traits::{One, Zero};

/// Which annulus an expansion is valid in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `|z|` smaller than every nonzero pole: a series in `z`.
    Inside,
    /// `|z|` larger than every pole: a series in `1/z`.
    Outside,
}

/// `z^shift · num(z) / den(z)` with `num(0) ≠ 0`, `den(0) ≠ 0`, the two
/// polynomials coprime and `den` monic. The zero function has empty `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
    shift: i64,
}

fn strip_z(p: &Poly) -> (Poly, i64) {
    let k = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    (Poly::new(p.coeffs()[k..].to_vec()), k as i64)
}

/// Divide by `(z - z0)`; returns quotient and remainder `p(z0)`.
fn synthetic_div(p: &Poly, z0: &BigRat) -> (Poly, BigRat) {
    let c = p.coeffs();
    if c.is_empty() {
        return (Poly::zero(), BigRat::zero());
    }
    let mut q = vec![BigRat::zero(); c.len() - 1];
    let mut acc = BigRat::zero();
    for k in (0..c.len()).rev() {
        acc = &acc * z0 + &c[k];
        if k > 0 {
            q[k - 1] = acc.clone();
        }
    }
    (Poly::new(q), acc)
}

impl RationalFn {
    /// Normalize `z^shift · num / den`.
    pub fn new(num: Poly, den: Poly, shift: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(WsError::DivisionByZero("rational function denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (n, kn) = strip_z(&num);
        let (d, kd) = strip_z(&den);
        let g = Poly::gcd(&n, &d);
        let (n, _) = n.divrem(&g);
        let (d, _) = d.divrem(&g);
        let l = d.lead().recip();
        Ok(RationalFn {
            num: n.scale(&l),
            den: d.scale(&l),
            shift: shift + kn - kd,
        })
    }

    pub fn zero() -> Self {
        RationalFn {
            num: Poly::zero(),
            den: Poly::constant(BigRat::one()),
            shift: 0,
        }
    }

    pub fn constant(c: BigRat) -> Self {
        Self::new(Poly::constant(c), Poly::constant(BigRat::one()), 0).unwrap()
    }

    /// `c · z^shift · Π (1 - a_k z)^{n_k}`.
    pub fn from_factors(c: BigRat, shift: i64, factors: &[(BigRat, i32)]) -> Self {
        let mut num = Poly::constant(c);
        let mut den = Poly::constant(BigRat::one());
        for (a, n) in factors {
            let lin = Poly::new(vec![BigRat::one(), -a.clone()]);
            for _ in 0..n.unsigned_abs() {
                if *n > 0 {
                    num = &num * &lin;
                } else {
                    den = &den * &lin;
                }
            }
        }
        Self::new(num, den, shift).expect("linear factors give a nonzero denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        Self::new(&self.num * &o.num, &self.den * &o.den, self.shift + o.shift).unwrap()
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        if o.is_zero() {
            return Err(WsError::DivisionByZero("rational function".into()));
        }
        Self::new(&self.num * &o.den, &self.den * &o.num, self.shift - o.shift)
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(o.shift);
        let lift = |p: &Poly, k: i64| {
            let mut v = vec![BigRat::zero(); k as usize];
            v.extend_from_slice(p.coeffs());
            Poly::new(v)
        };
        let a = lift(&(&self.num * &o.den), self.shift - s);
        let b = lift(&(&o.num * &self.den), o.shift - s);
        Self::new(&a + &b, &self.den * &o.den, s).unwrap()
    }

    pub fn scale(&self, c: &BigRat) -> RationalFn {
        Self::new(self.num.scale(c), self.den.clone(), self.shift).unwrap()
    }

    /// Value at a point that is not a pole.
    pub fn eval(&self, z: &BigRat) -> Result<BigRat> {
        if z.is_zero() && self.shift < 0 {
            return Err(WsError::PoleAtZero);
        }
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(WsError::DivisionByZero(format!("pole at z = {}", fmt_rat(z))));
        }
        Ok(pow_i(z, self.shift) * self.num.eval(z) / d)
    }

    /// Laurent expansion in the chosen domain, known through exponent `k`
    /// of the expansion variable (`z` inside, `1/z` outside).
    pub fn expand(&self, domain: Domain, k: i64) -> Result<TruncSeries> {
        match domain {
            Domain::Inside => Ok(series_of_quotient(&self.num, &self.den, self.shift, k, SeriesVar::Z)),
            Domain::Outside => {
                let rev = |p: &Poly| Poly::new(p.coeffs().iter().rev().cloned().collect());
                let dn = self.num.degree().unwrap_or(0) as i64;
                let dd = self.den.degree().unwrap_or(0) as i64;
                // z^s N(z)/D(z) = w^{-(s + dN - dD)} Ñ(w)/D̃(w), w = 1/z
                let shift = -(self.shift + dn - dd);
                Ok(series_of_quotient(&rev(&self.num), &rev(&self.den), shift, k, SeriesVar::InvZ))
            }
        }
    }

    /// Order of `z0` as a root of the denominator.
    pub fn pole_order(&self, z0: &BigRat) -> u32 {
        if z0.is_zero() {
            return self.shift.min(0).unsigned_abs() as u32;
        }
        let mut d = self.den.clone();
        let mut k = 0;
        loop {
            let (q, rem) = synthetic_div(&d, z0);
            if !rem.is_zero() || d.degree().unwrap_or(0) == 0 {
                return k;
            }
            d = q;
            k += 1;
        }
    }

    /// Standard residue at a nonzero point; zero where `f` is regular.
    pub fn residue(&self, z0: &BigRat) -> Result<BigRat> {
        if z0.is_zero() {
            return Err(WsError::PoleAtZero);
        }
        let (q, rem) = synthetic_div(&self.den, z0);
        if !rem.is_zero() {
            return Ok(BigRat::zero());
        }
        let qz = q.eval(z0);
        if qz.is_zero() {
            return Err(WsError::HigherOrderPole {
                order: self.pole_order(z0),
                point: fmt_rat(z0),
            });
        }
        Ok(pow_i(z0, self.shift) * self.num.eval(z0) / qz)
    }

    /// `lim_{z→z0} (1 - z/z0) f(z) = -Res(f, z0)/z0`: the coefficient of
    /// `δ(z/z0)` in the inside-minus-outside expansion.
    pub fn delta_coefficient(&self, z0: &BigRat) -> Result<BigRat> {
        Ok(-self.residue(z0)? / z0)
    }

    /// Factor the denominator over the candidate points. Any remaining
    /// non-constant factor is an undeclared pole.
    pub fn factor_denominator(&self, candidates: &[BigRat]) -> Result<Vec<(BigRat, u32)>> {
        let mut d = self.den.clone();
        let mut out = Vec::new();
        for z0 in candidates {
            let mut k = 0;
            loop {
                if d.degree().unwrap_or(0) == 0 {
                    break;
                }
                let (q, rem) = synthetic_div(&d, z0);
                if !rem.is_zero() {
                    break;
                }
                d = q;
                k += 1;
            }
            if k > 0 {
                out.push((z0.clone(), k));
            }
        }
        if d.degree().unwrap_or(0) > 0 {
            return Err(WsError::UndeclaredPole(format!(
                "denominator factor of degree {} not among the candidates",
                d.degree().unwrap()
            )));
        }
        Ok(out)
    }
}

/// `u^shift · n(u)/d(u)` expanded in `u` through exponent `k`.
fn series_of_quotient(n: &Poly, d: &Poly, shift: i64, k: i64, var: SeriesVar) -> TruncSeries {
    let len = (k - shift + 1).max(0) as usize;
    let dc = d.coeffs();
    let d0inv = dc[0].recip();
    let nc = n.coeffs();
    let mut out: Vec<BigRat> = Vec::with_capacity(len);
    for i in 0..len {
        let mut acc = nc.get(i).cloned().unwrap_or_else(BigRat::zero);
        for j in 1..dc.len().min(i + 1) {
            if !dc[j].is_zero() {
                acc -= &dc[j] * &out[i - j];
            }
        }
        out.push(acc * &d0inv);
    }
    TruncSeries::new(var, shift, out, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat, EvalPoint, XExponent};

    #[test]
    fn geometric_outside() {
        let f = RationalFn::from_factors(int(1), 0, &[(int(1), -1)]);
        let s = f.expand(Domain::Outside, 5).unwrap();
        assert_eq!(s.var, SeriesVar::InvZ);
        assert_eq!(s.coeff(0), Some(int(0)));
        for n in 1..=5 {
            assert_eq!(s.coeff(n), Some(int(-1)));
        }
    }

    #[test]
    fn constant_expands_to_itself() {
        let s = RationalFn::constant(int(1)).expand(Domain::Inside, 4).unwrap();
        assert_eq!(s, TruncSeries::constant(SeriesVar::Z, int(1), 4));
    }

    #[test]
    fn simple_residue() {
        // 1/(z - 2) = -1/2 · 1/(1 - z/2)
        let f = RationalFn::from_factors(rat(-1, 2), 0, &[(rat(1, 2), -1)]);
        assert_eq!(f.residue(&int(2)).unwrap(), int(1));
        assert_eq!(f.residue(&int(3)).unwrap(), int(0));
    }

    #[test]
    fn double_pole_is_an_error() {
        let f = RationalFn::from_factors(int(1), 0, &[(rat(1, 2), -2)]);
        assert!(matches!(f.residue(&int(2)), Err(WsError::HigherOrderPole { order: 2, .. })));
    }

    #[test]
    fn inside_expansion_of_locality_kernel() {
        // (u - 1/p)/(u - 1/q) inside has constant term q/p
        let (p, q) = (rat(1, 3), rat(1, 5));
        let num = Poly::new(vec![-p.recip(), int(1)]);
        let den = Poly::new(vec![-q.recip(), int(1)]);
        let f = RationalFn::new(num, den, 0).unwrap();
        let s = f.expand(Domain::Inside, 3).unwrap();
        assert_eq!(s.coeff(0).unwrap(), &q / &p);
    }

    #[test]
    fn delta_one_residue_at_x() {
        // Δ_1(z) has delta coefficient c = [r][r-1](x - 1/x) at z = x, so
        // the standard residue there is -x·c.
        let pt = EvalPoint::new(rat(2, 3), 3, 2).unwrap();
        let xr = |e: XExponent| pt.xpow(&e).unwrap();
        let f = RationalFn::from_factors(
            int(1),
            0,
            &[
                (xr(XExponent::new(-1, 2, 0)), 1),
                (xr(XExponent::new(1, -2, 0)), 1),
                (xr(XExponent::int(1)), -1),
                (xr(XExponent::int(-1)), -1),
            ],
        );
        let c = pt.bracket(&XExponent::lin(0, 1)).unwrap()
            * pt.bracket(&XExponent::lin(-1, 1)).unwrap()
            * pt.x_minus_inv();
        let x = pt.x();
        assert_eq!(f.delta_coefficient(&x).unwrap(), c.clone());
        assert_eq!(f.residue(&x).unwrap(), -(&x * &c));
    }

    #[test]
    fn factor_over_candidates() {
        let f = RationalFn::from_factors(int(1), 0, &[(rat(1, 2), -1), (rat(1, 3), -1)]);
        let got = f.factor_denominator(&[int(2), int(3), int(5)]).unwrap();
        assert_eq!(got, vec![(int(2), 1), (int(3), 1)]);
        assert!(matches!(f.factor_denominator(&[int(2)]), Err(WsError::UndeclaredPole(_))));
    }
}
