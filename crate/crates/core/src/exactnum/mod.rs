//! Exact arithmetic kernels.
//!
//! Everything numeric in the crate is a [`BigRat`]. Powers of `x` are kept
//! symbolic as [`XExponent`]s on the lattice `a + b·r + c/r` and only become
//! numbers once bound to an [`EvalPoint`], where `x = t^{pq}` with `r = p/q`
//! makes `x`, `x^r` and `x^{1/r}` all rational.

mod bigrat;
mod eval;
mod ratfn;
mod rfunc;
mod series;
mod xexp;

pub use bigrat::BigRat;
pub use eval::{rat_string, EvalPoint};
pub use ratfn::{Domain, RationalFn};
pub use rfunc::{Poly, RFunction};
pub use series::{SeriesVar, TruncSeries};
pub use xexp::XExponent;

use num_traits::One;

/// Small-integer rational used for exponent components.
pub type Rat64 = num_rational::Rational64;

/// `n/d` as a [`BigRat`].
pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::from_ints(n, d)
}

/// The integer `n` as a [`BigRat`].
pub fn int(n: i64) -> BigRat {
    BigRat::from(n)
}

/// `b^e` for any integer `e`; `b` must be nonzero when `e < 0`.
pub fn pow_i(b: &BigRat, e: i64) -> BigRat {
    if e == 0 {
        return BigRat::one();
    }
    b.pow(i32::try_from(e).expect("exponent fits in i32"))
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_rat(q: &BigRat) -> String {
    q.to_string()
}

/// Parse `n` or `n/d`.
pub fn parse_rat(s: &str) -> Option<BigRat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => BigRat::from_strs(n.trim(), d.trim()),
        None => BigRat::from_strs(s, "1"),
    }
}

/// `x^e` at an evaluation point.
pub fn xpow_eval(e: &XExponent, pt: &EvalPoint) -> crate::Result<BigRat> {
    pt.xpow(e)
}

/// Exponential of a series with strictly positive support.
pub fn series_exp(s: &TruncSeries) -> crate::Result<TruncSeries> {
    s.exp()
}

/// Logarithm of a series with constant term one.
pub fn series_log(s: &TruncSeries) -> crate::Result<TruncSeries> {
    s.log()
}

/// Laurent expansion of `f` in the chosen domain through order `k`.
pub fn rf_expand(f: &RationalFn, domain: Domain, k: i64) -> crate::Result<TruncSeries> {
    f.expand(domain, k)
}

/// Standard residue of `f` at a nonzero simple pole.
pub fn rf_residue(f: &RationalFn, z0: &BigRat) -> crate::Result<BigRat> {
    f.residue(z0)
}

/// Lossy conversion for display and for the floating-point limit check.
pub fn to_f64(q: &BigRat) -> f64 {
    q.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(pow_i(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow_i(&rat(2, 3), 0), int(1));
        assert_eq!(pow_i(&rat(-1, 2), 3), rat(-1, 8));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/9", "0"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
        assert!(parse_rat("1/0").is_none());
    }
}
