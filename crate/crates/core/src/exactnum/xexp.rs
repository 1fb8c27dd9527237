//! Exponents of `x` on the lattice `c0 + cr·r + cinv/r`.

use super::{Rat64, RFunction};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// An exponent `c0 + cr·r + cinv/r` of `x`. Ordering is lexicographic on
/// `(c0, cr, cinv)` and only serves as a map key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct XExponent {
    pub c0: Rat64,
    pub cr: Rat64,
    pub cinv: Rat64,
}

impl XExponent {
    pub const ZERO: XExponent = XExponent {
        c0: Rat64::new_raw(0, 1),
        cr: Rat64::new_raw(0, 1),
        cinv: Rat64::new_raw(0, 1),
    };

    /// Integer components.
    pub fn new(c0: i64, cr: i64, cinv: i64) -> Self {
        XExponent {
            c0: Rat64::from_integer(c0),
            cr: Rat64::from_integer(cr),
            cinv: Rat64::from_integer(cinv),
        }
    }

    pub fn from_rats(c0: Rat64, cr: Rat64, cinv: Rat64) -> Self {
        XExponent { c0, cr, cinv }
    }

    /// The plain integer exponent `n`.
    pub fn int(n: i64) -> Self {
        Self::new(n, 0, 0)
    }

    /// `a + b·r`.
    pub fn lin(a: i64, b: i64) -> Self {
        Self::new(a, b, 0)
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// Floating value at a real `r`.
    pub fn value_at(&self, r: f64) -> f64 {
        let f = |q: Rat64| *q.numer() as f64 / *q.denom() as f64;
        f(self.c0) + f(self.cr) * r + f(self.cinv) / r
    }

    /// Integer value if the exponent has no `r` or `1/r` part.
    pub fn as_int(&self) -> Option<i64> {
        if self.cr == Rat64::from_integer(0)
            && self.cinv == Rat64::from_integer(0)
            && self.c0.is_integer()
        {
            Some(self.c0.to_integer())
        } else {
            None
        }
    }

    /// Scale every component by an integer.
    pub fn scale(&self, k: i64) -> Self {
        let k = Rat64::from_integer(k);
        XExponent {
            c0: self.c0 * k,
            cr: self.cr * k,
            cinv: self.cinv * k,
        }
    }

    /// Multiply by the formal symbol `r`. Returns `None` when `cr ≠ 0`,
    /// since `r²` is off the lattice.
    pub fn times_r(&self) -> Option<Self> {
        if self.cr != Rat64::from_integer(0) {
            return None;
        }
        Some(XExponent {
            c0: self.cinv,
            cr: self.c0,
            cinv: Rat64::from_integer(0),
        })
    }

    /// Product of two exponents when it stays on the lattice.
    pub fn mul_exp(&self, o: &XExponent) -> Option<XExponent> {
        let z = Rat64::from_integer(0);
        if (self.cr != z && o.cr != z) || (self.cinv != z && o.cinv != z) {
            return None;
        }
        Some(XExponent {
            c0: self.c0 * o.c0 + self.cr * o.cinv + self.cinv * o.cr,
            cr: self.c0 * o.cr + self.cr * o.c0,
            cinv: self.c0 * o.cinv + self.cinv * o.c0,
        })
    }

    /// Read an element of `Q(r)` back as a lattice point, if it is one.
    pub fn from_rfunction(f: &RFunction) -> Option<XExponent> {
        use num_traits::Zero;
        let to64 = |q: &super::BigRat| -> Option<Rat64> {
            let (n, d) = q.to_i64_parts()?;
            Some(Rat64::new(n, d))
        };
        let den = f.den().coeffs();
        let num = f.num().coeffs();
        let get = |k: usize| num.get(k).cloned().unwrap_or_else(super::BigRat::zero);
        match den.len() {
            1 if num.len() <= 2 => Some(XExponent { c0: to64(&get(0))?, cr: to64(&get(1))?, cinv: Rat64::from_integer(0) }),
            2 if den[0].is_zero() && num.len() <= 3 => {
                Some(XExponent { cinv: to64(&get(0))?, c0: to64(&get(1))?, cr: to64(&get(2))? })
            }
            _ => None,
        }
    }

    /// Lift into the rational-function field `Q(r)`.
    pub fn to_rfunction(&self) -> RFunction {
        RFunction::from_lattice(self.c0, self.cr, self.cinv)
    }
}

impl Add for XExponent {
    type Output = XExponent;
    fn add(self, o: XExponent) -> XExponent {
        XExponent {
            c0: self.c0 + o.c0,
            cr: self.cr + o.cr,
            cinv: self.cinv + o.cinv,
        }
    }
}

impl AddAssign for XExponent {
    fn add_assign(&mut self, o: XExponent) {
        *self = *self + o;
    }
}

impl Sub for XExponent {
    type Output = XExponent;
    fn sub(self, o: XExponent) -> XExponent {
        self + (-o)
    }
}

impl SubAssign for XExponent {
    fn sub_assign(&mut self, o: XExponent) {
        *self = *self - o;
    }
}

impl Neg for XExponent {
    type Output = XExponent;
    fn neg(self) -> XExponent {
        XExponent {
            c0: -self.c0,
            cr: -self.cr,
            cinv: -self.cinv,
        }
    }
}

impl Mul<i64> for XExponent {
    type Output = XExponent;
    fn mul(self, k: i64) -> XExponent {
        self.scale(k)
    }
}

fn fmt_r64(q: Rat64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for XExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = Rat64::from_integer(0);
        let mut parts = Vec::new();
        if self.c0 != z {
            parts.push(fmt_r64(self.c0));
        }
        if self.cr != z {
            parts.push(format!("{}r", fmt_coef(self.cr)));
        }
        if self.cinv != z {
            parts.push(format!("{}/r", fmt_r64(self.cinv)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

fn fmt_coef(q: Rat64) -> String {
    if q == Rat64::from_integer(1) {
        String::new()
    } else if q == Rat64::from_integer(-1) {
        "-".into()
    } else if q.is_integer() {
        fmt_r64(q)
    } else {
        format!("({})", fmt_r64(q))
    }
}

/// Serialized as the triple `[c0, cr, cinv]` of strings such as `"3/2"`.
impl Serialize for XExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_r64(self.c0), fmt_r64(self.cr), fmt_r64(self.cinv)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for XExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: [String; 3] = Deserialize::deserialize(d)?;
        let parse = |s: &str| -> std::result::Result<Rat64, D::Error> {
            s.parse::<Rat64>().map_err(serde::de::Error::custom)
        };
        Ok(XExponent {
            c0: parse(&v[0])?,
            cr: parse(&v[1])?,
            cinv: parse(&v[2])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn componentwise_arithmetic() {
        let a = XExponent::new(1, 2, 0);
        let b = XExponent::new(-1, 0, 2);
        assert_eq!(a + b, XExponent::new(0, 2, 2));
        assert_eq!(a - a, XExponent::ZERO);
        assert_eq!(a.scale(3), XExponent::new(3, 6, 0));
        assert_eq!(XExponent::int(4).as_int(), Some(4));
        assert_eq!(a.as_int(), None);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(XExponent::new(0, 2, 0).to_string(), "2r");
        assert_eq!(XExponent::new(-1, 0, 2).to_string(), "-1 + 2/r");
        assert_eq!(XExponent::ZERO.to_string(), "0");
    }

    #[test]
    fn lattice_round_trip_through_q_of_r() {
        for e in [XExponent::new(2, -1, 3), XExponent::int(5), XExponent::new(0, 0, -2), XExponent::ZERO] {
            assert_eq!(XExponent::from_rfunction(&e.to_rfunction()), Some(e));
        }
        let r2 = &RFunction::r() * &RFunction::r();
        assert_eq!(XExponent::from_rfunction(&r2), None);
        let a = XExponent::new(1, 2, 0);
        let b = XExponent::new(3, 0, -1);
        assert_eq!(a.mul_exp(&b), Some(XExponent::new(1, 6, -1)));
        assert_eq!(a.mul_exp(&a), None);
    }

    #[test]
    fn times_r_moves_components() {
        let e = XExponent::new(2, 0, -1);
        assert_eq!(e.times_r(), Some(XExponent::new(-1, 2, 0)));
        assert_eq!(XExponent::new(0, 1, 0).times_r(), None);
    }
}
