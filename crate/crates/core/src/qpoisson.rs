//! Classical limit: the q-Poisson structure constants `C_{i,j}(z)` and a
//! numerical check that the structure functions `f_{i,j}` tend to them.
//!
//! With `q = x^{2r}` fixed and `β = (r−1)/r → 0`, the `m`-th coefficient of
//! `(f_{i,j}(z) − f_{j,i}(1/z)) / (β log q)` tends to `(q − q^{−1}) C_{i,j,m}`.
//! Keeping `q` fixed forces `x = q^{1/(2r)}` off every exact lattice, so this
//! is the one floating-point check in the crate.

use crate::error::{Result, WsError};
use crate::exactnum::{rat_string, BigRat, XExponent};
use crate::exec::Exec;
use crate::wcurrents::f_bracket;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Relative tolerance of the extrapolated limit.
pub const LIMIT_TOLERANCE: f64 = 1e-6;

/// Default `β` sequence. Three-point extrapolation leaves an error of order
/// `β_1 β_2 β_3`; at this size it sits near `3·10⁻⁸` on the suite.
pub const DEFAULT_BETAS: [f64; 3] = [1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0];

/// A coarser sequence, too coarse for [`LIMIT_TOLERANCE`] on its own.
pub const COARSE_BETAS: [f64; 3] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];

fn check_rank(m: usize, n: usize) -> Result<()> {
    if m < n || m + n < 1 {
        return Err(WsError::Precondition(format!("need M >= N >= 0 and M + N >= 1, got ({m},{n})")));
    }
    Ok(())
}

/// `[k/2]_q = (q^{k/2} − q^{−k/2}) / (q − q^{−1})`, given `s = q^{1/2}`.
pub fn half_bracket(k: i64, s: &BigRat) -> Result<BigRat> {
    let den = s.pow(2) - s.pow(-2);
    if den.is_zero() || s.is_zero() {
        return Err(WsError::DivisionByZero(format!("q = {} is 0 or ±1", s.pow(2))));
    }
    Ok((s.pow(k as i32) - s.pow(-(k as i32))) / den)
}

/// Coefficient of `z^m` in `C_{i,j}(z)` for `A(M,N)`, with `s = q^{1/2}`.
pub fn c_coeff(m_rank: usize, i: u32, j: u32, m: i64, s: &BigRat) -> Result<BigRat> {
    if i < 1 || j < 1 {
        return Err(WsError::Precondition("i, j must be at least 1".into()));
    }
    if m == 0 {
        return Ok(BigRat::zero());
    }
    let (lo, hi) = (i.min(j) as i64, i.max(j) as i64);
    let mm = m_rank as i64 + 1;
    let den = half_bracket(mm * m, s)?;
    if den.is_zero() {
        return Err(WsError::DivisionByZero(format!("[(M+1)·{m}/2]_q vanishes")));
    }
    Ok(half_bracket(lo * m, s)? * half_bracket((hi - mm) * m, s)? / den)
}

/// Coefficients of one `C_{i,j}(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonData {
    pub m_rank: usize,
    pub n_rank: usize,
    pub i: u32,
    pub j: u32,
    #[serde(with = "rat_string")]
    pub q: BigRat,
    /// Mode `m` to the coefficient, as an exact fraction.
    pub coeffs: BTreeMap<i64, String>,
}

/// `C_{i,j}` coefficients for `|m| ≤ modes`.
pub fn poisson_data(m_rank: usize, n_rank: usize, i: u32, j: u32, s: &BigRat, modes: i64) -> Result<PoissonData> {
    check_rank(m_rank, n_rank)?;
    let mut coeffs = BTreeMap::new();
    for m in -modes..=modes {
        coeffs.insert(m, c_coeff(m_rank, i, j, m, s)?.to_string());
    }
    Ok(PoissonData { m_rank, n_rank, i, j, q: s.pow(2), coeffs })
}

/// Outcome of one extrapolated limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub m_rank: usize,
    pub n_rank: usize,
    pub i: u32,
    pub j: u32,
    pub m: i64,
    pub betas: Vec<f64>,
    /// The rescaled coefficient at each `β`.
    pub samples: Vec<f64>,
    pub extrapolated: f64,
    /// `(q − q^{−1}) C_{i,j,m}`.
    pub target: f64,
    /// Relative error, or absolute error when the target vanishes.
    pub error: f64,
    pub passed: bool,
}

/// Coefficients of `exp(Σ_{k≥1} ℓ_k z^k / k)` through `z^n`.
fn exp_of_logs(l: &[f64], n: usize) -> Vec<f64> {
    let mut f = vec![0.0; n + 1];
    f[0] = 1.0;
    for k in 1..=n {
        let s: f64 = (1..=k).map(|t| l[t - 1] * f[k - t]).sum();
        f[k] = s / k as f64;
    }
    f
}

/// Polynomial extrapolation of `(β_k, v_k)` to `β = 0` (Neville).
pub fn richardson(betas: &[f64], values: &[f64]) -> f64 {
    let mut p = values.to_vec();
    let n = p.len();
    for step in 1..n {
        for k in 0..n - step {
            let (b0, b1) = (betas[k], betas[k + step]);
            p[k] = (b0 * p[k + 1] - b1 * p[k]) / (b0 - b1);
        }
    }
    p[0]
}

/// The rescaled `m`-th coefficient at one `β`, with `q` held fixed.
pub fn rescaled_coefficient(m_rank: usize, n_rank: usize, i: u32, j: u32, m: i64, q: f64, beta: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let r = 1.0 / (1.0 - beta);
    let x = q.powf(1.0 / (2.0 * r));
    let a = XExponent::lin(m_rank as i64 - n_rank as i64, n_rank as i64 + 1);
    let bp = f_bracket(i, j, a);
    let n = m.unsigned_abs() as usize;
    let logs: Vec<f64> = (1..=n as i64).map(|k| bp.eval_f64(x, r, k)).collect();
    let f = exp_of_logs(&logs, n);
    m.signum() as f64 * f[n] / (beta * q.ln())
}

/// Compare the extrapolated limit of the rescaled coefficient with the
/// q-Poisson constant, for `q = s²`.
pub fn check_classical_limit(
    m_rank: usize,
    n_rank: usize,
    i: u32,
    j: u32,
    m: i64,
    s: &BigRat,
    betas: &[f64],
) -> Result<LimitReport> {
    check_rank(m_rank, n_rank)?;
    if betas.len() < 2 || betas.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
        return Err(WsError::Precondition("need at least two β values in (0, 1)".into()));
    }
    let q = s.pow(2);
    let qf = q.to_f64();
    let target = ((&q - q.recip()) * c_coeff(m_rank, i, j, m, s)?).to_f64();
    let samples: Vec<f64> = betas.iter().map(|&b| rescaled_coefficient(m_rank, n_rank, i, j, m, qf, b)).collect();
    let extrapolated = richardson(betas, &samples);
    let diff = (extrapolated - target).abs();
    let error = if target == 0.0 { diff } else { diff / target.abs() };
    Ok(LimitReport {
        m_rank,
        n_rank,
        i,
        j,
        m,
        betas: betas.to_vec(),
        samples,
        extrapolated,
        target,
        error,
        passed: error.is_finite() && error < LIMIT_TOLERANCE,
    })
}

/// Every `(i, j, m)` with `1 ≤ i, j ≤ max_ij` and `|m| ≤ modes`.
pub fn limit_suite(
    m_rank: usize,
    n_rank: usize,
    max_ij: u32,
    modes: i64,
    s: &BigRat,
    betas: &[f64],
    exec: Exec,
) -> Result<Vec<LimitReport>> {
    let mut triples = Vec::new();
    for i in 1..=max_ij {
        for j in 1..=max_ij {
            for m in -modes..=modes {
                triples.push((i, j, m));
            }
        }
    }
    exec.map(&triples, |&(i, j, m)| check_classical_limit(m_rank, n_rank, i, j, m, s, betas)).into_iter().collect()
}

/// `C_{i,M+1}` and `C_{M+1,i}` vanish for `1 ≤ i ≤ M+1` and `|m| ≤ modes`.
pub fn vanishing_column(m_rank: usize, n_rank: usize, modes: i64, s: &BigRat) -> Result<bool> {
    check_rank(m_rank, n_rank)?;
    let col = m_rank as u32 + 1;
    for i in 1..=col {
        for m in -modes..=modes {
            if !c_coeff(m_rank, i, col, m, s)?.is_zero() || !c_coeff(m_rank, col, i, m, s)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl PoissonData {
    /// Coefficient at `m` as an exact rational.
    pub fn coeff(&self, m: i64) -> Option<BigRat> {
        let s = self.coeffs.get(&m)?;
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        BigRat::from_strs(n, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn bracket_values() {
        let s = rat(3, 2);
        // [1]_q[−1]_q/[2]_q = −1/(q + q^{−1}) for M = 1, i = j = 1, m = 2
        let q = s.pow(2);
        assert_eq!(c_coeff(1, 1, 1, 2, &s).unwrap(), -(q.clone() + q.recip()).recip());
        assert!(c_coeff(1, 1, 1, 0, &s).unwrap().is_zero());
        assert!(half_bracket(2, &rat(1, 1)).is_err());
    }

    #[test]
    fn neville_is_exact_on_quadratics() {
        let b = [0.5, 0.25, 0.125];
        let v: Vec<f64> = b.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        assert!((richardson(&b, &v) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_one_limit_on_a10() {
        let r = check_classical_limit(1, 0, 1, 1, 1, &rat(3, 2), &DEFAULT_BETAS).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn remainder_is_cubic_in_beta() {
        let coarse = check_classical_limit(1, 0, 1, 1, 1, &rat(3, 2), &COARSE_BETAS).unwrap();
        let half: Vec<f64> = COARSE_BETAS.iter().map(|b| b / 2.0).collect();
        let finer = check_classical_limit(1, 0, 1, 1, 1, &rat(3, 2), &half).unwrap();
        assert!(!coarse.passed && coarse.error < 1e-4);
        let ratio = coarse.error / finer.error;
        assert!((7.0..9.0).contains(&ratio), "ratio {ratio}");
    }
}
