//! Brute-force cross-check on a truncated Fock space.
//!
//! The Heisenberg modes act on the polynomial ring generated by the creation
//! modes `a_j(−m)`, truncated at total degree `d`. States are monomials, so
//! the basis is not orthonormal and no pairing is needed: `a_j(m)` with
//! `m > 0` acts as the derivation fixed by the commutator. Everything stays
//! in the zero-charge sector, where the zero-mode factor of each `Λ` is 1.
//!
//! Only matrix elements that truncation cannot reach are compared.

use crate::error::{Result, WsError};
use crate::exactnum::{int, BigRat};
use crate::exec::Exec;
use crate::freefield::{phi_lambda_pair, ParamTable};
use crate::relcheck::diagram_label;
use crate::report::CheckReport;
use crate::wcurrents::{c_rx, struct_fn, t_current, WMonomial};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A basis monomial: for each color, its creation modes in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState {
    pub parts: Vec<Vec<u32>>,
}

impl FockState {
    pub fn vacuum(l: usize) -> Self {
        FockState { parts: vec![Vec::new(); l] }
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().flatten().sum()
    }

    fn with(&self, color: usize, m: u32) -> Self {
        let mut s = self.clone();
        let p = &mut s.parts[color - 1];
        let at = p.iter().position(|&x| x < m).unwrap_or(p.len());
        p.insert(at, m);
        s
    }

    /// Drop one copy of mode `m` of `color`, returning its multiplicity.
    fn without(&self, color: usize, m: u32) -> Option<(Self, u32)> {
        let p = &self.parts[color - 1];
        let k = p.iter().filter(|&&x| x == m).count() as u32;
        if k == 0 {
            return None;
        }
        let mut s = self.clone();
        let at = s.parts[color - 1].iter().position(|&x| x == m).unwrap();
        s.parts[color - 1].remove(at);
        Some((s, k))
    }
}

/// The truncated basis.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub l: usize,
    pub cutoff: u32,
    pub states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl FockSpace {
    /// Same states in a caller-chosen order.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.states.len()];
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(WsError::InvalidInput("not a permutation of the basis".into()));
            }
        }
        if order.len() != seen.len() {
            return Err(WsError::InvalidInput("not a permutation of the basis".into()));
        }
        Ok(Self::from_states(self.l, self.cutoff, order.iter().map(|&i| self.states[i].clone()).collect()))
    }

    fn from_states(l: usize, cutoff: u32, states: Vec<FockState>) -> Self {
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        FockSpace { l, cutoff, states, index }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn position(&self, s: &FockState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn vacuum(&self) -> usize {
        self.index[&FockState::vacuum(self.l)]
    }
}

fn partitions(n: u32, max: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for k in (1..=n.min(max)).rev() {
        cur.push(k);
        partitions(n - k, k, out, cur);
        cur.pop();
    }
}

/// All colored partitions of total degree `≤ d`, by degree and then
/// lexicographically.
pub fn build_space(l: usize, d: u32) -> FockSpace {
    // partitions of each size, per color
    let parts: Vec<Vec<Vec<u32>>> = (0..=d)
        .map(|n| {
            let mut out = Vec::new();
            partitions(n, n, &mut out, &mut Vec::new());
            out
        })
        .collect();
    let mut states = Vec::new();
    for total in 0..=d {
        let mut acc = vec![FockState::vacuum(l)];
        for c in 0..l {
            let mut next = Vec::new();
            for s in &acc {
                let used = s.degree();
                let rest = if c + 1 == l { total - used } else { 0 };
                let sizes: Vec<u32> = if c + 1 == l { vec![rest] } else { (0..=total - used).collect() };
                for n in sizes {
                    for p in &parts[n as usize] {
                        let mut t = s.clone();
                        t.parts[c] = p.clone();
                        next.push(t);
                    }
                }
            }
            acc = next;
        }
        acc.sort();
        states.extend(acc);
    }
    FockSpace::from_states(l, d, states)
}

/// Dense matrix over the truncated basis; entry `[row][col]` is the
/// coefficient of basis state `row` in the image of `col`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeMatrix {
    pub entries: Vec<Vec<BigRat>>,
}

impl ModeMatrix {
    pub fn zero(n: usize) -> Self {
        ModeMatrix { entries: vec![vec![BigRat::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i][i] = BigRat::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRat {
        &self.entries[row][col]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.is_zero())
    }

    pub fn mul(&self, o: &ModeMatrix) -> ModeMatrix {
        let n = self.dim();
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, o: &ModeMatrix, c: &BigRat) {
        if c.is_zero() {
            return;
        }
        for (r, s) in self.entries.iter_mut().zip(&o.entries) {
            for (a, b) in r.iter_mut().zip(s) {
                if !b.is_zero() {
                    *a += c * b;
                }
            }
        }
    }

    pub fn commutator(&self, o: &ModeMatrix) -> ModeMatrix {
        let mut m = self.mul(o);
        m.add_scaled(&o.mul(self), &-BigRat::one());
        m
    }
}

/// `a_j(m)` on the truncated space, `m ≠ 0`.
pub fn heisenberg(tbl: &ParamTable, space: &FockSpace, j: usize, m: i64) -> Result<ModeMatrix> {
    if m == 0 || j < 1 || j > space.l {
        return Err(WsError::Precondition(format!("a_{j}({m}) is not a nonzero mode of the space")));
    }
    let mut out = ModeMatrix::zero(space.dim());
    let n = m.unsigned_abs() as u32;
    for (col, s) in space.states.iter().enumerate() {
        if m < 0 {
            if let Some(row) = space.position(&s.with(j, n)) {
                out.entries[row][col] = BigRat::one();
            }
            continue;
        }
        for c in 1..=space.l {
            if let Some((t, k)) = s.without(c, n) {
                let v = tbl.a_mode(j, c, m)? * int(k as i64) / int(m);
                out.entries[space.position(&t).unwrap()][col] += v;
            }
        }
    }
    Ok(out)
}

/// All modes `V[n]`, `|n| ≤ d`, of one normal-ordered vertex operator.
#[derive(Clone, Debug)]
pub struct VertexModes {
    pub cutoff: i64,
    mats: Vec<ModeMatrix>,
}

impl VertexModes {
    /// Coefficient of `z^{−n}`; zero on the truncated space once `|n| > d`.
    pub fn mode(&self, n: i64) -> Option<&ModeMatrix> {
        (n.abs() <= self.cutoff).then(|| &self.mats[(n + self.cutoff) as usize])
    }

    fn zero(space: &FockSpace) -> Self {
        let d = space.cutoff as i64;
        VertexModes { cutoff: d, mats: vec![ModeMatrix::zero(space.dim()); (2 * d + 1) as usize] }
    }

    fn add_scaled(&mut self, o: &VertexModes, c: &BigRat) {
        for (a, b) in self.mats.iter_mut().zip(&o.mats) {
            a.add_scaled(b, c);
        }
    }
}

/// Modes of `:exp(Σ_j Σ_{m≠0} μ_j(m) a_j(m) z^{−m}):`.
fn vertex_modes(
    tbl: &ParamTable,
    space: &FockSpace,
    mu: impl Fn(usize, i64) -> Result<BigRat>,
) -> Result<VertexModes> {
    let d = space.cutoff as i64;
    let n = space.dim();
    // exponentials of the creation and annihilation halves, by degree
    let mut halves = Vec::with_capacity(2);
    for sign in [-1i64, 1] {
        let mut x = vec![ModeMatrix::zero(n)];
        for m in 1..=d {
            let mut xm = ModeMatrix::zero(n);
            for j in 1..=space.l {
                xm.add_scaled(&heisenberg(tbl, space, j, sign * m)?, &mu(j, sign * m)?);
            }
            x.push(xm);
        }
        let mut p = vec![ModeMatrix::identity(n)];
        for a in 1..=d {
            let mut acc = ModeMatrix::zero(n);
            for m in 1..=a {
                acc.add_scaled(&x[m as usize].mul(&p[(a - m) as usize]), &int(m));
            }
            let mut pa = ModeMatrix::zero(n);
            pa.add_scaled(&acc, &BigRat::from_ints(1, a));
            p.push(pa);
        }
        halves.push(p);
    }
    let (create, annihilate) = (&halves[0], &halves[1]);
    let mut out = VertexModes::zero(space);
    for c in 0..=d {
        for a in 0..=d {
            let k = a - c;
            out.mats[(k + d) as usize].add_scaled(&create[c as usize].mul(&annihilate[a as usize]), &BigRat::one());
        }
    }
    Ok(out)
}

/// Modes of `:Π Λ_{c}(x^{e} z):` for the factors of a monomial.
pub fn monomial_modes(tbl: &ParamTable, space: &FockSpace, mono: &WMonomial) -> Result<VertexModes> {
    let factors = mono.factors();
    vertex_modes(tbl, space, |j, m| {
        let mut v = BigRat::zero();
        for (c, e) in &factors {
            v += tbl.lambda(*c, j, m)? * tbl.pt.xpow_int(-e * m);
        }
        Ok(v)
    })
}

/// Matrix of the `z^{−n}` coefficient of `Λ_k(z)` (mode part).
pub fn lambda_mode_matrix(tbl: &ParamTable, space: &FockSpace, k: usize, n: i64) -> Result<ModeMatrix> {
    if k < 1 || k > space.l + 1 {
        return Err(WsError::Precondition(format!("Λ_{k} does not exist for L = {}", space.l)));
    }
    let v = vertex_modes(tbl, space, |j, m| tbl.lambda(k, j, m))?;
    Ok(v.mode(n).cloned().unwrap_or_else(|| ModeMatrix::zero(space.dim())))
}

/// All modes of `T_i` on the truncated space.
pub fn current_modes(tbl: &ParamTable, space: &FockSpace, i: u32, exec: Exec) -> Result<VertexModes> {
    let t = t_current(tbl, i)?;
    let parts = exec.map(&t.terms, |(m, w)| monomial_modes(tbl, space, m).map(|v| (v, w.clone())));
    let mut out = VertexModes::zero(space);
    for p in parts {
        let (v, w) = p?;
        out.add_scaled(&v, &w);
    }
    Ok(out)
}

/// Outcome of one oracle run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub check: CheckReport,
    pub states: usize,
    /// Matrix elements compared.
    pub compared: usize,
}

fn context(tbl: &ParamTable, d: u32) -> String {
    format!("{} {} d={d}", diagram_label(&tbl.mat), tbl.pt)
}

/// `[a_i(m), a_j(n)] = δ_{m+n,0} A_{i,j}(m)/m` on states of degree
/// `≤ d − |m|` (the interior, where no creation is clipped).
pub fn check_heisenberg(tbl: &ParamTable, space: &FockSpace) -> Result<OracleReport> {
    let mut rep = CheckReport::new("heisenberg", context(tbl, space.cutoff));
    let d = space.cutoff as i64;
    let mut compared = 0;
    for i in 1..=space.l {
        for j in 1..=space.l {
            for m in 1..=d {
                let am = heisenberg(tbl, space, i, m)?;
                for n in 1..=d {
                    let br = am.commutator(&heisenberg(tbl, space, j, -n)?);
                    let want = if m == n { tbl.a_mode(i, j, m)? / int(m) } else { BigRat::zero() };
                    for (col, s) in space.states.iter().enumerate() {
                        if s.degree() as i64 + n > d {
                            continue;
                        }
                        for row in 0..space.dim() {
                            let w = if row == col { want.clone() } else { BigRat::zero() };
                            compared += 1;
                            rep.expect(*br.get(row, col) == w, || {
                                format!("[a_{i}({m}), a_{j}(-{n})] at state {col}, row {row}")
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(OracleReport { check: rep, states: space.dim(), compared })
}

/// `⟨vac|Λ_k[n] Λ_l[−n]|vac⟩` against the contraction series, `0 ≤ n ≤ d`.
pub fn check_contraction_recovery(tbl: &ParamTable, space: &FockSpace) -> Result<OracleReport> {
    let mut rep = CheckReport::new("contraction recovery", context(tbl, space.cutoff));
    let d = space.cutoff as i64;
    let vac = space.vacuum();
    let mut compared = 0;
    let lambdas: Vec<VertexModes> =
        (1..=space.l + 1).map(|k| vertex_modes(tbl, space, |j, m| tbl.lambda(k, j, m))).collect::<Result<_>>()?;
    for k in 1..=space.l + 1 {
        for l in 1..=space.l + 1 {
            let phi = phi_lambda_pair(tbl, k, l, d)?;
            let series = phi.series().ok_or_else(|| WsError::Precondition("contraction has no series form".into()))?;
            for n in 0..=d {
                let prod = lambdas[k - 1].mode(n).unwrap().mul(lambdas[l - 1].mode(-n).unwrap());
                let got = prod.get(vac, vac);
                let want = series.coeff(n).unwrap_or_else(BigRat::zero);
                compared += 1;
                rep.expect(*got == want, || format!("⟨Λ{k}[{n}] Λ{l}[{}]⟩ = {got}, series {want}", -n));
            }
        }
    }
    Ok(OracleReport { check: rep, states: space.dim(), compared })
}

/// Mode-by-mode check of the quadratic relation between `T_1` and `T_j`
/// (one term on the right, with `T_{j+1}`).
///
/// The coefficient of `z_1^{−n_1} z_2^{−n_2}` is compared for
/// `|n_1|, |n_2| ≤ window` on every basis pair whose intermediate degrees
/// stay within the cutoff.
pub fn oracle_check_base_quadratic(tbl: &ParamTable, j: u32, d: u32, window: u32, exec: Exec) -> Result<OracleReport> {
    if j < 1 {
        return Err(WsError::Precondition("j must be at least 1".into()));
    }
    if window > d {
        return Err(WsError::Precondition(format!("window {window} exceeds the cutoff {d}")));
    }
    let mut rep = CheckReport::new(format!("oracle quadratic (1,{j})"), context(tbl, d));
    let space = build_space(tbl.l(), d);
    let pt = &tbl.pt;
    let (dd, w, jj) = (d as i64, window as i64, j as i64);
    let t1 = current_modes(tbl, &space, 1, exec)?;
    let tj = if j == 1 { t1.clone() } else { current_modes(tbl, &space, j, exec)? };
    let tn = current_modes(tbl, &space, j + 1, exec)?;
    let f = struct_fn(1, j, tbl.a(), pt, 2 * dd + 1)?;
    let c = c_rx(pt)?;
    let zero = ModeMatrix::zero(space.dim());
    let mode = |v: &VertexModes, n: i64| v.mode(n).cloned().unwrap_or_else(|| zero.clone());
    let mut compared = 0;
    for n1 in -w..=w {
        for n2 in -w..=w {
            let mut lhs = ModeMatrix::zero(space.dim());
            for l in 0..=2 * dd {
                let fl = f.coeff(l).unwrap_or_else(BigRat::zero);
                lhs.add_scaled(&mode(&t1, n1 - l).mul(&mode(&tj, n2 + l)), &fl);
                lhs.add_scaled(&mode(&tj, n2 - l).mul(&mode(&t1, n1 + l)), &-fl);
            }
            let mut rhs = ModeMatrix::zero(space.dim());
            let coeff = &c * (pt.xpow_int(n2 - jj * n1) - pt.xpow_int(jj * n1 - n2));
            rhs.add_scaled(&mode(&tn, n1 + n2), &coeff);
            for (col, s) in space.states.iter().enumerate() {
                let deg = s.degree() as i64;
                let row_deg = deg - n1 - n2;
                if deg + 0.max(-n1).max(-n2) > dd || !(0..=dd).contains(&row_deg) {
                    continue;
                }
                for (row, t) in space.states.iter().enumerate() {
                    if t.degree() as i64 != row_deg {
                        continue;
                    }
                    compared += 1;
                    rep.expect(lhs.get(row, col) == rhs.get(row, col), || {
                        format!("modes ({n1},{n2}) element {row},{col}: {} vs {}", lhs.get(row, col), rhs.get(row, col))
                    });
                }
            }
        }
    }
    if compared == 0 {
        rep.fail("no safe matrix element in the window".into());
    }
    Ok(OracleReport { check: rep, states: space.dim(), compared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::EvalPoint;
    use crate::freefield::build_params;
    use crate::superdynkin::{standard_diagram, LabelRule};

    fn a10() -> ParamTable {
        let d = standard_diagram(1, 0).unwrap();
        build_params(&d, None, LabelRule::EpsilonEdges, &EvalPoint::defaults()[0]).unwrap()
    }

    #[test]
    fn space_sizes() {
        assert_eq!(build_space(1, 2).dim(), 4);
        assert_eq!(build_space(2, 1).dim(), 3);
        assert_eq!(build_space(3, 0).dim(), 1);
        assert_eq!(build_space(2, 3).dim(), 1 + 2 + 5 + 10);
        let s = build_space(1, 2);
        assert_eq!(s.states[3].parts, vec![vec![2]]);
    }

    #[test]
    fn vacuum_expectation_of_t1() {
        let tbl = a10();
        let space = build_space(tbl.l(), 2);
        let t1 = current_modes(&tbl, &space, 1, Exec::Sequential).unwrap();
        let v = space.vacuum();
        let g: BigRat = (1..=tbl.l() + 1).map(|i| tbl.g(i).unwrap()).sum();
        assert_eq!(*t1.mode(0).unwrap().get(v, v), g);
    }

    #[test]
    fn heisenberg_and_contractions() {
        let tbl = a10();
        let space = build_space(tbl.l(), 2);
        assert!(check_heisenberg(&tbl, &space).unwrap().check.passed);
        assert!(check_contraction_recovery(&tbl, &space).unwrap().check.passed);
    }

    #[test]
    fn window_guard() {
        assert!(matches!(
            oracle_check_base_quadratic(&a10(), 1, 2, 3, Exec::Sequential),
            Err(WsError::Precondition(_))
        ));
    }

    #[test]
    fn corrupted_tables_are_caught() {
        use crate::freefield::Mutation;
        let tbl = a10();
        let space = build_space(tbl.l(), 3);
        for m in [Mutation::Lambda { i: 1, j: 1, m: 1 }, Mutation::QExponent { i: 2, j: 1 }, Mutation::DWeight { n: 2 }] {
            let bad = tbl.mutated(m);
            let ok = check_contraction_recovery(&bad, &space).unwrap().check.passed
                && oracle_check_base_quadratic(&bad, 1, 3, 3, Exec::Sequential).unwrap().check.passed;
            assert!(!ok, "{m:?} not caught");
        }
    }
}
