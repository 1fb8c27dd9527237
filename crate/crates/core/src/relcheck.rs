//! End-to-end checks of the relations among the currents `T_i`: exchange,
//! fusion and the quadratic relations.
//!
//! Every check works monomial pair by monomial pair on the exact pair
//! kernels. The delta terms of a kernel sit at its poles; they are weighted
//! by the current coefficients and collected in a ledger keyed by the delta
//! point and the normal-ordered output symbol. A relation holds when each
//! ledger row balances. Single pair kernels may have poles outside the
//! declared set; only the weighted sum per row has to vanish there.

use crate::error::{Result, WsError};
use crate::exactnum::{rat_string, BigRat, Domain, XExponent};
use crate::exec::Exec;
use crate::freefield::ParamTable;
use crate::superdynkin::{enumerate_systems, extend_matrix, EdgeClass, ExtendedMatrix, LabelRule};
use crate::wcurrents::{
    c_rx, declared_poles, delta_chain, exchange_with_lambda, fuse_monomials, kernel_delta_terms, pair_kernel,
    pair_kernel_series, t_current, DeltaKind, FusionSign, LinProd, OpSymbol, WMonomial,
};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Upper bound on stored failure messages per report.
const MAX_FAILURES: usize = 32;

/// Knobs shared by the relation checks.
#[derive(Clone, Copy, Debug)]
pub struct RelOptions {
    /// Largest total degree `i + j` allowed.
    pub cap: u32,
    /// Order of the series cross-check of each pair kernel; 0 skips it.
    pub series_order: i64,
    pub exec: Exec,
}

impl Default for RelOptions {
    fn default() -> Self {
        RelOptions { cap: 4, series_order: 0, exec: Exec::default() }
    }
}

/// One balanced row: the weighted delta coefficients of the left side
/// against the prediction of the right side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    /// The delta sits at `z_2/z_1 = x^{point}`.
    pub point: i64,
    pub kind: DeltaKind,
    /// Output operator relative to `z_1`.
    pub output: String,
    #[serde(with = "rat_string")]
    pub lhs: BigRat,
    #[serde(with = "rat_string")]
    pub rhs: BigRat,
    pub matched: bool,
}

/// Per-pair outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStatus {
    pub a: String,
    pub b: String,
    /// Poles of the pair kernel, as exponents of `x`.
    pub poles: Vec<i64>,
    /// Poles outside the declared set; these must cancel across pairs.
    pub extra_poles: Vec<i64>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Result of one relation check at one diagram and evaluation point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub i: u32,
    pub j: u32,
    pub context: String,
    pub pairs: Vec<PairStatus>,
    pub ledger: Vec<LedgerRow>,
    pub passed: bool,
    /// Number of individual identities compared.
    pub checked: usize,
    pub failures: Vec<String>,
    /// Wall time; left out of serialized output so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RelationReport {
    fn new(relation: &str, i: u32, j: u32, tbl: &ParamTable) -> Self {
        RelationReport {
            relation: relation.into(),
            i,
            j,
            context: format!("{} {}", diagram_label(&tbl.mat), tbl.pt),
            pairs: Vec::new(),
            ledger: Vec::new(),
            passed: true,
            checked: 0,
            failures: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn fail(&mut self, msg: String) {
        self.passed = false;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg);
        }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        for r in &self.ledger {
            self.checked += 1;
            if !r.matched {
                self.passed = false;
                if self.failures.len() < MAX_FAILURES {
                    self.failures.push(format!(
                        "ledger x^{} {} {}: lhs {} rhs {}",
                        r.point, r.kind, r.output, r.lhs, r.rhs
                    ));
                }
            }
        }
        self.passed &= self.pairs.iter().all(|p| p.ok);
        self.elapsed = start.elapsed();
        self
    }

    /// Number of unmatched ledger rows.
    pub fn unmatched(&self) -> usize {
        self.ledger.iter().filter(|r| !r.matched).count()
    }
}

/// Edge classes as a `+`/`−` word, e.g. `++-`.
pub fn diagram_label(mat: &ExtendedMatrix) -> String {
    (1..=mat.l + 1)
        .map(|j| match mat.edge(j) {
            EdgeClass::Plus => '+',
            EdgeClass::Minus => '-',
        })
        .collect()
}

type Key = (i64, DeltaKind, OpSymbol);

/// Weighted delta coefficients of all pairs `T_i × T_j`, keyed by point and
/// output symbol, plus the per-pair status.
fn lhs_ledger(tbl: &ParamTable, i: u32, j: u32, opts: &RelOptions) -> Result<(BTreeMap<Key, BigRat>, Vec<PairStatus>)> {
    let ti = t_current(tbl, i)?;
    let tj = t_current(tbl, j)?;
    let pairs: Vec<(&(WMonomial, BigRat), &(WMonomial, BigRat))> =
        ti.terms.iter().flat_map(|a| tj.terms.iter().map(move |b| (a, b))).collect();
    let per_pair = opts.exec.map(&pairs, |((a, wa), (b, wb))| -> Result<(PairStatus, Vec<(Key, BigRat)>)> {
        let pk = pair_kernel(&tbl.mat, a, b)?;
        let mut st = PairStatus {
            a: a.to_string(),
            b: b.to_string(),
            poles: pk.poles().into_iter().map(|(e, _)| e).collect(),
            extra_poles: pk.extra_poles(),
            ok: true,
            note: None,
        };
        if opts.series_order > 0 {
            let k = opts.series_order;
            let s = pair_kernel_series(tbl, a, b, k)?;
            let e = pk.kernel.to_ratfn(&tbl.pt)?.expand(Domain::Inside, k)?;
            if !s.agrees_with(&e) {
                st.ok = false;
                st.note = Some(format!("series disagrees with the kernel at order {:?}", s.first_mismatch(&e)));
            }
        }
        let w = wa * wb;
        let terms = kernel_delta_terms(&pk, a, b, &tbl.pt)?
            .into_iter()
            .map(|t| ((t.point, t.kind, t.output), &w * &t.coefficient))
            .collect();
        Ok((st, terms))
    });
    let mut map: BTreeMap<Key, BigRat> = BTreeMap::new();
    let mut status = Vec::with_capacity(per_pair.len());
    for r in per_pair {
        let (st, terms) = r?;
        status.push(st);
        for (k, v) in terms {
            *map.entry(k).or_insert_with(BigRat::zero) += v;
        }
    }
    Ok((map, status))
}

fn row(point: i64, kind: DeltaKind, output: &OpSymbol, lhs: BigRat, rhs: BigRat) -> LedgerRow {
    LedgerRow { point, kind, output: output.to_string(), matched: lhs == rhs, lhs, rhs }
}

/// Check `i ≤ j` against the cap.
fn degrees_ok(i: u32, j: u32, cap: u32) -> Result<()> {
    if i < 1 || i > j {
        return Err(WsError::Precondition(format!("need 1 <= i <= j, got ({i},{j})")));
    }
    if i + j > cap {
        return Err(WsError::Precondition(format!("i + j = {} exceeds the cap {cap}", i + j)));
    }
    Ok(())
}

/// Exchange of `T_i` and `T_j`: each pair kernel equals the swapped kernel
/// under `z → 1/z`, and after weighting no delta term survives off the
/// declared points.
pub fn check_exchange(tbl: &ParamTable, i: u32, j: u32, opts: &RelOptions) -> Result<RelationReport> {
    degrees_ok(i, j, opts.cap)?;
    let start = Instant::now();
    let mut rep = RelationReport::new("exchange", i, j, tbl);
    let ti = t_current(tbl, i)?;
    let tj = t_current(tbl, j)?;
    for (a, _) in &ti.terms {
        for (b, _) in &tj.terms {
            let ab = pair_kernel(&tbl.mat, a, b)?;
            let ba = pair_kernel(&tbl.mat, b, a)?;
            rep.expect(ab.kernel == ba.kernel.invert_var(), || format!("kernel of {a},{b} is not the swapped kernel"));
        }
    }
    let (map, status) = lhs_ledger(tbl, i, j, opts)?;
    rep.pairs = status;
    if opts.series_order > 0 && i != j {
        // the outside expansion is the swapped order's inside expansion
        let (_, swapped) = lhs_ledger(tbl, j, i, opts)?;
        rep.pairs.extend(swapped);
    }
    let declared = declared_poles(i as i64, j as i64);
    for ((p, kind, s), v) in &map {
        if !declared.contains(p) {
            rep.ledger.push(row(*p, *kind, s, v.clone(), BigRat::zero()));
        }
    }
    Ok(rep.finish(start))
}

/// `T_{i+j}`-symbol of a monomial placed at `x^{shift} z_1`.
fn placed(m: &WMonomial, shift: i64) -> OpSymbol {
    OpSymbol::new(m.factors().into_iter().map(|(c, e)| (c, e + shift)).collect())
}

/// Fusion of `T_i` and `T_j` in both limits `z_1 → x^{±(i+j)} z_2`: the
/// weighted limits reproduce `∓c(r,x) ΠΔ_1 · T_{i+j}`, and each pair's
/// limit equals the closed-form fusion.
pub fn check_fusion(tbl: &ParamTable, i: u32, j: u32, opts: &RelOptions) -> Result<RelationReport> {
    if i < 1 || j < 1 || i + j > opts.cap {
        return Err(WsError::Precondition(format!("fusion needs i, j >= 1 and i + j <= {}", opts.cap)));
    }
    let start = Instant::now();
    let mut rep = RelationReport::new("fusion", i, j, tbl);
    let pt = &tbl.pt;
    let ti = t_current(tbl, i)?;
    let tj = t_current(tbl, j)?;
    let tij = t_current(tbl, i + j)?;
    let (ii, jj) = (i as i64, j as i64);
    let base = c_rx(pt)? * delta_chain(pt, ii.min(jj))?;
    for sign in [FusionSign::Plus, FusionSign::Minus] {
        let s = sign.sign();
        let point = -s * (ii + jj);
        let mut lhs: BTreeMap<OpSymbol, BigRat> = BTreeMap::new();
        for (a, wa) in &ti.terms {
            for (b, wb) in &tj.terms {
                let pk = pair_kernel(&tbl.mat, a, b)?;
                let limit = pk.kernel.delta_coefficient(pt, XExponent::int(point))?;
                let closed = fuse_monomials(&tbl.mat, a, b, sign, pt)?;
                let want = closed.as_ref().map(|(c, _)| c.clone()).unwrap_or_else(BigRat::zero);
                rep.expect(limit == want, || format!("fusion {a},{b} sign {s}: limit {limit} vs closed form {want}"));
                if let Some((_, m)) = &closed {
                    rep.expect(placed(m, -s * jj) == OpSymbol::product(a, 0, b, point), || {
                        format!("fused symbol of {a},{b} sign {s}")
                    });
                }
                if !limit.is_zero() {
                    *lhs.entry(OpSymbol::product(a, 0, b, point)).or_insert_with(BigRat::zero) += wa * wb * limit;
                }
            }
        }
        let pref = -int_sign(s) * &base;
        let mut rhs: BTreeMap<OpSymbol, BigRat> = BTreeMap::new();
        for (m, w) in &tij.terms {
            *rhs.entry(placed(m, -s * jj)).or_insert_with(BigRat::zero) += &pref * w;
        }
        merge_rows(&mut rep, point, &lhs, &rhs);
    }
    Ok(rep.finish(start))
}

fn int_sign(s: i64) -> BigRat {
    if s < 0 {
        -BigRat::one()
    } else {
        BigRat::one()
    }
}

fn merge_rows(rep: &mut RelationReport, point: i64, lhs: &BTreeMap<OpSymbol, BigRat>, rhs: &BTreeMap<OpSymbol, BigRat>) {
    let mut keys: Vec<&OpSymbol> = lhs.keys().chain(rhs.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let l = lhs.get(k).cloned().unwrap_or_else(BigRat::zero);
        let r = rhs.get(k).cloned().unwrap_or_else(BigRat::zero);
        rep.ledger.push(row(point, DeltaKind::Delta, k, l, r));
    }
}

/// Add `coefficient · G(z'_0) · :A'(w_1) B'(w_2):` to the right-hand side,
/// `z'_0 = x^{at}` being the fixed ratio `w_2/w_1` on the delta support and
/// `B'` sitting at `x^{b_shift} z_1`. A simple pole of a single kernel at
/// `z'_0` leaves its regular part plus `−residue · D` of `B'`'s factors; the
/// residues themselves must cancel row by row, which is recorded in `poles`.
#[allow(clippy::too_many_arguments)]
fn add_rhs_term(
    tbl: &ParamTable,
    rhs: &mut BTreeMap<Key, BigRat>,
    poles: &mut BTreeMap<(i64, OpSymbol), BigRat>,
    point: i64,
    symbol: OpSymbol,
    b: &WMonomial,
    b_shift: i64,
    kernel: &LinProd,
    at: i64,
    coefficient: &BigRat,
) -> Result<()> {
    let d = kernel.pole_data(&tbl.pt, XExponent::int(at))?;
    let mut add = |k: Key, v: BigRat| *rhs.entry(k).or_insert_with(BigRat::zero) += v;
    match d.order {
        ..=0 => add((point, DeltaKind::Delta, symbol), coefficient * &d.h),
        1 => {
            add((point, DeltaKind::Delta, symbol.clone()), -(coefficient * &d.h * &d.dlog));
            let res = coefficient * &d.h;
            for (color, x) in b.factors() {
                add((point, DeltaKind::DerivFactor { color, exponent: x + b_shift }, symbol.clone()), -res.clone());
            }
            *poles.entry((point, symbol)).or_insert_with(BigRat::zero) += res;
        }
        n => {
            return Err(WsError::HigherOrderPole { order: n as u32, point: format!("x^{at} in a right-hand kernel") })
        }
    }
    Ok(())
}

/// The quadratic relation between `T_i` and `T_j`, `1 ≤ i ≤ j`: the
/// weighted delta terms of all pair kernels against the sum over `k` of
/// the `T_{i−k} T_{j+k}` terms. For `i = 1` the ledger is also compared
/// with the closed-form exchange of each `Λ_l` with `T_j`.
pub fn check_quadratic(tbl: &ParamTable, i: u32, j: u32, opts: &RelOptions) -> Result<RelationReport> {
    degrees_ok(i, j, opts.cap)?;
    let start = Instant::now();
    let mut rep = RelationReport::new("quadratic", i, j, tbl);
    let pt = &tbl.pt;
    let (lhs, status) = lhs_ledger(tbl, i, j, opts)?;
    rep.pairs = status;
    let (ii, jj) = (i as i64, j as i64);
    let c = c_rx(pt)?;
    let mut rhs: BTreeMap<Key, BigRat> = BTreeMap::new();
    let mut poles: BTreeMap<(i64, OpSymbol), BigRat> = BTreeMap::new();
    for k in 1..=ii {
        let pref = &c * &delta_chain(pt, k)?;
        let lo = t_current(tbl, (ii - k) as u32)?;
        let hi = t_current(tbl, (jj + k) as u32)?;
        let up = jj - ii + 2 * k;
        for (a, wa) in &lo.terms {
            for (b, wb) in &hi.terms {
                let kernel = pair_kernel(&tbl.mat, a, b)?.kernel;
                let w = wa * wb * &pref;
                let sym = OpSymbol::product(a, k, b, up - k);
                add_rhs_term(tbl, &mut rhs, &mut poles, up, sym, b, up - k, &kernel, jj - ii, &w)?;
                let sym = OpSymbol::product(a, -k, b, -up + k);
                add_rhs_term(tbl, &mut rhs, &mut poles, -up, sym, b, -up + k, &kernel, ii - jj, &-w)?;
            }
        }
    }
    for ((p, sym), v) in &poles {
        rep.expect(v.is_zero(), || format!("right-hand product singular at x^{p} {sym}: residue {v}"));
    }
    let mut keys: Vec<&Key> = lhs.keys().chain(rhs.keys()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let l = lhs.get(key).cloned().unwrap_or_else(BigRat::zero);
        let r = rhs.get(key).cloned().unwrap_or_else(BigRat::zero);
        rep.ledger.push(row(key.0, key.1, &key.2, l, r));
    }
    if i == 1 {
        let closed = base_case_ledger(tbl, j)?;
        let nonzero = |m: &BTreeMap<Key, BigRat>| -> Vec<(Key, BigRat)> {
            m.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        rep.expect(nonzero(&lhs) == nonzero(&closed), || {
            format!("ledger of ({i},{j}) differs from the closed-form exchange of Λ_l with T_{j}")
        });
    }
    Ok(rep.finish(start))
}

/// `Σ_l Σ_B g_l w_B` times the closed-form exchange terms of `Λ_l` with
/// the monomials `B` of `T_j`, keyed like the quadratic ledger.
pub fn base_case_ledger(tbl: &ParamTable, j: u32) -> Result<BTreeMap<Key, BigRat>> {
    let t1 = t_current(tbl, 1)?;
    let tj = t_current(tbl, j)?;
    let mut out: BTreeMap<Key, BigRat> = BTreeMap::new();
    for (lam, wl) in &t1.terms {
        let l = lam.support_min().expect("degree one");
        for (b, wb) in &tj.terms {
            for t in exchange_with_lambda(&tbl.mat, l, b, &tbl.pt)? {
                *out.entry((t.point, t.kind, t.output)).or_insert_with(BigRat::zero) += wl * wb * t.coefficient;
            }
        }
    }
    Ok(out)
}

/// One fundamental system in a diagram-independence run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOutcome {
    pub system: String,
    pub edges: String,
    pub a: String,
    pub reports: Vec<RelationReport>,
    pub passed: bool,
}

/// Quadratic relations across every fundamental system of `A(M,N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub m: usize,
    pub n: usize,
    pub point: String,
    pub systems: Vec<SystemOutcome>,
    /// Whether `a` and hence every structure function agrees across systems.
    pub common_a: bool,
    pub passed: bool,
}

/// Run [`check_quadratic`] for each `(i, j)` on every fundamental system.
pub fn check_diagram_independence(
    m: usize,
    n: usize,
    relations: &[(u32, u32)],
    pt: &crate::exactnum::EvalPoint,
    rule: LabelRule,
    opts: &RelOptions,
) -> Result<IndependenceReport> {
    let systems = enumerate_systems(m, n)?;
    let mut out = Vec::with_capacity(systems.len());
    let mut first_a: Option<XExponent> = None;
    let mut common_a = true;
    for d in &systems {
        let mat = extend_matrix(d, None, rule)?;
        let a = mat.a();
        match first_a {
            None => first_a = Some(a),
            Some(f) => common_a &= f == a,
        }
        let tbl = ParamTable::new(mat, pt.clone());
        let mut reports = Vec::with_capacity(relations.len());
        for &(i, j) in relations {
            reports.push(check_quadratic(&tbl, i, j, opts)?);
        }
        let passed = reports.iter().all(|r| r.passed);
        out.push(SystemOutcome {
            system: d.type_word()?,
            edges: diagram_label(&tbl.mat),
            a: a.to_string(),
            reports,
            passed,
        });
    }
    let passed = common_a && out.iter().all(|s| s.passed);
    Ok(IndependenceReport { m, n, point: pt.to_string(), systems: out, common_a, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::EvalPoint;
    use crate::superdynkin::standard_diagram;

    fn table(m: usize, n: usize, p: usize) -> ParamTable {
        let d = standard_diagram(m, n).unwrap();
        let pt = EvalPoint::defaults()[p].clone();
        crate::freefield::build_params(&d, None, LabelRule::EpsilonEdges, &pt).unwrap()
    }

    #[test]
    fn a10_one_one_quadratic() {
        let t = table(1, 0, 0);
        let r = check_quadratic(&t, 1, 1, &RelOptions::default()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        let pts: Vec<i64> = r.ledger.iter().filter(|row| !row.rhs.is_zero()).map(|row| row.point).collect();
        assert!(pts.contains(&2) && pts.contains(&-2));
    }

    #[test]
    fn a10_exchange_and_fusion() {
        let t = table(1, 0, 1);
        let o = RelOptions { series_order: 6, ..RelOptions::default() };
        let r = check_exchange(&t, 1, 1, &o).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        let f = check_fusion(&t, 1, 1, &o).unwrap();
        assert!(f.passed, "{:?}", f.failures);
    }

    #[test]
    fn degree_preconditions() {
        let t = table(1, 0, 0);
        assert!(check_quadratic(&t, 2, 1, &RelOptions::default()).is_err());
        assert!(check_quadratic(&t, 2, 3, &RelOptions::default()).is_err());
    }
}
