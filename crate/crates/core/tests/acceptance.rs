//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! terminal. Exits nonzero if any criterion fails. Pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 7 9`.

use std::time::{Duration, Instant};
use wsuper::exactnum::{rat, EvalPoint, XExponent};
use wsuper::exec::Exec;
use wsuper::fockoracle::{build_space, check_contraction_recovery, check_heisenberg, oracle_check_base_quadratic};
use wsuper::freefield::{
    build_params, check_determinants, check_mutual_locality, check_screening_relations, check_symmetry,
    check_t1_screening, check_vertex_commutation, Mutation, ParamTable,
};
use wsuper::qpoisson::{limit_suite, vanishing_column, DEFAULT_BETAS, LIMIT_TOLERANCE};
use wsuper::relcheck::{check_diagram_independence, check_exchange, check_quadratic, RelOptions};
use wsuper::report::CheckReport;
use wsuper::superdynkin::{check_d_invariance, enumerate_systems, extend_from_fermionic_set, standard_diagram, LabelRule};
use wsuper::wcurrents::{check_appendix_data, check_fusion_identities};

/// The ranks of criteria 1 to 6.
const RANKS: [(usize, usize); 6] = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1)];
/// Series order and largest mode.
const K: i64 = 24;
/// Largest total degree `i + j` of the monomial data.
const CAP: u32 = 4;
/// Relative tolerance of the classical limit (criterion 9).
const POISSON_TOL: f64 = 1e-6;
/// `q^{1/2}` of the classical-limit check.
const SQRT_Q: (i64, i64) = (3, 2);
/// Fock cutoff degree and mode window (criterion 8).
const ORACLE_DEGREE: u32 = 3;
const ORACLE_WINDOW: u32 = 3;

const RULE: LabelRule = LabelRule::EpsilonEdges;

struct Outcome {
    passed: bool,
    detail: String,
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

/// Every enumerated system of each rank at each default point.
fn tables(ranks: &[(usize, usize)]) -> Vec<ParamTable> {
    let mut out = Vec::new();
    for &(m, n) in ranks {
        for d in enumerate_systems(m, n).expect("rank") {
            for pt in EvalPoint::defaults() {
                out.push(build_params(&d, None, RULE, &pt).expect("table"));
            }
        }
    }
    out
}

fn standard(m: usize, n: usize, pt: &EvalPoint) -> ParamTable {
    build_params(&standard_diagram(m, n).unwrap(), None, RULE, pt).unwrap()
}

/// Merge reports, counting identities and collecting failures.
fn fold(reports: impl IntoIterator<Item = CheckReport>) -> Outcome {
    let mut all = CheckReport::new("all", "");
    let mut n = 0;
    for r in reports {
        n += 1;
        all.merge(r);
    }
    Outcome {
        passed: all.passed,
        detail: format!("{n} reports, {} identities, {} failed{}", all.checked, all.failed, first_failure(&all.failures)),
    }
}

fn first_failure(f: &[String]) -> String {
    f.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn c1_diagram_invariance() -> Outcome {
    let mut bad = Vec::new();
    let mut systems = 0;
    for (m, n) in RANKS {
        let rep = check_d_invariance(m, n, RULE).expect("rank");
        systems += rep.systems;
        let want = XExponent::lin(m as i64 - n as i64, n as i64 + 1);
        if !rep.passed() || rep.common != Some(want) {
            bad.push(format!("A({m},{n}): common {:?}, mismatch {:?}, expected {want}", rep.common, rep.mismatch));
        }
    }
    Outcome { passed: bad.is_empty(), detail: format!("{systems} systems over 6 ranks{}", first_failure(&bad)) }
}

fn c2_parameter_consistency() -> Outcome {
    let t = tables(&RANKS);
    let reps = Exec::default().map(&t, |tbl| {
        [check_mutual_locality(tbl, K), check_t1_screening(tbl, K), check_symmetry(tbl, K), check_screening_relations(tbl, K)]
    });
    fold(reps.into_iter().flatten())
}

fn c3_pair_contractions() -> Outcome {
    let t = tables(&RANKS);
    fold(Exec::default().map(&t, |tbl| check_vertex_commutation(tbl, K)))
}

fn c4_determinants() -> Outcome {
    let ranks: Vec<(usize, usize)> = (1..=3usize).flat_map(|s| (0..=s).map(move |m| (m, s - m))).collect();
    let mut t = tables(&ranks);
    // every fermionic set on L ≤ 4 nodes, with or without a root system behind it
    for l in 1..=4usize {
        for mask in 0..(1u32 << l) {
            let j: Vec<usize> = (1..=l).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let mat = extend_from_fermionic_set(l, &j).expect("fermionic set");
            for pt in EvalPoint::defaults() {
                t.push(ParamTable::new(mat.clone(), pt));
            }
        }
    }
    fold(Exec::default().map(&t, |tbl| check_determinants(tbl, K)))
}

fn c5_fusion_identities() -> Outcome {
    let mut items: Vec<(XExponent, EvalPoint)> = Vec::new();
    for (m, n) in RANKS {
        for pt in EvalPoint::defaults() {
            let key = (standard(m, n, &pt).a(), pt);
            if !items.contains(&key) {
                items.push(key);
            }
        }
    }
    fold(Exec::default().map(&items, |(a, pt)| check_fusion_identities(*a, pt, CAP as i64, K)))
}

fn c6_appendix_data() -> Outcome {
    let t = tables(&RANKS);
    fold(Exec::default().map(&t, |tbl| {
        check_appendix_data(tbl, CAP).unwrap_or_else(|e| {
            let mut r = CheckReport::new("appendix_data", tbl.pt.to_string());
            r.fail(e.to_string());
            r
        })
    }))
}

fn c7_quadratic_relations() -> Outcome {
    let opts = RelOptions::default();
    let full = [(1, 1), (1, 2), (2, 2), (1, 3)];
    let plan = [((1, 0), &full[..]), ((0, 1), &full[..]), ((1, 1), &full[..]), ((2, 1), &full[..2])];
    let mut bad = Vec::new();
    let (mut runs, mut rows) = (0, 0);
    for ((m, n), rels) in plan {
        for pt in EvalPoint::defaults() {
            let tbl = standard(m, n, &pt);
            for &(i, j) in rels {
                let r = check_quadratic(&tbl, i, j, &opts).expect("relation");
                runs += 1;
                rows += r.ledger.len();
                if !r.passed {
                    bad.push(format!("A({m},{n}) ({i},{j}) {pt}: {:?}", r.failures.first()));
                }
            }
        }
    }
    let mut systems = 0;
    for (m, n) in [(1, 0), (1, 1)] {
        for pt in EvalPoint::defaults() {
            let rep = check_diagram_independence(m, n, &full, &pt, RULE, &opts).expect("independence");
            systems += rep.systems.len();
            if !rep.passed {
                let why = rep.systems.iter().find(|s| !s.passed).map(|s| s.edges.clone());
                bad.push(format!("independence A({m},{n}) {pt}: common a {}, failing system {why:?}", rep.common_a));
            }
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!("{runs} relation checks, {rows} ledger rows, {systems} system runs{}", first_failure(&bad)),
    }
}

fn c8_fock_oracle() -> Outcome {
    let mut reps = Vec::new();
    let mut compared = 0;
    for pt in EvalPoint::defaults() {
        let tbl = standard(1, 0, &pt);
        let space = build_space(tbl.l(), ORACLE_DEGREE);
        for r in [
            check_heisenberg(&tbl, &space),
            check_contraction_recovery(&tbl, &space),
            oracle_check_base_quadratic(&tbl, 1, ORACLE_DEGREE, ORACLE_WINDOW, Exec::default()),
        ] {
            let r = r.expect("oracle");
            compared += r.compared;
            reps.push(r.check);
        }
    }
    let mut o = fold(reps);
    o.detail = format!("{compared} matrix elements; {}", o.detail);
    o
}

fn c9_classical_limit() -> Outcome {
    assert_eq!(POISSON_TOL, LIMIT_TOLERANCE, "tolerance drifted from the library constant");
    let s = rat(SQRT_Q.0, SQRT_Q.1);
    let mut bad = Vec::new();
    let (mut n, mut worst) = (0, 0f64);
    for (m, nn) in [(1, 0), (2, 1)] {
        if !vanishing_column(m, nn, 4, &s).expect("rank") {
            bad.push(format!("A({m},{nn}): C_(i,M+1) does not vanish"));
        }
        for r in limit_suite(m, nn, 2, 4, &s, &DEFAULT_BETAS, Exec::default()).expect("limit") {
            n += 1;
            worst = worst.max(r.error);
            if r.error.is_nan() || r.error >= POISSON_TOL {
                bad.push(format!("A({m},{nn}) ({},{}) m={}: error {:e}", r.i, r.j, r.m, r.error));
            }
        }
    }
    Outcome { passed: bad.is_empty(), detail: format!("{n} limits, worst error {worst:.2e}{}", first_failure(&bad)) }
}

/// Every check that reads the parameter tables, on one table.
fn battery(tbl: &ParamTable) -> Vec<(String, bool)> {
    let k = 8;
    let opts = RelOptions::default();
    let mut out: Vec<(String, bool)> = [
        check_mutual_locality(tbl, k),
        check_t1_screening(tbl, k),
        check_symmetry(tbl, k),
        check_screening_relations(tbl, k),
        check_vertex_commutation(tbl, k),
        check_determinants(tbl, k),
    ]
    .into_iter()
    .map(|r| (r.check, r.passed))
    .collect();
    for (i, j) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
        let ok = check_quadratic(tbl, i, j, &opts).is_ok_and(|r| r.passed);
        out.push((format!("quadratic ({i},{j})"), ok));
        let ok = check_exchange(tbl, i, j, &opts).is_ok_and(|r| r.passed);
        out.push((format!("exchange ({i},{j})"), ok));
    }
    out.push(("appendix_data".into(), check_appendix_data(tbl, CAP).is_ok_and(|r| r.passed)));
    out
}

/// A mutation counts as caught when the battery fails at some point, as a
/// suite run over the default points would. Points where it goes unseen are
/// listed: at `r = 2` every `d_n` with `n ≥ 2` vanishes on A(1,0) and the
/// `(1,1)` relation is homogeneous in `T_1`, so weight changes are invisible.
fn c10_falsifiability() -> Outcome {
    let mutations = [
        Mutation::Lambda { i: 1, j: 1, m: 1 },
        Mutation::QExponent { i: 2, j: 1 },
        Mutation::DWeight { n: 2 },
    ];
    let tables: Vec<ParamTable> = EvalPoint::defaults().iter().map(|pt| standard(1, 0, pt)).collect();
    let mut parts = Vec::new();
    let mut passed = true;
    for tbl in &tables {
        if let Some((name, _)) = battery(tbl).iter().find(|c| !c.1) {
            passed = false;
            parts.push(format!("unmutated table fails {name} at {}", tbl.pt));
        }
    }
    for m in mutations {
        let mut caught = std::collections::BTreeSet::new();
        let mut blind = Vec::new();
        for tbl in &tables {
            let fails: Vec<String> = battery(&tbl.mutated(m)).into_iter().filter(|c| !c.1).map(|c| c.0).collect();
            if fails.is_empty() {
                blind.push(tbl.pt.to_string());
            }
            caught.extend(fails);
        }
        passed &= !caught.is_empty();
        let by = if caught.is_empty() { "nothing".to_string() } else { caught.into_iter().collect::<Vec<_>>().join(", ") };
        let unseen = if blind.is_empty() { String::new() } else { format!(" (unseen at {})", blind.join(", ")) };
        parts.push(format!("{m:?} caught by {by}{unseen}"));
    }
    Outcome { passed, detail: parts.join("; ") }
}

type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "diagram invariance of D(0,L)", c1_diagram_invariance, secs(5)),
        (2, "parameter table consistency", c2_parameter_consistency, secs(60)),
        (3, "pair contractions and theta commutation", c3_pair_contractions, secs(60)),
        (4, "determinant formulas, L <= 4", c4_determinants, None),
        (5, "six fusion identities", c5_fusion_identities, None),
        (6, "fusion and exchange data vs residues", c6_appendix_data, None),
        (7, "quadratic relations and diagram independence", c7_quadratic_relations, secs(600)),
        (8, "Fock space oracle", c8_fock_oracle, None),
        (9, "q-Poisson constants and classical limit", c9_classical_limit, None),
        (10, "mutation falsifiability", c10_falsifiability, None),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let t = start.elapsed();
        let in_time = budget.is_none_or(|b| t <= b);
        let ok = o.passed && in_time;
        failed += usize::from(!ok);
        let budget_note = budget.map(|b| format!(" / {}s", b.as_secs())).unwrap_or_default();
        let late = if in_time { "" } else { " (over time budget)" };
        println!(
            "{} criterion {id:>2}: {name} [{:.2}s{budget_note}]{late}: {}",
            if ok { "PASS" } else { "FAIL" },
            t.as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
