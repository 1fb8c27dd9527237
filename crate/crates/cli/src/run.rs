//! Suite execution. Suites run in a fixed order (diagram, parameters,
//! relations, oracle, classical limit); the work inside a suite is spread
//! over the worker pool and collected in input order, so the report does not
//! depend on scheduling.

use crate::config::{DiagramSel, RunConfig, Suite};
use crate::report::{DataTable, ResultRecord, SuiteOutcome, SuiteReport};
use std::time::Instant;
use wsuper::exactnum::{EvalPoint, XExponent};
use wsuper::fockoracle::{build_space, check_contraction_recovery, check_heisenberg, oracle_check_base_quadratic};
use wsuper::freefield::{
    build_params, check_determinants, check_mutual_locality, check_screening_relations, check_symmetry,
    check_t1_screening, check_vertex_commutation, ParamTable,
};
use wsuper::qpoisson::{limit_suite, poisson_data, vanishing_column, DEFAULT_BETAS};
use wsuper::relcheck::{check_exchange, check_fusion, check_quadratic, diagram_label, RelOptions};
use wsuper::superdynkin::{check_d_invariance, enumerate_systems, extend_matrix, standard_diagram, SuperDiagram, D};
use wsuper::wcurrents::{check_appendix_data, check_fusion_identities, t_current};

/// One fundamental system at one point.
pub struct Context {
    pub system: String,
    pub point: String,
    pub table: ParamTable,
}

/// The systems picked by the selector, in enumeration order.
pub fn select_systems(c: &RunConfig) -> Result<Vec<SuperDiagram>, String> {
    let err = |e: wsuper::WsError| e.to_string();
    match c.diagrams {
        DiagramSel::Standard => Ok(vec![standard_diagram(c.m, c.n).map_err(err)?]),
        DiagramSel::All => enumerate_systems(c.m, c.n).map_err(err),
        DiagramSel::Index(k) => {
            let all = enumerate_systems(c.m, c.n).map_err(err)?;
            let n = all.len();
            all.into_iter().nth(k).map(|d| vec![d]).ok_or_else(|| format!("diagram index {k} out of range (0..{n})"))
        }
    }
}

fn system_name(d: &SuperDiagram, c: &RunConfig) -> String {
    let word = d.type_word().unwrap_or_else(|_| d.to_string());
    match extend_matrix(d, None, c.rule) {
        Ok(m) => format!("{word} {}", diagram_label(&m)),
        Err(_) => word,
    }
}

/// Parameter tables for every selected system and point.
pub fn contexts(c: &RunConfig) -> Result<Vec<Context>, String> {
    let mut out = Vec::new();
    for d in select_systems(c)? {
        let system = system_name(&d, c);
        for pt in &c.points {
            let table = build_params(&d, None, c.rule, pt).map_err(|e| e.to_string())?;
            out.push(Context { system: system.clone(), point: pt.to_string(), table });
        }
    }
    Ok(out)
}

fn per_context<F>(c: &RunConfig, ctxs: &[Context], f: F) -> Vec<ResultRecord>
where
    F: Fn(&Context) -> Vec<ResultRecord> + Sync + Send,
{
    c.exec.map(ctxs, f).into_iter().flatten().collect()
}

fn rel_opts(c: &RunConfig) -> RelOptions {
    RelOptions { cap: c.cap, series_order: 0, exec: c.exec }
}

fn diagram_suite(c: &RunConfig) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    match check_d_invariance(c.m, c.n, c.rule) {
        Ok(rep) => out.push(ResultRecord::single("D(0,L) invariance", "all", "symbolic", rep.passed(), || {
            format!("{} systems; mismatch {:?}", rep.systems, rep.mismatch)
        })),
        Err(e) => out.push(ResultRecord::error("D(0,L) invariance", "all", "symbolic", e)),
    }
    let want = XExponent::lin(c.m as i64 - c.n as i64, c.n as i64 + 1);
    match standard_diagram(c.m, c.n).and_then(|d| D(&d, 0, c.m + c.n + 1, c.rule)) {
        Ok(got) => out.push(ResultRecord::single("D(0,L) standard value", "standard", "symbolic", got == want, || {
            format!("D(0,L) = {got}, expected {want}")
        })),
        Err(e) => out.push(ResultRecord::error("D(0,L) standard value", "standard", "symbolic", e)),
    }
    match select_systems(c) {
        Ok(systems) => {
            for d in systems {
                let name = system_name(&d, c);
                let v = d.validate();
                out.push(ResultRecord::single("system validity", &name, "symbolic", v.is_ok(), || format!("{v:?}")));
            }
        }
        Err(e) => out.push(ResultRecord::error("system validity", "selection", "symbolic", e)),
    }
    out
}

fn relation_suite(c: &RunConfig, ctxs: &[Context], suite: Suite) -> Vec<ResultRecord> {
    let rels = c.relation_list();
    let opts = rel_opts(c);
    let mut out = Vec::new();
    if suite == Suite::Fusion {
        // The six identities depend only on `a` and the point.
        let mut seen: Vec<(XExponent, EvalPoint)> = Vec::new();
        for ctx in ctxs {
            let key = (ctx.table.a(), ctx.table.pt.clone());
            if !seen.contains(&key) {
                let rep = check_fusion_identities(key.0, &key.1, c.cap as i64, c.k);
                out.push(ResultRecord::from_check(&format!("a = {}", key.0), &ctx.point, rep));
                seen.push(key);
            }
        }
    }
    out.extend(per_context(c, ctxs, |ctx| {
        let mut recs = Vec::new();
        for &(i, j) in &rels {
            let r = match suite {
                Suite::Fusion => check_fusion(&ctx.table, i, j, &opts),
                Suite::Exchange => check_exchange(&ctx.table, i, j, &opts),
                _ => check_quadratic(&ctx.table, i, j, &opts),
            };
            recs.push(match r {
                Ok(r) => ResultRecord::from_relation(&ctx.system, &ctx.point, r),
                Err(e) => ResultRecord::error(&format!("{} ({i},{j})", suite.name()), &ctx.system, &ctx.point, e),
            });
        }
        if suite == Suite::Exchange {
            recs.push(match check_appendix_data(&ctx.table, c.cap) {
                Ok(r) => ResultRecord::from_check(&ctx.system, &ctx.point, r),
                Err(e) => ResultRecord::error("appendix_data", &ctx.system, &ctx.point, e),
            });
        }
        recs
    }));
    if suite == Suite::Quadratic {
        let mut systems: Vec<(&str, XExponent)> = ctxs.iter().map(|x| (x.system.as_str(), x.table.a())).collect();
        systems.dedup();
        if systems.len() > 1 {
            let first = systems[0].1;
            let odd = systems.iter().find(|s| s.1 != first);
            out.push(ResultRecord::single("common structure functions", "all", "symbolic", odd.is_none(), || {
                format!("a = {first} on {}, but {} on {}", systems[0].0, odd.unwrap().1, odd.unwrap().0)
            }));
        }
    }
    out
}

fn oracle_suite(c: &RunConfig, ctxs: &[Context]) -> Vec<ResultRecord> {
    per_context(c, ctxs, |ctx| {
        let mut recs = Vec::new();
        let space = build_space(ctx.table.l(), c.oracle_degree);
        let ctx_err = |what: &str, e| ResultRecord::error(what, &ctx.system, &ctx.point, e);
        recs.push(match check_heisenberg(&ctx.table, &space) {
            Ok(r) => ResultRecord::from_check(&ctx.system, &ctx.point, r.check),
            Err(e) => ctx_err("oracle heisenberg", e),
        });
        recs.push(match check_contraction_recovery(&ctx.table, &space) {
            Ok(r) => ResultRecord::from_check(&ctx.system, &ctx.point, r.check),
            Err(e) => ctx_err("oracle contractions", e),
        });
        for &j in &c.oracle_relations {
            recs.push(match oracle_check_base_quadratic(&ctx.table, j, c.oracle_degree, c.oracle_window, c.exec) {
                Ok(r) => ResultRecord::from_check(&ctx.system, &ctx.point, r.check),
                Err(e) => ctx_err("oracle quadratic", e),
            });
        }
        recs
    })
}

fn poisson_suite(c: &RunConfig) -> Vec<ResultRecord> {
    let s = &c.poisson_sqrt_q;
    let q = s.pow(2).to_string();
    let mut out = Vec::new();
    let col = c.m as u32 + 1;
    match vanishing_column(c.m, c.n, c.poisson_modes, s) {
        Ok(ok) => out.push(ResultRecord::single(&format!("C(i,{col}) = 0"), "all", &format!("q = {q}"), ok, || {
            "a coefficient is nonzero".into()
        })),
        Err(e) => out.push(ResultRecord::error("vanishing column", "all", &q, e)),
    }
    match limit_suite(c.m, c.n, c.poisson_max_ij, c.poisson_modes, s, &DEFAULT_BETAS, c.exec) {
        Ok(reps) => {
            for r in reps {
                out.push(ResultRecord::single(
                    &format!("limit ({},{}) m={}", r.i, r.j, r.m),
                    "all",
                    &format!("q = {q}"),
                    r.passed,
                    || format!("extrapolated {:e}, target {:e}, error {:e}", r.extrapolated, r.target, r.error),
                ));
            }
        }
        Err(e) => out.push(ResultRecord::error("classical limit", "all", &q, e)),
    }
    out
}

fn check_records(c: &RunConfig, ctxs: &[Context], f: fn(&ParamTable, i64) -> wsuper::report::CheckReport) -> Vec<ResultRecord> {
    per_context(c, ctxs, |ctx| vec![ResultRecord::from_check(&ctx.system, &ctx.point, f(&ctx.table, c.k))])
}

/// Run one suite.
pub fn run_suite(c: &RunConfig, ctxs: &[Context], suite: Suite) -> SuiteOutcome {
    if suite == Suite::Poisson && c.m < c.n {
        return SuiteOutcome::skip(suite.name(), format!("the classical limit is set up for M >= N; run A({},{}) instead", c.n, c.m));
    }
    let start = Instant::now();
    let results = match suite {
        Suite::Diagram => diagram_suite(c),
        Suite::Params => per_context(c, ctxs, |ctx| {
            [check_symmetry(&ctx.table, c.k), check_screening_relations(&ctx.table, c.k), check_determinants(&ctx.table, c.k)]
                .into_iter()
                .map(|r| ResultRecord::from_check(&ctx.system, &ctx.point, r))
                .collect()
        }),
        Suite::Locality => check_records(c, ctxs, check_mutual_locality),
        Suite::Screening => check_records(c, ctxs, check_t1_screening),
        Suite::Vertex => check_records(c, ctxs, check_vertex_commutation),
        Suite::Fusion | Suite::Exchange | Suite::Quadratic => relation_suite(c, ctxs, suite),
        Suite::Oracle => oracle_suite(c, ctxs),
        Suite::Poisson => poisson_suite(c),
    };
    SuiteOutcome::new(suite.name(), results, start.elapsed())
}

/// Validate the configuration and run every requested suite.
pub fn run(config: &RunConfig) -> Result<SuiteReport, String> {
    run_with_tables(config, Vec::new())
}

/// [`run`], with display tables attached to the report.
pub fn run_with_tables(config: &RunConfig, tables: Vec<DataTable>) -> Result<SuiteReport, String> {
    let mut c = config.clone();
    c.materialize_random_points();
    c.validate()?;
    c.suites = c.ordered_suites();
    let suites = c.suites.clone();
    let needs_tables = suites.iter().any(|s| !matches!(s, Suite::Diagram | Suite::Poisson));
    let ctxs = if needs_tables { contexts(&c)? } else { Vec::new() };
    let outcomes = suites.iter().map(|&s| run_suite(&c, &ctxs, s)).collect();
    Ok(SuiteReport::new(c, outcomes, tables))
}

/// Every reachable system with its edge word, `Ĵ` and `D(0, L)`.
pub fn diagram_table(c: &RunConfig) -> Result<DataTable, String> {
    let columns = ["index", "roots", "parity", "edges", "fermionic", "D(0,L)"].map(String::from).to_vec();
    let all = enumerate_systems(c.m, c.n).map_err(|e| e.to_string())?;
    let chosen = select_systems(c)?;
    let mut rows = Vec::new();
    for (k, d) in all.iter().enumerate() {
        if !chosen.contains(d) {
            continue;
        }
        let mat = extend_matrix(d, None, c.rule).map_err(|e| e.to_string())?;
        let fermionic: Vec<String> = (1..=mat.l).filter(|&j| mat.is_fermionic(j)).map(|j| j.to_string()).collect();
        let text = d.to_string();
        let (roots, parity) = match (text.find('['), text.rfind(']')) {
            (Some(a), Some(b)) => (text[a + 1..b].to_string(), text[b + 1..].trim().to_string()),
            _ => (text.clone(), String::new()),
        };
        rows.push(vec![k.to_string(), roots, parity, diagram_label(&mat), fermionic.join(" "), mat.a().to_string()]);
    }
    Ok(DataTable { title: format!("fundamental systems of A({},{})", c.m, c.n), columns, rows })
}

/// Parameter rows per system and point, with `λ` modes `±1..=modes`.
pub fn params_tables(c: &RunConfig, modes: i64) -> Result<Vec<DataTable>, String> {
    let mut out = Vec::new();
    for ctx in contexts(c)? {
        let rows = ctx.table.rows(modes).map_err(|e| e.to_string())?;
        let mut columns = ["i", "j", "q", "p", "lambda(0)/log x"].map(String::from).to_vec();
        columns.extend((1..=modes).flat_map(|m| [format!("lambda({m})"), format!("lambda({})", -m)]));
        let show = |e: Option<XExponent>| e.map_or_else(|| "-".into(), |e| e.to_string());
        let rows = rows
            .into_iter()
            .map(|r| {
                let mut v = vec![r.i.to_string(), r.j.to_string(), show(r.q), show(r.p), r.lambda0_over_log_x];
                v.extend(r.lambda.into_iter().map(|(_, x)| x));
                v
            })
            .collect();
        out.push(DataTable { title: format!("parameters [{}] {}", ctx.system, ctx.point), columns, rows });
    }
    Ok(out)
}

/// Weighted monomials of `T_i` for `1 ≤ i ≤ max_degree`.
pub fn current_tables(c: &RunConfig, max_degree: u32) -> Result<Vec<DataTable>, String> {
    let mut out = Vec::new();
    for ctx in contexts(c)? {
        let mut rows = Vec::new();
        for i in 1..=max_degree {
            let t = t_current(&ctx.table, i).map_err(|e| e.to_string())?;
            for (m, w) in t.terms {
                rows.push(vec![i.to_string(), m.to_string(), w.to_string()]);
            }
        }
        let columns = ["degree", "monomial", "weight"].map(String::from).to_vec();
        out.push(DataTable { title: format!("currents [{}] {}", ctx.system, ctx.point), columns, rows });
    }
    Ok(out)
}

/// Coefficients of `C_{i,j}(z)` for `i, j ≤ poisson_max_ij`.
pub fn poisson_table(c: &RunConfig) -> Result<DataTable, String> {
    let mut columns = vec!["i".to_string(), "j".to_string()];
    columns.extend((1..=c.poisson_modes).map(|m| format!("C({m})")));
    let mut rows = Vec::new();
    for i in 1..=c.poisson_max_ij {
        for j in 1..=c.poisson_max_ij {
            let d = poisson_data(c.m, c.n, i, j, &c.poisson_sqrt_q, c.poisson_modes).map_err(|e| e.to_string())?;
            let mut row = vec![i.to_string(), j.to_string()];
            row.extend((1..=c.poisson_modes).map(|m| d.coeffs[&m].clone()));
            rows.push(row);
        }
    }
    let title = format!("q-Poisson constants of A({},{}) at q = {}", c.m, c.n, c.poisson_sqrt_q.pow(2));
    Ok(DataTable { title, columns, rows })
}
