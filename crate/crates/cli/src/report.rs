//! The run report and its two renderings.

use crate::config::RunConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;
use wsuper::relcheck::{LedgerRow, RelationReport};
use wsuper::report::CheckReport;

/// Bumped whenever the structured layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

/// One check at one system and point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub relation: String,
    pub system: String,
    pub point: String,
    pub status: Status,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Balanced delta rows, for relation checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ledger: Vec<LedgerRow>,
}

impl ResultRecord {
    pub fn from_check(system: &str, point: &str, c: CheckReport) -> Self {
        ResultRecord {
            relation: c.check,
            system: system.into(),
            point: point.into(),
            status: Status::of(c.passed),
            checked: c.checked,
            failures: c.failures,
            ledger: Vec::new(),
        }
    }

    pub fn from_relation(system: &str, point: &str, r: RelationReport) -> Self {
        ResultRecord {
            relation: format!("{} ({},{})", r.relation, r.i, r.j),
            system: system.into(),
            point: point.into(),
            status: Status::of(r.passed),
            checked: r.checked,
            failures: r.failures,
            ledger: r.ledger,
        }
    }

    /// A single pass/fail fact.
    pub fn single(relation: &str, system: &str, point: &str, ok: bool, failure: impl FnOnce() -> String) -> Self {
        ResultRecord {
            relation: relation.into(),
            system: system.into(),
            point: point.into(),
            status: Status::of(ok),
            checked: 1,
            failures: if ok { Vec::new() } else { vec![failure()] },
            ledger: Vec::new(),
        }
    }

    /// A computation that errored before it could compare anything.
    pub fn error(relation: &str, system: &str, point: &str, e: impl std::fmt::Display) -> Self {
        Self::single(relation, system, point, false, || format!("error: {e}"))
    }
}

/// One suite's aggregate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub status: Status,
    pub checked: usize,
    /// Failed records.
    pub failed: usize,
    pub results: Vec<ResultRecord>,
    /// Why the suite did not apply to this configuration, if it did not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    /// Wall time; shown in text output only.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteOutcome {
    pub fn new(suite: &str, results: Vec<ResultRecord>, elapsed: Duration) -> Self {
        let failed = results.iter().filter(|r| !r.status.is_pass()).count();
        SuiteOutcome {
            suite: suite.into(),
            status: Status::of(failed == 0),
            checked: results.iter().map(|r| r.checked).sum(),
            failed,
            results,
            skipped: None,
            elapsed,
        }
    }

    /// A suite that does not apply; it counts as passed.
    pub fn skip(suite: &str, reason: String) -> Self {
        SuiteOutcome { skipped: Some(reason), ..SuiteOutcome::new(suite, Vec::new(), Duration::ZERO) }
    }
}

/// A display table, such as parameter rows or the terms of a current.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub status: Status,
    pub suites: Vec<SuiteOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<DataTable>,
}

impl SuiteReport {
    pub fn new(config: RunConfig, suites: Vec<SuiteOutcome>, tables: Vec<DataTable>) -> Self {
        let ok = suites.iter().all(|s| s.status.is_pass());
        SuiteReport { schema_version: SCHEMA_VERSION, config, status: Status::of(ok), suites, tables }
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    /// Process exit code: 0 iff every suite passed.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_structured(r: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_structured(s: &str) -> serde_json::Result<SuiteReport> {
    serde_json::from_str(s)
}

fn table(out: &mut String, columns: &[String], rows: &[Vec<String>]) {
    let mut width: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for r in rows {
        for (k, cell) in r.iter().enumerate() {
            if k < width.len() {
                width[k] = width[k].max(cell.chars().count());
            }
        }
    }
    let line = |out: &mut String, cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&width).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        let _ = writeln!(out, "  {}", padded.join("  ").trim_end());
    };
    line(out, columns);
    for r in rows {
        line(out, r);
    }
}

/// Human-readable rendering.
pub fn to_text(r: &SuiteReport) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "A({},{})  diagrams: {}  K={}  cap={}", c.m, c.n, c.diagrams, c.k, c.cap);
    for t in &r.tables {
        let _ = writeln!(out, "\n{}", t.title);
        table(&mut out, &t.columns, &t.rows);
    }
    if !r.suites.is_empty() {
        out.push('\n');
    }
    for s in &r.suites {
        if let Some(why) = &s.skipped {
            let _ = writeln!(out, "SKIP  {:<10} {why}", s.suite);
            continue;
        }
        let status = if s.status.is_pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status}  {:<10} {:>4} records  {:>8} identities  {:>3} failed  {:.2}s",
            s.suite,
            s.results.len(),
            s.checked,
            s.failed,
            s.elapsed.as_secs_f64()
        );
        let mut by_relation: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for rec in &s.results {
            let e = by_relation.entry(&rec.relation).or_default();
            e.0 += 1;
            e.1 += usize::from(!rec.status.is_pass());
        }
        if by_relation.len() > 1 {
            for (rel, (n, bad)) in by_relation {
                let _ = writeln!(out, "        {rel}: {}/{n} passed", n - bad);
            }
        }
        for rec in s.results.iter().filter(|r| !r.status.is_pass()) {
            let _ = writeln!(out, "    FAIL {} [{}] {}", rec.relation, rec.system, rec.point);
            for f in &rec.failures {
                let _ = writeln!(out, "      {f}");
            }
            let rows: Vec<Vec<String>> = rec
                .ledger
                .iter()
                .filter(|row| !row.matched)
                .map(|row| {
                    vec![format!("x^{}", row.point), row.kind.to_string(), row.output.clone(), row.lhs.to_string(), row.rhs.to_string()]
                })
                .collect();
            if !rows.is_empty() {
                let cols = ["point", "kind", "output", "lhs", "rhs"].map(String::from);
                table(&mut out, &cols, &rows);
            }
        }
    }
    let _ = writeln!(out, "\noverall: {}", if r.passed() { "PASS" } else { "FAIL" });
    out
}

/// Render in the configured format.
pub fn emit_report(r: &SuiteReport, format: crate::config::Format) -> String {
    match format {
        crate::config::Format::Text => to_text(r),
        crate::config::Format::Structured => to_structured(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_schema_header() {
        let r = SuiteReport::new(RunConfig { suites: vec![], ..RunConfig::default() }, vec![], vec![]);
        let s = to_structured(&r);
        assert!(s.contains("\"schema_version\": 1"));
        assert!(r.passed());
        assert_eq!(r.exit_code(), 0);
        assert_eq!(to_structured(&from_structured(&s).unwrap()), s);
    }

    #[test]
    fn failing_record_fails_the_suite() {
        let rec = ResultRecord::single("x", "sys", "pt", false, || "bad".into());
        let s = SuiteOutcome::new("diagram", vec![rec], Duration::ZERO);
        let r = SuiteReport::new(RunConfig::default(), vec![s], vec![]);
        assert_eq!(r.exit_code(), 1);
        assert!(to_text(&r).contains("FAIL x [sys] pt"));
    }
}
