//! Pass/fail records shared by every verification routine.

use serde::{Deserialize, Serialize};

/// Upper bound on stored failure messages per report.
const MAX_FAILURES: usize = 32;

/// Outcome of one check at one context (diagram, evaluation point, ...).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub context: String,
    pub passed: bool,
    /// Number of individual identities compared.
    pub checked: usize,
    /// Failure count, including those not stored in `failures`.
    pub failed: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, context: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            context: context.into(),
            passed: true,
            checked: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    /// Record one comparison; `msg` is only built on failure.
    pub fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.passed = false;
        self.failed += 1;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg);
        }
    }

    /// Record an error from a fallible computation as a failure.
    pub fn absorb<T>(&mut self, r: crate::Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.fail(format!("{what}: {e}"));
                None
            }
        }
    }

    /// Fold another report's counts and failures into this one.
    pub fn merge(&mut self, o: CheckReport) {
        self.checked += o.checked;
        self.failed += o.failed;
        self.passed &= o.passed;
        for f in o.failures {
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(format!("[{}] {f}", o.context));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_capped_but_counted() {
        let mut r = CheckReport::new("c", "ctx");
        for i in 0..40 {
            r.expect(i % 2 == 0, || format!("bad {i}"));
        }
        assert!(!r.passed);
        assert_eq!(r.checked, 40);
        assert_eq!(r.failed, 20);
        assert_eq!(r.failures.len(), 20);
        let mut top = CheckReport::new("all", "");
        top.merge(r);
        assert_eq!(top.failed, 20);
        assert!(top.failures[0].starts_with("[ctx]"));
    }
}
