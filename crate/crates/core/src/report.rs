//! Check results shared by every verification stage.

use serde::Serialize;

use crate::surface::CurveId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for the record; never affects the exit code.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub check: String,
    pub curves: Vec<CurveId>,
    pub expected: String,
    pub actual: String,
}

impl Violation {
    pub fn new(check: &str, curves: Vec<CurveId>, expected: impl ToString, actual: impl ToString) -> Violation {
        Violation { check: check.to_string(), curves, expected: expected.to_string(), actual: actual.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    pub violations: Vec<Violation>,
    /// Informational lines: computed values, coverage remarks.
    pub notes: Vec<String>,
}

impl CheckResult {
    /// Pass when `violations` is empty, fail otherwise.
    pub fn from_violations(check: &str, mut violations: Vec<Violation>) -> CheckResult {
        violations.sort();
        let status = if violations.is_empty() { Status::Pass } else { Status::Fail };
        CheckResult { check: check.to_string(), status, violations, notes: Vec::new() }
    }

    pub fn info(check: &str, mut violations: Vec<Violation>) -> CheckResult {
        violations.sort();
        CheckResult { check: check.to_string(), status: Status::Info, violations, notes: Vec::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckResult {
        self.notes.push(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
