//! Pass/fail reporting shared by the verification suites.

use std::fmt;

/// One checked statement inside a suite.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    /// Human-readable evidence: the values compared, deviations, etc.
    pub detail: String,
}

/// A named collection of checks that passes iff every case passes.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            cases: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.cases.push(CaseResult {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.suite
        )?;
        for case in &self.cases {
            writeln!(
                f,
                "  [{}] {}: {}",
                if case.pass { "ok" } else { "FAIL" },
                case.name,
                case.detail
            )?;
        }
        Ok(())
    }
}
