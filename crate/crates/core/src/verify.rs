//! Pass/fail records produced by the identity checks.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    /// The check's hypothesis never held inside the window.
    VacuousPass,
}

impl Outcome {
    pub fn passed(self) -> bool {
        self != Outcome::Fail
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::VacuousPass => "PASS (vacuous)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub check: String,
    pub outcome: Outcome,
    /// Exact supporting facts, one per line, in a fixed order.
    pub details: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport { check: check.into(), outcome: Outcome::Pass, details: Vec::new() }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    /// Records a failed condition; a failure is never downgraded.
    pub fn fail(&mut self, line: impl Into<String>) {
        self.outcome = Outcome::Fail;
        self.details.push(line.into());
    }

    pub fn vacuous(&mut self, line: impl Into<String>) {
        if self.outcome == Outcome::Pass {
            self.outcome = Outcome::VacuousPass;
        }
        self.details.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.outcome.passed()
    }
}
