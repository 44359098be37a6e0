//! Outcomes of identity checks.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The result of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// A witness of failure, printed in the kernel's infix syntax.
    pub residual: Option<String>,
    pub note: Option<String>,
    /// Number of instances tested.
    pub samples: usize,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>, samples: usize) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Pass,
            residual: None,
            note: None,
            samples,
        }
    }

    pub fn fail(name: impl Into<String>, residual: impl Into<String>, samples: usize) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Fail,
            residual: Some(residual.into()),
            note: None,
            samples,
        }
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Skipped,
            residual: None,
            note: Some(note.into()),
            samples: 0,
        }
    }

    /// Turns the outcome of a sampled identity check into a result:
    /// `Ok(None)` passes, `Ok(Some(w))` fails with witness `w`, an
    /// inconclusive zero test is inconclusive, and any other error fails.
    pub fn from_outcome(name: impl Into<String>, outcome: Result<Option<String>>, samples: usize) -> Self {
        let name = name.into();
        match outcome {
            Ok(None) => CheckResult::pass(name, samples),
            Ok(Some(w)) => CheckResult::fail(name, w, samples),
            Err(Error::Inconclusive(e)) => CheckResult {
                name,
                status: Status::Inconclusive,
                residual: Some(e),
                note: Some("randomized zero test could not decide".into()),
                samples,
            },
            Err(e) => CheckResult {
                name,
                status: Status::Fail,
                residual: None,
                note: Some(e.to_string()),
                samples,
            },
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
