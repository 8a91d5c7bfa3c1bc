//! Check results shared by the table checkers, the fixture runner and the CLI.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Witness, counterexample or other supporting detail.
    pub detail: String,
    pub cite: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status, detail: detail.into(), cite: String::new() }
    }

    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Pass, detail)
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Fail, detail)
    }

    pub fn inconclusive(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Inconclusive, detail)
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }
}

/// Fail if anything failed, otherwise inconclusive if anything was, otherwise pass.
pub fn overall<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Status {
    let mut out = Status::Pass;
    for c in checks {
        match c.status {
            Status::Fail => return Status::Fail,
            Status::Inconclusive => out = Status::Inconclusive,
            Status::Pass => {}
        }
    }
    out
}
