//! Machine-readable check reports shared by the verification suites and the
//! command-line front end. Reports are deterministic: checks are sorted by
//! id and all maps are ordered.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One verified claim.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    /// short human-readable statement of what was checked
    pub claim: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(id: impl Into<String>, claim: impl Into<String>) -> Check {
        Check { id: id.into(), claim: claim.into(), status: Status::Pass, witness: None }
    }

    pub fn fail(
        id: impl Into<String>,
        claim: impl Into<String>,
        witness: impl Into<String>,
    ) -> Check {
        Check {
            id: id.into(),
            claim: claim.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        }
    }

    pub fn of(id: impl Into<String>, claim: impl Into<String>, ok: bool, witness: impl Into<String>) -> Check {
        if ok {
            Check::pass(id, claim)
        } else {
            Check::fail(id, claim, witness)
        }
    }
}

/// A full suite report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: String,
    pub checks: Vec<Check>,
}

pub const SCHEMA: &str = "permucat/1";

impl Report {
    pub fn new(command: impl Into<String>, config: impl Into<String>) -> Report {
        Report { schema: SCHEMA, command: command.into(), config: config.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn finalize(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_sorted_and_stable() {
        let mut r = Report::new("demo", "n=3");
        r.push(Check::pass("b", "second"));
        r.push(Check::fail("a", "first", "broken"));
        r.finalize();
        assert_eq!(r.checks[0].id, "a");
        assert!(!r.all_pass());
        let j1 = r.to_json();
        let j2 = r.to_json();
        assert_eq!(j1, j2);
    }
}
