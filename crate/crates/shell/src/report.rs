//! Structured command reports with text and JSON renderings.
//!
//! A passing check never carries witnesses; any failing check makes the
//! report exit with 1.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: CheckStatus::Pass,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>, witnesses: Vec<String>) -> Check {
        Check {
            name: name.into(),
            status: CheckStatus::Fail,
            detail: detail.into(),
            witnesses,
        }
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    /// Pass or fail by `ok`; witnesses are kept only on failure.
    pub fn verdict(name: impl Into<String>, ok: bool, detail: impl Into<String>, witnesses: Vec<String>) -> Check {
        if ok {
            Check::pass(name, detail)
        } else {
            Check::fail(name, detail, witnesses)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub facts: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            subject: subject.into(),
            passed: true,
            checks: Vec::new(),
            facts: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, check: Check) {
        if check.status == CheckStatus::Fail {
            self.passed = false;
        }
        self.checks.push(check);
    }

    pub fn fact(&mut self, key: &str, value: impl Into<Value>) {
        self.facts.insert(key.to_string(), value.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.subject);
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "SKIP",
            };
            if c.detail.is_empty() {
                let _ = writeln!(out, "  {tag} {}", c.name);
            } else {
                let _ = writeln!(out, "  {tag} {}: {}", c.name, c.detail);
            }
            for w in &c.witnesses {
                let _ = writeln!(out, "       witness: {w}");
            }
        }
        for (k, v) in &self.facts {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "  {k} = {v}");
        }
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "fail" });
        out
    }
}
