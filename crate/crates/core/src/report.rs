//! Law-check reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::element::{show_tuple, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Element>>,
}

/// One step of a counterexample trace. `thread` is `None` for the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thread: Option<usize>,
    pub step: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub checks: Vec<LawCheck>,
    pub stats: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

impl LawReport {
    pub fn new(suite: impl Into<String>) -> Self {
        LawReport {
            suite: suite.into(),
            checks: Vec::new(),
            stats: BTreeMap::new(),
            notes: Vec::new(),
            trace: None,
        }
    }

    /// Records a law; `None` means it held, `Some(w)` is the first counterexample.
    pub fn record(&mut self, law: impl Into<String>, witness: Option<Vec<Element>>) {
        let status = if witness.is_some() { Status::Fail } else { Status::Pass };
        self.checks.push(LawCheck { law: law.into(), status, witness });
    }

    pub fn stat(&mut self, key: impl Into<String>, value: u64) {
        self.stats.insert(key.into(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn check(&self, law: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }

    /// Status of a law, `None` when the report has no such check.
    pub fn status(&self, law: &str) -> Option<Status> {
        self.check(law).map(|c| c.status)
    }

    pub fn witness(&self, law: &str) -> Option<&[Element]> {
        self.check(law).and_then(|c| c.witness.as_deref())
    }

    pub fn failed_laws(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.law.as_str())
            .collect()
    }

    /// Appends another report's checks under `prefix/`, along with its notes and stats.
    pub fn absorb(&mut self, prefix: &str, other: LawReport) {
        for mut c in other.checks {
            c.law = format!("{prefix}/{}", c.law);
            self.checks.push(c);
        }
        for (k, v) in other.stats {
            self.stats.insert(format!("{prefix}/{k}"), v);
        }
        self.notes.extend(other.notes);
        if self.trace.is_none() {
            self.trace = other.trace;
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite: {}", self.suite)?;
        for c in &self.checks {
            match (&c.status, &c.witness) {
                (Status::Pass, _) => writeln!(f, "  pass  {}", c.law)?,
                (Status::Fail, Some(w)) => {
                    writeln!(f, "  FAIL  {}  witness {}", c.law, show_tuple(w))?
                }
                (Status::Fail, None) => writeln!(f, "  FAIL  {}", c.law)?,
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        if let Some(trace) = &self.trace {
            writeln!(f, "  trace:")?;
            for (i, t) in trace.iter().enumerate() {
                match t.thread {
                    Some(th) => writeln!(f, "    {i:>3}. thread {th} {}: {}", t.step, t.state)?,
                    None => writeln!(f, "    {i:>3}. {}: {}", t.step, t.state)?,
                }
            }
        }
        if !self.stats.is_empty() {
            let parts: Vec<String> = self.stats.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "  stats: {}", parts.join(" "))?;
        }
        Ok(())
    }
}
