//! Run reports. Every invocation produces one JSON report: a list of
//! per-task entries plus an overall verdict. Key order inside `values` is
//! deterministic so that reports diff cleanly between runs (only the
//! timing field varies).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tasks: Vec<TaskReport>,
    pub all_pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TaskReport {
    /// Task name (`kill`, `cohomology`, …).
    pub task: String,
    /// `"pass"` or `"fail"`.
    pub status: String,
    /// Computed quantities, sorted by key.
    pub values: BTreeMap<String, Value>,
    /// Printed forms of any basis elements the task produced.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<String>,
    /// Wall-clock seconds spent on this task.
    pub seconds: f64,
}

impl Report {
    pub fn new(tasks: Vec<TaskReport>) -> Report {
        let all_pass = tasks.iter().all(|t| t.status == "pass");
        Report { tasks, all_pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Accumulates the values of one task and settles into a `TaskReport`.
pub struct TaskLog {
    name: String,
    values: BTreeMap<String, Value>,
    basis: Vec<String>,
    failures: Vec<String>,
    started: std::time::Instant,
}

impl TaskLog {
    pub fn new(name: &str) -> TaskLog {
        TaskLog {
            name: name.to_string(),
            values: BTreeMap::new(),
            basis: Vec::new(),
            failures: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    pub fn value(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn basis_element(&mut self, printed: String) {
        self.basis.push(printed);
    }

    /// Records an expectation; a mismatch marks the task failed and names
    /// the offending quantity in the report.
    pub fn expect(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    pub fn finish(mut self) -> TaskReport {
        let status = if self.failures.is_empty() { "pass" } else { "fail" };
        if !self.failures.is_empty() {
            self.values.insert(
                "failed_expectations".to_string(),
                Value::Array(self.failures.iter().map(|f| Value::from(f.as_str())).collect()),
            );
        }
        TaskReport {
            task: self.name,
            status: status.to_string(),
            values: self.values,
            basis: self.basis,
            seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}
