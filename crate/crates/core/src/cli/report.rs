//! The JSON run report: one document per invocation, keys in lexicographic order.

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// A named check: a deviation compared against a tolerance, or a boolean outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    pub fn within(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        let status = if deviation <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, deviation: Some(deviation), tolerance: Some(tolerance), detail: None }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, deviation: None, tolerance: None, detail: None }
    }

    pub fn inconclusive(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Inconclusive, deviation: None, tolerance: None, detail: Some(why.into()) }
    }

    pub fn failed(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Fail, deviation: None, tolerance: None, detail: Some(why.into()) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("status".into(), json!(self.status));
        if let Some(d) = self.deviation {
            m.insert("deviation".into(), number(d));
        }
        if let Some(t) = self.tolerance {
            m.insert("tolerance".into(), number(t));
        }
        if let Some(d) = &self.detail {
            m.insert("detail".into(), json!(d));
        }
        Value::Object(m)
    }
}

/// A JSON number, or the strings `"inf"`, `"-inf"`, `"nan"` for non-finite values.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// An operator norm, `"unbounded"` when infinite.
pub fn operator_norm(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("unbounded")
    } else {
        number(x)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Worst status, `Pass` for an empty list.
pub fn overall<I: IntoIterator<Item = Status>>(statuses: I) -> Status {
    statuses.into_iter().max().unwrap_or(Status::Pass)
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    /// `(path, sha256)` per operator spec.
    pub specs: Vec<(String, String)>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Status forced by an error outside the checks.
    pub forced: Option<Status>,
    pub wall_time_seconds: Option<f64>,
    pub timestamp: Option<u64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            specs: Vec::new(),
            results: Value::Null,
            checks: Vec::new(),
            warnings: Vec::new(),
            forced: None,
            wall_time_seconds: None,
            timestamp: None,
        }
    }

    /// Pass iff every check passes and nothing was inconclusive.
    pub fn status(&self) -> Status {
        overall(self.checks.iter().map(|c| c.status).chain(self.forced))
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert(
            "specs".into(),
            Value::Array(self.specs.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect()),
        );
        m.insert("results".into(), self.results.clone());
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        m.insert("status".into(), json!(self.status()));
        if !self.warnings.is_empty() {
            m.insert("warnings".into(), json!(self.warnings));
        }
        if let Some(t) = self.wall_time_seconds {
            m.insert("wall_time_seconds".into(), number(t));
        }
        if let Some(t) = self.timestamp {
            m.insert("timestamp".into(), json!(t));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}
