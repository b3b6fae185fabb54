use std::fmt;

use fninf_core::Error;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    NotCertified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fail | Status::NotCertified => 1,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::NotCertified => "not-certified",
        })
    }
}

/// Result of one command. `inputs` holds the reconstructed arguments, so a
/// report alone is enough to repeat the run.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub status: Status,
    pub payload: Value,
    pub summary: String,
    pub timing_ms: Option<u128>,
}

impl Report {
    /// Stable JSON: serde_json maps keep their keys sorted.
    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("command".into(), Value::String(self.command.clone()));
        out.insert("inputs".into(), sorted(self.inputs.clone()));
        out.insert("payload".into(), sorted(self.payload.clone()));
        out.insert("status".into(), Value::String(self.status.to_string()));
        if let Some(ms) = self.timing_ms {
            out.insert("timing_ms".into(), Value::from(ms as u64));
        }
        Value::Object(out)
    }

    pub fn from_error(command: &str, inputs: Value, err: &Error) -> Report {
        let status = match err {
            Error::NotCertified(_) => Status::NotCertified,
            _ => Status::Fail,
        };
        let mut payload = Map::new();
        payload.insert("error".into(), Value::String(err.to_string()));
        if let Error::NotMember { violations, .. } = err {
            payload.insert(
                "violations".into(),
                serde_json::to_value(violations).expect("violations serialize"),
            );
        }
        Report {
            command: command.to_string(),
            inputs,
            status,
            payload: Value::Object(payload),
            summary: err.to_string(),
            timing_ms: None,
        }
    }
}

/// Rebuilds every object so key order never depends on how it was made.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, sorted(v))).collect()),
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}
