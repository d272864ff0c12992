use formcalc_core::Error;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    ClosureFailed,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ClosureFailed => "closure-failed",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ClosureFailed => 1,
            Status::Error => 2,
        }
    }
}

/// Result of a command that ran to completion.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub summary: String,
}

impl Outcome {
    pub fn ok(result: Value, summary: impl Into<String>) -> Self {
        Outcome { status: Status::Ok, result, summary: summary.into() }
    }

    pub fn closure_failed(result: Value, summary: impl Into<String>) -> Self {
        Outcome { status: Status::ClosureFailed, result, summary: summary.into() }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { status: Status::Error, kind: "usage", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Syntax { .. } => "syntax",
            Error::UnknownFunction(_) | Error::UnknownCoordinate(_) | Error::UnboundVariable(_) => "name",
            Error::DivisionByZero | Error::Domain(_) => "domain",
            Error::DimensionMismatch { .. } | Error::DegreeMismatch { .. } | Error::CoordinateMismatch(..) => "shape",
            Error::MissingConnection | Error::MissingMetric => "missing",
            Error::DegenerateMetric(_) => "degenerate-metric",
            Error::NotClosed(_) => "not-closed",
            Error::Unsupported(_) => "unsupported",
            Error::Invalid(_) | Error::OutOfRange(_) => "invalid",
            Error::Config(_) => "config",
        };
        let status = if matches!(e, Error::NotClosed(_)) { Status::ClosureFailed } else { Status::Error };
        Failure { status, kind, message: e.to_string() }
    }
}

pub fn record(command: &str, inputs: Map<String, Value>, status: Status, result: Value) -> Value {
    json!({
        "command": command,
        "inputs": Value::Object(inputs),
        "status": status.as_str(),
        "result": result,
    })
}

pub fn failure_result(f: &Failure) -> Value {
    json!({ "error": { "kind": f.kind, "message": f.message } })
}
