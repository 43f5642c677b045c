//! Command reports, exit statuses and input helpers.

use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use tumax::certify::CertifyError;
use tumax::compose::ComposeError;
use tumax::graphical::GraphError;
use tumax::polytope::PolytopeError;
use tumax::search::SearchError;
use tumax::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    PropertyFails,
    UsageError,
    BudgetExceeded,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::PropertyFails => 1,
            Status::UsageError => 2,
            Status::BudgetExceeded => 3,
        }
    }

    pub fn holds(ok: bool) -> Status {
        if ok {
            Status::Ok
        } else {
            Status::PropertyFails
        }
    }
}

/// What a command produced on success or on a property failure.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub summary: String,
}

impl Outcome {
    pub fn new(status: Status, result: impl Serialize, summary: impl Into<String>) -> Self {
        Outcome { status, result: to_value(result), summary: summary.into() }
    }
}

/// A command that could not produce its payload.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
    /// Partial payload for budget failures.
    pub partial: Option<Value>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { status: Status::UsageError, message: message.into(), partial: None }
    }

    pub fn fails(message: impl Into<String>) -> Self {
        Failure { status: Status::PropertyFails, message: message.into(), partial: None }
    }

    pub fn parse(path: &str, e: &ParseError) -> Self {
        Failure::usage(format!("{path}:{}:{}: {}", e.line, e.column, e.message))
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("payloads serialize")
}

#[derive(Serialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub exit_status: i32,
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        match &e {
            CertifyError::BudgetExceeded { method, rows, cols, limit, suggestion } => Failure {
                status: Status::BudgetExceeded,
                message: e.to_string(),
                partial: Some(json!({
                    "method": method, "rows": rows, "cols": cols, "limit": limit, "suggestion": suggestion,
                })),
            },
            CertifyError::RankDeficient { .. } => Failure::fails(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<ComposeError> for Failure {
    fn from(e: ComposeError) -> Self {
        match e {
            ComposeError::Certify(c) => c.into(),
            ComposeError::Spec(_) | ComposeError::Unsupported(_) => Failure::usage(e.to_string()),
            _ => Failure::fails(e.to_string()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::WitnessMismatch => Failure::fails(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<PolytopeError> for Failure {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::Certify(c) => c.into(),
            PolytopeError::NotUnimodular
            | PolytopeError::NotPolytopal
            | PolytopeError::NotConvexPosition(_)
            | PolytopeError::Recertification => Failure::fails(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Certify(c) => c.into(),
            SearchError::ShadowMismatch(_) => Failure::fails(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<tumax::families::FamilyError> for Failure {
    fn from(e: tumax::families::FamilyError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<tumax::MatrixError> for Failure {
    fn from(e: tumax::MatrixError) -> Self {
        Failure::usage(e.to_string())
    }
}

pub fn read_text(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

/// Comma- or whitespace-separated integers.
pub fn parse_vector(what: &str, s: &str) -> Result<Vec<i64>, Failure> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| t.parse().map_err(|_| Failure::usage(format!("{what}: entry {} `{t}` is not an integer", i + 1))))
        .collect()
}
