use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use project_store::StoreError;
use serde::Serialize;

/// An error as returned over HTTP: status, machine code, optional reason
/// code (for `not-possible`) and a human message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub reason: Option<String>,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, reason: None, message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", message)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }

    /// Process exit code used by the command-line tool for this error.
    pub fn exit_code(&self) -> i32 {
        match self.code {
            "not-possible" => 3,
            "not-found" => 4,
            "corrupt-log" => 5,
            "io" | "internal" => 6,
            _ => 2,
        }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.reason {
            Some(r) => write!(f, "{} ({r}): {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

impl std::error::Error for ApiError {}

impl From<sitcalc::Error> for ApiError {
    fn from(e: sitcalc::Error) -> Self {
        use sitcalc::Error::*;
        let (status, code) = match &e {
            UnknownKind { .. } => (StatusCode::BAD_REQUEST, "unknown-kind"),
            Arity { .. } => (StatusCode::BAD_REQUEST, "arity"),
            NotPossible { .. } => (StatusCode::CONFLICT, "not-possible"),
            NonGround(_) => (StatusCode::BAD_REQUEST, "non-ground"),
            UnboundNegation(_) => (StatusCode::BAD_REQUEST, "unbound-negation"),
            DuplicateName { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "duplicate-name"),
            Syntax { .. } => (StatusCode::BAD_REQUEST, "syntax"),
        };
        let reason = match &e {
            NotPossible { reason, .. } => Some(reason.clone()),
            _ => None,
        };
        Self { status, code, reason, message: e.to_string() }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => Self::not_found(e.to_string()),
            StoreError::UnknownKb(_) => Self::new(StatusCode::BAD_REQUEST, "unknown-kb", e.to_string()),
            StoreError::CorruptLog { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "corrupt-log", e.to_string()),
            StoreError::Kernel(k) => k.into(),
            StoreError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "io", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body { error: self.code, reason: self.reason.as_deref(), message: &self.message };
        (self.status, Json(body)).into_response()
    }
}
