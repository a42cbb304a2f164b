use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use patchr_core::{CodecError, FeedbackError, RepositoryError, UpdateError, Violation};
use serde::Serialize;

/// Error body: `{"error": <code>, "message": <text>, "violations": [...]}`.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl ApiError {
    pub fn new(status: StatusCode, error: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status,
            error: error.into(),
            message: message.into(),
            violations: Vec::new(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn invalid(violations: Vec<Violation>) -> Self {
        let codes: Vec<&str> = violations.iter().map(|v| v.code.as_str()).collect();
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: "Validation".into(),
            message: format!("patch is invalid: {}", codes.join(", ")),
            violations,
        }
    }

    pub fn unsupported_media_type(found: &str) -> Self {
        ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "UnsupportedMediaType",
            format!("unsupported content type {found:?}; send text/turtle or application/json"),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<RepositoryError> for ApiError {
    fn from(e: RepositoryError) -> Self {
        let status = match &e {
            RepositoryError::Validation(_) | RepositoryError::InvalidFilter(_) | RepositoryError::Invalid(_) => {
                StatusCode::BAD_REQUEST
            }
            RepositoryError::UnknownPatch(_) | RepositoryError::UnknownGroup(_) => StatusCode::NOT_FOUND,
            RepositoryError::TerminalPatch(..)
            | RepositoryError::IllegalTransition { .. }
            | RepositoryError::ConflictingPosition { .. }
            | RepositoryError::DuplicateGroup(_) => StatusCode::CONFLICT,
            RepositoryError::CorruptJournal { .. } | RepositoryError::Journal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        match e {
            RepositoryError::Validation(violations) => ApiError::invalid(violations),
            other => ApiError::new(status, other.code(), other.to_string()),
        }
    }
}

impl From<CodecError> for ApiError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::Parse(p) => ApiError::new(StatusCode::BAD_REQUEST, "ParseError", p.to_string()),
            CodecError::Structure { ref error, .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, error.code(), e.to_string())
            }
            CodecError::Invalid(violations) => ApiError::invalid(violations),
        }
    }
}

impl From<UpdateError> for ApiError {
    fn from(e: UpdateError) -> Self {
        match e {
            UpdateError::Invalid(violations) => ApiError::invalid(violations),
        }
    }
}

impl From<FeedbackError> for ApiError {
    fn from(e: FeedbackError) -> Self {
        let code = match e {
            FeedbackError::InconsistentVote(_) => "InconsistentVote",
            _ => "InvalidContext",
        };
        ApiError::new(StatusCode::BAD_REQUEST, code, e.to_string())
    }
}
