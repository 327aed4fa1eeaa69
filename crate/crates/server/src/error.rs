use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use itmap_core::Error;
use serde::{Deserialize, Serialize};

/// Error body returned by every endpoint: `{"code": ..., "message": ...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip, default = "internal_status")]
    pub status: u16,
}

fn internal_status() -> u16 {
    500
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            status: status.as_u16(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn storage(err: std::io::Error) -> Self {
        Self::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "storage_error",
            err.to_string(),
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn status_code(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }

    /// One JSON line, as printed by command-line tools.
    pub fn to_line(&self) -> String {
        serde_json::json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

/// Machine code and HTTP status for each library error.
pub fn classify(err: &Error) -> (StatusCode, &'static str) {
    use StatusCode as S;
    match err {
        Error::EmptyInput => (S::BAD_REQUEST, "empty_input"),
        Error::RaggedRow { .. } => (S::BAD_REQUEST, "ragged_row"),
        Error::BadNumber { .. } => (S::BAD_REQUEST, "bad_number"),
        Error::LabelColumnOutOfRange { .. } => (S::BAD_REQUEST, "label_column_out_of_range"),
        Error::NoAttributes => (S::BAD_REQUEST, "no_attributes"),
        Error::MetricMismatch { .. } => (S::BAD_REQUEST, "metric_mismatch"),
        Error::InvalidSigma(_) => (S::BAD_REQUEST, "invalid_sigma"),
        Error::InvalidDimension { .. } => (S::BAD_REQUEST, "invalid_dimension"),
        Error::InvalidArgument(_) => (S::BAD_REQUEST, "invalid_argument"),
        Error::NodeOutOfRange { .. } => (S::BAD_REQUEST, "node_out_of_range"),
        Error::EdgeNotFound(_) => (S::NOT_FOUND, "edge_not_found"),
        Error::EdgeAlreadyCut(_) => (S::CONFLICT, "edge_already_cut"),
        Error::EdgeNotCut(_) => (S::CONFLICT, "edge_not_cut"),
        Error::NoUncutEdges => (S::CONFLICT, "no_uncut_edges"),
        Error::ComponentNotFound(_) => (S::NOT_FOUND, "component_not_found"),
        Error::SingletonComponent(_) => (S::CONFLICT, "singleton_component"),
        Error::SessionNotFound(_) => (S::NOT_FOUND, "session_not_found"),
        Error::DatasetNotFound(_) => (S::NOT_FOUND, "dataset_not_found"),
        Error::NotAChild { .. } => (S::NOT_FOUND, "not_a_child"),
        Error::OverlappingChildren(_) => (S::CONFLICT, "overlapping_children"),
        Error::MissingLabels => (S::UNPROCESSABLE_ENTITY, "missing_labels"),
        Error::InvalidConstraint(_) => (S::BAD_REQUEST, "invalid_constraint"),
        Error::Document(_) => (S::BAD_REQUEST, "invalid_document"),
        Error::Csv(_) => (S::BAD_REQUEST, "invalid_csv"),
        Error::Json(_) => (S::BAD_REQUEST, "invalid_json"),
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let (status, code) = classify(&err);
        Self::new(status, code, err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status_code();
        if status.is_server_error() {
            tracing::error!(code = %self.code, "{}", self.message);
        }
        (status, Json(self)).into_response()
    }
}
