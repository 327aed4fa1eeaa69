use thiserror::Error;

use crate::dataset::{AttrKind, Metric};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains no data rows")]
    EmptyInput,

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: `{token}` is not a finite number")]
    BadNumber {
        row: usize,
        column: usize,
        token: String,
    },

    #[error("label column {column} is out of range for rows with {width} fields")]
    LabelColumnOutOfRange { column: usize, width: usize },

    #[error("rows must keep at least one attribute column besides the label")]
    NoAttributes,

    #[error("metric `{metric}` cannot be applied to {kind} attributes")]
    MetricMismatch { metric: Metric, kind: AttrKind },

    #[error("sigma must be a positive finite number, got {0}")]
    InvalidSigma(f64),

    #[error("embedding dimension {dim} is invalid: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node {node} is out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("edge {0} does not exist")]
    EdgeNotFound(usize),

    #[error("edge {0} is already cut")]
    EdgeAlreadyCut(usize),

    #[error("edge {0} is not cut")]
    EdgeNotCut(usize),

    #[error("no uncut edges remain")]
    NoUncutEdges,

    #[error("component {0} does not exist")]
    ComponentNotFound(usize),

    #[error("component {0} has a single node and cannot be refined")]
    SingletonComponent(usize),

    #[error("session {0} does not exist")]
    SessionNotFound(u64),

    #[error("dataset `{0}` does not exist")]
    DatasetNotFound(String),

    #[error("session {child} is not a child of session {parent}")]
    NotAChild { parent: u64, child: u64 },

    #[error("finalized children of session {0} cover overlapping node sets")]
    OverlappingChildren(u64),

    #[error("ground-truth labels are required but missing")]
    MissingLabels,

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("malformed session document: {0}")]
    Document(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
