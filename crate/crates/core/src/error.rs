use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Data => 2,
            ErrorClass::Numerical => 3,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::Data => "data",
            ErrorClass::Numerical => "numerical",
        }
    }
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("degenerate 2x2 table: {0}")]
    DegenerateTable(String),

    #[error("double-zero 2x2 table (no events in either arm)")]
    DoubleZeroTable,

    #[error("invalid study: {0}")]
    InvalidStudy(String),

    #[error("duplicate study label {0:?}")]
    DuplicateLabel(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("subset of {requested} studies out of range for k = {k}")]
    SubsetOutOfRange { requested: usize, k: usize },

    #[error("at least {needed} studies required, got k = {k}")]
    TooFewStudies { needed: usize, k: usize },

    #[error("study index {index} out of range for k = {k}")]
    StudyIndex { index: usize, k: usize },

    #[error("point-mass prior has no density")]
    PointMassDensity,

    #[error("invalid prior specification {spec:?}: {reason}")]
    PriorSpec { spec: String, reason: String },

    #[error("invalid option: {0}")]
    Config(String),

    #[error("malformed CSV header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: non-numeric value {value:?} in field {field}")]
    NonNumericField {
        line: u64,
        field: String,
        value: String,
    },

    #[error("line {line}: non-positive standard error {value}")]
    NonPositiveSe { line: u64, value: f64 },

    #[error("line {line}: duplicate study label {label:?}")]
    DuplicateRow { line: u64, label: String },

    #[error("line {line}: {source}")]
    Row {
        line: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::NoSignChange { .. }
            | Error::NonConvergence(_) => ErrorClass::Numerical,
            Error::PriorSpec { .. } | Error::Config(_) => ErrorClass::Usage,
            Error::Row { source, .. } | Error::Method { source, .. } => source.class(),
            Error::Json(_) => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn in_method(self, method: &str) -> Error {
        Error::Method {
            method: method.to_string(),
            source: Box::new(self),
        }
    }
}
