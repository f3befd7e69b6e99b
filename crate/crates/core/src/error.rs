use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} outside the supported range 1..=64")]
    DimensionOutOfRange(usize),

    #[error("{what} is not Hermitian: max asymmetry residual {residual:e}")]
    NotHermitian { what: &'static str, residual: f64 },

    #[error("projector {label:?} is not idempotent: max |P^2 - P| = {residual:e}")]
    NotIdempotent { label: String, residual: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("density matrix has negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("basis labels: {0}")]
    BadLabels(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("projection family is empty")]
    EmptyFamily,

    #[error("projection family at slot {slot} fails validation: completeness {completeness:e}, exclusivity {exclusivity:e}")]
    InvalidFamily {
        slot: usize,
        completeness: f64,
        exclusivity: f64,
    },

    #[error("history grid needs at least one time")]
    EmptyGrid,

    #[error("times must be strictly increasing (slot {slot}: {previous} then {next})")]
    TimesNotIncreasing {
        slot: usize,
        previous: f64,
        next: f64,
    },

    #[error("history index {index} invalid: {reason}")]
    InvalidIndex { index: String, reason: String },

    #[error("enumeration of {count} elements exceeds the cap of {cap}")]
    TooMany { count: u128, cap: u128 },

    #[error("coarse-graining map leaves {} label(s) unassigned: {}", .missing.len(), .missing.join(", "))]
    Coverage { missing: Vec<String> },

    #[error("coarse-graining map assigns unknown label(s): {}", .0.join(", "))]
    UnknownLabels(Vec<String>),

    #[error("grid is incomplete: max |sum C - I| = {residual:e}")]
    IncompleteGrid { residual: f64 },

    #[error("decoherence matrix labels do not match: {0}")]
    LabelMismatch(String),

    #[error("unknown criterion {0:?} (expected medium, weak or lp)")]
    UnknownCriterion(String),

    #[error("records need a pure state: second-largest eigenvalue {second_eigenvalue:e}")]
    MixedState { second_eigenvalue: f64 },

    #[error("branches are not orthogonal: max overlap {max_overlap:e} (normalized {normalized_overlap:e}) between {first} and {second}")]
    BranchesOverlap {
        max_overlap: f64,
        normalized_overlap: f64,
        first: String,
        second: String,
    },

    #[error("site {site} out of range for {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("path has {found} points, expected {expected}")]
    PathLength { expected: usize, found: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
