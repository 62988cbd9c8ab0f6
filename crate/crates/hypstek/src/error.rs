//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("dimension must be >= 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("{context} requires dimension {required}, got {n}")]
    DimensionMismatch {
        context: &'static str,
        required: &'static str,
        n: usize,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("boundary is not mean-convex: min H = {min_h:.6e}")]
    NotMeanConvex { min_h: f64 },

    #[error("quadrature failure near {at}: {reason}")]
    Quadrature { at: f64, reason: String },

    #[error("root not bracketed on [{a}, {b}]: {reason}")]
    RootBracket { a: f64, b: f64, reason: String },

    #[error("argument {s:.6e} outside tabulated range [{lo:.6e}, {hi:.6e}]")]
    TableRange { s: f64, lo: f64, hi: f64 },

    #[error("flow stopped at t = {t}: {reason}")]
    FlowStopped { t: f64, reason: String },

    #[error("eigensolver: {0}")]
    Eigensolver(String),

    #[error("linear algebra: {0}")]
    LinearAlgebra(String),

    #[error("spectrum too short: need {needed} eigenvalues, have {have}")]
    SpectrumTooShort { needed: usize, have: usize },

    #[error("invalid shape spec: {0}")]
    ShapeSpec(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error in profile file: {0}")]
    ProfileParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
