//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Cayley table (from file or from a builder) failed one of the group axioms.
    #[error("group table rejected: {0}")]
    GroupLoad(String),

    /// An element set handed in as a subgroup is not closed.
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("not a normal subgroup: {0}")]
    NotNormal(String),

    /// Caller violated a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// Matrix is singular or too close to singular for a polar decomposition.
    #[error("matrix is numerically singular (smallest singular value {smallest:e} <= {floor:e})")]
    Singular { smallest: f64, floor: f64 },

    #[error("matrix is not normal (commutator norm {commutator:e})")]
    NonNormalMatrix { commutator: f64 },

    #[error("matrix is not self-adjoint (||H - H*|| = {asymmetry:e})")]
    NotSelfAdjoint { asymmetry: f64 },

    /// An eigenvalue sits inside the band that a spectral cut must avoid.
    #[error("eigenvalue {eigenvalue} lies within the forbidden band {band:?}")]
    SpectralGap { eigenvalue: f64, band: (f64, f64) },

    #[error("matrix is not unitary (||U*U - I|| = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("non-finite entry in matrix at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("enumeration would produce {count} words, above the cap of {cap}")]
    EnumerationCap { count: u128, cap: usize },

    /// A quantitative bound that the library asserts was violated.
    #[error("bound violated [{statement}]: {detail}")]
    BoundViolated { statement: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
