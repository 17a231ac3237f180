//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong while constructing parameters, series,
/// operators, bounds, or tables.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter pair outside the admissible region (need q > p >= 1).
    #[error("invalid (p, q) parameters: {0}")]
    InvalidParams(String),

    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation requested at or beyond the radius of analyticity.
    #[error("evaluation outside the open disk of analyticity: |z| = {modulus}, radius = {radius}")]
    OutsideRadius { modulus: f64, radius: f64 },

    /// The (p,q)-difference quotient is undefined at the origin.
    #[error("(p,q)-difference quotient is undefined at z = 0")]
    PointwiseAtZero,

    /// A coefficient beyond the stored truncation was requested and the tail
    /// majorant cannot certify it is zero.
    #[error("coefficient index {k} exceeds truncation {k_trunc} and the tail is not identically zero")]
    NoTailCoverage { k: usize, k_trunc: usize },

    /// A certified bound was requested but the series carries no tail majorant.
    #[error("no tail majorant available; certified bound cannot be formed")]
    TailUnavailable,

    /// The certified tail sum does not converge at the requested radius.
    #[error("tail sum does not converge at radius {radius} (decay radius {rho})")]
    TailDiverges { radius: f64, rho: f64 },

    /// Operation undefined on the p = 1 parameter line.
    #[error("undefined for p = 1: {0}")]
    QCaseUndefined(String),

    /// Lower-bound machinery rejects affine functions.
    #[error("function has no coefficient c_k with k >= 2; lower-bound estimates do not apply")]
    LinearExcluded,

    /// Exact-order audit rejects tables whose source the theorems exclude.
    #[error("lower audit not applicable: {0}")]
    AuditNotApplicable(String),

    /// Exact-order audit needs a minimum number of usable rows.
    #[error("rate table has {rows} usable rows; the audit needs at least {needed}")]
    TooFewRows { rows: usize, needed: usize },

    /// A grid evaluation produced a non-finite value.
    #[error("evaluation failed at z = {re} + {im}i: {reason}")]
    EvaluationFailed { re: f64, im: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
