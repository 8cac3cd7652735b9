use thiserror::Error;

use crate::admissibility::AdmissibilityReport;

/// Crate-wide error type. Variants map 1:1 onto the failure modes of the
/// geometry kernel, the hull builder, the solver and the transport LP.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero-length vector cannot be normalized")]
    ZeroVector,

    #[error("degenerate spherical polygon: {0}")]
    DegeneratePolygon(String),

    #[error("non-positive dot product under log kernel (min dot {min:.3e})")]
    NonPositiveDot { min: f64 },

    #[error("quadrature tolerance {tol:.3e} not reached (achieved {achieved:.3e})")]
    ToleranceNotReached { tol: f64, achieved: f64 },

    #[error("convex hull is degenerate: {0}")]
    HullDegenerate(String),

    #[error("origin is not strictly interior to the polytope")]
    OriginNotInterior,

    #[error("vector is not tangent at the base point (<v,x> = {dot:.3e})")]
    NonTangent { dot: f64 },

    #[error("operation not supported in dimension n = {0}")]
    UnsupportedDimension(u32),

    #[error("instance too large for exhaustive cone enumeration (K = {k}, max {max})")]
    TooLarge { k: usize, max: usize },

    #[error("transport problem infeasible: {0}")]
    Infeasible(String),

    #[error("instance failed admissibility checks")]
    InvalidInstance(Box<AdmissibilityReport>),

    #[error("non-positive density integral on cell {0}")]
    NonPositiveDensity(usize),

    #[error("invalid instance data: {0}")]
    BadInstance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
