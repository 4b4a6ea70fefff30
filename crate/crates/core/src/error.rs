use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate in point {index}")]
    NonFinite { index: usize },
    #[error("point set is empty")]
    Empty,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("points {first} and {second} coincide (distance {distance:e})")]
    Duplicate {
        first: usize,
        second: usize,
        distance: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ray has no positive support: the tangent polytope is unbounded in this direction")]
    UnboundedRay,
    #[error("bound is degenerate for delta^2 = {delta_sq} (needs delta^2 < 2)")]
    DegenerateBound { delta_sq: f64 },
    #[error("point {index} is not in convex position")]
    NotConvexPosition { index: usize },
    #[error("no outer normal found at point {index}")]
    NoOuterNormal { index: usize },
    #[error("point is not a member of the net")]
    NotInNet,
    #[error("d={dim}, n={n}: {reason}; minimal admissible n is {min_n}")]
    BelowThreshold {
        dim: usize,
        n: u64,
        reason: String,
        min_n: u128,
    },
    #[error("spiral nesting failed after {depth} polygons")]
    NestingFailure { depth: usize },
    #[error("peeling stalled with {remaining} points left and no extreme point found")]
    PeelStalled { remaining: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
