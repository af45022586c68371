use thiserror::Error;

use crate::manifold::Manifold;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("points live on different manifolds ({0} vs {1})")]
    ManifoldMismatch(Manifold, Manifold),
    #[error("extrinsic metric is only defined for the sphere, not {0}")]
    UnsupportedMetric(Manifold),
    #[error("invalid point on {manifold}: {reason}")]
    InvalidPoint { manifold: Manifold, reason: String },
    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),
    #[error("point lies on the cut locus of the base point")]
    CutLocus,
    #[error("tangent vectors are attached to different base points")]
    BasePointMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("point at distance {distance} exceeds the Lipschitz ball radius {radius}")]
    OutOfBall { distance: f64, radius: f64 },
    #[error("cannot split {n} points into {m} groups")]
    InvalidGroupCount { n: usize, m: usize },
    #[error("no points supplied")]
    EmptyInput,
    #[error("solver did not converge after {iterations} iterations (last step {step_norm:e})")]
    NotConverged { iterations: usize, step_norm: f64 },
    #[error("extrinsic mean undefined: Euclidean mean of the embedded points is zero")]
    ProjectionUndefined,
    #[error("subset estimator failed on group {group}: {source}")]
    Subset { group: usize, source: Box<Error> },
    #[error("alpha = {alpha} is not admissible: {reason}")]
    InadmissibleAlpha { alpha: f64, reason: String },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("group {group} has {size} points; covariance needs at least {min}")]
    GroupTooSmall {
        group: usize,
        size: usize,
        min: usize,
    },
    #[error("rejection sampler exhausted {proposals} proposals")]
    RejectionBudgetExceeded { proposals: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
