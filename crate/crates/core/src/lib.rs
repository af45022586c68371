//! Median-of-means estimation on Riemannian manifolds.
//!
//! The crate covers three manifolds (the unit sphere `S^d`, Kendall's planar
//! shape space `Σ₂ᴷ` and the cone of symmetric positive-definite matrices with
//! the affine-invariant metric) and builds on them:
//!
//! * [`manifold`]: points, tangent vectors, `exp`/`log`, distances and projections;
//! * [`manifolds`]: per-manifold constants such as log-map Lipschitz constants;
//! * [`estimators`]: Fréchet means, intrinsic/extrinsic geometric medians and
//!   the median-of-means aggregate;
//! * [`bounds`]: the concentration constants and tail bound of the median-of-means
//!   estimator, plus the von Mises–Fisher geodesic CDF;
//! * [`pga`]: principal geodesic analysis and its robust median-of-means variant;
//! * [`samplers`]: seeded generators for every simulation input.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix `f64`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod estimators;
mod linalg;
pub mod manifold;
pub mod manifolds;
pub mod pga;
pub mod samplers;
mod scalar;

pub use error::{Error, Result};
pub use manifold::{Manifold, MetricKind, Point, TangentVector};
pub use scalar::Real;

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type TangentVector64 = TangentVector<f64>;
pub type TangentVector32 = TangentVector<f32>;
pub type EstimatorReport64 = estimators::EstimatorReport<f64>;
pub type MomReport64 = estimators::MomReport<f64>;
pub type TangentBasis64 = pga::TangentBasis<f64>;
