//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// A real floating-point scalar usable by the geometry and estimators.
///
/// Implemented for `f32` and `f64`. The associated tolerances are the
/// library defaults for that precision; every call site that validates
/// input also has a variant taking an explicit tolerance.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Storage invariants: unit norms, zero centroids, symmetry.
    const STORAGE_TOL: f64;
    /// Tangency checks (orthogonality to the base point).
    const TANGENT_TOL: f64;
    /// Distance below which a Weiszfeld iterate is treated as sitting on a data point.
    const ANCHOR_TOL: f64;

    /// Converts an `f64` literal. Never fails for the two implementors.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to float")
    }
}

impl Real for f64 {
    const STORAGE_TOL: f64 = 1e-12;
    const TANGENT_TOL: f64 = 1e-10;
    const ANCHOR_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const STORAGE_TOL: f64 = 1e-5;
    const TANGENT_TOL: f64 = 1e-4;
    const ANCHOR_TOL: f64 = 1e-6;
}
