//! Unit sphere `S^d ⊂ ℝ^{d+1}` with the round metric.
//!
//! Points and tangent vectors are column vectors. Distances use
//! `2·atan2(‖p − q‖, ‖p + q‖)`, which equals `arccos(pᵀq)` but keeps full
//! relative precision for nearby points.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Real;

pub(crate) fn distance<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>) -> T {
    let minus = (p - q).norm();
    let plus = (p + q).norm();
    T::lit(2.0) * minus.atan2(plus)
}

/// `log_p(q) = θ/‖u‖ · u` with `u = q − (pᵀq) p`, computed as the tangent
/// component of `q − p` to avoid cancellation.
pub(crate) fn log<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let diff = q - p;
    let plus = (p + q).norm();
    if plus <= T::lit(T::ANCHOR_TOL) {
        return Err(Error::CutLocus);
    }
    let mut u = &diff - p * p.dot(&diff);
    let s = u.norm();
    if s == T::zero() {
        return Ok(u);
    }
    let theta = T::lit(2.0) * diff.norm().atan2(plus);
    u *= theta / s;
    Ok(u)
}

pub(crate) fn exp<T: Real>(p: &DMatrix<T>, v: &DMatrix<T>) -> DMatrix<T> {
    let n = v.norm();
    if n == T::zero() {
        return p.clone();
    }
    let out = p * n.cos() + v * (n.sin() / n);
    let norm = out.norm();
    out / norm
}

pub(crate) fn project_tangent<T: Real>(p: &DMatrix<T>, a: &DMatrix<T>) -> DMatrix<T> {
    a - p * p.dot(a)
}

pub(crate) fn project_to_manifold<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.norm();
    if n == T::zero() || !n.is_finite() {
        return Err(Error::DegenerateInput(
            "cannot normalise a zero vector".into(),
        ));
    }
    Ok(a / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearby_distance_keeps_precision() {
        let p = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let t = 1e-9_f64;
        let q = DMatrix::from_column_slice(3, 1, &[t.cos(), t.sin(), 0.0]);
        assert!((distance(&p, &q) - t).abs() < 1e-22);
        let v = log(&p, &q).unwrap();
        assert!((v[1] - t).abs() < 1e-22);
    }
}
