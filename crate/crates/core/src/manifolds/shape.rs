//! Kendall's planar shape space `Σ₂ᴷ = S^{2K−3} / S¹`.
//!
//! A shape is stored as a preshape: a centred, unit-norm vector of `2K` reals
//! `x₁, y₁, …, x_K, y_K` (equivalently a vector in `ℂᴷ`). Two preshapes
//! represent the same shape when they differ by a rotation `e^{iθ}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manifolds::sphere;
use crate::Real;

pub(crate) fn centroid<T: Real>(v: &DMatrix<T>) -> (T, T) {
    let k = T::from_usize_lossy(v.len() / 2);
    let (mut sx, mut sy) = (T::zero(), T::zero());
    for c in v.as_slice().chunks_exact(2) {
        sx += c[0];
        sy += c[1];
    }
    (sx / k, sy / k)
}

fn center<T: Real>(v: &DMatrix<T>) -> DMatrix<T> {
    let (cx, cy) = centroid(v);
    let mut out = v.clone();
    for c in out.as_mut_slice().chunks_exact_mut(2) {
        c[0] -= cx;
        c[1] -= cy;
    }
    out
}

/// Multiplication by `i`: every landmark `(x, y)` becomes `(−y, x)`.
pub(crate) fn rotate<T: Real>(v: &DMatrix<T>) -> DMatrix<T> {
    let mut out = v.clone();
    for c in out.as_mut_slice().chunks_exact_mut(2) {
        let (x, y) = (c[0], c[1]);
        c[0] = -y;
        c[1] = x;
    }
    out
}

/// Rotates `q` to the representative closest to `p`. Returns the aligned
/// preshape and `|⟨p, q⟩_ℂ| = cos d(p, q)`.
pub(crate) fn align<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>) -> (DMatrix<T>, T) {
    let iq = rotate(q);
    let a = p.dot(q);
    let b = p.dot(&iq);
    let r = a.hypot(b);
    if r == T::zero() {
        return (q.clone(), r);
    }
    (q * (a / r) + iq * (b / r), r)
}

pub(crate) fn distance<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>) -> T {
    let (aligned, _) = align(p, q);
    sphere::distance(p, &aligned)
}

pub(crate) fn log<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (aligned, r) = align(p, q);
    if r <= T::lit(T::ANCHOR_TOL) {
        return Err(Error::CutLocus);
    }
    let v = sphere::log(p, &aligned)?;
    // Alignment makes the log horizontal; remove the rounding residue.
    Ok(project_tangent(p, &v))
}

pub(crate) fn project_tangent<T: Real>(p: &DMatrix<T>, a: &DMatrix<T>) -> DMatrix<T> {
    let ip = rotate(p);
    let c = center(a);
    let c = &c - p * p.dot(&c);
    let d = ip.dot(&c);
    c - ip * d
}

pub(crate) fn project_to_manifold<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let c = center(a);
    sphere::project_to_manifold(&c)
        .map_err(|_| Error::DegenerateInput("landmarks have zero size after centring".into()))
}
