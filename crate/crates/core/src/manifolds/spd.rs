//! Symmetric positive-definite matrices with the affine-invariant metric
//! `⟨A, B⟩_p = tr(p⁻¹ A p⁻¹ B)`.
//!
//! Matrix functions go through the symmetric eigendecomposition.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, sym_map, symmetrize};
use crate::Real;

/// Factorisations of a base point `p`: `p^{1/2}`, `p^{-1/2}` and `p⁻¹`.
#[derive(Debug, Clone)]
pub(crate) struct SpdChart<T: Real> {
    sqrt: DMatrix<T>,
    inv_sqrt: DMatrix<T>,
    inv: DMatrix<T>,
}

impl<T: Real> SpdChart<T> {
    pub(crate) fn at(p: &DMatrix<T>) -> Self {
        Self {
            sqrt: sym_map(p, |l| l.sqrt()),
            inv_sqrt: sym_map(p, |l| T::one() / l.sqrt()),
            inv: sym_map(p, |l| T::one() / l),
        }
    }

    /// `p^{-1/2} q p^{-1/2}`.
    pub(crate) fn whiten(&self, q: &DMatrix<T>) -> DMatrix<T> {
        symmetrize(&(&self.inv_sqrt * q * &self.inv_sqrt))
    }

    pub(crate) fn unwhiten(&self, w: &DMatrix<T>) -> DMatrix<T> {
        symmetrize(&(&self.sqrt * w * &self.sqrt))
    }

    /// `log(p^{-1/2} q p^{-1/2})`: the log map in whitened coordinates.
    pub(crate) fn whitened_log(&self, q: &DMatrix<T>) -> DMatrix<T> {
        sym_map(&self.whiten(q), |l| l.ln())
    }

    pub(crate) fn log(&self, q: &DMatrix<T>) -> DMatrix<T> {
        self.unwhiten(&self.whitened_log(q))
    }

    pub(crate) fn distance(&self, q: &DMatrix<T>) -> T {
        sym_eigenvalues(&self.whiten(q))
            .iter()
            .fold(T::zero(), |acc, l| acc + l.ln() * l.ln())
            .sqrt()
    }

    pub(crate) fn exp(&self, v: &DMatrix<T>) -> DMatrix<T> {
        let w = self.whiten(v);
        self.unwhiten(&sym_map(&w, |l| l.exp()))
    }

    pub(crate) fn inner(&self, u: &DMatrix<T>, v: &DMatrix<T>) -> T {
        (&self.inv * u).dot(&(v * &self.inv))
    }
}

pub(crate) fn project_tangent<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    symmetrize(a)
}

pub(crate) fn project_to_manifold<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let s = symmetrize(a);
    let min = sym_eigenvalues(&s).min();
    if !(min > T::zero()) {
        return Err(Error::DegenerateInput(format!(
            "symmetrisation has smallest eigenvalue {min}"
        )));
    }
    Ok(s)
}
