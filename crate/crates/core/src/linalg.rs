//! Symmetric-matrix helpers: spectral functions and the isometric
//! vectorisation of symmetric matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::Real;

pub(crate) fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// `U f(Λ) Uᵀ` for a symmetric matrix `m = U Λ Uᵀ`.
pub(crate) fn sym_map<T: Real>(m: &DMatrix<T>, f: impl Fn(T) -> T) -> DMatrix<T> {
    let eig = SymmetricEigen::new(m.clone());
    let mut scaled = eig.eigenvectors.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let fj = f(*lambda);
        scaled.column_mut(j).scale_mut(fj);
    }
    symmetrize(&(scaled * eig.eigenvectors.transpose()))
}

pub(crate) fn sym_eigenvalues<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    m.clone().symmetric_eigenvalues()
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Number of free coordinates of an `n × n` symmetric matrix.
pub(crate) fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric matrix → coordinate vector ordered `(d11, …, dnn, o12, o13, …, o(n-1)n)`,
/// off-diagonal entries multiplied by `offdiag_scale`.
///
/// With `offdiag_scale = √2` the Euclidean inner product of coordinates equals
/// the Frobenius inner product of the matrices.
pub(crate) fn sym_to_coords<T: Real>(m: &DMatrix<T>, offdiag_scale: T) -> DVector<T> {
    let n = m.nrows();
    let mut out = DVector::zeros(sym_dim(n));
    for i in 0..n {
        out[i] = m[(i, i)];
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            out[k] = m[(i, j)] * offdiag_scale;
            k += 1;
        }
    }
    out
}

pub(crate) fn coords_to_sym<T: Real>(c: &DVector<T>, n: usize, offdiag_scale: T) -> DMatrix<T> {
    debug_assert_eq!(c.len(), sym_dim(n));
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c[i];
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = c[k] / offdiag_scale;
            m[(i, j)] = v;
            m[(j, i)] = v;
            k += 1;
        }
    }
    m
}

/// Gram–Schmidt over the projected standard basis, keeping the first `count`
/// independent directions. `project` must be an orthogonal projector.
pub(crate) fn orthonormal_frame<T: Real>(
    ambient: usize,
    count: usize,
    project: impl Fn(&DVector<T>) -> DVector<T>,
) -> Vec<DVector<T>> {
    let mut frame: Vec<DVector<T>> = Vec::with_capacity(count);
    let threshold = T::lit(1e-3);
    for i in 0..ambient {
        if frame.len() == count {
            break;
        }
        let mut e = DVector::zeros(ambient);
        e[i] = T::one();
        let mut v = project(&e);
        // Two passes keep the frame orthonormal to working precision.
        for _ in 0..2 {
            for f in &frame {
                let c = f.dot(&v);
                v.axpy(-c, f, T::one());
            }
        }
        let norm = v.norm();
        if norm > threshold {
            frame.push(v / norm);
        }
    }
    frame
}
