//! Points, tangent vectors and the basic Riemannian operations.
//!
//! Every point carries its [`Manifold`] tag and its ambient coordinates as a
//! dense matrix:
//!
//! * `Sphere { dim: d }`: a unit column vector of length `d + 1`;
//! * `PlanarShape { landmarks: K }`: a centred, unit-norm column of length `2K`
//!   holding the landmarks interleaved as `x₁, y₁, …, x_K, y_K` (a preshape
//!   representative of the shape);
//! * `Spd { n }`: an `n × n` symmetric positive-definite matrix.
//!
//! Tangent vectors use the same ambient layout. The sphere and shape space use
//! the Euclidean metric of the ambient space; SPD matrices use the
//! affine-invariant (Fisher–Rao) metric `⟨A, B⟩_p = tr(p⁻¹ A p⁻¹ B)`.
//!
//! On the shape space the quotient by rotations is handled by alignment:
//! `log(p, q)` first rotates `q` by the unit complex number that maximises
//! `Re⟨p, q⟩`, after which all operations are sphere operations between aligned
//! representatives.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, sym_dim, sym_eigenvalues};
use crate::manifolds::{shape, spd, sphere};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    /// The unit sphere `S^dim ⊂ ℝ^{dim+1}`.
    Sphere { dim: usize },
    /// Kendall's planar shape space of `landmarks` points in the plane.
    PlanarShape { landmarks: usize },
    /// Symmetric positive-definite `n × n` matrices.
    Spd { n: usize },
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Sphere { dim } => write!(f, "Sphere({dim})"),
            Manifold::PlanarShape { landmarks } => write!(f, "PlanarShape({landmarks})"),
            Manifold::Spd { n } => write!(f, "SPD({n})"),
        }
    }
}

impl Manifold {
    /// Shape `(rows, cols)` of the ambient coordinate matrix.
    pub fn ambient_shape(&self) -> (usize, usize) {
        match *self {
            Manifold::Sphere { dim } => (dim + 1, 1),
            Manifold::PlanarShape { landmarks } => (2 * landmarks, 1),
            Manifold::Spd { n } => (n, n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        let (r, c) = self.ambient_shape();
        r * c
    }

    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            Manifold::Sphere { dim } => dim,
            // Preshape sphere S^{2K-3} modulo the rotation circle.
            Manifold::PlanarShape { landmarks } => 2 * landmarks - 4,
            Manifold::Spd { n } => sym_dim(n),
        }
    }

    pub fn injectivity_radius<T: Real>(&self) -> T {
        match self {
            Manifold::Sphere { .. } => T::pi(),
            Manifold::PlanarShape { .. } => T::frac_pi_2(),
            Manifold::Spd { .. } => T::lit(f64::INFINITY),
        }
    }

    pub fn supports(&self, metric: MetricKind) -> bool {
        match metric {
            MetricKind::Intrinsic => true,
            MetricKind::Extrinsic => matches!(self, Manifold::Sphere { .. }),
        }
    }

    fn check_metric(&self, metric: MetricKind) -> Result<()> {
        if self.supports(metric) {
            Ok(())
        } else {
            Err(Error::UnsupportedMetric(*self))
        }
    }

    fn check_ambient<T: Real>(&self, a: &DMatrix<T>) -> Result<()> {
        let expected = self.ambient_shape();
        if a.shape() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", expected.0, expected.1),
                got: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        Ok(())
    }
}

/// Which distance a median or error measurement uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetricKind {
    /// Geodesic distance of the Riemannian metric.
    #[default]
    Intrinsic,
    /// Chordal distance of the identity embedding; sphere only.
    Extrinsic,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Intrinsic => "intrinsic",
            MetricKind::Extrinsic => "extrinsic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point<T: Real> {
    manifold: Manifold,
    coords: DMatrix<T>,
}

impl<T: Real> Point<T> {
    /// Validates `coords` against the storage invariants of `manifold`.
    pub fn new(manifold: Manifold, coords: DMatrix<T>) -> Result<Self> {
        Self::with_tolerance(manifold, coords, T::STORAGE_TOL)
    }

    pub fn with_tolerance(manifold: Manifold, coords: DMatrix<T>, tol: f64) -> Result<Self> {
        manifold.check_ambient(&coords)?;
        let tol = T::lit(tol);
        let invalid = |reason: String| Error::InvalidPoint { manifold, reason };
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite coordinate".into()));
        }
        match manifold {
            Manifold::Sphere { .. } => {
                let norm = coords.norm();
                if (norm - T::one()).abs() > tol {
                    return Err(invalid(format!("norm {norm} is not 1")));
                }
            }
            Manifold::PlanarShape { landmarks } => {
                if landmarks < 3 {
                    return Err(invalid("at least 3 landmarks are required".into()));
                }
                let (cx, cy) = shape::centroid(&coords);
                if cx.abs() > tol || cy.abs() > tol {
                    return Err(invalid(format!("centroid ({cx}, {cy}) is not zero")));
                }
                let norm = coords.norm();
                if (norm - T::one()).abs() > tol {
                    return Err(invalid(format!("norm {norm} is not 1")));
                }
            }
            Manifold::Spd { .. } => {
                let asym = max_abs(&(&coords - coords.transpose()));
                if asym > tol * T::one().max(max_abs(&coords)) {
                    return Err(invalid(format!("asymmetry {asym}")));
                }
                let min = sym_eigenvalues(&coords).min();
                if min <= T::zero() {
                    return Err(invalid(format!(
                        "smallest eigenvalue {min} is not positive"
                    )));
                }
            }
        }
        Ok(Self { manifold, coords })
    }

    pub(crate) fn new_unchecked(manifold: Manifold, coords: DMatrix<T>) -> Self {
        debug_assert_eq!(coords.shape(), manifold.ambient_shape());
        Self { manifold, coords }
    }

    /// A point on `S^{len-1}` from its ambient coordinates.
    pub fn sphere(coords: &[T]) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: "at least 2 coordinates".into(),
                got: coords.len().to_string(),
            });
        }
        Self::new(
            Manifold::Sphere {
                dim: coords.len() - 1,
            },
            DMatrix::from_column_slice(coords.len(), 1, coords),
        )
    }

    pub fn spd(matrix: DMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Self::new(Manifold::Spd { n: matrix.nrows() }, matrix)
    }

    /// Centres and scales a landmark configuration into its preshape.
    pub fn shape_from_landmarks(landmarks: &[[T; 2]]) -> Result<Self> {
        let k = landmarks.len();
        let flat: Vec<T> = landmarks.iter().flat_map(|p| [p[0], p[1]]).collect();
        project_to_manifold(
            Manifold::PlanarShape { landmarks: k },
            &DMatrix::from_column_slice(2 * k, 1, &flat),
        )
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn coords(&self) -> &DMatrix<T> {
        &self.coords
    }

    pub fn into_coords(self) -> DMatrix<T> {
        self.coords
    }

    /// Landmark pairs of a shape-space point (or consecutive coordinate pairs otherwise).
    pub fn landmarks(&self) -> Vec<[T; 2]> {
        self.coords
            .as_slice()
            .chunks_exact(2)
            .map(|c| [c[0], c[1]])
            .collect()
    }

    pub fn distance(&self, other: &Self, metric: MetricKind) -> Result<T> {
        distance(self, other, metric)
    }

    pub fn log(&self, other: &Self) -> Result<TangentVector<T>> {
        log(self, other)
    }

    /// The preshape of the same shape rotated to lie closest to `reference`'s
    /// preshape. Other manifolds have one representative per point, returned as is.
    pub fn aligned_to(&self, reference: &Self) -> Result<Self> {
        if self.manifold != reference.manifold {
            return Err(Error::ManifoldMismatch(self.manifold, reference.manifold));
        }
        match self.manifold {
            Manifold::PlanarShape { .. } => {
                let (coords, _) = shape::align(&reference.coords, &self.coords);
                Ok(Self {
                    manifold: self.manifold,
                    coords,
                })
            }
            _ => Ok(self.clone()),
        }
    }

    pub fn zero_tangent(&self) -> TangentVector<T> {
        let (r, c) = self.coords.shape();
        TangentVector {
            base: self.clone(),
            vec: DMatrix::zeros(r, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T: Real> {
    base: Point<T>,
    vec: DMatrix<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Point<T>, vec: DMatrix<T>) -> Result<Self> {
        Self::with_tolerance(base, vec, T::TANGENT_TOL)
    }

    /// Validates tangency with an explicit tolerance (relative to `max(1, ‖vec‖)`).
    pub fn with_tolerance(base: Point<T>, vec: DMatrix<T>, tol: f64) -> Result<Self> {
        base.manifold.check_ambient(&vec)?;
        let tol = T::lit(tol) * T::one().max(vec.norm());
        let p = &base.coords;
        match base.manifold {
            Manifold::Sphere { .. } => {
                let radial = p.dot(&vec);
                if radial.abs() > tol {
                    return Err(Error::InvalidTangent(format!("<v, p> = {radial}")));
                }
            }
            Manifold::PlanarShape { .. } => {
                let radial = p.dot(&vec);
                let vertical = shape::rotate(p).dot(&vec);
                let (cx, cy) = shape::centroid(&vec);
                if radial.abs() > tol || vertical.abs() > tol {
                    return Err(Error::InvalidTangent(format!(
                        "<v, p> = {radial}, <v, İp> = {vertical}"
                    )));
                }
                if cx.abs() > tol || cy.abs() > tol {
                    return Err(Error::InvalidTangent("vector is not centred".into()));
                }
            }
            Manifold::Spd { .. } => {
                let asym = max_abs(&(&vec - vec.transpose()));
                if asym > T::lit(T::STORAGE_TOL) * T::one().max(max_abs(&vec)) {
                    return Err(Error::InvalidTangent(format!("asymmetry {asym}")));
                }
            }
        }
        Ok(Self { base, vec })
    }

    pub(crate) fn new_unchecked(base: Point<T>, vec: DMatrix<T>) -> Self {
        Self { base, vec }
    }

    pub fn base(&self) -> &Point<T> {
        &self.base
    }

    pub fn vec(&self) -> &DMatrix<T> {
        &self.vec
    }

    pub fn into_parts(self) -> (Point<T>, DMatrix<T>) {
        (self.base, self.vec)
    }

    /// Metric norm `‖v‖_base`.
    pub fn norm(&self) -> T {
        Chart::new(&self.base).norm(&self.vec)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            base: self.base.clone(),
            vec: &self.vec * s,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BasePointMismatch);
        }
        Ok(Self {
            base: self.base.clone(),
            vec: &self.vec + &other.vec,
        })
    }

    pub fn exp(&self) -> Point<T> {
        exp(self)
    }
}

fn same_manifold<T: Real>(p: &Point<T>, q: &Point<T>) -> Result<()> {
    if p.manifold != q.manifold {
        return Err(Error::ManifoldMismatch(p.manifold, q.manifold));
    }
    Ok(())
}

/// Intrinsic (geodesic) or extrinsic (chordal) distance.
pub fn distance<T: Real>(p: &Point<T>, q: &Point<T>, metric: MetricKind) -> Result<T> {
    same_manifold(p, q)?;
    p.manifold.check_metric(metric)?;
    Ok(match metric {
        MetricKind::Extrinsic => (&p.coords - &q.coords).norm(),
        MetricKind::Intrinsic => Chart::new(p).distance(q),
    })
}

pub fn exp<T: Real>(v: &TangentVector<T>) -> Point<T> {
    Chart::new(&v.base).exp(&v.vec)
}

/// Riemannian logarithm `log_p(q)`; on the shape space `q` is aligned to `p` first.
pub fn log<T: Real>(p: &Point<T>, q: &Point<T>) -> Result<TangentVector<T>> {
    same_manifold(p, q)?;
    let vec = Chart::new(p).log(q)?;
    Ok(TangentVector::new_unchecked(p.clone(), vec))
}

pub fn inner<T: Real>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    if u.base != v.base {
        return Err(Error::BasePointMismatch);
    }
    Ok(Chart::new(&u.base).inner(&u.vec, &v.vec))
}

/// Orthogonal projection (in the ambient Frobenius inner product) onto `T_p`.
pub fn project_tangent<T: Real>(p: &Point<T>, a: &DMatrix<T>) -> Result<TangentVector<T>> {
    p.manifold.check_ambient(a)?;
    let vec = match p.manifold {
        Manifold::Sphere { .. } => sphere::project_tangent(&p.coords, a),
        Manifold::PlanarShape { .. } => shape::project_tangent(&p.coords, a),
        Manifold::Spd { .. } => spd::project_tangent(a),
    };
    Ok(TangentVector::new_unchecked(p.clone(), vec))
}

/// Nearest point of the manifold to an ambient vector (normalisation on the
/// sphere, centring and normalisation on the shape space, symmetrisation on SPD).
pub fn project_to_manifold<T: Real>(manifold: Manifold, a: &DMatrix<T>) -> Result<Point<T>> {
    manifold.check_ambient(a)?;
    if let Manifold::PlanarShape { landmarks } = manifold {
        if landmarks < 3 {
            let reason = "at least 3 landmarks are required".into();
            return Err(Error::InvalidPoint { manifold, reason });
        }
    }
    let coords = match manifold {
        Manifold::Sphere { .. } => sphere::project_to_manifold(a)?,
        Manifold::PlanarShape { .. } => shape::project_to_manifold(a)?,
        Manifold::Spd { .. } => spd::project_to_manifold(a)?,
    };
    Ok(Point::new_unchecked(manifold, coords))
}

/// A base point with whatever factorisations make repeated `log`/`exp`/distance
/// evaluations from it cheap (the SPD square roots, in particular).
#[derive(Debug, Clone)]
pub struct Chart<T: Real> {
    base: Point<T>,
    spd: Option<spd::SpdChart<T>>,
}

impl<T: Real> Chart<T> {
    pub fn new(base: &Point<T>) -> Self {
        let spd = match base.manifold {
            Manifold::Spd { .. } => Some(spd::SpdChart::at(&base.coords)),
            _ => None,
        };
        Self {
            base: base.clone(),
            spd,
        }
    }

    pub fn base(&self) -> &Point<T> {
        &self.base
    }

    /// Ambient coordinates of `log_base(q)`. `q` must be on the same manifold.
    pub fn log(&self, q: &Point<T>) -> Result<DMatrix<T>> {
        debug_assert_eq!(self.base.manifold, q.manifold);
        let p = &self.base.coords;
        match (&self.spd, self.base.manifold) {
            (Some(c), _) => Ok(c.log(&q.coords)),
            (None, Manifold::Sphere { .. }) => sphere::log(p, &q.coords),
            (None, _) => shape::log(p, &q.coords),
        }
    }

    pub fn log_tangent(&self, q: &Point<T>) -> Result<TangentVector<T>> {
        Ok(TangentVector::new_unchecked(
            self.base.clone(),
            self.log(q)?,
        ))
    }

    /// Geodesic distance from the base point.
    pub fn distance(&self, q: &Point<T>) -> T {
        let p = &self.base.coords;
        match (&self.spd, self.base.manifold) {
            (Some(c), _) => c.distance(&q.coords),
            (None, Manifold::Sphere { .. }) => sphere::distance(p, &q.coords),
            (None, _) => shape::distance(p, &q.coords),
        }
    }

    pub fn exp(&self, v: &DMatrix<T>) -> Point<T> {
        let p = &self.base.coords;
        let coords = match (&self.spd, self.base.manifold) {
            (Some(c), _) => c.exp(v),
            (None, _) => sphere::exp(p, v),
        };
        Point::new_unchecked(self.base.manifold, coords)
    }

    pub fn inner(&self, u: &DMatrix<T>, v: &DMatrix<T>) -> T {
        match &self.spd {
            Some(c) => c.inner(u, v),
            None => u.dot(v),
        }
    }

    pub fn norm(&self, v: &DMatrix<T>) -> T {
        self.inner(v, v).max(T::zero()).sqrt()
    }
}
