//! Principal geodesic analysis (PGA) and its robust median-of-means variant
//! (RPGA).
//!
//! Data are mapped into an orthonormal coordinate system of the tangent space
//! at a centre, where ordinary PCA is performed. RPGA centres at the
//! median-of-means estimate and replaces the covariance by the Frobenius
//! geometric median of per-group covariances. Fits are scored by the mean
//! squared geodesic residual (mSSR) to the exponentiated principal subspace.

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::estimators::{
    frobenius_median, median_of_means_with_partition, partition, SolverConfig, SubsetEstimator,
};
use crate::linalg::{coords_to_sym, orthonormal_frame, sym_map, sym_to_coords, symmetrize};
use crate::manifold::{project_tangent, Chart, Manifold, MetricKind, Point, TangentVector};
use crate::manifolds::spd::SpdChart;
use crate::Real;

/// Eigenvalues below this are reported as degenerate.
pub const DEGENERATE_EIGENVALUE: f64 = 1e-14;

/// Smallest group RPGA accepts for a per-group covariance.
pub const MIN_GROUP_SIZE: usize = 2;

/// Tangent coordinates used on SPD matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpdCoordinates {
    /// Coordinates of `c^{-1/2} log_c(x) c^{-1/2}`: Euclidean geometry of the
    /// coordinates is the affine-invariant metric at the centre.
    #[default]
    Whitened,
    /// Coordinates of `log_c(x)` itself (Frobenius geometry of the ambient matrices).
    Raw,
}

/// An orthonormal coordinate system of the tangent space at a centre.
///
/// On SPD the coordinates of a symmetric matrix `S` are
/// `(s₁₁, …, sₙₙ, √2·s₁₂, √2·s₁₃, …, √2·s₍ₙ₋₁₎ₙ)`, applied to the whitened or
/// raw log. On the sphere and shape space they are the components in a fixed
/// orthonormal frame of the (horizontal) tangent space.
#[derive(Debug, Clone)]
pub struct TangentFrame<T: Real> {
    chart: Chart<T>,
    kind: FrameKind<T>,
}

#[derive(Debug, Clone)]
enum FrameKind<T: Real> {
    Spd {
        spd: SpdChart<T>,
        coords: SpdCoordinates,
        n: usize,
    },
    Embedded(DMatrix<T>),
}

impl<T: Real> TangentFrame<T> {
    pub fn new(center: &Point<T>, coords: SpdCoordinates) -> Self {
        let chart = Chart::new(center);
        let kind = match center.manifold() {
            Manifold::Spd { n } => FrameKind::Spd {
                spd: SpdChart::at(center.coords()),
                coords,
                n,
            },
            m => {
                let ambient = m.ambient_dim();
                let frame = orthonormal_frame(ambient, m.intrinsic_dim(), |v: &DVector<T>| {
                    let a = DMatrix::from_column_slice(ambient, 1, v.as_slice());
                    let t = project_tangent(center, &a).expect("ambient dimension matches");
                    DVector::from_column_slice(t.vec().as_slice())
                });
                FrameKind::Embedded(DMatrix::from_columns(&frame))
            }
        };
        Self { chart, kind }
    }

    pub fn center(&self) -> &Point<T> {
        self.chart.base()
    }

    pub fn dim(&self) -> usize {
        self.center().manifold().intrinsic_dim()
    }

    /// Coordinates of `log_center(x)`.
    pub fn coordinates(&self, x: &Point<T>) -> Result<DVector<T>> {
        if x.manifold() != self.center().manifold() {
            return Err(Error::ManifoldMismatch(
                self.center().manifold(),
                x.manifold(),
            ));
        }
        let sqrt2 = T::lit(std::f64::consts::SQRT_2);
        Ok(match &self.kind {
            FrameKind::Spd {
                spd,
                coords: SpdCoordinates::Whitened,
                ..
            } => sym_to_coords(&spd.whitened_log(x.coords()), sqrt2),
            FrameKind::Spd {
                spd,
                coords: SpdCoordinates::Raw,
                ..
            } => sym_to_coords(&spd.log(x.coords()), sqrt2),
            FrameKind::Embedded(e) => {
                let v = self.chart.log(x)?;
                e.tr_mul(&DVector::from_column_slice(v.as_slice()))
            }
        })
    }

    /// The ambient tangent vector at the centre with coordinates `c`.
    pub fn tangent(&self, c: &DVector<T>) -> TangentVector<T> {
        let sqrt2 = T::lit(std::f64::consts::SQRT_2);
        let vec = match &self.kind {
            FrameKind::Spd { spd, coords, n } => {
                let s = coords_to_sym(c, *n, sqrt2);
                match coords {
                    SpdCoordinates::Whitened => spd.unwhiten(&s),
                    SpdCoordinates::Raw => s,
                }
            }
            FrameKind::Embedded(e) => {
                let (r, cols) = self.center().manifold().ambient_shape();
                DMatrix::from_column_slice(r, cols, (e * c).as_slice())
            }
        };
        TangentVector::new_unchecked(self.center().clone(), vec)
    }

    /// Whitened symmetric matrix `c^{-1/2} v c^{-1/2}` of the tangent vector with coordinates `c` (SPD only).
    fn whitened(&self, c: &DVector<T>) -> Option<DMatrix<T>> {
        let sqrt2 = T::lit(std::f64::consts::SQRT_2);
        match &self.kind {
            FrameKind::Spd { spd, coords, n } => {
                let s = coords_to_sym(c, *n, sqrt2);
                Some(match coords {
                    SpdCoordinates::Whitened => s,
                    SpdCoordinates::Raw => spd.whiten(&s),
                })
            }
            FrameKind::Embedded(_) => None,
        }
    }
}

/// Whitened isometric coordinates of `log_center(x)` (see [`TangentFrame`]).
pub fn tangent_coordinates<T: Real>(center: &Point<T>, x: &Point<T>) -> Result<DVector<T>> {
    TangentFrame::new(center, SpdCoordinates::Whitened).coordinates(x)
}

/// Principal directions at a centre.
#[derive(Debug, Clone)]
pub struct TangentBasis<T: Real> {
    pub frame: TangentFrame<T>,
    /// Unit directions in frame coordinates, by decreasing eigenvalue.
    pub coordinates: Vec<DVector<T>>,
    pub eigenvalues: Vec<T>,
    /// The (aggregated) covariance the directions diagonalise.
    pub covariance: DMatrix<T>,
    /// Set when a returned eigenvalue is below [`DEGENERATE_EIGENVALUE`].
    pub degenerate: bool,
}

impl<T: Real> TangentBasis<T> {
    pub fn center(&self) -> &Point<T> {
        self.frame.center()
    }

    /// The directions as tangent vectors at the centre.
    pub fn directions(&self) -> Vec<TangentVector<T>> {
        self.coordinates
            .iter()
            .map(|c| self.frame.tangent(c))
            .collect()
    }

    fn from_covariance(
        frame: TangentFrame<T>,
        covariance: DMatrix<T>,
        count: usize,
    ) -> Result<Self> {
        if count == 0 || count > frame.dim() {
            return Err(Error::Domain(format!(
                "number of directions {count} is outside 1..={}",
                frame.dim()
            )));
        }
        let eig = SymmetricEigen::new(covariance.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut coordinates = Vec::with_capacity(count);
        let mut eigenvalues = Vec::with_capacity(count);
        for &j in order.iter().take(count) {
            let mut v: DVector<T> = eig.eigenvectors.column(j).into_owned();
            // Fix the sign: largest-magnitude component positive.
            let (imax, _) = v.iter().enumerate().fold((0, T::zero()), |acc, (i, x)| {
                if x.abs() > acc.1 {
                    (i, x.abs())
                } else {
                    acc
                }
            });
            if v[imax] < T::zero() {
                v = -v;
            }
            coordinates.push(v);
            eigenvalues.push(eig.eigenvalues[j]);
        }
        let degenerate = eigenvalues
            .iter()
            .any(|l| *l < T::lit(DEGENERATE_EIGENVALUE));
        if degenerate {
            warn!("covariance is degenerate: eigenvalues {eigenvalues:?}");
        }
        Ok(Self {
            frame,
            coordinates,
            eigenvalues,
            covariance,
            degenerate,
        })
    }
}

/// Second-moment matrix `(1/n) Σ cᵢ cᵢᵀ` of tangent coordinates about the centre.
fn second_moment<T: Real>(coords: &[DVector<T>]) -> DMatrix<T> {
    let d = coords[0].len();
    let mut cov = DMatrix::zeros(d, d);
    for c in coords {
        cov.ger(T::one(), c, c, T::one());
    }
    symmetrize(&(cov / T::from_usize_lossy(coords.len())))
}

/// PGA: eigen-decomposition of the covariance of tangent coordinates about `center`.
pub fn pga<T: Real>(
    points: &[Point<T>],
    center: &Point<T>,
    num_directions: usize,
    coords: SpdCoordinates,
) -> Result<TangentBasis<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let frame = TangentFrame::new(center, coords);
    let c = points
        .iter()
        .map(|x| frame.coordinates(x))
        .collect::<Result<Vec<_>>>()?;
    TangentBasis::from_covariance(frame, second_moment(&c), num_directions)
}

/// RPGA: centre at the median-of-means estimate over a seeded partition into
/// `m` groups, then take the Frobenius geometric median of the groups'
/// covariances (about that centre) and diagonalise it. Returns the basis and
/// the partition used.
pub fn rpga<T: Real>(
    points: &[Point<T>],
    m: usize,
    num_directions: usize,
    estimator: SubsetEstimator,
    coords: SpdCoordinates,
    config: &SolverConfig,
) -> Result<TangentBasis<T>> {
    let partition = partition(points.len(), m, config.seed)?;
    if m > 1 {
        if let Some((group, g)) = partition
            .groups()
            .iter()
            .enumerate()
            .find(|(_, g)| g.len() < MIN_GROUP_SIZE)
        {
            return Err(Error::GroupTooSmall {
                group,
                size: g.len(),
                min: MIN_GROUP_SIZE,
            });
        }
    }
    let mom = median_of_means_with_partition(
        points,
        partition,
        estimator,
        MetricKind::Intrinsic,
        config,
    )?;
    let frame = TangentFrame::new(&mom.estimate.estimate, coords);
    let c = points
        .iter()
        .map(|x| frame.coordinates(x))
        .collect::<Result<Vec<_>>>()?;
    let covs: Vec<DMatrix<T>> = mom
        .partition
        .groups()
        .iter()
        .map(|g| second_moment(&g.iter().map(|&i| c[i].clone()).collect::<Vec<_>>()))
        .collect();
    let cov = frobenius_median(&covs, config)?.median;
    TangentBasis::from_covariance(frame, cov, num_directions)
}

/// Closest point of a geodesic submanifold to a data point.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Real> {
    pub point: Point<T>,
    /// Coefficients along the first `k` directions of the basis.
    pub coefficients: Vec<T>,
    /// Geodesic distance from the data point to `point`.
    pub residual: T,
    pub converged: bool,
}

/// Squared distance from `x` to `exp_center(Σ aᵢ vᵢ)`.
struct SubmanifoldObjective<'a, T: Real> {
    basis: &'a TangentBasis<T>,
    x: &'a Point<T>,
    /// SPD only: whitened directions and `c^{-1/2} x c^{-1/2}`.
    spd: Option<(Vec<DMatrix<T>>, DMatrix<T>)>,
}

impl<'a, T: Real> SubmanifoldObjective<'a, T> {
    fn new(basis: &'a TangentBasis<T>, k: usize, x: &'a Point<T>) -> Self {
        let spd = match &basis.frame.kind {
            FrameKind::Spd { spd, .. } => {
                let dirs = basis.coordinates[..k]
                    .iter()
                    .map(|c| basis.frame.whitened(c).expect("SPD frame"))
                    .collect();
                Some((dirs, spd.whiten(x.coords())))
            }
            FrameKind::Embedded(_) => None,
        };
        Self { basis, x, spd }
    }

    fn combination(&self, a: &[T]) -> DVector<T> {
        let d = self.basis.frame.dim();
        a.iter()
            .zip(&self.basis.coordinates)
            .fold(DVector::zeros(d), |acc, (ai, c)| acc + c * *ai)
    }

    fn point(&self, a: &[T]) -> Point<T> {
        self.basis.frame.tangent(&self.combination(a)).exp()
    }

    fn eval(&self, a: &[T]) -> T {
        match &self.spd {
            Some((dirs, y)) => {
                // d(c^{1/2} e^W c^{1/2}, x) = d(e^W, y) = ‖log(e^{-W/2} y e^{-W/2})‖.
                let n = y.nrows();
                let w = a
                    .iter()
                    .zip(dirs)
                    .fold(DMatrix::zeros(n, n), |acc, (ai, d)| acc + d * *ai);
                let h = sym_map(&w, |l| (-l * T::lit(0.5)).exp());
                let z = symmetrize(&(&h * y * &h));
                z.symmetric_eigenvalues()
                    .iter()
                    .fold(T::zero(), |acc, l| acc + l.ln() * l.ln())
            }
            None => {
                let d = Chart::new(self.x).distance(&self.point(a));
                d * d
            }
        }
    }
}

/// Quasi-Newton (BFGS) minimisation with central finite-difference gradients.
/// Returns the best point, its value and whether a stopping test was met.
fn bfgs<T: Real>(f: impl Fn(&[T]) -> T, x0: Vec<T>, config: &SolverConfig) -> (Vec<T>, T, bool) {
    let k = x0.len();
    let h = T::lit(1e-6);
    let grad = |x: &[T]| -> DVector<T> {
        let mut xp = x.to_vec();
        DVector::from_fn(k, |i, _| {
            let xi = xp[i];
            xp[i] = xi + h;
            let fp = f(&xp);
            xp[i] = xi - h;
            let fm = f(&xp);
            xp[i] = xi;
            (fp - fm) / (h + h)
        })
    };
    let tol = T::lit(config.step_tolerance);
    let gtol = T::lit(1e-9);
    let mut x = DVector::from_vec(x0);
    let mut fx = f(x.as_slice());
    let mut g = grad(x.as_slice());
    let mut hinv = DMatrix::<T>::identity(k, k);
    for _ in 0..config.max_iterations {
        if g.norm() <= gtol {
            return (x.data.into(), fx, true);
        }
        let mut p = -(&hinv * &g);
        let mut slope = g.dot(&p);
        if slope >= T::zero() {
            hinv = DMatrix::identity(k, k);
            p = -g.clone();
            slope = g.dot(&p);
        }
        let mut t = T::one();
        let accepted = loop {
            let xn = &x + &p * t;
            let fxn = f(xn.as_slice());
            if fxn <= fx + T::lit(1e-4) * t * slope {
                break Some((xn, fxn));
            }
            t *= T::lit(0.5);
            if t * p.norm() <= tol * T::lit(1e-3) {
                break None;
            }
        };
        let Some((xn, fxn)) = accepted else {
            // No decrease along a descent direction: stationary to the
            // accuracy of the finite-difference gradient.
            return (x.data.into(), fx, true);
        };
        let s = &xn - &x;
        let gn = grad(xn.as_slice());
        let y = &gn - &g;
        let sy = s.dot(&y);
        x = xn;
        fx = fxn;
        g = gn;
        if s.norm() <= tol {
            return (x.data.into(), fx, true);
        }
        if sy > T::lit(1e-14) {
            let rho = T::one() / sy;
            let i = DMatrix::<T>::identity(k, k);
            let left = &i - &s * y.transpose() * rho;
            let right = &i - &y * s.transpose() * rho;
            hinv = &left * &hinv * &right + &s * s.transpose() * rho;
        }
    }
    (x.data.into(), fx, false)
}

fn project_with_start<T: Real>(
    basis: &TangentBasis<T>,
    k: usize,
    x: &Point<T>,
    warm: Option<&[T]>,
    config: &SolverConfig,
) -> Result<Projection<T>> {
    if k == 0 || k > basis.coordinates.len() {
        return Err(Error::Domain(format!(
            "k = {k} is outside 1..={}",
            basis.coordinates.len()
        )));
    }
    let objective = SubmanifoldObjective::new(basis, k, x);
    let f = |a: &[T]| objective.eval(a);
    let cx = basis.frame.coordinates(x)?;
    let linear: Vec<T> = basis.coordinates[..k].iter().map(|w| w.dot(&cx)).collect();
    // Start from the best of the linearised projection, the centre and the
    // warm start (an optimum of a smaller nested submanifold).
    let mut start = (f(&linear), linear);
    let mut candidates = vec![vec![T::zero(); k]];
    if let Some(w) = warm {
        let mut padded = w.to_vec();
        padded.resize(k, T::zero());
        candidates.push(padded);
    }
    for c in candidates {
        let v = f(&c);
        if v < start.0 {
            start = (v, c);
        }
    }
    let (a, value, converged) = bfgs(f, start.1, config);
    if !converged {
        warn!(
            "submanifold projection stopped after {} iterations",
            config.max_iterations
        );
    }
    Ok(Projection {
        point: objective.point(&a),
        coefficients: a,
        residual: value.max(T::zero()).sqrt(),
        converged,
    })
}

/// Projection of `x` onto `exp_center(span(v₁, …, v_k))`.
pub fn project_to_submanifold<T: Real>(
    basis: &TangentBasis<T>,
    k: usize,
    x: &Point<T>,
    config: &SolverConfig,
) -> Result<Projection<T>> {
    project_with_start(basis, k, x, None, config)
}

/// `mSSR` for every subspace dimension `1..=max_k`: entry `k−1` is
/// `(1/n) Σ residualᵢ²` to the `k`-dimensional submanifold. Each dimension's
/// optimisation is warm-started from the previous one, so the profile is
/// non-increasing.
pub fn mssr_profile<T: Real>(
    points: &[Point<T>],
    basis: &TangentBasis<T>,
    max_k: usize,
    config: &SolverConfig,
) -> Result<Vec<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sums = vec![T::zero(); max_k];
    for x in points {
        let mut warm: Option<Vec<T>> = None;
        for k in 1..=max_k {
            let p = project_with_start(basis, k, x, warm.as_deref(), config)?;
            sums[k - 1] += p.residual * p.residual;
            warm = Some(p.coefficients);
        }
    }
    let n = T::from_usize_lossy(points.len());
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// Intrinsic mean squared residual of `points` to the `k`-dimensional submanifold.
pub fn mssr<T: Real>(
    points: &[Point<T>],
    basis: &TangentBasis<T>,
    k: usize,
    config: &SolverConfig,
) -> Result<T> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    Ok(mssr_profile(points, basis, k, config)?[k - 1])
}
