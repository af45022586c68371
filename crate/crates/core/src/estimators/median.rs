use nalgebra::DMatrix;

use super::{canonical, descend, initial_guess, EstimatorReport, Iterate, SolverConfig};
use crate::error::{Error, Result};
use crate::manifold::{Chart, Manifold, Point};
use crate::manifolds::sphere;
use crate::Real;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Intrinsic,
    Extrinsic,
}

/// A Weiszfeld iterate: for every data point a direction `uᵢ` (the log map,
/// or the chord `pᵢ − x` for the extrinsic median) and a distance `dᵢ`.
struct MedianIterate<T: Real> {
    chart: Chart<T>,
    dirs: Vec<DMatrix<T>>,
    dists: Vec<T>,
    objective: T,
    kind: Kind,
}

impl<T: Real> MedianIterate<T> {
    fn at(x: Point<T>, points: &[&Point<T>], kind: Kind) -> Result<Self> {
        let chart = Chart::new(&x);
        let mut dirs = Vec::with_capacity(points.len());
        let mut dists = Vec::with_capacity(points.len());
        for p in points {
            let (u, d) = match kind {
                Kind::Intrinsic => {
                    let v = chart.log(p)?;
                    let d = chart.norm(&v);
                    (v, d)
                }
                Kind::Extrinsic => {
                    let u = p.coords() - x.coords();
                    let d = u.norm();
                    (u, d)
                }
            };
            dirs.push(u);
            dists.push(d);
        }
        let objective =
            dists.iter().fold(T::zero(), |acc, d| acc + *d) / T::from_usize_lossy(points.len());
        Ok(Self {
            chart,
            dirs,
            dists,
            objective,
            kind,
        })
    }

    /// `(Σ uᵢ/dᵢ, Σ 1/dᵢ, #anchors)` over the points not coinciding with the
    /// iterate, projected onto the tangent space.
    fn weighted_sum(&self) -> (DMatrix<T>, T, usize) {
        let anchor = T::lit(T::ANCHOR_TOL);
        let (r, c) = self.dirs[0].shape();
        let mut num = DMatrix::zeros(r, c);
        let mut den = T::zero();
        let mut anchors = 0;
        for (u, &d) in self.dirs.iter().zip(&self.dists) {
            if d <= anchor {
                anchors += 1;
            } else {
                num += u * (T::one() / d);
                den += T::one() / d;
            }
        }
        if self.kind == Kind::Extrinsic {
            num = sphere::project_tangent(self.chart.base().coords(), &num);
        }
        (num, den, anchors)
    }

    /// Whether the iterate, sitting on a data point, satisfies the optimality
    /// condition `‖Σ uᵢ/dᵢ‖ ≤ #anchors` of the non-smooth objective.
    fn anchored_optimal(&self) -> bool {
        let (num, _, anchors) = self.weighted_sum();
        anchors > 0 && self.chart.norm(&num) <= T::from_usize_lossy(anchors)
    }
}

impl<T: Real> Iterate<T> for MedianIterate<T> {
    // Near a data point with a barely sub-critical pull, Weiszfeld contracts
    // along its own step direction at a rate close to 1.
    const EXTRAPOLATE: bool = true;

    fn chart(&self) -> &Chart<T> {
        &self.chart
    }

    fn objective(&self) -> T {
        self.objective
    }

    fn step(&self) -> DMatrix<T> {
        // Ostresh's modification: terms of data points the iterate sits on are dropped.
        let (num, den, _) = self.weighted_sum();
        if den == T::zero() {
            num
        } else {
            num / den
        }
    }
}

fn weiszfeld<T: Real>(
    points: &[Point<T>],
    kind: Kind,
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    let pts = canonical(points)?;
    let eval = |x| MedianIterate::at(x, &pts, kind);
    let mut checked = vec![false; pts.len()];
    let mut calls = 0usize;
    // Weiszfeld converges slowly onto a median that is a data point, so the
    // nearest data point's optimality is tested directly when the iterate
    // closes in on it, and periodically otherwise.
    let shortcut = |s: &MedianIterate<T>, last: T| -> Result<Option<MedianIterate<T>>> {
        calls += 1;
        let (j, &dj) = s
            .dists
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty sample");
        if checked[j] || (dj > T::lit(10.0) * last && !calls.is_multiple_of(8)) {
            return Ok(None);
        }
        checked[j] = true;
        let at = eval(pts[j].clone())?;
        Ok(at.anchored_optimal().then_some(at))
    };
    descend(eval(initial_guess(&pts))?, eval, shortcut, config)
}

/// Intrinsic geometric median, minimising `(1/n) Σ d(x, pᵢ)` by the Riemannian
/// Weiszfeld iteration `m ← exp_m(Σ log_m pᵢ / dᵢ / Σ 1/dᵢ)`.
pub fn intrinsic_median<T: Real>(
    points: &[Point<T>],
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    weiszfeld(points, Kind::Intrinsic, config)
}

/// Extrinsic geometric median on the sphere, minimising the mean chordal
/// distance `(1/n) Σ ‖x − pᵢ‖` over unit vectors `x`.
pub fn extrinsic_median<T: Real>(
    points: &[Point<T>],
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    let manifold = points.first().ok_or(Error::EmptyInput)?.manifold();
    if !matches!(manifold, Manifold::Sphere { .. }) {
        return Err(Error::UnsupportedMetric(manifold));
    }
    weiszfeld(points, Kind::Extrinsic, config)
}
