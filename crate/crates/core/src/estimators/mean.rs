use log::warn;
use nalgebra::DMatrix;

use super::{canonical, descend, initial_guess, EstimatorReport, Iterate, SolverConfig};
use crate::error::{Error, Result};
use crate::manifold::{Chart, Manifold, Point};
use crate::Real;

#[derive(Clone, Copy)]
enum Update {
    FixedPoint,
    Gradient,
}

struct MeanIterate<T: Real> {
    chart: Chart<T>,
    logs: Vec<DMatrix<T>>,
    dists: Vec<T>,
    objective: T,
    update: Update,
}

impl<T: Real> MeanIterate<T> {
    fn at(x: Point<T>, points: &[&Point<T>], update: Update) -> Result<Self> {
        let chart = Chart::new(&x);
        let mut logs = Vec::with_capacity(points.len());
        let mut dists = Vec::with_capacity(points.len());
        for p in points {
            let v = chart.log(p)?;
            dists.push(chart.norm(&v));
            logs.push(v);
        }
        let n = T::from_usize_lossy(points.len());
        let objective = dists.iter().fold(T::zero(), |acc, d| acc + *d * *d) / n;
        Ok(Self {
            chart,
            logs,
            dists,
            objective,
            update,
        })
    }
}

impl<T: Real> Iterate<T> for MeanIterate<T> {
    // Mass near the antipode of the mean flattens the Fréchet function, and
    // the plain update then creeps towards the minimiser.
    const EXTRAPOLATE: bool = true;

    fn chart(&self) -> &Chart<T> {
        &self.chart
    }

    fn objective(&self) -> T {
        self.objective
    }

    fn step(&self) -> DMatrix<T> {
        let sum = self
            .logs
            .iter()
            .skip(1)
            .fold(self.logs[0].clone(), |acc, v| acc + v);
        let n = T::from_usize_lossy(self.logs.len());
        match self.update {
            Update::Gradient => sum / n,
            Update::FixedPoint => {
                // Ψ(x) = Σ θᵢ/sin θᵢ · pᵢ = (Σ θᵢ cot θᵢ) x + Σ log_x pᵢ; the
                // normalised Ψ is the exponential of the step below.
                let c = self.dists.iter().fold(T::zero(), |acc, &theta| {
                    let s = theta.sin();
                    acc + if s > T::lit(1e-8) {
                        theta * theta.cos() / s
                    } else {
                        T::one()
                    }
                });
                let g = sum.norm();
                if g == T::zero() {
                    sum
                } else if T::lit(4.0) * c < T::lit(3.0) * n {
                    // c stands in for the Hessian, whose radial part is n. Far
                    // points shrink c, and a step scaled by 1/c then overshoots
                    // radially; the gradient step 1/n cannot.
                    sum / n
                } else {
                    sum * (g.atan2(c) / g)
                }
            }
        }
    }
}

/// Warns when no open hemisphere contains every point (the Fréchet mean may not be unique).
fn check_hemisphere<T: Real>(points: &[&Point<T>]) {
    let mut w = points
        .iter()
        .skip(1)
        .fold(points[0].coords().clone(), |acc, p| acc + p.coords());
    for _ in 0..10 * points.len() + 100 {
        match points.iter().find(|p| p.coords().dot(&w) <= T::zero()) {
            None => return,
            Some(p) => w += p.coords(),
        }
    }
    warn!(
        "sample does not appear to lie in an open hemisphere; the Fréchet mean may not be unique"
    );
}

/// Intrinsic Fréchet mean on the sphere by the fixed-point iteration
/// `μ ← Ψ(μ)/‖Ψ(μ)‖`, `Ψ(x) = Σ γᵢ(x) pᵢ`, `γᵢ(x) = arccos⟨x, pᵢ⟩ / √(1 − ⟨x, pᵢ⟩²)`.
/// While `Σ θᵢ cot θᵢ < 3n/4` (`θᵢ` the distances to the iterate) it takes
/// the gradient step instead.
pub fn intrinsic_mean_sphere<T: Real>(
    points: &[Point<T>],
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    let pts = canonical(points)?;
    let manifold = pts[0].manifold();
    if !matches!(manifold, Manifold::Sphere { .. }) {
        return Err(Error::Domain(format!(
            "fixed-point mean needs a sphere, got {manifold}"
        )));
    }
    check_hemisphere(&pts);
    let eval = |x| MeanIterate::at(x, &pts, Update::FixedPoint);
    descend(eval(initial_guess(&pts))?, eval, |_, _| Ok(None), config)
}

/// Fréchet mean by damped Riemannian gradient descent,
/// `μ ← exp_μ(step · (1/n) Σ log_μ xᵢ)`. Works on every manifold; on SPD the
/// minimiser is unique.
pub fn intrinsic_mean_gradient<T: Real>(
    points: &[Point<T>],
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    let pts = canonical(points)?;
    let eval = |x| MeanIterate::at(x, &pts, Update::Gradient);
    descend(eval(initial_guess(&pts))?, eval, |_, _| Ok(None), config)
}

/// Extrinsic mean on the sphere: the normalised Euclidean average.
pub fn extrinsic_mean<T: Real>(points: &[Point<T>]) -> Result<EstimatorReport<T>> {
    let pts = canonical(points)?;
    let manifold = pts[0].manifold();
    if !matches!(manifold, Manifold::Sphere { .. }) {
        return Err(Error::UnsupportedMetric(manifold));
    }
    let n = T::from_usize_lossy(pts.len());
    let mean = pts
        .iter()
        .skip(1)
        .fold(pts[0].coords().clone(), |acc, p| acc + p.coords())
        / n;
    let norm = mean.norm();
    if norm <= T::lit(T::ANCHOR_TOL) {
        return Err(Error::ProjectionUndefined);
    }
    let estimate = Point::new_unchecked(manifold, mean / norm);
    let objective = pts.iter().fold(T::zero(), |acc, p| {
        acc + (estimate.coords() - p.coords()).norm_squared()
    }) / n;
    Ok(EstimatorReport::exact(estimate, objective))
}
