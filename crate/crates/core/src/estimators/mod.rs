//! Fréchet means, geometric medians and the median-of-means estimator.
//!
//! Every iterative solver here is a descent method on a manifold: from the
//! current iterate it proposes a tangent step, shortens it by halving until
//! the empirical objective does not increase, and stops when the proposed
//! step is shorter than [`SolverConfig::step_tolerance`]. The objective of
//! every accepted iterate is kept in [`EstimatorReport::objective_history`].
//!
//! Close to a minimiser a step of length `s` changes the objective by `O(s²)`,
//! which drops below the rounding error of the objective long before `s`
//! reaches the tolerance. The descent test therefore allows an increase of
//! [`DESCENT_SLACK_ULPS`] units in the last place of the current value.
//!
//! Inputs are put into a canonical (lexicographic) order before any
//! arithmetic, so results do not depend on the order of the input slice.

mod frobenius;
mod mean;
mod median;
mod mom;
mod partition;

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manifold::{project_to_manifold, Chart, Manifold, Point};
use crate::manifolds::shape;
use crate::Real;

pub use frobenius::{frobenius_median, FrobeniusReport};
pub use mean::{extrinsic_mean, intrinsic_mean_gradient, intrinsic_mean_sphere};
pub use median::{extrinsic_median, intrinsic_median};
pub use mom::{
    geometric_median, median_of_means, median_of_means_with_partition, subset_estimates, MomReport,
    SubsetEstimator,
};
pub use partition::{partition, SubsetPartition};

/// Rounding allowance of the descent test, in multiples of `ε·|f|`.
pub const DESCENT_SLACK_ULPS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once a proposed step is shorter than this (geodesic units).
    pub step_tolerance: f64,
    /// Damping factor applied to every proposed step.
    pub step_size: f64,
    /// Seed for the random partition of median-of-means.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            step_tolerance: 1e-10,
            step_size: 1.0,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Defaults for the damped gradient mean on SPD matrices (`step_size = 0.5`).
    pub fn damped() -> Self {
        Self {
            step_size: 0.5,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(Error::InvalidConfig(
                "step_tolerance must be positive".into(),
            ));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::InvalidConfig("step_size must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport<T: Real> {
    pub estimate: Point<T>,
    pub iterations: usize,
    /// Metric norm of the last proposed (or, after backtracking, attempted) step.
    pub final_step_norm: T,
    /// Empirical risk at the estimate: mean squared distance for means, mean distance for medians.
    pub objective: T,
    pub converged: bool,
    pub objective_history: Vec<T>,
}

impl<T: Real> EstimatorReport<T> {
    pub(crate) fn exact(estimate: Point<T>, objective: T) -> Self {
        Self {
            estimate,
            iterations: 0,
            final_step_norm: T::zero(),
            objective,
            converged: true,
            objective_history: vec![objective],
        }
    }
}

fn lexicographic<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Validates a sample and returns it in canonical order.
pub(crate) fn canonical<T: Real>(points: &[Point<T>]) -> Result<Vec<&Point<T>>> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    if let Some(q) = points.iter().find(|q| q.manifold() != first.manifold()) {
        return Err(Error::ManifoldMismatch(first.manifold(), q.manifold()));
    }
    let mut sorted: Vec<&Point<T>> = points.iter().collect();
    sorted.sort_by(|a, b| lexicographic(a.coords(), b.coords()));
    Ok(sorted)
}

/// One iterate of a descent solver.
pub(crate) trait Iterate<T: Real>: Sized {
    fn chart(&self) -> &Chart<T>;
    fn objective(&self) -> T;
    /// Full proposed step, a tangent vector at the current iterate.
    fn step(&self) -> DMatrix<T>;
    /// Whether a fully accepted step should be lengthened (doubling) while the
    /// objective keeps decreasing.
    const EXTRAPOLATE: bool = false;
}

/// Backtracking descent shared by all manifold solvers.
///
/// `shortcut` is consulted after every accepted step and may return a final
/// iterate (used by the medians to jump onto an optimal data point).
pub(crate) fn descend<T, S>(
    start: S,
    eval: impl Fn(Point<T>) -> Result<S>,
    mut shortcut: impl FnMut(&S, T) -> Result<Option<S>>,
    config: &SolverConfig,
) -> Result<EstimatorReport<T>>
where
    T: Real,
    S: Iterate<T>,
{
    config.validate()?;
    let tol = T::lit(config.step_tolerance);
    let damping = T::lit(config.step_size);
    let half = T::lit(0.5);
    let mut state = start;
    let mut history = vec![state.objective()];
    let mut last = T::zero();
    let finish = |state: S, iterations, step, history| EstimatorReport {
        objective: state.objective(),
        estimate: state.chart().base().clone(),
        iterations,
        final_step_norm: step,
        converged: true,
        objective_history: history,
    };

    for iteration in 1..=config.max_iterations {
        let v = state.step() * damping;
        let norm = state.chart().norm(&v);
        if !norm.is_finite() {
            return Err(Error::DegenerateInput(
                "solver produced a non-finite step".into(),
            ));
        }
        let mut t = T::one();
        let accepted = loop {
            if let Ok(candidate) = eval(state.chart().exp(&(&v * t))) {
                let slack =
                    T::lit(DESCENT_SLACK_ULPS) * T::default_epsilon() * state.objective().abs();
                if candidate.objective() <= state.objective() + slack {
                    break Some(candidate);
                }
            }
            t *= half;
            if norm * t <= tol * T::lit(1e-3) {
                break None;
            }
        };
        let Some(mut next) = accepted else {
            // No descent along the proposed direction: the iterate is optimal
            // to working precision.
            return Ok(finish(state, iteration, norm * t, history));
        };
        if S::EXTRAPOLATE && t == T::one() && norm > tol {
            for _ in 0..30 {
                let longer = match eval(state.chart().exp(&(&v * (t + t)))) {
                    Ok(c) if c.objective() < next.objective() => c,
                    _ => break,
                };
                next = longer;
                t += t;
            }
        }
        state = next;
        history.push(state.objective());
        last = norm * t;
        if norm <= tol {
            return Ok(finish(state, iteration, norm, history));
        }
        if let Some(jump) = shortcut(&state, last)? {
            if jump.objective() <= state.objective() {
                history.push(jump.objective());
                return Ok(finish(jump, iteration, T::zero(), history));
            }
        }
    }
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        step_norm: last.as_f64(),
    })
}

/// Starting point for the iterative solvers: the normalised Euclidean average
/// on the sphere, the same after rotating every shape onto the first one on
/// the shape space, and the (always positive-definite) arithmetic mean on SPD.
pub(crate) fn initial_guess<T: Real>(pts: &[&Point<T>]) -> Point<T> {
    let manifold = pts[0].manifold();
    let first = pts[0].coords();
    let sum = pts
        .iter()
        .skip(1)
        .fold(first.clone(), |acc, p| match manifold {
            Manifold::PlanarShape { .. } => acc + shape::align(first, p.coords()).0,
            _ => acc + p.coords(),
        });
    project_to_manifold(manifold, &(sum / T::from_usize_lossy(pts.len())))
        .unwrap_or_else(|_| pts[0].clone())
}
