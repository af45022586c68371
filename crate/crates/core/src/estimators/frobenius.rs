use nalgebra::DMatrix;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::Real;

/// Result of [`frobenius_median`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusReport<T: Real> {
    pub median: DMatrix<T>,
    pub iterations: usize,
    /// Mean Frobenius distance from the median to the inputs.
    pub objective: T,
    pub converged: bool,
    pub objective_history: Vec<T>,
}

fn mean_distance<T: Real>(x: &DMatrix<T>, ms: &[DMatrix<T>]) -> T {
    ms.iter().fold(T::zero(), |acc, m| acc + (x - m).norm()) / T::from_usize_lossy(ms.len())
}

/// Weiszfeld step from `x` with the terms of coinciding inputs dropped.
/// Returns the target, and `(‖Σ (mᵢ − x)/dᵢ‖, #coinciding)` for the optimality test.
fn weiszfeld_target<T: Real>(x: &DMatrix<T>, ms: &[DMatrix<T>]) -> (DMatrix<T>, T, usize) {
    let anchor = T::lit(T::ANCHOR_TOL);
    let mut num = DMatrix::zeros(x.nrows(), x.ncols());
    let mut pull = DMatrix::zeros(x.nrows(), x.ncols());
    let mut den = T::zero();
    let mut anchors = 0;
    for m in ms {
        let diff = m - x;
        let d = diff.norm();
        if d <= anchor {
            anchors += 1;
            continue;
        }
        num += m * (T::one() / d);
        pull += &diff * (T::one() / d);
        den += T::one() / d;
    }
    let target = if den == T::zero() {
        x.clone()
    } else {
        num / den
    };
    (target, pull.norm(), anchors)
}

/// Geometric median of same-shape matrices under the Frobenius norm, by the
/// classical Weiszfeld iteration in the flat matrix space.
///
/// A data matrix that is itself the median is detected directly (Weiszfeld
/// only approaches such points in the limit).
pub fn frobenius_median<T: Real>(
    matrices: &[DMatrix<T>],
    config: &SolverConfig,
) -> Result<FrobeniusReport<T>> {
    config.validate()?;
    let first = matrices.first().ok_or(Error::EmptyInput)?;
    if let Some(m) = matrices.iter().find(|m| m.shape() != first.shape()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", first.nrows(), first.ncols()),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let report = |median: DMatrix<T>, iterations, converged, history: Vec<T>| FrobeniusReport {
        objective: *history.last().expect("history is never empty"),
        median,
        iterations,
        converged,
        objective_history: history,
    };

    let objectives: Vec<T> = matrices
        .iter()
        .map(|m| mean_distance(m, matrices))
        .collect();
    let best = (0..matrices.len())
        .min_by(|&a, &b| {
            objectives[a]
                .partial_cmp(&objectives[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty input");
    let (_, pull, anchors) = weiszfeld_target(&matrices[best], matrices);
    if pull <= T::from_usize_lossy(anchors) {
        return Ok(report(
            matrices[best].clone(),
            0,
            true,
            vec![objectives[best]],
        ));
    }

    let n = T::from_usize_lossy(matrices.len());
    let mut x = matrices
        .iter()
        .skip(1)
        .fold(first.clone(), |acc, m| acc + m)
        / n;
    let mut f = mean_distance(&x, matrices);
    let mut history = vec![f];
    let tol = T::lit(config.step_tolerance);
    let damping = T::lit(config.step_size);
    let mut last = T::zero();
    for iteration in 1..=config.max_iterations {
        let (target, _, _) = weiszfeld_target(&x, matrices);
        let step = (&target - &x) * damping;
        let norm = step.norm();
        let mut t = T::one();
        loop {
            let candidate = &x + &step * t;
            let fc = mean_distance(&candidate, matrices);
            if fc <= f + T::lit(super::DESCENT_SLACK_ULPS) * T::default_epsilon() * f {
                x = candidate;
                f = fc;
                history.push(f);
                last = norm * t;
                break;
            }
            t *= T::lit(0.5);
            if norm * t <= tol * T::lit(1e-3) {
                return Ok(report(x, iteration, true, history));
            }
        }
        if norm <= tol {
            return Ok(report(x, iteration, true, history));
        }
    }
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        step_norm: last.as_f64(),
    })
}
