use super::{
    extrinsic_mean, extrinsic_median, intrinsic_mean_gradient, intrinsic_mean_sphere,
    intrinsic_median, partition, EstimatorReport, SolverConfig, SubsetPartition,
};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, MetricKind, Point};
use crate::Real;

/// Estimator applied to each subset before the median is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsetEstimator {
    /// [`intrinsic_mean_sphere`]: fixed-point Fréchet mean, sphere only.
    FixedPointSphere,
    /// [`intrinsic_mean_gradient`] with its own damping factor.
    Gradient { step_size: f64 },
    /// [`extrinsic_mean`]: normalised Euclidean average, sphere only.
    Extrinsic,
}

impl SubsetEstimator {
    /// The damped gradient mean with `step_size = 0.5`.
    pub fn damped_gradient() -> Self {
        Self::Gradient { step_size: 0.5 }
    }

    /// Fixed-point mean on the sphere, undamped gradient mean on the shape
    /// space, damped gradient mean on SPD.
    pub fn default_for(manifold: Manifold) -> Self {
        match manifold {
            Manifold::Sphere { .. } => Self::FixedPointSphere,
            Manifold::PlanarShape { .. } => Self::Gradient { step_size: 1.0 },
            Manifold::Spd { .. } => Self::damped_gradient(),
        }
    }

    pub fn estimate<T: Real>(
        self,
        points: &[Point<T>],
        config: &SolverConfig,
    ) -> Result<EstimatorReport<T>> {
        match self {
            Self::FixedPointSphere => intrinsic_mean_sphere(points, config),
            Self::Gradient { step_size } => intrinsic_mean_gradient(
                points,
                &SolverConfig {
                    step_size,
                    ..*config
                },
            ),
            Self::Extrinsic => extrinsic_mean(points),
        }
    }
}

/// Intrinsic or extrinsic geometric median.
pub fn geometric_median<T: Real>(
    points: &[Point<T>],
    metric: MetricKind,
    config: &SolverConfig,
) -> Result<EstimatorReport<T>> {
    match metric {
        MetricKind::Intrinsic => intrinsic_median(points, config),
        MetricKind::Extrinsic => extrinsic_median(points, config),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomReport<T: Real> {
    /// The geometric median of the subset estimates.
    pub estimate: EstimatorReport<T>,
    /// One estimate per group, in group order.
    pub subset_estimates: Vec<Point<T>>,
    pub partition: SubsetPartition,
}

/// Runs `estimator` on every group of `partition`. A group of one point
/// returns that point. Failures are tagged with the group index.
pub fn subset_estimates<T: Real>(
    points: &[Point<T>],
    partition: &SubsetPartition,
    estimator: SubsetEstimator,
    config: &SolverConfig,
) -> Result<Vec<Point<T>>> {
    if partition.n() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} points", partition.n()),
            got: points.len().to_string(),
        });
    }
    partition
        .groups()
        .iter()
        .enumerate()
        .map(|(group, idx)| {
            if let [i] = idx[..] {
                return Ok(points[i].clone());
            }
            let subset: Vec<Point<T>> = idx.iter().map(|&i| points[i].clone()).collect();
            estimator
                .estimate(&subset, config)
                .map(|r| r.estimate)
                .map_err(|e| Error::Subset {
                    group,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Median-of-means: split the sample into `m` random groups (seeded by
/// `config.seed`), estimate the mean of each group, and return the geometric
/// median of those estimates.
pub fn median_of_means<T: Real>(
    points: &[Point<T>],
    m: usize,
    estimator: SubsetEstimator,
    median: MetricKind,
    config: &SolverConfig,
) -> Result<MomReport<T>> {
    let partition = partition(points.len(), m, config.seed)?;
    median_of_means_with_partition(points, partition, estimator, median, config)
}

pub fn median_of_means_with_partition<T: Real>(
    points: &[Point<T>],
    partition: SubsetPartition,
    estimator: SubsetEstimator,
    median: MetricKind,
    config: &SolverConfig,
) -> Result<MomReport<T>> {
    config.validate()?;
    let subset_estimates = subset_estimates(points, &partition, estimator, config)?;
    let estimate = geometric_median(&subset_estimates, median, config)?;
    Ok(MomReport {
        estimate,
        subset_estimates,
        partition,
    })
}
