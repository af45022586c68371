//! Geometric median of hand outlines contaminated with ellipses.

use std::path::{Path, PathBuf};

use manifold_mom::estimators::{median_of_means, SolverConfig, SubsetEstimator};
use manifold_mom::samplers::{ellipse_shape, split_seed};
use manifold_mom::{MetricKind, Point64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::landmarks::{write_landmarks, LandmarkDataset};

/// Ellipse semi-axes are drawn uniformly from this range.
pub const ELLIPSE_AXES: std::ops::Range<f64> = 0.5..1.0;

pub const CONTAMINATED_FILE: &str = "contaminated.csv";
pub const SUBSET_MEANS_FILE: &str = "subset_means.csv";
pub const SAMPLE_MEAN_FILE: &str = "sample_mean.csv";
pub const GEOMETRIC_MEDIAN_FILE: &str = "geometric_median.csv";

const ELLIPSE_STREAM: u64 = 0;
const PARTITION_STREAM: u64 = 1;

/// Every shape is rotated onto the clean-data mean so the files plot in a common frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HandsReport {
    /// Clean shapes followed by the ellipses.
    pub contaminated: Vec<Point64>,
    pub subset_means: Vec<Point64>,
    /// Fréchet mean of the contaminated sample.
    pub sample_mean: Point64,
    /// Geometric median of the subset means.
    pub geometric_median: Point64,
    /// Fréchet mean of the clean shapes alone.
    pub clean_mean: Point64,
    pub sample_mean_to_clean: f64,
    pub median_to_clean: f64,
}

impl HandsReport {
    /// Writes the four landmark files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let files: [(&str, &[Point64]); 4] = [
            (CONTAMINATED_FILE, &self.contaminated),
            (SUBSET_MEANS_FILE, &self.subset_means),
            (SAMPLE_MEAN_FILE, std::slice::from_ref(&self.sample_mean)),
            (
                GEOMETRIC_MEDIAN_FILE,
                std::slice::from_ref(&self.geometric_median),
            ),
        ];
        let mut paths = Vec::new();
        for (name, shapes) in files {
            let path = dir.join(name);
            write_landmarks(&path, shapes)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Adds `config.outlier_counts[0]` ellipses to the data, splits the sample into
/// `config.group_counts[0]` random groups and takes the geometric median of the
/// group means.
pub fn run_hands(config: &ExperimentConfig, dataset: &LandmarkDataset) -> Result<HandsReport> {
    config.validate()?;
    if config.experiment != Experiment::Hands {
        return Err(CliError::Config(format!(
            "{} is not the hand-shape study",
            config.experiment
        )));
    }
    let (&k, &m) = match (
        config.outlier_counts.as_slice(),
        config.group_counts.as_slice(),
    ) {
        ([k], [m]) => (k, m),
        _ => {
            return Err(CliError::Config(
                "the hand study takes exactly one outlier count and one group count".into(),
            ))
        }
    };
    if dataset.is_empty() {
        return Err(CliError::Config(format!(
            "{} holds no shapes",
            dataset.source.display()
        )));
    }
    let n = dataset.len() + k;
    if m > n {
        return Err(CliError::Config(format!(
            "cannot split {n} shapes into {m} groups"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(config.seed, ELLIPSE_STREAM));
    let mut data = dataset.shapes.clone();
    for _ in 0..k {
        let (a, b) = (
            rng.random_range(ELLIPSE_AXES),
            rng.random_range(ELLIPSE_AXES),
        );
        data.push(ellipse_shape(a, b, dataset.landmarks)?);
    }

    let mean = SubsetEstimator::default_for(config.manifold());
    let solver = SolverConfig::default().with_seed(split_seed(config.seed, PARTITION_STREAM));
    let report = median_of_means(&data, m, mean, MetricKind::Intrinsic, &solver)?;
    let sample_mean = mean.estimate(&data, &solver)?.estimate;
    let clean_mean = mean.estimate(&dataset.shapes, &solver)?.estimate;
    let geometric_median = report.estimate.estimate;

    let align = |shapes: &[Point64]| {
        shapes
            .iter()
            .map(|s| s.aligned_to(&clean_mean))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(HandsReport {
        contaminated: align(&data)?,
        subset_means: align(&report.subset_estimates)?,
        sample_mean_to_clean: sample_mean.distance(&clean_mean, MetricKind::Intrinsic)?,
        median_to_clean: geometric_median.distance(&clean_mean, MetricKind::Intrinsic)?,
        sample_mean: sample_mean.aligned_to(&clean_mean)?,
        geometric_median: geometric_median.aligned_to(&clean_mean)?,
        clean_mean,
    })
}
