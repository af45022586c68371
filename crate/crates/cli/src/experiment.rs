//! Replicated simulation runs.
//!
//! Replicate `r` draws everything from `split_seed(seed, r)`, so its results do
//! not depend on which worker runs it. Replicates are collected in index order
//! before aggregation, which makes the output identical for any thread count.

use log::{info, warn};
use manifold_mom::estimators::{median_of_means, SolverConfig, SubsetEstimator};
use manifold_mom::manifold::distance;
use manifold_mom::pga::{mssr_profile, pga, rpga, SpdCoordinates};
use manifold_mom::samplers::{sample_outliers, split_seed, BaseDistribution};
use manifold_mom::Point64;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, THREADS_ENV};
use crate::error::{CliError, Result};
use crate::table::{MssrCell, MssrTable, PgaMethod, ResultCell, ResultTable};

/// Largest tolerated share of failed replicates in any cell.
pub const MAX_FAILURE_RATE: f64 = 0.01;

const CLEAN_STREAM: u64 = 0;
const OUTLIER_STREAM: u64 = 1;
const PARTITION_STREAM: u64 = 1 << 32;

fn worker_count(config: &ExperimentConfig) -> Result<Option<usize>> {
    if let Some(t) = config.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV}={v} is not a positive integer"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `f` for every replicate on a bounded pool and returns the outputs in replicate order.
fn replicates<R: Send>(config: &ExperimentConfig, f: impl Fn(u64) -> R + Sync) -> Result<Vec<R>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = worker_count(config)? {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        (0..config.runs as u64)
            .into_par_iter()
            .map(|r| f(split_seed(config.seed, r)))
            .collect()
    }))
}

/// Clean draws followed by `k` outliers. The clean stream is shared across
/// outlier counts, so the clean part for `k` is a prefix of that for `k' < k`.
/// Streams are keyed by `k` and `m` themselves, so a cell does not depend on
/// which other cells are in the grid.
fn contaminated(
    config: &ExperimentConfig,
    base: &BaseDistribution<f64>,
    k: usize,
    seed: u64,
) -> manifold_mom::Result<(Vec<Point64>, usize)> {
    let clean = config.n - k;
    let mut data = base.sample(clean, split_seed(seed, CLEAN_STREAM));
    let stream = split_seed(seed, OUTLIER_STREAM + k as u64);
    data.extend(sample_outliers(
        base,
        config.confidence_level,
        k,
        config.outlier_mode,
        stream,
    )?);
    Ok((data, clean))
}

fn solver(seed: u64, m: usize) -> SolverConfig {
    SolverConfig::default().with_seed(split_seed(seed, PARTITION_STREAM + m as u64))
}

fn check_failures(k: usize, m: usize, runs: usize, errors: &[Option<String>]) -> Result<()> {
    let failures = errors.iter().filter(|e| e.is_some()).count();
    if failures == 0 {
        return Ok(());
    }
    let last = errors.iter().flatten().last().cloned().unwrap_or_default();
    if failures as f64 > MAX_FAILURE_RATE * runs as f64 {
        return Err(CliError::TooManyFailures {
            k,
            m,
            failures,
            runs,
            last,
        });
    }
    warn!("{failures} of {runs} replicates failed in cell k={k}, m={m}: {last}");
    Ok(())
}

type Outcome = Result<(f64, f64), String>;

fn mean_replicate(
    config: &ExperimentConfig,
    base: &BaseDistribution<f64>,
    seed: u64,
) -> Vec<Outcome> {
    let truth = base.center();
    let metric = config.metric;
    let estimator: SubsetEstimator = config.subset_estimator();
    let mut out = Vec::with_capacity(config.outlier_counts.len() * config.group_counts.len());
    for &k in &config.outlier_counts {
        let data = contaminated(config, base, k, seed);
        for &m in &config.group_counts {
            let outcome = data
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|(data, _)| {
                    let report = median_of_means(data, m, estimator, metric, &solver(seed, m))
                        .map_err(|e| e.to_string())?;
                    let rho = |p: &Point64| distance(p, &truth, metric).map_err(|e| e.to_string());
                    let mom = rho(&report.estimate.estimate)?;
                    let sub = report
                        .subset_estimates
                        .iter()
                        .map(rho)
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((mom, sub.iter().sum::<f64>() / sub.len() as f64))
                });
            out.push(outcome);
        }
    }
    out
}

/// Median-of-means experiment: for every replicate, outlier count `k` and
/// group count `m`, the distance of the estimate and the average distance of
/// the subset means to the population mean.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    if matches!(config.experiment, Experiment::Sim5 | Experiment::Hands) {
        return Err(CliError::Config(format!(
            "{} is not a mean-estimation experiment",
            config.experiment
        )));
    }
    let base = config.base_distribution()?;
    info!(
        "{}: {} replicates on {}",
        config.experiment,
        config.runs,
        config.manifold()
    );
    let rows = replicates(config, |seed| mean_replicate(config, &base, seed))?;
    let mut cells = Vec::new();
    let width = config.group_counts.len();
    for (ki, &k) in config.outlier_counts.iter().enumerate() {
        for (mi, &m) in config.group_counts.iter().enumerate() {
            let col: Vec<&Outcome> = rows.iter().map(|r| &r[ki * width + mi]).collect();
            let errors: Vec<Option<String>> =
                col.iter().map(|o| o.as_ref().err().cloned()).collect();
            check_failures(k, m, config.runs, &errors)?;
            cells.push(ResultCell {
                k,
                m,
                rho_mom: col.iter().map(|o| o.as_ref().ok().map(|v| v.0)).collect(),
                rho_submean: col.iter().map(|o| o.as_ref().ok().map(|v| v.1)).collect(),
            });
        }
    }
    Ok(ResultTable { cells })
}

/// Methods scored in the PGA experiment: PGA, then RPGA for each group count.
fn pga_methods(config: &ExperimentConfig) -> Vec<(PgaMethod, usize)> {
    std::iter::once((PgaMethod::Pga, 1))
        .chain(config.group_counts.iter().map(|&m| (PgaMethod::Rpga, m)))
        .collect()
}

fn pga_replicate(
    config: &ExperimentConfig,
    base: &BaseDistribution<f64>,
    seed: u64,
) -> Vec<Result<Vec<f64>, String>> {
    let dims = config.pga_dims;
    let estimator = SubsetEstimator::damped_gradient();
    let coords = SpdCoordinates::default();
    let mut out = Vec::new();
    for &k in &config.outlier_counts {
        let data = contaminated(config, base, k, seed);
        for (method, m) in pga_methods(config) {
            let outcome = data
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|(data, clean)| {
                    let cfg = solver(seed, m);
                    let basis = match method {
                        PgaMethod::Pga => {
                            let center = estimator
                                .estimate(data, &cfg)
                                .map_err(|e| e.to_string())?
                                .estimate;
                            pga(data, &center, dims, coords)
                        }
                        PgaMethod::Rpga => rpga(data, m, dims, estimator, coords, &cfg),
                    }
                    .map_err(|e| e.to_string())?;
                    mssr_profile(&data[..*clean], &basis, dims, &cfg).map_err(|e| e.to_string())
                });
            out.push(outcome);
        }
    }
    out
}

/// PGA/RPGA experiment: mean squared residual of the clean data to the fitted
/// submanifolds of dimension `1..=pga_dims`.
pub fn run_rpga_experiment(config: &ExperimentConfig) -> Result<MssrTable> {
    config.validate()?;
    if config.experiment != Experiment::Sim5 {
        return Err(CliError::Config(format!(
            "{} is not a PGA experiment",
            config.experiment
        )));
    }
    let base = config.base_distribution()?;
    info!(
        "{}: {} replicates on {}",
        config.experiment,
        config.runs,
        config.manifold()
    );
    let rows = replicates(config, |seed| pga_replicate(config, &base, seed))?;
    let methods = pga_methods(config);
    let mut cells = Vec::new();
    for (ki, &k) in config.outlier_counts.iter().enumerate() {
        for (mi, &(method, m)) in methods.iter().enumerate() {
            let col: Vec<&Result<Vec<f64>, String>> =
                rows.iter().map(|r| &r[ki * methods.len() + mi]).collect();
            let errors: Vec<Option<String>> =
                col.iter().map(|o| o.as_ref().err().cloned()).collect();
            check_failures(k, m, config.runs, &errors)?;
            for dim in 1..=config.pga_dims {
                cells.push(MssrCell {
                    k,
                    method,
                    m,
                    dim,
                    values: col
                        .iter()
                        .map(|o| o.as_ref().ok().map(|v| v[dim - 1]))
                        .collect(),
                });
            }
        }
    }
    Ok(MssrTable { cells })
}

/// Either kind of result, as written by the `sim` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum SimOutput {
    Means(ResultTable),
    Mssr(MssrTable),
}

impl SimOutput {
    pub fn to_csv(&self) -> String {
        match self {
            Self::Means(t) => t.to_csv(),
            Self::Mssr(t) => t.to_csv(),
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<SimOutput> {
    match config.experiment {
        Experiment::Sim5 => run_rpga_experiment(config).map(SimOutput::Mssr),
        _ => run_experiment(config).map(SimOutput::Means),
    }
}
