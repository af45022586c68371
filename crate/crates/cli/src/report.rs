//! Planning table for the median-of-means tail bound: for each group count
//! `m`, confidence parameter `α` and radius `ε`, the Chebyshev estimate of
//! `η`, the constant `C̄_α` and the bound on `P(ρ(μ*, μ) > C̄_α ε)`.

use std::fmt::Write as _;

use manifold_mom::bounds::{
    c_alpha_extrinsic, c_alpha_intrinsic, eta_chebyshev_extrinsic, eta_chebyshev_intrinsic,
    theorem_bound,
};
use manifold_mom::manifold::distance;
use manifold_mom::manifolds::spec_of;
use manifold_mom::samplers::split_seed;
use manifold_mom::{Error, MetricKind};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};

pub const BOUNDS_HEADER: &str = "m,alpha,epsilon,eta,c_alpha,radius,bound,status";

/// Draws used to estimate `E ρ²(μ, x)` by default.
pub const SECOND_MOMENT_DRAWS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRequest {
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Embedding angle for the extrinsic constant. The default 0 is a
    /// diagnostic choice, not a property of the data.
    pub psi_bar: f64,
    pub draws: usize,
}

impl Default for BoundsRequest {
    fn default() -> Self {
        Self {
            alphas: vec![0.1, 0.2, 0.3, 0.4],
            epsilons: vec![0.1],
            psi_bar: 0.0,
            draws: SECOND_MOMENT_DRAWS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Ok,
    /// `η ≥ α`: the bound says nothing.
    Vacuous,
    /// `α` outside the range where `C̄_α` exists.
    Inadmissible,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Vacuous => "vacuous",
            Self::Inadmissible => "inadmissible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub m: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub eta: f64,
    /// NaN when inadmissible.
    pub c_alpha: f64,
    pub bound: f64,
    pub status: BoundStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub second_moment: f64,
    pub psi_bar: f64,
    pub metric: MetricKind,
    pub rows: Vec<BoundRow>,
}

impl BoundsReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# metric={:?} second_moment={} psi_bar={}\n{BOUNDS_HEADER}\n",
            self.metric, self.second_moment, self.psi_bar
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6e},{:.6},{:.6},{:.6e},{}",
                r.m,
                r.alpha,
                r.epsilon,
                r.eta,
                r.c_alpha,
                r.c_alpha * r.epsilon,
                r.bound,
                r.status.as_str()
            );
        }
        out
    }
}

/// Monte Carlo estimate of `E ρ²(μ, x)` for the clean-data distribution.
pub fn second_moment(config: &ExperimentConfig, draws: usize) -> Result<f64> {
    let base = config.base_distribution()?;
    let center = base.center();
    let pts = base.sample(draws, split_seed(config.seed, 0));
    let mut sum = 0.0;
    for p in &pts {
        sum += distance(p, &center, config.metric)?.powi(2);
    }
    Ok(sum / draws as f64)
}

pub fn report_bounds(config: &ExperimentConfig, request: &BoundsRequest) -> Result<BoundsReport> {
    config.validate()?;
    if matches!(config.experiment, Experiment::Hands) {
        return Err(CliError::Config(
            "bounds need a simulated distribution, not the hand data".into(),
        ));
    }
    if request.alphas.is_empty() || request.epsilons.is_empty() {
        return Err(CliError::Config(
            "need at least one alpha and one epsilon".into(),
        ));
    }
    if request
        .epsilons
        .iter()
        .any(|e| !(*e > 0.0 && e.is_finite()))
    {
        return Err(CliError::Config("epsilon values must be positive".into()));
    }
    if request.draws < 2 {
        return Err(CliError::Config(
            "need at least two draws for the second moment".into(),
        ));
    }
    let moment = second_moment(config, request.draws)?;
    let lipschitz = spec_of(config.manifold()).log_lipschitz_k;
    let mut rows = Vec::new();
    for &m in &config.group_counts {
        for &alpha in &request.alphas {
            for &epsilon in &request.epsilons {
                let eta = match config.metric {
                    MetricKind::Intrinsic => {
                        eta_chebyshev_intrinsic(epsilon, m, config.n, lipschitz, moment)?
                    }
                    MetricKind::Extrinsic => eta_chebyshev_extrinsic(epsilon, m, config.n, moment)?,
                };
                let c_alpha = match config.metric {
                    MetricKind::Intrinsic => c_alpha_intrinsic(alpha, lipschitz),
                    MetricKind::Extrinsic => c_alpha_extrinsic(alpha, request.psi_bar),
                };
                let row = match c_alpha {
                    Err(Error::InadmissibleAlpha { .. }) => BoundRow {
                        m,
                        alpha,
                        epsilon,
                        eta,
                        c_alpha: f64::NAN,
                        bound: 1.0,
                        status: BoundStatus::Inadmissible,
                    },
                    Err(e) => return Err(e.into()),
                    Ok(c_alpha) if eta >= alpha => BoundRow {
                        m,
                        alpha,
                        epsilon,
                        eta,
                        c_alpha,
                        bound: 1.0,
                        status: BoundStatus::Vacuous,
                    },
                    Ok(c_alpha) if eta == 0.0 => BoundRow {
                        m,
                        alpha,
                        epsilon,
                        eta,
                        c_alpha,
                        bound: 0.0,
                        status: BoundStatus::Ok,
                    },
                    Ok(c_alpha) => BoundRow {
                        m,
                        alpha,
                        epsilon,
                        eta,
                        c_alpha,
                        bound: theorem_bound(m, alpha, eta)?,
                        status: BoundStatus::Ok,
                    },
                };
                rows.push(row);
            }
        }
    }
    Ok(BoundsReport {
        second_moment: moment,
        psi_bar: request.psi_bar,
        metric: config.metric,
        rows,
    })
}
