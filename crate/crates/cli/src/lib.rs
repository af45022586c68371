//! Experiment harness for the `manifold-mom` estimators.
//!
//! [`experiment::run`] replays the simulation studies (median of means on the
//! sphere and on SPD(3), robust PGA on SPD(3)) as CSV tables of per-cell
//! averages with standard errors. [`hands::run_hands`] runs the hand-outline
//! study and [`report::report_bounds`] tabulates the tail bound for planning
//! the number of groups.
//!
//! Results are deterministic for a given seed: replicate `r` draws from
//! `split_seed(seed, r)` and results are gathered in replicate order, so the
//! worker count never changes the output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod hands;
pub mod landmarks;
pub mod report;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiment::{run, run_experiment, run_rpga_experiment, SimOutput};
pub use hands::{run_hands, HandsReport};
pub use landmarks::{load_landmarks, LandmarkDataset};
pub use report::{report_bounds, BoundsReport, BoundsRequest};
pub use table::{MssrTable, ResultTable};
