use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use manifold_mom::samplers::OutlierMode;
use manifold_mom::MetricKind;
use manifold_mom_cli::config::{parse_metric, parse_outlier_mode};
use manifold_mom_cli::landmarks::bundled_hands;
use manifold_mom_cli::report::SECOND_MOMENT_DRAWS;
use manifold_mom_cli::table::write_text;
use manifold_mom_cli::{
    load_landmarks, report_bounds, run, run_hands, BoundsRequest, Experiment, ExperimentConfig,
    Result,
};

#[derive(Parser)]
#[command(
    name = "mom",
    version,
    about = "Median-of-means experiments on manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study or the hand-shape study.
    Sim(SimArgs),
    /// Tabulate the median-of-means tail bound over a grid of alpha and epsilon.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct Common {
    /// sim1..sim5 or hands.
    #[arg(long, short)]
    experiment: Experiment,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// intrinsic or extrinsic; defaults to the experiment's own metric.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<MetricKind>,
    /// Comma-separated group counts.
    #[arg(long, value_delimiter = ',')]
    groups: Option<Vec<usize>>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Total sample size, outliers included.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    /// Replicates; defaults to the desk-scale count.
    #[arg(long)]
    runs: Option<usize>,
    /// Use the replicate counts of the original study.
    #[arg(long)]
    full: bool,
    /// Output CSV file, or output directory for `hands`.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated outlier counts.
    #[arg(long, value_delimiter = ',')]
    outliers: Option<Vec<usize>>,
    /// conditional or uniform.
    #[arg(long, value_parser = parse_outlier_mode)]
    outlier_mode: Option<OutlierMode>,
    /// Worker threads (also settable through MOM_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Landmark CSV for `hands`; the bundled synthetic hands by default.
    #[arg(long)]
    landmarks: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
    alpha_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    epsilon: Vec<f64>,
    /// Embedding angle for the extrinsic constant (0 is a diagnostic default).
    #[arg(long, default_value_t = 0.0)]
    psi_bar: f64,
    /// Monte Carlo draws for the second moment.
    #[arg(long, default_value_t = SECOND_MOMENT_DRAWS)]
    draws: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(self.experiment);
        c.seed = self.seed;
        if let Some(m) = self.metric {
            c.metric = m;
        }
        if let Some(g) = &self.groups {
            c.group_counts = g.clone();
        }
        if let Some(k) = self.kappa {
            c.kappa = k;
        }
        if let Some(n) = self.n {
            c.n = n;
        }
        c
    }
}

fn sim(args: SimArgs) -> Result<()> {
    let mut c = args.common.config();
    if args.full {
        c = c.full();
    }
    if let Some(r) = args.runs {
        c.runs = r;
    }
    if let Some(k) = args.outliers {
        c.outlier_counts = k;
    }
    if let Some(mode) = args.outlier_mode {
        c.outlier_mode = mode;
    }
    c.threads = args.threads;
    c.output_path = Some(args.out.clone());
    if c.experiment == Experiment::Hands {
        let data = match &args.landmarks {
            Some(p) => load_landmarks(p)?,
            None => bundled_hands()?,
        };
        let report = run_hands(&c, &data)?;
        for p in report.write(&args.out)? {
            info!("wrote {}", p.display());
        }
        println!(
            "distance to clean mean: sample mean {:.6}, geometric median {:.6}",
            report.sample_mean_to_clean, report.median_to_clean
        );
        return Ok(());
    }
    let out = run(&c)?;
    write_text(&args.out, &out.to_csv())?;
    info!("wrote {}", args.out.display());
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let c = args.common.config();
    let request = BoundsRequest {
        alphas: args.alpha_grid,
        epsilons: args.epsilon,
        psi_bar: args.psi_bar,
        draws: args.draws,
    };
    let csv = report_bounds(&c, &request)?.to_csv();
    match &args.out {
        Some(p) => write_text(p, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or("warn,manifold_mom=error"),
    )
    .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sim(a) => sim(a),
        Command::Bounds(a) => bounds(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
