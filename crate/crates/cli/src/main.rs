//! `seqloc`: sequential-locality statistics and tests from the command line.
//!
//! Exit codes: 0 on success (a rejected hypothesis is still a success; the
//! decision is in the payload), 2 for validation or infeasible parameters,
//! 3 for I/O and network failures.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "seqloc", version, about = "Hypothesis tests for sequential locality of graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Edge-list file
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Sequence file (one 1-based position per line); identity if omitted
    #[arg(long, global = true)]
    pub sequence: Option<PathBuf>,
    /// Significance level
    #[arg(long, global = true, default_value_t = 0.05)]
    pub alpha: f64,
    /// Random seed
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Graph class for ORGM fits, moments and sampling
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Simple)]
    pub variant: VariantArg,
    /// Output format (each command has its own default)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout if omitted
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Simple,
    Multigraph,
}

impl From<VariantArg> for seqloc::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Simple => seqloc::Variant::Simple,
            VariantArg::Multigraph => seqloc::Variant::Multigraph,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// H1, z1, HG, z_G and per-vertex medians
    Stat,
    /// Hypothesis tests
    #[command(subcommand)]
    Test(TestCommand),
    /// Maximum-likelihood bandwidth of the banded ORGM
    Fit,
    /// In-envelope confidence intervals over a range of bandwidths
    SweepR {
        #[arg(long)]
        r_min: Option<usize>,
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Power of the unoptimized-sequence test against ORGM alternatives
    Power(PowerArgs),
    /// Produce an optimized sequence
    #[command(subcommand)]
    Order(OrderCommand),
    /// Draw a random graph
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Download a file
    Fetch {
        #[arg(long)]
        url: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Unoptimized-sequence test against the uniform fixed-M model
    Er {
        /// One-sided (lower) instead of two-sided
        #[arg(long)]
        one_sided: bool,
    },
    /// Fit the ORGM, test the in-envelope edges and classify
    Orgm {
        /// Bandwidth to test instead of the fitted one
        #[arg(long)]
        r: Option<usize>,
        /// Spectral-ordered ER graphs in the classification reference (0 disables)
        #[arg(long, default_value_t = 100)]
        er_samples: u64,
    },
    /// Random-sequence null
    Seq {
        /// Force exhaustive enumeration
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Number of sampled sequences
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrderCommand {
    Spectral,
    Rcm,
}

#[derive(Debug, Subcommand)]
pub enum SampleCommand {
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
    },
    Orgm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Total edges, split by --eps
        #[arg(long, requires = "eps", conflicts_with_all = ["m_in", "m_out"])]
        m: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, requires = "m_out")]
        m_in: Option<u64>,
        #[arg(long, requires = "m_in")]
        m_out: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    REps,
    NDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    H1,
    Hg,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[arg(long, value_enum, default_value_t = GridKind::REps)]
    pub grid: GridKind,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = StatisticArg::H1)]
    pub statistic: StatisticArg,
    /// Samples per cell in empirical mode
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    /// N for the r-eps grid
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// M for the r-eps grid
    #[arg(long, default_value_t = 200)]
    pub m: u64,
    /// r/N values (r-eps grid)
    #[arg(long, value_delimiter = ',')]
    pub r_over_n: Vec<f64>,
    /// ε values (r-eps grid)
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// N values (n-degree grid)
    #[arg(long, value_delimiter = ',')]
    pub n_values: Vec<usize>,
    /// Average degrees 2M/N (n-degree grid)
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<f64>,
    /// Fixed r/N (n-degree grid)
    #[arg(long, default_value_t = 0.75)]
    pub fixed_r_over_n: f64,
    /// Fixed ε (n-degree grid)
    #[arg(long, default_value_t = 0.0)]
    pub fixed_eps: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
