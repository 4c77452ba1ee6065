mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wignerlab::harness::IndexRule;
use wignerlab::local_stats::EdgeSide;
use wignerlab::spectral::ComplexGrid;
use wignerlab::Interval;

pub const EXIT_OK: u8 = 0;
pub const EXIT_THRESHOLD: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "wignerlab",
    version,
    about = "Sample Wigner-type random matrices and test spectral statistics against the semicircle law",
    long_about = "Sample Wigner-type random matrices and test spectral statistics against the \
semicircle law.\n\nEnsembles are builtin names (gue, goe, bernoulli_complex, bernoulli_real, \
three_point_gue_matched, three_point_goe_matched), inline JSON, or a path to a JSON file.\n\n\
Exit codes: 0 success, 1 a threshold failed, 2 usage or configuration error, 3 runtime error."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Master seed; every trial seed is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent). With CSV output a JSON summary is
    /// written next to it as <stem>.summary.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for trial execution.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Primary output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Record wall-clock time per trial in the wall_ms column (otherwise 0).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Print a trial counter on stderr.
    #[arg(long, global = true)]
    pub progress: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Unnormalized M_n with unit-variance entries.
    M,
    /// W_n = M_n / sqrt(n).
    W,
    /// A_n = sqrt(n) M_n.
    A,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Top,
    Bottom,
}

impl From<SideArg> for EdgeSide {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Top => EdgeSide::Top,
            SideArg::Bottom => EdgeSide::Bottom,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    /// Ensemble for single-ensemble runs.
    #[arg(long, default_value = "gue")]
    pub ensemble: String,
    /// First ensemble of a two-ensemble comparison (with --ensemble-b).
    #[arg(long, requires = "ensemble_b")]
    pub ensemble_a: Option<String>,
    /// Second ensemble of a two-ensemble comparison (with --ensemble-a).
    #[arg(long, requires = "ensemble_a")]
    pub ensemble_b: Option<String>,
    /// Matrix dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub n: Vec<usize>,
    /// Trials per ensemble and dimension.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Fraction of trials that must meet a per-trial bound.
    #[arg(long)]
    pub min_pass_fraction: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the entries of one sampled matrix as CSV (i,j,re,im).
    Sample {
        #[arg(long, default_value = "gue")]
        ensemble: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Scale::W)]
        scale: Scale,
    },
    /// Eigenvalues (or full eigendecomposition) of one sampled W_n.
    Spectrum {
        #[arg(long, default_value = "gue")]
        ensemble: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Also write eigenvectors.
        #[arg(long)]
        vectors: bool,
    },
    /// Eigenvalue counts in an interval against n times the semicircle
    /// mass (semicircle law down to short intervals).
    Esd {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        interval: Interval,
        /// Per-trial bound |N_I - n mass| <= delta n |I|.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Per-trial bound on |N_I/n - mass|.
        #[arg(long)]
        max_fraction_error: Option<f64>,
    },
    /// Stieltjes transform of the ESD against the semicircle transform on a
    /// grid (convergence of s_n(z) to s(z) near the real axis).
    Stieltjes {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// re_min:re_max:steps,im_min:im_max:steps
        #[arg(long, default_value = "-3:3:13,0.1:0.1:1", allow_hyphen_values = true)]
        grid: ComplexGrid,
        #[arg(long)]
        max_deviation: Option<f64>,
    },
    /// Largest eigenvector coordinate against C n^{-1/2} log n
    /// (eigenvector delocalization).
    Deloc {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 10.0)]
        constant: f64,
    },
    /// Cauchy interlacing with the minor and the distance of the top
    /// eigenvalue to the minor's top eigenvalue relative to the top gap
    /// (interlacing bias at the edge).
    Interlace {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 0.2)]
        max_ratio: f64,
    },
    /// Residuals of the Schur-complement resolvent identity, the
    /// interlacing identity and the eigenvector-coordinate formula.
    Identities {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// Spectral parameter re,im with im > 0.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Top or bottom k eigenvalues at the edge scale n^{2/3}; with two
    /// ensembles, a KS test per coordinate (edge universality).
    Edge {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Top)]
        side: SideArg,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Frequency of small A-scale gaps lambda_{i+1} - lambda_i < n^{-c0}
    /// (gap tail bound). Index: n, n-K, n/K, a fraction, or an integer.
    Gaps {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "n/2")]
        index: IndexRule,
        #[arg(long, default_value_t = 0.1)]
        c0: f64,
        #[arg(long, default_value_t = 0.05)]
        max_frequency: f64,
    },
    /// Monte Carlo difference of E G(eigenvalues of A_n) between two
    /// ensembles with matching moments (four moment comparison).
    Fourmoment {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// Test function: `edge` (top-edge coordinate), `coordinate`, or a
        /// JSON document.
        #[arg(long, default_value = "edge")]
        g: String,
        /// Eigenvalue indices, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "n")]
        indices: Vec<IndexRule>,
        #[arg(long, default_value_t = 3.0)]
        stderr_multiple: f64,
    },
    /// Run an experiment described by a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
