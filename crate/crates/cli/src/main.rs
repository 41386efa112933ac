mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use reachbound::reach::KantorovichRoutes;

use crate::report::CliError;

#[derive(Parser)]
#[command(name = "reachbound", version, about = "Certified lower bounds and estimates for the reach of algebraic varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified reach lower bounds at a point and/or over [-R,R]^n.
    Bound(BoundArgs),
    /// Empirical reach estimate from a variety sample.
    Estimate(EstimateArgs),
    /// Monte Carlo check of a tail bound against an experiment config.
    McTail(McTailArgs),
    /// Worst-case bit bound on log2(1/reach) for integer tuples.
    Worstcase(WorstcaseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Routes {
    GammaOnly,
    CondOnly,
    Both,
}

impl From<Routes> for KantorovichRoutes {
    fn from(r: Routes) -> Self {
        match r {
            Routes::GammaOnly => KantorovichRoutes::GammaOnly,
            Routes::CondOnly => KantorovichRoutes::CondOnly,
            Routes::Both => KantorovichRoutes::Both,
        }
    }
}

/// Flags of `bound`. The same keys may come from `--config`; flags win.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundArgs {
    /// TOML or JSON file with any of these settings.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Polynomials as text, separated by ';', in variables x0, x1, ...
    #[arg(long)]
    pub poly: Option<String>,
    /// File holding the polynomials (text, or JSON with a .json extension).
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Number of variables; inferred from the text when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Declared degrees, comma separated; inferred when omitted.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<u32>>,
    /// Point for the local bounds, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Also bound the reach over the cube [-R,R]^n.
    #[arg(long)]
    #[serde(default)]
    pub global: bool,
    /// Cube half-width for --global (default 1).
    #[arg(long = "R", visible_alias = "radius")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[arg(long, value_enum)]
    pub routes: Option<Routes>,
    /// Upper end of the Kantorovich radius search.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Relative width at which the global condition bracket stops.
    #[arg(long)]
    pub target_rel_err: Option<f64>,
    /// Cell budget of the global condition bracket.
    #[arg(long)]
    pub max_cells: Option<usize>,
    /// Seed of the power-iteration restarts.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Flags of `estimate`.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<u32>>,
    /// Target number of sample points.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pick a seed and record it in the report.
    #[arg(long)]
    #[serde(skip)]
    pub auto_seed: bool,
    /// Sampling box half-width (default 1).
    #[arg(long = "R", visible_alias = "radius")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Pairs closer than this are ignored (default 1e-3 R).
    #[arg(long)]
    pub min_sep: Option<f64>,
    /// Restrict the estimate to a ball around this point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    /// Radius of the ball for --center.
    #[arg(long)]
    pub ball: Option<f64>,
    /// Write the sample points as CSV to this path.
    #[arg(long)]
    pub export_samples: Option<PathBuf>,
    /// Probe budget of the sampler.
    #[arg(long)]
    pub max_probes: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Flags of `mc-tail`; they override the experiment config.
#[derive(Args, Debug, Clone)]
pub struct McTailArgs {
    /// Experiment config (TOML or JSON).
    pub config: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub auto_seed: bool,
    /// Thresholds, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_grid: Option<Vec<f64>>,
    /// Directory receiving tail.csv and tail.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WorstcaseArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub d: u32,
    #[arg(long)]
    pub tau: u32,
    #[arg(long = "R", default_value_t = 1)]
    #[serde(rename = "R")]
    pub r: u64,
    #[arg(long, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report::fail(&CliError::Usage(e.to_string()));
        }
    };
    let out = match cli.command {
        Command::Bound(a) => commands::bound(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::McTail(a) => commands::mc_tail(a),
        Command::Worstcase(a) => commands::worstcase(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report::fail(&e),
    }
}
