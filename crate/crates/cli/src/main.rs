use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "ffnet", version, about = "Plan and simulate layered feed-forward multi-agent transport")]
struct Cli {
    /// Directory for every written artifact.
    #[arg(long, global = true, env = "FFNET_OUT_DIR", default_value = "ffnet-out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the layered graph and write its dump and SVG.
    BuildGraph {
        scenario: PathBuf,
    },
    /// Build the graph, final positions and weight schedule.
    Plan {
        scenario: PathBuf,
    },
    /// Run the full pipeline and write trace, metrics and plots.
    Simulate(SimulateArgs),
    /// Write a reproducible random scenario file.
    Generate(GenerateArgs),
    /// Summarize the metrics of a finished run.
    Report {
        /// Run directory or metrics file.
        path: PathBuf,
        /// Print the metrics record as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scenario: PathBuf,
    /// Integration step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Convergence margin as a fraction of the zone size.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Comma-separated snapshot times in seconds.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,
    /// Plan only; skip the integration.
    #[arg(long)]
    pub dry_run: bool,
    /// Blend leader references from their initial to their final positions.
    #[arg(long)]
    pub leader_blend: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 40)]
    pub agents: usize,
    #[arg(long, default_value_t = 10)]
    pub boundary: usize,
    #[arg(long, conflicts_with = "uncooperative_fraction")]
    pub uncooperative: Option<usize>,
    #[arg(long)]
    pub uncooperative_fraction: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Target samples per interior agent.
    #[arg(long, default_value_t = 3.0)]
    pub sample_density: f64,
    /// Id given to the core agent.
    #[arg(long)]
    pub core_id: Option<u32>,
    /// Output file; printed to stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildGraph { scenario } => commands::build_graph(&scenario, &cli.out_dir),
        Command::Plan { scenario } => commands::plan(&scenario, &cli.out_dir),
        Command::Simulate(args) => commands::simulate(&args, &cli.out_dir),
        Command::Generate(args) => commands::generate(&args),
        Command::Report { path, json } => commands::report(&path, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", commands::error_record(&err));
            ExitCode::FAILURE
        }
    }
}
