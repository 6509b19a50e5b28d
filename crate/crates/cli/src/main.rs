//! Batch evaluation CLI for parse trees over time ranges and token
//! indices.

mod commands;
mod formats;
mod ingest;
mod jobs;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::interval::DEFAULT_EPSILON;

#[derive(Parser)]
#[command(
    name = "treealign",
    version,
    about = "Evaluate constituency parses over continuous spans and discrete sequences",
    after_help = "The environment variable TREEALIGN_EPSILON overrides the coordinate \
                  comparison tolerance (default 1e-9)."
)]
struct Cli {
    /// Print machine-readable JSON instead of a human summary
    #[arg(long, global = true)]
    json: bool,

    /// Write results to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for corpus loops; output is identical for any value
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,

    /// Suppress warnings on stderr
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structured alignment score between gold and predicted trees
    Eval(commands::eval::EvalArgs),
    /// Bracket precision/recall/F1 over discrete parses
    Parseval(commands::parseval::ParsevalArgs),
    /// Word-segmentation metrics: boundary F1 or span mIoU
    Segeval(commands::segeval::SegevalArgs),
    /// Project bracketed parses onto unit or time coordinates
    Project(commands::project::ProjectArgs),
    /// Apply a seeded boundary perturbation
    Perturb(commands::perturb::PerturbArgs),
    /// Consensus (minimum-risk) selection among candidate outputs
    Mbr(commands::mbr::MbrArgs),
    /// Check segment trees against the structural conditions
    Validate(commands::validate::ValidateArgs),
}

/// Settings shared by every subcommand.
pub struct Ctx {
    pub json: bool,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub quiet: bool,
    pub epsilon: f64,
}

fn epsilon_from_env() -> Result<f64, String> {
    match std::env::var("TREEALIGN_EPSILON") {
        Ok(raw) => match raw.parse::<f64>() {
            Ok(eps) if eps.is_finite() && eps > 0.0 => Ok(eps),
            _ => Err(format!(
                "TREEALIGN_EPSILON must be a positive number, got '{raw}'"
            )),
        },
        Err(_) => Ok(DEFAULT_EPSILON),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let epsilon = match epsilon_from_env() {
        Ok(eps) => eps,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx {
        json: cli.json,
        out: cli.out,
        jobs: cli.jobs.max(1),
        quiet: cli.quiet,
        epsilon,
    };
    let result = match cli.command {
        Command::Eval(args) => commands::eval::run(&ctx, args),
        Command::Parseval(args) => commands::parseval::run(&ctx, args),
        Command::Segeval(args) => commands::segeval::run(&ctx, args),
        Command::Project(args) => commands::project::run(&ctx, args),
        Command::Perturb(args) => commands::perturb::run(&ctx, args),
        Command::Mbr(args) => commands::mbr::run(&ctx, args),
        Command::Validate(args) => commands::validate::run(&ctx, args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
