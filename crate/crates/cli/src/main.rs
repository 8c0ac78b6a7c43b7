//! `lenspace`: length-space checks on finite metric spaces and planar domains.
//!
//! Every command prints one JSON document (or CSV/SVG when asked) and exits
//! with 0 on pass/completion, 1 on a failing verdict and 2 on bad input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lenspace::domain::Stencil;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "lenspace",
    version,
    about = "Length spaces, induced metrics and 1-Lipschitz sheaf checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunConfig,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Chaining scale, or grid spacing for domains and demos.
    #[arg(long = "h", global = true)]
    pub h: Option<f64>,
    /// Grid stencil: 8 or 16 neighbours.
    #[arg(long, global = true, default_value = "16", value_parser = parse_stencil)]
    pub stencil: Stencil,
    /// Midpoint slack for bisection.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub eps: f64,
    /// Verdict tolerance; defaults to 2h for length checks and 0 for sheaf
    /// checks on finite spaces.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Bisection depth.
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: u32,
    /// Seed for every randomized choice (sampled sources and pairs).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write an SVG figure here (domains, demos, planar geodesics).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the wide-sense metric axioms of a space file.
    Validate { space: PathBuf },
    /// Induced length metric from a source, and the length-space verdict.
    Length {
        /// Space or domain file.
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long)]
        target: Option<usize>,
        /// Random extra sources for the domain verdict.
        #[arg(long, default_value_t = 8)]
        sources: usize,
    },
    /// Decide whether every cover-locally 1-Lipschitz field is 1-Lipschitz.
    Sheaf {
        /// Space or domain file.
        input: PathBuf,
        /// Cover file, or inline JSON such as '{"kind":"balls","r":1}'.
        #[arg(long)]
        cover: String,
        /// Write the witness field (id → value) here when the check fails.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Random extra sources for domain inputs.
        #[arg(long, default_value_t = 8)]
        sources: usize,
    },
    /// Near-geodesic between two points by repeated approximate midpoints.
    Geodesic {
        space: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
    /// Reproduce a planar example: slit, punctured or convex.
    Demo { name: String },
}

fn parse_stencil(s: &str) -> Result<Stencil, String> {
    let k: u32 = s
        .parse()
        .map_err(|_| format!("{s:?} is not a neighbour count"))?;
    Stencil::from_neighbors(k).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            println!("{}", json!({ "error": msg.trim(), "kind": "usage" }));
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            println!("{}", json!({ "error": e.message, "kind": e.kind }));
            ExitCode::from(2)
        }
    }
}
