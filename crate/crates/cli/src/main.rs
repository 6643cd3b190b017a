//! `polycoh`: analyze a string rewriting presentation, build its decreasing
//! completion, fill 2-spheres, and compute low-dimensional homology.

mod commands;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "polycoh", version, about = "Coherent presentations of monoids by decreasing diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Termination class, critical branchings and elementary loops.
    Analyze(Common),
    /// Build the decreasing completion and audit it.
    Complete {
        #[command(flatten)]
        common: Common,
        /// Only accept two-part (strict) confluence diagrams.
        #[arg(long)]
        strict: bool,
        /// Write the extension file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Confluence diagrams of the critical branchings and the label audits.
    CheckDecreasing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strict: bool,
    },
    /// Fill a 2-sphere with 3-cells of the completion.
    FillSphere {
        #[command(flatten)]
        common: Common,
        /// Sphere file: `ZIGZAG => ZIGZAG`.
        sphere: Option<PathBuf>,
        /// Fill this many random parallel pairs instead (uses --seed).
        #[arg(long)]
        random: Option<usize>,
    },
    /// H0, H1 and H2 with integral coefficients.
    Homology(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelArg {
    Qnf,
    Nf,
    Singleton,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Common {
    /// Presentation file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub max_word_len: usize,
    #[arg(long, default_value_t = 200_000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 64)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub ctx_bound: usize,
    #[arg(long, default_value_t = 6)]
    pub peiffer_len_bound: usize,
    #[arg(long, default_value_t = 10_000)]
    pub loop_cap: usize,
    #[arg(long, value_enum, default_value_t = LabelArg::Qnf)]
    pub label: LabelArg,
    #[arg(long)]
    pub qnf_map: Option<PathBuf>,
    #[arg(long)]
    pub label_table: Option<PathBuf>,
    /// Extension file of 3-cells.
    #[arg(long)]
    pub cells: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exploration seeds, comma-separated words. Default: every word up to --seed-len.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<String>>,
    /// Length of the default exploration seeds. Default: long enough for the audits.
    #[arg(long)]
    pub seed_len: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(c) => commands::analyze(&c),
        Command::Complete { common, strict, out } => commands::complete(&common, strict, out.as_deref()),
        Command::CheckDecreasing { common, strict } => commands::check_decreasing(&common, strict),
        Command::FillSphere { common, sphere, random } => commands::fill_sphere(&common, sphere.as_deref(), random),
        Command::Homology(c) => commands::homology(&c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
