//! Command-line surface over `exclusion-lab`: file formats, argument
//! parsing and the subcommand runners.

pub mod commands;
pub mod error;
pub mod formats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, Output};
pub use error::{CliError, EXIT_DATA, EXIT_USAGE};

/// Overrides the default tolerance of `verify-povm` when `--tol` is absent.
pub const TOL_ENV: &str = "EXCLUSION_LAB_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "exclusion-lab",
    version,
    about = "Decide whether pure-state sets admit a perfect exclusion measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a state set at a given copy count (exit 0 excludable, 1 not, 2 inconclusive).
    Check(CheckArgs),
    /// Smallest copy count at which the set becomes excludable (exit 2 if unresolved).
    Mincopies(MincopiesArgs),
    /// Write a state set from a named family.
    Construct(ConstructArgs),
    /// Check that a measurement excludes each state with its aligned outcome.
    VerifyPovm(VerifyPovmArgs),
    /// Emit the copy-number staircase of the equal-overlap qubit triple as CSV.
    Figure1(Figure1Args),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// State set JSON file.
    pub states: PathBuf,
    /// Number of identical copies of each state.
    #[arg(long, default_value_t = 1)]
    pub copies: u32,
    /// Rules to consult: auto, closed (closed forms only) or sdp (solver only).
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Run exactly these rules in order, replacing --method (repeatable).
    #[arg(long = "criterion")]
    pub criteria: Vec<String>,
    /// Print a JSON report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MincopiesArgs {
    /// State set JSON file.
    pub states: PathBuf,
    /// Largest copy count to examine.
    #[arg(long = "max")]
    pub max_n: Option<u32>,
    /// Rules the search may use: auto, closed or sdp.
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Search copy by copy even when a closed-form count applies.
    #[arg(long)]
    pub no_formulas: bool,
    /// Print a JSON report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(subcommand)]
    pub family: Family,
    /// Output file; the state set goes to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// k real states with every pairwise inner product equal to gamma.
    Equiangular {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gamma: f64,
    },
    /// Three qubit states with equal squared overlaps cos²(θ/2), θ ∈ [0, 2π/3].
    QubitFamily {
        #[arg(long)]
        theta: f64,
    },
    /// Equal-real set that stays non-excludable for every copy count up to N.
    FloorFamily {
        #[arg(long)]
        k: usize,
        #[arg(long = "N", alias = "n")]
        n: u32,
    },
    /// Equal-real set that needs exactly N + 1 copies.
    StepFamily {
        #[arg(long)]
        k: usize,
        #[arg(long = "N", alias = "n")]
        n: u32,
    },
}

#[derive(Debug, Args)]
pub struct VerifyPovmArgs {
    /// State set JSON file.
    pub states: PathBuf,
    /// POVM JSON file, outcome j aligned to state j.
    pub povm: PathBuf,
    /// Tolerance for every condition (default 1e-8, or EXCLUSION_LAB_TOL).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Look for an outcome-to-state matching instead of using the file order.
    #[arg(long)]
    pub search_assignment: bool,
    /// Print a JSON report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    /// Exclusive lower end of the angle grid.
    #[arg(long, default_value_t = 0.1)]
    pub theta_min: f64,
    /// Inclusive upper end of the angle grid, at most 2π/3.
    #[arg(long, default_value_t = exclusion_lab::states::QUBIT_FAMILY_MAX_THETA)]
    pub theta_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Output CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
