//! The `holodyn` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad configuration,
//! 3 numeric failure.

mod commands;
mod load;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;

pub use load::{load_field, load_map};

#[derive(Debug, Parser)]
#[command(name = "holodyn", version, about = "Holonomy, formal flows and orbit experiments for holomorphic germs")]
pub struct Cli {
    /// Worker threads for parallel experiments (default: all cores).
    #[arg(long, global = true, env = "HOLODYN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holonomy of a foliation around an invariant axis (exact series, optional numeric check).
    Holonomy(HolonomyArgs),
    /// Formal flow of a vector field at a complex time, optionally compared with integration.
    Flow(FlowArgs),
    /// Classify orbits of a germ on a seed grid inside a polydisc.
    Orbit(OrbitArgs),
    /// Orbits of a pseudogroup under the domain rule.
    Pseudogroup(PseudogroupArgs),
    /// Characteristic directions and empirical runs for x -> x + c x^(d+1).
    Petal(PetalArgs),
    /// Check that a monomial is a first integral, symbolically and along a numeric flow.
    VerifyIntegral(IntegralArgs),
    /// Run every headline check and write a markdown report.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct HolonomyArgs {
    /// Field preset (thmB, example3, example1(n,m,a,b), linear(...), genF, genH, rotation) or JSON file.
    #[arg(long, default_value = "thmB")]
    pub field: String,
    /// Index of the invariant axis (default: last variable).
    #[arg(long)]
    pub axis: Option<usize>,
    /// Truncation order N.
    #[arg(long, default_value_t = 8)]
    pub order: u32,
    /// Base point z0 of the loop on the axis.
    #[arg(long, default_value = "1")]
    pub z0: String,
    /// Write coefficient table and holonomy jet as JSON.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Compare with direct integration on a 5x5 grid and write the errors as CSV.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Max-norm of the oracle grid.
    #[arg(long, default_value_t = 0.05)]
    pub oracle_radius: f64,
    /// Integrator tolerance for the oracle.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long, default_value = "genH")]
    pub field: String,
    /// Complex time t.
    #[arg(long, default_value = "1")]
    pub time: String,
    #[arg(long, default_value_t = 6)]
    pub order: u32,
    /// Comma-separated complex coordinates of a point to transport numerically.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Write the flow jet as JSON.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    /// Map preset (H, F, product(a,b,k), h1, h2, phiX, parabolic(d,c), diag(...), timeone(<field>)) or JSON file.
    #[arg(long, default_value = "H")]
    pub map: String,
    /// Radius of the max-norm ball.
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    /// Polar seed lattice, e.g. 20x20.
    #[arg(long, default_value = "20x20")]
    pub grid: String,
    /// Smallest and largest seed modulus as fractions of the radius.
    #[arg(long, default_value_t = 0.3)]
    pub r_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub r_max: f64,
    /// Iteration budget per direction.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Seed on the invariant circle of an F-type map where it rotates by an irrational angle.
    #[arg(long)]
    pub level_circle: bool,
    /// Number of seeds on the level circle.
    #[arg(long, default_value_t = 8)]
    pub level_seeds: usize,
    /// Rotation angle in turns on the level circle (default (sqrt 5 - 1)/20).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Use k pseudo-random seeds (ChaCha8) instead of the lattice.
    #[arg(long)]
    pub random_seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Coordinate plane drawn in the SVG (0 = x, 1 = y).
    #[arg(long, default_value_t = 0)]
    pub projection: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PseudogroupArgs {
    /// Generator preset (schur24 = h1 and the swap).
    #[arg(long, default_value = "schur24")]
    pub preset: String,
    /// Number of lattice seeds.
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    #[arg(long, default_value_t = 40)]
    pub word_budget: usize,
    #[arg(long, default_value_t = 10_000)]
    pub point_budget: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PetalArgs {
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long, default_value = "1")]
    pub c: String,
    #[arg(long, default_value_t = 200_000)]
    pub iterations: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegralArgs {
    #[arg(long, default_value = "example1(1,1,1,1)")]
    pub field: String,
    /// Exponents of the monomial (default: x^n y^m for example1(n,m,a,b)).
    #[arg(long)]
    pub exponents: Option<String>,
    /// Comma-separated complex starting point.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    /// Largest accepted drift.
    #[arg(long, default_value_t = 1e-8)]
    pub max_drift: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    /// Markdown report path.
    #[arg(long, default_value = "reproduction.md")]
    pub out: PathBuf,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Assertion(String),
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Assertion(m) => write!(f, "check failed: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::StepUnderflow { .. } | Error::TooManySteps(_) | Error::Escaped { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("holodyn: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match cli.command {
        Command::Holonomy(a) => commands::holonomy(&a),
        Command::Flow(a) => commands::flow(&a),
        Command::Orbit(a) => commands::orbit(&a),
        Command::Pseudogroup(a) => commands::pseudogroup(&a),
        Command::Petal(a) => commands::petal(&a),
        Command::VerifyIntegral(a) => commands::verify_integral(&a),
        Command::ReproducePaper(a) => commands::reproduce(&a),
    }
}
