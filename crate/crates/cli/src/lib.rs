//! Command-line front end for `symlab`: JSON matrix files, one-shot
//! computations, invariant suites and reconstruction runs.
//!
//! Exit codes: 0 the relation holds or the run passed, 1 violated or the
//! oracle was rejected, 2 usage or parse error, 3 unknown or numerical failure.

pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod oracles;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use symlab::matrixcore::Tolerance;

pub use error::CliError;
pub use matrix_file::{Kind, MatrixFile};
pub use report::{Report, ReportVerdict};

#[derive(Debug, Parser)]
#[command(name = "symlab", version, about = "Symmetries of finite-dimensional self-adjoint operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Absolute tolerance (the relative tolerance keeps its default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a relation between two matrix files.
    Check {
        /// le, adjacent, commute, orthogonal or coexistent.
        relation: String,
        a: PathBuf,
        b: PathBuf,
        /// Write the coexistence witness G here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate an operation and write the resulting matrix file.
    Compute {
        /// geomean, seqprod, tau, vau, orthocomplement or sqrt.
        op: String,
        files: Vec<PathBuf>,
        /// Parameter effect for tau and vau.
        #[arg(long = "t")]
        t: Option<PathBuf>,
        /// Input for tau and vau.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded invariant suite, or `contract:<name>` against a built-in map.
    Verify {
        id: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Map for `contract:<name>`: identity, negate, transpose, complement,
        /// square, molnar, unitary or antiunitary.
        #[arg(long, default_value = "identity")]
        map: String,
        /// Domain for `contract:<name>`: hermitian, pd, effects, projections or rank-one.
        #[arg(long)]
        domain: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Recover canonical parameters from a built-in oracle.
    Reconstruct {
        /// order-auto, effect-ortho, proj-commute, herm-commute, wigner or optimal-wigner.
        class: String,
        /// `hidden` or `adversarial:<name>`.
        #[arg(long, default_value = "hidden")]
        oracle_spec: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the recovered parameters here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a seeded random matrix file.
    Gen {
        /// hermitian, effect, projection, unitary, pd or density.
        kind: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Default tolerance with the `--tol` override and the `SYMLAB_MAX_DIM` guard.
pub fn tolerance(common: &Common) -> Result<Tolerance, CliError> {
    let mut tol = match common.tol {
        Some(atol) => Tolerance::with_atol(atol)?,
        None => Tolerance::default(),
    };
    if let Ok(v) = std::env::var("SYMLAB_MAX_DIM") {
        let max = v
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("SYMLAB_MAX_DIM must be a positive integer, got `{v}`")))?;
        tol = tol.with_max_dim(max);
    }
    Ok(tol)
}

/// Parses arguments, runs the command, prints its output to stdout and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli.command) {
        Ok(out) => {
            println!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("symlab: {e}");
            e.exit_code()
        }
    }
}
