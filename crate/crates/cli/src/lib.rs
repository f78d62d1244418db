//! Command-line front end for `chsh-phase`.
//!
//! Exit codes: 0 on success, 1 on a quantitative failure (rejected fit,
//! failed verification, compensation missing its target), 2 on usage,
//! domain or I/O errors.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Report;
pub use config::Params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(chsh_phase::Error),
}

impl CliError {
    pub fn from_core(e: chsh_phase::Error) -> Self {
        CliError::Core(e)
    }

    pub fn exit_code(&self) -> u8 {
        use chsh_phase::Error as E;
        match self {
            CliError::Core(
                E::Convergence { .. } | E::IllConditioned(_) | E::LowVisibility { .. } | E::Verification(_),
            ) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chsh-phase",
    version,
    about = "Bell-CHSH analysis and phase compensation of entangled photon pairs"
)]
pub struct Cli {
    /// JSON file with run parameters; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal Bell parameter over a phase grid, closed form and numeric
    Smax(Params),
    /// Outcome probabilities for rotating analyzers
    Probs(Params),
    /// Numeric maximization of the Bell parameter at one phase
    Optimize(Params),
    /// Compensation settings for a scheme, verified by matrices
    Compensate(Params),
    /// Simulated compensator scan and phase estimate
    ScanFit(Params),
    /// Repeated coincidence counts at fixed analyzer angles
    Simulate(Params),
    /// Run the built-in oracle suites
    Verify,
}

/// Executes the command. A table goes to `--out` (with a manifest beside it)
/// and the summary to `out`; without `--out` the table goes to `out` and
/// the summary to `err`.
///
/// Returns whether the run passed its quantitative checks.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => Params::from_file(path)?,
        None => Params::default(),
    };
    let merged = |flags: &Params| flags.clone().over(file.clone());
    let (report, params) = match &cli.command {
        Command::Smax(f) => with(merged(f), commands::smax)?,
        Command::Probs(f) => with(merged(f), commands::probs)?,
        Command::Optimize(f) => with(merged(f), commands::optimize)?,
        Command::Compensate(f) => with(merged(f), commands::compensate)?,
        Command::ScanFit(f) => with(merged(f), commands::scan_fit)?,
        Command::Simulate(f) => with(merged(f), commands::simulate)?,
        Command::Verify => {
            if !file.keys().is_empty() {
                return Err(CliError::Usage(format!(
                    "verify does not take: {}",
                    file.keys().join(", ")
                )));
            }
            let results = verify::run_suites(&verify::ClosedForms::default());
            (verify::report(&results), file)
        }
    };
    emit(&report, &params, out, err)?;
    Ok(report.passed)
}

fn with(p: Params, f: fn(&Params) -> Result<Report, CliError>) -> Result<(Report, Params), CliError> {
    Ok((f(&p)?, p))
}

fn emit(report: &Report, params: &Params, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write output: {e}"));
    match (&report.table, &params.out) {
        (Some(table), Some(path)) => {
            let m = output::manifest(report.command, report.inputs.clone(), report.seed, path);
            let mpath = output::write_csv_with_manifest(path, table, &m)?;
            out.write_all(report.text.as_bytes()).map_err(io)?;
            writeln!(err, "wrote {} and {}", path.display(), mpath.display()).map_err(io)?;
        }
        (Some(table), None) => {
            table.write_to(out).map_err(io)?;
            err.write_all(report.text.as_bytes()).map_err(io)?;
        }
        (None, _) => out.write_all(report.text.as_bytes()).map_err(io)?,
    }
    out.flush().map_err(io)
}

/// Runs the CLI on an argument list and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return 2;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(&cli, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
