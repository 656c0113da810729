//! Command-line surface for the lattice decomposition library.
//!
//! The binary exposes five subcommands: `constants` (dimension constants
//! and the model's `h(0)`), `green` (pointwise `f = I1 + I2` values),
//! `asymptote` (axis sweep with decay fit, norms, and bound ratio),
//! `oracle` (series and Monte Carlo reference values), and `verify`
//! (the acceptance suite, one pass/fail line per criterion).
//!
//! Output discipline: data goes to `--output` (stdout when absent) and
//! diagnostics go to stderr, so a run can be piped or diffed byte for
//! byte. All floating-point output is rounded to 12 significant digits.

pub mod accept;
pub mod args;
pub mod commands;
pub mod output;

use std::fmt;

/// Errors surfaced to the terminal; every variant renders as a one-line
/// diagnostic on stderr and a nonzero exit.
#[derive(Debug)]
pub enum CliError {
    /// Failure inside the numerical library.
    Core(greenfn::Error),
    /// Bad flag combination or malformed positional argument.
    Usage(String),
    /// A computation finished but its error estimate is unusable
    /// (non-finite), so the run cannot vouch for its own output.
    Estimate(String),
    /// Filesystem failure reading a model spec or writing output.
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(out, "{e}"),
            CliError::Usage(msg) => write!(out, "{msg}"),
            CliError::Estimate(msg) => write!(out, "error estimate not met: {msg}"),
            CliError::Io(e) => write!(out, "i/o: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<greenfn::Error> for CliError {
    fn from(e: greenfn::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
