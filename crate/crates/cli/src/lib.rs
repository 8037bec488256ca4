//! Library half of the command-line front end. The binary in `main.rs`
//! is a thin argument-parsing shell over these modules so that
//! integration tests can drive the same code paths in-process.

pub mod case_study;
pub mod failure;
pub mod fit;
pub mod report;
pub mod simulate;

/// Rendering target shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Human-readable text with six significant digits.
    Table,
    /// Stable machine-readable JSON at full precision.
    Json,
}
