use clap::{Parser, Subcommand};

use quasireg_cli::{case_study, fit, simulate};

/// Two-stage quasi-estimation for linear regression: least squares plus
/// eigenvector-corrected alternatives, resolved by prior constraints.
#[derive(Parser)]
#[command(name = "quasireg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model from CSV, derive the alternative estimates, and
    /// optionally resolve them with a constraint rule.
    Fit(fit::FitArgs),
    /// Run reproducible Monte-Carlo risk experiments.
    Simulate(simulate::SimulateArgs),
    /// Rerun a bundled case study and compare against expected values.
    #[command(name = "case-study")]
    CaseStudy(case_study::CaseStudyArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(args) => fit::cmd_fit(args),
        Command::Simulate(args) => simulate::cmd_simulate(args),
        Command::CaseStudy(args) => case_study::cmd_case_study(args),
    };
    if let Err(failure) = result {
        eprintln!("error: {failure}");
        std::process::exit(failure.code);
    }
}
