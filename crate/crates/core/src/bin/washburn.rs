use std::process::ExitCode;

use clap::{Parser, Subcommand};
use washburn::commands::{
    cmd_basin, cmd_classify, cmd_nondim, cmd_picard, cmd_regime, cmd_simulate, cmd_verify,
    BasinConfig, ClassifyConfig, NondimConfig, PicardConfig, RegimeConfig, SimulateConfig,
    VerifyConfig,
};

/// Capillary rise with wall slip.
#[derive(Parser)]
#[command(name = "washburn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the rise from rest and write trajectory.csv and summary.json.
    Simulate(SimulateConfig),
    /// Solve the integral form by Picard iteration.
    Picard(PicardConfig),
    /// Linearize at equilibrium and classify the approach.
    Classify(ClassifyConfig),
    /// Report the Lyapunov basin for an initial height.
    Basin(BasinConfig),
    /// Run one reduced regime against its closed form.
    Regime(RegimeConfig),
    /// Convert physical parameters to dimensionless ones.
    Nondim(NondimConfig),
    /// Run the built-in invariant suites.
    Verify(VerifyConfig),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(c) => cmd_simulate(c).map(|s| {
            eprintln!("wrote {} samples to {}", s.samples, c.out.display());
            true
        }),
        Command::Picard(c) => cmd_picard(c).map(|s| {
            eprintln!(
                "converged in {} iterations, wrote {}",
                s.iterations,
                c.out.display()
            );
            true
        }),
        Command::Classify(c) => cmd_classify(c).map(|_| true),
        Command::Basin(c) => cmd_basin(c).map(|_| true),
        Command::Regime(c) => cmd_regime(c).map(|s| {
            eprintln!(
                "max residual {:.3e}, wrote {}",
                s.max_residual,
                c.out.display()
            );
            true
        }),
        Command::Nondim(c) => cmd_nondim(c).map(|_| true),
        Command::Verify(c) => cmd_verify(c).map(|r| r.passed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
