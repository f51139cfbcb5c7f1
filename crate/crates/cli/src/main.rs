use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xpower_cli::reproduce::Target;
use xpower_cli::{cmd_oracle, cmd_predict, cmd_reproduce, cmd_run, Outcome};

/// Extended power iteration for commuting symmetric operators.
#[derive(Parser)]
#[command(name = "xpower", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the method named in a problem document and write its trace CSV.
    Run {
        problem: PathBuf,
        /// Trace CSV path (default: <problem stem>.trace.csv beside the problem).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict which state the extended method reaches for a shift.
    Predict {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
    },
    /// Regenerate a reference table or figure curve set and check it.
    Reproduce {
        /// table1, table3, fig1 or fig2
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense eigendecompositions of H, S and their simultaneous pairs.
    Oracle { problem: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: anyhow::Result<Outcome> = match &cli.command {
        Command::Run { problem, out } => cmd_run(problem, out.as_deref()),
        Command::Predict { problem, mu } => cmd_predict(problem, *mu),
        Command::Reproduce { target, out } => cmd_reproduce(*target, out.as_deref()),
        Command::Oracle { problem } => cmd_oracle(problem),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.checks_passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("xpower: one or more checks failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("xpower: error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
