use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use numoment_cli::commands::{cmd_experiment, cmd_moments, cmd_solve, SolveArgs};

/// Rational spectral estimation from covariance and ν-cepstral moments.
#[derive(Parser)]
#[command(name = "numoment", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute covariances and ν-cepstral coefficients of a model or gridded spectrum.
    Moments {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the regularized dual problem for one λ.
    Solve {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        grid: Option<usize>,
        /// Gradient-norm tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the reconstruction sweep over models and λ.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Moments { config, out } => cmd_moments(&config, &out).map(|()| true),
        Command::Solve {
            moments,
            lambda,
            nu,
            grid,
            tol,
            max_iter,
            out,
        } => cmd_solve(&SolveArgs {
            moments,
            lambda,
            nu,
            grid,
            tol,
            max_iter,
            out,
        }),
        Command::Experiment { config, out_dir } => cmd_experiment(&config, &out_dir),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: numerical failure; results were written and flagged");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
