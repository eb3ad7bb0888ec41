//! `twoaxis`: simulate the phase-estimation protocol, sweep ensemble sizes,
//! and export Husimi maps and susceptibility curves as CSV.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand};

use commands::SWEEP_FLOOR;

const DEFAULT_N_LIST: &str = "16,32,64,128,256,512,1024,2048,2480";

#[derive(Parser, Debug)]
#[command(name = "twoaxis", version, about)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "TWOAXIS_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Sampling {
    /// Phase-estimation trials per evaluation.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; every random stream is derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the estimation protocol at one (N, t_s) and write every trial.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        /// Twisting time.
        #[arg(long)]
        ts: f64,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize t_s for each N and fit power laws to the imprecision and
    /// Fisher information.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = DEFAULT_N_LIST)]
        n_list: Vec<usize>,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        out: PathBuf,
    },
    /// Husimi Q function of the probe after the phase channel.
    Husimi {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        ts: f64,
        /// Signal phase applied before sampling.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 181, value_parser = clap::value_parser!(u64).range(2..))]
        theta_count: u64,
        #[arg(long, default_value_t = 360, value_parser = clap::value_parser!(u64).range(2..))]
        phi_count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean and spread of the in-plane spin component versus its angle.
    Curve {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        ts: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Refit the power laws from an existing sweep file.
    Fit {
        /// Sweep output to read.
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn check_finite(name: &str, value: f64) {
    if !value.is_finite() {
        Cli::command()
            .error(ErrorKind::ValueValidation, format!("--{name} must be finite, got {value}"))
            .exit();
    }
}

fn check_time(ts: f64) {
    check_finite("ts", ts);
    if ts < 0.0 {
        Cli::command()
            .error(ErrorKind::ValueValidation, format!("--ts must be non-negative, got {ts}"))
            .exit();
    }
}

fn validate(cli: &Cli) {
    if cli.workers == Some(0) {
        Cli::command()
            .error(ErrorKind::ValueValidation, "--workers must be at least 1")
            .exit();
    }
    match &cli.command {
        Command::Simulate { ts, .. } => check_time(*ts),
        Command::Sweep { n_list, .. } => {
            if n_list.is_empty() {
                Cli::command()
                    .error(ErrorKind::ValueValidation, "--n-list must not be empty")
                    .exit();
            }
            if let Some(n) = n_list.iter().find(|&&n| n < SWEEP_FLOOR) {
                Cli::command()
                    .error(
                        ErrorKind::ValueValidation,
                        format!("--n-list contains {n}; sweeps need N >= {SWEEP_FLOOR}"),
                    )
                    .exit();
            }
        }
        Command::Husimi { ts, phi, .. } | Command::Curve { ts, phi, .. } => {
            check_time(*ts);
            check_finite("phi", *phi);
        }
        Command::Fit { .. } => {}
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Simulate { n, ts, sampling, out } => {
            commands::simulate(n as usize, ts, sampling.trials as usize, sampling.seed, &out)
        }
        Command::Sweep { n_list, sampling, out } => {
            commands::sweep(&n_list, sampling.trials as usize, sampling.seed, &out)
        }
        Command::Husimi { n, ts, phi, theta_count, phi_count, out } => {
            commands::husimi(n as usize, ts, phi, theta_count as usize, phi_count as usize, &out)
        }
        Command::Curve { n, ts, phi, out } => commands::curve(n as usize, ts, phi, &out),
        Command::Fit { input, out } => commands::fit(&input, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    validate(&cli);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        pool = pool.num_threads(w);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
