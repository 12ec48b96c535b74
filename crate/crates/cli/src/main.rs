use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nlse_gauge_cli::{dispatch, Command, CliError, Overrides, RunConfig};

/// Nonlinear gauge transformations of the Schrödinger equation: algebra,
/// classification, evolution and verification.
#[derive(Debug, Parser)]
#[command(name = "nlse-gauge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run config; defaults apply to anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    #[arg(long, global = true)]
    box_l: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_final: Option<f64>,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let (mut cfg, base) = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides {
        out_dir: cli.out_dir.clone(),
        seed: cli.seed,
        grid_n: cli.grid_n,
        box_l: cli.box_l,
        dt: cli.dt,
        t_final: cli.t_final,
    });
    dispatch(&cli.command, &cfg, &base)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NLSE_GAUGE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
