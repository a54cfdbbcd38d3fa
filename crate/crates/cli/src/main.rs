use clap::{Parser, Subcommand};
use heatutm_cli::{run, Command, Options};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "heatutm", version, about = "Heat and reaction-diffusion solvers on the half-line and the interval")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Quadrature tolerance, overriding the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Linear solve on the half-line or the interval.
    SolveLinear,
    /// Reaction-diffusion solve by Picard iteration.
    SolveRd,
    /// Norms of the configured data.
    Norms,
    /// Guaranteed existence time.
    Lifespan,
    /// Linear-estimate audits.
    Audit,
    /// The full acceptance suite.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let command = match cli.command {
        Cmd::SolveLinear => Command::SolveLinear,
        Cmd::SolveRd => Command::SolveRd,
        Cmd::Norms => Command::Norms,
        Cmd::Lifespan => Command::Lifespan,
        Cmd::Audit => Command::Audit,
        Cmd::Verify => Command::Verify,
    };
    let opts = Options { config: cli.config, out: cli.out, seed: cli.seed, tol: cli.tol };
    match run(command, opts) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
