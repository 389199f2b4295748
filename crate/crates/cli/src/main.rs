use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rakegame_cli::{
    analyze, loss, simulate, table, CliError, Output, ScenarioFile, SimulateOptions,
};

#[derive(Parser)]
#[command(
    name = "rakegame",
    version,
    about = "Energy-efficient power control for DS-CDMA and IR-UWB with Rake receivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form large-system analysis over a (lambda_db, rho, beta) grid.
    Analyze {
        scenario: PathBuf,
        /// e.g. "lambda_db=20;rho=0.05:1:0.05;beta=0,0.25,1"
        #[arg(long, default_value = "")]
        grid: String,
        /// Processing gain N (default: first entry of rake.processing_gains).
        #[arg(long)]
        gain: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo ensembles for every (rho, N, N_c) cell of the scenario.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "RAKEGAME_WORKERS")]
        workers: Option<usize>,
        /// Overrides run.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides run.realizations.
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Closed-form DS-CDMA loss over an (n, k, l, rho) grid.
    Loss {
        scenario: PathBuf,
        /// e.g. "n=256,512;k=10;l=200:500:100;rho=0.2,1"
        #[arg(long, default_value = "")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (output, out) = match cli.command {
        Command::Analyze {
            scenario,
            grid,
            gain,
            out,
        } => (analyze(&ScenarioFile::load(&scenario)?, &grid, gain)?, out),
        Command::Simulate {
            scenario,
            out,
            workers,
            seed,
            realizations,
        } => {
            let opts = SimulateOptions {
                workers,
                seed,
                realizations,
            };
            (simulate(&ScenarioFile::load(&scenario)?, &opts)?, out)
        }
        Command::Loss {
            scenario,
            grid,
            out,
        } => (loss(&ScenarioFile::load(&scenario)?, &grid)?, out),
    };
    let Output { csv, problem } = output;
    table::emit(&csv, out.as_deref())?;
    problem.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
