//! `mofsim`: scenario-driven simulator for mirror optical response,
//! effective optomechanical couplings, covariance dynamics and mirror-field
//! entanglement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mof_core::scenario::{self, Experiment, OutputFormat, Scenario};

#[derive(Parser)]
#[command(name = "mofsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflectance/transmittance over a frequency grid
    Spectrum(RunArgs),
    /// Effective coupling constants as JSON
    Couplings(RunArgs),
    /// Covariance trajectory and E_N(t) for one system
    Evolve(RunArgs),
    /// E_N over a detuning × time grid
    Sweep(RunArgs),
    /// Full model vs adiabatic reduction vs boundary-condition baseline
    CompareBc(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Tabular output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write SVG plots
    #[arg(long)]
    plots: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl Command {
    fn expected(&self) -> Experiment {
        match self {
            Command::Spectrum(_) => Experiment::Spectrum,
            Command::Couplings(_) => Experiment::Couplings,
            Command::Evolve(_) => Experiment::Evolve,
            Command::Sweep(_) => Experiment::Sweep,
            Command::CompareBc(_) => Experiment::CompareBc,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a)
            | Command::Couplings(a)
            | Command::Evolve(a)
            | Command::Sweep(a)
            | Command::CompareBc(a) => a,
        }
    }
}

fn run(cli: &Cli) -> mof_core::Result<scenario::RunSummary> {
    if let Ok(threads) = std::env::var("MOFSIM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => scenario::set_worker_threads(n),
            _ => {
                return Err(mof_core::Error::Config(format!(
                    "MOFSIM_THREADS must be a positive integer, got {threads:?}"
                )))
            }
        }
    }
    let args = cli.command.args();
    let sc = Scenario::from_path(&args.config)?;
    let expected = cli.command.expected();
    if sc.experiment != expected {
        return Err(mof_core::Error::Config(format!(
            "scenario declares experiment '{}' but the '{}' subcommand was invoked",
            sc.experiment.name(),
            expected.name()
        )));
    }
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    scenario::run_scenario(&sc, &args.out, format, args.plots)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!("experiment: {}", summary.experiment);
            println!("runtime_s: {:.3}", summary.runtime_s);
            for (k, v) in &summary.scalars {
                println!("{k}: {v:.6e}");
            }
            for p in &summary.outputs {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
