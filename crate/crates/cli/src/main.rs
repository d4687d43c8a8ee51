use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmix::sampling::SamplerConfig;
use qmix_cli::{commands, CliError, Report};

#[derive(Parser)]
#[command(name = "qmix", version, about = "Statistical mixtures, density operators and moment witnesses")]
struct Cli {
    /// Emit the machine-readable JSON report instead of the text table.
    #[arg(long, global = true)]
    json: bool,
    /// Discrimination / equality tolerance.
    #[arg(long, global = true, default_value_t = qmix::moments::DEFAULT_TOL)]
    tol: f64,
    /// Write the per-order or per-time series as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    dump_csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Both Zeh mixtures: equal ρ and entropy, different even moments of X.
    ZehDemo,
    /// Moment profile of an ensemble for one observable.
    Moments {
        file: PathBuf,
        /// sx | sy | sz | dir:<nx>,<ny>,<nz>
        #[arg(long, default_value = "sx")]
        observable: String,
        #[arg(long, default_value_t = 6)]
        max_order: u32,
    },
    /// Search for a moment witness between two spin-1/2 ensembles.
    Distinguish {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Fibonacci-sphere directions scanned after the three axes.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
    /// Von Neumann entropy and purity of an ensemble's density operator.
    Entropy { file: PathBuf },
    /// Monte-Carlo estimate of a moment of X.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value = "sx")]
        observable: String,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        n_outer: usize,
        #[arg(long, default_value_t = 10_000)]
        m_inner: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Coupled-then-decoupled bipartite scenario (built-in spin-spin fixture if no file).
    LandauFeynman { scenario: Option<PathBuf> },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::ZehDemo => commands::cmd_zeh_demo(cli.tol),
        Command::Moments { file, observable, max_order } => commands::cmd_moments(file, observable, *max_order, cli.tol),
        Command::Distinguish { file_a, file_b, grid, max_order } => {
            commands::cmd_distinguish(file_a, file_b, *grid, *max_order, cli.tol)
        }
        Command::Entropy { file } => commands::cmd_entropy(file, cli.tol),
        Command::Simulate { file, observable, order, seed, n_outer, m_inner, workers } => {
            let cfg = SamplerConfig::new(*seed, *n_outer, *m_inner).with_workers(*workers);
            commands::cmd_simulate(file, observable, *order, cfg, cli.tol)
        }
        Command::LandauFeynman { scenario } => commands::cmd_landau_feynman(scenario.as_deref(), cli.tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.tol.is_nan() || cli.tol < 0.0 {
        eprintln!("qmix: usage: --tol must be a non-negative number");
        return ExitCode::from(2);
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qmix: {e}");
            return ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 });
        }
    };
    if let Some(path) = &cli.dump_csv {
        if let Err(e) = fs::write(path, report.csv.as_deref().unwrap_or("")) {
            eprintln!("qmix: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_human());
    }
    ExitCode::SUCCESS
}
