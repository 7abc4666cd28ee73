use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use harmonia_cli::commands::{self, load_scenario, CliError};
use harmonia_cli::{ExitStatus, RunReport, Theorem};

#[derive(Parser)]
#[command(name = "harmonia", version, about = "Planar n-body laboratory for the harmonic potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory as CSV
    Simulate {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Central-configuration residual of the scenario's positions
    CcCheck { file: PathBuf },
    /// Refine the scenario's positions to a central configuration with I = k
    CcRefine {
        file: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Sample and verify the isosceles family of central configurations on I = k
    Family {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        samples: usize,
    },
    /// Integrate a scenario and classify it by inertia constancy and rigidity
    Saari { file: PathBuf },
    /// Re-run one of the built-in verifications
    Reproduce { which: Which },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Theorem1,
    Theorem2,
}

fn dispatch(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::Simulate { file, out } => {
            let s = load_scenario(&file)?;
            let io = |source| CliError::Io { path: out.clone(), source };
            let mut w = BufWriter::new(File::create(&out).map_err(io)?);
            let report = commands::cmd_simulate(&s, &mut w)?;
            w.flush().map_err(io)?;
            Ok(report)
        }
        Command::CcCheck { file } => commands::cmd_cc_check(&load_scenario(&file)?),
        Command::CcRefine { file, k, max_iter } => commands::cmd_cc_refine(&load_scenario(&file)?, k, max_iter),
        Command::Family { k, samples } => commands::cmd_family(k, samples),
        Command::Saari { file } => commands::cmd_saari(&load_scenario(&file)?),
        Command::Reproduce { which } => commands::cmd_reproduce(match which {
            Which::Theorem1 => Theorem::Theorem1,
            Which::Theorem2 => Theorem::Theorem2,
        }),
    }
}

fn main() -> ExitCode {
    // clap's own usage errors would exit with 2, which is reserved for failed verifications.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let status = match dispatch(cli.command) {
        Ok(report) => {
            print!("{report}");
            report.status()
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::Error
        }
    };
    ExitCode::from(status.code() as u8)
}
