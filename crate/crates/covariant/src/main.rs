use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covariant::scenario::Format;
use covariant::{execute, RunOptions, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "covariant", version, about = "State interconversion under symmetry-covariant channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional min-entropy Φ_η(τ) of the twirled pair.
    Hmin(Common),
    /// Exact Choi-matrix feasibility, with an optional surface screen.
    Feasible(Common),
    /// Three-way ε-net classification.
    Smoothed(Common),
    /// Depolarization sufficient conditions and the minimal p.
    DepolThreshold(Common),
    /// Modes of asymmetry of a state.
    Modes(Common),
    /// Per-point quantities over a Bloch-ball grid.
    RegionScan(Common),
    /// ε-net of the reference shell.
    Net(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to COVARIANT_THREADS, then the number of logical CPUs.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 2 when the verdict is Infeasible.
    #[arg(long)]
    fail_on_infeasible: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, c) = match cli.command {
        Command::Hmin(c) => ("hmin", c),
        Command::Feasible(c) => ("feasible", c),
        Command::Smoothed(c) => ("smoothed", c),
        Command::DepolThreshold(c) => ("depol-threshold", c),
        Command::Modes(c) => ("modes", c),
        Command::RegionScan(c) => ("region-scan", c),
        Command::Net(c) => ("net", c),
    };
    let opts = RunOptions {
        scenario: c.scenario,
        command: Some(name.to_string()),
        out: c.out,
        format: c.format,
        threads: c.threads,
        seed: c.seed,
        fail_on_infeasible: c.fail_on_infeasible,
    };
    match execute(&opts) {
        Ok(report) => {
            if report.path.is_none() {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(&report.bytes).and_then(|_| stdout.flush()).is_err() {
                    return ExitCode::from(EXIT_ERROR as u8);
                }
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {}: {e:#}", opts.scenario.display());
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
