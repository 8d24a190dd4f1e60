use std::path::PathBuf;
use std::process::ExitCode;

use abflux_cli::{exit_code, parse_grid, parse_range, run_fields, run_spectrum, run_verify, run_wavefunction, Command, JobSpec};
use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "abflux", version, about = "Aharonov-Bohm flux plus solvable fields: spectra, wavefunctions, checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Closed-form levels for each (n, l), optionally checked by the oracle
    Spectrum(Args),
    /// Radial factors of one state on an r grid
    Wavefunction(Args),
    /// Residual and oracle suite with a JSON summary
    Verify(Args),
    /// E and H along r
    Fields(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// output file (stdout when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// fill the oracle column and fail when it disagrees
    #[arg(long)]
    verify: bool,
    #[arg(long, value_name = "X", default_value_t = 1e-6)]
    tol_residual: f64,
    #[arg(long, value_name = "X", default_value_t = 1e-6)]
    tol_eigen: f64,
    #[arg(long, value_name = "MIN:MAX:N", default_value = "0.05:10:200")]
    grid: String,
    /// radial quantum numbers: N, A..B or a comma list
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    n: String,
    /// angular quantum numbers: N, A..B or a comma list
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    l: String,
    #[arg(long, hide = true, default_value_t = 0.0)]
    inject_fault: f64,
}

fn job(command: Command, a: Args) -> Result<JobSpec> {
    let mut job = JobSpec::new(command, a.config);
    job.output_path = a.out;
    job.verify = a.verify;
    job.tol_residual = a.tol_residual;
    job.tol_eigen = a.tol_eigen;
    job.grid = parse_grid(&a.grid)?;
    job.n = parse_range(&a.n)?;
    job.l = parse_range(&a.l)?;
    job.inject_fault = a.inject_fault;
    Ok(job)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Spectrum(a) => run_spectrum(&job(Command::Spectrum, a)?).map(drop),
        Cmd::Wavefunction(a) => run_wavefunction(&job(Command::Wavefunction, a)?).map(drop),
        Cmd::Verify(a) => run_verify(&job(Command::Verify, a)?).map(drop),
        Cmd::Fields(a) => run_fields(&job(Command::Fields, a)?).map(drop),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abflux: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
