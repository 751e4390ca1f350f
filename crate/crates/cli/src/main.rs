use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ptscatter_cli::{
    cmd_ep, cmd_phases, cmd_sweep, cmd_wavefunction, CliError, Context, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "ptscatter",
    version,
    about = "Scattering spectra, wavefunctions, eigenphases and exceptional points of a gain/loss quantum-well dimer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission and reflection spectra with detected resonances
    Sweep(RunArgs),
    /// Wavefunctions at the tracked resonances with symmetry labels
    Wavefunction(RunArgs),
    /// S-matrix eigenvalue trajectories and eigenphase histograms
    Phases(RunArgs),
    /// Coalescence point, doublet trace and splitting power law
    Ep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Gain/loss strength in eV; repeat to override the config's list
    #[arg(long = "gamma", allow_negative_numbers = true)]
    gammas: Vec<f64>,
    /// Output directory, overriding `out_dir`
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn context(&self) -> Result<Context, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        if !self.gammas.is_empty() {
            config.gammas = Some(self.gammas.clone());
            config.big_gammas = None;
        }
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        Context::new(config)
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(&args.context()?),
        Command::Wavefunction(args) => cmd_wavefunction(&args.context()?),
        Command::Phases(args) => cmd_phases(&args.context()?),
        Command::Ep(args) => cmd_ep(&args.context()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ptscatter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
