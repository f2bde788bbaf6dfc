//! `gupqm`: command-line front end for GUP-corrected propagators and their checks.
//!
//! Exit status: 0 on success, 1 when a verification fails or a numerical
//! routine does not converge, 2 on usage or input errors.

mod commands;
mod error;
mod output;
mod settings;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{action, bound, green, kernel, spectrum, verify, CommandSpec, FlagList};
use error::CliResult;
use settings::Settings;

#[derive(Parser, Debug)]
#[command(name = "gupqm", version, about = "First-order GUP propagators, spectra, Green's functions and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key=value file mirroring the flags; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format [default: json, csv for bound]
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,

    /// Maximum number of sweep points evaluated concurrently
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Sweep a parameter: param:start:stop:count[:log]; repeat for a grid
    #[arg(long = "sweep", global = true, allow_hyphen_values = true)]
    sweeps: Vec<String>,

    /// Pretty-print JSON [default: true]
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pretty: Option<bool>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagator value, prefactor and action orders
    Kernel(kernel::KernelArgs),
    /// Classical action S0, S1 and S0 + alpha S1
    Action(action::ActionArgs),
    /// Oscillator levels: closed form against a matrix diagonalization
    Spectrum(spectrum::SpectrumArgs),
    /// Two-dimensional free Green's function
    Green(green::GreenArgs),
    /// Uncertainty bound curve and minimal length
    Bound(bound::BoundArgs),
    /// Run verification suites
    Verify(verify::VerifyArgs),
}

impl Cli {
    fn flags(&self) -> FlagList {
        let mut out = FlagList::new();
        out.opt("format", &self.format).opt("out", &self.out).opt("jobs", &self.jobs).opt("pretty", &self.pretty).many(
            "sweep",
            &self.sweeps,
        );
        match &self.command {
            Command::Kernel(a) => a.flags(&mut out),
            Command::Action(a) => a.flags(&mut out),
            Command::Spectrum(a) => a.flags(&mut out),
            Command::Green(a) => a.flags(&mut out),
            Command::Bound(a) => a.flags(&mut out),
            Command::Verify(a) => a.flags(&mut out),
        }
        out
    }
}

fn settings(cli: &Cli, spec: &CommandSpec) -> CliResult<Settings> {
    let mut s = match &cli.config {
        Some(path) => Settings::from_file(path, &spec.known_keys())?,
        None => Settings::default(),
    };
    s.apply_flags(cli.flags().0);
    Ok(s)
}

fn run(cli: Cli) -> CliResult<bool> {
    let spec = match &cli.command {
        Command::Kernel(_) => &kernel::SPEC,
        Command::Action(_) => &action::SPEC,
        Command::Spectrum(_) => &spectrum::SPEC,
        Command::Green(_) => &green::SPEC,
        Command::Bound(_) => &bound::SPEC,
        Command::Verify(_) => &verify::SPEC,
    };
    let mut s = settings(&cli, spec)?;
    match cli.command {
        Command::Kernel(_) => commands::execute(spec, &s, kernel::evaluate),
        Command::Action(_) => commands::execute(spec, &s, action::evaluate),
        Command::Spectrum(_) => commands::execute(spec, &s, spectrum::evaluate),
        Command::Green(_) => commands::execute(spec, &s, green::evaluate),
        Command::Bound(_) => commands::execute(spec, &s, bound::evaluate),
        Command::Verify(_) => {
            s.fallback_env("seed", verify::SEED_VAR);
            commands::execute(spec, &s, verify::evaluate)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
