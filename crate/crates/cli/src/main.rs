use clap::{Parser, Subcommand};
use env_logger::Env;

use pointspec_cli::config::{Mode, Params};
use pointspec_cli::{execute, resolve};

/// Bound states and dynamics of one- and two-point interactions.
#[derive(Debug, Parser)]
#[command(name = "pointspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coupling matrix, locality and boundary-form check
    Extension(Params),
    /// Numerical bound states
    Spectrum(Params),
    /// Closed-form eigenfunction samples, checked against the solver
    Eigenfunction(Params),
    /// Crank–Nicolson evolution on a grid
    Evolve(Params),
    /// Random phase-kick ensemble
    Dephase(Params),
    /// Solver against closed forms, for one interaction or the default sweep
    Verify(Params),
    /// Mode taken from the config file
    Run(Params),
}

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or("POINTSPEC_LOG", "error")).init();
    let cli = Cli::parse();
    let (mode, params) = match cli.command {
        Command::Extension(p) => (Some(Mode::Extension), p),
        Command::Spectrum(p) => (Some(Mode::Spectrum), p),
        Command::Eigenfunction(p) => (Some(Mode::Eigenfunction), p),
        Command::Evolve(p) => (Some(Mode::Evolve), p),
        Command::Dephase(p) => (Some(Mode::Dephase), p),
        Command::Verify(p) => (Some(Mode::Verify), p),
        Command::Run(p) => (None, p),
    };
    let params = Params { mode, ..params };
    let code = match resolve(params) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
