//! `tqdsim`: command-line front end for the TQD hybrid-system simulator.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tqd_sim::experiments::{run_command, Command, ExperimentConfig};
use tqd_sim::Error;

#[derive(Parser)]
#[command(name = "tqdsim", version, about = "Triple-quantum-dot qubit and hybrid two-qubit gate simulations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// TQD eigenenergies versus ε_q
    Spectrum(Common),
    /// Even–odd composition of the TQD eigenstates versus ε_q
    Population(Common),
    /// Vacuum Rabi coupling versus resonator frequency
    Coupling(Common),
    /// Detuning slopes of the qubit splitting
    Sweetspot(Common),
    /// Dispersive iSWAP fidelity versus Δ/g
    GateIswap(Common),
    /// Holonomic gate fidelity versus α/g
    GateHolonomic(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. --set system.g_hz=5e7
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// RNG seed for noise sampling
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cmd: Command, args: &Common) -> Result<Vec<PathBuf>, Error> {
    let mut cfg = ExperimentConfig::load(args.config.as_deref(), &args.overrides)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.display().to_string();
    }
    let artifacts = run_command(cmd, &cfg)?;
    let dir = PathBuf::from(&cfg.output.dir);
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        a.write_to(&dir)?;
        written.push(dir.join(&a.name));
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Population(a) => (Command::Population, a),
        Cmd::Coupling(a) => (Command::Coupling, a),
        Cmd::Sweetspot(a) => (Command::Sweetspot, a),
        Cmd::GateIswap(a) => (Command::GateIswap, a),
        Cmd::GateHolonomic(a) => (Command::GateHolonomic, a),
    };
    match run(cmd, args) {
        Ok(paths) => {
            let mut out = std::io::stdout().lock();
            for p in paths {
                if writeln!(out, "{}", p.display()).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
