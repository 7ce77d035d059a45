use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pitshot_cli::{cmd_figures, cmd_montecarlo, cmd_plan, cmd_simulate, cmd_sweep, load_config, Failure, Output};

/// Output directory override; takes precedence over `--out`.
const OUT_ENV: &str = "PITSHOT_OUT";

#[derive(Parser)]
#[command(name = "pitshot", version, about = "Launch, spin and soft-landing planner for pit-descending microbots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (flat key=value file).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overridden by PITSHOT_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the mission plan and write plan.csv.
    Plan(Common),
    /// Fly the plan through the rigid-body simulator and write simulate.csv.
    Simulate(Common),
    /// Run the launch-angle, impulse and depth sweeps.
    Sweep(Common),
    /// Run the spin-noise Monte Carlo and write montecarlo.csv.
    Montecarlo(Common),
    /// Write the figure data CSVs.
    Figures(Common),
}

fn write_files(dir: &Path, out: &Output) -> Result<(), Failure> {
    let io = |path: &Path, e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, body) in &out.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, cmd): (&Common, fn(&pitshot_cli::RunConfig) -> pitshot_cli::commands::CmdResult) = match &cli.command {
        Command::Plan(c) => (c, cmd_plan),
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Sweep(c) => (c, cmd_sweep),
        Command::Montecarlo(c) => (c, cmd_montecarlo),
        Command::Figures(c) => (c, cmd_figures),
    };
    let mut cfg = load_config(&common.config).map_err(|e| match e {
        pitshot::Error::Io { .. } => Failure::Io(e.to_string()),
        e => Failure::Config(e),
    })?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let dir = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .or_else(|| common.out.clone())
        .unwrap_or_else(|| cfg.out.clone());
    let out = cmd(&cfg)?;
    print!("{}", out.report);
    write_files(&dir, &out)?;
    for (name, _) in &out.files {
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
