use clap::{Parser, Subcommand};
use dipolar_shield::cli::{self, Format, RunConfig, RunSummary};
use dipolar_shield::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    version,
    about = "Coupled-channel scattering of field-dressed polar molecules"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dotted override, e.g. `--set basis.l_max=12`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Monomer Stark levels and pair-threshold crossings.
    StarkMap,
    /// Adiabatic potential curves.
    Adiabats,
    /// Observables over the electric-field grid.
    SweepField,
    /// Observables and threshold fits over the collision-energy grid.
    SweepEnergy,
    /// Convergence study along one axis.
    Converge,
    /// Check the configuration and print it with all defaults filled in.
    ValidateConfig,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let mut cfg = match RunConfig::load(args.config.as_deref(), &args.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = args.out {
        cfg.output.dir = out;
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    let result: Result<RunSummary, Error> = match args.command {
        Command::StarkMap => cli::run_stark_map(&cfg),
        Command::Adiabats => cli::run_adiabats(&cfg, args.jobs),
        Command::SweepField => cli::run_field_sweep(&cfg, args.jobs),
        Command::SweepEnergy => cli::run_energy_sweep(&cfg, args.jobs),
        Command::Converge => cli::run_convergence(&cfg, args.jobs),
        Command::ValidateConfig => {
            print!("{}", cfg.to_toml_string());
            return ExitCode::SUCCESS;
        }
    };
    match result {
        Ok(s) => {
            for p in &s.outputs {
                log::info!("wrote {}", p.display());
            }
            if !s.failures.is_empty() {
                log::error!("{} of {} points failed", s.failures.len(), s.points);
            }
            ExitCode::from(s.exit_code() as u8)
        }
        Err(Error::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
