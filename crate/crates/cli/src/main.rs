use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pathscatter_cli::config::{parse_config, Command, ConfigError};
use pathscatter_cli::output::{prepare_output_dir, write_error, write_outcome, RunError, EXIT_OK};
use pathscatter_cli::run::run;

#[derive(Parser)]
#[command(
    name = "pathscatter",
    version,
    about = "Path-integral scattering and charge-transfer calculations"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Lattice propagator for a time-independent potential.
    Propagator(Common),
    /// Evolve a Gaussian packet slice by slice.
    Evolve(Common),
    /// First Born elastic cross sections.
    BornElastic(Common),
    /// Influence amplitude for a fixed partner path.
    Influence(Common),
    /// First Born charge-transfer cross sections.
    ChargeTransfer(Common),
    /// Monte-Carlo position-space check of the capture amplitude.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override a configuration key, e.g. `--set lattice.points=256`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(command: Command, args: &Common) -> Result<(), RunError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(ConfigError::Invalid {
                field: "--threads".into(),
                message: "must be at least 1".into(),
            }
            .into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError::Io(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", args.config.display())))?;
    let config = parse_config(command, &text, &args.set)?;
    prepare_output_dir(&args.out)?;
    let start = Instant::now();
    let outcome = run(&config)?;
    write_outcome(&args.out, &outcome, start.elapsed())?;
    for w in &outcome.document.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::Propagator(a) => (Command::Propagator, a),
        Sub::Evolve(a) => (Command::Evolve, a),
        Sub::BornElastic(a) => (Command::BornElastic, a),
        Sub::Influence(a) => (Command::Influence, a),
        Sub::ChargeTransfer(a) => (Command::ChargeTransfer, a),
        Sub::Oracle(a) => (Command::Oracle, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if args.out.is_dir() {
                write_error(&args.out, command, &e);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
