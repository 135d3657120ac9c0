use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};
use hjc_cli::{run, CliError, Overrides, Subcommand};

/// Holstein–Jaynes–Cummings cavity polaron simulator.
///
/// Every flag can also be set through an environment variable with the
/// `HJC_` prefix (for example `HJC_THREADS=4`). Flags win over the
/// environment, which wins over the config file.
#[derive(Parser)]
#[command(name = "hjc", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "HJC_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "HJC_THREADS")]
    threads: Option<usize>,
    /// Seed for solver start vectors and disorder draws.
    #[arg(long, global = true, env = "HJC_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true, env = "HJC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Experiment variant, e.g. fig3a or fig3b for et-rate.
    #[arg(long, global = true, env = "HJC_MODE")]
    mode: Option<String>,
    /// Matrices up to this dimension are diagonalized densely.
    #[arg(long, global = true, env = "HJC_DENSE_THRESHOLD")]
    dense_threshold: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Low-lying eigenvalues next to the analytic dressed levels.
    Spectrum,
    /// P₀ against N and Ω_e.
    P0Sweep,
    /// P₀ statistics over Gaussian site disorder against Ω_e/σ.
    DisorderEnsemble {
        /// Also write every realization's P₀.
        #[arg(long, env = "HJC_DUMP_REALIZATIONS")]
        dump_realizations: bool,
    },
    /// Cavity-modified electron-transfer rate ratios.
    EtRate,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (sub, dump) = match cli.command {
        Command::Spectrum => (Subcommand::Spectrum, false),
        Command::P0Sweep => (Subcommand::P0Sweep, false),
        Command::DisorderEnsemble { dump_realizations } => (Subcommand::DisorderEnsemble, dump_realizations),
        Command::EtRate => (Subcommand::EtRate, false),
    };
    let result = match cli.config {
        None => Err(CliError::Config("--config is required".into())),
        Some(path) => run(
            sub,
            &path,
            &cli.out_dir,
            &Overrides {
                threads: cli.threads,
                seed: cli.seed,
                mode: cli.mode,
                dense_threshold: cli.dense_threshold,
                dump_realizations: dump,
            },
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hjc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
