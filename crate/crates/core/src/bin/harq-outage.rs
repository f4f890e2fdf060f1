use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harq_outage::cli::{self, CliError, Config, Format};
use harq_outage::TermCap;

#[derive(Parser)]
#[command(name = "harq-outage", version, about = "Type I HARQ outage over time-correlated Rayleigh fading")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Overrides the Monte Carlo seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Single operating point.
    Outage,
    /// Outage versus total power over db_grid.
    Sweep,
    /// Series value and bound per truncation order (n_list).
    TruncationStudy,
    /// Correlation penalty over k_list × rho_grid.
    EllStudy,
    /// Least-squares diversity estimate over db_grid.
    Diversity,
    /// Monte Carlo estimates only.
    Mc,
}

fn run(args: &Args) -> Result<(), CliError> {
    let path = args
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut config = Config::from_path(path)?;
    if let Some(seed) = args.seed {
        if config.mc.is_some() || matches!(args.command, Command::Mc) {
            config.override_seed(seed);
        }
    }
    let cap = TermCap::from_env()?;
    let out = match args.command {
        Command::Outage => cli::cmd_outage(&config, args.format, cap)?,
        Command::Sweep => cli::cmd_sweep(&config, args.format, cap)?,
        Command::TruncationStudy => cli::cmd_truncation_study(&config, args.format, cap)?,
        Command::EllStudy => cli::cmd_ell_study(&config, args.format)?,
        Command::Diversity => cli::cmd_diversity(&config, args.format, cap)?,
        Command::Mc => cli::cmd_mc(&config, args.format)?,
    };
    match &args.out {
        Some(p) => std::fs::write(p, out).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(out.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("harq-outage: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
