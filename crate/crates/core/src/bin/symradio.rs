use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symradio::harness::{
    preset, run_experiment_with, CsvSink, ExperimentConfig, ExperimentKind, PRESETS,
};
use symradio::Error;

#[derive(Parser)]
#[command(
    name = "symradio",
    version,
    about = "Symbiotic radio link-level experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bit error rate sweep over SNR, K and M_r.
    Ber(RunArgs),
    /// Primary and secondary achievable rates.
    Rate(RunArgs),
    /// Power/reflection allocation or MISO beamforming.
    Alloc(RunArgs),
    /// RIS passive-beamforming SNR scaling.
    Ris(RunArgs),
    /// Full-duplex secondary detection after self-interference cancellation.
    Fdsr(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `--preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the seed from the config or preset.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(kind: ExperimentKind, args: &RunArgs) -> symradio::Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(name).ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Config {
                field: "--preset".into(),
                reason: format!("unknown preset {name:?}; available: {}", names.join(", ")),
            }
        })?,
        (None, None) => ExperimentConfig::default_for(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::Config {
            field: "experiment".into(),
            reason: format!("{} cannot run under this subcommand", cfg.experiment.name()),
        });
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    Ok(cfg)
}

fn run(kind: ExperimentKind, args: &RunArgs) -> symradio::Result<()> {
    if args.preset.as_deref() == Some("list") {
        for (name, k) in PRESETS {
            println!("{name}\t{}", k.name());
        }
        return Ok(());
    }
    let cfg = load(kind, args)?;
    cfg.validate()?;
    match &cfg.out {
        Some(path) => {
            let mut sink = CsvSink::create(path)?;
            run_experiment_with(&cfg, |row| sink.push(&row))
        }
        None => {
            let mut sink = CsvSink::from_writer(std::io::stdout().lock(), "<stdout>".as_ref())?;
            run_experiment_with(&cfg, |row| sink.push(&row))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Ber(a) => (ExperimentKind::BerSweep, a),
        Command::Rate(a) => (ExperimentKind::RateSweep, a),
        Command::Alloc(a) => (ExperimentKind::Allocation, a),
        Command::Ris(a) => (ExperimentKind::RisScaling, a),
        Command::Fdsr(a) => (ExperimentKind::FdsrSweep, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match &e {
                Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::UnsupportedScheme(_) => 2,
                // an unreadable config file is a config error
                Error::Io { path, .. } if args.config.as_ref() == Some(path) => 2,
                Error::Infeasible { .. } => 3,
                _ => 1,
            })
        }
    }
}
