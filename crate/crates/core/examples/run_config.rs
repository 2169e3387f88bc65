// Runs an experiment described by a TOML file and writes its CSV, the same
// way the `symradio` binary does.
//
// ```text
// cargo run --release --example run_config -- configs/default.toml results.csv
// ```

use std::path::{Path, PathBuf};

use symradio::harness::{run_experiment, write_results, ExperimentConfig};

pub fn run(config: &Path, out: &Path) -> symradio::Result<usize> {
    let cfg = ExperimentConfig::load(config)?;
    let rows = run_experiment(&cfg)?;
    write_results(&rows, out)?;
    Ok(rows.len())
}

fn main() -> symradio::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    let n = run(&config, &out)?;
    println!("{n} rows written to {}", out.display());
    Ok(())
}
