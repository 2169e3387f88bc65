// Monte Carlo BER of ML, SIC and ZF detection over SNR, built in code
// rather than from a config file.
//
// ```text
// cargo run --release --example ber_sweep
// ```

use symradio::detect::DetectorKind;
use symradio::harness::{run_experiment, ExperimentConfig, ExperimentKind};

pub fn run(trials: usize) -> symradio::Result<()> {
    let mut cfg = ExperimentConfig::default_for(ExperimentKind::BerSweep);
    cfg.trials = trials;
    cfg.detectors = vec![DetectorKind::Ml, DetectorKind::SicZf, DetectorKind::Zf];
    cfg.system.backscatter_db = 10.0;
    cfg.sweep.k = vec![4];
    cfg.sweep.m_r = vec![2];
    cfg.sweep.snr_db = vec![0.0, 10.0, 20.0, 30.0];

    println!(
        "{:>7} {:>8} {:>10} {:>10}",
        "snr_db", "detector", "ber_s", "ber_c"
    );
    let rows = run_experiment(&cfg)?;
    for pair in rows.chunks(2) {
        let (s, c) = (&pair[0], &pair[1]);
        println!(
            "{:>7} {:>8} {:>10.2e} {:>10.2e}",
            s.snr_db.unwrap(),
            s.detector,
            s.value,
            c.value
        );
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run(50_000)
}
