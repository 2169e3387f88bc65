use crate::detect::DetectorKind;
use crate::types::Scheme;

use super::config::{AllocationMode, ExperimentConfig, ExperimentKind, Fading, RisChannel};

/// Every named preset, with the experiment it runs.
pub const PRESETS: &[(&str, ExperimentKind)] = &[
    ("spreading-gain", ExperimentKind::BerSweep),
    ("primary-benefit", ExperimentKind::BerSweep),
    ("detector-ordering", ExperimentKind::BerSweep),
    ("secondary-slope", ExperimentKind::RateSweep),
    ("upper-bound-scaling", ExperimentKind::RateSweep),
    ("mutualism", ExperimentKind::RateSweep),
    ("ris-scaling", ExperimentKind::RisScaling),
    ("fdsr-cancellation", ExperimentKind::FdsrSweep),
    ("allocator-oracle", ExperimentKind::Allocation),
];

/// Configuration of a named preset, or `None` for an unknown name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let kind = PRESETS.iter().find(|(n, _)| *n == name)?.1;
    let mut cfg = ExperimentConfig::default_for(kind);
    cfg.seed = 20_200_101;
    match name {
        // Secondary BER crossing 1e-2 for K = 2 and K = 4.
        "spreading-gain" => {
            cfg.trials = 200_000;
            cfg.detectors = vec![DetectorKind::Ml];
            cfg.sweep.k = vec![2, 4];
            cfg.sweep.m_r = vec![2];
            cfg.sweep.snr_db = (0..=12).map(|i| 20.0 + 2.5 * i as f64).collect();
        }
        // Backscatter as strong as the direct link, so the extra path is
        // worth measuring against h2 = 0.
        "primary-benefit" => {
            cfg.trials = 200_000;
            cfg.detectors = vec![DetectorKind::Ml];
            cfg.ber.compare_without_backscatter = true;
            cfg.system.backscatter_db = 0.0;
            cfg.system.alpha = 1.0;
            cfg.sweep.k = vec![8];
            cfg.sweep.m_r = vec![1];
            cfg.sweep.snr_db = vec![10.0, 15.0, 20.0];
        }
        "detector-ordering" => {
            cfg.trials = 100_000;
            cfg.detectors = vec![DetectorKind::Ml, DetectorKind::SicZf, DetectorKind::Zf];
            cfg.system.backscatter_db = 10.0;
            cfg.sweep.k = vec![4];
            cfg.sweep.m_r = vec![2];
            cfg.sweep.snr_db = vec![10.0, 20.0, 30.0];
        }
        "secondary-slope" => {
            cfg.trials = 100_000;
            cfg.system.fading = Fading::RayleighComposite;
            cfg.system.backscatter_db = 0.0;
            cfg.sweep.k = vec![1];
            cfg.sweep.m_r = vec![1];
            cfg.sweep.snr_db = vec![30.0, 40.0];
        }
        "upper-bound-scaling" => {
            cfg.trials = 20_000;
            cfg.system.fading = Fading::RayleighComposite;
            cfg.system.backscatter_db = 0.0;
            cfg.sweep.k = vec![1, 2, 4, 8];
            cfg.sweep.m_r = vec![1, 2, 4, 8];
            cfg.sweep.snr_db = vec![40.0];
        }
        "mutualism" => {
            cfg.trials = 100;
            cfg.system.secondary = Scheme::Qpsk;
            cfg.sweep.k = vec![1];
            cfg.sweep.m_r = vec![1, 2];
            cfg.sweep.snr_db = vec![0.0, 10.0, 20.0, 30.0];
            cfg.sweep.alpha = (0..=32).map(|i| i as f64 / 32.0).collect();
        }
        "ris-scaling" => {
            cfg.trials = 100_000;
            cfg.ris.m_b = vec![2, 4, 8, 16, 32];
            cfg.ris.channels = vec![RisChannel::Unit, RisChannel::Rayleigh];
            cfg.sweep.snr_db = vec![0.0];
        }
        "fdsr-cancellation" => {
            cfg.trials = 200_000;
            cfg.sweep.k = vec![4];
            cfg.sweep.snr_db = vec![0.0, 3.0, 6.0];
            cfg.fdsr.residual = vec![0.0, 0.05, 0.1, 0.2];
        }
        "allocator-oracle" => {
            cfg.trials = 100;
            cfg.system.secondary = Scheme::Qpsk;
            cfg.allocation.mode = AllocationMode::Siso;
            cfg.allocation.states = 2;
            cfg.allocation.grid = 32;
            cfg.allocation.oracle_refine = Some(2);
            cfg.allocation.peak_power = Some(4.0);
            cfg.allocation.avg_power = Some(1.0);
            cfg.sweep.k = vec![1];
            cfg.sweep.m_r = vec![1];
            cfg.sweep.snr_db = vec![10.0];
        }
        _ => unreachable!("listed in PRESETS"),
    }
    Some(cfg)
}
