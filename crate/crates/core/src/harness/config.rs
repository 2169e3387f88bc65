use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alloc::PrimaryBound;
use crate::detect::DetectorKind;
use crate::types::{LinkProfile, Scheme, SystemConfig};
use crate::{Error, Result, C64};

/// The shipped default configuration, with every field documented.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.toml");

/// Smallest trial count accepted for BER experiments.
pub const MIN_BER_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BerSweep,
    RateSweep,
    Allocation,
    RisScaling,
    FdsrSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BerSweep => "ber_sweep",
            ExperimentKind::RateSweep => "rate_sweep",
            ExperimentKind::Allocation => "allocation",
            ExperimentKind::RisScaling => "ris_scaling",
            ExperimentKind::FdsrSweep => "fdsr_sweep",
        }
    }
}

/// How channel realizations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    /// Fresh Rayleigh `h1`, `l`, `g` per trial; `h2 = α·l·g` is double-Rayleigh.
    #[default]
    Rayleigh,
    /// Fresh Rayleigh `h1` and `h2` per trial, with
    /// `h2 ~ CN(0, α²·stx_gain²·I)` drawn directly.
    RayleighComposite,
    /// One cascaded Rayleigh draw, held for the whole run.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub p: f64,
    pub alpha: f64,
    pub active_load: bool,
    /// Average power gap of the backscatter link below the direct link, in dB.
    pub backscatter_db: f64,
    pub primary: Scheme,
    pub secondary: Scheme,
    pub fading: Fading,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            p: 1.0,
            alpha: 1.0,
            active_load: false,
            backscatter_db: 20.0,
            primary: Scheme::Bpsk,
            secondary: Scheme::Bpsk,
            fading: Fading::Rayleigh,
        }
    }
}

impl SystemSection {
    pub fn profile(&self) -> LinkProfile {
        LinkProfile::weaker_by_db(self.backscatter_db)
    }

    /// Noise variance giving `snr_db = 10·log10(p/σ²)`.
    pub fn sigma2_at(&self, snr_db: f64) -> f64 {
        self.p / 10f64.powf(snr_db / 10.0)
    }

    /// Link parameters at one sweep point.
    pub fn at(&self, snr_db: f64, k: usize, m_r: usize, seed: u64) -> Result<SystemConfig> {
        SystemConfig::new(self.p, self.sigma2_at(snr_db), k, m_r, self.alpha)?
            .with_active_load(self.active_load)
            .map(|c| c.with_seed(seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    pub k: Vec<usize>,
    pub m_r: Vec<usize>,
    /// Reflection efficiencies for rate sweeps; empty means `system.alpha`.
    pub alpha: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            k: vec![1],
            m_r: vec![1],
            alpha: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerSection {
    /// Also measure primary BER on the same draws with `h2 = 0`.
    pub compare_without_backscatter: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    #[default]
    Siso,
    Miso,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AllocationSection {
    pub mode: AllocationMode,
    /// `[w_s, w_c]`.
    pub weights: [f64; 2],
    /// Fading states per SISO problem.
    pub states: usize,
    pub peak_power: Option<f64>,
    pub avg_power: Option<f64>,
    pub grid: usize,
    pub primary_bound: PrimaryBound,
    /// Also solve each SISO problem by brute force on a grid this many
    /// times denser and report the gap.
    pub oracle_refine: Option<usize>,
    /// Transmit antennas for MISO.
    pub m_t: usize,
    pub power_budget: f64,
    pub min_primary_rate: f64,
    pub min_secondary_rate: f64,
    pub beta_grid: usize,
}

impl Default for AllocationSection {
    fn default() -> Self {
        AllocationSection {
            mode: AllocationMode::Siso,
            weights: [1.0, 1.0],
            states: 8,
            peak_power: Some(4.0),
            avg_power: Some(1.0),
            grid: 64,
            primary_bound: PrimaryBound::Upper,
            oracle_refine: None,
            m_t: 4,
            power_budget: 100.0,
            min_primary_rate: 2.0,
            min_secondary_rate: 0.5,
            beta_grid: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RisChannel {
    /// All element gains equal to one.
    Unit,
    /// Independent CN(0, 1) element gains per trial.
    Rayleigh,
}

impl RisChannel {
    pub fn name(self) -> &'static str {
        match self {
            RisChannel::Unit => "unit",
            RisChannel::Rayleigh => "rayleigh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RisSection {
    pub m_b: Vec<usize>,
    pub channels: Vec<RisChannel>,
}

impl Default for RisSection {
    fn default() -> Self {
        RisSection {
            m_b: vec![2, 4, 8, 16, 32],
            channels: vec![RisChannel::Unit, RisChannel::Rayleigh],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdsrSection {
    /// Self-interference channel `β1` as `[re, im]`.
    pub beta1: [f64; 2],
    /// Round-trip backscatter channel `β2` as `[re, im]`.
    pub beta2: [f64; 2],
    pub residual: Vec<f64>,
}

impl Default for FdsrSection {
    fn default() -> Self {
        FdsrSection {
            beta1: [3.0, 0.0],
            beta2: [0.3, 0.4],
            residual: vec![0.0, 0.05, 0.1, 0.2],
        }
    }
}

impl FdsrSection {
    pub fn beta1(&self) -> C64 {
        C64::new(self.beta1[0], self.beta1[1])
    }

    pub fn beta2(&self) -> C64 {
        C64::new(self.beta2[0], self.beta2[1])
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Monte Carlo trials per sweep point (blocks, channel draws or
    /// allocation instances).
    pub trials: usize,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_detectors")]
    pub detectors: Vec<DetectorKind>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub ber: BerSection,
    #[serde(default)]
    pub allocation: AllocationSection,
    #[serde(default)]
    pub ris: RisSection,
    #[serde(default)]
    pub fdsr: FdsrSection,
}

fn default_detectors() -> Vec<DetectorKind> {
    vec![DetectorKind::Ml]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<document>".into());
            Error::config(field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn default_for(kind: ExperimentKind) -> Self {
        let mut cfg = Self::from_toml(DEFAULT_CONFIG).expect("shipped default config is valid");
        cfg.experiment = kind;
        cfg
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let sys = &self.system;
        if !(sys.p > 0.0) {
            return Err(Error::config("system.p", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&sys.alpha) && !sys.active_load {
            return Err(Error::config(
                "system.alpha",
                "must lie in [0, 1] for a passive load",
            ));
        }
        if !(sys.alpha >= 0.0) || !sys.backscatter_db.is_finite() {
            return Err(Error::config(
                "system",
                "alpha must be >= 0 and backscatter_db finite",
            ));
        }
        let sw = &self.sweep;
        if sw.snr_db.is_empty() || sw.snr_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::config(
                "sweep.snr_db",
                "need at least one finite value",
            ));
        }
        if sw.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("sweep.snr_db", "must be strictly increasing"));
        }
        if sw.k.is_empty() || sw.k.contains(&0) {
            return Err(Error::config(
                "sweep.k",
                "need at least one value, all >= 1",
            ));
        }
        if sw.m_r.is_empty() || sw.m_r.contains(&0) {
            return Err(Error::config(
                "sweep.m_r",
                "need at least one value, all >= 1",
            ));
        }
        if sw.alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::config("sweep.alpha", "values must lie in [0, 1]"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        match self.experiment {
            ExperimentKind::BerSweep => self.validate_ber(),
            ExperimentKind::RateSweep => {
                if self.trials < crate::rates::MIN_ERGODIC_TRIALS && sys.fading != Fading::Fixed {
                    return Err(Error::config(
                        "trials",
                        format!("ergodic rates need >= {}", crate::rates::MIN_ERGODIC_TRIALS),
                    ));
                }
                Ok(())
            }
            ExperimentKind::Allocation => self.validate_allocation(),
            ExperimentKind::RisScaling => {
                if self.ris.m_b.is_empty() || self.ris.m_b.contains(&0) {
                    return Err(Error::config(
                        "ris.m_b",
                        "need at least one value, all >= 1",
                    ));
                }
                if self.ris.channels.is_empty() {
                    return Err(Error::config(
                        "ris.channels",
                        "need at least one channel model",
                    ));
                }
                Ok(())
            }
            ExperimentKind::FdsrSweep => {
                if self.trials < MIN_BER_TRIALS {
                    return Err(Error::config(
                        "trials",
                        format!("BER experiments need >= {MIN_BER_TRIALS}"),
                    ));
                }
                let f = &self.fdsr;
                if f.residual.is_empty() || f.residual.iter().any(|r| !(0.0..=1.0).contains(r)) {
                    return Err(Error::config("fdsr.residual", "need values in [0, 1]"));
                }
                if f.beta2().norm_sqr() == 0.0 {
                    return Err(Error::config("fdsr.beta2", "must be nonzero"));
                }
                if self.system.secondary != Scheme::Bpsk {
                    return Err(Error::config(
                        "system.secondary",
                        "FDSR sweeps use BPSK secondary symbols",
                    ));
                }
                Ok(())
            }
        }
    }

    fn validate_ber(&self) -> Result<()> {
        if self.trials < MIN_BER_TRIALS {
            return Err(Error::config(
                "trials",
                format!("BER experiments need >= {MIN_BER_TRIALS}"),
            ));
        }
        if self.detectors.is_empty() {
            return Err(Error::config("detectors", "need at least one detector"));
        }
        if self.system.alpha == 0.0 {
            return Err(Error::config(
                "system.alpha",
                "joint detection needs a backscatter path",
            ));
        }
        let needs_two = self
            .detectors
            .iter()
            .any(|d| matches!(d, DetectorKind::Zf | DetectorKind::SicZf));
        if needs_two && self.sweep.m_r.contains(&1) {
            return Err(Error::config(
                "sweep.m_r",
                "zero-forcing detectors need m_r >= 2",
            ));
        }
        Ok(())
    }

    fn validate_allocation(&self) -> Result<()> {
        let a = &self.allocation;
        if !(a.weights[0] >= 0.0 && a.weights[1] >= 0.0) || a.weights[0] + a.weights[1] == 0.0 {
            return Err(Error::config(
                "allocation.weights",
                "must be nonnegative and not both zero",
            ));
        }
        match a.mode {
            AllocationMode::Siso => {
                if a.states == 0 {
                    return Err(Error::config("allocation.states", "must be >= 1"));
                }
                if a.peak_power.is_none() && a.avg_power.is_none() {
                    return Err(Error::config(
                        "allocation",
                        "set peak_power and/or avg_power",
                    ));
                }
                if a.grid < crate::alloc::MIN_GRID {
                    return Err(Error::config(
                        "allocation.grid",
                        format!("must be >= {}", crate::alloc::MIN_GRID),
                    ));
                }
                if a.oracle_refine == Some(0) {
                    return Err(Error::config("allocation.oracle_refine", "must be >= 1"));
                }
            }
            AllocationMode::Miso => {
                if a.m_t == 0 {
                    return Err(Error::config("allocation.m_t", "must be >= 1"));
                }
                if a.beta_grid < 2 {
                    return Err(Error::config("allocation.beta_grid", "must be >= 2"));
                }
                if a.min_primary_rate < 0.0 || a.min_secondary_rate < 0.0 {
                    return Err(Error::config("allocation", "rate floors must be >= 0"));
                }
            }
        }
        Ok(())
    }
}
