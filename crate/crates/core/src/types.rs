//! Shared domain types.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::complex_normal;
use crate::{Error, Result, C64};

/// Modulation family of a [`Constellation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Bpsk,
    Qpsk,
    /// Square M-ary QAM; `M` must be a perfect square of an even side.
    Mqam(u32),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Bpsk => write!(f, "bpsk"),
            Scheme::Qpsk => write!(f, "qpsk"),
            Scheme::Mqam(m) => write!(f, "{m}qam"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bpsk" => Ok(Scheme::Bpsk),
            "qpsk" => Ok(Scheme::Qpsk),
            other => {
                let digits = other
                    .strip_suffix("qam")
                    .or_else(|| other.strip_prefix("qam"))
                    .ok_or_else(|| Error::UnsupportedScheme(s.to_string()))?;
                digits
                    .parse::<u32>()
                    .map(Scheme::Mqam)
                    .map_err(|_| Error::UnsupportedScheme(s.to_string()))
            }
        }
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.to_string()
    }
}

/// A normalized symbol alphabet with `max |c| = 1`.
///
/// Point order is fixed; every detector breaks ties in favour of the lower
/// index. Each point carries a Gray label used for bit-error counting.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub(crate) scheme: Scheme,
    pub(crate) points: Vec<C64>,
    pub(crate) labels: Vec<u32>,
    pub(crate) bits_per_symbol: u32,
}

impl Constellation {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> C64 {
        self.points[idx]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn label(&self, idx: usize) -> u32 {
        self.labels[idx]
    }

    pub fn max_amplitude(&self) -> f64 {
        self.points.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Average symbol energy under a uniform prior.
    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn is_constant_modulus(&self) -> bool {
        let first = self.points[0].norm();
        self.points.iter().all(|c| (c.norm() - first).abs() < 1e-12)
    }

    /// Index of the point closest to `z`; the first point wins ties.
    pub fn nearest(&self, z: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.points.iter().enumerate() {
            let d = (z - c).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Exact lookup of a point value.
    pub fn index_of(&self, c: C64) -> Option<usize> {
        self.points.iter().position(|&p| p == c)
    }

    /// Number of differing label bits between two points.
    pub fn bit_errors(&self, a: usize, b: usize) -> u32 {
        (self.labels[a] ^ self.labels[b]).count_ones()
    }
}

/// Link-level parameters shared by the simulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit power (linear).
    pub p: f64,
    /// Noise variance per receive antenna (linear).
    pub sigma2: f64,
    /// Primary symbols per secondary symbol.
    pub k: usize,
    /// Receive antennas.
    pub m_r: usize,
    /// Reflection efficiency.
    pub alpha: f64,
    #[serde(default)]
    pub active_load: bool,
    #[serde(default)]
    pub seed: u64,
}

impl SystemConfig {
    pub fn new(p: f64, sigma2: f64, k: usize, m_r: usize, alpha: f64) -> Result<Self> {
        let cfg = SystemConfig {
            p,
            sigma2,
            k,
            m_r,
            alpha,
            active_load: false,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_active_load(mut self, active: bool) -> Result<Self> {
        self.active_load = active;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) {
            return Err(Error::invalid("p", format!("must be > 0, got {}", self.p)));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::invalid(
                "sigma2",
                format!("must be > 0, got {}", self.sigma2),
            ));
        }
        if self.k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        if self.m_r == 0 {
            return Err(Error::invalid("m_r", "must be >= 1"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be >= 0, got {}", self.alpha),
            ));
        }
        if self.alpha > 1.0 && !self.active_load {
            return Err(Error::PassiveBoundViolation { alpha: self.alpha });
        }
        Ok(())
    }

    /// Transmit SNR `p / sigma2` in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p / self.sigma2).log10()
    }
}

/// Relative strength of the backscatter link.
///
/// `stx_gain` scales the PTx→STx coefficient `l`, so that with unit-variance
/// fading `E‖h2‖² / E‖h1‖² = alpha² · stx_gain²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkProfile {
    pub stx_gain: f64,
}

impl LinkProfile {
    /// Backscatter link `db` weaker than the direct link on average (at alpha = 1).
    pub fn weaker_by_db(db: f64) -> Self {
        LinkProfile {
            stx_gain: 10f64.powf(-db / 20.0),
        }
    }
}

impl Default for LinkProfile {
    fn default() -> Self {
        LinkProfile::weaker_by_db(20.0)
    }
}

/// Channel coefficients seen by one receiver.
///
/// `direct` is the PTx→receiver vector (h1 or f1), `stx_in` the PTx→STx
/// scalar `l`, `stx_out` the STx→receiver vector (g or q), and `composite`
/// is `alpha · stx_in · stx_out` for the recorded `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub direct: Vec<C64>,
    pub stx_in: C64,
    pub stx_out: Vec<C64>,
    pub composite: Vec<C64>,
    pub alpha: f64,
}

impl ChannelState {
    pub fn new(direct: Vec<C64>, stx_in: C64, stx_out: Vec<C64>, alpha: f64) -> Result<Self> {
        if direct.len() != stx_out.len() {
            return Err(Error::invalid(
                "stx_out",
                format!(
                    "length {} differs from direct length {}",
                    stx_out.len(),
                    direct.len()
                ),
            ));
        }
        if direct.is_empty() {
            return Err(Error::invalid("direct", "must have at least one antenna"));
        }
        let composite = crate::channel::composite_backscatter_channel(stx_in, &stx_out, alpha)?;
        Ok(ChannelState {
            direct,
            stx_in,
            stx_out,
            composite,
            alpha,
        })
    }

    /// Independent unit-variance Rayleigh draws for `h1`, `l` and `g`, with `l`
    /// scaled by the profile's STx gain.
    pub fn rayleigh<R: Rng + ?Sized>(
        m_r: usize,
        profile: &LinkProfile,
        alpha: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if m_r == 0 {
            return Err(Error::invalid("m_r", "must be >= 1"));
        }
        let direct: Vec<C64> = (0..m_r).map(|_| complex_normal(rng, 1.0)).collect();
        let stx_in = complex_normal(rng, 1.0) * profile.stx_gain;
        let stx_out: Vec<C64> = (0..m_r).map(|_| complex_normal(rng, 1.0)).collect();
        ChannelState::new(direct, stx_in, stx_out, alpha)
    }

    pub fn m_r(&self) -> usize {
        self.direct.len()
    }

    /// Composite channel rebuilt for a different reflection efficiency.
    pub fn composite_at(&self, alpha: f64) -> Vec<C64> {
        self.stx_out
            .iter()
            .map(|g| g * self.stx_in * alpha)
            .collect()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ChannelState::new(
            self.direct.clone(),
            self.stx_in,
            self.stx_out.clone(),
            alpha,
        )
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// `aᴴ b`.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_parsing() {
        assert_eq!("BPSK".parse::<Scheme>().unwrap(), Scheme::Bpsk);
        assert_eq!("16qam".parse::<Scheme>().unwrap(), Scheme::Mqam(16));
        assert_eq!("qam64".parse::<Scheme>().unwrap(), Scheme::Mqam(64));
        assert!("8psk".parse::<Scheme>().is_err());
    }

    #[test]
    fn system_config_rejects_bad_values() {
        assert!(SystemConfig::new(1.0, 1.0, 1, 1, 0.5).is_ok());
        assert!(SystemConfig::new(0.0, 1.0, 1, 1, 0.5).is_err());
        assert!(SystemConfig::new(1.0, 0.0, 1, 1, 0.5).is_err());
        assert!(SystemConfig::new(1.0, 1.0, 0, 1, 0.5).is_err());
        assert!(SystemConfig::new(1.0, 1.0, 1, 0, 0.5).is_err());
        assert!(matches!(
            SystemConfig::new(1.0, 1.0, 1, 1, 1.5),
            Err(Error::PassiveBoundViolation { .. })
        ));
        let mut cfg = SystemConfig::new(1.0, 1.0, 1, 1, 1.0).unwrap();
        cfg.alpha = 1.5;
        assert!(cfg.with_active_load(true).is_ok());
    }

    #[test]
    fn snr_db_is_transmit_snr() {
        let cfg = SystemConfig::new(100.0, 1.0, 1, 1, 1.0).unwrap();
        assert!((cfg.snr_db() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn weaker_profile() {
        let p = LinkProfile::weaker_by_db(20.0);
        assert!((p.stx_gain - 0.1).abs() < 1e-15);
    }

    #[test]
    fn channel_state_records_composite() {
        let st = ChannelState::new(
            vec![C64::new(1.0, 0.0)],
            C64::new(0.3, 0.0),
            vec![C64::new(1.0, 0.0)],
            0.5,
        )
        .unwrap();
        assert!((st.composite[0] - C64::new(0.15, 0.0)).norm() < 1e-15);
        assert_eq!(st.composite_at(0.5), st.composite);
    }
}
