//! Joint detection of the primary symbols `s_1..s_K` and the secondary
//! symbol `c` from one received block.
//!
//! All coherent detectors assume the receiver knows `h1`, `h2` and `p`.
//! Ties are always broken toward the lower constellation index.

mod cluster;
mod linear;
mod ml;
mod sic;

pub use cluster::{detect_clustering, ClusteringOutcome, PilotPair};
pub use linear::{combiner, detect_linear, CDecisionRule, Combiner, LinearVariant, StackedModel};
pub use ml::detect_ml;
pub use sic::{detect_sic, detect_sic_detailed, secondary_given_primary, SicOutcome};

use serde::{Deserialize, Serialize};

use crate::types::Constellation;
use crate::C64;

/// Decisions for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub s_idx: Vec<usize>,
    pub c_idx: usize,
    pub s_hat: Vec<C64>,
    pub c_hat: C64,
    /// Minimized objective (ML/SIC residual energy, or the linear `c` cost).
    pub metric: f64,
}

impl DetectionResult {
    pub(crate) fn from_indices(
        s_idx: Vec<usize>,
        c_idx: usize,
        a_s: &Constellation,
        a_c: &Constellation,
        metric: f64,
    ) -> Self {
        let s_hat = s_idx.iter().map(|&i| a_s.point(i)).collect();
        DetectionResult {
            s_idx,
            c_idx,
            s_hat,
            c_hat: a_c.point(c_idx),
            metric,
        }
    }
}

/// Detector selection used by the experiment harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Ml,
    Mrc,
    Zf,
    Mmse,
    SicZf,
    SicMmse,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Ml => "ml",
            DetectorKind::Mrc => "mrc",
            DetectorKind::Zf => "zf",
            DetectorKind::Mmse => "mmse",
            DetectorKind::SicZf => "sic_zf",
            DetectorKind::SicMmse => "sic_mmse",
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn detect(
        self,
        block: &crate::channel::ReceivedBlock,
        h1: &[C64],
        h2: &[C64],
        p: f64,
        sigma2: f64,
        a_s: &Constellation,
        a_c: &Constellation,
    ) -> crate::Result<DetectionResult> {
        let rule = CDecisionRule::SumModulus;
        match self {
            DetectorKind::Ml => detect_ml(block, h1, h2, p, a_s, a_c),
            DetectorKind::Mrc => {
                detect_linear(block, h1, h2, p, sigma2, LinearVariant::Mrc, a_s, a_c, rule)
            }
            DetectorKind::Zf => {
                detect_linear(block, h1, h2, p, sigma2, LinearVariant::Zf, a_s, a_c, rule)
            }
            DetectorKind::Mmse => detect_linear(
                block,
                h1,
                h2,
                p,
                sigma2,
                LinearVariant::Mmse,
                a_s,
                a_c,
                rule,
            ),
            DetectorKind::SicZf => {
                detect_sic(block, h1, h2, p, sigma2, a_s, a_c, LinearVariant::Zf)
            }
            DetectorKind::SicMmse => {
                detect_sic(block, h1, h2, p, sigma2, a_s, a_c, LinearVariant::Mmse)
            }
        }
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
