use crate::channel::ReceivedBlock;
use crate::types::{norm_sqr, Constellation};
use crate::{Error, Result, C64};

use super::linear::{detect_linear, CDecisionRule, LinearVariant};
use super::ml::check_dims;
use super::DetectionResult;

/// Intermediate decisions of the three SIC stages.
#[derive(Debug, Clone, PartialEq)]
pub struct SicOutcome {
    /// Stage 1: linear estimate of the primary symbols.
    pub first_stage: Vec<usize>,
    /// Stages 2 and 3: secondary decision and re-estimated primary symbols.
    pub result: DetectionResult,
}

/// Successive interference cancellation.
///
/// 1. Linear (ZF or MMSE) estimate of every `s_k`.
/// 2. Subtract `√p·h1·ŝ_k` and decide `c` by matched filtering of the
///    residual against `√p·h2·ŝ_k`.
/// 3. Re-decide every `s_k` by MRC over `√p(h1 + h2·ĉ)`.
#[allow(clippy::too_many_arguments)]
pub fn detect_sic(
    block: &ReceivedBlock,
    h1: &[C64],
    h2: &[C64],
    p: f64,
    sigma2: f64,
    a_s: &Constellation,
    a_c: &Constellation,
    first_stage: LinearVariant,
) -> Result<DetectionResult> {
    detect_sic_detailed(block, h1, h2, p, sigma2, a_s, a_c, first_stage).map(|o| o.result)
}

#[allow(clippy::too_many_arguments)]
pub fn detect_sic_detailed(
    block: &ReceivedBlock,
    h1: &[C64],
    h2: &[C64],
    p: f64,
    sigma2: f64,
    a_s: &Constellation,
    a_c: &Constellation,
    first_stage: LinearVariant,
) -> Result<SicOutcome> {
    if first_stage == LinearVariant::Mrc {
        return Err(Error::invalid(
            "first_stage",
            "SIC uses a ZF or MMSE first stage",
        ));
    }
    check_dims(block, h1, h2)?;
    let stage1 = detect_linear(
        block,
        h1,
        h2,
        p,
        sigma2,
        first_stage,
        a_s,
        a_c,
        CDecisionRule::SumModulus,
    )?;
    let (c_idx, _) = secondary_given_primary(block, h1, h2, p, &stage1.s_hat, a_c);

    let amp = p.sqrt();
    let c = a_c.point(c_idx);
    let heff: Vec<C64> = h1.iter().zip(h2).map(|(a, b)| (a + b * c) * amp).collect();
    let gain = norm_sqr(&heff);
    if gain == 0.0 {
        return Err(Error::DegenerateChannel { candidate: c_idx });
    }
    let mut metric = 0.0;
    let s_idx = block
        .samples
        .iter()
        .map(|y| {
            let z: C64 = heff.iter().zip(y).map(|(h, v)| h.conj() * v).sum::<C64>() / gain;
            let si = a_s.nearest(z);
            let s = a_s.point(si);
            metric += y
                .iter()
                .zip(&heff)
                .map(|(v, h)| (v - h * s).norm_sqr())
                .sum::<f64>();
            si
        })
        .collect();
    Ok(SicOutcome {
        first_stage: stage1.s_idx,
        result: DetectionResult::from_indices(s_idx, c_idx, a_s, a_c, metric),
    })
}

/// `argmin_c Σ_k ‖y_k − √p·h1·s_k − √p·h2·s_k·c‖²` for given primary
/// symbols; returns the index and the minimized residual.
pub fn secondary_given_primary(
    block: &ReceivedBlock,
    h1: &[C64],
    h2: &[C64],
    p: f64,
    s: &[C64],
    a_c: &Constellation,
) -> (usize, f64) {
    let amp = p.sqrt();
    let residual: Vec<Vec<C64>> = block
        .samples
        .iter()
        .zip(s)
        .map(|(y, &sk)| y.iter().zip(h1).map(|(v, h)| v - h * sk * amp).collect())
        .collect();
    let mut best = (0, f64::INFINITY);
    for (ci, &c) in a_c.points().iter().enumerate() {
        let cost: f64 = residual
            .iter()
            .zip(s)
            .map(|(r, &sk)| {
                r.iter()
                    .zip(h2)
                    .map(|(v, h)| (v - h * sk * c * amp).norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        if cost < best.1 {
            best = (ci, cost);
        }
    }
    best
}
