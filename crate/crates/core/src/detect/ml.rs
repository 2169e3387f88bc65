use crate::channel::ReceivedBlock;
use crate::types::{norm_sqr, Constellation};
use crate::{Error, Result, C64};

use super::DetectionResult;

/// Joint ML detection by conditional search.
///
/// For each secondary candidate `c`, every `s_k` is decided by MRC against
/// the effective channel `√p(h1 + h2·c)`; the `c` whose conditional decisions
/// leave the smallest total residual wins. This visits `K·|A_c|·|A_s|`
/// symbol hypotheses instead of `|A_s|^K·|A_c|` and returns the same
/// minimizer.
pub fn detect_ml(
    block: &ReceivedBlock,
    h1: &[C64],
    h2: &[C64],
    p: f64,
    a_s: &Constellation,
    a_c: &Constellation,
) -> Result<DetectionResult> {
    check_dims(block, h1, h2)?;
    let amp = p.sqrt();
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut heff = vec![C64::new(0.0, 0.0); h1.len()];
    for (ci, &c) in a_c.points().iter().enumerate() {
        for ((e, a), b) in heff.iter_mut().zip(h1).zip(h2) {
            *e = (a + b * c) * amp;
        }
        let gain = norm_sqr(&heff);
        if gain == 0.0 {
            return Err(Error::DegenerateChannel { candidate: ci });
        }
        let mut total = 0.0;
        let mut s_idx = Vec::with_capacity(block.k());
        for y in &block.samples {
            // MRC statistic; ‖y − h s‖² = ‖y − h z‖² + ‖h‖²|z − s|²
            let z: C64 = heff.iter().zip(y).map(|(h, v)| h.conj() * v).sum::<C64>() / gain;
            let si = a_s.nearest(z);
            let s = a_s.point(si);
            total += y
                .iter()
                .zip(&heff)
                .map(|(v, h)| (v - h * s).norm_sqr())
                .sum::<f64>();
            s_idx.push(si);
        }
        if best.as_ref().is_none_or(|(m, _, _)| total < *m) {
            best = Some((total, ci, s_idx));
        }
    }
    let (metric, c_idx, s_idx) = best.expect("secondary alphabet is nonempty");
    Ok(DetectionResult::from_indices(
        s_idx, c_idx, a_s, a_c, metric,
    ))
}

pub(crate) fn check_dims(block: &ReceivedBlock, h1: &[C64], h2: &[C64]) -> Result<()> {
    if h1.len() != h2.len() || h1.len() != block.m_r() {
        return Err(Error::invalid(
            "channel",
            format!(
                "h1 ({}), h2 ({}) and block ({}) antenna counts differ",
                h1.len(),
                h2.len(),
                block.m_r()
            ),
        ));
    }
    Ok(())
}
