//! Full-duplex operation: the PTx listens to the backscattered signal while
//! transmitting, cancels its own (known) transmission and decodes `c`.

use rand::Rng;

use crate::channel::{BlockTruth, ReceivedBlock};
use crate::rng::complex_normal;
use crate::types::Constellation;
use crate::{Error, Result, C64};

/// Single-antenna loop channel at the PTx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdsrChannel {
    /// Self-interference coefficient.
    pub beta1: C64,
    /// PTx→STx→PTx round-trip coefficient.
    pub beta2: C64,
    /// Fraction of the self-interference amplitude left after cancellation;
    /// 0 is perfect cancellation.
    pub residual_factor: f64,
}

impl FdsrChannel {
    pub fn new(beta1: C64, beta2: C64, residual_factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&residual_factor) {
            return Err(Error::invalid(
                "residual_factor",
                format!("must lie in [0, 1], got {residual_factor}"),
            ));
        }
        Ok(FdsrChannel {
            beta1,
            beta2,
            residual_factor,
        })
    }
}

/// `y_k = √p·β1·s_k + √p·β2·s_k·c + u_k`.
pub fn synthesize_fdsr_block<R: Rng + ?Sized>(
    ch: &FdsrChannel,
    p: f64,
    s_seq: &[C64],
    c: C64,
    sigma2: f64,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    if s_seq.is_empty() {
        return Err(Error::invalid(
            "s_seq",
            "block needs K >= 1 primary symbols",
        ));
    }
    let amp = p.sqrt();
    let samples = s_seq
        .iter()
        .map(|&s| {
            let clean = amp * ch.beta1 * s + amp * ch.beta2 * s * c;
            vec![if sigma2 > 0.0 {
                clean + complex_normal(rng, sigma2)
            } else {
                clean
            }]
        })
        .collect();
    Ok(ReceivedBlock {
        samples,
        truth: Some(BlockTruth {
            s: s_seq.to_vec(),
            c,
        }),
    })
}

/// Removes `(1 − residual)·√p·β1·s_k` using the known primary symbols, then
/// picks `argmin_c Σ_k |r_k − √p·β2·s_k·c|²`. Returns the index into `a_c`.
pub fn cancel_and_detect(
    block: &ReceivedBlock,
    ch: &FdsrChannel,
    p: f64,
    s_known: &[C64],
    a_c: &Constellation,
) -> Result<usize> {
    if s_known.len() != block.k() {
        return Err(Error::invalid(
            "s_known",
            format!("{} symbols for a block of {}", s_known.len(), block.k()),
        ));
    }
    let amp = p.sqrt();
    let cancel = (1.0 - ch.residual_factor) * amp * ch.beta1;
    let residual: Vec<C64> = block
        .samples
        .iter()
        .zip(s_known)
        .map(|(y, &s)| y[0] - cancel * s)
        .collect();
    let mut best = (0, f64::INFINITY);
    for (ci, &c) in a_c.points().iter().enumerate() {
        let cost: f64 = residual
            .iter()
            .zip(s_known)
            .map(|(r, &s)| (r - amp * ch.beta2 * s * c).norm_sqr())
            .sum();
        if cost < best.1 {
            best = (ci, cost);
        }
    }
    Ok(best.0)
}

/// Secondary BER with perfect cancellation, BPSK `c` and unit-modulus `s`:
/// coherent detection over an effective energy `K·p·|β2|²`.
pub fn perfect_cancellation_ber(beta2: C64, p: f64, k: usize, sigma2: f64) -> f64 {
    crate::stats::coherent_bpsk_ber(k as f64 * p * beta2.norm_sqr(), sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::build_constellation;
    use crate::rng::make_rng;
    use crate::types::Scheme;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn synthesis_examples() {
        let mut rng = make_rng(0, 0);
        let ch = FdsrChannel::new(c(1.0), c(0.2), 0.0).unwrap();
        let b = synthesize_fdsr_block(&ch, 1.0, &[c(1.0)], c(1.0), 0.0, &mut rng).unwrap();
        assert!((b.samples[0][0] - c(1.2)).norm() < 1e-15);

        let ch = FdsrChannel::new(c(1.0), c(0.0), 0.0).unwrap();
        let b = synthesize_fdsr_block(&ch, 4.0, &[c(-1.0)], c(1.0), 0.0, &mut rng).unwrap();
        assert_eq!(b.samples[0][0], c(-2.0));

        let ch = FdsrChannel::new(c(1.0), c(0.5), 0.0).unwrap();
        let b =
            synthesize_fdsr_block(&ch, 1.0, &[c(1.0), c(-1.0)], c(-1.0), 0.0, &mut rng).unwrap();
        assert_eq!(b.samples, vec![vec![c(0.5)], vec![c(-0.5)]]);
    }

    #[test]
    fn perfect_cancellation_noiseless_exact() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        let mut rng = make_rng(1, 0);
        let ch = FdsrChannel::new(C64::new(3.0, 1.0), C64::new(0.1, -0.05), 0.0).unwrap();
        let s: Vec<C64> = (0..4).map(|i| qpsk.point(i)).collect();
        for ci in 0..2 {
            let b = synthesize_fdsr_block(&ch, 2.0, &s, bpsk.point(ci), 0.0, &mut rng).unwrap();
            assert_eq!(cancel_and_detect(&b, &ch, 2.0, &s, &bpsk).unwrap(), ci);
        }
    }

    #[test]
    fn bpsk_rule_equals_matched_filter_sign() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        let mut rng = make_rng(2, 0);
        for _ in 0..2000 {
            let beta1 = complex_normal(&mut rng, 1.0);
            let beta2 = complex_normal(&mut rng, 0.1);
            let ch = FdsrChannel::new(beta1, beta2, 0.0).unwrap();
            let s: Vec<C64> = (0..3).map(|_| qpsk.point(rng.random_range(0..4))).collect();
            let b = synthesize_fdsr_block(
                &ch,
                1.5,
                &s,
                bpsk.point(rng.random_range(0..2)),
                0.5,
                &mut rng,
            )
            .unwrap();
            let amp = 1.5f64.sqrt();
            let stat: f64 = b
                .samples
                .iter()
                .zip(&s)
                .map(|(y, &sk)| ((amp * beta2 * sk).conj() * (y[0] - amp * beta1 * sk)).re)
                .sum();
            let expected = if stat >= 0.0 { 0 } else { 1 };
            assert_eq!(
                cancel_and_detect(&b, &ch, 1.5, &s, &bpsk).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn residual_factor_bounds() {
        assert!(FdsrChannel::new(c(1.0), c(1.0), -0.1).is_err());
        assert!(FdsrChannel::new(c(1.0), c(1.0), 1.1).is_err());
    }
}
