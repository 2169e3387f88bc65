//! Flat-fading channels and received-block synthesis.
//!
//! One model serves every receiver in the system:
//!
//! `y_k = √p·direct·s_k + √p·composite·s_k·c + u_k`,  `k = 1..K`,
//!
//! with `u_k ~ CN(0, σ²I)` and the secondary symbol `c` held constant over
//! the block. At the SRx `direct = h1`, `composite = h2 = α·l·g`; at the PRx
//! the same form holds with `f1`, `f2`.

use rand::Rng;

use crate::rng::complex_normal;
use crate::{Error, Result, C64};

/// Symbols that generated a block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTruth {
    pub s: Vec<C64>,
    pub c: C64,
}

/// The `K` received vectors of one secondary symbol period.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub samples: Vec<Vec<C64>>,
    pub truth: Option<BlockTruth>,
}

impl ReceivedBlock {
    pub fn new(samples: Vec<Vec<C64>>) -> Result<Self> {
        let m = samples.first().map(Vec::len).unwrap_or(0);
        if m == 0 || samples.iter().any(|y| y.len() != m) {
            return Err(Error::invalid(
                "samples",
                "block needs K >= 1 vectors of equal nonzero length",
            ));
        }
        Ok(ReceivedBlock {
            samples,
            truth: None,
        })
    }

    pub fn k(&self) -> usize {
        self.samples.len()
    }

    pub fn m_r(&self) -> usize {
        self.samples[0].len()
    }

    /// Every sample multiplied by `factor`; the truth is kept.
    pub fn scaled(&self, factor: C64) -> Self {
        ReceivedBlock {
            samples: self
                .samples
                .iter()
                .map(|y| y.iter().map(|v| v * factor).collect())
                .collect(),
            truth: self.truth.clone(),
        }
    }
}

/// `length` i.i.d. CN(0, variance) coefficients.
pub fn sample_flat_rayleigh<R: Rng + ?Sized>(
    length: usize,
    variance: f64,
    rng: &mut R,
) -> Result<Vec<C64>> {
    if length == 0 {
        return Err(Error::invalid("length", "must be >= 1"));
    }
    if !(variance > 0.0) {
        return Err(Error::invalid(
            "variance",
            format!("must be > 0, got {variance}"),
        ));
    }
    Ok((0..length).map(|_| complex_normal(rng, variance)).collect())
}

/// `h2 = α·l·g`.
pub fn composite_backscatter_channel(l: C64, g: &[C64], alpha: f64) -> Result<Vec<C64>> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must be >= 0, got {alpha}"),
        ));
    }
    Ok(g.iter().map(|gm| l * gm * alpha).collect())
}

/// Synthesizes one block of `s_seq.len()` received vectors.
///
/// `sigma2 = 0` gives the exact noiseless superposition.
pub fn synthesize_block<R: Rng + ?Sized>(
    direct: &[C64],
    composite: &[C64],
    p: f64,
    s_seq: &[C64],
    c: C64,
    sigma2: f64,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    if direct.len() != composite.len() || direct.is_empty() {
        return Err(Error::invalid(
            "composite",
            "direct and composite channels must have the same nonzero length",
        ));
    }
    if s_seq.is_empty() {
        return Err(Error::invalid(
            "s_seq",
            "block needs K >= 1 primary symbols",
        ));
    }
    if !(p >= 0.0) || !(sigma2 >= 0.0) {
        return Err(Error::invalid("p/sigma2", "must be nonnegative"));
    }
    let amp = p.sqrt();
    let samples = s_seq
        .iter()
        .map(|&s| {
            direct
                .iter()
                .zip(composite)
                .map(|(&h1, &h2)| {
                    let clean = amp * h1 * s + amp * h2 * s * c;
                    if sigma2 > 0.0 {
                        clean + complex_normal(rng, sigma2)
                    } else {
                        clean
                    }
                })
                .collect()
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_rng;
    use crate::types::norm_sqr;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rayleigh_moments() {
        let mut rng = make_rng(11, 0);
        let v = sample_flat_rayleigh(4, 1.0, &mut rng).unwrap();
        assert_eq!(v.len(), 4);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_flat_rayleigh(1, 1.0, &mut rng).unwrap()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean |h|^2 = {mean}");
    }

    #[test]
    fn rayleigh_preconditions_and_determinism() {
        let mut rng = make_rng(1, 0);
        assert!(sample_flat_rayleigh(1, 0.0, &mut rng).is_err());
        assert!(sample_flat_rayleigh(0, 1.0, &mut rng).is_err());
        let a = sample_flat_rayleigh(3, 1.0, &mut make_rng(5, 2)).unwrap();
        let b = sample_flat_rayleigh(3, 1.0, &mut make_rng(5, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn composite_examples() {
        let h =
            composite_backscatter_channel(c(1.0, 0.0), &[c(1.0, 0.0), c(1.0, 0.0)], 1.0).unwrap();
        assert_eq!(h, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let h = composite_backscatter_channel(c(0.3, 0.0), &[c(1.0, 0.0)], 0.5).unwrap();
        assert!((h[0] - c(0.15, 0.0)).norm() < 1e-15);
        assert!(composite_backscatter_channel(c(1.0, 0.0), &[c(1.0, 0.0)], -0.1).is_err());
    }

    #[test]
    fn composite_double_fading_identity() {
        let mut rng = make_rng(2, 0);
        for _ in 0..100 {
            let l = complex_normal(&mut rng, 1.0);
            let g = sample_flat_rayleigh(4, 1.0, &mut rng).unwrap();
            let alpha = 0.37;
            let h2 = composite_backscatter_channel(l, &g, alpha).unwrap();
            let ratio = norm_sqr(&h2) / (norm_sqr(&g) * l.norm_sqr());
            assert!((ratio - alpha * alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesize_examples() {
        let mut rng = make_rng(0, 0);
        let b = synthesize_block(
            &[c(1.0, 0.0)],
            &[c(0.5, 0.0)],
            1.0,
            &[c(1.0, 0.0)],
            c(-1.0, 0.0),
            0.0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(b.samples, vec![vec![c(0.5, 0.0)]]);

        let b = synthesize_block(
            &[c(1.0, 0.0), c(0.0, 1.0)],
            &[c(0.0, 0.0), c(0.0, 0.0)],
            4.0,
            &[c(-1.0, 0.0)],
            c(1.0, 0.0),
            0.0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(b.samples, vec![vec![c(-2.0, 0.0), c(0.0, -2.0)]]);

        let b = synthesize_block(
            &[c(1.0, 0.0)],
            &[c(0.5, 0.0)],
            1.0,
            &[c(1.0, 0.0), c(-1.0, 0.0)],
            c(1.0, 0.0),
            0.0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(b.samples, vec![vec![c(1.5, 0.0)], vec![c(-1.5, 0.0)]]);
        assert_eq!(b.k(), 2);
    }

    #[test]
    fn noiseless_superposition() {
        let mut rng = make_rng(4, 0);
        let h1 = sample_flat_rayleigh(3, 1.0, &mut rng).unwrap();
        let h2 = sample_flat_rayleigh(3, 0.1, &mut rng).unwrap();
        let zero = vec![C64::new(0.0, 0.0); 3];
        let s = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let cc = c(0.6, -0.8);
        let full = synthesize_block(&h1, &h2, 2.0, &s, cc, 0.0, &mut rng).unwrap();
        let a = synthesize_block(&h1, &zero, 2.0, &s, cc, 0.0, &mut rng).unwrap();
        let b = synthesize_block(&zero, &h2, 2.0, &s, cc, 0.0, &mut rng).unwrap();
        for k in 0..3 {
            for m in 0..3 {
                assert!((full.samples[k][m] - a.samples[k][m] - b.samples[k][m]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn noise_power_matches_sigma2() {
        let mut rng = make_rng(9, 0);
        let zero = vec![C64::new(0.0, 0.0); 2];
        let s = vec![c(1.0, 0.0); 10];
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..5_000 {
            let b = synthesize_block(&zero, &zero, 1.0, &s, c(1.0, 0.0), 0.3, &mut rng).unwrap();
            for y in &b.samples {
                for v in y {
                    acc += v.norm_sqr();
                    count += 1;
                }
            }
        }
        let est = acc / count as f64;
        assert!((est / 0.3 - 1.0).abs() < 0.02, "noise power {est}");
    }
}
