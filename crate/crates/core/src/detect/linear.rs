use serde::{Deserialize, Serialize};

use crate::channel::ReceivedBlock;
use crate::types::{inner, norm_sqr, Constellation};
use crate::{Error, Result, C64};

use super::ml::check_dims;
use super::DetectionResult;

/// Gram matrices above this condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearVariant {
    Mrc,
    Zf,
    Mmse,
}

/// How the secondary decision aggregates the per-symbol estimates
/// `x̄_2k / ŝ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CDecisionRule {
    /// `Σ_k |c − x̄_2k/ŝ_k|`.
    #[default]
    SumModulus,
    /// `Σ_k |c − x̄_2k/ŝ_k|²`.
    SumSquared,
}

/// `H = [h1, h2]`, the two-stream view of a received vector:
/// `y_k = √p·H·[s_k, s_k c]ᵀ + u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedModel {
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
}

impl StackedModel {
    pub fn new(h1: &[C64], h2: &[C64]) -> Self {
        StackedModel {
            h1: h1.to_vec(),
            h2: h2.to_vec(),
        }
    }

    /// `HᴴH`.
    pub fn gram(&self) -> [[C64; 2]; 2] {
        let a = norm_sqr(&self.h1);
        let d = norm_sqr(&self.h2);
        let b = inner(&self.h1, &self.h2);
        [[C64::new(a, 0.0), b], [b.conj(), C64::new(d, 0.0)]]
    }

    /// Condition number of `HᴴH` (infinite when rank deficient).
    pub fn condition(&self) -> f64 {
        let g = self.gram();
        hermitian_condition(g[0][0].re, g[1][1].re, g[0][1])
    }
}

fn hermitian_condition(a: f64, d: f64, b: C64) -> f64 {
    let tr = a + d;
    let det = a * d - b.norm_sqr();
    let disc = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
    let hi = 0.5 * (tr + disc);
    // small eigenvalue from det/hi is accurate when tr ± disc cancels
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// The 2×M_r matrix `T_k` mapping a received vector to stream estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Combiner {
    pub rows: [Vec<C64>; 2],
}

impl Combiner {
    pub fn apply(&self, y: &[C64]) -> [C64; 2] {
        [
            self.rows[0].iter().zip(y).map(|(t, v)| t * v).sum(),
            self.rows[1].iter().zip(y).map(|(t, v)| t * v).sum(),
        ]
    }
}

/// Builds `T_k`: MRC rows `h_iᴴ/‖h_i‖²`, ZF `(HᴴH)⁻¹Hᴴ`, MMSE
/// `(HᴴH + (σ²/p)I)⁻¹Hᴴ`.
pub fn combiner(
    h1: &[C64],
    h2: &[C64],
    p: f64,
    sigma2: f64,
    variant: LinearVariant,
) -> Result<Combiner> {
    let model = StackedModel::new(h1, h2);
    match variant {
        LinearVariant::Mrc => {
            let n1 = norm_sqr(h1);
            let n2 = norm_sqr(h2);
            if n1 == 0.0 || n2 == 0.0 {
                return Err(Error::SingularModel {
                    condition: f64::INFINITY,
                });
            }
            Ok(Combiner {
                rows: [
                    h1.iter().map(|h| h.conj() / n1).collect(),
                    h2.iter().map(|h| h.conj() / n2).collect(),
                ],
            })
        }
        LinearVariant::Zf | LinearVariant::Mmse => {
            let g = model.gram();
            let reg = if variant == LinearVariant::Mmse {
                sigma2 / p
            } else {
                0.0
            };
            let a = g[0][0] + reg;
            let b = g[0][1];
            let c = g[1][0];
            let d = g[1][1] + reg;
            if variant == LinearVariant::Zf {
                let cond = model.condition();
                if cond > MAX_CONDITION {
                    return Err(Error::SingularModel { condition: cond });
                }
            }
            let det = a * d - b * c;
            if det.norm() == 0.0 {
                return Err(Error::SingularModel {
                    condition: f64::INFINITY,
                });
            }
            let inv = [[d / det, -b / det], [-c / det, a / det]];
            let row = |r: usize| -> Vec<C64> {
                h1.iter()
                    .zip(h2)
                    .map(|(x, y)| inv[r][0] * x.conj() + inv[r][1] * y.conj())
                    .collect()
            };
            Ok(Combiner {
                rows: [row(0), row(1)],
            })
        }
    }
}

/// Linear detection: separate the two streams with `T_k`, slice `s_k`, then
/// pick `c` from the ratios `x̄_2k / ŝ_k`.
///
/// The combiner output is divided by `√p` so that it estimates the unit
/// energy symbols themselves.
#[allow(clippy::too_many_arguments)]
pub fn detect_linear(
    block: &ReceivedBlock,
    h1: &[C64],
    h2: &[C64],
    p: f64,
    sigma2: f64,
    variant: LinearVariant,
    a_s: &Constellation,
    a_c: &Constellation,
    rule: CDecisionRule,
) -> Result<DetectionResult> {
    check_dims(block, h1, h2)?;
    let t = combiner(h1, h2, p, sigma2, variant)?;
    let scale = 1.0 / p.sqrt();
    let mut s_idx = Vec::with_capacity(block.k());
    let mut ratios = Vec::with_capacity(block.k());
    for y in &block.samples {
        let [x1, x2] = t.apply(y);
        let si = a_s.nearest(x1 * scale);
        let s = a_s.point(si);
        if s.norm_sqr() == 0.0 {
            return Err(Error::invalid("a_s", "zero primary symbol cannot divide"));
        }
        s_idx.push(si);
        ratios.push(x2 * scale / s);
    }
    let (c_idx, metric) = decide_secondary(&ratios, a_c, rule);
    Ok(DetectionResult::from_indices(
        s_idx, c_idx, a_s, a_c, metric,
    ))
}

fn decide_secondary(ratios: &[C64], a_c: &Constellation, rule: CDecisionRule) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (ci, &c) in a_c.points().iter().enumerate() {
        let cost: f64 = ratios
            .iter()
            .map(|r| match rule {
                CDecisionRule::SumModulus => (c - r).norm(),
                CDecisionRule::SumSquared => (c - r).norm_sqr(),
            })
            .sum();
        if cost < best.1 {
            best = (ci, cost);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_flat_rayleigh, synthesize_block};
    use crate::modem::build_constellation;
    use crate::rng::make_rng;
    use crate::types::Scheme;

    #[test]
    fn zf_noiseless_exact() {
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let mut rng = make_rng(21, 0);
        for _ in 0..50 {
            let h1 = sample_flat_rayleigh(2, 1.0, &mut rng).unwrap();
            let h2 = sample_flat_rayleigh(2, 0.5, &mut rng).unwrap();
            let s: Vec<C64> = (0..3).map(|k| qpsk.point(k)).collect();
            let b = synthesize_block(&h1, &h2, 3.0, &s, bpsk.point(1), 0.0, &mut rng).unwrap();
            let r = detect_linear(
                &b,
                &h1,
                &h2,
                3.0,
                1.0,
                LinearVariant::Zf,
                &qpsk,
                &bpsk,
                CDecisionRule::SumModulus,
            )
            .unwrap();
            assert_eq!(r.s_hat, s);
            assert_eq!(r.c_idx, 1);
            // ZF inverts the mixing exactly
            let t = combiner(&h1, &h2, 3.0, 1.0, LinearVariant::Zf).unwrap();
            let x = t.apply(&b.samples[0]);
            assert!((x[0] / 3f64.sqrt() - s[0]).norm() < 1e-10);
            assert!((x[1] / 3f64.sqrt() - s[0] * bpsk.point(1)).norm() < 1e-10);
        }
    }

    #[test]
    fn mmse_approaches_zf() {
        let mut rng = make_rng(22, 0);
        let h1 = sample_flat_rayleigh(3, 1.0, &mut rng).unwrap();
        let h2 = sample_flat_rayleigh(3, 1.0, &mut rng).unwrap();
        let zf = combiner(&h1, &h2, 1.0, 1.0, LinearVariant::Zf).unwrap();
        let mmse = combiner(&h1, &h2, 1.0, 1e-12, LinearVariant::Mmse).unwrap();
        for r in 0..2 {
            let num: f64 = zf.rows[r]
                .iter()
                .zip(&mmse.rows[r])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            let den: f64 = zf.rows[r].iter().map(|a| a.norm_sqr()).sum();
            assert!((num / den).sqrt() < 1e-6);
        }
    }

    #[test]
    fn mrc_rows_are_normalized_matched_filters() {
        let mut rng = make_rng(23, 0);
        for _ in 0..20 {
            let h1 = sample_flat_rayleigh(4, 1.0, &mut rng).unwrap();
            let h2 = sample_flat_rayleigh(4, 1.0, &mut rng).unwrap();
            let t = combiner(&h1, &h2, 1.0, 1.0, LinearVariant::Mrc).unwrap();
            let one: C64 = t.rows[0].iter().zip(&h1).map(|(a, b)| a * b).sum();
            assert!((one - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zf_singular_for_single_antenna_or_parallel_columns() {
        let h1 = vec![C64::new(1.0, 0.0)];
        let h2 = vec![C64::new(0.5, 0.0)];
        assert!(matches!(
            combiner(&h1, &h2, 1.0, 1.0, LinearVariant::Zf),
            Err(Error::SingularModel { .. })
        ));
        let h1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let h2: Vec<C64> = h1.iter().map(|h| h * C64::new(0.0, 2.0)).collect();
        assert!(matches!(
            combiner(&h1, &h2, 1.0, 1.0, LinearVariant::Zf),
            Err(Error::SingularModel { .. })
        ));
        // MMSE stays well defined
        assert!(combiner(&h1, &h2, 1.0, 1.0, LinearVariant::Mmse).is_ok());
    }

    #[test]
    fn sum_modulus_and_squared_can_disagree() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        // two clean votes for +1 against one far outlier
        let ratios = [C64::new(0.9, 0.0), C64::new(0.9, 0.0), C64::new(-5.0, 0.0)];
        assert_eq!(
            decide_secondary(&ratios, &bpsk, CDecisionRule::SumModulus).0,
            0
        );
        assert_eq!(
            decide_secondary(&ratios, &bpsk, CDecisionRule::SumSquared).0,
            1
        );
    }
}
