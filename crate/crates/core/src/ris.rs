//! RIS-assisted backscatter: an `M_b`-element reflecting surface acting as
//! the secondary transmitter.
//!
//! The surface output is `√p·(Σ_m g_m θ_m l_m)·s_k` (static) or the same
//! times a common secondary symbol `c` (modulated, `θ_m(t) = θ_m·c`), which
//! is the backscatter model with a scalar composite channel.

use rand::Rng;

use crate::channel::{BlockTruth, ReceivedBlock};
use crate::rng::complex_normal;
use crate::{Error, Result, C64};

const UNIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RisMode {
    #[default]
    Static,
    Modulated,
}

/// Per-element reflection coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RisState {
    pub theta: Vec<C64>,
    pub mode: RisMode,
    /// Only phases are adjustable: `|θ_m| = 1` and `|c| = 1`.
    pub constant_amplitude: bool,
}

impl RisState {
    pub fn new(theta: Vec<C64>, mode: RisMode, constant_amplitude: bool) -> Result<Self> {
        for t in &theta {
            let mag = t.norm();
            if mag > 1.0 + UNIT_SLACK {
                return Err(Error::PassivityViolation { magnitude: mag });
            }
            if constant_amplitude && (mag - 1.0).abs() > UNIT_SLACK {
                return Err(Error::invalid(
                    "theta",
                    format!("constant-amplitude surface needs |theta| = 1, got {mag}"),
                ));
            }
        }
        Ok(RisState {
            theta,
            mode,
            constant_amplitude,
        })
    }

    pub fn elements(&self) -> usize {
        self.theta.len()
    }

    pub fn modulated(mut self) -> Self {
        self.mode = RisMode::Modulated;
        self
    }
}

/// Phase alignment `θ_m = exp(−j(arg l_m + arg g_m))`, making every
/// `g_m θ_m l_m` real and positive.
///
/// An element with `l_m = 0` or `g_m = 0` has no phase to align; it is set
/// to `θ_m = 1` and reported with a warning.
pub fn passive_beamform(l: &[C64], g: &[C64]) -> Result<RisState> {
    if l.len() != g.len() || l.is_empty() {
        return Err(Error::invalid("l/g", "need equal, nonzero element counts"));
    }
    let theta = l
        .iter()
        .zip(g)
        .enumerate()
        .map(|(m, (lm, gm))| {
            if lm.norm_sqr() == 0.0 || gm.norm_sqr() == 0.0 {
                log::warn!("RIS element {m} has a zero channel; theta set to 1");
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, -(lm.arg() + gm.arg()))
            }
        })
        .collect();
    RisState::new(theta, RisMode::Static, true)
}

/// `Σ_m g_m θ_m l_m`.
pub fn cascaded_channel(l: &[C64], g: &[C64], state: &RisState) -> C64 {
    l.iter()
        .zip(g)
        .zip(&state.theta)
        .map(|((lm, gm), t)| gm * t * lm)
        .sum()
}

/// Received block at a single-antenna receiver behind the surface.
///
/// `c = None` transmits no secondary symbol; in modulated mode `c` is
/// required and `|θ_m·c| ≤ 1` must hold for every element.
#[allow(clippy::too_many_arguments)]
pub fn ris_received_signal<R: Rng + ?Sized>(
    l: &[C64],
    g: &[C64],
    state: &RisState,
    p: f64,
    s_seq: &[C64],
    c: Option<C64>,
    sigma2: f64,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    if l.len() != state.elements() || g.len() != state.elements() {
        return Err(Error::invalid(
            "l/g",
            "element counts must match the surface",
        ));
    }
    if s_seq.is_empty() {
        return Err(Error::invalid(
            "s_seq",
            "block needs K >= 1 primary symbols",
        ));
    }
    let sym = match (state.mode, c) {
        (RisMode::Static, _) => C64::new(1.0, 0.0),
        (RisMode::Modulated, None) => {
            return Err(Error::invalid(
                "c",
                "modulated surface needs a secondary symbol",
            ))
        }
        (RisMode::Modulated, Some(c)) => {
            let worst = state
                .theta
                .iter()
                .map(|t| (t * c).norm())
                .fold(0.0, f64::max);
            if worst > 1.0 + UNIT_SLACK {
                return Err(Error::PassivityViolation { magnitude: worst });
            }
            if state.constant_amplitude && (c.norm() - 1.0).abs() > UNIT_SLACK {
                return Err(Error::invalid(
                    "c",
                    "constant-amplitude surface only supports unit-modulus symbols",
                ));
            }
            c
        }
    };
    let gain = cascaded_channel(l, g, state) * p.sqrt() * sym;
    let samples = s_seq
        .iter()
        .map(|&s| {
            let clean = gain * s;
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
            c: sym,
        }),
    })
}

/// Received SNR `p·|Σ g_m θ_m l_m|²/σ²`.
pub fn ris_snr(l: &[C64], g: &[C64], state: &RisState, p: f64, sigma2: f64) -> f64 {
    p * cascaded_channel(l, g, state).norm_sqr() / sigma2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_flat_rayleigh, synthesize_block};
    use crate::rng::make_rng;
    use std::f64::consts::PI;

    fn ones(n: usize) -> Vec<C64> {
        vec![C64::new(1.0, 0.0); n]
    }

    #[test]
    fn aligned_channels_keep_unit_theta() {
        let st = passive_beamform(&ones(4), &ones(4)).unwrap();
        assert!(st
            .theta
            .iter()
            .all(|t| (t - C64::new(1.0, 0.0)).norm() < 1e-15));
        assert!((cascaded_channel(&ones(4), &ones(4), &st) - C64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_arithmetic() {
        let l = vec![C64::from_polar(1.0, PI / 3.0)];
        let g = vec![C64::from_polar(1.0, PI / 6.0)];
        let st = passive_beamform(&l, &g).unwrap();
        assert!((st.theta[0] - C64::from_polar(1.0, -PI / 2.0)).norm() < 1e-12);
        let prod = g[0] * st.theta[0] * l[0];
        assert!(prod.arg().abs() < 1e-12);
    }

    #[test]
    fn coherent_sum_of_unit_magnitudes() {
        let mut rng = make_rng(61, 0);
        for mb in [1, 3, 8, 33] {
            let l: Vec<C64> = (0..mb)
                .map(|_| C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI))
                .collect();
            let g: Vec<C64> = (0..mb)
                .map(|_| C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI))
                .collect();
            let st = passive_beamform(&l, &g).unwrap();
            let sum = cascaded_channel(&l, &g, &st);
            assert!((sum - C64::new(mb as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_element_falls_back_to_unit_theta() {
        let l = vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)];
        let g = ones(2);
        let st = passive_beamform(&l, &g).unwrap();
        assert_eq!(st.theta[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn received_signal_examples() {
        let mut rng = make_rng(62, 0);
        let st = passive_beamform(&ones(3), &ones(3)).unwrap();
        let one = [C64::new(1.0, 0.0)];
        let b =
            ris_received_signal(&ones(3), &ones(3), &st, 1.0, &one, None, 0.0, &mut rng).unwrap();
        assert!((b.samples[0][0] - C64::new(3.0, 0.0)).norm() < 1e-12);
        let m = st.clone().modulated();
        let b = ris_received_signal(
            &ones(3),
            &ones(3),
            &m,
            1.0,
            &one,
            Some(C64::new(-1.0, 0.0)),
            0.0,
            &mut rng,
        )
        .unwrap();
        assert!((b.samples[0][0] - C64::new(-3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn passivity_and_amplitude_checks() {
        let mut rng = make_rng(63, 0);
        let st = passive_beamform(&ones(2), &ones(2)).unwrap().modulated();
        let s = [C64::new(1.0, 0.0)];
        assert!(matches!(
            ris_received_signal(
                &ones(2),
                &ones(2),
                &st,
                1.0,
                &s,
                Some(C64::new(1.5, 0.0)),
                0.0,
                &mut rng
            ),
            Err(Error::PassivityViolation { .. })
        ));
        assert!(ris_received_signal(
            &ones(2),
            &ones(2),
            &st,
            1.0,
            &s,
            Some(C64::new(0.5, 0.0)),
            0.0,
            &mut rng
        )
        .is_err());
        let free = RisState::new(ones(2), RisMode::Modulated, false).unwrap();
        assert!(ris_received_signal(
            &ones(2),
            &ones(2),
            &free,
            1.0,
            &s,
            Some(C64::new(0.5, 0.0)),
            0.0,
            &mut rng
        )
        .is_ok());
        assert!(RisState::new(vec![C64::new(1.1, 0.0)], RisMode::Static, false).is_err());
    }

    #[test]
    fn static_output_matches_backscatter_model() {
        let mut rng = make_rng(64, 0);
        let l = sample_flat_rayleigh(6, 1.0, &mut rng).unwrap();
        let g = sample_flat_rayleigh(6, 1.0, &mut rng).unwrap();
        let st = passive_beamform(&l, &g).unwrap();
        let s = [C64::new(1.0, 0.0), C64::new(0.0, -1.0)];
        let a = ris_received_signal(&l, &g, &st, 2.0, &s, None, 0.0, &mut rng).unwrap();
        let comp = [cascaded_channel(&l, &g, &st)];
        let b = synthesize_block(
            &[C64::new(0.0, 0.0)],
            &comp,
            2.0,
            &s,
            C64::new(1.0, 0.0),
            0.0,
            &mut rng,
        )
        .unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x[0] - y[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn snr_examples() {
        for mb in [2usize, 4, 8, 16] {
            let st = passive_beamform(&ones(mb), &ones(mb)).unwrap();
            let snr = ris_snr(&ones(mb), &ones(mb), &st, 1.0, 1.0);
            assert!((snr - (mb * mb) as f64).abs() < 1e-9);
        }
        let zero = RisState::new(vec![C64::new(0.0, 0.0); 4], RisMode::Static, false).unwrap();
        assert_eq!(ris_snr(&ones(4), &ones(4), &zero, 1.0, 1.0), 0.0);
    }
}
