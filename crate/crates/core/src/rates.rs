//! Achievable rates of the primary and secondary links.
//!
//! Expectations over symbol alphabets are exact averages under a uniform
//! prior; only fading is averaged by Monte Carlo ([`ergodic_rate`]).

use rayon::prelude::*;

use crate::rng::{trial_rng, SimRng};
use crate::stats::MeanEstimate;
use crate::types::{norm_sqr, Constellation};
use crate::{Error, Result, C64};

/// Bounds on the primary rate when the backscatter path is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryBounds {
    /// Backscatter path used as extra multipath, averaged over `c`.
    pub upper: f64,
    /// Backscatter path treated as Gaussian interference.
    pub lower: f64,
}

/// Rates of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub primary_upper: f64,
    pub primary_lower: f64,
    pub secondary: f64,
    pub p: f64,
    pub sigma2: f64,
    pub k: usize,
    pub m_r: usize,
}

/// Primary-rate bounds for PRx channels `f1` (direct) and `f2` (backscatter).
///
/// Upper: `E_c[log2(1 + p‖f1 + c·f2‖²/σ²)]`. Lower:
/// `log2(1 + p‖f1‖²/(p·E|c|²·‖f2‖² + σ²))`, with `E|c|² = 1` for PSK.
pub fn primary_rate_bounds(
    f1: &[C64],
    f2: &[C64],
    p: f64,
    sigma2: f64,
    a_c: &Constellation,
) -> PrimaryBounds {
    let upper = a_c
        .points()
        .iter()
        .map(|&c| {
            let g: f64 = f1.iter().zip(f2).map(|(a, b)| (a + b * c).norm_sqr()).sum();
            (1.0 + p * g / sigma2).log2()
        })
        .sum::<f64>()
        / a_c.len() as f64;
    let lower = (1.0 + p * norm_sqr(f1) / (p * a_c.mean_energy() * norm_sqr(f2) + sigma2)).log2();
    PrimaryBounds { upper, lower }
}

/// Secondary rate after the direct-link signal is removed.
///
/// `K = 1`: `E_s[log2(1 + p‖h2·s‖²/σ²)]`. `K > 1`: the spread-spectrum form
/// `(1/K)·log2(1 + K·p‖h2‖²/σ²)`.
pub fn secondary_rate(
    h2: &[C64],
    p: f64,
    sigma2: f64,
    k: usize,
    a_s: &Constellation,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    let g = norm_sqr(h2);
    if k == 1 {
        Ok(a_s
            .points()
            .iter()
            .map(|s| (1.0 + p * g * s.norm_sqr() / sigma2).log2())
            .sum::<f64>()
            / a_s.len() as f64)
    } else {
        let kf = k as f64;
        Ok((1.0 + kf * p * g / sigma2).log2() / kf)
    }
}

/// Every rate for one realization at the given reflection efficiency.
pub fn rate_report(
    state: &crate::types::ChannelState,
    p: f64,
    sigma2: f64,
    k: usize,
    a_s: &Constellation,
    a_c: &Constellation,
) -> Result<RateReport> {
    let b = primary_rate_bounds(&state.direct, &state.composite, p, sigma2, a_c);
    Ok(RateReport {
        primary_upper: b.upper,
        primary_lower: b.lower,
        secondary: secondary_rate(&state.composite, p, sigma2, k, a_s)?,
        p,
        sigma2,
        k,
        m_r: state.m_r(),
    })
}

/// Minimum Monte Carlo size for an ergodic estimate.
pub const MIN_ERGODIC_TRIALS: usize = 100;

/// Mean of `rate_fn` over `trials` channel draws.
///
/// Draw `i` uses stream `i` of `seed`, so the estimate is the same for any
/// thread count.
pub fn ergodic_rate<T, S, F>(
    sampler: S,
    rate_fn: F,
    trials: usize,
    seed: u64,
) -> Result<MeanEstimate>
where
    S: Fn(&mut SimRng) -> T + Sync,
    F: Fn(&T) -> f64 + Sync,
{
    if trials < MIN_ERGODIC_TRIALS {
        return Err(Error::invalid(
            "trials",
            format!("{trials} < {MIN_ERGODIC_TRIALS}"),
        ));
    }
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, 0, i);
            rate_fn(&sampler(&mut rng))
        })
        .collect();
    Ok(MeanEstimate::from_samples(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_flat_rayleigh;
    use crate::modem::build_constellation;
    use crate::types::Scheme;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bounds_collapse_without_backscatter() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let f1 = [c(0.7), C64::new(0.1, 0.4)];
        let f2 = [c(0.0), c(0.0)];
        let b = primary_rate_bounds(&f1, &f2, 3.0, 0.5, &bpsk);
        let expected = (1.0 + 3.0 * norm_sqr(&f1) / 0.5).log2();
        assert!((b.upper - expected).abs() < 1e-12);
        assert!((b.lower - expected).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_two_term_average() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let b = primary_rate_bounds(&[c(1.0)], &[c(0.5)], 1.0, 1.0, &bpsk);
        let expected = 0.5 * (3.25f64.log2() + 1.25f64.log2());
        assert!((b.upper - expected).abs() < 1e-12);
        assert!((b.upper - 1.011).abs() < 1e-3);
    }

    #[test]
    fn upper_dominates_lower() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let qam = build_constellation(Scheme::Mqam(16)).unwrap();
        let mut rng = crate::rng::make_rng(41, 0);
        for i in 0..10_000 {
            let f1 = sample_flat_rayleigh(2, 1.0, &mut rng).unwrap();
            let f2 = sample_flat_rayleigh(2, 0.5, &mut rng).unwrap();
            let a_c = if i % 2 == 0 { &bpsk } else { &qam };
            let b = primary_rate_bounds(&f1, &f2, 10.0, 1.0, a_c);
            assert!(b.upper >= b.lower - 1e-12, "{b:?}");
        }
    }

    #[test]
    fn secondary_rate_examples() {
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        let h2 = [C64::new(0.3, -0.2), c(0.5)];
        let r = secondary_rate(&h2, 2.0, 0.5, 1, &qpsk).unwrap();
        assert!((r - (1.0 + 2.0 * norm_sqr(&h2) / 0.5).log2()).abs() < 1e-12);

        // p‖h2‖²/σ² = 1.5
        let r = secondary_rate(&[c(1.5f64.sqrt())], 1.0, 1.0, 2, &qpsk).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(secondary_rate(&h2, 1.0, 1.0, 0, &qpsk).is_err());
    }

    #[test]
    fn large_k_rate_decreasing_in_k() {
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        for snr in [1.0, 2.0, 10.0, 1000.0] {
            let h2 = [c(snr_f(snr))];
            let mut prev = f64::INFINITY;
            for k in 2..=64 {
                let r = secondary_rate(&h2, 1.0, 1.0, k, &qpsk).unwrap();
                assert!(r < prev, "snr {snr} k {k}");
                prev = r;
            }
        }
    }

    fn snr_f(snr: f64) -> f64 {
        snr.sqrt()
    }

    #[test]
    fn constant_channel_ergodic() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let est = ergodic_rate(
            |_| vec![c(0.8)],
            |h| secondary_rate(h, 4.0, 1.0, 1, &bpsk).unwrap(),
            200,
            1,
        )
        .unwrap();
        let direct = secondary_rate(&[c(0.8)], 4.0, 1.0, 1, &bpsk).unwrap();
        assert!((est.mean - direct).abs() < 1e-12);
        assert!(est.stderr < 1e-12);
        assert!(ergodic_rate(|_| 0.0, |x: &f64| *x, 99, 1).is_err());
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let run = |n, seed| {
            ergodic_rate(
                |rng| sample_flat_rayleigh(1, 1.0, rng).unwrap(),
                |h| secondary_rate(h, 10.0, 1.0, 1, &bpsk).unwrap(),
                n,
                seed,
            )
            .unwrap()
            .stderr
        };
        let ratio = run(40_000, 3) / run(20_000, 3);
        assert!(
            (ratio * std::f64::consts::SQRT_2 - 1.0).abs() < 0.2,
            "ratio {ratio}"
        );
    }

    #[test]
    fn ergodic_capacity_slope_per_decade() {
        let bpsk = build_constellation(Scheme::Bpsk).unwrap();
        let zero = [c(0.0)];
        let mean_at = |snr_db: f64| {
            let p = 10f64.powf(snr_db / 10.0);
            ergodic_rate(
                |rng| sample_flat_rayleigh(1, 1.0, rng).unwrap(),
                |f1| primary_rate_bounds(f1, &zero, p, 1.0, &bpsk).upper,
                50_000,
                8,
            )
            .unwrap()
            .mean
        };
        let slope = mean_at(40.0) - mean_at(30.0);
        assert!((slope - 10f64.log2()).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn rates_monotone_in_power_and_noise() {
        let qpsk = build_constellation(Scheme::Qpsk).unwrap();
        let mut rng = crate::rng::make_rng(43, 0);
        let f1 = sample_flat_rayleigh(2, 1.0, &mut rng).unwrap();
        let f2 = sample_flat_rayleigh(2, 0.2, &mut rng).unwrap();
        let mut prev = (0.0, 0.0, 0.0);
        for i in 1..50 {
            let p = i as f64 * 0.5;
            let b = primary_rate_bounds(&f1, &f2, p, 1.0, &qpsk);
            let s = secondary_rate(&f2, p, 1.0, 1, &qpsk).unwrap();
            assert!(b.upper >= prev.0 && b.lower >= prev.1 && s >= prev.2);
            prev = (b.upper, b.lower, s);
        }
        let mut prev = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for i in 1..50 {
            let sigma2 = i as f64 * 0.1;
            let b = primary_rate_bounds(&f1, &f2, 1.0, sigma2, &qpsk);
            let s = secondary_rate(&f2, 1.0, sigma2, 4, &qpsk).unwrap();
            assert!(b.upper <= prev.0 && b.lower <= prev.1 && s <= prev.2);
            prev = (b.upper, b.lower, s);
        }
    }
}
