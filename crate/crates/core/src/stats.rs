//! Small statistics helpers for Monte Carlo estimates.

use statrs::function::erf::erfc;

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Bit error probability of coherent antipodal signalling with received
/// energy `energy` per decision and complex noise variance `sigma2`.
pub fn coherent_bpsk_ber(energy: f64, sigma2: f64) -> f64 {
    q_function((2.0 * energy / sigma2).sqrt())
}

/// Error counts with a binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCount {
    pub errors: u64,
    pub trials: u64,
}

impl ErrorCount {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.errors as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let r = self.rate();
        (r * (1.0 - r) / self.trials as f64).sqrt()
    }

    pub fn merge(self, other: ErrorCount) -> ErrorCount {
        ErrorCount {
            errors: self.errors + other.errors,
            trials: self.trials + other.trials,
        }
    }
}

/// `a ≤ b` up to `z` standard errors of the difference.
pub fn not_worse(a: ErrorCount, b: ErrorCount, z: f64) -> bool {
    let sd = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
    a.rate() <= b.rate() + z * sd
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl MeanEstimate {
    /// Summarizes `values` in order, so the result does not depend on how
    /// they were produced.
    pub fn from_samples(values: &[f64]) -> MeanEstimate {
        let n = values.len();
        if n == 0 {
            return MeanEstimate {
                mean: 0.0,
                stderr: 0.0,
                trials: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            stderr: (var / n as f64).sqrt(),
            trials: n as u64,
        }
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// First `x` where a decreasing curve crosses `target`, interpolating
/// `log10(y)` linearly between grid points.
pub fn log_crossing(x: &[f64], y: &[f64], target: f64) -> Option<f64> {
    for i in 1..x.len() {
        let (y0, y1) = (y[i - 1], y[i]);
        if y0 >= target && y1 <= target {
            if y1 <= 0.0 || y0 == y1 {
                return Some(x[i]);
            }
            let (l0, l1, lt) = (y0.log10(), y1.log10(), target.log10());
            return Some(x[i - 1] + (lt - l0) / (l1 - l0) * (x[i] - x[i - 1]));
        }
    }
    None
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
