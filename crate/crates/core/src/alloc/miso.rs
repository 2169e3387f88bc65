use crate::types::{inner, norm_sqr, Constellation};
use crate::{Error, Result, C64};

use super::{linspace, ConstraintKind, ConstraintSet, ConstraintSlack};

#[derive(Debug, Clone)]
pub struct BeamformingSettings {
    pub sigma2: f64,
    /// Number of mixing weights `β` tried in `[0, 1]`.
    pub beta_grid: usize,
    pub a_s: Constellation,
    pub a_c: Constellation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingSolution {
    pub v: Vec<C64>,
    /// `‖v‖²`.
    pub power: f64,
    pub beta: f64,
    pub primary_rate: f64,
    pub secondary_rate: f64,
    pub slacks: Vec<ConstraintSlack>,
}

/// Gains of a unit-norm beam on the two effective channels.
#[derive(Debug, Clone, Copy)]
struct Beam {
    direct_gain: f64,
    comp_gain: f64,
}

impl Beam {
    /// Primary rate with the backscatter path treated as interference.
    fn primary_rate(&self, q: f64, s: &BeamformingSettings) -> f64 {
        (1.0 + q * self.direct_gain / (q * self.comp_gain * s.a_c.mean_energy() + s.sigma2)).log2()
    }

    fn secondary_rate(&self, q: f64, s: &BeamformingSettings) -> f64 {
        s.a_s
            .points()
            .iter()
            .map(|x| (1.0 + q * self.comp_gain * x.norm_sqr() / s.sigma2).log2())
            .sum::<f64>()
            / s.a_s.len() as f64
    }

    fn min_power_primary(&self, target: f64, s: &BeamformingSettings) -> f64 {
        let t = target.exp2() - 1.0;
        if t <= 0.0 {
            return 0.0;
        }
        let margin = self.direct_gain - t * self.comp_gain * s.a_c.mean_energy();
        if margin <= 0.0 {
            f64::INFINITY
        } else {
            t * s.sigma2 / margin
        }
    }

    fn min_power_secondary(&self, target: f64, cap: f64, s: &BeamformingSettings) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        if self.comp_gain <= 0.0 {
            return f64::INFINITY;
        }
        let mut hi = if cap.is_finite() { cap } else { 1.0 };
        while self.secondary_rate(hi, s) < target {
            if cap.is_finite() || hi > 1e15 {
                return f64::INFINITY;
            }
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.secondary_rate(mid, s) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    }
}

fn unit(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm_sqr(v).sqrt();
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

/// Unit beam `normalize(β·u_dir + (1 − β)·u_comp)` between the matched
/// directions of the direct and composite channels.
pub(crate) fn mixed_direction(h_direct: &[C64], h_comp: &[C64], beta: f64) -> Option<Vec<C64>> {
    let ud = unit(h_direct);
    let uc = unit(h_comp);
    match (ud, uc) {
        (Some(d), Some(c)) => {
            let mix: Vec<C64> = d
                .iter()
                .zip(&c)
                .map(|(a, b)| a * beta + b * (1.0 - beta))
                .collect();
            unit(&mix)
        }
        (Some(d), None) => Some(d),
        (None, Some(c)) => Some(c),
        (None, None) => None,
    }
}

/// Minimizes `‖v‖²` subject to the primary/secondary rate floors and the
/// beamforming budget.
///
/// The beam is restricted to the family [`mixed_direction`]; for each `β` on
/// the grid the smallest power meeting both rates is found exactly
/// (closed form for the primary rate, bisection for the secondary).
pub fn beamform_power_min(
    h_direct: &[C64],
    h_comp: &[C64],
    constraints: &ConstraintSet,
    settings: &BeamformingSettings,
) -> Result<BeamformingSolution> {
    constraints.validate()?;
    if h_direct.len() != h_comp.len() || h_direct.is_empty() {
        return Err(Error::invalid(
            "h_direct/h_comp",
            "need equal, nonzero antenna counts",
        ));
    }
    if settings.beta_grid < 2 {
        return Err(Error::invalid("beta_grid", "need at least 2 points"));
    }
    let cap = constraints.power_budget.unwrap_or(f64::INFINITY);
    let rs_min = constraints.min_primary_rate.unwrap_or(0.0);
    let rc_min = constraints.min_secondary_rate.unwrap_or(0.0);

    let mut best: Option<(f64, f64, Vec<C64>, Beam)> = None;
    let (mut primary_possible, mut secondary_possible) = (false, false);
    for beta in linspace(1.0, settings.beta_grid) {
        let Some(w) = mixed_direction(h_direct, h_comp, beta) else {
            continue;
        };
        let beam = Beam {
            direct_gain: inner(h_direct, &w).norm_sqr(),
            comp_gain: inner(h_comp, &w).norm_sqr(),
        };
        let qs = beam.min_power_primary(rs_min, settings);
        let qc = beam.min_power_secondary(rc_min, cap, settings);
        primary_possible |= qs <= cap;
        secondary_possible |= qc <= cap;
        let q = qs.max(qc);
        if q <= cap && best.as_ref().is_none_or(|(bq, ..)| q < *bq) {
            best = Some((q, beta, w, beam));
        }
    }

    let Some((q, beta, w, beam)) = best else {
        let binding = match (primary_possible, secondary_possible) {
            (false, false) => "primary and secondary rate constraints each exceed the power budget",
            (false, true) => "primary rate constraint exceeds the power budget",
            (true, false) => "secondary rate constraint exceeds the power budget",
            (true, true) => {
                "primary and secondary rate constraints cannot hold together within the budget"
            }
        };
        return Err(Error::Infeasible {
            binding: binding.into(),
        });
    };

    let amp = q.sqrt();
    let v: Vec<C64> = w.iter().map(|x| x * amp).collect();
    let rs = beam.primary_rate(q, settings);
    let rc = beam.secondary_rate(q, settings);
    let mut slacks = vec![
        ConstraintSlack::new(ConstraintKind::PrimaryRate, rs - rs_min),
        ConstraintSlack::new(ConstraintKind::SecondaryRate, rc - rc_min),
    ];
    if cap.is_finite() {
        slacks.push(ConstraintSlack::new(
            ConstraintKind::PowerBudget,
            cap - norm_sqr(&v),
        ));
    }
    Ok(BeamformingSolution {
        power: norm_sqr(&v),
        v,
        beta,
        primary_rate: rs,
        secondary_rate: rc,
        slacks,
    })
}
