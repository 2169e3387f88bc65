use serde::{Deserialize, Serialize};

use crate::rates::{primary_rate_bounds, secondary_rate};
use crate::types::{norm_sqr, ChannelState, Constellation};
use crate::{Error, Result};

use super::{linspace, ConstraintKind, ConstraintSet, ConstraintSlack};

/// Minimum grid points per axis.
pub const MIN_GRID: usize = 32;
/// Bisection stops once the average-power gap is below this fraction.
pub const AVG_POWER_GAP: f64 = 0.01;
pub const MAX_BISECTIONS: usize = 60;

/// Which primary-rate expression enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimaryBound {
    /// Backscatter path as extra multipath (nondecreasing in `α`).
    #[default]
    Upper,
    /// Backscatter path as interference.
    Lower,
}

#[derive(Debug, Clone)]
pub struct SisoSettings {
    pub sigma2: f64,
    /// Points per axis of the `(p, α)` grid.
    pub grid: usize,
    pub a_s: Constellation,
    pub a_c: Constellation,
    pub primary: PrimaryBound,
    /// Primary symbols per secondary symbol in the secondary rate.
    pub k: usize,
}

impl SisoSettings {
    pub fn new(sigma2: f64, grid: usize, a_s: Constellation, a_c: Constellation) -> Self {
        SisoSettings {
            sigma2,
            grid,
            a_s,
            a_c,
            primary: PrimaryBound::Upper,
            k: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoAllocation {
    pub powers: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Ergodic weighted sum rate.
    pub objective: f64,
    pub mean_power: f64,
    pub primary_rate: f64,
    pub secondary_rate: f64,
    /// Lagrange multiplier of the average-power constraint, when active.
    pub lambda: Option<f64>,
    pub slacks: Vec<ConstraintSlack>,
}

/// Weighted sum rate `w_s·R_s + w_c·R_c` of one state at `(p, α)`.
pub fn state_utility(
    state: &ChannelState,
    p: f64,
    alpha: f64,
    weights: (f64, f64),
    settings: &SisoSettings,
) -> (f64, f64, f64) {
    let f2 = state.composite_at(alpha);
    let bounds = primary_rate_bounds(&state.direct, &f2, p, settings.sigma2, &settings.a_c);
    let rs = match settings.primary {
        PrimaryBound::Upper => bounds.upper,
        PrimaryBound::Lower => bounds.lower,
    };
    let rc =
        secondary_rate(&f2, p, settings.sigma2, settings.k.max(1), &settings.a_s).expect("k >= 1");
    (weights.0 * rs + weights.1 * rc, rs, rc)
}

/// Per-state objective table over the `(p, α)` grid.
struct StateTable {
    /// `best[i] = (utility, alpha index)` maximized over `α` at power `i`.
    best: Vec<(f64, usize)>,
}

impl StateTable {
    fn build(
        state: &ChannelState,
        powers: &[f64],
        alphas: &[f64],
        w: (f64, f64),
        s: &SisoSettings,
    ) -> Self {
        let best = powers
            .iter()
            .map(|&p| {
                let mut b = (f64::NEG_INFINITY, 0);
                for (j, &a) in alphas.iter().enumerate() {
                    let u = state_utility(state, p, a, w, s).0;
                    if u > b.0 {
                        b = (u, j);
                    }
                }
                b
            })
            .collect();
        StateTable { best }
    }

    /// Power index maximizing `U − λ·p`; the lowest index wins ties.
    fn argmax(&self, powers: &[f64], lambda: f64) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, (u, _)) in self.best.iter().enumerate() {
            let v = u - lambda * powers[i];
            if v > best.0 {
                best = (v, i);
            }
        }
        best.1
    }
}

/// Maximizes the ergodic weighted sum rate over per-state `(p, α)`.
///
/// Under a peak constraint alone each state is solved independently on the
/// grid. With an average-power constraint, a Lagrange multiplier on `E[p]`
/// is bisected, each state solving its penalized problem on the grid, and
/// any budget left on the grid is then spent greedily one cell at a time.
pub fn allocate_siso(
    states: &[ChannelState],
    weights: (f64, f64),
    constraints: &ConstraintSet,
    settings: &SisoSettings,
) -> Result<SisoAllocation> {
    constraints.validate()?;
    if states.is_empty() {
        return Err(Error::invalid("states", "need at least one fading state"));
    }
    if !(weights.0 >= 0.0 && weights.1 >= 0.0) || weights.0 + weights.1 == 0.0 {
        return Err(Error::invalid(
            "weights",
            "must be nonnegative and not both zero",
        ));
    }
    if settings.grid < MIN_GRID {
        return Err(Error::invalid(
            "grid",
            format!("need at least {MIN_GRID} points per axis"),
        ));
    }
    if constraints.peak_power.is_none() && constraints.avg_power.is_none() {
        return Err(Error::invalid(
            "constraints",
            "SISO allocation needs a peak or average power limit",
        ));
    }
    for (i, st) in states.iter().enumerate() {
        if norm_sqr(&st.direct) == 0.0 && norm_sqr(&st.stx_out) * st.stx_in.norm_sqr() == 0.0 {
            log::warn!("fading state {i} has zero channels; it contributes no rate");
        }
    }

    let n = states.len();
    let p_max = match (constraints.peak_power, constraints.avg_power) {
        (Some(pk), _) => pk,
        (None, Some(av)) => av * n as f64,
        (None, None) => unreachable!(),
    };
    let powers = linspace(p_max, settings.grid);
    let alphas = linspace(1.0, settings.grid);
    let tables: Vec<StateTable> = states
        .iter()
        .map(|st| StateTable::build(st, &powers, &alphas, weights, settings))
        .collect();

    let pick =
        |lambda: f64| -> Vec<usize> { tables.iter().map(|t| t.argmax(&powers, lambda)).collect() };
    let mean_power = |idx: &[usize]| idx.iter().map(|&i| powers[i]).sum::<f64>() / n as f64;

    let mut lambda = None;
    let mut chosen = pick(0.0);
    if let Some(p_av) = constraints.avg_power {
        if mean_power(&chosen) > p_av {
            let mut hi = 1.0;
            while mean_power(&pick(hi)) > p_av {
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::Infeasible {
                        binding: "average power".into(),
                    });
                }
            }
            let mut lo = 0.0;
            for _ in 0..MAX_BISECTIONS {
                let hi_power = mean_power(&pick(hi));
                if (p_av - hi_power) / p_av < AVG_POWER_GAP {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mean_power(&pick(mid)) <= p_av {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            chosen = pick(hi);
            lambda = Some(hi);
            top_up(&mut chosen, &tables, &powers, p_av);
        }
    }

    let alpha_idx: Vec<usize> = chosen
        .iter()
        .zip(&tables)
        .map(|(&i, t)| t.best[i].1)
        .collect();
    let p_vec: Vec<f64> = chosen.iter().map(|&i| powers[i]).collect();
    let a_vec: Vec<f64> = alpha_idx.iter().map(|&j| alphas[j]).collect();
    let mut obj = 0.0;
    let mut rs = 0.0;
    let mut rc = 0.0;
    for ((st, &p), &a) in states.iter().zip(&p_vec).zip(&a_vec) {
        let (u, s, c) = state_utility(st, p, a, weights, settings);
        obj += u;
        rs += s;
        rc += c;
    }
    let nf = n as f64;
    let mean_p = p_vec.iter().sum::<f64>() / nf;

    let mut slacks = Vec::new();
    if let Some(pk) = constraints.peak_power {
        let max_p = p_vec.iter().cloned().fold(0.0, f64::max);
        slacks.push(ConstraintSlack::new(ConstraintKind::PeakPower, pk - max_p));
    }
    if let Some(av) = constraints.avg_power {
        slacks.push(ConstraintSlack::new(
            ConstraintKind::AveragePower,
            av - mean_p,
        ));
    }
    let alpha_margin = a_vec
        .iter()
        .map(|a| a.min(1.0 - a))
        .fold(f64::INFINITY, f64::min);
    slacks.push(ConstraintSlack::new(
        ConstraintKind::ReflectionEfficiency,
        alpha_margin,
    ));

    Ok(SisoAllocation {
        powers: p_vec,
        alphas: a_vec,
        objective: obj / nf,
        mean_power: mean_p,
        primary_rate: rs / nf,
        secondary_rate: rc / nf,
        lambda,
        slacks,
    })
}

/// Exhaustive search over every combination of per-state power cells.
///
/// Each state's reflection efficiency is still maximized per power cell, so
/// the cost is `grid^N` evaluations of a table lookup. Intended as an oracle
/// for small `N`.
pub fn brute_force_siso(
    states: &[ChannelState],
    weights: (f64, f64),
    constraints: &ConstraintSet,
    settings: &SisoSettings,
) -> Result<SisoAllocation> {
    constraints.validate()?;
    let n = states.len();
    if n == 0 || (settings.grid as f64).powi(n as i32) > 5e7 {
        return Err(Error::invalid(
            "states",
            "brute force needs 1..=N states with grid^N <= 5e7",
        ));
    }
    let p_max = match (constraints.peak_power, constraints.avg_power) {
        (Some(pk), _) => pk,
        (None, Some(av)) => av * n as f64,
        (None, None) => {
            return Err(Error::invalid(
                "constraints",
                "need a peak or average power limit",
            ))
        }
    };
    let powers = linspace(p_max, settings.grid);
    let alphas = linspace(1.0, settings.grid);
    let tables: Vec<StateTable> = states
        .iter()
        .map(|st| StateTable::build(st, &powers, &alphas, weights, settings))
        .collect();
    let budget = constraints
        .avg_power
        .map_or(f64::INFINITY, |av| av * n as f64 * (1.0 + 1e-12));

    let mut idx = vec![0usize; n];
    let mut best: (f64, Vec<usize>) = (f64::NEG_INFINITY, idx.clone());
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        depth: usize,
        used: f64,
        acc: f64,
        idx: &mut Vec<usize>,
        best: &mut (f64, Vec<usize>),
        tables: &[StateTable],
        powers: &[f64],
        budget: f64,
    ) {
        if depth == idx.len() {
            if acc > best.0 {
                *best = (acc, idx.clone());
            }
            return;
        }
        for (i, &p) in powers.iter().enumerate() {
            if used + p > budget {
                break;
            }
            idx[depth] = i;
            recurse(
                depth + 1,
                used + p,
                acc + tables[depth].best[i].0,
                idx,
                best,
                tables,
                powers,
                budget,
            );
        }
    }
    recurse(0, 0.0, 0.0, &mut idx, &mut best, &tables, &powers, budget);

    let p_vec: Vec<f64> = best.1.iter().map(|&i| powers[i]).collect();
    let a_vec: Vec<f64> = best
        .1
        .iter()
        .zip(&tables)
        .map(|(&i, t)| alphas[t.best[i].1])
        .collect();
    let (mut rs, mut rc) = (0.0, 0.0);
    for ((st, &p), &a) in states.iter().zip(&p_vec).zip(&a_vec) {
        let (_, s, c) = state_utility(st, p, a, weights, settings);
        rs += s;
        rc += c;
    }
    let nf = n as f64;
    Ok(SisoAllocation {
        mean_power: p_vec.iter().sum::<f64>() / nf,
        powers: p_vec,
        alphas: a_vec,
        objective: best.0 / nf,
        primary_rate: rs / nf,
        secondary_rate: rc / nf,
        lambda: None,
        slacks: Vec::new(),
    })
}

/// Largest objective change from moving every state's `(p, α)` by one cell
/// of a `grid`-point axis, evaluated around `alloc`. Used as the tolerance
/// when comparing grid solvers.
pub fn one_cell_tolerance(
    states: &[ChannelState],
    alloc: &SisoAllocation,
    weights: (f64, f64),
    p_max: f64,
    settings: &SisoSettings,
) -> f64 {
    let dp = p_max / (settings.grid - 1) as f64;
    let da = 1.0 / (settings.grid - 1) as f64;
    let total: f64 = states
        .iter()
        .zip(alloc.powers.iter().zip(&alloc.alphas))
        .map(|(st, (&p, &a))| {
            let u = |p: f64, a: f64| {
                state_utility(
                    st,
                    p.clamp(0.0, p_max),
                    a.clamp(0.0, 1.0),
                    weights,
                    settings,
                )
                .0
            };
            let base = u(p, a);
            [u(p + dp, a), u(p - dp, a), u(p, a + da), u(p, a - da)]
                .iter()
                .map(|v| (v - base).abs())
                .fold(0.0, f64::max)
        })
        .sum();
    total / states.len() as f64
}

/// Spends leftover average-power budget one grid cell at a time, always on
/// the state with the largest utility gain.
fn top_up(chosen: &mut [usize], tables: &[StateTable], powers: &[f64], p_av: f64) {
    let n = chosen.len() as f64;
    let step = powers[1] - powers[0];
    loop {
        let used: f64 = chosen.iter().map(|&i| powers[i]).sum::<f64>() / n;
        if used + step / n > p_av * (1.0 + 1e-12) {
            return;
        }
        let mut best: Option<(f64, usize)> = None;
        for (s, (&i, t)) in chosen.iter().zip(tables).enumerate() {
            if i + 1 < powers.len() {
                let gain = t.best[i + 1].0 - t.best[i].0;
                if gain > 0.0 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, s));
                }
            }
        }
        match best {
            Some((_, s)) => chosen[s] += 1,
            None => return,
        }
    }
}
