use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::alloc::{
    allocate_siso, beamform_power_min, brute_force_siso, one_cell_tolerance, BeamformingSettings,
    ConstraintSet, SisoSettings,
};
use crate::channel::synthesize_block;
use crate::fdsr::{
    cancel_and_detect, perfect_cancellation_ber, synthesize_fdsr_block, FdsrChannel,
};
use crate::modem::build_constellation;
use crate::rates::{primary_rate_bounds, secondary_rate};
use crate::ris::{passive_beamform, ris_snr};
use crate::rng::{complex_normal, make_rng, trial_rng, SimRng};
use crate::stats::{linear_fit, ErrorCount, MeanEstimate};
use crate::types::{inner, norm_sqr, ChannelState, Constellation};
use crate::{Error, Result, C64};

use super::config::{
    AllocationMode, ExperimentConfig, ExperimentKind, Fading, RisChannel, SystemSection,
};
use super::results::ResultRow;

/// Stream reserved for the channel held fixed across a run.
const FIXED_CHANNEL_STREAM: u64 = u64::MAX;

/// Runs the experiment and collects every row in sweep order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    run_experiment_with(cfg, |r| {
        rows.push(r);
        Ok(())
    })?;
    Ok(rows)
}

/// Runs the experiment, handing each row to `sink` as soon as its sweep point
/// finishes.
///
/// Trials within a point run on a pool of `cfg.threads` workers. Each trial
/// draws from its own stream keyed by `(seed, point, trial)` and results are
/// combined in trial order, so output does not depend on the thread count.
pub fn run_experiment_with<F>(cfg: &ExperimentConfig, sink: F) -> Result<()>
where
    F: FnMut(ResultRow) -> Result<()>,
{
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let mut run = Runner { cfg, pool, sink };
    match cfg.experiment {
        ExperimentKind::BerSweep => run.ber_sweep(),
        ExperimentKind::RateSweep => run.rate_sweep(),
        ExperimentKind::Allocation => match cfg.allocation.mode {
            AllocationMode::Siso => run.siso_allocation(),
            AllocationMode::Miso => run.miso_allocation(),
        },
        ExperimentKind::RisScaling => run.ris_scaling(),
        ExperimentKind::FdsrSweep => run.fdsr_sweep(),
    }
}

/// One channel realization under the configured fading model.
pub fn draw_state(
    sys: &SystemSection,
    m_r: usize,
    alpha: f64,
    rng: &mut SimRng,
) -> Result<ChannelState> {
    let profile = sys.profile();
    match sys.fading {
        Fading::Rayleigh | Fading::Fixed => ChannelState::rayleigh(m_r, &profile, alpha, rng),
        Fading::RayleighComposite => {
            let direct = (0..m_r).map(|_| complex_normal(rng, 1.0)).collect();
            let g = (0..m_r).map(|_| complex_normal(rng, 1.0)).collect();
            ChannelState::new(direct, C64::new(profile.stx_gain, 0.0), g, alpha)
        }
    }
}

fn random_symbols(a: &Constellation, n: usize, rng: &mut SimRng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..a.len())).collect()
}

/// Coherent per-symbol decision over `h1` alone.
fn mrc_primary(y: &[C64], h1: &[C64], p: f64, a_s: &Constellation) -> usize {
    let z = inner(h1, y) / (p.sqrt() * norm_sqr(h1));
    a_s.nearest(z)
}

#[derive(Clone)]
struct BerTally {
    s: Vec<ErrorCount>,
    c: Vec<ErrorCount>,
    baseline: ErrorCount,
}

impl BerTally {
    fn new(n: usize) -> Self {
        BerTally {
            s: vec![ErrorCount::default(); n],
            c: vec![ErrorCount::default(); n],
            baseline: ErrorCount::default(),
        }
    }

    fn merge(mut self, other: BerTally) -> BerTally {
        for (a, b) in self.s.iter_mut().zip(other.s) {
            *a = a.merge(b);
        }
        for (a, b) in self.c.iter_mut().zip(other.c) {
            *a = a.merge(b);
        }
        self.baseline = self.baseline.merge(other.baseline);
        self
    }
}

struct Runner<'a, F> {
    cfg: &'a ExperimentConfig,
    pool: ThreadPool,
    sink: F,
}

impl<F> Runner<'_, F>
where
    F: FnMut(ResultRow) -> Result<()>,
{
    fn emit(
        &mut self,
        detector: impl Into<String>,
        k: Option<usize>,
        m_r: Option<usize>,
        snr_db: Option<f64>,
        metric: &str,
        value: f64,
        stderr: f64,
        trials: u64,
    ) -> Result<()> {
        (self.sink)(ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            detector: detector.into(),
            k,
            m_r,
            snr_db,
            metric: metric.to_string(),
            value,
            stderr,
            trials,
            seed: self.cfg.seed,
        })
    }

    fn emit_count(
        &mut self,
        detector: &str,
        k: usize,
        m_r: usize,
        snr: f64,
        metric: &str,
        e: ErrorCount,
    ) -> Result<()> {
        self.emit(
            detector,
            Some(k),
            Some(m_r),
            Some(snr),
            metric,
            e.rate(),
            e.stderr(),
            e.trials,
        )
    }

    fn emit_mean(
        &mut self,
        detector: &str,
        k: Option<usize>,
        m_r: Option<usize>,
        snr: Option<f64>,
        metric: &str,
        e: MeanEstimate,
    ) -> Result<()> {
        self.emit(detector, k, m_r, snr, metric, e.mean, e.stderr, e.trials)
    }

    fn fixed_state(&self, m_r: usize, alpha: f64) -> Result<Option<ChannelState>> {
        let sys = &self.cfg.system;
        if sys.fading != Fading::Fixed {
            return Ok(None);
        }
        let mut rng = make_rng(self.cfg.seed, FIXED_CHANNEL_STREAM);
        draw_state(sys, m_r, alpha, &mut rng).map(Some)
    }

    fn ber_sweep(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let a_s = build_constellation(sys.primary)?;
        let a_c = build_constellation(sys.secondary)?;
        let detectors = &cfg.detectors;
        let compare = cfg.ber.compare_without_backscatter;
        let mut point = 0u64;
        for &k in &cfg.sweep.k {
            for &m_r in &cfg.sweep.m_r {
                let fixed = self.fixed_state(m_r, sys.alpha)?;
                for &snr in &cfg.sweep.snr_db {
                    point += 1;
                    let sigma2 = sys.sigma2_at(snr);
                    log::info!("ber_sweep K={k} M_r={m_r} snr={snr} dB");
                    let trial = |t: u64| -> Result<BerTally> {
                        let mut rng = trial_rng(cfg.seed, point, t);
                        let state = match &fixed {
                            Some(s) => s.clone(),
                            None => draw_state(sys, m_r, sys.alpha, &mut rng)?,
                        };
                        let s_idx = random_symbols(&a_s, k, &mut rng);
                        let c_idx = random_symbols(&a_c, 1, &mut rng)[0];
                        let s_seq: Vec<C64> = s_idx.iter().map(|&i| a_s.point(i)).collect();
                        let mut tally = BerTally::new(detectors.len());
                        if compare {
                            let mut noise = rng.clone();
                            let zero = vec![C64::new(0.0, 0.0); m_r];
                            let y = synthesize_block(
                                &state.direct,
                                &zero,
                                sys.p,
                                &s_seq,
                                C64::new(0.0, 0.0),
                                sigma2,
                                &mut noise,
                            )?;
                            let errors: u32 = y
                                .samples
                                .iter()
                                .zip(&s_idx)
                                .map(|(yk, &si)| {
                                    a_s.bit_errors(si, mrc_primary(yk, &state.direct, sys.p, &a_s))
                                })
                                .sum();
                            tally.baseline = ErrorCount {
                                errors: errors as u64,
                                trials: (k as u32 * a_s.bits_per_symbol()) as u64,
                            };
                        }
                        let block = synthesize_block(
                            &state.direct,
                            &state.composite,
                            sys.p,
                            &s_seq,
                            a_c.point(c_idx),
                            sigma2,
                            &mut rng,
                        )?;
                        for (d, det) in detectors.iter().enumerate() {
                            let r = det.detect(
                                &block,
                                &state.direct,
                                &state.composite,
                                sys.p,
                                sigma2,
                                &a_s,
                                &a_c,
                            )?;
                            let s_err: u32 = r
                                .s_idx
                                .iter()
                                .zip(&s_idx)
                                .map(|(&a, &b)| a_s.bit_errors(a, b))
                                .sum();
                            tally.s[d] = ErrorCount {
                                errors: s_err as u64,
                                trials: (k as u32 * a_s.bits_per_symbol()) as u64,
                            };
                            tally.c[d] = ErrorCount {
                                errors: a_c.bit_errors(r.c_idx, c_idx) as u64,
                                trials: a_c.bits_per_symbol() as u64,
                            };
                        }
                        Ok(tally)
                    };
                    let n = detectors.len();
                    let tally = self.pool.install(|| {
                        (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(trial)
                            .try_reduce(|| BerTally::new(n), |a, b| Ok(a.merge(b)))
                    })?;
                    for (d, det) in detectors.iter().enumerate() {
                        self.emit_count(det.name(), k, m_r, snr, "ber_s", tally.s[d])?;
                        self.emit_count(det.name(), k, m_r, snr, "ber_c", tally.c[d])?;
                    }
                    if compare {
                        self.emit_count("no_backscatter", k, m_r, snr, "ber_s", tally.baseline)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn rate_sweep(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let a_s = build_constellation(sys.primary)?;
        let a_c = build_constellation(sys.secondary)?;
        let alphas = if cfg.sweep.alpha.is_empty() {
            vec![sys.alpha]
        } else {
            cfg.sweep.alpha.clone()
        };
        let mut point = 0u64;
        for &k in &cfg.sweep.k {
            for &m_r in &cfg.sweep.m_r {
                let fixed = self.fixed_state(m_r, 1.0)?;
                let trials = if fixed.is_some() {
                    1
                } else {
                    cfg.trials as u64
                };
                for &snr in &cfg.sweep.snr_db {
                    point += 1;
                    let sigma2 = sys.sigma2_at(snr);
                    log::info!("rate_sweep K={k} M_r={m_r} snr={snr} dB");
                    // per trial, per alpha: [upper, lower, secondary]
                    let samples: Vec<Vec<[f64; 3]>> = self.pool.install(|| {
                        (0..trials)
                            .into_par_iter()
                            .map(|t| -> Result<Vec<[f64; 3]>> {
                                let state = match &fixed {
                                    Some(s) => s.clone(),
                                    None => draw_state(
                                        sys,
                                        m_r,
                                        1.0,
                                        &mut trial_rng(cfg.seed, point, t),
                                    )?,
                                };
                                alphas
                                    .iter()
                                    .map(|&a| {
                                        let f2 = state.composite_at(a);
                                        let b = primary_rate_bounds(
                                            &state.direct,
                                            &f2,
                                            sys.p,
                                            sigma2,
                                            &a_c,
                                        );
                                        Ok([
                                            b.upper,
                                            b.lower,
                                            secondary_rate(&f2, sys.p, sigma2, k, &a_s)?,
                                        ])
                                    })
                                    .collect()
                            })
                            .collect::<Result<_>>()
                    })?;
                    for (j, &alpha) in alphas.iter().enumerate() {
                        let label = format!("alpha={alpha}");
                        for (m, metric) in ["primary_upper", "primary_lower", "secondary"]
                            .iter()
                            .enumerate()
                        {
                            let values: Vec<f64> = samples.iter().map(|v| v[j][m]).collect();
                            self.emit_mean(
                                &label,
                                Some(k),
                                Some(m_r),
                                Some(snr),
                                metric,
                                MeanEstimate::from_samples(&values),
                            )?;
                        }
                    }
                    if alphas.len() > 1 {
                        for (m, metric) in
                            [(0, "primary_upper_violations"), (2, "secondary_violations")]
                        {
                            let count = samples
                                .iter()
                                .filter(|v| !nondecreasing(v.iter().map(|r| r[m])))
                                .count();
                            self.emit(
                                "alpha_sweep",
                                Some(k),
                                Some(m_r),
                                Some(snr),
                                metric,
                                count as f64,
                                0.0,
                                trials,
                            )?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn siso_allocation(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let ac = &cfg.allocation;
        let constraints = ConstraintSet {
            peak_power: ac.peak_power,
            avg_power: ac.avg_power,
            ..Default::default()
        };
        let weights = (ac.weights[0], ac.weights[1]);
        let mut point = 0u64;
        for &k in &cfg.sweep.k {
            for &m_r in &cfg.sweep.m_r {
                for &snr in &cfg.sweep.snr_db {
                    point += 1;
                    let mut settings = SisoSettings::new(
                        sys.sigma2_at(snr) / sys.p,
                        ac.grid,
                        build_constellation(sys.primary)?,
                        build_constellation(sys.secondary)?,
                    );
                    settings.primary = ac.primary_bound;
                    settings.k = k;
                    log::info!("allocation siso K={k} M_r={m_r} snr={snr} dB");
                    let outcomes: Vec<[f64; 6]> = self.pool.install(|| {
                        (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(|t| -> Result<[f64; 6]> {
                                let mut rng = trial_rng(cfg.seed, point, t);
                                let states = (0..ac.states)
                                    .map(|_| draw_state(sys, m_r, 1.0, &mut rng))
                                    .collect::<Result<Vec<_>>>()?;
                                let sol = allocate_siso(&states, weights, &constraints, &settings)?;
                                let (gap, violation) = match ac.oracle_refine {
                                    None => (0.0, 0.0),
                                    Some(r) => {
                                        let mut dense = settings.clone();
                                        dense.grid = (settings.grid - 1) * r + 1;
                                        let bf = brute_force_siso(
                                            &states,
                                            weights,
                                            &constraints,
                                            &dense,
                                        )?;
                                        let p_max = ac.peak_power.unwrap_or_else(|| {
                                            ac.avg_power.unwrap_or(0.0) * ac.states as f64
                                        });
                                        let tol = one_cell_tolerance(
                                            &states, &sol, weights, p_max, &settings,
                                        );
                                        let gap = bf.objective - sol.objective;
                                        (gap, if gap > tol + 1e-9 { 1.0 } else { 0.0 })
                                    }
                                };
                                Ok([
                                    sol.objective,
                                    sol.primary_rate,
                                    sol.secondary_rate,
                                    sol.mean_power,
                                    gap,
                                    violation,
                                ])
                            })
                            .collect::<Result<_>>()
                    })?;
                    let metrics = ["objective", "primary_rate", "secondary_rate", "mean_power"];
                    for (m, metric) in metrics.iter().enumerate() {
                        let values: Vec<f64> = outcomes.iter().map(|o| o[m]).collect();
                        self.emit_mean(
                            "siso",
                            Some(k),
                            Some(m_r),
                            Some(snr),
                            metric,
                            MeanEstimate::from_samples(&values),
                        )?;
                    }
                    if ac.oracle_refine.is_some() {
                        let gaps: Vec<f64> = outcomes.iter().map(|o| o[4]).collect();
                        self.emit_mean(
                            "siso",
                            Some(k),
                            Some(m_r),
                            Some(snr),
                            "oracle_gap",
                            MeanEstimate::from_samples(&gaps),
                        )?;
                        let worse = outcomes.iter().map(|o| o[5]).sum::<f64>();
                        self.emit(
                            "siso",
                            Some(k),
                            Some(m_r),
                            Some(snr),
                            "oracle_violations",
                            worse,
                            0.0,
                            outcomes.len() as u64,
                        )?;
                    }
                }
            }
        }
        Ok(())
    }

    fn miso_allocation(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let ac = &cfg.allocation;
        let constraints =
            ConstraintSet::budget(ac.power_budget, ac.min_primary_rate, ac.min_secondary_rate);
        for (point, &snr) in (1u64..).zip(&cfg.sweep.snr_db) {
            let settings = BeamformingSettings {
                sigma2: sys.sigma2_at(snr) / sys.p,
                beta_grid: ac.beta_grid,
                a_s: build_constellation(sys.primary)?,
                a_c: build_constellation(sys.secondary)?,
            };
            log::info!("allocation miso M_t={} snr={snr} dB", ac.m_t);
            let outcomes: Vec<[f64; 4]> = self.pool.install(|| {
                (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| -> Result<[f64; 4]> {
                        let mut rng = trial_rng(cfg.seed, point, t);
                        let st = draw_state(sys, ac.m_t, sys.alpha, &mut rng)?;
                        let sol =
                            beamform_power_min(&st.direct, &st.composite, &constraints, &settings)?;
                        Ok([sol.power, sol.primary_rate, sol.secondary_rate, sol.beta])
                    })
                    .collect::<Result<_>>()
            })?;
            for (m, metric) in ["power", "primary_rate", "secondary_rate", "beta"]
                .iter()
                .enumerate()
            {
                let values: Vec<f64> = outcomes.iter().map(|o| o[m]).collect();
                self.emit_mean(
                    "miso",
                    None,
                    Some(ac.m_t),
                    Some(snr),
                    metric,
                    MeanEstimate::from_samples(&values),
                )?;
            }
        }
        Ok(())
    }

    fn ris_scaling(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let mut point = 0u64;
        for &channel in &cfg.ris.channels {
            for &snr in &cfg.sweep.snr_db {
                let sigma2 = sys.sigma2_at(snr);
                let mut means = Vec::new();
                for &m_b in &cfg.ris.m_b {
                    point += 1;
                    log::info!("ris_scaling {} M_b={m_b} snr={snr} dB", channel.name());
                    let values: Vec<f64> = self.pool.install(|| {
                        (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(|t| -> Result<f64> {
                                let mut rng = trial_rng(cfg.seed, point, t);
                                let (l, g): (Vec<C64>, Vec<C64>) = match channel {
                                    RisChannel::Unit => (
                                        vec![C64::new(1.0, 0.0); m_b],
                                        vec![C64::new(1.0, 0.0); m_b],
                                    ),
                                    RisChannel::Rayleigh => (0..m_b)
                                        .map(|_| {
                                            (
                                                complex_normal(&mut rng, 1.0),
                                                complex_normal(&mut rng, 1.0),
                                            )
                                        })
                                        .unzip(),
                                };
                                let state = passive_beamform(&l, &g)?;
                                Ok(ris_snr(&l, &g, &state, sys.p, sigma2))
                            })
                            .collect::<Result<_>>()
                    })?;
                    let est = MeanEstimate::from_samples(&values);
                    means.push(est.mean);
                    self.emit_mean(channel.name(), None, Some(m_b), Some(snr), "snr", est)?;
                }
                if cfg.ris.m_b.len() > 1 {
                    let x: Vec<f64> = cfg.ris.m_b.iter().map(|&m| (m as f64).ln()).collect();
                    let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
                    let fit = linear_fit(&x, &y);
                    let label = channel.name();
                    self.emit(
                        label,
                        None,
                        None,
                        Some(snr),
                        "loglog_slope",
                        fit.slope,
                        0.0,
                        cfg.trials as u64,
                    )?;
                }
            }
        }
        Ok(())
    }

    fn fdsr_sweep(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let f = &cfg.fdsr;
        let a_s = build_constellation(sys.primary)?;
        let a_c = build_constellation(sys.secondary)?;
        let channels = f
            .residual
            .iter()
            .map(|&r| FdsrChannel::new(f.beta1(), f.beta2(), r))
            .collect::<Result<Vec<_>>>()?;
        let mut point = 0u64;
        for &k in &cfg.sweep.k {
            for &snr in &cfg.sweep.snr_db {
                point += 1;
                let sigma2 = sys.sigma2_at(snr);
                log::info!("fdsr_sweep K={k} snr={snr} dB");
                let n = channels.len();
                let counts: Vec<u64> = self.pool.install(|| {
                    (0..cfg.trials as u64)
                        .into_par_iter()
                        .map(|t| -> Result<Vec<u64>> {
                            let mut rng = trial_rng(cfg.seed, point, t);
                            let s_seq: Vec<C64> = random_symbols(&a_s, k, &mut rng)
                                .iter()
                                .map(|&i| a_s.point(i))
                                .collect();
                            let c_idx = random_symbols(&a_c, 1, &mut rng)[0];
                            let block = synthesize_fdsr_block(
                                &channels[0],
                                sys.p,
                                &s_seq,
                                a_c.point(c_idx),
                                sigma2,
                                &mut rng,
                            )?;
                            channels
                                .iter()
                                .map(|ch| {
                                    Ok(a_c.bit_errors(
                                        cancel_and_detect(&block, ch, sys.p, &s_seq, &a_c)?,
                                        c_idx,
                                    ) as u64)
                                })
                                .collect()
                        })
                        .try_reduce(
                            || vec![0; n],
                            |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                        )
                })?;
                for (r, &errors) in f.residual.iter().zip(&counts) {
                    let e = ErrorCount {
                        errors,
                        trials: cfg.trials as u64,
                    };
                    self.emit_count(&format!("residual={r}"), k, 1, snr, "ber_c", e)?;
                    if *r == 0.0 && a_s.is_constant_modulus() {
                        let theory = perfect_cancellation_ber(
                            f.beta2() * a_s.max_amplitude(),
                            sys.p,
                            k,
                            sigma2,
                        );
                        self.emit(
                            format!("residual={r}"),
                            Some(k),
                            Some(1),
                            Some(snr),
                            "ber_c_theory",
                            theory,
                            0.0,
                            0,
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn nondecreasing(values: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for v in values {
        if v < prev - 1e-12 * prev.abs().max(1.0) {
            return false;
        }
        prev = v;
    }
    true
}
