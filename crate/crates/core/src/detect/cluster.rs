//! Semi-blind detection of the secondary symbol by constellation learning.
//!
//! Without channel knowledge, the received samples form `2|A_s|` clusters
//! centred on `√p(h1 + h2·c)·s`. k-means recovers the centroids, and two
//! labelled pilot blocks (one per secondary symbol) tell which half of the
//! centroids belongs to which `c`.

use std::cmp::Ordering;

use rand::Rng;

use crate::channel::ReceivedBlock;
use crate::rng::make_rng;
use crate::types::Constellation;
use crate::{Error, Result, C64};

/// Minimum number of samples used to learn the centroids.
pub const MIN_TRAINING_SAMPLES: usize = 64;

const MAX_ITERATIONS: usize = 200;

/// Pilot blocks sent with the first and second secondary symbol.
#[derive(Debug, Clone)]
pub struct PilotPair {
    pub first: ReceivedBlock,
    pub second: ReceivedBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringOutcome {
    /// Secondary decision (index into `A_c`) per input block, in input order.
    pub decisions: Vec<usize>,
    pub centroids: Vec<Vec<C64>>,
    /// Secondary index assigned to each centroid.
    pub groups: Vec<usize>,
}

impl ClusteringOutcome {
    pub fn decided_symbols(&self, a_c: &Constellation) -> Vec<C64> {
        self.decisions.iter().map(|&i| a_c.point(i)).collect()
    }
}

/// Learns `2|A_s|` centroids from all samples and labels each block.
///
/// Samples are put in a canonical order before seeding so that the result
/// does not depend on block order. The primary alphabet must be constant
/// modulus and the secondary alphabet binary.
pub fn detect_clustering(
    blocks: &[ReceivedBlock],
    pilots: &PilotPair,
    a_s: &Constellation,
    a_c: &Constellation,
    seed: u64,
) -> Result<ClusteringOutcome> {
    if a_c.len() != 2 {
        return Err(Error::invalid(
            "a_c",
            "clustering needs a binary secondary alphabet",
        ));
    }
    if !a_s.is_constant_modulus() {
        return Err(Error::invalid(
            "a_s",
            "clustering needs a constant-modulus primary alphabet",
        ));
    }
    let mut data: Vec<&[C64]> = blocks
        .iter()
        .flat_map(|b| b.samples.iter().map(Vec::as_slice))
        .collect();
    if data.len() < MIN_TRAINING_SAMPLES {
        return Err(Error::invalid(
            "blocks",
            format!(
                "{} samples, at least {MIN_TRAINING_SAMPLES} needed",
                data.len()
            ),
        ));
    }
    let dim = data[0].len();
    if data.iter().any(|y| y.len() != dim) || pilot_dim(pilots) != Some(dim) {
        return Err(Error::invalid(
            "blocks",
            "all samples and pilots need the same dimension",
        ));
    }
    data.sort_by(|a, b| canonical_cmp(a, b));

    let k = 2 * a_s.len();
    let centroids = kmeans(&data, k, seed);
    let distinct = count_distinct(&centroids);
    if distinct < k {
        return Err(Error::ClusterCollapse {
            found: distinct,
            expected: k,
        });
    }

    let anchors = [
        centroids[nearest(&centroids, &pilots.first.samples[0])].clone(),
        centroids[nearest(&centroids, &pilots.second.samples[0])].clone(),
    ];
    // centroids of one group differ by the ratios s/s0 of primary symbols
    let s0 = a_s.point(0);
    let ratios: Vec<C64> = a_s.points().iter().map(|s| s / s0).collect();
    let groups: Vec<usize> = centroids
        .iter()
        .map(|mu| {
            let d = |anchor: &[C64]| {
                ratios
                    .iter()
                    .map(|w| sq_dist_scaled(mu, anchor, *w))
                    .fold(f64::INFINITY, f64::min)
            };
            if d(&anchors[1]) < d(&anchors[0]) {
                1
            } else {
                0
            }
        })
        .collect();
    let in_first = groups.iter().filter(|&&g| g == 0).count();
    if in_first != a_s.len() {
        return Err(Error::PilotAmbiguity {
            expected: a_s.len(),
            found: [in_first, k - in_first],
        });
    }

    let decisions = blocks
        .iter()
        .map(|b| {
            let mut cost = [0.0f64; 2];
            for y in &b.samples {
                for (g, slot) in cost.iter_mut().enumerate() {
                    *slot += centroids
                        .iter()
                        .zip(&groups)
                        .filter(|(_, &gg)| gg == g)
                        .map(|(mu, _)| sq_dist(y, mu))
                        .fold(f64::INFINITY, f64::min);
                }
            }
            usize::from(cost[1] < cost[0])
        })
        .collect();

    Ok(ClusteringOutcome {
        decisions,
        centroids,
        groups,
    })
}

fn pilot_dim(p: &PilotPair) -> Option<usize> {
    let a = p.first.samples.first()?.len();
    let b = p.second.samples.first()?.len();
    (a == b).then_some(a)
}

fn canonical_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn sq_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

fn sq_dist_scaled(a: &[C64], b: &[C64], w: C64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y * w).norm_sqr()).sum()
}

fn nearest(centroids: &[Vec<C64>], y: &[C64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(y, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

fn count_distinct(centroids: &[Vec<C64>]) -> usize {
    let scale = centroids
        .iter()
        .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut kept: Vec<&Vec<C64>> = Vec::new();
    for c in centroids {
        if c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            continue;
        }
        if kept.iter().all(|k| sq_dist(k, c) > 1e-12 * scale) {
            kept.push(c);
        }
    }
    kept.len()
}

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are marked by
/// NaN centroids so the caller reports a collapse.
fn kmeans(data: &[&[C64]], k: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = make_rng(seed, 0);
    let mut centroids: Vec<Vec<C64>> = Vec::with_capacity(k);
    centroids.push(data[rng.random_range(0..data.len())].to_vec());
    let mut d2: Vec<f64> = data.iter().map(|y| sq_dist(y, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = data.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..data.len())
        };
        let c = data[idx].to_vec();
        for (slot, y) in d2.iter_mut().zip(data) {
            *slot = slot.min(sq_dist(y, &c));
        }
        centroids.push(c);
    }

    let dim = data[0].len();
    let mut assign = vec![usize::MAX; data.len()];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (a, y) in assign.iter_mut().zip(data) {
            let n = nearest(&centroids, y);
            if *a != n {
                *a = n;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![C64::new(0.0, 0.0); dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, y) in assign.iter().zip(data) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(y.iter()) {
                *s += v;
            }
        }
        for ((c, s), n) in centroids.iter_mut().zip(sums).zip(&counts) {
            *c = if *n > 0 {
                s.into_iter().map(|v| v / *n as f64).collect()
            } else {
                vec![C64::new(f64::NAN, f64::NAN); dim]
            };
        }
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::synthesize_block;
    use crate::modem::build_constellation;
    use crate::types::Scheme;

    fn bpsk() -> Constellation {
        build_constellation(Scheme::Bpsk).unwrap()
    }

    fn blocks(h1: &[C64], h2: &[C64], sigma2: f64, n: usize, seed: u64) -> Vec<ReceivedBlock> {
        let a = bpsk();
        let mut rng = make_rng(seed, 1);
        (0..n)
            .map(|i| {
                let s = [a.point(i % 2)];
                let c = a.point((i / 2) % 2);
                synthesize_block(h1, h2, 1.0, &s, c, sigma2, &mut rng).unwrap()
            })
            .collect()
    }

    fn pilots(h1: &[C64], h2: &[C64], sigma2: f64) -> PilotPair {
        let a = bpsk();
        let mut rng = make_rng(99, 2);
        PilotPair {
            first: synthesize_block(h1, h2, 1.0, &[a.point(0)], a.point(0), sigma2, &mut rng)
                .unwrap(),
            second: synthesize_block(h1, h2, 1.0, &[a.point(1)], a.point(1), sigma2, &mut rng)
                .unwrap(),
        }
    }

    #[test]
    fn noiseless_scalar_four_centroids() {
        let h1 = [C64::new(2.0, 0.0)];
        let h2 = [C64::new(0.5, 0.0)];
        let data = blocks(&h1, &h2, 0.0, 64, 1);
        let out = detect_clustering(&data, &pilots(&h1, &h2, 0.0), &bpsk(), &bpsk(), 5).unwrap();
        let mut cs: Vec<f64> = out.centroids.iter().map(|c| c[0].re).collect();
        cs.sort_by(f64::total_cmp);
        assert_eq!(cs, vec![-2.5, -1.5, 1.5, 2.5]);
        for (c, g) in out.centroids.iter().zip(&out.groups) {
            let expected = if c[0].re.abs() == 2.5 { 0 } else { 1 };
            assert_eq!(*g, expected);
        }
        for (b, d) in data.iter().zip(&out.decisions) {
            assert_eq!(bpsk().point(*d), b.truth.as_ref().unwrap().c);
        }
    }

    #[test]
    fn block_order_does_not_matter() {
        let h1 = [C64::new(1.2, -0.4), C64::new(0.3, 0.9)];
        let h2 = [C64::new(0.2, 0.3), C64::new(-0.4, 0.1)];
        let data = blocks(&h1, &h2, 0.01, 200, 3);
        let p = pilots(&h1, &h2, 0.0);
        let a = detect_clustering(&data, &p, &bpsk(), &bpsk(), 7).unwrap();
        let mut rev = data.clone();
        rev.reverse();
        let b = detect_clustering(&rev, &p, &bpsk(), &bpsk(), 7).unwrap();
        assert_eq!(a.centroids, b.centroids);
        let mut back = b.decisions.clone();
        back.reverse();
        assert_eq!(a.decisions, back);
    }

    #[test]
    fn collapse_when_clusters_coincide() {
        // h2 = 0 makes the c = ±1 clusters identical
        let h1 = [C64::new(1.0, 0.0)];
        let h2 = [C64::new(0.0, 0.0)];
        let data = blocks(&h1, &h2, 0.0, 64, 1);
        let err =
            detect_clustering(&data, &pilots(&h1, &h2, 0.0), &bpsk(), &bpsk(), 5).unwrap_err();
        assert!(matches!(
            err,
            Error::ClusterCollapse {
                found: 2,
                expected: 4
            }
        ));
    }

    #[test]
    fn too_few_samples() {
        let h1 = [C64::new(1.0, 0.0)];
        let h2 = [C64::new(0.5, 0.0)];
        let data = blocks(&h1, &h2, 0.0, 10, 1);
        assert!(detect_clustering(&data, &pilots(&h1, &h2, 0.0), &bpsk(), &bpsk(), 5).is_err());
    }
}
