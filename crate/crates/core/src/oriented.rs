//! Oriented site percolation on the quarter plane and the crossing tail
//! between consecutive fronts.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::renorm::{front_part, pow4, Block};
use crate::sampler::{uniform, Stream};
use crate::stats::{round_sig, wilson, Proportion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedConfig {
    pub gamma: f64,
    pub seed: u64,
}

impl OrientedConfig {
    pub fn new(gamma: f64, seed: u64) -> Self {
        assert!((0.0..=1.0).contains(&gamma), "gamma {gamma} outside [0,1]");
        Self { gamma, seed }
    }

    /// Uniforms depend on the seed only, so configurations at different
    /// `gamma` are coupled monotonically.
    pub fn is_open(&self, b: Block) -> bool {
        uniform(self.seed, Stream::Site, &[b.x as u64, b.y as u64]) < self.gamma
    }
}

/// Seeds plus every site reached from them by `(1,0)`/`(0,1)` steps through
/// open sites of the region. Seeds belong to the cluster whatever their state.
pub fn cluster_of_set<F>(seeds: &BTreeSet<Block>, config: &OrientedConfig, within: F) -> BTreeSet<Block>
where
    F: Fn(Block) -> bool,
{
    let mut cluster = seeds.clone();
    let mut queue: VecDeque<Block> = seeds.iter().copied().collect();
    while let Some(b) = queue.pop_front() {
        for next in [b.step(1, 0), b.step(0, 1)] {
            if within(next) && !cluster.contains(&next) && config.is_open(next) {
                cluster.insert(next);
                queue.push_back(next);
            }
        }
    }
    cluster
}

/// The first `4^(ℓ-1)` blocks of `F_{ℓ,2}`.
pub fn default_seed_set(l: u32) -> BTreeSet<Block> {
    front_part(l, 2).into_iter().take(pow4(l - 1) as usize).collect()
}

/// Whether the cluster of `seeds` misses the crossing target of slice `ℓ`.
pub fn crossing_fails(l: u32, seeds: &BTreeSet<Block>, config: &OrientedConfig) -> bool {
    let top = pow4(l + 1) - 1;
    let cluster = cluster_of_set(seeds, config, |b| b.is_nonnegative() && b.sum() <= top);
    let hits = front_part(l + 1, 2).into_iter().filter(|b| cluster.contains(b)).count();
    (hits as i64) < pow4(l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingEstimate {
    pub slice: u32,
    pub gamma: f64,
    pub seeds: usize,
    pub summary: Proportion,
    /// `estimate^(4^-ℓ)`.
    pub a_diag: f64,
}

pub const ORIENTED_CSV_HEADER: &str = "l,gamma,s,replicas,failures,estimate,ci_lo,ci_hi,a_diag";

impl CrossingEstimate {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.slice,
            round_sig(self.gamma),
            self.seeds,
            self.summary.trials,
            self.summary.successes,
            round_sig(self.summary.estimate),
            round_sig(self.summary.ci_lo),
            round_sig(self.summary.ci_hi),
            round_sig(self.a_diag)
        )
    }
}

/// Per-replica failure flags, replica `r` using seed `seed_base + r`.
pub fn crossing_failures(l: u32, seeds: &BTreeSet<Block>, gamma: f64, replicas: u64, seed_base: u64) -> Vec<bool> {
    (0..replicas)
        .into_par_iter()
        .map(|r| crossing_fails(l, seeds, &OrientedConfig::new(gamma, seed_base.wrapping_add(r))))
        .collect()
}

pub fn estimate_crossing_tail(
    l: u32,
    seeds: &BTreeSet<Block>,
    gamma: f64,
    replicas: u64,
    seed_base: u64,
) -> CrossingEstimate {
    assert!(replicas > 0);
    let fails = crossing_failures(l, seeds, gamma, replicas, seed_base);
    let summary = wilson(fails.iter().filter(|&&f| f).count() as u64, replicas).expect("replicas > 0");
    CrossingEstimate {
        slice: l,
        gamma,
        seeds: seeds.len(),
        a_diag: summary.estimate.powf(1.0 / pow4(l) as f64),
        summary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: i64) -> impl Fn(Block) -> bool {
        move |b| b.x >= 0 && b.y >= 0 && b.x < side && b.y < side
    }

    fn brute_closure(seeds: &BTreeSet<Block>, cfg: &OrientedConfig, side: i64) -> BTreeSet<Block> {
        let mut set = seeds.clone();
        loop {
            let mut grew = false;
            for x in 0..side {
                for y in 0..side {
                    let b = Block::new(x, y);
                    if set.contains(&b) || !cfg.is_open(b) {
                        continue;
                    }
                    if set.contains(&b.step(-1, 0)) || set.contains(&b.step(0, -1)) {
                        set.insert(b);
                        grew = true;
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn extremes() {
        let s: BTreeSet<Block> = [Block::new(2, 3)].into();
        assert_eq!(cluster_of_set(&s, &OrientedConfig::new(0.0, 1), square(10)), s);
        let full = cluster_of_set(&s, &OrientedConfig::new(1.0, 1), square(10));
        assert_eq!(full.len(), 8 * 7);
        assert!(full.iter().all(|b| b.x >= 2 && b.y >= 3));
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..30u64 {
            let cfg = OrientedConfig::new(0.6, seed);
            let s: BTreeSet<Block> = [Block::new(0, 0), Block::new(5, 1), Block::new(2, 9)].into();
            assert_eq!(cluster_of_set(&s, &cfg, square(20)), brute_closure(&s, &cfg, 20), "seed {seed}");
        }
    }

    #[test]
    fn monotone_in_gamma_and_seeds() {
        let s = default_seed_set(2);
        let mut bigger = s.clone();
        bigger.insert(Block::new(9, 6));
        for seed in 0..20u64 {
            let lo = cluster_of_set(&s, &OrientedConfig::new(0.5, seed), square(16));
            let hi = cluster_of_set(&s, &OrientedConfig::new(0.7, seed), square(16));
            assert!(lo.is_subset(&hi));
            let wide = cluster_of_set(&bigger, &OrientedConfig::new(0.5, seed), square(16));
            assert!(lo.is_subset(&wide));
        }
    }

    #[test]
    fn tail_extremes() {
        let s = default_seed_set(1);
        assert_eq!(s.len(), 1);
        assert_eq!(estimate_crossing_tail(1, &s, 1.0, 100, 0).summary.estimate, 0.0);
        assert_eq!(estimate_crossing_tail(1, &s, 0.0, 100, 0).summary.estimate, 1.0);
    }
}
