//! The one-dimensional growth algorithm inside a block of `n` consecutive
//! sites, and a Monte Carlo estimate of its success probability.
//!
//! State is the triple `(A, B, Z)`: `A` holds sites that extend the word,
//! each with the count `t` of letters seen on arrival; `B` holds sites that
//! may no longer be used; `Z` counts pending sites. Each step processes the
//! `k`-th site of `A`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{canonical_edge, Edge, ProbSequence, Truncation, Vertex};
use crate::sampler::{Configuration, FieldOracle};
use crate::stats::{self, Proportion};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("invalid start: {0}")]
    InvalidStart(String),
    #[error("word has {len} letters but letter {needed} was requested")]
    WordTooShort { needed: usize, len: usize },
    #[error("invariant violated at step {step}: {what}")]
    Invariant { step: u64, what: String },
}

/// Access to edge states and letters during an exploration. Implementations
/// may keep track of what has been revealed.
pub trait Probe {
    fn edge_open(&mut self, e: &Edge) -> bool;
    fn letter(&mut self, v: Vertex) -> u8;
}

/// Reads a configuration with no bookkeeping.
pub struct Direct<'a, C: ?Sized>(pub &'a C);

impl<C: Configuration + ?Sized> Probe for Direct<'_, C> {
    fn edge_open(&mut self, e: &Edge) -> bool {
        self.0.is_open(e)
    }

    fn letter(&mut self, v: Vertex) -> u8 {
        self.0.letter(v)
    }
}

/// A row of `len` consecutive sites starting at `x_min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub row: i64,
    pub x_min: i64,
    pub len: u64,
}

impl Segment {
    pub fn new(row: i64, x_min: i64, len: u64) -> Self {
        assert!(len > 0, "segments are nonempty");
        Self { row, x_min, len }
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.len as i64 - 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.y == self.row && v.x >= self.x_min && v.x <= self.x_max()
    }

    pub fn sites(&self) -> impl Iterator<Item = Vertex> + '_ {
        (self.x_min..=self.x_max()).map(move |x| Vertex::new(x, self.row))
    }

    pub fn middle(&self) -> Vertex {
        Vertex::new(self.x_min + (self.len as i64 - 1) / 2, self.row)
    }

    /// Sites ordered by distance from `v`, right before left at each distance.
    pub fn scan_from(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let reach = self.len as i64;
        (1..reach).flat_map(move |d| [v.offset(d, 0), v.offset(-d, 0)])
            .filter(move |u| self.contains(*u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthParams {
    /// Open edges required in Step 1.
    pub fan_out: usize,
    pub alpha: u64,
    /// Stop once `|A| >= alpha * mult`.
    pub mult: u64,
}

impl GrowthParams {
    pub fn threshold(&self) -> u64 {
        self.alpha * self.mult
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthStart {
    pub first: Vertex,
    /// Letters already seen on arrival at `first`.
    pub t_first: u64,
    /// Initially unavailable sites. `first` is added if absent.
    pub burned: BTreeSet<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTrace {
    pub success: bool,
    /// `A_T` in insertion order with letter counts.
    pub grown: Vec<(Vertex, u64)>,
    pub burned: BTreeSet<Vertex>,
    /// Stopping step `T`.
    pub stop: u64,
    /// `Z_1, …, Z_T`.
    pub z_path: Vec<u64>,
    pub initial_burned: usize,
    /// `|B_1| + threshold * L`, the quantity that must stay small against `n`.
    pub f: u64,
    pub up_moves: u64,
}

impl GrowthTrace {
    pub fn steps(&self) -> u64 {
        self.stop - 1
    }

    pub fn max_t(&self) -> u64 {
        self.grown.iter().map(|&(_, t)| t).max().expect("A is never empty")
    }

    /// `max t - t(v_1) + 1`.
    pub fn letters_consumed(&self) -> u64 {
        self.max_t() - self.grown[0].1 + 1
    }
}

fn invariant(step: u64, ok: bool, what: impl FnOnce() -> String) -> Result<(), GrowthError> {
    if ok {
        Ok(())
    } else {
        Err(GrowthError::Invariant { step, what: what() })
    }
}

/// Runs the growth algorithm in `segment` for `word`.
pub fn run_growth<P: Probe + ?Sized>(
    params: &GrowthParams,
    start: &GrowthStart,
    segment: &Segment,
    word: &Word,
    probe: &mut P,
) -> Result<GrowthTrace, GrowthError> {
    if params.fan_out < 2 {
        return Err(GrowthError::InvalidStart(format!(
            "fan-out {} is below 2",
            params.fan_out
        )));
    }
    if params.alpha == 0 || params.alpha >= segment.len || params.mult == 0 {
        return Err(GrowthError::InvalidStart(format!(
            "need 0 < alpha < n with a positive multiplier, got alpha {} n {} mult {}",
            params.alpha, segment.len, params.mult
        )));
    }
    if !segment.contains(start.first) {
        return Err(GrowthError::InvalidStart(format!(
            "{} is outside the segment",
            start.first
        )));
    }
    let threshold = params.threshold();
    let mut grown = vec![(start.first, start.t_first)];
    let mut burned = start.burned.clone();
    burned.insert(start.first);
    let initial_burned = burned.len();
    let mut z: u64 = 1;
    let mut z_path = vec![z];
    let mut k: u64 = 1;
    let mut up_moves = 0;

    loop {
        invariant(k, grown.len() as u64 == k + z - 1, || {
            format!("|A| = {} but k + Z - 1 = {}", grown.len(), k + z - 1)
        })?;
        if grown.len() as u64 >= threshold || z == 0 {
            break;
        }
        let (v, t) = grown[(k - 1) as usize];
        let before = burned.len();

        let mut found = Vec::with_capacity(params.fan_out);
        for u in segment.scan_from(v) {
            if burned.contains(&u) {
                continue;
            }
            let e = canonical_edge(v, u).expect("sites of one row");
            if probe.edge_open(&e) {
                found.push(u);
                if found.len() == params.fan_out {
                    break;
                }
            }
        }

        let mut advanced = false;
        if found.len() == params.fan_out {
            burned.extend(found.iter().copied());
            let idx = t as usize + 1;
            let want = word.get(idx).ok_or(GrowthError::WordTooShort {
                needed: idx,
                len: word.len(),
            })?;
            let mut matches = Vec::with_capacity(2);
            for &u in &found {
                if probe.letter(u) == want {
                    matches.push(u);
                    if matches.len() == 2 {
                        break;
                    }
                }
            }
            if matches.len() == 2 {
                grown.extend(matches.into_iter().map(|u| (u, t + 1)));
                advanced = true;
            }
        }

        invariant(k, burned.len() - before <= params.fan_out, || {
            format!("B grew by {} > L", burned.len() - before)
        })?;
        if advanced {
            z += 1;
            up_moves += 1;
        } else {
            z -= 1;
        }
        z_path.push(z);
        k += 1;
    }

    Ok(GrowthTrace {
        success: z > 0,
        grown,
        burned,
        stop: k,
        z_path,
        initial_burned,
        f: initial_burned as u64 + threshold * params.fan_out as u64,
        up_moves,
    })
}

/// How `alpha` depends on the block size.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaPolicy {
    /// `floor(c ln n)`.
    Log { c: f64 },
    /// `c1 * (n q_{2n})^{-3}` for a reference sequence `q`.
    Beta { c1: f64, reference: ProbSequence },
    Fixed(u64),
}

impl AlphaPolicy {
    /// Clamped to `[1, n - 1]`.
    pub fn alpha(&self, n: u64) -> u64 {
        let raw = match self {
            AlphaPolicy::Log { c } => (c * (n as f64).ln()).floor(),
            AlphaPolicy::Beta { c1, reference } => {
                let q = reference.p(2 * n);
                if q <= 0.0 {
                    f64::INFINITY
                } else {
                    (c1 * (n as f64 * q).powi(-3)).floor()
                }
            }
            AlphaPolicy::Fixed(a) => *a as f64,
        };
        (raw.max(1.0) as u64).min(n.saturating_sub(1).max(1))
    }
}

/// One point of an estimator sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthPoint {
    pub n: u64,
    pub fan_out: usize,
    pub alpha: u64,
    pub mult: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub point: GrowthPoint,
    pub seed_base: u64,
    pub summary: Proportion,
    /// Fraction of steps where `Z` moved up.
    pub up_frequency: f64,
}

pub const GROWTH_CSV_HEADER: &str =
    "n,L,alpha,replicas,successes,estimate,ci_lo,ci_hi,seed_base,up_frequency";

impl GrowthRow {
    pub fn csv(&self) -> String {
        let s = &self.summary;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.point.n,
            self.point.fan_out,
            self.point.alpha,
            s.trials,
            s.successes,
            stats::round_sig(s.estimate),
            stats::round_sig(s.ci_lo),
            stats::round_sig(s.ci_hi),
            self.seed_base,
            stats::round_sig(self.up_frequency)
        )
    }
}

/// One replica of the estimator: a block `[0, n)` on row 0, the first site in
/// the middle, a fresh word, and truncation `n`.
pub fn growth_replica(
    point: &GrowthPoint,
    seq: &ProbSequence,
    letter_p: f64,
    seed: u64,
) -> Result<GrowthTrace, GrowthError> {
    let trunc = Truncation::new(point.n).map_err(|e| GrowthError::InvalidStart(e.to_string()))?;
    let oracle = FieldOracle::new(seed, seq.clone(), trunc, letter_p);
    let segment = Segment::new(0, 0, point.n);
    let word = Word::random(seed, (point.alpha * point.mult) as usize + 1);
    let params = GrowthParams {
        fan_out: point.fan_out,
        alpha: point.alpha,
        mult: point.mult,
    };
    let start = GrowthStart {
        first: segment.middle(),
        t_first: 0,
        burned: BTreeSet::new(),
    };
    run_growth(&params, &start, &segment, &word, &mut Direct(&oracle))
}

/// Success frequency per point over replicas `seed_base + r`.
pub fn estimate_growth_success(
    points: &[GrowthPoint],
    seq: &ProbSequence,
    letter_p: f64,
    replicas: u64,
    seed_base: u64,
) -> Result<Vec<GrowthRow>, GrowthError> {
    points
        .iter()
        .map(|point| {
            let traces: Vec<GrowthTrace> = (0..replicas)
                .into_par_iter()
                .map(|r| growth_replica(point, seq, letter_p, seed_base.wrapping_add(r)))
                .collect::<Result<_, _>>()?;
            let summary = stats::summarize(traces.iter().map(|t| t.success))
                .map_err(|e| GrowthError::InvalidStart(e.to_string()))?;
            let ups: u64 = traces.iter().map(|t| t.up_moves).sum();
            let steps: u64 = traces.iter().map(|t| t.steps()).sum();
            let up_frequency = if steps == 0 {
                0.0
            } else {
                stats::round_sig(ups as f64 / steps as f64)
            };
            Ok(GrowthRow {
                point: *point,
                seed_base,
                summary,
                up_frequency,
            })
        })
        .collect()
}

/// Exact success probability when every step succeeds independently with
/// probability `up`: the walk `Z` starts at 1 and stops at 0 or once
/// `k + Z - 1 >= threshold`.
pub fn absorbed_walk_success(up: f64, threshold: u64) -> f64 {
    // mass[z] at step k for the unstopped walk
    let mut mass = vec![0.0; threshold as usize + 2];
    mass[1] = 1.0;
    let mut success = 0.0;
    for k in 1..=threshold {
        let mut next = vec![0.0; mass.len()];
        for (z, &w) in mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if z == 0 {
                continue;
            }
            if k + z as u64 > threshold {
                success += w;
                continue;
            }
            next[z + 1] += w * up;
            next[z - 1] += w * (1.0 - up);
        }
        mass = next;
    }
    success
}

/// `P(Bin(n, q) >= k)`.
pub fn binomial_tail(n: u64, q: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let mut below = 0.0;
    let mut coeff = 1.0f64;
    for j in 0..k {
        if j > 0 {
            coeff *= (n - j + 1) as f64 / j as f64;
        }
        below += coeff * q.powi(j as i32) * (1.0 - q).powi((n - j) as i32);
    }
    (1.0 - below).max(0.0)
}
