//! Seed-deterministic randomness.
//!
//! Every random quantity is a keyed hash of `(seed, stream, coordinates)`
//! mapped to `[0, 1)`. There is no generator state, so edges and sites can
//! be revealed lazily and in any order while staying bit-reproducible.
//! Statistical quality is adequate for Monte Carlo; nothing here is
//! cryptographic.

use std::collections::{HashMap, HashSet};
use std::num::ParseIntError;

use crate::lattice::{edge_probability, Edge, EdgeKind, ProbSequence, Truncation, Vertex};

/// Independent keyspaces. Edges (bond configuration) and letters (site
/// configuration) are independent under the product measure, so they never
/// share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Edge = 0x6564_6765_5f75_6e69,
    Letter = 0x6c65_7474_6572_5f76,
    Site = 0x7369_7465_5f6f_7065,
    Word = 0x776f_7264_5f62_6974,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed hash of a short word sequence.
pub fn hash_key(seed: u64, stream: Stream, words: &[u64]) -> u64 {
    let mut h = mix64(seed ^ mix64(stream as u64));
    for (idx, &w) in words.iter().enumerate() {
        h = mix64(h ^ mix64(w.wrapping_add(GOLDEN.wrapping_mul(idx as u64 + 1))));
    }
    mix64(h.wrapping_add(GOLDEN))
}

/// Top 53 bits of `h` as a double in `[0, 1)`.
#[inline]
pub fn to_unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform(seed: u64, stream: Stream, words: &[u64]) -> f64 {
    to_unit(hash_key(seed, stream, words))
}

/// Accepts decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(text: &str) -> Result<u64, ParseIntError> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse::<u64>(),
    }
}

/// Which check of an edge is being made under the two-stage reveal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Open iff `U < p/2`.
    First,
    /// Open iff `p/2 <= U < p`.
    Second,
}

/// A bond-and-site configuration that can be queried edge by edge.
pub trait Configuration {
    /// Horizontal edges longer than this are closed.
    fn truncation(&self) -> Truncation;
    fn is_open(&self, e: &Edge) -> bool;
    fn letter(&self, v: Vertex) -> u8;
}

impl<C: Configuration + ?Sized> Configuration for &C {
    fn truncation(&self) -> Truncation {
        (**self).truncation()
    }
    fn is_open(&self, e: &Edge) -> bool {
        (**self).is_open(e)
    }
    fn letter(&self, v: Vertex) -> u8 {
        (**self).letter(v)
    }
}

/// The random field: edge uniforms and vertex letters as pure functions of
/// the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOracle {
    seed: u64,
    seq: ProbSequence,
    trunc: Truncation,
    letter_p: f64,
}

impl FieldOracle {
    /// `letter_p` is the probability that a vertex carries letter 1.
    pub fn new(seed: u64, seq: ProbSequence, trunc: Truncation, letter_p: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&letter_p),
            "letter probability {letter_p} outside [0,1]"
        );
        Self {
            seed,
            seq,
            trunc,
            letter_p,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn seq(&self) -> &ProbSequence {
        &self.seq
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn letter_p(&self) -> f64 {
        self.letter_p
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_truncation(&self, trunc: Truncation) -> Self {
        Self {
            trunc,
            ..self.clone()
        }
    }

    pub fn edge_uniform(&self, e: &Edge) -> f64 {
        let (a, b) = (e.a(), e.b());
        uniform(
            self.seed,
            Stream::Edge,
            &[a.x as u64, a.y as u64, b.x as u64, b.y as u64],
        )
    }

    pub fn edge_probability(&self, e: &Edge) -> f64 {
        edge_probability(&self.seq, self.trunc, e)
    }

    /// Single-stage state: open iff `U(e) < p_e`.
    pub fn edge_open(&self, e: &Edge) -> bool {
        self.edge_uniform(e) < self.edge_probability(e)
    }

    pub fn edge_open_staged(&self, e: &Edge, stage: Stage) -> bool {
        let u = self.edge_uniform(e);
        let p = self.edge_probability(e);
        match stage {
            Stage::First => u < p / 2.0,
            Stage::Second => p / 2.0 <= u && u < p,
        }
    }

    pub fn vertex_uniform(&self, v: Vertex) -> f64 {
        uniform(self.seed, Stream::Letter, &[v.x as u64, v.y as u64])
    }

    pub fn vertex_letter(&self, v: Vertex) -> u8 {
        u8::from(self.vertex_uniform(v) < self.letter_p)
    }
}

impl Configuration for FieldOracle {
    fn truncation(&self) -> Truncation {
        self.trunc
    }
    fn is_open(&self, e: &Edge) -> bool {
        self.edge_open(e)
    }
    fn letter(&self, v: Vertex) -> u8 {
        self.vertex_letter(v)
    }
}

/// A hand-specified configuration. Unlisted edges are closed; unlisted
/// vertices carry `default_letter`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitConfig {
    trunc: Truncation,
    open: HashSet<Edge>,
    letters: HashMap<Vertex, u8>,
    default_letter: u8,
}

impl ExplicitConfig {
    pub fn new(trunc: Truncation, default_letter: u8) -> Self {
        Self {
            trunc,
            open: HashSet::new(),
            letters: HashMap::new(),
            default_letter,
        }
    }

    pub fn open_edge(&mut self, e: Edge) {
        self.open.insert(e);
    }

    pub fn close_edge(&mut self, e: &Edge) {
        self.open.remove(e);
    }

    pub fn set_letter(&mut self, v: Vertex, letter: u8) {
        assert!(letter <= 1, "letters are 0 or 1");
        self.letters.insert(v, letter);
    }

    pub fn open_edges(&self) -> impl Iterator<Item = &Edge> {
        self.open.iter()
    }

    pub fn open_count(&self) -> usize {
        self.open.len()
    }
}

impl Configuration for ExplicitConfig {
    fn truncation(&self) -> Truncation {
        self.trunc
    }
    fn is_open(&self, e: &Edge) -> bool {
        self.open.contains(e)
            && (e.kind() == EdgeKind::Vertical || e.length() <= self.trunc.k())
    }
    fn letter(&self, v: Vertex) -> u8 {
        self.letters.get(&v).copied().unwrap_or(self.default_letter)
    }
}
