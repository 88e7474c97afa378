//! The block-folding isomorphism onto a slab with long-range columns, and
//! the black-vertex coupling with oriented percolation run on that slab.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::lattice::{canonical_edge, Edge, EdgeKind, ProbSequence, Truncation, Vertex, Window};
use crate::renorm::Block;
use crate::sampler::{Configuration, FieldOracle};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlabError {
    #[error("edge {0} is not an edge of the folded graph")]
    NotInFK(Edge),
    #[error("word has {len} letters but letter {needed} was requested")]
    WordTooShort { needed: usize, len: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("layer {layer} left the slab [0, {max}] at step {step}")]
    LayerEscape { step: usize, layer: i64, max: i64 },
}

/// `u -> (floor(u/K), u mod K)`.
pub fn phi(u: i64, k: u64) -> (i64, i64) {
    let k = k as i64;
    (u.div_euclid(k), u.rem_euclid(k))
}

pub fn phi_inverse(block: i64, layer: i64, k: u64) -> i64 {
    block * k as i64 + layer
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlabVertex {
    pub x: i64,
    pub y: i64,
    pub layer: i64,
}

impl SlabVertex {
    pub const fn new(x: i64, y: i64, layer: i64) -> Self {
        Self { x, y, layer }
    }

    pub fn base(&self) -> Block {
        Block::new(self.x, self.y)
    }
}

/// Lattice site to slab vertex.
pub fn fold(v: Vertex, k: u64) -> SlabVertex {
    let (x, layer) = phi(v.x, k);
    SlabVertex::new(x, v.y, layer)
}

pub fn unfold(s: SlabVertex, k: u64) -> Vertex {
    Vertex::new(phi_inverse(s.x, s.layer, k), s.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlabEdgeKind {
    /// Within one column, spanning this many layers.
    Vertical(u64),
    /// One step in the first base direction.
    Horizontal1,
    /// One step in the second base direction.
    Horizontal2,
}

/// Adjacency of the slab itself.
pub fn slab_edge_kind(a: SlabVertex, b: SlabVertex, k: u64) -> Option<SlabEdgeKind> {
    let k = k as i64;
    if !(0..k).contains(&a.layer) || !(0..k).contains(&b.layer) {
        return None;
    }
    let (dx, dy, dl) = (b.x - a.x, b.y - a.y, b.layer - a.layer);
    match (dx.abs(), dy.abs(), dl.abs()) {
        (0, 0, j) if j >= 1 => Some(SlabEdgeKind::Vertical(j as u64)),
        (1, 0, 0) => Some(SlabEdgeKind::Horizontal1),
        (0, 1, 0) => Some(SlabEdgeKind::Horizontal2),
        _ => None,
    }
}

/// How lattice edge classes map onto slab edge classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindTable {
    Standard,
    /// Length-`K` and vertical edges exchanged; a deliberately wrong map.
    Swapped,
}

/// Slab kind of a lattice edge of the folded graph.
pub fn classify_slab_edge(e: &Edge, k: u64) -> Result<SlabEdgeKind, SlabError> {
    classify_with(e, k, KindTable::Standard)
}

fn classify_with(e: &Edge, k: u64, table: KindTable) -> Result<SlabEdgeKind, SlabError> {
    let (h_long, h_vert) = match table {
        KindTable::Standard => (SlabEdgeKind::Horizontal1, SlabEdgeKind::Horizontal2),
        KindTable::Swapped => (SlabEdgeKind::Horizontal2, SlabEdgeKind::Horizontal1),
    };
    match e.kind() {
        EdgeKind::Vertical => Ok(h_vert),
        EdgeKind::Horizontal => {
            let len = e.length();
            if len == k {
                Ok(h_long)
            } else if len < k && phi(e.a().x, k).0 == phi(e.b().x, k).0 {
                Ok(SlabEdgeKind::Vertical(len))
            } else {
                Err(SlabError::NotInFK(*e))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsoReport {
    pub vertices: usize,
    pub edges: usize,
    pub ok: bool,
}

/// Exhaustive check on a window: the fold is injective and round-trips,
/// every folded-graph edge lands on a slab edge of the matching kind, and
/// every slab edge between images pulls back to a folded-graph edge.
pub fn verify_isomorphism(k: u64, window: &Window) -> IsoReport {
    verify_isomorphism_with(k, window, KindTable::Standard)
}

pub fn verify_isomorphism_with(k: u64, window: &Window, table: KindTable) -> IsoReport {
    assert!(k >= 2, "fold needs K >= 2");
    let mut ok = true;
    let mut images = BTreeSet::new();
    for v in window.vertices() {
        let s = fold(v, k);
        ok &= unfold(s, k) == v && images.insert(s);
    }

    let mut edges = 0usize;
    let ki = k as i64;
    for v in window.vertices() {
        let mut partners: Vec<Vertex> = (1..=ki).map(|d| v.offset(d, 0)).collect();
        partners.push(v.offset(0, 1));
        for u in partners.into_iter().filter(|u| window.contains(*u)) {
            let e = canonical_edge(v, u).expect("lattice edge");
            let slab = slab_edge_kind(fold(v, k), fold(u, k), k);
            match classify_with(&e, k, table) {
                Ok(kind) => {
                    edges += 1;
                    ok &= slab == Some(kind);
                }
                Err(_) => ok &= slab.is_none(),
            }
        }
        let s = fold(v, k);
        let mut slab_nbrs = vec![
            SlabVertex::new(s.x + 1, s.y, s.layer),
            SlabVertex::new(s.x, s.y + 1, s.layer),
        ];
        slab_nbrs.extend((s.layer + 1..ki).map(|l| SlabVertex::new(s.x, s.y, l)));
        for t in slab_nbrs {
            let u = unfold(t, k);
            if !window.contains(u) {
                continue;
            }
            let kind = slab_edge_kind(s, t, k);
            ok &= match canonical_edge(v, u) {
                Ok(e) => classify_with(&e, k, table).ok() == kind,
                Err(_) => false,
            };
        }
    }
    IsoReport {
        vertices: images.len(),
        edges,
        ok,
    }
}

/// First `K >= from` with `p_K > threshold`, searching up to `limit`.
pub fn select_truncation(seq: &ProbSequence, from: u64, threshold: f64, limit: u64) -> Option<u64> {
    seq.first_index_above(from, threshold, limit)
}

/// Step from parent to candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Up,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Right => "right",
            Direction::Up => "up",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingParams {
    /// Layer offsets tried for a right step.
    pub right: u64,
    /// Extra offsets tried for an up step.
    pub up: u64,
}

impl CouplingParams {
    pub fn validate(&self) -> Result<(), SlabError> {
        if self.right == 0 || self.up == 0 {
            return Err(SlabError::InvalidParams("both offset ranges must be non-empty".into()));
        }
        Ok(())
    }

    /// Slab thickness: layers `0..=2(N+M)`.
    pub fn thickness(&self) -> u64 {
        2 * (self.right + self.up) + 1
    }

    pub fn range(&self, dir: Direction) -> RangeInclusive<u64> {
        match dir {
            Direction::Right => 1..=self.right,
            Direction::Up => self.right + 1..=self.right + self.up,
        }
    }

    fn pivot(&self) -> i64 {
        (self.right + self.up) as i64
    }
}

/// Probability that the in-slab link of a step is open: a length-`K` edge
/// to the right, a vertical lattice edge upward.
pub fn link_probability(dir: Direction, seq: &ProbSequence, k: u64) -> f64 {
    match dir {
        Direction::Right => seq.p(k),
        Direction::Up => seq.epsilon(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackProbability {
    pub exact: f64,
    /// Same product with both letter factors replaced by `min(p, 1-p)`.
    pub lower_bound: f64,
}

/// Chance that a candidate is black on fresh probes, given the two letters
/// it must match.
pub fn black_probability(
    range: RangeInclusive<u64>,
    link: f64,
    letter_p: f64,
    seq: &ProbSequence,
    letters: (u8, u8),
) -> BlackProbability {
    let q = |b: u8| if b == 1 { letter_p } else { 1.0 - letter_p };
    let pair = q(letters.0) * q(letters.1);
    let worst = letter_p.min(1.0 - letter_p).powi(2);
    let mut miss = 1.0;
    let mut miss_bound = 1.0;
    for i in range {
        let pi = seq.p(i);
        miss *= 1.0 - link * pi * pair;
        miss_bound *= 1.0 - link * pi * worst;
    }
    BlackProbability {
        exact: 1.0 - miss,
        lower_bound: 1.0 - miss_bound,
    }
}

/// One candidate evaluation of the coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackRecord {
    pub step: usize,
    pub x: Block,
    pub y: Block,
    pub direction: Direction,
    /// Offsets taken upward (`psi(y) <= N+M`) or downward.
    pub upward: bool,
    pub winner: Option<u64>,
    pub psi: Option<i64>,
}

pub const BLACK_CSV_HEADER: &str = "step,x1,x2,y1,y2,direction,case,winner,psi";

impl BlackRecord {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.step,
            self.x.x,
            self.x.y,
            self.y.x,
            self.y.y,
            self.direction.as_str(),
            if self.upward { "up" } else { "down" },
            self.winner.map_or("-".into(), |i| i.to_string()),
            self.psi.map_or("-".into(), |p| p.to_string())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingOutcome {
    /// Black blocks with their layer.
    pub psi: BTreeMap<Block, i64>,
    pub dead: BTreeSet<Block>,
    pub parent: BTreeMap<Block, Block>,
    pub trace: Vec<BlackRecord>,
    pub thickness: u64,
}

impl CouplingOutcome {
    pub fn reaches(&self, b: Block) -> bool {
        self.psi.contains_key(&b)
    }

    /// The slab path from the origin's bottom layer to `(target, psi)`.
    pub fn slab_path(&self, target: Block) -> Option<Vec<SlabVertex>> {
        let mut chain = vec![target];
        let mut cur = target;
        while cur != Block::new(0, 0) {
            cur = *self.parent.get(&cur)?;
            chain.push(cur);
        }
        chain.reverse();
        let mut path = vec![SlabVertex::new(0, 0, 0)];
        for pair in chain.windows(2) {
            let (y, x) = (pair[0], pair[1]);
            let layer = self.psi[&x];
            path.push(SlabVertex::new(y.x, y.y, layer));
            path.push(SlabVertex::new(x.x, x.y, layer));
        }
        Some(path)
    }
}

/// Letters `2|y|+1` and `2|y|+2` that a step out of `y` must spell.
fn step_letters(word: &Word, y: Block) -> Result<(u8, u8), SlabError> {
    let base = 2 * y.sum() as usize;
    let get = |i: usize| word.get(i).ok_or(SlabError::WordTooShort { needed: i, len: word.len() });
    Ok((get(base + 1)?, get(base + 2)?))
}

/// First offset `i` making the step `y -> x` black, if any.
pub fn black_offset<C: Configuration>(
    config: &C,
    params: &CouplingParams,
    y: Block,
    psi_y: i64,
    dir: Direction,
    letters: (u8, u8),
) -> (bool, Option<u64>) {
    let k = params.thickness();
    let x = match dir {
        Direction::Right => y.step(1, 0),
        Direction::Up => y.step(0, 1),
    };
    let upward = psi_y <= params.pivot();
    for i in params.range(dir) {
        let layer = if upward { psi_y + i as i64 } else { psi_y - i as i64 };
        let from = unfold(SlabVertex::new(y.x, y.y, psi_y), k);
        let mid = unfold(SlabVertex::new(y.x, y.y, layer), k);
        let to = unfold(SlabVertex::new(x.x, x.y, layer), k);
        let column = canonical_edge(from, mid).expect("same row");
        let link = canonical_edge(mid, to).expect("lattice edge");
        if config.is_open(&column)
            && config.letter(mid) == letters.0
            && config.letter(to) == letters.1
            && config.is_open(&link)
        {
            return (upward, Some(i));
        }
    }
    (upward, None)
}

/// Grows the black cluster of the origin inside `[0, width) x [0, height)`.
pub fn run_slab_coupling(
    word: &Word,
    params: &CouplingParams,
    oracle: &FieldOracle,
    width: i64,
    height: i64,
) -> Result<CouplingOutcome, SlabError> {
    params.validate()?;
    let k = params.thickness();
    let oracle = oracle.with_truncation(Truncation::new(k).expect("k >= 3"));
    let inside = |b: Block| b.x >= 0 && b.y >= 0 && b.x < width && b.y < height;
    let mut psi = BTreeMap::from([(Block::new(0, 0), 0i64)]);
    let mut dead = BTreeSet::new();
    let mut parent = BTreeMap::new();
    let mut trace = Vec::new();
    let mut frontier: BTreeSet<Block> =
        [Block::new(1, 0), Block::new(0, 1)].into_iter().filter(|b| inside(*b)).collect();

    while let Some(x) = frontier.pop_first() {
        let (y, dir) = if psi.contains_key(&x.step(-1, 0)) {
            (x.step(-1, 0), Direction::Right)
        } else {
            (x.step(0, -1), Direction::Up)
        };
        let psi_y = psi[&y];
        let letters = step_letters(word, y)?;
        let (upward, winner) = black_offset(&oracle, params, y, psi_y, dir, letters);
        let new_psi = winner.map(|i| if upward { psi_y + i as i64 } else { psi_y - i as i64 });
        if let Some(p) = new_psi {
            if !(0..k as i64).contains(&p) {
                return Err(SlabError::LayerEscape {
                    step: trace.len(),
                    layer: p,
                    max: k as i64 - 1,
                });
            }
            psi.insert(x, p);
            parent.insert(x, y);
            for next in [x.step(1, 0), x.step(0, 1)] {
                if inside(next) && !psi.contains_key(&next) && !dead.contains(&next) {
                    frontier.insert(next);
                }
            }
        } else {
            dead.insert(x);
        }
        trace.push(BlackRecord {
            step: trace.len(),
            x,
            y,
            direction: dir,
            upward,
            winner,
            psi: new_psi,
        });
    }
    Ok(CouplingOutcome {
        psi,
        dead,
        parent,
        trace,
        thickness: k,
    })
}
