//! Renormalized lattice of horizontal blocks and the slice-by-slice
//! word exploration built on top of the growth algorithm.
//!
//! A block `(u1, u2)` of size `n` is the row segment
//! `{(y, u2) : n*u1 <= y < n*(u1+1)}`. Slice `ℓ` is the diagonal band
//! `4^ℓ <= u1 + u2 < 4^(ℓ+1)`; its entry line is `F_ℓ = {u1 + u2 = 4^ℓ - 1}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::growth::{self, binomial_tail, GrowthError, GrowthParams, GrowthStart, Probe, Segment};
use crate::lattice::{canonical_edge, Edge, EdgeKind, Truncation, Vertex};
use crate::sampler::{FieldOracle, Stage};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenormError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("ledger violation: {0}")]
    LedgerViolation(String),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("word has {len} letters but letter {needed} was requested")]
    WordTooShort { needed: usize, len: usize },
}

/// A vertex of the renormalized lattice. Ordered by `u1 + u2`, then `u1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub x: i64,
    pub y: i64,
}

impl Block {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn sum(&self) -> i64 {
        self.x + self.y
    }

    pub fn step(self, dx: i64, dy: i64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.x >= 0 && self.y >= 0
    }

    pub fn segment(&self, n: u64) -> Segment {
        Segment::new(self.y, self.x * n as i64, n)
    }

    pub fn half(&self, n: u64, half: Half) -> Segment {
        let base = self.x * n as i64;
        match half {
            Half::Minus => Segment::new(self.y, base, n / 2),
            Half::Plus => Segment::new(self.y, base + (n / 2) as i64, n / 2),
        }
    }

    pub fn of_site(v: Vertex, n: u64) -> Self {
        Self::new(v.x.div_euclid(n as i64), v.y)
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.sum(), self.x).cmp(&(other.sum(), other.x))
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Left or right half of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    Minus,
    Plus,
}

pub fn pow4(l: u32) -> i64 {
    4i64.pow(l)
}

/// `F_ℓ`, ordered by first coordinate.
pub fn front(l: u32) -> Vec<Block> {
    let s = pow4(l) - 1;
    (0..=s).map(|x| Block::new(x, s - x)).collect()
}

/// `F_{ℓ,j}` for `j` in 1..=3 and `ℓ >= 1`.
pub fn front_part(l: u32, j: u8) -> Vec<Block> {
    assert!(l >= 1 && (1..=3).contains(&j));
    front(l)
        .into_iter()
        .filter(|b| front_part_of(l, b.x) == j)
        .collect()
}

fn front_part_of(l: u32, x: i64) -> u8 {
    let q = pow4(l - 1);
    if x < q {
        1
    } else if x < 3 * q {
        2
    } else {
        3
    }
}

pub fn in_slice(l: u32, b: Block) -> bool {
    b.is_nonnegative() && b.sum() >= pow4(l) && b.sum() < pow4(l + 1)
}

/// Where a block sits relative to the slice structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    /// `ℓ >= 1` with the block on `F_ℓ`.
    pub front: Option<u32>,
    /// Which of `F_{ℓ,1}`, `F_{ℓ,2}`, `F_{ℓ,3}`.
    pub part: Option<u8>,
    /// `ℓ >= 1` with the block in `T_ℓ`.
    pub slice: Option<u32>,
}

pub fn slice_classify(b: Block) -> Classification {
    if !b.is_nonnegative() {
        return Classification::default();
    }
    let s = b.sum();
    let mut out = Classification::default();
    for l in 1..31u32 {
        let q = pow4(l);
        if s == q - 1 {
            out.front = Some(l);
            out.part = Some(front_part_of(l, b.x));
        }
        if s >= q && s < 4 * q {
            out.slice = Some(l);
        }
        if q > s + 1 {
            break;
        }
    }
    out
}

/// Blocks outside `set` reached from it by one step `(1,0)` or `(0,1)`.
pub fn oriented_boundary(set: &BTreeSet<Block>) -> BTreeSet<Block> {
    set.iter()
        .flat_map(|b| [b.step(1, 0), b.step(0, 1)])
        .filter(|b| !set.contains(b))
        .collect()
}

/// Letters available at the start of slice `ℓ0` and their upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterBudget {
    pub raw: u64,
    pub s: u64,
    /// `(ℓ+1)(h-1) <= 4^(ℓ+1)`, under which `raw <= s`.
    pub valid: bool,
}

pub fn initial_letters(l0: u32) -> u64 {
    2 * pow4(l0) as u64 + 1
}

pub fn letter_budget(l: u32, l0: u32, alpha: u64, h: u64) -> LetterBudget {
    assert!(l >= l0, "slice {l} precedes the base slice {l0}");
    let next = pow4(l + 1) as u64;
    let raw = initial_letters(l0)
        + (next - pow4(l0) as u64) * alpha
        + (l + 1 - l0) as u64 * h.saturating_sub(1) * alpha;
    LetterBudget {
        raw,
        s: 2 * next * alpha,
        valid: (l as u64 + 1) * h.saturating_sub(1) <= next,
    }
}

/// How edges inside a block are revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevealMode {
    /// First look at an in-block edge succeeds with probability `p/2`; a
    /// later look sees the full `p`.
    Staged,
    /// Every look sees `p`.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormParams {
    /// Block size, even.
    pub n: u64,
    pub fan_out: usize,
    pub alpha: u64,
    /// Attempts per slice.
    pub attempts: u64,
    /// Target failure level for the vertical fan-in.
    pub delta: f64,
    pub reveal: RevealMode,
}

impl RenormParams {
    pub fn validate(&self) -> Result<(), RenormError> {
        let bad = |msg: String| Err(RenormError::InvalidParams(msg));
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return bad(format!("block size {} must be even and at least 2", self.n));
        }
        if self.fan_out < 2 {
            return bad(format!("fan-out {} is below 2", self.fan_out));
        }
        if self.alpha == 0 || self.attempts == 0 {
            return bad("alpha and attempts must be positive".into());
        }
        if self.alpha * self.attempts >= self.n {
            return bad(format!(
                "alpha * attempts = {} must stay below n = {}",
                self.alpha * self.attempts,
                self.n
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} is not in (0,1)", self.delta));
        }
        Ok(())
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(2 * self.n).expect("n >= 2")
    }
}

/// Smallest `m` with `P(Bin(m, eps) >= fan_out) >= (1 - delta)^(1/3)`, or
/// `None` when no `m <= limit` works.
pub fn vertical_fan_in(eps: f64, fan_out: usize, delta: f64, limit: u64) -> Option<u64> {
    let target = (1.0 - delta).powf(1.0 / 3.0);
    (fan_out as u64..=limit).find(|&m| binomial_tail(m, eps, fan_out as u64) >= target)
}

/// Sites with the number of letters seen on arrival.
pub type Marked = Vec<(Vertex, u64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Horizontal,
    VerticalDirect,
    VerticalTwoHop,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Horizontal => "horizontal",
            Route::VerticalDirect => "vertical",
            Route::VerticalTwoHop => "two_hop",
        }
    }
}

/// One candidate evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub slice: u32,
    pub attempt: u32,
    pub x: Block,
    pub y: Block,
    pub route: Route,
    pub c1: bool,
    pub c2: Option<bool>,
    pub c3: Option<bool>,
    pub g_len: usize,
    pub r_len: usize,
    pub max_t: Option<u64>,
}

pub const TRACE_CSV_HEADER: &str = "slice,attempt,x1,x2,y1,y2,route,c1,c2,c3,g,r,max_t";

fn flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "-",
    }
}

impl TraceRecord {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.slice,
            self.attempt,
            self.x.x,
            self.x.y,
            self.y.x,
            self.y.y,
            self.route.as_str(),
            flag(Some(self.c1)),
            flag(self.c2),
            flag(self.c3),
            self.g_len,
            self.r_len,
            self.max_t.map_or("-".to_string(), |t| t.to_string())
        )
    }
}

/// Per-block bookkeeping shared by all attempts.
#[derive(Debug, Clone, Default)]
pub struct ExplorationLedger {
    /// `U_x` = union of `R_x` over finished attempts.
    unavailable: HashMap<Block, BTreeSet<Vertex>>,
    /// `R_x` of the running attempt.
    current: HashMap<Block, BTreeSet<Vertex>>,
    history: HashMap<Block, Vec<(u32, BTreeSet<Vertex>)>>,
    probed: HashMap<Block, HashSet<Vertex>>,
    reveals: HashMap<Edge, u32>,
    records: Vec<TraceRecord>,
    max_unavailable: usize,
    letter_probes: u64,
    re_reveals: u64,
}

const EMPTY: &BTreeSet<Vertex> = &BTreeSet::new();

impl ExplorationLedger {
    pub fn unavailable(&self, b: Block) -> &BTreeSet<Vertex> {
        self.unavailable.get(&b).unwrap_or(EMPTY)
    }

    pub fn current(&self, b: Block) -> &BTreeSet<Vertex> {
        self.current.get(&b).unwrap_or(EMPTY)
    }

    /// `R_x^i` for every finished attempt `i` that burned something in `b`.
    pub fn history(&self, b: Block) -> &[(u32, BTreeSet<Vertex>)] {
        self.history.get(&b).map_or(&[], Vec::as_slice)
    }

    pub fn blocks_with_history(&self) -> BTreeSet<Block> {
        self.history.keys().copied().collect()
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn max_unavailable(&self) -> usize {
        self.max_unavailable
    }

    pub fn letter_probes(&self) -> u64 {
        self.letter_probes
    }

    /// Edges looked at more than once.
    pub fn re_reveals(&self) -> u64 {
        self.re_reveals
    }

    pub fn was_probed(&self, b: Block, v: Vertex) -> bool {
        self.probed.get(&b).is_some_and(|s| s.contains(&v))
    }

    fn mark_probed(&mut self, b: Block, v: Vertex) {
        self.probed.entry(b).or_default().insert(v);
    }

    fn probe_letter(&mut self, oracle: &FieldOracle, b: Block, v: Vertex) -> Result<u8, RenormError> {
        if !self.probed.entry(b).or_default().insert(v) {
            return Err(RenormError::LedgerViolation(format!(
                "letter of {v} in block {b} probed twice"
            )));
        }
        self.letter_probes += 1;
        Ok(oracle.vertex_letter(v))
    }

    fn reveal(&mut self, oracle: &FieldOracle, mode: RevealMode, n: u64, e: &Edge) -> bool {
        let count = self.reveals.entry(*e).or_insert(0);
        *count += 1;
        if *count > 1 {
            self.re_reveals += 1;
        }
        let in_block = e.kind() == EdgeKind::Horizontal
            && Block::of_site(e.a(), n) == Block::of_site(e.b(), n);
        if mode == RevealMode::Staged && in_block && *count == 1 {
            oracle.edge_open_staged(e, Stage::First)
        } else {
            oracle.edge_open(e)
        }
    }

    fn burn(&mut self, b: Block, sites: impl IntoIterator<Item = Vertex>) {
        self.current.entry(b).or_default().extend(sites);
    }

    fn close_attempt(&mut self, attempt: u32) {
        let mut done: Vec<_> = self.current.drain().collect();
        done.sort_by_key(|(b, _)| *b);
        for (b, sites) in done {
            self.unavailable.entry(b).or_default().extend(sites.iter().copied());
            self.history.entry(b).or_default().push((attempt, sites));
        }
    }
}

/// Growth probe that routes every look through the ledger.
struct LedgerProbe<'a> {
    oracle: &'a FieldOracle,
    ledger: &'a mut ExplorationLedger,
    mode: RevealMode,
    n: u64,
    block: Block,
    error: Option<RenormError>,
}

impl Probe for LedgerProbe<'_> {
    fn edge_open(&mut self, e: &Edge) -> bool {
        self.ledger.reveal(self.oracle, self.mode, self.n, e)
    }

    fn letter(&mut self, v: Vertex) -> u8 {
        match self.ledger.probe_letter(self.oracle, self.block, v) {
            Ok(b) => b,
            Err(e) => {
                self.error.get_or_insert(e);
                self.oracle.vertex_letter(v)
            }
        }
    }
}

/// Outcome of evaluating one candidate block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub good: bool,
    pub route: Route,
    pub c1: bool,
    pub c2: Option<bool>,
    pub c3: Option<bool>,
    /// `G_x`, empty unless good.
    pub grown: Marked,
    /// `R_x` for this attempt.
    pub burned: BTreeSet<Vertex>,
}

/// Seeds for one slice: the blocks of `C_0` and, per block, one seed set
/// per attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceStart {
    pub slice: u32,
    pub seeds: BTreeMap<Block, Vec<Marked>>,
}

/// Splits `sites` into `h` consecutive runs of `alpha`, the remainder going
/// to the last run.
fn partition(sites: &[(Vertex, u64)], alpha: u64, h: u64) -> Vec<Marked> {
    let a = alpha as usize;
    let mut out: Vec<Marked> = (0..h as usize).map(|i| sites[i * a..(i + 1) * a].to_vec()).collect();
    if let Some(last) = out.last_mut() {
        last.extend_from_slice(&sites[h as usize * a..]);
    }
    out
}

impl SliceStart {
    /// `C_0 = F_{ℓ,2}` with seeds in one half of each block, every seed
    /// having seen `t0` letters.
    pub fn front_halves(l: u32, params: &RenormParams, half: Half, t0: u64) -> Result<Self, RenormError> {
        params.validate()?;
        if params.alpha * params.attempts > params.n / 2 {
            return Err(RenormError::InvalidParams(format!(
                "alpha * attempts = {} exceeds the half-block size {}",
                params.alpha * params.attempts,
                params.n / 2
            )));
        }
        let seeds = front_part(l, 2)
            .into_iter()
            .map(|b| {
                let sites: Marked = b.half(params.n, half).sites().map(|v| (v, t0)).collect();
                (b, partition(&sites, params.alpha, params.attempts))
            })
            .collect();
        Ok(Self { slice: l, seeds })
    }

    /// Seeds for slice `ℓ + 1` from the blocks of a successful attempt.
    pub fn from_gamma(l: u32, gamma: &BTreeMap<Block, Marked>, params: &RenormParams) -> Result<Self, RenormError> {
        let mut seeds = BTreeMap::new();
        for (b, grown) in gamma {
            if (grown.len() as u64) < params.alpha * params.attempts {
                return Err(RenormError::LedgerViolation(format!(
                    "block {b} carries {} sites, fewer than alpha * attempts",
                    grown.len()
                )));
            }
            let mut sorted = grown.clone();
            sorted.sort_by_key(|&(v, _)| v);
            seeds.insert(*b, partition(&sorted, params.alpha, params.attempts));
        }
        Ok(Self { slice: l, seeds })
    }

    pub fn blocks(&self) -> BTreeSet<Block> {
        self.seeds.keys().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptOutcome {
    pub attempt: u32,
    /// Every block in `C`, seeds included, with its `G` set.
    pub good: BTreeMap<Block, Marked>,
    pub dead: BTreeSet<Block>,
    /// Candidates in evaluation order.
    pub order: Vec<Block>,
    /// Good blocks on `F_{ℓ+1,2}`.
    pub gamma: BTreeMap<Block, Marked>,
    pub success: bool,
    pub max_t: Option<u64>,
}

impl AttemptOutcome {
    /// Good blocks found by the exploration, seeds excluded.
    pub fn explored(&self, start: &SliceStart) -> BTreeSet<Block> {
        self.good.keys().filter(|b| !start.seeds.contains_key(b)).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceOutcome {
    pub occurred: bool,
    pub attempts: Vec<AttemptOutcome>,
}

impl SliceOutcome {
    pub fn attempts_used(&self) -> usize {
        self.attempts.len()
    }

    pub fn winner(&self) -> Option<&AttemptOutcome> {
        self.attempts.iter().find(|a| a.success)
    }
}

/// Runs explorations for one word on one configuration.
pub struct Explorer<'w> {
    oracle: FieldOracle,
    params: RenormParams,
    word: &'w Word,
    fan_in: Option<u64>,
    ledger: ExplorationLedger,
}

impl<'w> Explorer<'w> {
    /// The oracle is used under truncation `2n`.
    pub fn new(oracle: &FieldOracle, params: RenormParams, word: &'w Word) -> Result<Self, RenormError> {
        params.validate()?;
        let fan_in = vertical_fan_in(oracle.seq().epsilon(), params.fan_out, params.delta, 100_000);
        Ok(Self {
            oracle: oracle.with_truncation(params.truncation()),
            params,
            word,
            fan_in,
            ledger: ExplorationLedger::default(),
        })
    }

    pub fn ledger(&self) -> &ExplorationLedger {
        &self.ledger
    }

    pub fn params(&self) -> &RenormParams {
        &self.params
    }

    pub fn fan_in(&self) -> Option<u64> {
        self.fan_in
    }

    fn letter_at(&self, i: u64) -> Result<u8, RenormError> {
        let idx = i as usize;
        self.word.get(idx).ok_or(RenormError::WordTooShort {
            needed: idx,
            len: self.word.len(),
        })
    }

    fn u_bound(&self, attempt: u32) -> usize {
        (attempt as usize - 1) * self.params.fan_out * (self.params.alpha * self.params.attempts + 2) as usize
    }

    /// Evaluates block `x` from its good predecessor `y` with seed set `g_y`.
    pub fn evaluate_candidate(
        &mut self,
        slice: u32,
        attempt: u32,
        x: Block,
        y: Block,
        g_y: &[(Vertex, u64)],
    ) -> Result<Evaluation, RenormError> {
        let n = self.params.n;
        let fan_out = self.params.fan_out;
        let horizontal = x == y.step(1, 0);
        if !horizontal && x != y.step(0, 1) {
            return Err(RenormError::LedgerViolation(format!(
                "{x} is not an oriented successor of {y}"
            )));
        }
        if (g_y.len() as u64) < self.params.alpha {
            return Err(RenormError::LedgerViolation(format!(
                "parent {y} carries {} sites, fewer than alpha",
                g_y.len()
            )));
        }
        let u_x = self.ledger.unavailable(x).clone();
        if u_x.len() > self.u_bound(attempt) {
            return Err(RenormError::LedgerViolation(format!(
                "|U| = {} at {x} exceeds {}",
                u_x.len(),
                self.u_bound(attempt)
            )));
        }
        self.ledger.max_unavailable = self.ledger.max_unavailable.max(u_x.len());
        let free: Vec<Vertex> = x.segment(n).sites().filter(|s| !u_x.contains(s)).collect();

        // (site x_k, intermediate hop, t(y(x_k)))
        let mut picks: Vec<(Vertex, Option<Vertex>, u64)> = Vec::with_capacity(fan_out);
        let route = if horizontal {
            for &s in &free {
                for &(g, t) in g_y {
                    let e = canonical_edge(g, s).expect("same row");
                    if self.ledger.reveal(&self.oracle, self.params.reveal, n, &e) {
                        picks.push((s, None, t));
                        break;
                    }
                }
                if picks.len() == fan_out {
                    break;
                }
            }
            Route::Horizontal
        } else {
            let below: Vec<(Vertex, u64)> = g_y
                .iter()
                .filter(|(g, _)| x.segment(n).contains(g.offset(0, 1)) && !u_x.contains(&g.offset(0, 1)))
                .copied()
                .collect();
            if self.fan_in.is_some_and(|m| below.len() as u64 >= m) {
                for &(g, t) in &below {
                    let e = canonical_edge(g, g.offset(0, 1)).expect("vertical");
                    if self.ledger.reveal(&self.oracle, self.params.reveal, n, &e) {
                        picks.push((g.offset(0, 1), None, t));
                        if picks.len() == fan_out {
                            break;
                        }
                    }
                }
                Route::VerticalDirect
            } else {
                for &s in &free {
                    let w = s.offset(0, -1);
                    if g_y.iter().any(|&(g, _)| g == w)
                        || self.ledger.unavailable(y).contains(&w)
                        || self.ledger.current(y).contains(&w)
                        || self.ledger.was_probed(y, w)
                    {
                        continue;
                    }
                    let mut parent = None;
                    for &(g, t) in g_y {
                        let e = canonical_edge(g, w).expect("same row");
                        if self.ledger.reveal(&self.oracle, self.params.reveal, n, &e) {
                            parent = Some(t);
                            break;
                        }
                    }
                    if let Some(t) = parent {
                        let up = canonical_edge(w, s).expect("vertical");
                        if self.ledger.reveal(&self.oracle, self.params.reveal, n, &up) {
                            picks.push((s, Some(w), t));
                            if picks.len() == fan_out {
                                break;
                            }
                        }
                    }
                }
                Route::VerticalTwoHop
            }
        };

        let mut eval = Evaluation {
            good: false,
            route,
            c1: picks.len() == fan_out,
            c2: None,
            c3: None,
            grown: Vec::new(),
            burned: BTreeSet::new(),
        };
        if !eval.c1 {
            return Ok(self.finish(slice, attempt, x, y, eval));
        }

        let mut chosen = None;
        for &(s, hop, t) in &picks {
            let ok = match hop {
                None => self.ledger.probe_letter(&self.oracle, x, s)? == self.letter_at(t + 1)?,
                Some(w) => {
                    self.ledger.probe_letter(&self.oracle, y, w)? == self.letter_at(t + 1)?
                        && self.ledger.probe_letter(&self.oracle, x, s)? == self.letter_at(t + 2)?
                }
            };
            if ok {
                chosen = Some((s, if hop.is_some() { t + 2 } else { t + 1 }));
                break;
            }
        }
        if route == Route::VerticalTwoHop {
            let hops: Vec<Vertex> = picks.iter().filter_map(|p| p.1).collect();
            self.ledger.burn(y, hops);
        }
        let sites: BTreeSet<Vertex> = picks.iter().map(|p| p.0).collect();
        eval.c2 = Some(chosen.is_some());
        let Some((first, t_first)) = chosen else {
            eval.burned = sites;
            return Ok(self.finish(slice, attempt, x, y, eval));
        };

        let mult = if x.sum() == pow4(slice + 1) - 1 {
            self.params.attempts
        } else {
            1
        };
        let gp = GrowthParams {
            fan_out,
            alpha: self.params.alpha,
            mult,
        };
        let mut burned1 = sites;
        burned1.extend(u_x.iter().copied());
        let start = GrowthStart {
            first,
            t_first,
            burned: burned1,
        };
        let mut probe = LedgerProbe {
            oracle: &self.oracle,
            ledger: &mut self.ledger,
            mode: self.params.reveal,
            n,
            block: x,
            error: None,
        };
        let trace = growth::run_growth(&gp, &start, &x.segment(n), self.word, &mut probe).map_err(|e| match e {
            GrowthError::WordTooShort { needed, len } => RenormError::WordTooShort { needed, len },
            other => RenormError::Growth(other),
        })?;
        if let Some(e) = probe.error {
            return Err(e);
        }
        eval.c3 = Some(trace.success);
        eval.good = trace.success;
        eval.burned = trace.burned;
        if trace.success {
            if (trace.grown.len() as u64) < gp.threshold() {
                return Err(RenormError::LedgerViolation(format!(
                    "good block {x} carries {} < {} sites",
                    trace.grown.len(),
                    gp.threshold()
                )));
            }
            eval.grown = trace.grown;
        }
        Ok(self.finish(slice, attempt, x, y, eval))
    }

    fn finish(&mut self, slice: u32, attempt: u32, x: Block, y: Block, eval: Evaluation) -> Evaluation {
        self.ledger.burn(x, eval.burned.iter().copied());
        self.ledger.records.push(TraceRecord {
            slice,
            attempt,
            x,
            y,
            route: eval.route,
            c1: eval.c1,
            c2: eval.c2,
            c3: eval.c3,
            g_len: eval.grown.len(),
            r_len: eval.burned.len(),
            max_t: eval.grown.iter().map(|&(_, t)| t).max(),
        });
        eval
    }

    /// Attempt `i` (1-based) on the slice of `start`.
    pub fn run_attempt(&mut self, start: &SliceStart, attempt: u32) -> Result<AttemptOutcome, RenormError> {
        let l = start.slice;
        let i = attempt as usize - 1;
        let mut good: BTreeMap<Block, Marked> = BTreeMap::new();
        for (b, sets) in &start.seeds {
            let set = sets.get(i).ok_or_else(|| {
                RenormError::InvalidParams(format!("block {b} has no seed set for attempt {attempt}"))
            })?;
            if (set.len() as u64) < self.params.alpha {
                return Err(RenormError::LedgerViolation(format!(
                    "seed set of {b} has {} < alpha sites",
                    set.len()
                )));
            }
            for &(v, _) in set {
                self.ledger.mark_probed(*b, v);
            }
            good.insert(*b, set.clone());
        }
        let mut dead = BTreeSet::new();
        let mut order = Vec::new();
        let mut frontier: BTreeSet<Block> = good
            .keys()
            .flat_map(|b| [b.step(1, 0), b.step(0, 1)])
            .filter(|b| in_slice(l, *b) && !good.contains_key(b))
            .collect();

        while let Some(x) = frontier.pop_first() {
            let y = if good.contains_key(&x.step(-1, 0)) {
                x.step(-1, 0)
            } else {
                x.step(0, -1)
            };
            let g_y = good[&y].clone();
            let eval = self.evaluate_candidate(l, attempt, x, y, &g_y)?;
            order.push(x);
            if eval.good {
                good.insert(x, eval.grown);
                for next in [x.step(1, 0), x.step(0, 1)] {
                    if in_slice(l, next) && !good.contains_key(&next) && !dead.contains(&next) {
                        frontier.insert(next);
                    }
                }
            } else {
                dead.insert(x);
            }
        }
        self.ledger.close_attempt(attempt);

        if good.keys().any(|b| dead.contains(b)) {
            return Err(RenormError::LedgerViolation("a block is both good and dead".into()));
        }
        let targets: BTreeSet<Block> = front_part(l + 1, 2).into_iter().collect();
        let gamma: BTreeMap<Block, Marked> = good
            .iter()
            .filter(|(b, _)| targets.contains(b))
            .map(|(b, g)| (*b, g.clone()))
            .collect();
        let max_t = good
            .iter()
            .filter(|(b, _)| !start.seeds.contains_key(b))
            .flat_map(|(_, g)| g.iter().map(|&(_, t)| t))
            .max();
        Ok(AttemptOutcome {
            attempt,
            success: gamma.len() as i64 >= pow4(l),
            good,
            dead,
            order,
            gamma,
            max_t,
        })
    }

    /// Up to `h` attempts, stopping at the first success.
    pub fn run_slice(&mut self, start: &SliceStart) -> Result<SliceOutcome, RenormError> {
        let mut attempts = Vec::new();
        for attempt in 1..=self.params.attempts as u32 {
            let outcome = self.run_attempt(start, attempt)?;
            let done = outcome.success;
            attempts.push(outcome);
            if done {
                break;
            }
        }
        Ok(SliceOutcome {
            occurred: attempts.last().is_some_and(|a| a.success),
            attempts,
        })
    }
}
