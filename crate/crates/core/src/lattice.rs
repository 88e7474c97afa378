//! Coordinates, edges and connection-probability families of the anisotropic
//! long-range lattice on Z².
//!
//! Vertical edges have unit length and open with probability `epsilon`.
//! Horizontal edges of length `i` open with probability `p_i`, and the
//! `K`-truncated model forces every horizontal edge longer than `K` closed.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::kv::{join_list, KvError, KvMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("{0} and {0} are the same vertex")]
    SameVertex(Vertex),
    #[error("{0} and {1} are not joined by a lattice edge")]
    NotLatticeEdge(Vertex, Vertex),
    #[error("invalid probability sequence: {0}")]
    InvalidSequence(String),
    #[error("truncation must be at least 1")]
    InvalidTruncation,
    #[error(transparent)]
    Config(#[from] KvError),
}

/// A site of Z².
///
/// Ordered lexicographically by `(y, x)`; this is the canonical vertex order
/// used to orient edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub const ORIGIN: Vertex = Vertex::new(0, 0);

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Vertical,
    Horizontal,
}

/// An unordered lattice edge stored with its endpoints in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: Vertex,
    b: Vertex,
    kind: EdgeKind,
    length: u64,
}

impl Edge {
    pub fn a(&self) -> Vertex {
        self.a
    }

    pub fn b(&self) -> Vertex {
        self.b
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// The endpoint that is not `v`, or `None` if `v` is not an endpoint.
    pub fn other(&self, v: Vertex) -> Option<Vertex> {
        if v == self.a {
            Some(self.b)
        } else if v == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// Builds the edge joining `u` and `v`, identical for `(u, v)` and `(v, u)`.
pub fn canonical_edge(u: Vertex, v: Vertex) -> Result<Edge, LatticeError> {
    if u == v {
        return Err(LatticeError::SameVertex(u));
    }
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    if a.x == b.x {
        if (a.y - b.y).abs() != 1 {
            return Err(LatticeError::NotLatticeEdge(u, v));
        }
        Ok(Edge {
            a,
            b,
            kind: EdgeKind::Vertical,
            length: 1,
        })
    } else if a.y == b.y {
        Ok(Edge {
            a,
            b,
            kind: EdgeKind::Horizontal,
            length: a.x.abs_diff(b.x),
        })
    } else {
        Err(LatticeError::NotLatticeEdge(u, v))
    }
}

/// Largest horizontal edge length that may be open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Truncation(u64);

impl Truncation {
    pub fn new(k: u64) -> Result<Self, LatticeError> {
        if k == 0 {
            Err(LatticeError::InvalidTruncation)
        } else {
            Ok(Self(k))
        }
    }

    pub fn k(self) -> u64 {
        self.0
    }

    /// `p_{K,i}`: the sequence value for `i <= K`, zero beyond.
    pub fn apply(self, length: u64, p: f64) -> f64 {
        if length <= self.0 {
            p
        } else {
            0.0
        }
    }
}

/// Shapes of the horizontal connection-probability family.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqKind {
    /// `p_i = (i ln i)^{-1}` for `i >= i0`; `prefix[i - 1]` for `i < i0`.
    LogInverse { i0: u64, prefix: Vec<f64> },
    /// `q_i = scale / (i * ln(i) * ln(ln(i)) * ...)` with `depth` iterated
    /// logarithms for `i >= i0`, clamped to 1; `prefix[i - 1]` below `i0`.
    IteratedLog {
        depth: u32,
        scale: f64,
        i0: u64,
        prefix: Vec<f64>,
    },
    /// `p_i = delta` on a periodic support, zero elsewhere. The support lists
    /// lengths in `1..=period` with `period = max(support)`; it repeats with
    /// that period so `limsup p_i = delta`.
    LimSupTable { delta: f64, support: Vec<u64> },
    /// `p_i = table[i - 1]`, zero past the end of the table.
    Explicit(Vec<f64>),
    /// `p_i = value` for every `i`.
    Constant(f64),
}

/// Horizontal probabilities `{p_i}` together with the vertical probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSequence {
    kind: SeqKind,
    epsilon: f64,
}

fn check_prob(name: &str, v: f64) -> Result<(), LatticeError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(LatticeError::InvalidSequence(format!(
            "{name} = {v} is not in [0,1]"
        )))
    }
}

/// `log_(1)(x) = ln x`, `log_(j+1)(x) = ln log_(j)(x)`; the product of the
/// first `depth` of them, or `None` when one is not positive.
fn iterated_log_product(i: u64, depth: u32) -> Option<f64> {
    let mut current = i as f64;
    let mut product = 1.0;
    for _ in 0..depth {
        current = current.ln();
        if current.is_nan() || current <= 0.0 {
            return None;
        }
        product *= current;
    }
    Some(product)
}

impl ProbSequence {
    pub fn new(kind: SeqKind, epsilon: f64) -> Result<Self, LatticeError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(LatticeError::InvalidSequence(format!(
                "epsilon = {epsilon} is not in (0,1]"
            )));
        }
        match &kind {
            SeqKind::LogInverse { i0, prefix } => {
                if *i0 < 2 {
                    return Err(LatticeError::InvalidSequence(
                        "log-inverse needs i0 >= 2".into(),
                    ));
                }
                Self::check_prefix(*i0, prefix)?;
            }
            SeqKind::IteratedLog {
                depth,
                scale,
                i0,
                prefix,
            } => {
                if *depth == 0 {
                    return Err(LatticeError::InvalidSequence(
                        "iterated-log needs depth >= 1".into(),
                    ));
                }
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(LatticeError::InvalidSequence(format!(
                        "iterated-log scale {scale} must be positive"
                    )));
                }
                if *i0 < 2 || iterated_log_product(*i0, *depth).is_none() {
                    return Err(LatticeError::InvalidSequence(format!(
                        "iterated logarithm of depth {depth} is not positive at i0 = {i0}"
                    )));
                }
                Self::check_prefix(*i0, prefix)?;
            }
            SeqKind::LimSupTable { delta, support } => {
                check_prob("delta", *delta)?;
                if support.is_empty() || support.contains(&0) {
                    return Err(LatticeError::InvalidSequence(
                        "limsup support must be a nonempty set of positive lengths".into(),
                    ));
                }
            }
            SeqKind::Explicit(table) => {
                for (idx, v) in table.iter().enumerate() {
                    check_prob(&format!("p_{}", idx + 1), *v)?;
                }
            }
            SeqKind::Constant(v) => check_prob("p", *v)?,
        }
        Ok(Self { kind, epsilon })
    }

    fn check_prefix(i0: u64, prefix: &[f64]) -> Result<(), LatticeError> {
        if prefix.len() as u64 != i0 - 1 {
            return Err(LatticeError::InvalidSequence(format!(
                "prefix must give p_1..p_{} ({} values), got {}",
                i0 - 1,
                i0 - 1,
                prefix.len()
            )));
        }
        for (idx, v) in prefix.iter().enumerate() {
            check_prob(&format!("p_{}", idx + 1), *v)?;
        }
        Ok(())
    }

    /// `(i ln i)^{-1}` from `i = 2` on, with `p_1 = 0.5`.
    pub fn log_inverse(epsilon: f64) -> Result<Self, LatticeError> {
        Self::new(
            SeqKind::LogInverse {
                i0: 2,
                prefix: vec![0.5],
            },
            epsilon,
        )
    }

    pub fn constant(p: f64, epsilon: f64) -> Result<Self, LatticeError> {
        Self::new(SeqKind::Constant(p), epsilon)
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `p_i` for `i >= 1`; `p_0` is defined as zero.
    pub fn p(&self, i: u64) -> f64 {
        if i == 0 {
            return 0.0;
        }
        match &self.kind {
            SeqKind::LogInverse { i0, prefix } => {
                if i < *i0 {
                    prefix[(i - 1) as usize]
                } else {
                    let x = i as f64;
                    (1.0 / (x * x.ln())).min(1.0)
                }
            }
            SeqKind::IteratedLog {
                depth,
                scale,
                i0,
                prefix,
            } => {
                if i < *i0 {
                    prefix[(i - 1) as usize]
                } else {
                    let product = iterated_log_product(i, *depth)
                        .expect("iterated log positive from i0 on");
                    (scale / (i as f64 * product)).min(1.0)
                }
            }
            SeqKind::LimSupTable { delta, support } => {
                let period = *support.iter().max().expect("nonempty support");
                let residue = (i - 1) % period + 1;
                if support.contains(&residue) {
                    *delta
                } else {
                    0.0
                }
            }
            SeqKind::Explicit(table) => table.get((i - 1) as usize).copied().unwrap_or(0.0),
            SeqKind::Constant(v) => *v,
        }
    }

    /// First `k >= from` (and `<= limit`) with `p_k > threshold`.
    ///
    /// Picks the truncation for the slab argument under a positive limsup:
    /// the slab thickness `K_1` is enlarged to some `K_2` whose own
    /// horizontal probability stays above the threshold.
    pub fn first_index_above(&self, from: u64, threshold: f64, limit: u64) -> Option<u64> {
        (from.max(1)..=limit).find(|&k| self.p(k) > threshold)
    }

    pub fn to_kv(&self, trunc: Truncation) -> KvMap {
        let mut map = KvMap::new();
        map.insert("seq.epsilon", self.epsilon);
        map.insert("seq.K", trunc.k());
        match &self.kind {
            SeqKind::LogInverse { i0, prefix } => {
                map.insert("seq.kind", "log_inverse");
                map.insert("seq.i0", i0);
                map.insert("seq.prefix", join_list(prefix));
            }
            SeqKind::IteratedLog {
                depth,
                scale,
                i0,
                prefix,
            } => {
                map.insert("seq.kind", "iterated_log");
                map.insert("seq.depth", depth);
                map.insert("seq.scale", scale);
                map.insert("seq.i0", i0);
                map.insert("seq.prefix", join_list(prefix));
            }
            SeqKind::LimSupTable { delta, support } => {
                map.insert("seq.kind", "limsup_table");
                map.insert("seq.delta", delta);
                map.insert("seq.support", join_list(support));
            }
            SeqKind::Explicit(table) => {
                map.insert("seq.kind", "explicit");
                map.insert("seq.table", join_list(table));
            }
            SeqKind::Constant(v) => {
                map.insert("seq.kind", "constant");
                map.insert("seq.value", v);
            }
        }
        map
    }

    pub fn from_kv(map: &KvMap) -> Result<(Self, Truncation), LatticeError> {
        let epsilon: f64 = map.require("seq.epsilon")?;
        let trunc = Truncation::new(map.require("seq.K")?)?;
        let kind = match map.require_str("seq.kind")? {
            "log_inverse" => SeqKind::LogInverse {
                i0: map.get_or("seq.i0", 2)?,
                prefix: map.get_list("seq.prefix")?.unwrap_or_else(|| vec![0.5]),
            },
            "iterated_log" => SeqKind::IteratedLog {
                depth: map.require("seq.depth")?,
                scale: map.require("seq.scale")?,
                i0: map.require("seq.i0")?,
                prefix: map.get_list("seq.prefix")?.unwrap_or_default(),
            },
            "limsup_table" => SeqKind::LimSupTable {
                delta: map.require("seq.delta")?,
                support: map.get_list("seq.support")?.unwrap_or_default(),
            },
            "explicit" => SeqKind::Explicit(map.get_list("seq.table")?.unwrap_or_default()),
            "constant" => SeqKind::Constant(map.require("seq.value")?),
            other => {
                return Err(LatticeError::InvalidSequence(format!(
                    "unknown sequence kind {other:?}"
                )))
            }
        };
        Ok((Self::new(kind, epsilon)?, trunc))
    }
}

/// Probability that `e` is open in the `K`-truncated model.
pub fn edge_probability(seq: &ProbSequence, trunc: Truncation, e: &Edge) -> f64 {
    match e.kind() {
        EdgeKind::Vertical => seq.epsilon(),
        EdgeKind::Horizontal => trunc.apply(e.length(), seq.p(e.length())),
    }
}

/// A closed integer rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Window {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Self {
        assert!(x_min <= x_max && y_min <= y_max, "empty window");
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (self.x_min..=self.x_max).contains(&v.x) && (self.y_min..=self.y_max).contains(&v.y)
    }

    pub fn width(&self) -> u64 {
        self.x_min.abs_diff(self.x_max) + 1
    }

    pub fn height(&self) -> u64 {
        self.y_min.abs_diff(self.y_max) + 1
    }

    pub fn len(&self) -> u64 {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All vertices in canonical order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (self.y_min..=self.y_max)
            .flat_map(move |y| (self.x_min..=self.x_max).map(move |x| Vertex::new(x, y)))
    }
}

/// Every `u` in `window` joined to `v` by an edge of the `K`-truncated
/// lattice, in canonical order.
pub fn neighbors_within(v: Vertex, trunc: Truncation, window: &Window) -> Vec<Vertex> {
    let k = trunc.k().min(window.width()) as i64;
    let mut out = Vec::new();
    let below = v.offset(0, -1);
    if window.contains(below) {
        out.push(below);
    }
    for d in (1..=k).rev() {
        let u = v.offset(-d, 0);
        if window.contains(u) {
            out.push(u);
        }
    }
    for d in 1..=k {
        let u = v.offset(d, 0);
        if window.contains(u) {
            out.push(u);
        }
    }
    let above = v.offset(0, 1);
    if window.contains(above) {
        out.push(above);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn canonical_edge_examples() {
        let e = canonical_edge(v(3, 2), v(0, 2)).unwrap();
        assert_eq!(e.kind(), EdgeKind::Horizontal);
        assert_eq!(e.length(), 3);
        assert_eq!((e.a(), e.b()), (v(0, 2), v(3, 2)));

        let e = canonical_edge(v(5, 1), v(5, 2)).unwrap();
        assert_eq!(e.kind(), EdgeKind::Vertical);
        assert_eq!(e.length(), 1);

        assert_eq!(
            canonical_edge(v(0, 0), v(1, 1)),
            Err(LatticeError::NotLatticeEdge(v(0, 0), v(1, 1)))
        );
        assert!(canonical_edge(v(0, 0), v(0, 2)).is_err());
        assert_eq!(
            canonical_edge(v(4, 4), v(4, 4)),
            Err(LatticeError::SameVertex(v(4, 4)))
        );
    }

    #[test]
    fn canonical_edge_symmetric_on_window() {
        let window = Window::new(0, 49, 0, 49);
        let trunc = Truncation::new(49).unwrap();
        for u in window.vertices().step_by(7) {
            for w in neighbors_within(u, trunc, &window) {
                assert_eq!(canonical_edge(u, w).unwrap(), canonical_edge(w, u).unwrap());
            }
        }
    }

    #[test]
    fn edge_probability_examples() {
        let seq = ProbSequence::log_inverse(0.3).unwrap();
        let trunc = Truncation::new(10).unwrap();
        let vert = canonical_edge(v(0, 0), v(0, 1)).unwrap();
        assert_eq!(edge_probability(&seq, trunc, &vert), 0.3);

        let h2 = canonical_edge(v(0, 0), v(2, 0)).unwrap();
        let expected = 1.0 / (2.0 * 2f64.ln());
        assert!((edge_probability(&seq, trunc, &h2) - expected).abs() < 1e-15);
        assert!((expected - 0.72135).abs() < 1e-5);

        let long = canonical_edge(v(0, 0), v(11, 0)).unwrap();
        assert_eq!(edge_probability(&seq, trunc, &long), 0.0);
    }

    #[test]
    fn log_inverse_meets_hypothesis() {
        let seq = ProbSequence::log_inverse(1.0).unwrap();
        for i in 2..5000u64 {
            let x = i as f64;
            assert!(seq.p(i) >= 1.0 / (x * x.ln()) - 1e-15);
        }
        assert_eq!(seq.p(1), 0.5);
    }

    #[test]
    fn iterated_log_matches_formula() {
        let seq = ProbSequence::new(
            SeqKind::IteratedLog {
                depth: 2,
                scale: 2.0,
                i0: 3,
                prefix: vec![0.5, 0.5],
            },
            1.0,
        )
        .unwrap();
        let x = 100f64;
        let expected = 2.0 / (x * x.ln() * x.ln().ln());
        assert!((seq.p(100) - expected).abs() < 1e-15);
        assert!(ProbSequence::new(
            SeqKind::IteratedLog {
                depth: 3,
                scale: 1.0,
                i0: 3,
                prefix: vec![0.1, 0.1],
            },
            1.0
        )
        .is_err());
    }

    #[test]
    fn limsup_table_repeats() {
        let seq = ProbSequence::new(
            SeqKind::LimSupTable {
                delta: 0.2,
                support: vec![3, 5],
            },
            1.0,
        )
        .unwrap();
        let on: Vec<u64> = (1..=15).filter(|&i| seq.p(i) > 0.0).collect();
        assert_eq!(on, vec![3, 5, 8, 10, 13, 15]);
        assert_eq!(seq.first_index_above(11, 0.1, 100), Some(13));
        assert_eq!(seq.first_index_above(11, 0.3, 100), None);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(ProbSequence::constant(1.5, 0.5).is_err());
        assert!(ProbSequence::constant(0.5, 0.0).is_err());
        assert!(ProbSequence::new(
            SeqKind::LogInverse {
                i0: 3,
                prefix: vec![0.5]
            },
            0.5
        )
        .is_err());
        assert!(Truncation::new(0).is_err());
    }

    #[test]
    fn neighbors_examples() {
        let trunc = Truncation::new(2).unwrap();
        let row = Window::new(0, 4, 0, 0);
        assert_eq!(neighbors_within(v(0, 0), trunc, &row), vec![v(1, 0), v(2, 0)]);

        let plane = Window::new(-3, 3, -3, 3);
        let near = neighbors_within(v(0, 0), Truncation::new(1).unwrap(), &plane);
        assert_eq!(near, vec![v(0, -1), v(-1, 0), v(1, 0), v(0, 1)]);

        let got = neighbors_within(v(2, 0), Truncation::new(3).unwrap(), &Window::new(0, 5, 0, 1));
        let mut expected = vec![v(0, 0), v(1, 0), v(3, 0), v(4, 0), v(5, 0), v(2, 1)];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn config_round_trip_is_exact() {
        let seqs = vec![
            ProbSequence::log_inverse(0.1).unwrap(),
            ProbSequence::new(
                SeqKind::IteratedLog {
                    depth: 2,
                    scale: 0.7,
                    i0: 3,
                    prefix: vec![0.3, 0.123456789012345],
                },
                1.0,
            )
            .unwrap(),
            ProbSequence::new(
                SeqKind::LimSupTable {
                    delta: 1.0 / 3.0,
                    support: vec![2, 7],
                },
                0.9,
            )
            .unwrap(),
            ProbSequence::new(SeqKind::Explicit(vec![0.1, 0.2, 1e-300]), 0.25).unwrap(),
            ProbSequence::constant(0.0, 1.0).unwrap(),
        ];
        for seq in seqs {
            let trunc = Truncation::new(17).unwrap();
            let text = seq.to_kv(trunc).to_string();
            let parsed = KvMap::parse(&text).unwrap();
            let (back, t) = ProbSequence::from_kv(&parsed).unwrap();
            assert_eq!(back, seq);
            assert_eq!(t, trunc);
        }
    }

    proptest! {
        #[test]
        fn edge_probability_monotone_in_k(len in 1u64..200, k1 in 1u64..200, k2 in 1u64..200) {
            let seq = ProbSequence::log_inverse(0.5).unwrap();
            let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            let e = canonical_edge(v(0, 0), v(len as i64, 0)).unwrap();
            let p_lo = edge_probability(&seq, Truncation::new(lo).unwrap(), &e);
            let p_hi = edge_probability(&seq, Truncation::new(hi).unwrap(), &e);
            prop_assert!(p_lo <= p_hi);
        }

        #[test]
        fn canonical_edge_ignores_argument_order(x in -50i64..50, y in -50i64..50, d in 1i64..30, vertical in any::<bool>()) {
            let u = v(x, y);
            let w = if vertical { v(x, y + 1) } else { v(x + d, y) };
            prop_assert_eq!(canonical_edge(u, w).unwrap(), canonical_edge(w, u).unwrap());
        }
    }
}
