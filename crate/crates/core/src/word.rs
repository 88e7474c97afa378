//! Deciding whether a finite word is seen from a vertex.
//!
//! A word `ξ_1 … ξ_m` is seen from `v` when some self-avoiding path
//! `v = v_0, v_1, …, v_m` uses open edges and has `η(v_i) = ξ_i`. The letter
//! of `v` itself plays no role. All searches run on a finite window.
//!
//! The exact engine is a backtracking search. It is pruned by the relaxed
//! engine, which drops the distinctness constraint and therefore only
//! over-approximates.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lattice::{canonical_edge, neighbors_within, Vertex, Window};
use crate::sampler::{uniform, Configuration, Stream};

/// Longest word the exact engine accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 24;

/// Longest word length `words_seen_set` enumerates by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word of length {len} exceeds the search cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("vertex {0} lies outside the search window")]
    OutsideWindow(Vertex),
    #[error("invalid letter {0:?}; words are strings over {{0,1}}")]
    InvalidLetter(char),
}

/// A finite binary word, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        assert!(letters.iter().all(|&b| b <= 1), "letters are 0 or 1");
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn constant(letter: u8, len: usize) -> Self {
        Self::new(vec![letter; len])
    }

    /// The `len`-letter word whose first letter is the most significant bit
    /// of `bits`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self(
            (0..len)
                .map(|i| ((bits >> (len - 1 - i)) & 1) as u8)
                .collect(),
        )
    }

    /// All `2^len` words of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64);
        (0..1u64 << len).map(move |bits| Word::from_bits(bits, len))
    }

    /// Fair coin letters drawn from the word stream of `seed`.
    pub fn random(seed: u64, len: usize) -> Self {
        Self(
            (0..len as u64)
                .map(|i| u8::from(uniform(seed, Stream::Word, &[i]) < 0.5))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter `ξ_i`, 1-based.
    pub fn get(&self, i: usize) -> Option<u8> {
        if i == 0 {
            None
        } else {
            self.0.get(i - 1).copied()
        }
    }

    /// Letter `ξ_i`; panics when out of range.
    pub fn letter(&self, i: usize) -> u8 {
        self.get(i)
            .unwrap_or_else(|| panic!("letter {i} of a {}-letter word", self.len()))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn prefix(&self, m: usize) -> Word {
        Word(self.0[..m.min(self.0.len())].to_vec())
    }

    pub fn flipped(&self) -> Word {
        Word(self.0.iter().map(|b| 1 - b).collect())
    }

    pub fn push(&mut self, letter: u8) {
        assert!(letter <= 1);
        self.0.push(letter);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(WordError::InvalidLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Who asks, what word, and where to look.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeenQuery {
    pub origin: Vertex,
    pub word: Word,
    pub window: Window,
}

/// The open subgraph of a configuration restricted to a window, with
/// letters, in compact index form.
#[derive(Debug, Clone)]
pub struct LocalGraph {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, u32>,
    adj: Vec<Vec<u32>>,
    letters: Vec<u8>,
}

impl LocalGraph {
    pub fn build<C: Configuration + ?Sized>(config: &C, window: &Window) -> Self {
        let vertices: Vec<Vertex> = window.vertices().collect();
        let index: HashMap<Vertex, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        let trunc = config.truncation();
        for (i, &v) in vertices.iter().enumerate() {
            for u in neighbors_within(v, trunc, window) {
                let e = canonical_edge(v, u).expect("window neighbors are lattice edges");
                if config.is_open(&e) {
                    adj[i].push(index[&u]);
                }
            }
        }
        let letters = vertices.iter().map(|&v| config.letter(v)).collect();
        Self {
            vertices,
            index,
            adj,
            letters,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, idx: u32) -> Vertex {
        self.vertices[idx as usize]
    }

    pub fn index_of(&self, v: Vertex) -> Option<u32> {
        self.index.get(&v).copied()
    }

    pub fn neighbors(&self, idx: u32) -> &[u32] {
        &self.adj[idx as usize]
    }

    pub fn letter(&self, idx: u32) -> u8 {
        self.letters[idx as usize]
    }

    fn require(&self, v: Vertex) -> Result<u32, WordError> {
        self.index_of(v).ok_or(WordError::OutsideWindow(v))
    }

    /// `table[i][v]`: from `v` after `i` letters, the rest of `word` can be
    /// spelled by some walk (revisits allowed).
    fn completion_table(&self, word: &Word) -> Vec<Vec<bool>> {
        let m = word.len();
        let n = self.len();
        let mut table = vec![vec![false; n]; m + 1];
        table[m].iter_mut().for_each(|b| *b = true);
        for i in (0..m).rev() {
            let want = word.letter(i + 1);
            let (head, tail) = table.split_at_mut(i + 1);
            let next = &tail[0];
            for (v, cell) in head[i].iter_mut().enumerate() {
                *cell = self.adj[v]
                    .iter()
                    .any(|&u| self.letters[u as usize] == want && next[u as usize]);
            }
        }
        table
    }

    /// Relaxed engine: walks may revisit vertices.
    pub fn sees_relaxed(&self, origin: Vertex, word: &Word) -> Result<bool, WordError> {
        let start = self.require(origin)?;
        let mut frontier = vec![false; self.len()];
        frontier[start as usize] = true;
        for i in 1..=word.len() {
            frontier = self.step_frontier(&frontier, word.letter(i));
            if !frontier.iter().any(|&b| b) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn step_frontier(&self, frontier: &[bool], letter: u8) -> Vec<bool> {
        let mut next = vec![false; self.len()];
        for (v, _) in frontier.iter().enumerate().filter(|(_, &on)| on) {
            for &u in &self.adj[v] {
                if self.letters[u as usize] == letter {
                    next[u as usize] = true;
                }
            }
        }
        next
    }

    /// A self-avoiding path from `origin` spelling `word`, if one exists.
    pub fn witness_path(&self, origin: Vertex, word: &Word) -> Result<Option<Vec<Vertex>>, WordError> {
        let start = self.require(origin)?;
        let table = self.completion_table(word);
        if !table[0][start as usize] {
            return Ok(None);
        }
        let mut visited = vec![false; self.len()];
        visited[start as usize] = true;
        let mut path = vec![start];
        if self.extend(word, &table, &mut visited, &mut path) {
            Ok(Some(path.into_iter().map(|i| self.vertex(i)).collect()))
        } else {
            Ok(None)
        }
    }

    fn extend(
        &self,
        word: &Word,
        table: &[Vec<bool>],
        visited: &mut [bool],
        path: &mut Vec<u32>,
    ) -> bool {
        let depth = path.len() - 1;
        if depth == word.len() {
            return true;
        }
        let want = word.letter(depth + 1);
        let v = *path.last().expect("path holds the origin");
        for &u in &self.adj[v as usize] {
            let ui = u as usize;
            if visited[ui] || self.letters[ui] != want || !table[depth + 1][ui] {
                continue;
            }
            visited[ui] = true;
            path.push(u);
            if self.extend(word, table, visited, path) {
                return true;
            }
            path.pop();
            visited[ui] = false;
        }
        false
    }

    pub fn sees_exact(&self, origin: Vertex, word: &Word) -> Result<bool, WordError> {
        Ok(self.witness_path(origin, word)?.is_some())
    }

    /// A self-avoiding path `origin = v_0, …, v_k = target` with
    /// `1 <= k <= max_len` and `η(v_i) = ξ_i`; the shortest `k` found first.
    pub fn path_to_target(
        &self,
        origin: Vertex,
        word: &Word,
        target: Vertex,
        max_len: usize,
    ) -> Result<Option<Vec<Vertex>>, WordError> {
        let start = self.require(origin)?;
        let goal = self.require(target)?;
        let max_len = max_len.min(word.len());
        // reach[i][v]: from v after i letters, target is reachable by a walk
        // using at most max_len letters in total.
        let n = self.len();
        let mut reach = vec![vec![false; n]; max_len + 1];
        for i in (0..=max_len).rev() {
            for v in 0..n {
                if i >= 1 && v == goal as usize {
                    reach[i][v] = true;
                } else if i < max_len {
                    let want = word.letter(i + 1);
                    reach[i][v] = self.adj[v]
                        .iter()
                        .any(|&u| self.letters[u as usize] == want && reach[i + 1][u as usize]);
                }
            }
        }
        if !reach[0][start as usize] {
            return Ok(None);
        }
        let mut visited = vec![false; n];
        visited[start as usize] = true;
        let mut path = vec![start];
        for k in 1..=max_len {
            if self.extend_to(word, goal, k, &reach, &mut visited, &mut path) {
                return Ok(Some(path.into_iter().map(|i| self.vertex(i)).collect()));
            }
        }
        Ok(None)
    }

    fn extend_to(
        &self,
        word: &Word,
        goal: u32,
        len: usize,
        reach: &[Vec<bool>],
        visited: &mut [bool],
        path: &mut Vec<u32>,
    ) -> bool {
        let depth = path.len() - 1;
        let v = *path.last().expect("path holds the origin");
        if depth >= 1 && v == goal {
            return depth == len;
        }
        if depth == len {
            return false;
        }
        let want = word.letter(depth + 1);
        for &u in &self.adj[v as usize] {
            let ui = u as usize;
            if visited[ui] || self.letters[ui] != want || !reach[depth + 1][ui] {
                continue;
            }
            visited[ui] = true;
            path.push(u);
            if self.extend_to(word, goal, len, reach, visited, path) {
                return true;
            }
            path.pop();
            visited[ui] = false;
        }
        false
    }

    /// Every length-`m` word seen from `origin`, enumerated over a binary
    /// trie. A subtree is cut as soon as the relaxed frontier empties.
    pub fn words_seen(&self, origin: Vertex, m: usize) -> Result<BTreeSet<Word>, WordError> {
        let start = self.require(origin)?;
        let mut frontier = vec![false; self.len()];
        frontier[start as usize] = true;
        let mut out = BTreeSet::new();
        let mut prefix = Word::empty();
        self.trie_walk(origin, m, &frontier, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn trie_walk(
        &self,
        origin: Vertex,
        m: usize,
        frontier: &[bool],
        prefix: &mut Word,
        out: &mut BTreeSet<Word>,
    ) -> Result<(), WordError> {
        if prefix.len() == m {
            if self.sees_exact(origin, prefix)? {
                out.insert(prefix.clone());
            }
            return Ok(());
        }
        for letter in [0u8, 1] {
            let next = self.step_frontier(frontier, letter);
            if !next.iter().any(|&b| b) {
                continue;
            }
            prefix.push(letter);
            self.trie_walk(origin, m, &next, prefix, out)?;
            prefix.0.pop();
        }
        Ok(())
    }
}

fn check_cap(len: usize, cap: usize) -> Result<(), WordError> {
    if len > cap {
        Err(WordError::CapExceeded { len, cap })
    } else {
        Ok(())
    }
}

/// Exact decision: is `q.word` seen from `q.origin` inside `q.window`?
pub fn sees_word_exact<C: Configuration + ?Sized>(
    config: &C,
    q: &SeenQuery,
    cap: usize,
) -> Result<bool, WordError> {
    check_cap(q.word.len(), cap)?;
    if !q.window.contains(q.origin) {
        return Err(WordError::OutsideWindow(q.origin));
    }
    LocalGraph::build(config, &q.window).sees_exact(q.origin, &q.word)
}

/// Necessary condition for [`sees_word_exact`]: a letter-consistent walk,
/// possibly revisiting vertices.
pub fn sees_word_relaxed<C: Configuration + ?Sized>(
    config: &C,
    q: &SeenQuery,
) -> Result<bool, WordError> {
    if !q.window.contains(q.origin) {
        return Err(WordError::OutsideWindow(q.origin));
    }
    LocalGraph::build(config, &q.window).sees_relaxed(q.origin, &q.word)
}

/// `{ w : |w| = m, w seen from origin }`.
pub fn words_seen_set<C: Configuration + ?Sized>(
    config: &C,
    origin: Vertex,
    m: usize,
    window: &Window,
    cap: usize,
) -> Result<BTreeSet<Word>, WordError> {
    check_cap(m, cap.min(DEFAULT_EXACT_CAP))?;
    if !window.contains(origin) {
        return Err(WordError::OutsideWindow(origin));
    }
    LocalGraph::build(config, window).words_seen(origin, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ProbSequence, Truncation};
    use crate::sampler::{ExplicitConfig, FieldOracle};
    use proptest::prelude::*;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    fn open(cfg: &mut ExplicitConfig, a: Vertex, b: Vertex) {
        cfg.open_edge(canonical_edge(a, b).unwrap());
    }

    /// Independent brute force: all self-avoiding paths of length `m` from
    /// `origin`, straight off the configuration.
    fn brute_words<C: Configuration>(
        cfg: &C,
        origin: Vertex,
        m: usize,
        window: &Window,
    ) -> BTreeSet<Word> {
        fn go<C: Configuration>(
            cfg: &C,
            window: &Window,
            m: usize,
            path: &mut Vec<Vertex>,
            word: &mut Vec<u8>,
            out: &mut BTreeSet<Word>,
        ) {
            if word.len() == m {
                out.insert(Word::new(word.clone()));
                return;
            }
            let here = *path.last().unwrap();
            for u in neighbors_within(here, cfg.truncation(), window) {
                if path.contains(&u) || !cfg.is_open(&canonical_edge(here, u).unwrap()) {
                    continue;
                }
                path.push(u);
                word.push(cfg.letter(u));
                go(cfg, window, m, path, word, out);
                word.pop();
                path.pop();
            }
        }
        let mut out = BTreeSet::new();
        go(cfg, window, m, &mut vec![origin], &mut Vec::new(), &mut out);
        out
    }

    fn copy_to_explicit(oracle: &FieldOracle, window: &Window) -> ExplicitConfig {
        let mut cfg = ExplicitConfig::new(oracle.trunc(), 0);
        for a in window.vertices() {
            cfg.set_letter(a, oracle.vertex_letter(a));
            for b in neighbors_within(a, oracle.trunc(), window) {
                let e = canonical_edge(a, b).unwrap();
                if oracle.edge_open(&e) {
                    cfg.open_edge(e);
                }
            }
        }
        cfg
    }

    #[test]
    fn word_text_round_trip() {
        let w: Word = "0110".parse().unwrap();
        assert_eq!(w.get(1), Some(0));
        assert_eq!(w.get(2), Some(1));
        assert_eq!(w.get(0), None);
        assert_eq!(w.to_string(), "0110");
        assert_eq!(Word::from_bits(0b0110, 4), w);
        assert!("01x".parse::<Word>().is_err());
    }

    #[test]
    fn empty_word_always_seen() {
        let cfg = ExplicitConfig::new(Truncation::new(1).unwrap(), 0);
        let q = SeenQuery {
            origin: v(0, 0),
            word: Word::empty(),
            window: Window::new(0, 0, 0, 0),
        };
        assert!(sees_word_exact(&cfg, &q, DEFAULT_EXACT_CAP).unwrap());
        assert!(sees_word_relaxed(&cfg, &q).unwrap());
    }

    #[test]
    fn two_vertex_window() {
        let mut cfg = ExplicitConfig::new(Truncation::new(1).unwrap(), 0);
        open(&mut cfg, v(0, 0), v(1, 0));
        cfg.set_letter(v(1, 0), 1);
        cfg.set_letter(v(0, 0), 0);
        let window = Window::new(0, 1, 0, 0);
        let q = |w: &str| SeenQuery {
            origin: v(0, 0),
            word: w.parse().unwrap(),
            window,
        };
        assert!(sees_word_exact(&cfg, &q("1"), DEFAULT_EXACT_CAP).unwrap());
        assert!(!sees_word_exact(&cfg, &q("0"), DEFAULT_EXACT_CAP).unwrap());
    }

    #[test]
    fn isolated_origin_sees_nothing() {
        let cfg = ExplicitConfig::new(Truncation::new(3).unwrap(), 1);
        let q = SeenQuery {
            origin: v(1, 1),
            word: "1".parse().unwrap(),
            window: Window::new(0, 3, 0, 3),
        };
        assert!(!sees_word_relaxed(&cfg, &q).unwrap());
    }

    #[test]
    fn revisiting_walk_separates_engines() {
        // o - a - b on a five-site row; spelling 1,0,1 needs to step back onto a.
        let mut cfg = ExplicitConfig::new(Truncation::new(1).unwrap(), 0);
        open(&mut cfg, v(0, 0), v(1, 0));
        open(&mut cfg, v(1, 0), v(2, 0));
        cfg.set_letter(v(1, 0), 1);
        cfg.set_letter(v(2, 0), 0);
        let window = Window::new(0, 4, 0, 0);
        let q = SeenQuery {
            origin: v(0, 0),
            word: "101".parse().unwrap(),
            window,
        };
        assert!(!sees_word_exact(&cfg, &q, DEFAULT_EXACT_CAP).unwrap());
        assert!(sees_word_relaxed(&cfg, &q).unwrap());
        assert!(!brute_words(&cfg, v(0, 0), 3, &window).contains(&q.word));
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = ExplicitConfig::new(Truncation::new(1).unwrap(), 0);
        let q = SeenQuery {
            origin: v(0, 0),
            word: Word::constant(0, 25),
            window: Window::new(0, 1, 0, 0),
        };
        assert_eq!(
            sees_word_exact(&cfg, &q, DEFAULT_EXACT_CAP),
            Err(WordError::CapExceeded { len: 25, cap: 24 })
        );
        assert!(matches!(
            words_seen_set(&cfg, v(0, 0), 17, &Window::new(0, 1, 0, 0), DEFAULT_ENUMERATION_CAP),
            Err(WordError::CapExceeded { .. })
        ));
    }

    #[test]
    fn single_open_path_of_ones() {
        let mut cfg = ExplicitConfig::new(Truncation::new(2).unwrap(), 1);
        for x in 0..5 {
            open(&mut cfg, v(x, 0), v(x + 1, 0));
        }
        let window = Window::new(0, 5, 0, 1);
        let seen = words_seen_set(&cfg, v(0, 0), 5, &window, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![Word::constant(1, 5)]);
        let zero = words_seen_set(&cfg, v(0, 0), 0, &window, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(zero.into_iter().collect::<Vec<_>>(), vec![Word::empty()]);
    }

    #[test]
    fn random_windows_match_brute_force() {
        let window = Window::new(0, 5, 0, 5);
        let seq = ProbSequence::log_inverse(0.5).unwrap();
        let trunc = Truncation::new(3).unwrap();
        for seed in 0..25 {
            let oracle = FieldOracle::new(seed, seq.clone(), trunc, 0.5);
            let origin = v(2, 2);
            let got = words_seen_set(&oracle, origin, 6, &window, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(got, brute_words(&oracle, origin, 6, &window), "seed {seed}");
        }
    }

    #[test]
    fn witness_is_a_valid_path() {
        let oracle = FieldOracle::new(
            11,
            ProbSequence::constant(0.6, 0.6).unwrap(),
            Truncation::new(4).unwrap(),
            0.5,
        );
        let window = Window::new(0, 9, 0, 4);
        let graph = LocalGraph::build(&oracle, &window);
        for word in Word::all_of_length(7) {
            if let Some(path) = graph.witness_path(v(0, 0), &word).unwrap() {
                assert_eq!(path.len(), 8);
                let distinct: BTreeSet<_> = path.iter().collect();
                assert_eq!(distinct.len(), 8);
                for (i, pair) in path.windows(2).enumerate() {
                    assert!(oracle.edge_open(&canonical_edge(pair[0], pair[1]).unwrap()));
                    assert_eq!(oracle.vertex_letter(pair[1]), word.letter(i + 1));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn relaxed_contains_exact(seed in any::<u64>(), bits in any::<u64>(), m in 0usize..8) {
            let oracle = FieldOracle::new(
                seed,
                ProbSequence::constant(0.45, 0.5).unwrap(),
                Truncation::new(2).unwrap(),
                0.5,
            );
            let q = SeenQuery { origin: v(1, 1), word: Word::from_bits(bits, m), window: Window::new(0, 4, 0, 3) };
            if sees_word_exact(&oracle, &q, DEFAULT_EXACT_CAP).unwrap() {
                prop_assert!(sees_word_relaxed(&oracle, &q).unwrap());
            }
        }

        #[test]
        fn complement_symmetry(seed in any::<u64>(), bits in any::<u64>(), m in 0usize..7) {
            let window = Window::new(0, 4, 0, 3);
            let oracle = FieldOracle::new(
                seed,
                ProbSequence::constant(0.5, 0.5).unwrap(),
                Truncation::new(2).unwrap(),
                0.5,
            );
            let cfg = copy_to_explicit(&oracle, &window);
            let mut flipped = cfg.clone();
            for a in window.vertices() {
                flipped.set_letter(a, 1 - cfg.letter(a));
            }
            let word = Word::from_bits(bits, m);
            let q = SeenQuery { origin: v(2, 1), word: word.clone(), window };
            let qf = SeenQuery { origin: v(2, 1), word: word.flipped(), window };
            prop_assert_eq!(
                sees_word_exact(&cfg, &q, DEFAULT_EXACT_CAP).unwrap(),
                sees_word_exact(&flipped, &qf, DEFAULT_EXACT_CAP).unwrap()
            );
        }

        #[test]
        fn opening_an_edge_never_hides_a_word(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
            let window = Window::new(0, 4, 0, 3);
            let oracle = FieldOracle::new(
                seed,
                ProbSequence::constant(0.35, 0.35).unwrap(),
                Truncation::new(2).unwrap(),
                0.5,
            );
            let cfg = copy_to_explicit(&oracle, &window);
            let mut closed = Vec::new();
            for a in window.vertices() {
                for b in neighbors_within(a, cfg.truncation(), &window) {
                    let e = canonical_edge(a, b).unwrap();
                    if a < b && !cfg.is_open(&e) {
                        closed.push(e);
                    }
                }
            }
            prop_assume!(!closed.is_empty());
            let mut more = cfg.clone();
            more.open_edge(closed[pick.index(closed.len())]);
            let before = words_seen_set(&cfg, v(1, 1), 5, &window, DEFAULT_ENUMERATION_CAP).unwrap();
            let after = words_seen_set(&more, v(1, 1), 5, &window, DEFAULT_ENUMERATION_CAP).unwrap();
            prop_assert!(before.is_subset(&after));
        }
    }
}
