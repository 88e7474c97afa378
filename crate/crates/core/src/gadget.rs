//! A fixed configuration near the origin from which every word starts by
//! reaching one half of each middle block on the base front.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{canonical_edge, Truncation, Vertex, Window};
use crate::renorm::{front_part, initial_letters, pow4, Block, Half};
use crate::sampler::{Configuration, ExplicitConfig};
use crate::word::{LocalGraph, Word, WordError, DEFAULT_EXACT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("gadget preconditions violated: {0}")]
    SpecViolation(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetSpec {
    /// Base slice index.
    pub base: u32,
    /// Horizontal edges of length `>= m` are available.
    pub m: u64,
    /// Block size.
    pub n: u64,
    pub k: u64,
}

impl GadgetSpec {
    pub fn validate(&self) -> Result<(), GadgetError> {
        let bad = |s: String| Err(GadgetError::SpecViolation(s));
        if self.base == 0 {
            return bad("base slice must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !self.n.is_multiple_of(2) || self.n < 2 * self.m + 6 {
            return bad(format!("n = {} must be even and at least 2m + 6 = {}", self.n, 2 * self.m + 6));
        }
        let span = self.n * pow4(self.base) as u64;
        if self.k < span {
            return bad(format!("K = {} is below n * 4^base = {span}", self.k));
        }
        Ok(())
    }

    /// Number of initial letters a word may spend inside the gadget.
    pub fn letters(&self) -> usize {
        initial_letters(self.base) as usize
    }

    /// Bounding window of the region.
    pub fn window(&self) -> Window {
        let q = pow4(self.base);
        Window::new(0, self.n as i64 * q - 1, 0, q - 1)
    }

    /// Sites of blocks `u` with `u1 + u2 < 4^base`.
    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= 0 && v.y >= 0 && Block::of_site(v, self.n).sum() < pow4(self.base)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    spec: GadgetSpec,
    config: ExplicitConfig,
}

impl Gadget {
    pub fn build(spec: GadgetSpec) -> Result<Self, GadgetError> {
        spec.validate()?;
        let trunc = Truncation::new(spec.k).expect("k > 0");
        let mut config = ExplicitConfig::new(trunc, 0);
        let window = spec.window();
        let sites: Vec<Vertex> = window.vertices().filter(|&v| spec.contains(v)).collect();

        for &v in &sites {
            let up = v.offset(0, 1);
            if spec.contains(up) {
                config.open_edge(canonical_edge(v, up).expect("vertical"));
            }
            for d in spec.m..=spec.k {
                let u = v.offset(d as i64, 0);
                if !spec.contains(u) {
                    break;
                }
                config.open_edge(canonical_edge(v, u).expect("horizontal"));
            }
        }

        let m = spec.m as i64;
        let rows = 3 * pow4(spec.base - 1);
        for y in 0..rows {
            let pattern: [u8; 4] = if y % 2 == 0 { [0, 0, 1, 1] } else { [0, 1, 0, 1] };
            for (i, &b) in pattern.iter().enumerate() {
                config.set_letter(Vertex::new(m + i as i64, y), b);
            }
        }
        for y in 0..rows {
            for x in m..=m + 3 {
                let b = config.letter(Vertex::new(x, y));
                config.set_letter(Vertex::new(x + m + 3, y + 1), b);
            }
        }
        for b in front_part(spec.base, 2) {
            for v in b.half(spec.n, Half::Minus).sites() {
                config.set_letter(v, 0);
            }
            for v in b.half(spec.n, Half::Plus).sites() {
                config.set_letter(v, 1);
            }
        }
        Ok(Self { spec, config })
    }

    pub fn spec(&self) -> &GadgetSpec {
        &self.spec
    }

    pub fn config(&self) -> &ExplicitConfig {
        &self.config
    }

    pub fn letter(&self, v: Vertex) -> u8 {
        self.config.letter(v)
    }

    /// Flips one letter; used to corrupt the gadget in tests.
    pub fn flip(&mut self, v: Vertex) {
        let b = self.config.letter(v);
        self.config.set_letter(v, 1 - b);
    }

    pub fn graph(&self) -> LocalGraph {
        LocalGraph::build(&self.config, &self.spec.window())
    }

    /// Every site of row `y` in block `(0, y)` has a single open edge to every
    /// site of block `(4^base - 1 - y, y)` at distance at least `m`.
    pub fn long_edges_reach(&self) -> bool {
        let n = self.spec.n;
        let last = pow4(self.spec.base) - 1;
        (0..last).all(|y| {
            let far = Block::new(last - y, y).segment(n);
            Block::new(0, y).segment(n).sites().all(|v| {
                far.sites()
                    .filter(|u| (u.x - v.x).unsigned_abs() >= self.spec.m)
                    .all(|u| self.config.is_open(&canonical_edge(v, u).expect("same row")))
            })
        })
    }

    /// A path from the origin spelling a prefix of `word` and ending in
    /// block `(0, y)`, using at most `max_len` letters.
    pub fn path_to_row(&self, graph: &LocalGraph, word: &Word, y: i64, max_len: usize) -> Result<Option<Vec<Vertex>>, GadgetError> {
        for v in Block::new(0, y).segment(self.spec.n).sites() {
            if let Some(p) = graph.path_to_target(Vertex::ORIGIN, word, v, max_len)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// Whether every site of the given half of every middle block on the
    /// base front is reached by a path spelling at most `r` initial letters.
    pub fn half_reached(&self, graph: &LocalGraph, word: &Word, half: Half) -> Result<bool, GadgetError> {
        let r = self.spec.letters();
        for b in front_part(self.spec.base, 2) {
            for v in b.half(self.spec.n, half).sites() {
                if graph.path_to_target(Vertex::ORIGIN, word, v, r)?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// For every word of length `r` in binary order: whether the left halves
    /// are all reached and, only when they are not, whether the right halves
    /// are.
    pub fn word_outcomes(&self) -> Result<Vec<WordOutcome>, GadgetError> {
        let r = self.spec.letters();
        let cap = DEFAULT_EXACT_CAP.min(20);
        if r > cap {
            return Err(WordError::CapExceeded { len: r, cap }.into());
        }
        let graph = self.graph();
        (0..1u64 << r)
            .into_par_iter()
            .map(|bits| {
                let word = Word::from_bits(bits, r);
                let minus = self.half_reached(&graph, &word, Half::Minus)?;
                let plus = if minus {
                    None
                } else {
                    Some(self.half_reached(&graph, &word, Half::Plus)?)
                };
                Ok(WordOutcome { word, minus, plus })
            })
            .collect()
    }

    /// Checks all `2^r` words; the report names the first failing word.
    pub fn verify(&self) -> Result<GadgetReport, GadgetError> {
        let outcomes = self.word_outcomes()?;
        Ok(GadgetReport {
            words: outcomes.len(),
            minus: outcomes.iter().filter(|o| o.minus).count(),
            failing: outcomes.iter().find(|o| !o.ok()).map(|o| o.word.clone()),
        })
    }

    /// Letters as a plain PBM, top row first, with the spec in comments.
    pub fn to_pbm(&self) -> String {
        let w = self.spec.window();
        let mut out = String::from("P1\n");
        let _ = writeln!(
            out,
            "# base={} m={} n={} k={} free_letter=0",
            self.spec.base, self.spec.m, self.spec.n, self.spec.k
        );
        let _ = writeln!(out, "{} {}", w.width(), w.height());
        for y in (w.y_min..=w.y_max).rev() {
            let row: Vec<String> = (w.x_min..=w.x_max)
                .map(|x| self.letter(Vertex::new(x, y)).to_string())
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Which edges the gadget opens.
    pub fn edge_rules(&self) -> String {
        let w = self.spec.window();
        format!(
            "# base={} m={} n={} k={}\nregion=blocks with u1+u2<{}\nwindow={},{},{},{}\nhorizontal=open for lengths {}..={} with both ends in region\nvertical=open with both ends in region\nopen_edges={}\n",
            self.spec.base,
            self.spec.m,
            self.spec.n,
            self.spec.k,
            pow4(self.spec.base),
            w.x_min,
            w.x_max,
            w.y_min,
            w.y_max,
            self.spec.m,
            self.spec.k,
            self.config.open_count()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordOutcome {
    pub word: Word,
    pub minus: bool,
    /// Unchecked when the left halves are reached.
    pub plus: Option<bool>,
}

impl WordOutcome {
    pub fn ok(&self) -> bool {
        self.minus || self.plus == Some(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    pub words: usize,
    /// Words whose walk reaches the left halves.
    pub minus: usize,
    pub failing: Option<Word>,
}

impl GadgetReport {
    pub fn all_ok(&self) -> bool {
        self.failing.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GadgetSpec {
        GadgetSpec { base: 1, m: 1, n: 8, k: 32 }
    }

    #[test]
    fn column_patterns() {
        let g = Gadget::build(small()).unwrap();
        let row = |y: i64, xs: std::ops::RangeInclusive<i64>| -> Vec<u8> { xs.map(|x| g.letter(Vertex::new(x, y))).collect() };
        assert_eq!(row(0, 1..=4), vec![0, 0, 1, 1]);
        assert_eq!(row(1, 1..=4), vec![0, 1, 0, 1]);
        assert_eq!(row(1, 5..=8), vec![0, 0, 1, 1]);
        assert_eq!(row(2, 1..=4), vec![0, 0, 1, 1]);
        for b in front_part(1, 2) {
            assert!(b.half(8, Half::Minus).sites().all(|v| g.letter(v) == 0));
            assert!(b.half(8, Half::Plus).sites().all(|v| g.letter(v) == 1));
        }
    }

    #[test]
    fn rebuild_is_identical() {
        assert_eq!(Gadget::build(small()).unwrap(), Gadget::build(small()).unwrap());
    }

    #[test]
    fn spec_checks() {
        assert!(Gadget::build(GadgetSpec { n: 6, ..small() }).is_err());
        assert!(Gadget::build(GadgetSpec { k: 31, ..small() }).is_err());
        assert!(Gadget::build(GadgetSpec { base: 0, ..small() }).is_err());
    }

    #[test]
    fn long_edges() {
        assert!(Gadget::build(small()).unwrap().long_edges_reach());
    }

    #[test]
    fn region_shape() {
        let s = small();
        assert!(s.contains(Vertex::new(31, 0)));
        assert!(!s.contains(Vertex::new(24, 1)));
        assert!(s.contains(Vertex::new(7, 3)));
        assert!(!s.contains(Vertex::new(8, 3)));
    }

    #[test]
    fn zeros_reach_rows_quickly() {
        let g = Gadget::build(small()).unwrap();
        let graph = g.graph();
        let w = Word::constant(0, 9);
        for y in 1..=2 {
            let p = g.path_to_row(&graph, &w, y, 2 * y as usize + 1).unwrap();
            assert!(p.is_some(), "row {y}");
        }
    }

    #[test]
    fn pbm_shape() {
        let g = Gadget::build(small()).unwrap();
        let pbm = g.to_pbm();
        let lines: Vec<&str> = pbm.lines().collect();
        assert_eq!(lines[0], "P1");
        assert_eq!(lines[2], "32 4");
        assert_eq!(lines.len(), 7);
        assert!(g.edge_rules().contains("lengths 1..=32"));
    }

    #[test]
    fn all_words_pass_and_flip_is_caught() {
        let g = Gadget::build(small()).unwrap();
        let report = g.verify().unwrap();
        assert_eq!(report.words, 512);
        assert!(report.all_ok(), "{:?}", report.failing);
        let mut bad = g.clone();
        bad.flip(Vertex::new(4, 1));
        assert!(!bad.verify().unwrap().all_ok());
    }
}
