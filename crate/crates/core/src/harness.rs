//! Experiment runner behind the command line: reads a flat config, runs
//! replicas with seeds `seed_base + r`, and writes row, summary and
//! metadata files.

use std::fmt;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use thiserror::Error;

use crate::gadget::{Gadget, GadgetSpec};
use crate::growth::{growth_replica, AlphaPolicy, GrowthPoint, GrowthRow, GROWTH_CSV_HEADER};
use crate::kv::{join_list, KvMap};
use crate::lattice::{ProbSequence, Truncation, Vertex, Window};
use crate::oriented::{crossing_failures, default_seed_set, CrossingEstimate, ORIENTED_CSV_HEADER};
use crate::renorm::{
    initial_letters, letter_budget, Explorer, Half, RenormError, RenormParams, RevealMode, SliceStart,
    TRACE_CSV_HEADER,
};
use crate::sampler::FieldOracle;
use crate::slab::{
    black_probability, link_probability, run_slab_coupling, verify_isomorphism, CouplingParams, Direction,
    BLACK_CSV_HEADER,
};
use crate::stats::{round_sig, summarize, wilson};
use crate::word::{words_seen_set, Word, DEFAULT_EXACT_CAP};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 1,
            HarnessError::Invariant(_) => 3,
        }
    }
}

fn config_err(e: impl fmt::Display) -> HarnessError {
    HarnessError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Growth,
    Slice,
    Gadget,
    Oriented,
    Slab,
    Iso,
    Words,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Growth,
        ExperimentKind::Slice,
        ExperimentKind::Gadget,
        ExperimentKind::Oriented,
        ExperimentKind::Slab,
        ExperimentKind::Iso,
        ExperimentKind::Words,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Growth => "growth",
            ExperimentKind::Slice => "slice",
            ExperimentKind::Gadget => "gadget",
            ExperimentKind::Oriented => "oriented",
            ExperimentKind::Slab => "slab",
            ExperimentKind::Iso => "iso",
            ExperimentKind::Words => "words",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| config_err(format!("unknown experiment {s:?}")))
    }
}

/// A parsed config plus the run-level settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: KvMap,
    pub seed_base: u64,
    pub replicas: u64,
}

impl ExperimentConfig {
    /// `seed` and `replicas` keys in the map act as defaults.
    pub fn new(kind: ExperimentKind, params: KvMap) -> Result<Self, HarnessError> {
        let seed_base = match params.get_str("seed") {
            Some(s) => crate::sampler::parse_seed(s).map_err(|e| config_err(format!("seed {s:?}: {e}")))?,
            None => 0,
        };
        let replicas = params.get_or("replicas", default_replicas(kind)).map_err(config_err)?;
        Ok(Self {
            kind,
            params,
            seed_base,
            replicas,
        })
    }
}

fn default_replicas(kind: ExperimentKind) -> u64 {
    match kind {
        ExperimentKind::Growth | ExperimentKind::Oriented => 500,
        ExperimentKind::Slice | ExperimentKind::Slab | ExperimentKind::Words => 200,
        ExperimentKind::Gadget | ExperimentKind::Iso => 1,
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExperimentOutput {
    pub rows_header: String,
    pub rows: Vec<String>,
    pub summary_header: String,
    pub summary: Vec<String>,
    pub meta: Vec<(String, String)>,
    /// Additional files, by name.
    pub extra: Vec<(String, String)>,
    /// Invariant violations found; the run still writes its files.
    pub violations: Vec<String>,
}

impl ExperimentOutput {
    pub fn rows_csv(&self) -> String {
        csv_text(&self.rows_header, &self.rows)
    }

    pub fn summary_csv(&self) -> String {
        csv_text(&self.summary_header, &self.summary)
    }
}

fn csv_text(header: &str, rows: &[String]) -> String {
    let mut s = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Writes `<kind>_rows.csv`, `<kind>_summary.csv`, `<kind>_meta.txt` and
/// any extra files into `dir`. Returns the written paths.
pub fn write_outputs(kind: ExperimentKind, out: &ExperimentOutput, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, text: &str| -> io::Result<()> {
        let path = dir.join(name);
        write_atomic(&path, text)?;
        written.push(path);
        Ok(())
    };
    put(format!("{kind}_rows.csv"), &out.rows_csv())?;
    put(format!("{kind}_summary.csv"), &out.summary_csv())?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut meta = format!("timestamp = {stamp}\n");
    for (k, v) in &out.meta {
        meta.push_str(&format!("{k} = {v}\n"));
    }
    put(format!("{kind}_meta.txt"), &meta)?;
    for (name, text) in &out.extra {
        put(name.clone(), text)?;
    }
    Ok(written)
}

fn sequence(params: &KvMap) -> Result<(ProbSequence, Truncation), HarnessError> {
    let mut map = KvMap::new();
    map.insert("seq.kind", "constant");
    map.insert("seq.value", 1.0);
    map.insert("seq.epsilon", 1.0);
    map.insert("seq.K", 1_000_000u64);
    map.merge(params);
    ProbSequence::from_kv(&map).map_err(config_err)
}

fn get<T>(params: &KvMap, key: &str, default: T) -> Result<T, HarnessError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    params.get_or(key, default).map_err(config_err)
}

fn get_list<T>(params: &KvMap, key: &str, default: Vec<T>) -> Result<Vec<T>, HarnessError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    Ok(params.get_list(key).map_err(config_err)?.unwrap_or(default))
}

fn seeds(cfg: &ExperimentConfig) -> impl ParallelIterator<Item = (u64, u64)> {
    let base = cfg.seed_base;
    (0..cfg.replicas).into_par_iter().map(move |r| (r, base.wrapping_add(r)))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    if cfg.replicas == 0 {
        return Err(config_err("replicas must be positive"));
    }
    let mut out = match cfg.kind {
        ExperimentKind::Growth => run_growth(cfg),
        ExperimentKind::Slice => run_slice(cfg),
        ExperimentKind::Gadget => run_gadget(cfg),
        ExperimentKind::Oriented => run_oriented(cfg),
        ExperimentKind::Slab => run_slab(cfg),
        ExperimentKind::Iso => run_iso(cfg),
        ExperimentKind::Words => run_words(cfg),
    }?;
    let mut meta = vec![
        ("kind".to_string(), cfg.kind.to_string()),
        ("seed_base".to_string(), cfg.seed_base.to_string()),
        ("replicas".to_string(), cfg.replicas.to_string()),
    ];
    for key in cfg.params.keys() {
        meta.push((format!("config.{key}"), cfg.params.get_str(key).unwrap_or("").to_string()));
    }
    meta.append(&mut out.meta);
    out.meta = meta;
    Ok(out)
}

fn run_growth(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let (seq, _) = sequence(p)?;
    let letter_p: f64 = get(p, "letter_p", 0.5)?;
    let sizes: Vec<u64> = get_list(p, "growth.n", vec![200])?;
    let fan_out: usize = get(p, "growth.L", 8)?;
    let alpha_fixed: u64 = get(p, "growth.alpha", 8)?;
    let alpha_log: Option<f64> = p.get("growth.alpha_log").map_err(config_err)?;
    let mult: u64 = get(p, "growth.mult", 1)?;
    let mut out = ExperimentOutput {
        rows_header: "n,replica,seed,success,steps,letters,burned".into(),
        summary_header: GROWTH_CSV_HEADER.into(),
        ..Default::default()
    };
    for n in sizes {
        let alpha = match alpha_log {
            Some(c) => AlphaPolicy::Log { c }.alpha(n),
            None => alpha_fixed,
        };
        let point = GrowthPoint {
            n,
            fan_out,
            alpha,
            mult,
        };
        let traces: Vec<_> = seeds(cfg)
            .map(|(r, seed)| growth_replica(&point, &seq, letter_p, seed).map(|t| (r, seed, t)))
            .collect::<Result<_, _>>()
            .map_err(config_err)?;
        let (mut ups, mut steps) = (0u64, 0u64);
        for (r, seed, t) in &traces {
            ups += t.up_moves;
            steps += t.steps();
            out.rows.push(format!(
                "{n},{r},{seed},{},{},{},{}",
                u8::from(t.success),
                t.steps(),
                t.letters_consumed(),
                t.burned.len()
            ));
            if t.letters_consumed() > alpha * mult {
                out.violations.push(format!("replica {r}: {} letters consumed", t.letters_consumed()));
            }
        }
        let summary = summarize(traces.iter().map(|t| t.2.success)).map_err(config_err)?;
        let row = GrowthRow {
            point,
            seed_base: cfg.seed_base,
            summary,
            up_frequency: if steps == 0 { 0.0 } else { ups as f64 / steps as f64 },
        };
        out.summary.push(row.csv());
    }
    Ok(out)
}

fn renorm_params(p: &KvMap) -> Result<RenormParams, HarnessError> {
    let reveal = match get::<String>(p, "slice.reveal", "staged".into())?.as_str() {
        "staged" => RevealMode::Staged,
        "single" => RevealMode::Single,
        other => return Err(config_err(format!("slice.reveal {other:?} is neither staged nor single"))),
    };
    let params = RenormParams {
        n: get(p, "slice.n", 64)?,
        fan_out: get(p, "slice.L", 8)?,
        alpha: get(p, "slice.alpha", 3)?,
        attempts: get(p, "slice.h", 3)?,
        delta: get(p, "slice.delta", 0.05)?,
        reveal,
    };
    params.validate().map_err(config_err)?;
    Ok(params)
}

fn run_slice(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let (seq, _) = sequence(p)?;
    let letter_p: f64 = get(p, "letter_p", 0.5)?;
    let params = renorm_params(p)?;
    let base: u32 = get(p, "slice.base", 1)?;
    let levels: u32 = get(p, "slice.levels", 1)?;
    let half = match get::<String>(p, "slice.half", "minus".into())?.as_str() {
        "minus" => Half::Minus,
        "plus" => Half::Plus,
        other => return Err(config_err(format!("slice.half {other:?} is neither minus nor plus"))),
    };
    if base == 0 || levels == 0 {
        return Err(config_err("slice.base and slice.levels must be positive"));
    }
    let top = base + levels - 1;
    let budget = letter_budget(top, base, params.alpha, params.attempts);
    let t0 = initial_letters(base);
    let start = SliceStart::front_halves(base, &params, half, t0).map_err(config_err)?;

    struct Replica {
        rows: Vec<String>,
        occurred: bool,
        first: bool,
        attempts: usize,
        max_u: usize,
        max_t: u64,
        violation: Option<String>,
    }
    let replicas: Vec<Replica> = seeds(cfg)
        .map(|(r, seed)| {
            let oracle = FieldOracle::new(seed, seq.clone(), Truncation::new(1).expect("1"), letter_p);
            let word = Word::random(seed, (t0 + budget.s + 4) as usize);
            let mut ex = Explorer::new(&oracle, params, &word).map_err(config_err)?;
            let mut rep = Replica {
                rows: Vec::new(),
                occurred: true,
                first: true,
                attempts: 0,
                max_u: 0,
                max_t: 0,
                violation: None,
            };
            let mut slice_start = start.clone();
            for level in base..=top {
                match ex.run_slice(&slice_start) {
                    Ok(o) => {
                        rep.attempts += o.attempts_used();
                        rep.first &= o.attempts[0].success;
                        rep.max_t = rep.max_t.max(o.attempts.iter().filter_map(|a| a.max_t).max().unwrap_or(0));
                        match o.winner() {
                            Some(w) if level < top => {
                                slice_start = SliceStart::from_gamma(level + 1, &w.gamma, &params).map_err(config_err)?;
                            }
                            Some(_) => {}
                            None => {
                                rep.occurred = false;
                                break;
                            }
                        }
                    }
                    Err(e @ (RenormError::LedgerViolation(_) | RenormError::Growth(_) | RenormError::WordTooShort { .. })) => {
                        rep.violation = Some(format!("replica {r}: {e}"));
                        rep.occurred = false;
                        break;
                    }
                    Err(e) => return Err(config_err(e)),
                }
            }
            rep.first &= rep.attempts > 0;
            rep.max_u = ex.ledger().max_unavailable();
            if budget.valid && rep.max_t > budget.s {
                rep.violation.get_or_insert(format!("replica {r}: {} letters exceed {}", rep.max_t, budget.s));
            }
            rep.rows = ex.ledger().records().iter().map(|t| format!("{r},{}", t.csv())).collect();
            Ok(rep)
        })
        .collect::<Result<_, HarnessError>>()?;

    let occurred = wilson(replicas.iter().filter(|r| r.occurred).count() as u64, cfg.replicas).map_err(config_err)?;
    let first = replicas.iter().filter(|r| r.first).count();
    let mut out = ExperimentOutput {
        rows_header: format!("replica,{TRACE_CSV_HEADER}"),
        summary_header: "levels,n,L,alpha,h,replicas,occurred,first_attempt,estimate,ci_lo,ci_hi,max_u,max_t,budget".into(),
        ..Default::default()
    };
    for rep in &replicas {
        out.rows.extend(rep.rows.iter().cloned());
        out.violations.extend(rep.violation.clone());
    }
    out.summary.push(format!(
        "{levels},{},{},{},{},{},{},{first},{},{},{},{},{},{}",
        params.n,
        params.fan_out,
        params.alpha,
        params.attempts,
        cfg.replicas,
        occurred.successes,
        round_sig(occurred.estimate),
        round_sig(occurred.ci_lo),
        round_sig(occurred.ci_hi),
        replicas.iter().map(|r| r.max_u).max().unwrap_or(0),
        replicas.iter().map(|r| r.max_t).max().unwrap_or(0),
        budget.s
    ));
    out.meta.push(("budget_gate".into(), budget.valid.to_string()));
    Ok(out)
}

fn run_gadget(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let spec = GadgetSpec {
        base: get(p, "gadget.base", 1)?,
        m: get(p, "gadget.m", 1)?,
        n: get(p, "gadget.n", 8)?,
        k: get(p, "gadget.K", 32)?,
    };
    let gadget = Gadget::build(spec).map_err(config_err)?;
    let outcomes = gadget.word_outcomes().map_err(config_err)?;
    let flag = |b: Option<bool>| match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "-",
    };
    let mut out = ExperimentOutput {
        rows_header: "word,minus,plus,ok".into(),
        summary_header: "base,m,n,K,words,minus,failing,status".into(),
        ..Default::default()
    };
    for o in &outcomes {
        out.rows.push(format!("{},{},{},{}", o.word, flag(Some(o.minus)), flag(o.plus), u8::from(o.ok())));
    }
    let failing = outcomes.iter().filter(|o| !o.ok()).count();
    if failing > 0 {
        out.violations.push(format!("{failing} words reach neither half"));
    }
    if !gadget.long_edges_reach() {
        out.violations.push("long edges do not span the region".into());
    }
    out.summary.push(format!(
        "{},{},{},{},{},{},{failing},{}",
        spec.base,
        spec.m,
        spec.n,
        spec.k,
        outcomes.len(),
        outcomes.iter().filter(|o| o.minus).count(),
        if out.violations.is_empty() { "pass" } else { "fail" }
    ));
    out.meta.push(("free_letter".into(), "0".into()));
    out.extra.push(("gadget.pbm".into(), gadget.to_pbm()));
    out.extra.push(("gadget_edges.txt".into(), gadget.edge_rules()));
    Ok(out)
}

fn run_oriented(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let level: u32 = get(p, "oriented.level", 2)?;
    if level == 0 {
        return Err(config_err("oriented.level must be positive"));
    }
    let gammas: Vec<f64> = get_list(p, "oriented.gamma", vec![0.9, 0.95, 0.99])?;
    if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(config_err(format!("gamma {g} outside [0,1]")));
    }
    let seed_set = default_seed_set(level);
    let mut out = ExperimentOutput {
        rows_header: "l,gamma,replica,seed,failure".into(),
        summary_header: ORIENTED_CSV_HEADER.into(),
        ..Default::default()
    };
    for &gamma in &gammas {
        let fails = crossing_failures(level, &seed_set, gamma, cfg.replicas, cfg.seed_base);
        for (r, f) in fails.iter().enumerate() {
            out.rows.push(format!(
                "{level},{},{r},{},{}",
                round_sig(gamma),
                cfg.seed_base.wrapping_add(r as u64),
                u8::from(*f)
            ));
        }
        let summary = wilson(fails.iter().filter(|&&f| f).count() as u64, cfg.replicas).map_err(config_err)?;
        let est = CrossingEstimate {
            slice: level,
            gamma,
            seeds: seed_set.len(),
            a_diag: summary.estimate.powf(1.0 / crate::renorm::pow4(level) as f64),
            summary,
        };
        out.summary.push(est.csv());
    }
    Ok(out)
}

fn run_slab(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let (seq, _) = sequence(p)?;
    let letter_p: f64 = get(p, "letter_p", 0.5)?;
    let params = CouplingParams {
        right: get(p, "slab.N", 8)?,
        up: get(p, "slab.M", 8)?,
    };
    params.validate().map_err(config_err)?;
    let width: i64 = get(p, "slab.width", 6)?;
    let height: i64 = get(p, "slab.height", 6)?;
    if width < 1 || height < 1 {
        return Err(config_err("slab window must be non-empty"));
    }
    let word_len = (2 * (width + height) + 2) as usize;
    let results: Vec<_> = seeds(cfg)
        .map(|(r, seed)| {
            let oracle = FieldOracle::new(seed, seq.clone(), Truncation::new(1).expect("1"), letter_p);
            let word = Word::random(seed, word_len);
            run_slab_coupling(&word, &params, &oracle, width, height)
                .map(|o| (r, o))
                .map_err(|e| format!("replica {r}: {e}"))
        })
        .collect();
    let mut out = ExperimentOutput {
        rows_header: format!("replica,{BLACK_CSV_HEADER}"),
        summary_header: "N,M,width,height,replicas,corner,estimate,ci_lo,ci_hi,black_frequency,black_right,black_up".into(),
        ..Default::default()
    };
    let corner = crate::renorm::Block::new(width - 1, height - 1);
    let (mut reached, mut black, mut tried) = (0u64, 0u64, 0u64);
    for res in results {
        match res {
            Ok((r, o)) => {
                reached += u64::from(o.reaches(corner));
                tried += o.trace.len() as u64;
                black += o.trace.iter().filter(|t| t.winner.is_some()).count() as u64;
                out.rows.extend(o.trace.iter().map(|t| format!("{r},{}", t.csv())));
            }
            Err(e) => out.violations.push(e),
        }
    }
    let summary = wilson(reached, cfg.replicas).map_err(config_err)?;
    let k = params.thickness();
    let average = |dir: Direction| -> f64 {
        let link = link_probability(dir, &seq, k);
        [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&pair| black_probability(params.range(dir), link, letter_p, &seq, pair).exact / 4.0)
            .sum()
    };
    out.summary.push(format!(
        "{},{},{width},{height},{},{reached},{},{},{},{},{},{}",
        params.right,
        params.up,
        cfg.replicas,
        round_sig(summary.estimate),
        round_sig(summary.ci_lo),
        round_sig(summary.ci_hi),
        round_sig(if tried == 0 { 0.0 } else { black as f64 / tried as f64 }),
        round_sig(average(Direction::Right)),
        round_sig(average(Direction::Up))
    ));
    out.meta.push(("thickness".into(), k.to_string()));
    Ok(out)
}

fn run_iso(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let ks: Vec<u64> = get_list(p, "iso.K", vec![3])?;
    let width: i64 = get(p, "iso.width", 30)?;
    let height: i64 = get(p, "iso.height", 5)?;
    if width < 1 || height < 1 || ks.iter().any(|&k| k < 2) {
        return Err(config_err("iso needs K >= 2 and a non-empty window"));
    }
    let window = Window::new(0, width - 1, 0, height - 1);
    let mut out = ExperimentOutput {
        rows_header: "K,vertices,edges,ok".into(),
        summary_header: "kind,K,status".into(),
        ..Default::default()
    };
    for k in ks {
        let report = verify_isomorphism(k, &window);
        out.rows.push(format!("{k},{},{},{}", report.vertices, report.edges, u8::from(report.ok)));
        out.summary.push(format!("iso,{k},{}", if report.ok { "pass" } else { "fail" }));
        if !report.ok {
            out.violations.push(format!("isomorphism fails for K = {k}"));
        }
    }
    out.meta.push(("window".into(), join_list(&[0, width - 1, 0, height - 1])));
    Ok(out)
}

fn run_words(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let p = &cfg.params;
    let (seq, trunc) = sequence(p)?;
    let letter_p: f64 = get(p, "letter_p", 0.5)?;
    let m: usize = get(p, "words.m", 6)?;
    let half: i64 = get(p, "words.radius", 3)?;
    if m == 0 || m > DEFAULT_EXACT_CAP || half < 0 {
        return Err(config_err(format!("words.m must lie in 1..={DEFAULT_EXACT_CAP}")));
    }
    let window = Window::new(-half, half, -half, half);
    let counts: Vec<(u64, u64, usize)> = seeds(cfg)
        .map(|(r, seed)| {
            let oracle = FieldOracle::new(seed, seq.clone(), trunc, letter_p);
            words_seen_set(&oracle, Vertex::ORIGIN, m, &window, DEFAULT_EXACT_CAP)
                .map(|s| (r, seed, s.len()))
                .map_err(config_err)
        })
        .collect::<Result<_, _>>()?;
    let total = 1usize << m;
    let mut out = ExperimentOutput {
        rows_header: "replica,seed,seen".into(),
        summary_header: "m,radius,replicas,mean_seen,all_seen,estimate,ci_lo,ci_hi".into(),
        ..Default::default()
    };
    out.rows.extend(counts.iter().map(|(r, s, c)| format!("{r},{s},{c}")));
    let all = summarize(counts.iter().map(|c| c.2 == total)).map_err(config_err)?;
    let mean = counts.iter().map(|c| c.2 as f64).sum::<f64>() / counts.len() as f64;
    out.summary.push(format!(
        "{m},{half},{},{},{},{},{},{}",
        cfg.replicas,
        round_sig(mean),
        all.successes,
        round_sig(all.estimate),
        round_sig(all.ci_lo),
        round_sig(all.ci_hi)
    ));
    Ok(out)
}
