//! Corpus runner: per-instance statistics, iterative widths, generalized
//! width improvement, fractional buckets, and CSV output with resume.

mod record;
mod report;

pub use record::{header, merge_ghw_answer, read_csv, write_csv, Appender, RunRecord, RUNTIME_COLUMNS};
pub use report::{correlation_over, correlation_report, pearson, summarize, Cell, CorrelationMatrix, Summary, CORRELATION_COLUMNS};

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::frac::improvement_bucket;
use crate::ghd::{portfolio_ghw, GhdOptions};
use crate::hd::{compute_hw, HdOptions};
use crate::hypergraph::Hypergraph;
use crate::invariants::stats;
use crate::parse::{cq_to_hypergraph, parse_hypergraph_named};
use crate::search::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    Stats,
    Hw,
    Ghw,
    Improve,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Task> {
        match s.trim() {
            "stats" => Ok(Task::Stats),
            "hw" => Ok(Task::Hw),
            "ghw" => Ok(Task::Ghw),
            "improve" => Ok(Task::Improve),
            other => Err(Error::InvalidArgument(format!("unknown task `{other}`"))),
        }
    }
}

pub fn parse_tasks(s: &str) -> Result<Vec<Task>> {
    let mut tasks: Vec<Task> = s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    tasks.sort();
    tasks.dedup();
    Ok(tasks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub corpus: PathBuf,
    /// File-name pattern, e.g. `*.hg`.
    pub glob: String,
    pub tasks: Vec<Task>,
    pub k_max: usize,
    pub timeout: Duration,
    pub workers: usize,
    pub csv: PathBuf,
    pub seed: Option<u64>,
    pub resume: bool,
    /// Keep lowering k for ghw after a yes at hw−1.
    pub deeper_ghw: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            corpus: PathBuf::from("."),
            glob: "*".into(),
            tasks: vec![Task::Stats, Task::Hw, Task::Ghw, Task::Improve],
            k_max: 6,
            timeout: Duration::from_secs(3600),
            workers: 1,
            csv: PathBuf::from("out.csv"),
            seed: None,
            resume: false,
            deeper_ghw: false,
        }
    }
}

impl BenchConfig {
    /// Applies one `key = value` setting; keys mirror the command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("bad value `{value}` for {what}"));
        match key.trim().trim_start_matches("--").replace('-', "_").as_str() {
            "corpus" | "dir" => self.corpus = PathBuf::from(value),
            "glob" => self.glob = value.to_string(),
            "tasks" => self.tasks = parse_tasks(value)?,
            "kmax" | "k_max" => self.k_max = value.parse().map_err(|_| bad("kmax"))?,
            "timeout" => {
                let secs: f64 = value.parse().map_err(|_| bad("timeout"))?;
                if !(secs > 0.0) || !secs.is_finite() {
                    return Err(bad("timeout"));
                }
                self.timeout = Duration::from_secs_f64(secs);
            }
            "workers" => self.workers = value.parse().map_err(|_| bad("workers"))?,
            "csv" => self.csv = PathBuf::from(value),
            "seed" => self.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "resume" => self.resume = value.parse().map_err(|_| bad("resume"))?,
            "deeper_ghw" => self.deeper_ghw = value.parse().map_err(|_| bad("deeper_ghw"))?,
            other => return Err(Error::InvalidArgument(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Syntax {
                line: i + 1,
                col: 1,
                msg: "expected `key = value`".into(),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(Error::InvalidArgument("timeout must be positive".into()));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidArgument("kmax must be at least 1".into()));
        }
        glob::Pattern::new(&self.glob).map_err(|e| Error::InvalidArgument(format!("bad glob: {e}")))?;
        Ok(())
    }

    fn wants(&self, t: Task) -> bool {
        self.tasks.contains(&t)
    }
}

/// An instance file with its corpus-relative name and group tag (the first
/// directory below the corpus root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub path: PathBuf,
    pub name: String,
    pub group: String,
}

pub fn discover(corpus: &Path, pattern: &str) -> Result<Vec<Instance>> {
    let pat = glob::Pattern::new(pattern).map_err(|e| Error::InvalidArgument(format!("bad glob: {e}")))?;
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(corpus).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Io(e.to_string()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let file_name = entry.file_name().to_string_lossy();
        if file_name.starts_with('.') || !pat.matches(&file_name) {
            continue;
        }
        let rel = entry.path().strip_prefix(corpus).unwrap_or(entry.path());
        let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        let group = if parts.len() > 1 { parts[0].clone() } else { String::new() };
        out.push(Instance {
            path: entry.path().to_path_buf(),
            name: parts.join("/"),
            group,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn load_instance(path: &Path, name: &str) -> Result<Hypergraph> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "cq" || e == "sparql" || e == "sql") {
        let mut h = cq_to_hypergraph(&text)?;
        h.set_name(name);
        Ok(h)
    } else {
        parse_hypergraph_named(&text, name)
    }
}

fn ms(d: Duration) -> u64 {
    d.as_millis() as u64
}

/// Runs every requested task on one instance. Failures become statuses.
pub fn run_instance(inst: &Instance, cfg: &BenchConfig) -> RunRecord {
    let mut rec = RunRecord::new(&inst.name, &inst.group);
    let h = match load_instance(&inst.path, &inst.name) {
        Ok(h) => h,
        Err(e) => {
            let msg = format!("error: {e}");
            for t in &cfg.tasks {
                *status_slot(&mut rec, *t) = msg.clone();
            }
            return rec;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| fill_record(&mut rec, &h, cfg)));
    if outcome.is_err() {
        for t in &cfg.tasks {
            let slot = status_slot(&mut rec, *t);
            if slot.is_empty() {
                *slot = "error: internal failure".into();
            }
        }
    }
    rec
}

fn status_slot(rec: &mut RunRecord, t: Task) -> &mut String {
    match t {
        Task::Stats => &mut rec.stats_status,
        Task::Hw => &mut rec.hw_status,
        Task::Ghw => &mut rec.ghw_status,
        Task::Improve => &mut rec.improve_status,
    }
}

fn fill_record(rec: &mut RunRecord, h: &Hypergraph, cfg: &BenchConfig) {
    rec.vertices = Some(h.num_vertices());
    rec.edges = Some(h.num_edges());
    if cfg.wants(Task::Stats) {
        let start = Instant::now();
        let s = stats(h, Some(cfg.timeout));
        rec.arity = Some(s.arity);
        rec.degree = Some(s.degree);
        rec.bip = Some(s.iwidth);
        rec.bmip3 = Some(s.miwidth3);
        rec.bmip4 = Some(s.miwidth4);
        rec.vc = if s.vc_dim.exact {
            s.vc_dim.value.to_string()
        } else {
            format!("≥{}", s.vc_dim.value)
        };
        rec.stats_status = if s.vc_dim.exact { "ok" } else { "timeout" }.into();
        rec.stats_ms = Some(ms(start.elapsed()));
    }
    let hd_opts = HdOptions {
        timeout: Some(cfg.timeout),
        no_simplify: false,
        seed: cfg.seed,
    };
    // later tasks need hw bounds, so they imply the hw run
    let need_hw = cfg.wants(Task::Hw) || cfg.wants(Task::Ghw) || cfg.wants(Task::Improve);
    if need_hw {
        let start = Instant::now();
        match compute_hw(h, cfg.k_max, &hd_opts) {
            Ok(b) => {
                rec.hw_lb = Some(b.lower);
                rec.hw_ub = b.upper;
                let timed_out = b.runs.iter().any(|(_, r)| r.status == Status::Timeout);
                rec.hw_status = if b.exact().is_some() {
                    "exact"
                } else if timed_out {
                    "timeout"
                } else {
                    "above-kmax"
                }
                .into();
            }
            Err(e) => rec.hw_status = format!("error: {e}"),
        }
        rec.hw_ms = Some(ms(start.elapsed()));
    }
    if cfg.wants(Task::Ghw) {
        let start = Instant::now();
        run_ghw(rec, h, cfg);
        rec.ghw_ms = Some(ms(start.elapsed()));
    }
    if cfg.wants(Task::Improve) {
        let start = Instant::now();
        match rec.hw_ub {
            Some(k) => match improvement_bucket(h, k, &hd_opts) {
                Ok(b) => {
                    rec.improve_bucket = b.bucket.label().into();
                    rec.improve_status = if b.timed_out && b.witness.is_none() { "timeout" } else { "ok" }.into();
                }
                Err(e) => rec.improve_status = format!("error: {e}"),
            },
            None => rec.improve_status = "skip".into(),
        }
        rec.improve_ms = Some(ms(start.elapsed()));
    }
}

/// Lower bound on ghw implied by hw bounds: ghw = 1 iff hw = 1, and
/// hw ≤ 3·ghw + 1.
fn ghw_floor(hw_lb: usize) -> usize {
    let from_ratio = hw_lb.saturating_sub(1).div_ceil(3);
    let not_acyclic = if hw_lb >= 2 { 2 } else { 1 };
    from_ratio.max(not_acyclic)
}

fn run_ghw(rec: &mut RunRecord, h: &Hypergraph, cfg: &BenchConfig) {
    let hw_lb = rec.hw_lb.unwrap_or(1);
    rec.ghw_lb = Some(ghw_floor(hw_lb));
    rec.ghw_ub = rec.hw_ub;
    let Some(hw) = rec.hw_ub else {
        rec.ghw_status = "skip".into();
        return;
    };
    if hw <= 2 && rec.hw_exact() == Some(hw) {
        rec.ghw_lb = Some(hw);
        rec.ghw_status = "implied".into();
        return;
    }
    if !(3..=6).contains(&hw) {
        rec.ghw_status = "skip".into();
        return;
    }
    let opts = GhdOptions {
        timeout: Some(cfg.timeout),
        ..GhdOptions::default()
    };
    let mut k = hw - 1;
    let mut first = true;
    loop {
        match portfolio_ghw(h, k, &opts) {
            Ok(p) => {
                let yes = p.outcome.status.is_yes();
                match p.outcome.status {
                    Status::Yes(_) | Status::No => {
                        if first {
                            rec.ghw_status = if yes { "yes" } else { "no" }.into();
                            rec.winning_method = p.winner.map(|m| m.name().to_string()).unwrap_or_default();
                        }
                        merge_ghw_answer(rec, k, yes);
                    }
                    _ => {
                        if first {
                            rec.ghw_status = "timeout".into();
                        }
                        return;
                    }
                }
                if !yes || !cfg.deeper_ghw || k <= 2 {
                    return;
                }
            }
            Err(e) => {
                if first {
                    rec.ghw_status = format!("error: {e}");
                }
                return;
            }
        }
        first = false;
        k -= 1;
    }
}

/// Processes every instance of the corpus and writes the CSV, appending
/// each row as it completes. With `resume`, instances already present in
/// the CSV are kept and skipped. The finished file is rewritten sorted by
/// instance name.
pub fn run_corpus(cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let instances = discover(&cfg.corpus, &cfg.glob)?;
    let mut done: Vec<RunRecord> = if cfg.resume && cfg.csv.exists() {
        read_csv(&cfg.csv)?
    } else {
        Vec::new()
    };
    let present: HashSet<String> = done.iter().map(|r| r.instance.clone()).collect();
    // rewrite the kept rows so a truncated tail is gone before appending
    write_csv(&cfg.csv, &done)?;
    let todo: Vec<&Instance> = instances.iter().filter(|i| !present.contains(&i.name)).collect();
    let mut appender = Appender::open(&cfg.csv)?;
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<RunRecord>();
    let mut write_err = None;
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.min(todo.len().max(1)) {
            let tx = tx.clone();
            let (next, todo) = (&next, &todo);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = todo.get(i) else { break };
                if tx.send(run_instance(inst, cfg)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for rec in rx {
            if write_err.is_none() {
                if let Err(e) = appender.append(&rec) {
                    write_err = Some(e);
                }
            }
            done.push(rec);
        }
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    done.sort_by(|a, b| a.instance.cmp(&b.instance));
    write_csv(&cfg.csv, &done)?;
    Ok(done)
}
