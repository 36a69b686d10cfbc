use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One CSV row: everything measured for one instance.
///
/// Unknown or unbounded values are empty cells; an unbounded `hw_ub` always
/// comes with a non-`exact` `hw_status`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub group: String,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub arity: Option<usize>,
    pub degree: Option<usize>,
    pub bip: Option<usize>,
    pub bmip3: Option<usize>,
    pub bmip4: Option<usize>,
    /// Exact value, or `≥L` when the budget ran out.
    pub vc: String,
    pub hw_lb: Option<usize>,
    pub hw_ub: Option<usize>,
    pub ghw_lb: Option<usize>,
    pub ghw_ub: Option<usize>,
    pub improve_bucket: String,
    pub winning_method: String,
    pub stats_status: String,
    pub hw_status: String,
    pub ghw_status: String,
    pub improve_status: String,
    pub stats_ms: Option<u64>,
    pub hw_ms: Option<u64>,
    pub ghw_ms: Option<u64>,
    pub improve_ms: Option<u64>,
}

pub const RUNTIME_COLUMNS: [&str; 4] = ["stats_ms", "hw_ms", "ghw_ms", "improve_ms"];

impl RunRecord {
    pub fn new(instance: &str, group: &str) -> Self {
        RunRecord {
            instance: instance.to_string(),
            group: group.to_string(),
            ..Default::default()
        }
    }

    /// Exact VC-dimension, if known.
    pub fn vc_exact(&self) -> Option<usize> {
        self.vc.parse().ok()
    }

    /// Exact hw, if the bounds meet.
    pub fn hw_exact(&self) -> Option<usize> {
        match (self.hw_lb, self.hw_ub) {
            (Some(l), Some(u)) if l == u => Some(u),
            _ => None,
        }
    }

    pub fn ghw_exact(&self) -> Option<usize> {
        match (self.ghw_lb, self.ghw_ub) {
            (Some(l), Some(u)) if l == u => Some(u),
            _ => None,
        }
    }

    /// Copy with the timing-dependent columns cleared: runtimes and the
    /// portfolio winner, which depends on which thread finishes first.
    pub fn without_runtimes(&self) -> RunRecord {
        RunRecord {
            winning_method: String::new(),
            stats_ms: None,
            hw_ms: None,
            ghw_ms: None,
            improve_ms: None,
            ..self.clone()
        }
    }

    /// Bound consistency: lb ≤ ub for hw and ghw, and ghw_ub ≤ hw_ub.
    pub fn check_bounds(&self) -> std::result::Result<(), String> {
        let le = |a: Option<usize>, b: Option<usize>, what: &str| match (a, b) {
            (Some(x), Some(y)) if x > y => Err(format!("{}: {what} ({x} > {y})", self.instance)),
            _ => Ok(()),
        };
        le(self.hw_lb, self.hw_ub, "hw_lb > hw_ub")?;
        le(self.ghw_lb, self.ghw_ub, "ghw_lb > ghw_ub")?;
        le(self.ghw_ub, self.hw_ub, "ghw_ub > hw_ub")?;
        le(self.ghw_lb, self.hw_lb.max(self.hw_ub), "ghw_lb > hw")?;
        Ok(())
    }
}

/// Folds a generalized-width answer at k−1 into the record: a definite no
/// there also refutes an HD of width k−1, so hw_lb rises to k when hw_ub = k.
pub fn merge_ghw_answer(rec: &mut RunRecord, k_minus_one: usize, yes: bool) {
    let k = k_minus_one + 1;
    if yes {
        rec.ghw_ub = Some(rec.ghw_ub.map_or(k_minus_one, |u| u.min(k_minus_one)));
    } else {
        rec.ghw_lb = Some(rec.ghw_lb.map_or(k, |l| l.max(k)));
        if rec.hw_ub == Some(k) {
            rec.hw_lb = Some(rec.hw_lb.map_or(k, |l| l.max(k)));
            assert!(rec.hw_lb <= rec.hw_ub, "merged hw bounds crossed for {}", rec.instance);
        }
    }
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let file = File::create(path)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    if records.is_empty() {
        w.write_record(header())?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn header() -> Vec<&'static str> {
    vec![
        "instance",
        "group",
        "vertices",
        "edges",
        "arity",
        "degree",
        "bip",
        "bmip3",
        "bmip4",
        "vc",
        "hw_lb",
        "hw_ub",
        "ghw_lb",
        "ghw_ub",
        "improve_bucket",
        "winning_method",
        "stats_status",
        "hw_status",
        "ghw_status",
        "improve_status",
        "stats_ms",
        "hw_ms",
        "ghw_ms",
        "improve_ms",
    ]
}

/// Reads every complete row. Bytes after the last newline are an
/// interrupted append and are ignored.
pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut bytes = std::fs::read(path)?;
    let end = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    bytes.truncate(end);
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let mut out = Vec::new();
    for row in rdr.deserialize::<RunRecord>() {
        out.push(row?);
    }
    Ok(out)
}

/// Appends rows to a CSV, writing the header first when the file is new or
/// empty.
pub struct Appender {
    inner: BufWriter<File>,
}

impl Appender {
    pub fn open(path: &Path) -> Result<Appender> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut a = Appender {
            inner: BufWriter::new(file),
        };
        if fresh {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header())?;
            a.raw(&w.into_inner().map_err(|e| Error::Io(e.to_string()))?)?;
        }
        Ok(a)
    }

    pub fn append(&mut self, r: &RunRecord) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(r)?;
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(self.raw(&bytes)?)
    }

    fn raw(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.inner.write_all(bytes)?;
        self.inner.flush()
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
