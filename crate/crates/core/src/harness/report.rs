use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::record::RunRecord;

pub const CORRELATION_COLUMNS: [&str; 9] = ["vertices", "edges", "arity", "degree", "bip", "bmip3", "bmip4", "vc", "hw"];

fn column(r: &RunRecord, name: &str) -> Option<f64> {
    let v = match name {
        "vertices" => r.vertices,
        "edges" => r.edges,
        "arity" => r.arity,
        "degree" => r.degree,
        "bip" => r.bip,
        "bmip3" => r.bmip3,
        "bmip4" => r.bmip4,
        "vc" => r.vc_exact(),
        "hw" => r.hw_exact(),
        _ => None,
    };
    v.map(|x| x as f64)
}

/// Pearson correlation over the pairs where both sides are present; `None`
/// when fewer than two pairs remain or either side is constant.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= f64::EPSILON || syy <= f64::EPSILON {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn correlation_report(records: &[RunRecord]) -> Result<CorrelationMatrix> {
    correlation_over(records, &CORRELATION_COLUMNS)
}

pub fn correlation_over(records: &[RunRecord], columns: &[&str]) -> Result<CorrelationMatrix> {
    if records.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 records, got {}",
            records.len()
        )));
    }
    let values = columns
        .iter()
        .map(|a| {
            columns
                .iter()
                .map(|b| {
                    let pairs: Vec<(f64, f64)> = records
                        .iter()
                        .filter_map(|r| Some((column(r, a)?, column(r, b)?)))
                        .collect();
                    pearson(&pairs)
                })
                .collect()
        })
        .collect();
    Ok(CorrelationMatrix {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        values,
    })
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == a)?;
        let j = self.columns.iter().position(|c| c == b)?;
        self.values[i][j]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("column");
        for c in &self.columns {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
        for (c, row) in self.columns.iter().zip(&self.values) {
            s.push_str(c);
            for v in row {
                match v {
                    Some(x) => {
                        let _ = write!(s, ",{x:.4}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    /// Grid of signed magnitudes: `+`/`-` then a digit 0–9 for |r|·10.
    pub fn to_ascii(&self) -> String {
        let w = self.columns.iter().map(|c| c.len()).max().unwrap_or(0).max(4);
        let mut s = format!("{:w$}", "");
        for c in &self.columns {
            let _ = write!(s, " {:>5}", &c[..c.len().min(5)]);
        }
        s.push('\n');
        for (c, row) in self.columns.iter().zip(&self.values) {
            let _ = write!(s, "{c:w$}");
            for v in row {
                let cell = match v {
                    Some(x) => format!("{}{}", if *x < 0.0 { '-' } else { '+' }, ((x.abs() * 10.0).round() as u32).min(10)),
                    None => ".".into(),
                };
                let _ = write!(s, " {cell:>5}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_svg(&self) -> String {
        let cell = 40;
        let pad = 70;
        let size = pad + cell * self.columns.len();
        let mut s = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="10">"#);
        s.push('\n');
        for (i, c) in self.columns.iter().enumerate() {
            let p = pad + i * cell + cell / 2;
            let _ = writeln!(s, r#"<text x="{p}" y="{}" text-anchor="middle">{c}</text>"#, pad - 8);
            let _ = writeln!(s, r#"<text x="{}" y="{p}" text-anchor="end">{c}</text>"#, pad - 6);
        }
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let (x, y) = (pad + j * cell, pad + i * cell);
                let fill = match v {
                    Some(r) if *r >= 0.0 => format!("rgba(200,40,40,{:.3})", r),
                    Some(r) => format!("rgba(40,40,200,{:.3})", -r),
                    None => "white".into(),
                };
                let label = v.map(|r| format!("{r:.2}")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="gray"/><text x="{}" y="{}" text-anchor="middle">{label}</text>"#,
                    x + cell / 2,
                    y + cell / 2 + 4
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Yes/no/timeout counts with the mean runtime of the definite runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cell {
    pub yes: usize,
    pub no: usize,
    pub timeout: usize,
    pub avg_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    /// (group, k) → outcome of "hw ≤ k?".
    pub hw: BTreeMap<(String, usize), Cell>,
    /// (group, hw) → outcome of "ghw ≤ hw − 1?".
    pub ghw: BTreeMap<(String, usize), Cell>,
}

fn average(xs: &[u64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<u64>() as f64 / xs.len() as f64)
}

/// Per-group tables: for each k, whether hw ≤ k was answered yes, no, or
/// ran out of time; and the ghw improvement attempts by hw. Averages cover
/// definite answers only.
pub fn summarize(records: &[RunRecord], k_max: usize) -> Summary {
    let mut hw_times: BTreeMap<(String, usize), Vec<u64>> = BTreeMap::new();
    let mut ghw_times: BTreeMap<(String, usize), Vec<u64>> = BTreeMap::new();
    let mut out = Summary::default();
    for r in records {
        if r.hw_status.is_empty() {
            continue;
        }
        let lb = r.hw_lb.unwrap_or(1);
        for k in 1..=k_max {
            let key = (r.group.clone(), k);
            let cell = out.hw.entry(key.clone()).or_default();
            if k < lb {
                cell.no += 1;
            } else if r.hw_ub.is_some_and(|u| k >= u) {
                cell.yes += 1;
                if r.hw_ub == Some(k) {
                    if let Some(ms) = r.hw_ms {
                        hw_times.entry(key).or_default().push(ms);
                    }
                }
            } else {
                cell.timeout += 1;
            }
        }
        if let Some(k) = r.hw_ub {
            let key = (r.group.clone(), k);
            match r.ghw_status.as_str() {
                "yes" | "no" => {
                    let cell = out.ghw.entry(key.clone()).or_default();
                    if r.ghw_status == "yes" {
                        cell.yes += 1;
                    } else {
                        cell.no += 1;
                    }
                    if let Some(ms) = r.ghw_ms {
                        ghw_times.entry(key).or_default().push(ms);
                    }
                }
                "timeout" => out.ghw.entry(key).or_default().timeout += 1,
                _ => {}
            }
        }
    }
    for (key, cell) in out.hw.iter_mut() {
        cell.avg_ms = hw_times.get(key).and_then(|v| average(v));
    }
    for (key, cell) in out.ghw.iter_mut() {
        cell.avg_ms = ghw_times.get(key).and_then(|v| average(v));
    }
    out
}

impl Summary {
    pub fn render(&self) -> String {
        let mut s = String::from("hw <= k\ngroup,k,yes,no,timeout,avg_yes_ms\n");
        for ((g, k), c) in &self.hw {
            let _ = writeln!(s, "{g},{k},{},{},{},{}", c.yes, c.no, c.timeout, fmt_avg(c.avg_ms));
        }
        s.push_str("\nghw <= hw-1\ngroup,hw,yes,no,timeout,avg_ms\n");
        for ((g, k), c) in &self.ghw {
            let _ = writeln!(s, "{g},{k},{},{},{},{}", c.yes, c.no, c.timeout, fmt_avg(c.avg_ms));
        }
        s
    }
}

fn fmt_avg(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.1}")).unwrap_or_default()
}
