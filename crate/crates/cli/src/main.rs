use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hypertree::decomp::{format_weight, parse_decomposition, serialize_decomposition, weight_to_f64};
use hypertree::frac::BucketOutcome;
use hypertree::harness::{correlation_report, load_instance, read_csv, run_corpus, summarize, BenchConfig};
use hypertree::invariants::stats;
use hypertree::{
    check, decide_ghw, decide_hw, frac_improve_search, improvement_bucket, portfolio_ghw, simple_improve, Bucket,
    Decomposition, GhdOptions, HdOptions, Hypergraph, Method, RunOutcome, Status,
};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_ERROR: u8 = 4;

/// Hypertree, generalized and fractional hypertree decompositions.
#[derive(Parser)]
#[command(name = "hypertree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide hw(H) <= k and optionally write the witness.
    Hd(HdArgs),
    /// Decide ghw(H) <= k with one of the GHD algorithms or all of them raced.
    Ghd(GhdArgs),
    /// Fractionally improve an HD of width k.
    Improve(ImproveArgs),
    /// Print structural invariants of a hypergraph.
    Stats(StatsArgs),
    /// Run the benchmark protocol over a corpus directory.
    Bench(BenchArgs),
    /// Derived views of a benchmark CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct HdArgs {
    file: PathBuf,
    #[arg(short)]
    k: usize,
    /// Seconds before giving up.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_simplify: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GhdMethod {
    Global,
    Local,
    Balsep,
    Portfolio,
}

#[derive(Args)]
struct GhdArgs {
    file: PathBuf,
    #[arg(short)]
    k: usize,
    #[arg(long, value_enum)]
    method: GhdMethod,
    #[arg(long)]
    timeout: Option<f64>,
    /// Maximum number of generated subedges.
    #[arg(long)]
    cap: Option<usize>,
    /// Balanced separators without subedges (a negative answer becomes UNKNOWN).
    #[arg(long)]
    plain: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ImproveMethod {
    Simple,
    Search,
}

#[derive(Args)]
struct ImproveArgs {
    file: PathBuf,
    #[arg(short)]
    k: usize,
    /// Target fractional width.
    #[arg(long, conflicts_with = "buckets")]
    kprime: Option<f64>,
    /// Report the improvement bucket: >=1, [0.5,1), [0.1,0.5) or no.
    #[arg(long)]
    buckets: bool,
    #[arg(long, value_enum)]
    method: ImproveMethod,
    /// Existing HD to improve (simple method only).
    #[arg(long)]
    hd: Option<PathBuf>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    file: PathBuf,
    /// Seconds allowed for the VC-dimension search.
    #[arg(long)]
    vc_timeout: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    dir: Option<PathBuf>,
    /// `key = value` settings, overridden by flags given here.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tasks: Option<String>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    glob: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resume: bool,
    /// Keep lowering k for ghw after a yes at hw-1.
    #[arg(long)]
    deeper_ghw: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    correlations: bool,
    #[arg(long)]
    summary: bool,
    /// Also write the correlation grid as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    kmax: usize,
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>> {
    match s {
        None => Ok(None),
        Some(x) if x > 0.0 && x.is_finite() => Ok(Some(Duration::from_secs_f64(x))),
        Some(x) => bail!("timeout must be a positive number of seconds, got {x}"),
    }
}

fn load(path: &Path) -> Result<Hypergraph> {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    load_instance(path, name).with_context(|| format!("reading {}", path.display()))
}

fn write_witness(path: &Option<PathBuf>, h: &Hypergraph, d: &Decomposition) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, serialize_decomposition(h, d)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn report(out: &RunOutcome, extra: &str) -> u8 {
    let width = match &out.status {
        Status::Yes(d) => d.width().map(|w| format!(" width={}", format_weight(&w))).unwrap_or_default(),
        _ => String::new(),
    };
    println!(
        "{}{width}{extra} elapsed_ms={} expanded={}",
        out.status.label(),
        out.elapsed.as_millis(),
        out.nodes_expanded
    );
    match out.status {
        Status::Yes(_) => EXIT_YES,
        Status::No => EXIT_NO,
        Status::Timeout => EXIT_TIMEOUT,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn cmd_hd(a: HdArgs) -> Result<u8> {
    let h = load(&a.file)?;
    let opts = HdOptions {
        timeout: seconds(a.timeout)?,
        no_simplify: a.no_simplify,
        seed: a.seed,
    };
    let out = decide_hw(&h, a.k, &opts)?;
    if let Status::Yes(d) = &out.status {
        write_witness(&a.out, &h, d)?;
    }
    Ok(report(&out, ""))
}

fn cmd_ghd(a: GhdArgs) -> Result<u8> {
    let h = load(&a.file)?;
    let mut opts = GhdOptions {
        timeout: seconds(a.timeout)?,
        plain: a.plain,
        ..GhdOptions::default()
    };
    if let Some(cap) = a.cap {
        opts.cap = cap;
    }
    let (out, extra) = match a.method {
        GhdMethod::Global => (decide_ghw(Method::Global, &h, a.k, &opts)?, String::new()),
        GhdMethod::Local => (decide_ghw(Method::Local, &h, a.k, &opts)?, String::new()),
        GhdMethod::Balsep => (decide_ghw(Method::BalSep, &h, a.k, &opts)?, String::new()),
        GhdMethod::Portfolio => {
            let p = portfolio_ghw(&h, a.k, &opts)?;
            let winner = p.winner.map(|m| format!(" winner={m}")).unwrap_or_default();
            (p.outcome, winner)
        }
    };
    if let Status::Yes(d) = &out.status {
        write_witness(&a.out, &h, d)?;
    }
    Ok(report(&out, &extra))
}

fn bucket_of_gain(gain: f64) -> Bucket {
    const SLACK: f64 = 1e-6;
    if gain >= 1.0 - SLACK {
        Bucket::AtLeastOne
    } else if gain >= 0.5 - SLACK {
        Bucket::Half
    } else if gain >= 0.1 - SLACK {
        Bucket::Tenth
    } else {
        Bucket::No
    }
}

fn cmd_improve(a: ImproveArgs) -> Result<u8> {
    let h = load(&a.file)?;
    let hd_opts = HdOptions {
        timeout: seconds(a.timeout)?,
        ..HdOptions::default()
    };
    if a.kprime.is_none() && !a.buckets {
        bail!("one of --kprime or --buckets is required");
    }
    if a.method == ImproveMethod::Search && a.hd.is_some() {
        bail!("--hd only applies to --method simple");
    }
    match a.method {
        ImproveMethod::Simple => {
            let d = match &a.hd {
                Some(p) => {
                    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    let d = parse_decomposition(&h, &text)?;
                    if let Err(v) = check(&h, &d) {
                        bail!("{} is not a valid decomposition: {}", p.display(), v[0]);
                    }
                    d
                }
                None => match decide_hw(&h, a.k, &hd_opts)?.status {
                    Status::Yes(d) => d,
                    Status::Timeout => {
                        println!("TIMEOUT finding an HD of width {}", a.k);
                        return Ok(EXIT_TIMEOUT);
                    }
                    _ => {
                        println!("NO hypertree decomposition of width {}", a.k);
                        return Ok(EXIT_NO);
                    }
                },
            };
            let f = simple_improve(&h, &d)?;
            let width = f.width()?;
            let w = weight_to_f64(&width);
            write_witness(&a.out, &h, &f)?;
            if a.buckets {
                println!("bucket={} width={}", bucket_of_gain(a.k as f64 - w), format_weight(&width));
                return Ok(EXIT_YES);
            }
            let kprime = a.kprime.expect("checked above");
            let yes = w <= kprime + 1e-6;
            println!("{} width={}", if yes { "YES" } else { "NO" }, format_weight(&width));
            Ok(if yes { EXIT_YES } else { EXIT_NO })
        }
        ImproveMethod::Search => {
            if a.buckets {
                let BucketOutcome { bucket, timed_out, witness } = improvement_bucket(&h, a.k, &hd_opts)?;
                let note = if timed_out { " (timeout)" } else { "" };
                match &witness {
                    Some(d) => {
                        write_witness(&a.out, &h, d)?;
                        println!("bucket={bucket}{note} width={}", format_weight(&d.width()?));
                    }
                    None => println!("bucket={bucket}{note}"),
                }
                return Ok(EXIT_YES);
            }
            let out = frac_improve_search(&h, a.k, a.kprime.expect("checked above"), &hd_opts)?;
            if let Status::Yes(d) = &out.status {
                write_witness(&a.out, &h, d)?;
            }
            Ok(report(&out, ""))
        }
    }
}

fn cmd_stats(a: StatsArgs) -> Result<u8> {
    let h = load(&a.file)?;
    let s = stats(&h, seconds(a.vc_timeout)?);
    println!("vertices = {}", s.num_vertices);
    println!("edges = {}", s.num_edges);
    println!("arity = {}", s.arity);
    println!("degree = {}", s.degree);
    println!("bip = {}", s.iwidth);
    println!("bmip3 = {}", s.miwidth3);
    println!("bmip4 = {}", s.miwidth4);
    println!("vc = {}", s.vc_dim);
    println!("acyclic = {}", hypertree::gyo_acyclic(&h));
    Ok(EXIT_YES)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let mut cfg = BenchConfig::default();
    if let Some(p) = &a.config {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        cfg.apply_file(&text).with_context(|| format!("in {}", p.display()))?;
    }
    if let Some(d) = a.dir {
        cfg.corpus = d;
    }
    let flags: [(&str, Option<String>); 7] = [
        ("tasks", a.tasks),
        ("kmax", a.kmax.map(|v| v.to_string())),
        ("timeout", a.timeout.map(|v| v.to_string())),
        ("workers", a.workers.map(|v| v.to_string())),
        ("csv", a.csv.map(|p| p.display().to_string())),
        ("glob", a.glob),
        ("seed", a.seed.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.resume |= a.resume;
    cfg.deeper_ghw |= a.deeper_ghw;
    let records = run_corpus(&cfg)?;
    eprintln!("{} instances written to {}", records.len(), cfg.csv.display());
    Ok(EXIT_YES)
}

fn cmd_report(a: ReportArgs) -> Result<u8> {
    let records = read_csv(&a.csv)?;
    if !a.correlations && !a.summary {
        bail!("nothing to report: pass --correlations and/or --summary");
    }
    if a.correlations {
        let m = correlation_report(&records)?;
        println!("{}", m.to_csv());
        println!("{}", m.to_ascii());
        if let Some(p) = &a.svg {
            fs::write(p, m.to_svg()).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    if a.summary {
        print!("{}", summarize(&records, a.kmax).render());
    }
    Ok(EXIT_YES)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hd(a) => cmd_hd(a),
        Command::Ghd(a) => cmd_ghd(a),
        Command::Improve(a) => cmd_improve(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
