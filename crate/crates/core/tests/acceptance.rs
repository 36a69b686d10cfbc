//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line
//! (run with `--nocapture` to see them) and fails when its criterion fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hypertree::decomp::Violation;
use hypertree::ghd::Method;
use hypertree::harness::{run_corpus, BenchConfig, RunRecord, Task};
use hypertree::hypergraph::Hypergraph;
use hypertree::lp::LinearProgram;
use hypertree::oracle::{brute_force_ghw, brute_force_hw};
use hypertree::{
    check, check_ghd, check_hd, decide_ghw, decide_hw, frac_improve_search, invariants, lp_min_cover, simple_improve,
    Decomposition, GhdOptions, HdOptions, Kind, Node, Status, Weight,
};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const SUITE_SEED: u64 = 0x5eed_2024;
const LP_TOL: f64 = 1e-6;
const HW_BUDGET: Duration = Duration::from_secs(120);
const GHW_BUDGET: Duration = Duration::from_secs(600);
const TRIANGLE_BUDGET: Duration = Duration::from_secs(1);
const BALSEP_BUDGET: Duration = Duration::from_secs(1);

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn to_f64(w: Weight) -> f64 {
    w.to_f64().unwrap()
}

#[test]
fn criterion_01_hw_matches_marshal_game() {
    let suite = random_suite(SUITE_SEED, 200, 6, 8, 4);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for h in &suite {
        let hw = brute_force_hw(h).unwrap();
        for k in 1..=3 {
            let out = decide_hw(h, k, &HdOptions::default()).unwrap();
            if let Some(d) = out.status.witness() {
                assert_eq!(check_hd(h, d), Ok(()));
            }
            if out.status.is_yes() != (hw <= k) {
                mismatches.push(format!("{} k={k} hw={hw}", h.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        mismatches.is_empty() && elapsed < HW_BUDGET,
        &format!("{} instances x 3 k, {} mismatches {:?}, {elapsed:.2?}", suite.len(), mismatches.len(), mismatches.first()),
    );
}

#[test]
fn criterion_02_ghw_methods_match_elimination_oracle() {
    let suite = random_suite(SUITE_SEED, 100, 6, 8, 4);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let opts = GhdOptions::default();
    for h in &suite {
        let ghw = brute_force_ghw(h).unwrap();
        for k in 1..=3 {
            for m in Method::ALL {
                let out = decide_ghw(m, h, k, &opts).unwrap();
                let witness_ok = out.status.witness().map_or(true, |d| {
                    check_ghd(h, d).is_ok() && d.width().unwrap() <= Weight::from_integer(k as i128)
                });
                if out.status.is_yes() != (ghw <= k) || !witness_ok || !out.status.is_definite() {
                    mismatches.push(format!("{} {m} k={k} ghw={ghw} got {}", h.name(), out.status));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        mismatches.is_empty() && elapsed < GHW_BUDGET,
        &format!("{} instances x 3 k x 3 methods, {} mismatches {:?}, {elapsed:.2?}", suite.len(), mismatches.len(), mismatches.first()),
    );
}

fn decided_widths(h: &Hypergraph) -> (usize, usize) {
    (brute_force_hw(h).unwrap(), brute_force_ghw(h).unwrap())
}

#[test]
fn criterion_03_small_hw_means_equal_ghw() {
    let suite = random_suite(SUITE_SEED, 200, 6, 8, 4);
    let mut checked = 0;
    let mut violations = Vec::new();
    for h in &suite {
        let (hw, ghw) = decided_widths(h);
        if hw <= 2 {
            checked += 1;
            // the solvers agree with the oracle on the instances in scope
            let solver_ghw = (1..=hw)
                .find(|&k| decide_ghw(Method::Global, h, k, &GhdOptions::default()).unwrap().status.is_yes())
                .unwrap();
            if ghw != hw || solver_ghw != hw {
                violations.push(h.name().to_string());
            }
        }
    }
    report(3, violations.is_empty() && checked > 0, &format!("{checked} instances with hw <= 2, violations {violations:?}"));
}

#[test]
fn criterion_04_width_chain() {
    let suite = random_suite(SUITE_SEED, 200, 6, 8, 4);
    let mut violations = Vec::new();
    for h in &suite {
        let (hw, ghw) = decided_widths(h);
        let out = decide_ghw(Method::Global, h, ghw, &GhdOptions::default()).unwrap();
        let d = out.status.witness().expect("ghw is attainable");
        let fd = simple_improve(h, d).unwrap();
        assert_eq!(check(h, &fd), Ok(()));
        let fhw_ub = to_f64(fd.width().unwrap());
        let ok = fhw_ub <= ghw as f64 + LP_TOL && ghw <= hw && hw <= 3 * ghw + 1;
        if !ok {
            violations.push(format!("{}: fhw_ub={fhw_ub} ghw={ghw} hw={hw}", h.name()));
        }
    }
    report(4, violations.is_empty(), &format!("{} instances, violations {violations:?}", suite.len()));
}

#[test]
fn criterion_05_triangle_end_to_end() {
    let start = Instant::now();
    let h = triangle();
    let o = HdOptions::default();
    let hw = (1..=3).find(|&k| decide_hw(&h, k, &o).unwrap().status.is_yes()).unwrap();
    let ghw = (1..=3)
        .find(|&k| decide_ghw(Method::BalSep, &h, k, &GhdOptions::default()).unwrap().status.is_yes())
        .unwrap();
    let d = decide_hw(&h, 2, &o).unwrap().status.witness().cloned().unwrap();
    let simple = to_f64(simple_improve(&h, &d).unwrap().width().unwrap());
    let yes = frac_improve_search(&h, 2, 1.5, &o).unwrap();
    let no = frac_improve_search(&h, 2, 1.4, &o).unwrap();
    let elapsed = start.elapsed();
    let ok = hw == 2
        && ghw == 2
        && (simple - 1.5).abs() <= LP_TOL
        && yes.status.is_yes()
        && no.status == Status::No
        && elapsed < TRIANGLE_BUDGET;
    report(
        5,
        ok,
        &format!("hw={hw} ghw={ghw} simple={simple} k'=1.5:{} k'=1.4:{} {elapsed:.2?}", yes.status, no.status),
    );
}

#[test]
fn criterion_06_balsep_refutes_rings_quickly() {
    let h = ring(12);
    let start = Instant::now();
    let out = decide_ghw(Method::BalSep, &h, 1, &GhdOptions::default()).unwrap();
    let elapsed = start.elapsed();
    report(
        6,
        out.status == Status::No && elapsed < BALSEP_BUDGET,
        &format!("12-edge ring, k=1: {} in {elapsed:.2?}", out.status),
    );
}

fn reroot_regression() -> (Hypergraph, Decomposition) {
    let h = letters(&["abc", "cd", "de"]);
    let set = |s: &str| s.chars().map(|c| h.vertex_index(&c.to_string()).unwrap()).collect();
    let d = Decomposition::new(
        Kind::Hd,
        vec![
            Node::integral("top", None, set("abc"), &[0]),
            Node::integral("mid", Some(0), set("c"), &[0]),
            Node::integral("low", Some(1), set("cde"), &[1, 2]),
        ],
    );
    (h, d)
}

#[test]
fn criterion_07_validators_and_reroot_regression() {
    let suite = random_suite(SUITE_SEED ^ 7, 60, 6, 8, 4);
    let mut emitted = 0;
    let mut invalid = Vec::new();
    let mut record = |h: &Hypergraph, d: Option<&Decomposition>, what: &str| {
        if let Some(d) = d {
            emitted += 1;
            if check(h, d).is_err() {
                invalid.push(format!("{} {what}", h.name()));
            }
        }
    };
    for h in &suite {
        for k in 1..=3 {
            let hd = decide_hw(h, k, &HdOptions::default()).unwrap();
            record(h, hd.status.witness(), "hd");
            if let Some(d) = hd.status.witness() {
                let fd = simple_improve(h, d).unwrap();
                record(h, Some(&fd), "simple");
            }
            for m in Method::ALL {
                let g = decide_ghw(m, h, k, &GhdOptions::default()).unwrap();
                record(h, g.status.witness(), m.name());
            }
            let f = frac_improve_search(h, k, k as f64 - 0.5, &HdOptions::default()).unwrap();
            record(h, f.status.witness(), "frac");
        }
    }
    let (h, d) = reroot_regression();
    let before = check_hd(&h, &d);
    let after = check_hd(&h, &d.reroot(2));
    let detected = matches!(&after, Err(v) if v.iter().any(|x| matches!(x, Violation::SpecialCondition { node, .. } if node == "mid")));
    let still_ghd = check_ghd(&h, &d.reroot(2)).is_ok();
    report(
        7,
        invalid.is_empty() && emitted > 0 && before.is_ok() && detected && still_ghd,
        &format!("{emitted} witnesses, {} invalid; reroot detected: {detected}", invalid.len()),
    );
}

#[test]
fn criterion_08_lp_against_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lp: LinearProgram = random_covering_lp(&mut rng, 8, 6);
        let simplex = lp.solve().unwrap().value;
        let exact = lp_by_vertices(&lp).unwrap();
        worst = worst.max((simplex - exact).abs());
    }
    let h = triangle();
    let dual = max_fractional_independent_set(&h, &h.all_vertices());
    let primal = lp_min_cover(&h, &h.all_vertices(), None).unwrap().weight_f64;
    let ok = worst <= LP_TOL && (dual - 1.5).abs() <= LP_TOL && (primal - 1.5).abs() <= LP_TOL;
    report(8, ok, &format!("max |simplex - enumeration| = {worst:.2e}; triangle dual {dual}, primal {primal}"));
}

#[test]
fn criterion_09_invariants_match_brute_force() {
    let suite = random_suite(SUITE_SEED ^ 9, 150, 10, 12, 5);
    let mut bad = Vec::new();
    for h in suite.iter().filter(|h| h.num_vertices() <= 12) {
        let vc = invariants::vc_dimension(h, None);
        let ok = vc.exact
            && vc.value == brute_vc(h)
            && invariants::intersection_width(h) == brute_miwidth(h, 2)
            && invariants::multi_intersection_width(h, 3).unwrap() == brute_miwidth(h, 3)
            && invariants::multi_intersection_width(h, 4).unwrap() == brute_miwidth(h, 4);
        if !ok {
            bad.push(h.name().to_string());
        }
    }
    report(9, bad.is_empty(), &format!("{} instances, mismatches {bad:?}", suite.len()));
}

fn toy_corpus(dir: &std::path::Path) {
    std::fs::create_dir_all(dir.join("toy")).unwrap();
    std::fs::write(dir.join("toy/edge.hg"), "e(a,b).\n").unwrap();
    std::fs::write(dir.join("toy/triangle.hg"), "r(a,b),\ns(b,c),\nt(c,a).\n").unwrap();
    std::fs::write(dir.join("toy/cycle4.hg"), "r(a,b), s(b,c), t(c,d), u(d,a).\n").unwrap();
}

fn stripped(rs: &[RunRecord]) -> Vec<RunRecord> {
    rs.iter().map(|r| r.without_runtimes()).collect()
}

fn csv_without_runtimes(path: &std::path::Path) -> Vec<RunRecord> {
    stripped(&hypertree::harness::read_csv(path).unwrap())
}

#[test]
fn criterion_10_harness_determinism_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    let cfg = |workers: usize, name: &str| BenchConfig {
        corpus: corpus.clone(),
        tasks: vec![Task::Stats, Task::Hw, Task::Ghw, Task::Improve],
        k_max: 4,
        timeout: Duration::from_secs(30),
        workers,
        csv: dir.path().join(name),
        ..BenchConfig::default()
    };
    let serial = run_corpus(&cfg(1, "serial.csv")).unwrap();
    let parallel = run_corpus(&cfg(8, "parallel.csv")).unwrap();
    let same = stripped(&serial) == stripped(&parallel)
        && csv_without_runtimes(&dir.path().join("serial.csv")) == csv_without_runtimes(&dir.path().join("parallel.csv"));
    let widths: Vec<(Option<usize>, Option<usize>)> = serial.iter().map(|r| (r.hw_exact(), r.ghw_exact())).collect();
    // rows sort as cycle4, edge, triangle
    let widths_ok = widths == vec![(Some(2), Some(2)), (Some(1), Some(1)), (Some(2), Some(2))];

    // simulate a kill: keep the header, one row, and half of the next
    let path = dir.path().join("resumed.csv");
    std::fs::copy(dir.path().join("serial.csv"), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let partial = format!("{}\n{}\n{}", lines[0], lines[1], &lines[2][..lines[2].len() / 2]);
    std::fs::write(&path, partial).unwrap();
    let mut resume = cfg(2, "resumed.csv");
    resume.resume = true;
    let resumed = run_corpus(&resume).unwrap();
    let kept_first = resumed[0] == serial[0];
    let resume_ok = stripped(&resumed) == stripped(&serial) && csv_without_runtimes(&path) == stripped(&serial) && kept_first;
    let bounds_ok = serial.iter().all(|r| r.check_bounds().is_ok());
    report(
        10,
        same && widths_ok && resume_ok && bounds_ok,
        &format!("workers 1 vs 8 identical: {same}; widths {widths:?}; resume identical: {resume_ok}"),
    );
}

#[test]
fn criterion_11_corpus_spot_check() {
    let Some(dir) = std::env::var_os("HYPERBENCH_CQ_DIR").map(PathBuf::from) else {
        println!("criterion 11: SKIP (set HYPERBENCH_CQ_DIR to a CQ-Application corpus directory)");
        return;
    };
    let cfg = BenchConfig {
        corpus: dir.clone(),
        tasks: vec![Task::Hw],
        k_max: 3,
        timeout: Duration::from_secs(3600),
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        csv: std::env::temp_dir().join("criterion11.csv"),
        ..BenchConfig::default()
    };
    let rows = run_corpus(&cfg).unwrap();
    let failing: Vec<&str> = rows
        .iter()
        .filter(|r| r.hw_ub.map_or(true, |u| u > 3))
        .map(|r| r.instance.as_str())
        .collect();
    report(
        11,
        !rows.is_empty() && failing.is_empty(),
        &format!("{} instances, {} without hw <= 3: {:?}", rows.len(), failing.len(), failing.iter().take(5).collect::<Vec<_>>()),
    );
}
