mod common;

use std::fs;
use std::path::Path;
use std::time::Duration;

use hypertree::harness::{discover, read_csv, run_corpus, BenchConfig, RunRecord, Task};
use hypertree::oracle::{brute_force_ghw, brute_force_hw};
use hypertree::serialize_hypergraph;

fn config(corpus: &Path, csv: &Path) -> BenchConfig {
    BenchConfig {
        corpus: corpus.to_path_buf(),
        csv: csv.to_path_buf(),
        timeout: Duration::from_secs(30),
        ..BenchConfig::default()
    }
}

fn grid_text(n: usize) -> String {
    let mut edges = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                edges.push(format!("h{r}_{c}(v{r}_{c},v{r}_{})", c + 1));
            }
            if r + 1 < n {
                edges.push(format!("v{r}_{c}(v{r}_{c},v{}_{c})", r + 1));
            }
        }
    }
    edges.join(",\n") + ".\n"
}

#[test]
fn empty_corpus_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty");
    fs::create_dir(&corpus).unwrap();
    let csv = dir.path().join("out.csv");
    let rows = run_corpus(&config(&corpus, &csv)).unwrap();
    assert!(rows.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("instance,group,"));
}

#[test]
fn widths_match_oracles_on_a_random_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let group = corpus.join("random, mixed");
    fs::create_dir_all(&group).unwrap();
    let suite = common::random_suite(0x4a55, 24, 7, 9, 4);
    for h in &suite {
        fs::write(group.join(format!("{}.hg", h.name())), serialize_hypergraph(h)).unwrap();
    }
    let csv = dir.path().join("out.csv");
    let mut cfg = config(&corpus, &csv);
    cfg.tasks = vec![Task::Hw, Task::Ghw];
    cfg.k_max = 5;
    cfg.workers = 4;
    cfg.deeper_ghw = true;
    let rows = run_corpus(&cfg).unwrap();
    assert_eq!(rows.len(), suite.len());
    for r in &rows {
        let h = suite.iter().find(|h| r.instance.ends_with(&format!("/{}.hg", h.name()))).unwrap();
        assert_eq!(r.group, "random, mixed");
        r.check_bounds().unwrap();
        let hw = brute_force_hw(h).unwrap();
        let ghw = brute_force_ghw(h).unwrap();
        assert_eq!(r.hw_exact(), Some(hw), "{}", r.instance);
        assert!(r.ghw_lb.unwrap() <= ghw && ghw <= r.ghw_ub.unwrap(), "{} ghw={ghw} {:?}", r.instance, (r.ghw_lb, r.ghw_ub));
        if hw >= 3 {
            assert_eq!(r.ghw_status, if ghw < hw { "yes" } else { "no" });
            assert!(!r.winning_method.is_empty());
        }
    }
    // commas in group names survive the round trip through quoting
    let back: Vec<RunRecord> = read_csv(&csv).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn timeouts_and_bad_files_become_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    fs::create_dir_all(&corpus).unwrap();
    fs::write(corpus.join("grid.hg"), grid_text(7)).unwrap();
    fs::write(corpus.join("broken.hg"), "e1(a,b").unwrap();
    fs::write(corpus.join("query.cq"), "ans(X) :- r(X,Y), s(Y,Z), t(Z,X).").unwrap();
    let csv = dir.path().join("out.csv");
    let mut cfg = config(&corpus, &csv);
    cfg.timeout = Duration::from_millis(20);
    cfg.k_max = 3;
    let rows = run_corpus(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    let by = |name: &str| rows.iter().find(|r| r.instance == name).unwrap();

    let broken = by("broken.hg");
    assert!(broken.hw_status.starts_with("error:"), "{}", broken.hw_status);
    assert!(broken.stats_status.starts_with("error:"));

    let grid = by("grid.hg");
    assert_eq!(grid.hw_status, "timeout");
    assert_eq!((grid.hw_lb, grid.hw_ub), (Some(2), None));
    assert_eq!(grid.ghw_status, "skip");
    assert_eq!(grid.improve_status, "skip");
    grid.check_bounds().unwrap();

    let q = by("query.cq");
    assert_eq!(q.hw_exact(), Some(2));
    assert_eq!(q.ghw_status, "implied");
    assert_eq!(q.improve_bucket, "[0.5,1)");

    let text = fs::read_to_string(&csv).unwrap();
    let grid_line = text.lines().find(|l| l.starts_with("grid.hg")).unwrap();
    assert!(grid_line.contains(",2,,"), "open upper bound is an empty cell: {grid_line}");
}

#[test]
fn discovery_filters_and_groups() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("a/deep")).unwrap();
    fs::write(dir.path().join("top.hg"), "e(a,b).").unwrap();
    fs::write(dir.path().join("a/deep/x.hg"), "e(a,b).").unwrap();
    fs::write(dir.path().join("a/notes.txt"), "").unwrap();
    fs::write(dir.path().join("a/.hidden.hg"), "").unwrap();
    let found = discover(dir.path(), "*.hg").unwrap();
    let names: Vec<(&str, &str)> = found.iter().map(|i| (i.name.as_str(), i.group.as_str())).collect();
    assert_eq!(names, vec![("a/deep/x.hg", "a"), ("top.hg", "")]);
    assert!(discover(dir.path(), "[").is_err());
}

#[test]
fn config_validation() {
    let mut c = BenchConfig::default();
    c.apply_file("workers = 3\nkmax = 4 # inline comment\n\ntasks = hw,ghw\n").unwrap();
    assert_eq!((c.workers, c.k_max), (3, 4));
    assert_eq!(c.tasks, vec![Task::Hw, Task::Ghw]);
    assert!(c.apply_file("workers 3").is_err());
    assert!(c.apply_file("colour = blue").is_err());
    assert!(c.set("timeout", "-1").is_err());
    assert!(c.set("tasks", "hw,magic").is_err());
    c.workers = 0;
    assert!(c.validate().is_err());
}
