use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypertree"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const TRIANGLE: &str = "e1(a,b),\ne2(b,c),\ne3(c,a).\n";
const PATH: &str = "e1(a,b),\ne2(b,c),\ne3(c,d).\n";

#[test]
fn hd_exit_codes_and_witness() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.hg", TRIANGLE);
    let out = dir.path().join("d.txt");
    let o = run(&["hd", &tri, "-k", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("YES width=2"));
    let d = fs::read_to_string(&out).unwrap();
    assert!(d.starts_with("% kind=HD"));
    assert!(d.contains("bag={a,b,c}"));

    let o = run(&["hd", &tri, "-k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NO"));

    let o = run(&["hd", &tri, "-k", "0"]);
    assert!(o.status.code().unwrap() > 2);
    let o = run(&["hd", "/nonexistent/file.hg", "-k", "2"]);
    assert!(o.status.code().unwrap() > 2);
}

#[test]
fn ghd_methods_agree_on_triangle() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.hg", TRIANGLE);
    for m in ["global", "local", "balsep", "portfolio"] {
        assert_eq!(run(&["ghd", &tri, "-k", "2", "--method", m]).status.code(), Some(0), "{m}");
        assert_eq!(run(&["ghd", &tri, "-k", "1", "--method", m]).status.code(), Some(1), "{m}");
    }
    let o = run(&["ghd", &tri, "-k", "2", "--method", "portfolio"]);
    assert!(stdout(&o).contains("winner="));
    // without subedges a refusal is not conclusive
    assert_eq!(run(&["ghd", &tri, "-k", "1", "--method", "balsep", "--plain"]).status.code(), Some(3));
}

#[test]
fn improve_simple_and_search() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.hg", TRIANGLE);
    let o = run(&["improve", &tri, "-k", "2", "--kprime", "1.5", "--method", "search"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("width=1.5"), "{}", stdout(&o));
    let o = run(&["improve", &tri, "-k", "2", "--kprime", "1.4", "--method", "search"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["improve", &tri, "-k", "2", "--buckets", "--method", "search"]);
    assert!(stdout(&o).starts_with("bucket=[0.5,1)"), "{}", stdout(&o));

    let hd = dir.path().join("hd.txt");
    run(&["hd", &tri, "-k", "2", "--out", hd.to_str().unwrap()]);
    let o = run(&["improve", &tri, "-k", "2", "--buckets", "--method", "simple", "--hd", hd.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "bucket=[0.5,1) width=1.5");

    let path = write(dir.path(), "path.hg", PATH);
    let o = run(&["improve", &path, "-k", "1", "--buckets", "--method", "simple"]);
    assert!(stdout(&o).starts_with("bucket=no"));

    let o = run(&["improve", &tri, "-k", "2", "--method", "simple"]);
    assert!(o.status.code().unwrap() > 2);
}

#[test]
fn stats_prints_invariants() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.hg", TRIANGLE);
    let s = stdout(&run(&["stats", &tri]));
    for line in ["vertices = 3", "edges = 3", "arity = 2", "degree = 2", "bip = 1", "acyclic = false"] {
        assert!(s.contains(line), "{line} missing in\n{s}");
    }
}

#[test]
fn bench_then_report() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus/toy");
    fs::create_dir_all(&corpus).unwrap();
    write(&corpus, "edge.hg", "e1(a,b).\n");
    write(&corpus, "triangle.hg", TRIANGLE);
    write(&corpus, "cycle4.hg", "e1(a,b),\ne2(b,c),\ne3(c,d),\ne4(d,a).\n");
    let csv = dir.path().join("out.csv");
    let cfg = write(
        dir.path(),
        "bench.conf",
        &format!("# toy run\ntasks = stats,hw,ghw\nkmax = 3\ntimeout = 30\nworkers = 2\ncsv = {}\n", csv.display()),
    );
    let o = run(&["bench", dir.path().join("corpus").to_str().unwrap(), "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);

    let o = run(&["report", "--csv", csv.to_str().unwrap(), "--summary", "--correlations"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("toy,1,1,2,0,"), "{s}");
    assert!(s.starts_with("column,vertices"));

    let o = run(&["report", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.code().unwrap() > 2);
}
