#![allow(dead_code)]

use hypertree::lp::LinearProgram;
use hypertree::{Hypergraph, VertexSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn letters(edges: &[&str]) -> Hypergraph {
    let named: Vec<(String, Vec<String>)> = edges
        .iter()
        .map(|e| (e.to_string(), e.chars().map(|c| c.to_string()).collect()))
        .collect();
    Hypergraph::from_named_edges("t", &named).unwrap()
}

pub fn triangle() -> Hypergraph {
    letters(&["ab", "bc", "ca"])
}

pub fn ring(n: usize) -> Hypergraph {
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Hypergraph::from_index_edges(&format!("ring{n}"), &edges).unwrap()
}

fn connected(edges: &[Vec<usize>]) -> bool {
    let mut reached = vec![0usize];
    let mut used = vec![false; edges.len()];
    let mut grew = true;
    while grew {
        grew = false;
        for (j, e) in edges.iter().enumerate() {
            if !used[j] && e.iter().any(|v| reached.contains(v)) {
                used[j] = true;
                grew = true;
                for &v in e {
                    if !reached.contains(&v) {
                        reached.push(v);
                    }
                }
            }
        }
    }
    used.iter().all(|&u| u)
}

/// Connected hypergraph with at most `max_e` edges, `max_v` vertices, and
/// edges of 2..=`max_arity` vertices.
pub fn random_connected(rng: &mut ChaCha8Rng, max_e: usize, max_v: usize, max_arity: usize) -> Hypergraph {
    loop {
        let n = rng.gen_range(3..=max_v);
        let m = rng.gen_range(2..=max_e);
        let verts: Vec<usize> = (0..n).collect();
        let edges: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let size = rng.gen_range(2..=max_arity.min(n));
                let mut e: Vec<usize> = verts.choose_multiple(rng, size).copied().collect();
                e.sort();
                e
            })
            .collect();
        if connected(&edges) {
            return Hypergraph::from_index_edges("rand", &edges).unwrap();
        }
    }
}

pub fn random_suite(seed: u64, count: usize, max_e: usize, max_v: usize, max_arity: usize) -> Vec<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut h = random_connected(&mut rng, max_e, max_v, max_arity);
            h.set_name(&format!("rand{i}"));
            h
        })
        .collect()
}

/// Optimum of min c·x, A x ≥ b, 0 ≤ x ≤ 1 by enumerating polytope vertices:
/// each variable is fixed at a bound or left free, and the free ones are
/// pinned by an equal number of tight rows.
pub fn lp_by_vertices(lp: &LinearProgram) -> Option<f64> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    let mut best: Option<f64> = None;
    let mut status = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&j| status[j] == 2).collect();
        if free.len() <= m {
            for_subsets(m, free.len(), &mut |rows: &[usize]| {
                if let Some(x) = solve_pinned(lp, &status, &free, rows) {
                    if feasible(lp, &x) {
                        let v: f64 = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
                        best = Some(best.map_or(v, |b: f64| b.min(v)));
                    }
                }
            });
        }
        // next assignment in base 3
        let mut i = 0;
        while i < n && status[i] == 2 {
            status[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        status[i] += 1;
    }
    best
}

fn for_subsets(m: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), f);
}

fn solve_pinned(lp: &LinearProgram, status: &[u8], free: &[usize], rows: &[usize]) -> Option<Vec<f64>> {
    let n = lp.objective.len();
    let mut x: Vec<f64> = status.iter().map(|&s| if s == 1 { 1.0 } else { 0.0 }).collect();
    let k = free.len();
    if k == 0 {
        return Some(x);
    }
    // Gaussian elimination on the k×k system
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let (coef, b) = &lp.rows[r];
            let fixed: f64 = (0..n).filter(|j| !free.contains(j)).map(|j| coef[j] * x[j]).sum();
            let mut row: Vec<f64> = free.iter().map(|&j| coef[j]).collect();
            row.push(b - fixed);
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for i in 0..k {
            if i != col {
                let f = a[i][col] / a[col][col];
                for c in col..=k {
                    let sub = f * a[col][c];
                    a[i][c] -= sub;
                }
            }
        }
    }
    for (i, &j) in free.iter().enumerate() {
        x[j] = a[i][k] / a[i][i];
    }
    Some(x)
}

fn feasible(lp: &LinearProgram, x: &[f64]) -> bool {
    x.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v))
        && lp
            .rows
            .iter()
            .all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() >= b - 1e-9)
}

/// Random covering LP: 0/1 rows (each nonempty), right-hand sides 1, and
/// positive costs.
pub fn random_covering_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=8) as f64 / 4.0).collect();
    let mut lp = LinearProgram::new(costs);
    for _ in 0..m {
        let mut row: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).collect();
        if row.iter().all(|&v| v == 0.0) {
            row[rng.gen_range(0..n)] = 1.0;
        }
        lp.add_row(row, 1.0);
    }
    lp
}

/// Maximum fractional independent set of `target`: max Σ y_v subject to
/// Σ_{v ∈ e ∩ target} y_v ≤ 1 for every edge, by vertex enumeration.
pub fn max_fractional_independent_set(h: &Hypergraph, target: &VertexSet) -> f64 {
    let vs: Vec<usize> = target.iter().collect();
    let mut lp = LinearProgram::new(vec![-1.0; vs.len()]);
    for e in h.edges() {
        let row: Vec<f64> = vs.iter().map(|&v| if e.vertices.contains(v) { -1.0 } else { 0.0 }).collect();
        if row.iter().any(|&x| x != 0.0) {
            lp.add_row(row, -1.0);
        }
    }
    -lp_by_vertices(&lp).expect("the zero vector is feasible")
}

pub fn brute_vc(h: &Hypergraph) -> usize {
    let n = h.num_vertices();
    let mut best = 0;
    for mask in 0u64..(1u64 << n) {
        let d = mask.count_ones() as usize;
        if d <= best {
            continue;
        }
        let x: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let traces: std::collections::HashSet<Vec<bool>> = h
            .edges()
            .iter()
            .map(|e| x.iter().map(|&v| e.vertices.contains(v)).collect())
            .collect();
        if traces.len() == 1 << d {
            best = d;
        }
    }
    best
}

pub fn brute_miwidth(h: &Hypergraph, c: usize) -> usize {
    let m = h.num_edges();
    let mut best = 0;
    for_subsets(m, c, &mut |pick: &[usize]| {
        let mut inter = h.edge_vertices(pick[0]).clone();
        for &j in &pick[1..] {
            inter.intersect_with(h.edge_vertices(j));
        }
        best = best.max(inter.len());
    });
    best
}
