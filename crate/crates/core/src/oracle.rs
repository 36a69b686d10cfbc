//! Exhaustive reference computations for small hypergraphs, independent of
//! the search engines: hw via the monotone robber and marshals game, ghw via
//! elimination orderings with integral bag covers.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::search::for_each_combination;
use crate::set::VertexSet;

pub const HW_MAX_EDGES: usize = 8;
pub const HW_MAX_VERTICES: usize = 12;
pub const GHW_MAX_EDGES: usize = 10;
pub const GHW_MAX_VERTICES: usize = 14;

fn guard(h: &Hypergraph, max_e: usize, max_v: usize) -> Result<()> {
    if h.num_edges() > max_e || h.num_vertices() > max_v {
        return Err(Error::SizeGuard(format!(
            "oracle limited to {max_e} edges / {max_v} vertices, got {} / {}",
            h.num_edges(),
            h.num_vertices()
        )));
    }
    Ok(())
}

/// Vertices reachable from `start` through the primal graph without
/// entering `blocked`.
fn reach(h: &Hypergraph, start: &VertexSet, blocked: &VertexSet) -> VertexSet {
    let mut seen = start.difference(blocked);
    let mut stack: Vec<usize> = seen.iter().collect();
    while let Some(v) = stack.pop() {
        for e in h.incident_edges(v) {
            for w in h.edge_vertices(e) {
                if !blocked.contains(w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    seen
}

fn components(h: &Hypergraph, blocked: &VertexSet) -> Vec<VertexSet> {
    let mut left = h.all_vertices().difference(blocked);
    let mut out = Vec::new();
    while let Some(v) = left.first() {
        let c = reach(h, &VertexSet::singleton(v), blocked);
        left.difference_with(&c);
        out.push(c);
    }
    out
}

/// Decides hw(H) ≤ k: k marshals, each occupying the vertices of an edge,
/// have a monotone winning strategy against the robber.
pub fn brute_force_hw_at_most(h: &Hypergraph, k: usize) -> Result<bool> {
    guard(h, HW_MAX_EDGES, HW_MAX_VERTICES)?;
    let mut moves: Vec<VertexSet> = Vec::new();
    let _ = for_each_combination(h.num_edges(), k, |pick| {
        moves.push(h.cover_union(pick.iter()));
        Ok(true)
    });
    moves.sort();
    moves.dedup();
    // positions: (marshal vertices, robber component)
    let mut positions: Vec<(VertexSet, VertexSet)> = Vec::new();
    for m in &moves {
        for c in components(h, m) {
            positions.push((m.clone(), c));
        }
    }
    let mut winning: HashMap<(VertexSet, VertexSet), bool> = positions.iter().map(|p| (p.clone(), false)).collect();
    let successors = |m: &VertexSet, c: &VertexSet, next: &VertexSet| -> Option<Vec<VertexSet>> {
        let stay = m.intersection(next);
        let r = reach(h, c, &stay);
        let mut out = Vec::new();
        for c2 in components(h, next) {
            if c2.intersects(&r) {
                if !c2.is_subset(c) {
                    return None;
                }
                out.push(c2);
            }
        }
        Some(out)
    };
    loop {
        let mut changed = false;
        for (m, c) in &positions {
            if winning[&(m.clone(), c.clone())] {
                continue;
            }
            let wins = moves.iter().any(|next| match successors(m, c, next) {
                Some(list) => list.iter().all(|c2| winning[&(next.clone(), c2.clone())]),
                None => false,
            });
            if wins {
                winning.insert((m.clone(), c.clone()), true);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let empty = VertexSet::new();
    Ok(components(h, &empty).iter().all(|c| {
        moves.iter().any(|next| match successors(&empty, c, next) {
            Some(list) => list.iter().all(|c2| winning[&(next.clone(), c2.clone())]),
            None => false,
        })
    }))
}

/// hw(H) by the marshal game, trying k = 1, 2, … up to |E|.
pub fn brute_force_hw(h: &Hypergraph) -> Result<usize> {
    guard(h, HW_MAX_EDGES, HW_MAX_VERTICES)?;
    for k in 1..=h.num_edges().max(1) {
        if brute_force_hw_at_most(h, k)? {
            return Ok(k);
        }
    }
    Ok(h.num_edges())
}

/// Smallest number of edges whose union contains `bag`.
pub fn integral_cover_number(h: &Hypergraph, bag: &VertexSet) -> Option<usize> {
    if bag.is_empty() {
        return Some(0);
    }
    let mut best = None;
    let _ = for_each_combination(h.num_edges(), h.num_edges(), |pick| {
        if bag.is_subset(&h.cover_union(pick.iter())) {
            best = Some(pick.len());
            return Ok(false);
        }
        Ok(true)
    });
    best
}

/// ghw(H): minimum over elimination orderings of the primal graph of the
/// largest integral cover number of a bag.
pub fn brute_force_ghw(h: &Hypergraph) -> Result<usize> {
    guard(h, GHW_MAX_EDGES, GHW_MAX_VERTICES)?;
    let n = h.num_vertices();
    let mut rho: HashMap<VertexSet, usize> = HashMap::new();
    let mut cost = |bag: VertexSet| -> usize {
        *rho.entry(bag.clone())
            .or_insert_with(|| integral_cover_number(h, &bag).unwrap_or(usize::MAX))
    };
    // best[S] = width of eliminating exactly the vertices of S first
    let full = 1usize << n;
    let mut best = vec![usize::MAX; full];
    best[0] = 0;
    for s in 1..full {
        let set: VertexSet = (0..n).filter(|&v| s & (1 << v) != 0).collect();
        for v in set.iter() {
            let prev = best[s & !(1 << v)];
            if prev == usize::MAX {
                continue;
            }
            let before = set.difference(&VertexSet::singleton(v));
            // v together with the uneliminated vertices reachable through `before`
            let mut through = reach_through(h, v, &before);
            through.difference_with(&before);
            let c = cost(through);
            best[s] = best[s].min(prev.max(c));
        }
    }
    Ok(best[full - 1])
}

fn reach_through(h: &Hypergraph, v: usize, inner: &VertexSet) -> VertexSet {
    let mut seen = VertexSet::singleton(v);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for e in h.incident_edges(x) {
            for w in h.edge_vertices(e) {
                if seen.insert(w) && inner.contains(w) {
                    stack.push(w);
                }
            }
        }
    }
    seen
}

pub fn brute_force_ghw_at_most(h: &Hypergraph, k: usize) -> Result<bool> {
    Ok(brute_force_ghw(h)? <= k)
}
