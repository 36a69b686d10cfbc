//! Structural properties of hypergraphs: degree, (multi-)intersection width,
//! VC-dimension, and the aggregated statistics record.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;

/// Maximum number of edges sharing a vertex.
pub fn degree(h: &Hypergraph) -> usize {
    (0..h.num_vertices()).map(|v| h.incident_edges(v).len()).max().unwrap_or(0)
}

pub fn arity(h: &Hypergraph) -> usize {
    h.edges().iter().map(|e| e.vertices.len()).max().unwrap_or(0)
}

/// Maximum |e1 ∩ e2| over distinct edges; 0 when fewer than two edges.
pub fn intersection_width(h: &Hypergraph) -> usize {
    let mut best = 0;
    for i in 0..h.num_edges() {
        let ei = h.edge_vertices(i);
        if ei.len() <= best {
            continue;
        }
        for j in (i + 1)..h.num_edges() {
            best = best.max(ei.intersection_len(h.edge_vertices(j)));
        }
    }
    best
}

/// Maximum |e1 ∩ … ∩ ec| over `c` distinct edges; 0 when fewer than `c` edges.
///
/// Combinations are extended only with edges meeting the running
/// intersection, and a branch is abandoned once it cannot beat the best
/// width found so far.
pub fn multi_intersection_width(h: &Hypergraph, c: usize) -> Result<usize> {
    if c < 2 {
        return Err(Error::InvalidArgument(format!("multi-intersection needs c >= 2, got {c}")));
    }
    if h.num_edges() < c {
        return Ok(0);
    }
    let mut best = 0;
    for first in 0..h.num_edges() {
        let inter = h.edge_vertices(first).clone();
        if inter.len() > best {
            extend_intersection(h, &inter, first, c - 1, &mut best);
        }
    }
    Ok(best)
}

fn extend_intersection(h: &Hypergraph, inter: &VertexSet, last: usize, remaining: usize, best: &mut usize) {
    if remaining == 0 {
        *best = (*best).max(inter.len());
        return;
    }
    let candidates = h.edges_touching(inter);
    for next in candidates.iter().filter(|&j| j > last) {
        let narrowed = inter.intersection(h.edge_vertices(next));
        if narrowed.len() > *best {
            extend_intersection(h, &narrowed, next, remaining - 1, best);
        }
    }
}

/// VC-dimension, exact or a lower bound when the time budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcDimension {
    pub value: usize,
    pub exact: bool,
}

impl fmt::Display for VcDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.value)
        } else {
            write!(f, ">={}", self.value)
        }
    }
}

/// Largest `d` such that some d-set X is shattered, i.e. {X ∩ e : e ∈ E}
/// contains all 2^d subsets of X (including ∅, which needs an edge disjoint
/// from X).
///
/// Candidates of size d+1 are grown from shattered d-sets by appending a
/// larger vertex, since every subset of a shattered set is shattered.
pub fn vc_dimension(h: &Hypergraph, budget: Option<Duration>) -> VcDimension {
    let deadline = budget.map(|b| Instant::now() + b);
    let n = h.num_vertices();
    let m = h.num_edges();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    let mut d = 0;
    let mut checks = 0u64;
    loop {
        let next_d = d + 1;
        if next_d >= usize::BITS as usize || m < (1usize << next_d) {
            return VcDimension { value: d, exact: true };
        }
        let mut next = Vec::new();
        for x in &frontier {
            let start = x.last().map(|&v| v + 1).unwrap_or(0);
            for v in start..n {
                checks += 1;
                if checks % 256 == 0 && deadline.is_some_and(|t| Instant::now() >= t) {
                    return VcDimension { value: d, exact: false };
                }
                let mut cand = x.clone();
                cand.push(v);
                if shatters(h, &cand) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            return VcDimension { value: d, exact: true };
        }
        frontier = next;
        d = next_d;
    }
}

/// True iff the edges of `h` shatter the vertex list `x`.
pub fn shatters(h: &Hypergraph, x: &[usize]) -> bool {
    let need = 1usize << x.len();
    if h.num_edges() < need {
        return false;
    }
    let mut seen = HashSet::with_capacity(need);
    for e in h.edges() {
        let mut mask = 0u64;
        for (i, &v) in x.iter().enumerate() {
            if e.vertices.contains(v) {
                mask |= 1 << i;
            }
        }
        seen.insert(mask);
        if seen.len() == need {
            return true;
        }
    }
    false
}

/// Row of structural statistics for one hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsRecord {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub arity: usize,
    pub degree: usize,
    pub iwidth: usize,
    pub miwidth3: usize,
    pub miwidth4: usize,
    pub vc_dim: VcDimension,
}

pub fn stats(h: &Hypergraph, vc_budget: Option<Duration>) -> StatsRecord {
    StatsRecord {
        num_vertices: h.num_vertices(),
        num_edges: h.num_edges(),
        arity: arity(h),
        degree: degree(h),
        iwidth: intersection_width(h),
        miwidth3: multi_intersection_width(h, 3).expect("c = 3 is valid"),
        miwidth4: multi_intersection_width(h, 4).expect("c = 4 is valid"),
        vc_dim: vc_dimension(h, vc_budget),
    }
}
