//! Decompositions (HD, GHD, FHD), their width, and validators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;

/// Exact cover weight.
pub type Weight = Ratio<i128>;

const SNAP_TOL: f64 = 1e-6;
const MAX_DEN: i128 = 1_000_000;

/// Simplest rational within 1e-6 of `x` with denominator at most 10^6.
pub fn snap(x: f64) -> Weight {
    if !x.is_finite() {
        return Weight::zero();
    }
    let neg = x < 0.0;
    let ax = x.abs();
    let lo = (ax - SNAP_TOL).max(0.0);
    let hi = ax + SNAP_TOL;
    let r = simplest_between(lo, hi, 0).unwrap_or_else(|| {
        Weight::new((ax * MAX_DEN as f64).round() as i128, MAX_DEN)
    });
    if neg {
        -r
    } else {
        r
    }
}

fn simplest_between(lo: f64, hi: f64, depth: usize) -> Option<Weight> {
    if depth > 40 {
        return None;
    }
    let c = lo.ceil();
    if c <= hi {
        return Some(Weight::from_integer(c as i128));
    }
    let fl = lo.floor();
    let (l, h) = (lo - fl, hi - fl);
    // 0 < l < h < 1: recurse on the reciprocal interval
    let inner = simplest_between(1.0 / h, 1.0 / l, depth + 1)?;
    let r = Weight::from_integer(fl as i128) + inner.recip();
    (*r.denom() <= MAX_DEN).then_some(r)
}

pub fn weight_to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

/// Formats a weight with at most six decimals; integers print exactly.
pub fn format_weight(w: &Weight) -> String {
    if w.is_integer() {
        return w.to_integer().to_string();
    }
    let s = format!("{:.6}", weight_to_f64(w));
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn parse_weight(s: &str) -> Result<Weight> {
    let bad = || Error::MalformedDecomposition(format!("bad weight `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Weight::new(n, d));
    }
    let x: f64 = s.trim().parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(snap(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Hd,
    Ghd,
    Fhd,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Hd => "HD",
            Kind::Ghd => "GHD",
            Kind::Fhd => "FHD",
        })
    }
}

/// Weighted edge selection with its covered vertex set B(γ) and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCover {
    pub weights: BTreeMap<usize, Weight>,
    pub covered: VertexSet,
    pub weight: Weight,
}

impl EdgeCover {
    pub fn new(h: &Hypergraph, cover: &[(usize, Weight)]) -> EdgeCover {
        let mut weights: BTreeMap<usize, Weight> = BTreeMap::new();
        for (e, w) in cover {
            *weights.entry(*e).or_insert_with(Weight::zero) += *w;
        }
        let mut load: HashMap<usize, Weight> = HashMap::new();
        for (&e, w) in &weights {
            for v in h.edge_vertices(e) {
                *load.entry(v).or_insert_with(Weight::zero) += *w;
            }
        }
        let covered = load
            .into_iter()
            .filter(|(_, w)| *w >= Weight::one())
            .map(|(v, _)| v)
            .collect();
        let weight = weights.values().copied().sum();
        EdgeCover {
            weights,
            covered,
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    /// Position of the parent in `Decomposition::nodes`; `None` for the root.
    pub parent: Option<usize>,
    pub bag: VertexSet,
    /// (edge index, weight), sorted by edge index.
    pub cover: Vec<(usize, Weight)>,
}

impl Node {
    pub fn integral(id: impl Into<String>, parent: Option<usize>, bag: VertexSet, edges: &[usize]) -> Node {
        let mut cover: Vec<(usize, Weight)> = edges.iter().map(|&e| (e, Weight::one())).collect();
        cover.sort_by_key(|c| c.0);
        cover.dedup_by_key(|c| c.0);
        Node {
            id: id.into(),
            parent,
            bag,
            cover,
        }
    }

    pub fn weight(&self) -> Weight {
        self.cover.iter().map(|(_, w)| *w).sum()
    }

    pub fn cover_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.cover.iter().filter(|(_, w)| !w.is_zero()).map(|(e, _)| *e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub kind: Kind,
    pub nodes: Vec<Node>,
}

/// Which condition a violation breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Structure(String),
    /// (1): edge not contained in any bag.
    EdgeNotCovered { edge: String },
    /// (2): nodes whose bag contains the vertex are not connected.
    Disconnected { vertex: String },
    /// (3)/(3′): bag vertex not covered by the node's label.
    BagNotCovered { node: String, vertex: String },
    /// (4): vertex of B(λ_u) occurs below u but not in B_u.
    SpecialCondition { node: String, vertex: String },
    /// Weight outside {0,1} (integral kinds) or [0,1] (fractional).
    BadWeight { node: String, edge: String, weight: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure(m) => write!(f, "structure: {m}"),
            Violation::EdgeNotCovered { edge } => write!(f, "condition (1): edge {edge} is in no bag"),
            Violation::Disconnected { vertex } => {
                write!(f, "condition (2): nodes containing {vertex} are not connected")
            }
            Violation::BagNotCovered { node, vertex } => {
                write!(f, "condition (3): vertex {vertex} of node {node} is not covered")
            }
            Violation::SpecialCondition { node, vertex } => {
                write!(f, "condition (4): vertex {vertex} covered at node {node} reappears below it")
            }
            Violation::BadWeight { node, edge, weight } => {
                write!(f, "node {node}: weight {weight} of edge {edge} out of range")
            }
        }
    }
}

impl Decomposition {
    pub fn new(kind: Kind, nodes: Vec<Node>) -> Decomposition {
        Decomposition { kind, nodes }
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.parent.is_none())
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                if p < ch.len() {
                    ch[p].push(i);
                }
            }
        }
        ch
    }

    /// Max cover weight over all nodes.
    pub fn width(&self) -> Result<Weight> {
        self.nodes
            .iter()
            .map(Node::weight)
            .max()
            .ok_or_else(|| Error::MalformedDecomposition("empty decomposition".into()))
    }

    /// Checks tree shape: exactly one root, parents in range, no cycles.
    pub fn structure_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push(Violation::Structure("no nodes".into()));
            return out;
        }
        let roots = self.nodes.iter().filter(|n| n.parent.is_none()).count();
        if roots != 1 {
            out.push(Violation::Structure(format!("expected exactly one root, found {roots}")));
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                if p >= self.nodes.len() {
                    out.push(Violation::Structure(format!("node {} has a dangling parent", n.id)));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let mut cur = n.parent;
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if p == i || steps > self.nodes.len() {
                    out.push(Violation::Structure(format!("node {} lies on a parent cycle", n.id)));
                    break;
                }
                cur = self.nodes[p].parent;
            }
        }
        out
    }

    /// Nodes in pre-order from the root (children after parents).
    pub fn preorder(&self) -> Vec<usize> {
        let ch = self.children();
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<usize> = self.root().into_iter().collect();
        while let Some(u) = stack.pop() {
            order.push(u);
            for &c in ch[u].iter().rev() {
                stack.push(c);
            }
        }
        order
    }

    /// V(T_u) for every node: union of bags in the subtree of u.
    pub fn subtree_vertices(&self) -> Vec<VertexSet> {
        let mut acc: Vec<VertexSet> = self.nodes.iter().map(|n| n.bag.clone()).collect();
        for &u in self.preorder().iter().rev() {
            if let Some(p) = self.nodes[u].parent {
                let sub = acc[u].clone();
                acc[p].union_with(&sub);
            }
        }
        acc
    }

    /// Same tree rooted at `new_root`.
    pub fn reroot(&self, new_root: usize) -> Decomposition {
        let mut d = self.clone();
        let mut prev: Option<usize> = None;
        let mut cur = Some(new_root);
        while let Some(u) = cur {
            let next = d.nodes[u].parent;
            d.nodes[u].parent = prev;
            prev = Some(u);
            cur = next;
        }
        d
    }

    /// Re-expresses covers over an augmented hypergraph in terms of the
    /// original edges: a subedge's weight is credited to its parent, capped at 1.
    pub fn project(&self, augmented: &Hypergraph) -> Decomposition {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let mut acc: BTreeMap<usize, Weight> = BTreeMap::new();
                for (e, w) in &n.cover {
                    let slot = acc.entry(augmented.root_edge(*e)).or_insert_with(Weight::zero);
                    *slot = (*slot + *w).min(Weight::one());
                }
                Node {
                    id: n.id.clone(),
                    parent: n.parent,
                    bag: n.bag.clone(),
                    cover: acc.into_iter().collect(),
                }
            })
            .collect();
        Decomposition {
            kind: if self.kind == Kind::Hd { Kind::Ghd } else { self.kind },
            nodes,
        }
    }

    /// Same tree with every weight reinterpreted as a fractional cover.
    pub fn as_fractional(&self) -> Decomposition {
        Decomposition {
            kind: Kind::Fhd,
            nodes: self.nodes.clone(),
        }
    }
}

fn weight_violations(h: &Hypergraph, d: &Decomposition, integral: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    for n in &d.nodes {
        for (e, w) in &n.cover {
            if *e >= h.num_edges() {
                out.push(Violation::Structure(format!("node {} references unknown edge #{e}", n.id)));
                continue;
            }
            let ok = if integral {
                w.is_zero() || w.is_one()
            } else {
                *w >= Weight::zero() && *w <= Weight::one()
            };
            if !ok {
                out.push(Violation::BadWeight {
                    node: n.id.clone(),
                    edge: h.edge(*e).name.clone(),
                    weight: format_weight(w),
                });
            }
        }
        if let Some(v) = n.bag.iter().find(|&v| v >= h.num_vertices()) {
            out.push(Violation::Structure(format!("node {} references unknown vertex #{v}", n.id)));
        }
    }
    out
}

/// Conditions (1), (2), and (3) or (3′), collected exhaustively.
fn base_violations(h: &Hypergraph, d: &Decomposition, integral: bool) -> Vec<Violation> {
    let mut out = d.structure_violations();
    if !out.is_empty() {
        return out;
    }
    out.extend(weight_violations(h, d, integral));
    if out.iter().any(|v| matches!(v, Violation::Structure(_))) {
        return out;
    }
    // (1)
    for e in h.edges().iter().filter(|e| e.parent.is_none()) {
        if !d.nodes.iter().any(|n| e.vertices.is_subset(&n.bag)) {
            out.push(Violation::EdgeNotCovered { edge: e.name.clone() });
        }
    }
    // (2): the nodes containing v are connected iff exactly one of them has
    // a parent not containing v
    for v in 0..h.num_vertices() {
        let tops = d
            .nodes
            .iter()
            .filter(|n| n.bag.contains(v))
            .filter(|n| n.parent.is_none_or(|p| !d.nodes[p].bag.contains(v)))
            .count();
        if tops > 1 {
            out.push(Violation::Disconnected {
                vertex: h.vertex_name(v).to_string(),
            });
        }
    }
    // (3)/(3′)
    for n in &d.nodes {
        let cover = EdgeCover::new(h, &n.cover);
        for v in n.bag.difference(&cover.covered).iter() {
            out.push(Violation::BagNotCovered {
                node: n.id.clone(),
                vertex: h.vertex_name(v).to_string(),
            });
        }
    }
    out
}

fn verdict(v: Vec<Violation>) -> std::result::Result<(), Vec<Violation>> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Validates a generalized hypertree decomposition against conditions (1)–(3).
pub fn check_ghd(h: &Hypergraph, d: &Decomposition) -> std::result::Result<(), Vec<Violation>> {
    verdict(base_violations(h, d, true))
}

/// Validates a hypertree decomposition: GHD conditions plus the special
/// condition V(T_u) ∩ B(λ_u) ⊆ B_u at every node.
pub fn check_hd(h: &Hypergraph, d: &Decomposition) -> std::result::Result<(), Vec<Violation>> {
    let mut out = base_violations(h, d, true);
    if out.iter().any(|v| matches!(v, Violation::Structure(_))) {
        return Err(out);
    }
    let below = d.subtree_vertices();
    for (u, n) in d.nodes.iter().enumerate() {
        let lambda = h.cover_union(n.cover_edges().collect::<Vec<_>>().iter());
        let leak = lambda.intersection(&below[u]).difference(&n.bag);
        for v in &leak {
            out.push(Violation::SpecialCondition {
                node: n.id.clone(),
                vertex: h.vertex_name(v).to_string(),
            });
        }
    }
    verdict(out)
}

/// Validates a fractional hypertree decomposition: conditions (1), (2), (3′).
pub fn check_fhd(h: &Hypergraph, d: &Decomposition) -> std::result::Result<(), Vec<Violation>> {
    verdict(base_violations(h, d, false))
}

/// Dispatches on the decomposition's kind.
pub fn check(h: &Hypergraph, d: &Decomposition) -> std::result::Result<(), Vec<Violation>> {
    match d.kind {
        Kind::Hd => check_hd(h, d),
        Kind::Ghd => check_ghd(h, d),
        Kind::Fhd => check_fhd(h, d),
    }
}

/// Writes one `node` line per node, root first.
pub fn serialize_decomposition(h: &Hypergraph, d: &Decomposition) -> String {
    let mut out = format!("% kind={}\n", d.kind);
    for u in d.preorder() {
        let n = &d.nodes[u];
        let parent = n.parent.map(|p| d.nodes[p].id.clone()).unwrap_or_else(|| "-".into());
        let bag = h.vertex_set_names(&n.bag).join(",");
        let cover: Vec<String> = n
            .cover
            .iter()
            .map(|(e, w)| {
                let name = &h.edge(*e).name;
                if w.is_one() {
                    name.clone()
                } else {
                    format!("{name}={}", format_weight(w))
                }
            })
            .collect();
        out.push_str(&format!("node {} parent={} bag={{{}}} cover={{{}}}\n", n.id, parent, bag, cover.join(",")));
    }
    out
}

fn braced<'a>(field: &'a str, key: &str, line: usize) -> Result<&'a str> {
    field
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('{'))
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| Error::Syntax {
            line,
            col: 1,
            msg: format!("expected {key}{{...}}"),
        })
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Parses the line-oriented decomposition format. The kind comes from a
/// `% kind=` header when present, otherwise GHD for integral and FHD for
/// fractional weights.
pub fn parse_decomposition(h: &Hypergraph, text: &str) -> Result<Decomposition> {
    let mut kind: Option<Kind> = None;
    let mut raw: Vec<(String, String, VertexSet, Vec<(usize, Weight)>)> = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let ln = li + 1;
        let t = line.trim();
        if let Some(c) = t.strip_prefix('%') {
            if let Some(k) = c.trim().strip_prefix("kind=") {
                kind = Some(match k.trim() {
                    "HD" => Kind::Hd,
                    "GHD" => Kind::Ghd,
                    "FHD" => Kind::Fhd,
                    other => {
                        return Err(Error::Syntax {
                            line: ln,
                            col: 1,
                            msg: format!("unknown kind `{other}`"),
                        })
                    }
                });
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let rest = t.strip_prefix("node ").ok_or_else(|| Error::Syntax {
            line: ln,
            col: 1,
            msg: "expected `node`".into(),
        })?;
        // fields are separated by whitespace outside braces
        let mut fields = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        for (i, c) in rest.char_indices() {
            match c {
                '{' => depth += 1,
                '}' => depth -= 1,
                c if c.is_whitespace() && depth == 0 => {
                    if start < i {
                        fields.push(&rest[start..i]);
                    }
                    start = i + c.len_utf8();
                }
                _ => {}
            }
        }
        if start < rest.len() {
            fields.push(&rest[start..]);
        }
        if fields.len() != 4 {
            return Err(Error::Syntax {
                line: ln,
                col: 1,
                msg: "expected `node <id> parent=<id|-> bag={..} cover={..}`".into(),
            });
        }
        let id = fields[0].to_string();
        let parent = fields[1]
            .strip_prefix("parent=")
            .ok_or_else(|| Error::Syntax {
                line: ln,
                col: 1,
                msg: "expected parent=".into(),
            })?
            .to_string();
        let mut bag = VertexSet::new();
        for v in split_list(braced(fields[2], "bag=", ln)?) {
            bag.insert(h.vertex_index(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?);
        }
        let mut cover = Vec::new();
        for item in split_list(braced(fields[3], "cover=", ln)?) {
            let (name, w) = match item.split_once('=') {
                Some((n, w)) => (n.trim(), parse_weight(w)?),
                None => (item, Weight::one()),
            };
            let e = h.edge_index(name).ok_or_else(|| Error::UnknownEdge(name.to_string()))?;
            cover.push((e, w));
        }
        cover.sort_by_key(|c| c.0);
        raw.push((id, parent, bag, cover));
    }
    let pos: HashMap<&str, usize> = raw.iter().enumerate().map(|(i, r)| (r.0.as_str(), i)).collect();
    if pos.len() != raw.len() {
        return Err(Error::MalformedDecomposition("duplicate node id".into()));
    }
    let mut nodes = Vec::with_capacity(raw.len());
    for (id, parent, bag, cover) in &raw {
        let parent = if parent == "-" {
            None
        } else {
            Some(*pos.get(parent.as_str()).ok_or_else(|| {
                Error::MalformedDecomposition(format!("node {id} has dangling parent {parent}"))
            })?)
        };
        nodes.push(Node {
            id: id.clone(),
            parent,
            bag: bag.clone(),
            cover: cover.clone(),
        });
    }
    let kind = kind.unwrap_or_else(|| {
        let integral = nodes.iter().all(|n| n.cover.iter().all(|(_, w)| w.is_integer()));
        if integral {
            Kind::Ghd
        } else {
            Kind::Fhd
        }
    });
    let d = Decomposition { kind, nodes };
    if let Some(v) = d.structure_violations().first() {
        return Err(Error::MalformedDecomposition(v.to_string()));
    }
    Ok(d)
}
