//! Hypergraph model: named vertices and edges over dense indices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::set::{EdgeSet, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub vertices: VertexSet,
    /// For subedges added by augmentation: the original edge this one was cut from.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    name: String,
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    /// vertex -> edges containing it
    incidence: Vec<EdgeSet>,
}

impl Hypergraph {
    /// Builds a hypergraph from named edges, assigning vertex indices in
    /// first-appearance order.
    pub fn from_named_edges<S, V>(name: &str, edges: &[(S, Vec<V>)]) -> Result<Self>
    where
        S: AsRef<str>,
        V: AsRef<str>,
    {
        let mut b = HypergraphBuilder::new(name);
        for (en, vs) in edges {
            b.add_edge(en.as_ref(), vs.iter().map(|v| v.as_ref()))?;
        }
        b.build()
    }

    /// Builds a hypergraph from raw index sets; vertex `i` is named `v{i}` and
    /// edge `j` is named `e{j}`. Convenient for generated instances.
    pub fn from_index_edges(name: &str, edges: &[Vec<usize>]) -> Result<Self> {
        let named: Vec<(String, Vec<String>)> = edges
            .iter()
            .enumerate()
            .map(|(j, e)| (format!("e{j}"), e.iter().map(|v| format!("v{v}")).collect()))
            .collect();
        Self::from_named_edges(name, &named)
    }

    pub(crate) fn from_parts(name: String, vertex_names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashMap::new();
        let mut incidence = vec![EdgeSet::new(); vertex_names.len()];
        for (j, e) in edges.iter().enumerate() {
            if e.vertices.is_empty() {
                return Err(Error::EmptyEdge(e.name.clone()));
            }
            if seen.insert(e.name.clone(), j).is_some() {
                return Err(Error::DuplicateEdge(e.name.clone()));
            }
            for v in &e.vertices {
                if v >= vertex_names.len() {
                    return Err(Error::UnknownVertex(format!("#{v}")));
                }
                incidence[v].insert(j);
            }
        }
        if let Some(v) = incidence.iter().position(|i| i.is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "vertex `{}` occurs in no edge",
                vertex_names[v]
            )));
        }
        Ok(Hypergraph {
            name,
            vertex_names,
            edges,
            incidence,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> &Edge {
        &self.edges[j]
    }

    pub fn edge_vertices(&self, j: usize) -> &VertexSet {
        &self.edges[j].vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Edges containing vertex `v`.
    pub fn incident_edges(&self, v: usize) -> &EdgeSet {
        &self.incidence[v]
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.num_vertices())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.num_edges())
    }

    /// Maps edge index to the index of the original edge it descends from.
    pub fn root_edge(&self, j: usize) -> usize {
        self.edges[j].parent.unwrap_or(j)
    }

    /// B(λ): union of the vertex sets of the given edges.
    pub fn cover_union<'a, I: IntoIterator<Item = &'a usize>>(&self, edges: I) -> VertexSet {
        let mut s = VertexSet::new();
        for &j in edges {
            s.union_with(&self.edges[j].vertices);
        }
        s
    }

    /// V(E'): vertices of an edge subset.
    pub fn vertices_of(&self, edges: &EdgeSet) -> VertexSet {
        let mut s = VertexSet::new();
        for j in edges {
            s.union_with(&self.edges[j].vertices);
        }
        s
    }

    /// Edges intersecting the vertex set.
    pub fn edges_touching(&self, vs: &VertexSet) -> EdgeSet {
        let mut s = EdgeSet::new();
        for v in vs {
            s.union_with(&self.incidence[v]);
        }
        s
    }

    pub fn vertex_set_names(&self, vs: &VertexSet) -> Vec<&str> {
        vs.iter().map(|v| self.vertex_names[v].as_str()).collect()
    }

    /// Appends subedges (vertex set, parent original edge). Names are derived
    /// from the parent name and made unique.
    pub fn with_subedges(&self, subedges: &[(VertexSet, usize)]) -> Hypergraph {
        let mut h = self.clone();
        let mut taken: std::collections::HashSet<String> =
            h.edges.iter().map(|e| e.name.clone()).collect();
        for (vs, parent) in subedges {
            let base = format!("{}~{}", self.edges[*parent].name, h.edges.len());
            let mut name = base.clone();
            let mut n = 1;
            while taken.contains(&name) {
                name = format!("{base}.{n}");
                n += 1;
            }
            taken.insert(name.clone());
            let j = h.edges.len();
            for v in vs {
                h.incidence[v].insert(j);
            }
            h.edges.push(Edge {
                name,
                vertices: vs.clone(),
                parent: Some(self.root_edge(*parent)),
            });
        }
        h
    }

    /// Drops augmentation subedges, returning the original hypergraph.
    pub fn without_subedges(&self) -> Hypergraph {
        let edges: Vec<Edge> = self.edges.iter().filter(|e| e.parent.is_none()).cloned().collect();
        Hypergraph::from_parts(self.name.clone(), self.vertex_names.clone(), edges)
            .expect("original edges form a valid hypergraph")
    }
}

/// Incremental builder assigning vertex indices in first-appearance order.
#[derive(Debug, Default)]
pub struct HypergraphBuilder {
    name: String,
    vertex_index: HashMap<String, usize>,
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    edge_names: HashMap<String, usize>,
}

impl HypergraphBuilder {
    pub fn new(name: &str) -> Self {
        HypergraphBuilder {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.vertex_index.get(name) {
            return i;
        }
        let i = self.vertex_names.len();
        self.vertex_names.push(name.to_string());
        self.vertex_index.insert(name.to_string(), i);
        i
    }

    pub fn has_edge(&self, name: &str) -> bool {
        self.edge_names.contains_key(name)
    }

    pub fn add_edge<'a, I: IntoIterator<Item = &'a str>>(&mut self, name: &str, vertices: I) -> Result<usize> {
        if self.edge_names.contains_key(name) {
            return Err(Error::DuplicateEdge(name.to_string()));
        }
        let vs: VertexSet = vertices.into_iter().map(|v| self.vertex(v)).collect();
        if vs.is_empty() {
            return Err(Error::EmptyEdge(name.to_string()));
        }
        let j = self.edges.len();
        self.edge_names.insert(name.to_string(), j);
        self.edges.push(Edge {
            name: name.to_string(),
            vertices: vs,
            parent: None,
        });
        Ok(j)
    }

    pub fn build(self) -> Result<Hypergraph> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        Hypergraph::from_parts(self.name, self.vertex_names, self.edges)
    }
}

/// Connected components of the vertices in `allowed`, where two vertices are
/// adjacent when some set in `edges` contains both. Sets are restricted to
/// `allowed` first. Output is ordered by smallest member.
pub fn components_within<'a, I>(allowed: &VertexSet, edges: I) -> Vec<VertexSet>
where
    I: IntoIterator<Item = &'a VertexSet>,
{
    let verts: Vec<usize> = allowed.iter().collect();
    if verts.is_empty() {
        return Vec::new();
    }
    let n = verts[verts.len() - 1] + 1;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let mut first = None;
        for v in e.iter().filter(|&v| allowed.contains(v)) {
            match first {
                None => first = Some(v),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, v));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<VertexSet> = Vec::new();
    for &v in &verts {
        let r = find(&mut parent, v);
        let k = *slot.entry(r).or_insert_with(|| {
            out.push(VertexSet::new());
            out.len() - 1
        });
        out[k].insert(v);
    }
    out
}

/// Components of V(H) \ excluded connected through edges of H.
pub fn connected_components(h: &Hypergraph, excluded: &VertexSet) -> Vec<VertexSet> {
    let allowed = h.all_vertices().difference(excluded);
    components_within(&allowed, h.edges().iter().map(|e| &e.vertices))
}

/// A sub-hypergraph of a fixed host together with special edges, as used by
/// the recursive decomposition algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubproblemContext {
    /// Ordinary edges (host indices).
    pub edges: EdgeSet,
    pub vertices: VertexSet,
    /// Special edges: bags fixed further up that must reappear as leaves.
    pub special: Vec<VertexSet>,
    pub depth: usize,
}

impl SubproblemContext {
    pub fn root(h: &Hypergraph, special: Vec<VertexSet>) -> Self {
        let mut vertices = h.all_vertices();
        for s in &special {
            vertices.union_with(s);
        }
        SubproblemContext {
            edges: h.all_edges(),
            vertices,
            special,
            depth: 0,
        }
    }

    /// Components of V(ctx) \ sep over ordinary and special edges.
    pub fn components(&self, h: &Hypergraph, sep: &VertexSet) -> Vec<VertexSet> {
        let allowed = self.vertices.difference(sep);
        components_within(
            &allowed,
            self.edges
                .iter()
                .map(|j| h.edge_vertices(j))
                .chain(self.special.iter()),
        )
    }

    /// Child subproblem for component `c` of the separator bag `sep_bag`.
    pub fn split(&self, h: &Hypergraph, c: &VertexSet, sep_bag: &VertexSet) -> SubproblemContext {
        let edges: EdgeSet = self
            .edges
            .iter()
            .filter(|&j| h.edge_vertices(j).intersects(c))
            .collect();
        let mut special: Vec<VertexSet> = self.special.iter().filter(|s| s.intersects(c)).cloned().collect();
        special.push(sep_bag.clone());
        let mut vertices = h.vertices_of(&edges);
        for s in &special {
            vertices.union_with(s);
        }
        SubproblemContext {
            edges,
            vertices,
            special,
            depth: self.depth + 1,
        }
    }
}

/// Builds ⟨H_i, Sp_i⟩ for component `c` of `sep_bag` in `h` with special edges `sp`.
pub fn induced_subproblem(h: &Hypergraph, sp: &[VertexSet], c: &VertexSet, sep_bag: &VertexSet) -> SubproblemContext {
    SubproblemContext::root(h, sp.to_vec()).split(h, c, sep_bag)
}

/// GYO reduction: true iff the hypergraph is α-acyclic.
pub fn gyo_acyclic(h: &Hypergraph) -> bool {
    gyo_reduce(h.edges().iter().map(|e| e.vertices.clone()).collect())
}

pub(crate) fn gyo_reduce(mut edges: Vec<VertexSet>) -> bool {
    let mut alive = vec![true; edges.len()];
    loop {
        let mut changed = false;
        // vertices occurring in exactly one live edge are removed
        let mut count: HashMap<usize, usize> = HashMap::new();
        for (j, e) in edges.iter().enumerate() {
            if alive[j] {
                for v in e {
                    *count.entry(v).or_default() += 1;
                }
            }
        }
        for (j, e) in edges.iter_mut().enumerate() {
            if !alive[j] {
                continue;
            }
            let lonely: Vec<usize> = e.iter().filter(|v| count[v] == 1).collect();
            for v in lonely {
                e.remove(v);
                changed = true;
            }
        }
        // edges empty or contained in another live edge are removed
        for j in 0..edges.len() {
            if !alive[j] {
                continue;
            }
            let absorbed = edges[j].is_empty()
                || (0..edges.len()).any(|i| i != j && alive[i] && edges[j].is_subset(&edges[i]));
            if absorbed {
                alive[j] = false;
                changed = true;
            }
        }
        let live = alive.iter().filter(|&&a| a).count();
        if live == 0 {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

/// Result of [`simplify`]: the reduced hypergraph and, per kept edge, its
/// index in the input.
#[derive(Debug, Clone)]
pub struct Simplified {
    pub hypergraph: Hypergraph,
    pub origin: Vec<usize>,
}

/// Removes duplicate edges and edges contained in another edge. Vertex
/// indices are unchanged; kept edges keep their names.
pub fn simplify(h: &Hypergraph) -> Simplified {
    let m = h.num_edges();
    let mut keep = Vec::new();
    for j in 0..m {
        let ej = h.edge_vertices(j);
        let dominated = (0..m).any(|i| {
            i != j && {
                let ei = h.edge_vertices(i);
                ej.is_subset(ei) && (ej != ei || i < j)
            }
        });
        if !dominated {
            keep.push(j);
        }
    }
    let edges = keep.iter().map(|&j| h.edge(j).clone()).collect();
    let hypergraph = Hypergraph::from_parts(h.name.clone(), h.vertex_names.clone(), edges)
        .expect("simplification keeps every vertex covered");
    Simplified { hypergraph, origin: keep }
}
