//! Exact hypertree-width search (det-k-decomp style) and the iterative
//! width protocol.
//!
//! The search works top-down on pairs (component C, connecting set W): pick
//! a label λ of at most k edges with W ⊆ B(λ), set the bag to
//! B(λ) ∩ (C ∪ W), and recurse on the components of C minus the bag. The
//! bag rule makes the special condition hold by construction. Failed pairs
//! are cached.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::{check_hd, Decomposition, Kind, Node, Weight};
use crate::error::{Error, Result};
use crate::frac::lp_min_cover;
use crate::ghd::subedges_from;
use crate::hypergraph::{components_within, connected_components, gyo_acyclic, simplify, Hypergraph};
use crate::search::{for_each_combination, Budget, Interrupted, RunOutcome, Status};
use crate::set::VertexSet;

#[derive(Debug, Clone, Default)]
pub struct HdOptions {
    pub timeout: Option<Duration>,
    /// Skip subset/duplicate edge removal before searching.
    pub no_simplify: bool,
    /// Shuffle the candidate edge order with this seed.
    pub seed: Option<u64>,
}

/// Search tree produced by the engine, with λ as edge-pool indices.
#[derive(Debug, Clone)]
pub(crate) struct Tree {
    pub bag: VertexSet,
    pub lambda: Vec<usize>,
    pub frac: Option<Vec<(usize, Weight)>>,
    pub children: Vec<Tree>,
}

impl Tree {
    /// Flattens into decomposition nodes (pre-order, ids 0..n).
    pub(crate) fn into_nodes(self, map_edge: &dyn Fn(usize) -> usize) -> Vec<Node> {
        let mut nodes = Vec::new();
        let mut stack = vec![(self, None)];
        while let Some((t, parent)) = stack.pop() {
            let id = nodes.len();
            let cover = match &t.frac {
                Some(f) => {
                    let mut c: Vec<(usize, Weight)> = f.iter().map(|(e, w)| (map_edge(*e), *w)).collect();
                    c.sort_by_key(|x| x.0);
                    c
                }
                None => {
                    let edges: Vec<usize> = t.lambda.iter().map(|&e| map_edge(e)).collect();
                    Node::integral("", None, VertexSet::new(), &edges).cover
                }
            };
            nodes.push(Node {
                id: id.to_string(),
                parent,
                bag: t.bag,
                cover,
            });
            for c in t.children.into_iter().rev() {
                stack.push((c, Some(id)));
            }
        }
        nodes
    }
}

/// Edges the search may put into λ: the host's edges followed by subedges.
#[derive(Debug, Clone)]
pub(crate) struct EdgePool {
    pub sets: Vec<VertexSet>,
    /// Original edge each pool entry descends from.
    pub origin: Vec<usize>,
    index: HashMap<VertexSet, usize>,
    base: usize,
}

impl EdgePool {
    pub fn new(h: &Hypergraph) -> EdgePool {
        let mut pool = EdgePool {
            sets: Vec::new(),
            origin: Vec::new(),
            index: HashMap::new(),
            base: h.num_edges(),
        };
        for (j, e) in h.edges().iter().enumerate() {
            pool.sets.push(e.vertices.clone());
            pool.origin.push(h.root_edge(j));
            pool.index.entry(e.vertices.clone()).or_insert(j);
        }
        pool
    }

    /// Adds a subedge unless an equal set is already present.
    pub fn add(&mut self, vs: VertexSet, parent: usize) -> usize {
        if let Some(&i) = self.index.get(&vs) {
            return i;
        }
        let i = self.sets.len();
        self.index.insert(vs.clone(), i);
        self.sets.push(vs);
        self.origin.push(parent);
        i
    }

    /// (vertex set, parent) for every entry beyond the host's edges.
    pub fn extra(&self) -> Vec<(VertexSet, usize)> {
        (self.base..self.sets.len())
            .map(|i| (self.sets[i].clone(), self.origin[i]))
            .collect()
    }
}

pub(crate) struct LocalSubedges {
    pub k: usize,
    pub cap: usize,
    cache: HashMap<(VertexSet, VertexSet), Vec<usize>>,
    pub cap_exceeded: bool,
}

impl LocalSubedges {
    pub fn new(k: usize, cap: usize) -> Self {
        LocalSubedges {
            k,
            cap,
            cache: HashMap::new(),
            cap_exceeded: false,
        }
    }
}

pub(crate) struct FracPrune {
    pub kprime: f64,
    cache: HashMap<VertexSet, Option<Vec<(usize, Weight)>>>,
}

impl FracPrune {
    pub fn new(kprime: f64) -> Self {
        FracPrune {
            kprime,
            cache: HashMap::new(),
        }
    }
}

pub(crate) const FRAC_SLACK: f64 = 1e-6;

pub(crate) struct Engine<'h> {
    h: &'h Hypergraph,
    pub pool: EdgePool,
    k: usize,
    pub budget: Budget,
    failed: HashSet<(VertexSet, VertexSet)>,
    pub local: Option<LocalSubedges>,
    pub frac: Option<FracPrune>,
    rng: Option<ChaCha8Rng>,
}

impl<'h> Engine<'h> {
    pub fn new(h: &'h Hypergraph, k: usize, budget: Budget) -> Self {
        Engine {
            h,
            pool: EdgePool::new(h),
            k,
            budget,
            failed: HashSet::new(),
            local: None,
            frac: None,
            rng: None,
        }
    }

    pub fn with_pool(mut self, pool: EdgePool) -> Self {
        self.pool = pool;
        self
    }

    pub fn seeded(mut self, seed: Option<u64>) -> Self {
        self.rng = seed.map(ChaCha8Rng::seed_from_u64);
        self
    }

    /// Decomposes every connected component and hangs the resulting trees
    /// under the first root.
    pub fn run(&mut self) -> std::result::Result<Option<Tree>, Interrupted> {
        let comps = connected_components(self.h, &VertexSet::new());
        let mut trees = Vec::new();
        for c in comps {
            match self.decompose(&c, &VertexSet::new())? {
                Some(t) => trees.push(t),
                None => return Ok(None),
            }
        }
        let mut it = trees.into_iter();
        let mut root = match it.next() {
            Some(t) => t,
            None => return Ok(None),
        };
        root.children.extend(it);
        Ok(Some(root))
    }

    fn candidates(&mut self, comp: &VertexSet, scope: &VertexSet) -> Vec<usize> {
        if let Some(local) = self.local.as_mut() {
            let key = (comp.clone(), scope.clone());
            let extra = match local.cache.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let comp_edges = self.h.edges_touching(comp);
                    let near_vertices = self.h.vertices_of(&comp_edges);
                    let near = self.h.edges_touching(&near_vertices);
                    let owners: Vec<usize> = self.h.edges_touching(scope).iter().collect();
                    let found = subedges_from(self.h, &owners, &near, local.k, local.cap);
                    let ids: Vec<usize> = match found {
                        Ok(list) => list.into_iter().map(|(vs, p)| self.pool.add(vs, p)).collect(),
                        Err(_) => {
                            local.cap_exceeded = true;
                            Vec::new()
                        }
                    };
                    local.cache.insert(key, ids.clone());
                    ids
                }
            };
            let mut c: Vec<usize> = (0..self.h.num_edges()).collect();
            c.extend(extra);
            self.dedup_restricted(c, scope)
        } else {
            let c: Vec<usize> = (0..self.pool.sets.len()).collect();
            self.dedup_restricted(c, scope)
        }
    }

    /// Keeps, per distinct restriction e ∩ scope, the lowest pool index.
    fn dedup_restricted(&mut self, mut ids: Vec<usize>, scope: &VertexSet) -> Vec<usize> {
        ids.sort_unstable();
        let mut seen: HashSet<VertexSet> = HashSet::new();
        let mut out: Vec<usize> = ids
            .into_iter()
            .filter(|&e| {
                let r = self.pool.sets[e].intersection(scope);
                !r.is_empty() && seen.insert(r)
            })
            .collect();
        if let Some(rng) = self.rng.as_mut() {
            out.shuffle(rng);
        }
        out
    }

    fn frac_cover(&mut self, bag: &VertexSet) -> Option<Vec<(usize, Weight)>> {
        let fp = self.frac.as_mut()?;
        if let Some(c) = fp.cache.get(bag) {
            return c.clone();
        }
        let cover = lp_min_cover(self.h, bag, None).ok();
        let verdict = cover
            .filter(|c| c.weight_f64 <= fp.kprime + FRAC_SLACK)
            .map(|c| c.cover.weights.into_iter().collect::<Vec<_>>());
        fp.cache.insert(bag.clone(), verdict.clone());
        verdict
    }

    fn decompose(&mut self, comp: &VertexSet, conn: &VertexSet) -> std::result::Result<Option<Tree>, Interrupted> {
        let key = (comp.clone(), conn.clone());
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let scope = comp.union(conn);
        let cands = self.candidates(comp, &scope);
        let restricted: Vec<VertexSet> = cands.iter().map(|&e| self.pool.sets[e].intersection(&scope)).collect();
        let comp_edges: Vec<VertexSet> = self
            .h
            .edges_touching(comp)
            .iter()
            .map(|j| self.h.edge_vertices(j).clone())
            .collect();
        let k = self.k;
        let mut found: Option<Tree> = None;
        for_each_combination(cands.len(), k, |pick| {
            self.budget.tick()?;
            let mut bag = VertexSet::new();
            for &p in pick {
                bag.union_with(&restricted[p]);
            }
            if !conn.is_subset(&bag) || !bag.intersects(comp) {
                return Ok(true);
            }
            // a member adding nothing means a smaller label gives the same bag
            if pick.len() > 1 {
                let redundant = pick.iter().any(|&p| {
                    let mut rest = VertexSet::new();
                    for &q in pick.iter().filter(|&&q| q != p) {
                        rest.union_with(&restricted[q]);
                    }
                    restricted[p].is_subset(&rest)
                });
                if redundant {
                    return Ok(true);
                }
            }
            let frac = if self.frac.is_some() {
                match self.frac_cover(&bag) {
                    Some(f) => Some(f),
                    None => return Ok(true),
                }
            } else {
                None
            };
            let rest = comp.difference(&bag);
            let subcomps = components_within(&rest, comp_edges.iter());
            let mut children = Vec::with_capacity(subcomps.len());
            for sc in &subcomps {
                let touching = self.h.edges_touching(sc);
                let sub_conn = self.h.vertices_of(&touching).intersection(&bag);
                match self.decompose(sc, &sub_conn)? {
                    Some(t) => children.push(t),
                    None => return Ok(true),
                }
            }
            found = Some(Tree {
                bag,
                lambda: pick.iter().map(|&p| cands[p]).collect(),
                frac,
                children,
            });
            Ok(false)
        })?;
        if found.is_none() {
            self.failed.insert(key);
        }
        Ok(found)
    }
}

/// Decides whether `h` has an HD of width at most `k`.
pub fn decide_hw(h: &Hypergraph, k: usize, opts: &HdOptions) -> Result<RunOutcome> {
    decide_hw_with(h, k, opts, Budget::new(opts.timeout))
}

pub(crate) fn decide_hw_with(h: &Hypergraph, k: usize, opts: &HdOptions, budget: Budget) -> Result<RunOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let simplified = (!opts.no_simplify).then(|| simplify(h));
    let (work, origin): (&Hypergraph, Vec<usize>) = match &simplified {
        Some(s) => (&s.hypergraph, s.origin.clone()),
        None => (h, (0..h.num_edges()).collect()),
    };
    let mut engine = Engine::new(work, k, budget).seeded(opts.seed);
    let status = match engine.run() {
        Err(Interrupted) => Status::Timeout,
        Ok(None) => Status::No,
        Ok(Some(tree)) => {
            let nodes = tree.into_nodes(&|e| origin[e]);
            let d = Decomposition::new(Kind::Hd, nodes);
            if let Err(v) = check_hd(h, &d) {
                panic!("hd search produced an invalid decomposition: {v:?}");
            }
            Status::Yes(d)
        }
    };
    Ok(RunOutcome::finish(status, &engine.budget))
}

/// Bounds on hw from the ascending-k protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthBounds {
    pub lower: usize,
    /// `None` when no k ≤ k_max answered yes.
    pub upper: Option<usize>,
    pub witness: Option<Decomposition>,
    /// Outcome per attempted k, starting at k = 1.
    pub runs: Vec<(usize, RunOutcome)>,
}

impl WidthBounds {
    pub fn exact(&self) -> Option<usize> {
        self.upper.filter(|&u| u == self.lower)
    }
}

/// Ascends k = 1..=k_max; k = 1 is decided by acyclicity. Stops at the first
/// yes. The lower bound is one above the largest k with a definite no.
pub fn compute_hw(h: &Hypergraph, k_max: usize, opts: &HdOptions) -> Result<WidthBounds> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut runs = Vec::new();
    for k in 1..=k_max {
        let outcome = if k == 1 && !gyo_acyclic(h) {
            RunOutcome {
                status: Status::No,
                elapsed: Duration::ZERO,
                nodes_expanded: 0,
            }
        } else {
            decide_hw(h, k, opts)?
        };
        let yes = outcome.status.is_yes();
        runs.push((k, outcome));
        if yes {
            break;
        }
    }
    Ok(bounds_from_runs(runs))
}

/// Bound bookkeeping over per-k outcomes.
pub fn bounds_from_runs(runs: Vec<(usize, RunOutcome)>) -> WidthBounds {
    let upper = runs.iter().filter(|(_, r)| r.status.is_yes()).map(|(k, _)| *k).min();
    let largest_no = runs
        .iter()
        .filter(|(k, r)| r.status == Status::No && upper.is_none_or(|u| *k < u))
        .map(|(k, _)| *k)
        .max();
    let witness = upper.and_then(|u| {
        runs.iter()
            .find(|(k, _)| *k == u)
            .and_then(|(_, r)| r.status.witness().cloned())
    });
    WidthBounds {
        lower: largest_no.map(|k| k + 1).unwrap_or(1),
        upper,
        witness,
        runs,
    }
}
