//! Generalized hypertree width: subedge augmentation (global and local),
//! the balanced-separator recursion, and a portfolio racing all three.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use crate::decomp::{check_ghd, check_hd, Decomposition, Kind, Node};
use crate::error::{Error, Result};
use crate::hd::{EdgePool, Engine, LocalSubedges};
use crate::hypergraph::{simplify, Hypergraph, Simplified, SubproblemContext};
use crate::search::{for_each_combination, Budget, Interrupted, RunOutcome, Status};
use crate::set::{EdgeSet, VertexSet};

pub const DEFAULT_SUBEDGE_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct GhdOptions {
    pub timeout: Option<Duration>,
    /// Maximum number of distinct subedges generated.
    pub cap: usize,
    /// Balanced separators without subedge augmentation; "no" becomes unknown.
    pub plain: bool,
    pub no_simplify: bool,
}

impl Default for GhdOptions {
    fn default() -> Self {
        GhdOptions {
            timeout: None,
            cap: DEFAULT_SUBEDGE_CAP,
            plain: false,
            no_simplify: false,
        }
    }
}

/// Subedges f(H,k) with the parent edge each one was cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubedgeSet {
    pub subedges: Vec<(VertexSet, usize)>,
    pub cap: usize,
}

/// All nonempty subsets of e ∩ (e1 ∪ … ∪ ej) for e in `owners` and
/// e1..ej (j ≤ k) in `partners` minus e, excluding sets equal to an edge of
/// `h`. Only maximal intersections are expanded; the first (lowest-index)
/// parent wins on duplicates.
pub(crate) fn subedges_from(
    h: &Hypergraph,
    owners: &[usize],
    partners: &EdgeSet,
    k: usize,
    cap: usize,
) -> Result<Vec<(VertexSet, usize)>> {
    let existing: HashSet<&VertexSet> = h.edges().iter().map(|e| &e.vertices).collect();
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut out = Vec::new();
    for &e in owners {
        let ev = h.edge_vertices(e);
        // restrictions of partners to e, keeping only maximal ones
        let mut parts: Vec<VertexSet> = partners
            .iter()
            .filter(|&p| p != e)
            .map(|p| h.edge_vertices(p).intersection(ev))
            .filter(|r| !r.is_empty())
            .collect();
        parts.sort_by_key(|r| std::cmp::Reverse(r.len()));
        parts.dedup();
        let mut maximal: Vec<VertexSet> = Vec::new();
        for r in parts {
            if !maximal.iter().any(|m| r.is_subset(m)) {
                maximal.push(r);
            }
        }
        let mut tops: Vec<VertexSet> = Vec::new();
        if maximal.len() <= k {
            let mut u = VertexSet::new();
            for r in &maximal {
                u.union_with(r);
            }
            if !u.is_empty() {
                tops.push(u);
            }
        } else {
            let mut unions: HashSet<VertexSet> = HashSet::new();
            let _ = for_each_combination(maximal.len(), k, |pick| {
                if pick.len() == k {
                    let mut u = VertexSet::new();
                    for &p in pick {
                        u.union_with(&maximal[p]);
                    }
                    unions.insert(u);
                }
                Ok(true)
            });
            let mut unions: Vec<VertexSet> = unions.into_iter().collect();
            unions.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
            for u in unions {
                if !tops.iter().any(|t| u.is_subset(t)) {
                    tops.push(u);
                }
            }
        }
        for top in tops {
            let members: Vec<usize> = top.iter().collect();
            if members.len() >= 40 || (1usize << members.len()) - 1 > cap {
                return Err(Error::SubedgeCap(cap));
            }
            for mask in 1u64..(1u64 << members.len()) {
                let sub: VertexSet = members
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                if existing.contains(&sub) || !seen.insert(sub.clone()) {
                    continue;
                }
                out.push((sub, e));
                if out.len() > cap {
                    return Err(Error::SubedgeCap(cap));
                }
            }
        }
    }
    Ok(out)
}

/// f(H,k): subsets of intersections of each edge with unions of at most k
/// other edges.
pub fn subedge_closure_global(h: &Hypergraph, k: usize, cap: usize) -> Result<SubedgeSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let owners: Vec<usize> = (0..h.num_edges()).collect();
    let subedges = subedges_from(h, &owners, &h.all_edges(), k, cap)?;
    Ok(SubedgeSet { subedges, cap })
}

fn prepare(h: &Hypergraph, no_simplify: bool) -> Simplified {
    if no_simplify {
        Simplified {
            hypergraph: h.clone(),
            origin: (0..h.num_edges()).collect(),
        }
    } else {
        simplify(h)
    }
}

/// Turns a search result over the augmented pool into a validated GHD of `h`.
fn finish_witness(h: &Hypergraph, s: &Simplified, pool: &EdgePool, tree: crate::hd::Tree) -> Decomposition {
    let augmented = s.hypergraph.with_subedges(&pool.extra());
    let d_aug = Decomposition::new(Kind::Hd, tree.into_nodes(&|e| e));
    if let Err(v) = check_hd(&augmented, &d_aug) {
        panic!("augmented witness is not an HD: {v:?}");
    }
    let mut d = d_aug.project(&augmented);
    for n in &mut d.nodes {
        let edges: Vec<usize> = n.cover_edges().map(|e| s.origin[e]).collect();
        n.cover = Node::integral("", None, VertexSet::new(), &edges).cover;
    }
    if let Err(v) = check_ghd(h, &d) {
        panic!("projected witness is not a GHD: {v:?}");
    }
    d
}

/// GHD decision via hw of H' = H + f(H,k).
pub fn decide_ghw_global(h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<RunOutcome> {
    decide_ghw_global_with(h, k, opts, Budget::new(opts.timeout))
}

fn decide_ghw_global_with(h: &Hypergraph, k: usize, opts: &GhdOptions, budget: Budget) -> Result<RunOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let s = prepare(h, opts.no_simplify);
    let f = subedge_closure_global(&s.hypergraph, k, opts.cap)?;
    let mut pool = EdgePool::new(&s.hypergraph);
    for (vs, p) in f.subedges {
        pool.add(vs, p);
    }
    let mut engine = Engine::new(&s.hypergraph, k, budget).with_pool(pool);
    let status = match engine.run() {
        Err(Interrupted) => Status::Timeout,
        Ok(None) => Status::No,
        Ok(Some(tree)) => Status::Yes(finish_witness(h, &s, &engine.pool, tree)),
    };
    Ok(RunOutcome::finish(status, &engine.budget))
}

/// GHD decision where subedges are generated per search node, only from
/// edges near the component still to be decomposed.
pub fn decide_ghw_local(h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<RunOutcome> {
    decide_ghw_local_with(h, k, opts, Budget::new(opts.timeout))
}

fn decide_ghw_local_with(h: &Hypergraph, k: usize, opts: &GhdOptions, budget: Budget) -> Result<RunOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let s = prepare(h, opts.no_simplify);
    let mut engine = Engine::new(&s.hypergraph, k, budget);
    engine.local = Some(LocalSubedges::new(k, opts.cap));
    let result = engine.run();
    let capped = engine.local.as_ref().is_some_and(|l| l.cap_exceeded);
    let status = match result {
        Err(Interrupted) => Status::Timeout,
        Ok(None) if capped => return Err(Error::SubedgeCap(opts.cap)),
        Ok(None) => Status::No,
        Ok(Some(tree)) => Status::Yes(finish_witness(h, &s, &engine.pool, tree)),
    };
    Ok(RunOutcome::finish(status, &engine.budget))
}

/// True iff every component of V(ctx) \ B(λ) meets at most half of the
/// subproblem's ordinary edges. Special edges never count toward size.
pub fn is_balanced_separator(h: &Hypergraph, ctx: &SubproblemContext, lambda: &[usize]) -> bool {
    let sep = h.cover_union(lambda);
    balanced(h, ctx, &ctx.components(h, &sep))
}

fn balanced(h: &Hypergraph, ctx: &SubproblemContext, comps: &[VertexSet]) -> bool {
    let total = ctx.edges.len();
    comps.iter().all(|c| {
        let size = ctx.edges.iter().filter(|&j| h.edge_vertices(j).intersects(c)).count();
        2 * size <= total
    })
}

#[derive(Debug, Clone)]
enum Label {
    Sep(Vec<usize>),
    Special(VertexSet),
}

#[derive(Debug, Clone)]
struct Frag {
    bags: Vec<VertexSet>,
    labels: Vec<Label>,
    adj: Vec<Vec<usize>>,
}

impl Frag {
    fn empty() -> Frag {
        Frag {
            bags: Vec::new(),
            labels: Vec::new(),
            adj: Vec::new(),
        }
    }

    fn push(&mut self, bag: VertexSet, label: Label) -> usize {
        self.bags.push(bag);
        self.labels.push(label);
        self.adj.push(Vec::new());
        self.bags.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    fn special_leaf(&self, s: &VertexSet) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| matches!(l, Label::Special(x) if x == s))
    }
}

struct BalSep<'a> {
    hp: &'a Hypergraph,
    k: usize,
    budget: Budget,
    failed: HashSet<(EdgeSet, Vec<VertexSet>)>,
}

impl BalSep<'_> {
    fn key(ctx: &SubproblemContext) -> (EdgeSet, Vec<VertexSet>) {
        let mut sp = ctx.special.clone();
        sp.sort();
        (ctx.edges.clone(), sp)
    }

    fn find(&mut self, ctx: &SubproblemContext) -> std::result::Result<Option<Frag>, Interrupted> {
        self.budget.tick()?;
        // base case
        if ctx.edges.is_empty() && ctx.special.len() <= 2 {
            let mut f = Frag::empty();
            let mut prev = None;
            for s in &ctx.special {
                let i = f.push(s.clone(), Label::Special(s.clone()));
                if let Some(p) = prev {
                    f.link(p, i);
                }
                prev = Some(i);
            }
            return Ok(Some(f));
        }
        if ctx.edges.is_empty() {
            // one special edge would have to separate the others
            return Ok(None);
        }
        let key = Self::key(ctx);
        if self.failed.contains(&key) {
            return Ok(None);
        }
        // balanced splits of a non-empty edge set strictly shrink it, so
        // the recursion never revisits an open subproblem
        let result = self.search(ctx)?;
        if result.is_none() {
            self.failed.insert(key);
        }
        Ok(result)
    }

    fn search(&mut self, ctx: &SubproblemContext) -> std::result::Result<Option<Frag>, Interrupted> {
        let hp = self.hp;
        let cands: Vec<usize> = (0..hp.num_edges())
            .filter(|&j| hp.edge_vertices(j).is_subset(&ctx.vertices))
            .collect();
        let specials: HashSet<&VertexSet> = ctx.special.iter().collect();
        let mut found = None;
        for_each_combination(cands.len(), self.k, |pick| {
            self.budget.tick()?;
            let lambda: Vec<usize> = pick.iter().map(|&p| cands[p]).collect();
            let bag = hp.cover_union(lambda.iter());
            if specials.contains(&bag) {
                return Ok(true);
            }
            let comps = ctx.components(hp, &bag);
            if !balanced(hp, ctx, &comps) {
                return Ok(true);
            }
            let mut parts = Vec::with_capacity(comps.len());
            for c in &comps {
                let child = ctx.split(hp, c, &bag);
                match self.find(&child)? {
                    Some(f) => parts.push(f),
                    None => return Ok(true),
                }
            }
            found = Some(assemble(ctx, &comps, bag, lambda, parts));
            Ok(false)
        })?;
        Ok(found)
    }
}

/// Glues child fragments at a new separator node: each child is re-rooted at
/// its leaf for the separator bag, which is replaced by the new node.
/// Special edges no component touches get their leaf directly below it.
fn assemble(ctx: &SubproblemContext, comps: &[VertexSet], bag: VertexSet, lambda: Vec<usize>, parts: Vec<Frag>) -> Frag {
    let mut out = Frag::empty();
    let u = out.push(bag.clone(), Label::Sep(lambda));
    for part in parts {
        let t = part.special_leaf(&bag).expect("child fragment has a leaf for the separator");
        let mut remap = vec![usize::MAX; part.bags.len()];
        for i in 0..part.bags.len() {
            if i != t {
                remap[i] = out.push(part.bags[i].clone(), part.labels[i].clone());
            }
        }
        for a in 0..part.bags.len() {
            for &b in &part.adj[a] {
                if a < b {
                    let (ra, rb) = (
                        if a == t { u } else { remap[a] },
                        if b == t { u } else { remap[b] },
                    );
                    out.link(ra, rb);
                }
            }
        }
    }
    for s in &ctx.special {
        if !comps.iter().any(|c| s.intersects(c)) {
            let leaf = out.push(s.clone(), Label::Special(s.clone()));
            out.link(u, leaf);
        }
    }
    out
}

fn frag_to_decomposition(f: &Frag) -> Decomposition {
    let mut nodes: Vec<Node> = Vec::with_capacity(f.bags.len());
    let mut stack = vec![(0usize, usize::MAX, None::<usize>)];
    while let Some((i, from, parent)) = stack.pop() {
        let edges = match &f.labels[i] {
            Label::Sep(l) => l.clone(),
            Label::Special(_) => unreachable!("special leaves are consumed at the top level"),
        };
        let id = nodes.len();
        nodes.push(Node::integral(id.to_string(), parent, f.bags[i].clone(), &edges));
        for &j in f.adj[i].iter().rev() {
            if j != from {
                stack.push((j, i, Some(id)));
            }
        }
    }
    Decomposition::new(Kind::Ghd, nodes)
}

/// GHD decision by recursive balanced separators over H' = H + f(H,k)
/// (or plain H with `opts.plain`, where a negative answer is reported as
/// unknown).
pub fn decide_ghw_balsep(h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<RunOutcome> {
    decide_ghw_balsep_with(h, k, opts, Budget::new(opts.timeout))
}

fn decide_ghw_balsep_with(h: &Hypergraph, k: usize, opts: &GhdOptions, budget: Budget) -> Result<RunOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let s = prepare(h, opts.no_simplify);
    let augmented = if opts.plain {
        s.hypergraph.clone()
    } else {
        let f = subedge_closure_global(&s.hypergraph, k, opts.cap)?;
        s.hypergraph.with_subedges(&f.subedges)
    };
    let mut search = BalSep {
        hp: &augmented,
        k,
        budget,
        failed: HashSet::new(),
    };
    let original = s.hypergraph.num_edges();
    let root = SubproblemContext {
        edges: (0..original).collect(),
        vertices: s.hypergraph.all_vertices(),
        special: Vec::new(),
        depth: 0,
    };
    let status = match search.find(&root) {
        Err(Interrupted) => Status::Timeout,
        Ok(None) if opts.plain => Status::Unknown,
        Ok(None) => Status::No,
        Ok(Some(frag)) => {
            let d_aug = frag_to_decomposition(&frag);
            let mut d = d_aug.project(&augmented);
            for n in &mut d.nodes {
                let edges: Vec<usize> = n.cover_edges().map(|e| s.origin[e]).collect();
                n.cover = Node::integral("", None, VertexSet::new(), &edges).cover;
            }
            if let Err(v) = check_ghd(h, &d) {
                panic!("balanced-separator witness is not a GHD: {v:?}");
            }
            Status::Yes(d)
        }
    };
    Ok(RunOutcome::finish(status, &search.budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Global,
    Local,
    BalSep,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Global, Method::Local, Method::BalSep];

    pub fn name(self) -> &'static str {
        match self {
            Method::Global => "global",
            Method::Local => "local",
            Method::BalSep => "balsep",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "global" => Ok(Method::Global),
            "local" => Ok(Method::Local),
            "balsep" => Ok(Method::BalSep),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

pub fn decide_ghw(method: Method, h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<RunOutcome> {
    decide_ghw_budgeted(method, h, k, opts, Budget::new(opts.timeout))
}

fn decide_ghw_budgeted(method: Method, h: &Hypergraph, k: usize, opts: &GhdOptions, budget: Budget) -> Result<RunOutcome> {
    match method {
        Method::Global => decide_ghw_global_with(h, k, opts, budget),
        Method::Local => decide_ghw_local_with(h, k, opts, budget),
        Method::BalSep => decide_ghw_balsep_with(h, k, opts, budget),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioOutcome {
    pub outcome: RunOutcome,
    /// Method that produced the definite answer, if any.
    pub winner: Option<Method>,
}

/// Races the three deciders; the first definite answer wins and the others
/// are cancelled through a shared stop flag.
pub fn portfolio_ghw(h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<PortfolioOutcome> {
    portfolio_ghw_of(&Method::ALL, h, k, opts)
}

pub fn portfolio_ghw_of(methods: &[Method], h: &Hypergraph, k: usize, opts: &GhdOptions) -> Result<PortfolioOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let start = Instant::now();
    let stop = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel::<(Method, Result<RunOutcome>)>();
    let mut winner: Option<(Method, RunOutcome)> = None;
    let mut errors = Vec::new();
    std::thread::scope(|scope| {
        for &m in methods {
            let tx = tx.clone();
            let stop = stop.clone();
            let budget = Budget::new(opts.timeout).with_stop(stop);
            scope.spawn(move || {
                let r = decide_ghw_budgeted(m, h, k, opts, budget);
                let _ = tx.send((m, r));
            });
        }
        drop(tx);
        for (m, r) in rx.iter() {
            match r {
                Ok(out) if out.status.is_definite() && winner.is_none() => {
                    stop.store(true, Ordering::Relaxed);
                    winner = Some((m, out));
                }
                Ok(_) => {}
                Err(e) => errors.push(e),
            }
        }
    });
    let elapsed = start.elapsed();
    match winner {
        Some((m, mut out)) => {
            out.elapsed = elapsed;
            Ok(PortfolioOutcome {
                outcome: out,
                winner: Some(m),
            })
        }
        None if errors.len() == methods.len() => Err(errors.remove(0)),
        None => Ok(PortfolioOutcome {
            outcome: RunOutcome {
                status: Status::Timeout,
                elapsed,
                nodes_expanded: 0,
            },
            winner: None,
        }),
    }
}

/// Map from vertex-set to its lowest-index edge, handy for tests on H'.
pub fn edge_lookup(h: &Hypergraph) -> HashMap<VertexSet, usize> {
    let mut m = HashMap::new();
    for (j, e) in h.edges().iter().enumerate() {
        m.entry(e.vertices.clone()).or_insert(j);
    }
    m
}
