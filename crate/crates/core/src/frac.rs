//! Fractional edge covers and fractional improvement of hypertree
//! decompositions.

use std::fmt;

use num_traits::{One, Zero};

use crate::decomp::{check_fhd, snap, weight_to_f64, Decomposition, EdgeCover, Kind, Node, Weight};
use crate::error::{Error, Result};
use crate::hd::{Engine, FracPrune, HdOptions};
use crate::hypergraph::{simplify, Hypergraph};
use crate::lp::LinearProgram;
use crate::search::{Budget, Interrupted, RunOutcome, Status};
use crate::set::{EdgeSet, VertexSet};

/// An optimal (up to 1e-6) fractional cover of a target set.
#[derive(Debug, Clone, PartialEq)]
pub struct FracCover {
    pub cover: EdgeCover,
    pub weight_f64: f64,
    pub optimal: bool,
}

/// Minimum-weight fractional edge cover of `target` using edges from
/// `support` (all edges when `None`).
pub fn lp_min_cover(h: &Hypergraph, target: &VertexSet, support: Option<&EdgeSet>) -> Result<FracCover> {
    if target.is_empty() {
        return Err(Error::InvalidArgument("cover target is empty".into()));
    }
    let support = support.cloned().unwrap_or_else(|| h.all_edges());
    let vars: Vec<usize> = support
        .iter()
        .filter(|&e| h.edge_vertices(e).intersects(target))
        .collect();
    let mut lp = LinearProgram::new(vec![1.0; vars.len()]);
    for v in target {
        let row: Vec<f64> = vars
            .iter()
            .map(|&e| if h.edge_vertices(e).contains(v) { 1.0 } else { 0.0 })
            .collect();
        if row.iter().all(|&x| x == 0.0) {
            return Err(Error::Infeasible(format!(
                "vertex {} lies in no support edge",
                h.vertex_name(v)
            )));
        }
        lp.add_row(row, 1.0);
    }
    let sol = lp.solve()?;
    let mut weights: Vec<(usize, Weight)> = vars
        .iter()
        .zip(&sol.x)
        .map(|(&e, &x)| (e, snap(x).clamp(Weight::zero(), Weight::one())))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    repair_coverage(h, target, &vars, &mut weights);
    let cover = EdgeCover::new(h, &weights);
    Ok(FracCover {
        weight_f64: weight_to_f64(&cover.weight),
        cover,
        optimal: true,
    })
}

/// Snapping can leave a vertex a hair under full coverage; top it up on
/// its heaviest incident edge.
fn repair_coverage(h: &Hypergraph, target: &VertexSet, vars: &[usize], weights: &mut Vec<(usize, Weight)>) {
    for v in target {
        let load: Weight = weights
            .iter()
            .filter(|(e, _)| h.edge_vertices(*e).contains(v))
            .map(|(_, w)| *w)
            .sum();
        if load >= Weight::one() {
            continue;
        }
        let deficit = Weight::one() - load;
        let slot = weights
            .iter_mut()
            .filter(|(e, w)| h.edge_vertices(*e).contains(v) && *w + deficit <= Weight::one())
            .max_by_key(|(_, w)| *w);
        match slot {
            Some((_, w)) => *w += deficit,
            None => {
                let e = vars
                    .iter()
                    .copied()
                    .find(|&e| h.edge_vertices(e).contains(v))
                    .expect("feasible LP has an incident edge");
                match weights.iter_mut().find(|(x, _)| *x == e) {
                    Some((_, w)) => *w = Weight::one(),
                    None => weights.push((e, Weight::one())),
                }
            }
        }
    }
    weights.sort_by_key(|x| x.0);
}

/// Replaces every node's cover by an optimal fractional cover of its bag.
pub fn simple_improve(h: &Hypergraph, d: &Decomposition) -> Result<Decomposition> {
    let mut nodes = Vec::with_capacity(d.nodes.len());
    for n in &d.nodes {
        let cover = if n.bag.is_empty() {
            Vec::new()
        } else {
            lp_min_cover(h, &n.bag, None)?.cover.weights.into_iter().collect()
        };
        nodes.push(Node {
            id: n.id.clone(),
            parent: n.parent,
            bag: n.bag.clone(),
            cover,
        });
    }
    Ok(Decomposition::new(Kind::Fhd, nodes))
}

/// Decides whether some HD of width ≤ k becomes an FHD of width ≤ k′ once
/// each bag gets an optimal fractional cover.
pub fn frac_improve_search(h: &Hypergraph, k: usize, kprime: f64, opts: &HdOptions) -> Result<RunOutcome> {
    if k == 0 || !(kprime > 0.0) || !kprime.is_finite() {
        return Err(Error::InvalidArgument(format!("need k >= 1 and k' > 0, got k={k}, k'={kprime}")));
    }
    let s = if opts.no_simplify {
        None
    } else {
        Some(simplify(h))
    };
    let (work, origin): (&Hypergraph, Vec<usize>) = match &s {
        Some(s) => (&s.hypergraph, s.origin.clone()),
        None => (h, (0..h.num_edges()).collect()),
    };
    let mut engine = Engine::new(work, k, Budget::new(opts.timeout)).seeded(opts.seed);
    engine.frac = Some(FracPrune::new(kprime));
    let status = match engine.run() {
        Err(Interrupted) => Status::Timeout,
        Ok(None) => Status::No,
        Ok(Some(tree)) => {
            let d = Decomposition::new(Kind::Fhd, tree.into_nodes(&|e| origin[e]));
            if let Err(v) = check_fhd(h, &d) {
                panic!("fractional search produced an invalid FHD: {v:?}");
            }
            Status::Yes(d)
        }
    };
    Ok(RunOutcome::finish(status, &engine.budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bucket {
    AtLeastOne,
    Half,
    Tenth,
    No,
}

impl Bucket {
    pub fn label(self) -> &'static str {
        match self {
            Bucket::AtLeastOne => "≥1",
            Bucket::Half => "[0.5,1)",
            Bucket::Tenth => "[0.1,0.5)",
            Bucket::No => "no",
        }
    }

    pub fn parse(s: &str) -> Option<Bucket> {
        match s {
            "≥1" | ">=1" => Some(Bucket::AtLeastOne),
            "[0.5,1)" => Some(Bucket::Half),
            "[0.1,0.5)" => Some(Bucket::Tenth),
            "no" => Some(Bucket::No),
            _ => None,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub const BUCKET_STEPS: [(f64, Bucket); 3] = [(1.0, Bucket::AtLeastOne), (0.5, Bucket::Half), (0.1, Bucket::Tenth)];

#[derive(Debug, Clone, PartialEq)]
pub struct BucketOutcome {
    pub bucket: Bucket,
    /// Some threshold ran out of time before a yes was found.
    pub timed_out: bool,
    pub witness: Option<Decomposition>,
}

/// Tries k′ = k−1, k−0.5, k−0.1 in order; the first yes picks the bucket.
pub fn improvement_bucket(h: &Hypergraph, k: usize, opts: &HdOptions) -> Result<BucketOutcome> {
    let mut timed_out = false;
    for (gain, bucket) in BUCKET_STEPS {
        let kprime = k as f64 - gain;
        if kprime <= 0.0 {
            continue;
        }
        let out = frac_improve_search(h, k, kprime, opts)?;
        match out.status {
            Status::Yes(d) => {
                return Ok(BucketOutcome {
                    bucket,
                    timed_out,
                    witness: Some(d),
                })
            }
            Status::Timeout => timed_out = true,
            _ => {}
        }
    }
    Ok(BucketOutcome {
        bucket: Bucket::No,
        timed_out,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::check_fhd;

    fn letters(edges: &[&str]) -> Hypergraph {
        let named: Vec<(String, Vec<String>)> = edges
            .iter()
            .map(|e| (e.to_string(), e.chars().map(|c| c.to_string()).collect()))
            .collect();
        Hypergraph::from_named_edges("t", &named).unwrap()
    }

    #[test]
    fn triangle_cover_is_three_halves() {
        let h = letters(&["ab", "bc", "ca"]);
        let c = lp_min_cover(&h, &h.all_vertices(), None).unwrap();
        assert_eq!(c.cover.weight, Weight::new(3, 2));
        assert!(c.cover.weights.values().all(|w| *w == Weight::new(1, 2)));
    }

    #[test]
    fn single_edge_and_infeasible() {
        let h = letters(&["abc", "cd"]);
        let t: VertexSet = [0, 1].into_iter().collect();
        assert_eq!(lp_min_cover(&h, &t, None).unwrap().cover.weight, Weight::one());
        let only_cd: EdgeSet = [1].into_iter().collect();
        assert!(matches!(lp_min_cover(&h, &t, Some(&only_cd)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn four_cycle_gets_no_gain() {
        let h = letters(&["ab", "bc", "cd", "da"]);
        let c = lp_min_cover(&h, &h.all_vertices(), None).unwrap();
        assert_eq!(c.cover.weight, Weight::from_integer(2));
    }

    #[test]
    fn simple_improve_triangle() {
        let h = letters(&["ab", "bc", "ca"]);
        let d = Decomposition::new(Kind::Hd, vec![Node::integral("0", None, h.all_vertices(), &[0, 1])]);
        let f = simple_improve(&h, &d).unwrap();
        assert_eq!(check_fhd(&h, &f), Ok(()));
        assert_eq!(f.width().unwrap(), Weight::new(3, 2));
    }

    #[test]
    fn search_thresholds_on_triangle() {
        let h = letters(&["ab", "bc", "ca"]);
        let o = HdOptions::default();
        let yes = frac_improve_search(&h, 2, 1.5, &o).unwrap();
        assert_eq!(yes.status.witness().unwrap().width().unwrap(), Weight::new(3, 2));
        assert_eq!(frac_improve_search(&h, 2, 1.4, &o).unwrap().status, Status::No);
        let b = improvement_bucket(&h, 2, &o).unwrap();
        assert_eq!(b.bucket, Bucket::Half);
        assert!(frac_improve_search(&h, 2, 0.0, &o).is_err());
    }

    #[test]
    fn acyclic_has_no_gain() {
        let h = letters(&["ab", "bc", "cd"]);
        assert_eq!(improvement_bucket(&h, 1, &HdOptions::default()).unwrap().bucket, Bucket::No);
    }
}
