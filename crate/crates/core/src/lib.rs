//! Hypergraph decompositions: hypertree, generalized hypertree, and
//! fractional hypertree width, with structural invariants and a benchmark
//! harness.

pub mod decomp;
pub mod error;
pub mod frac;
pub mod ghd;
pub mod harness;
pub mod hd;
pub mod hypergraph;
pub mod invariants;
pub mod lp;
pub mod oracle;
pub mod parse;
pub mod search;
pub mod set;

pub use decomp::{check, check_fhd, check_ghd, check_hd, Decomposition, EdgeCover, Kind, Node, Violation, Weight};
pub use error::{Error, Result};
pub use frac::{frac_improve_search, improvement_bucket, lp_min_cover, simple_improve, Bucket, FracCover};
pub use ghd::{
    decide_ghw, decide_ghw_balsep, decide_ghw_global, decide_ghw_local, portfolio_ghw, subedge_closure_global,
    GhdOptions, Method, PortfolioOutcome, SubedgeSet,
};
pub use hd::{compute_hw, decide_hw, HdOptions, WidthBounds};
pub use hypergraph::{gyo_acyclic, simplify, Hypergraph, HypergraphBuilder};
pub use parse::{cq_to_hypergraph, parse_hypergraph, serialize_hypergraph};
pub use search::{RunOutcome, Status};
pub use set::{BitSet, EdgeSet, VertexSet};
