//! Directed-graph machinery: DAG enumeration, d-separation, skeletons,
//! v-structures, Markov equivalence and PDAG extensions.

mod dag;
mod dsep;
mod extend;
mod mec;

use thiserror::Error;

pub use dag::{enumerate_dags, iter_bits, Dag, NodeSet, MAX_NODES};
pub use dsep::{all_dsep_statements, d_separated, SepStatement};
pub use extend::dag_extensions;
pub use mec::{group_mecs, markov_equivalent, skeleton, v_structures, Mec, MecKey};


#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count {n} outside supported range 1..={max}")]
    NodeCount { n: usize, max: usize },
    #[error("node index {index} out of range for a graph on {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge set contains a directed cycle")]
    Cyclic,
    #[error("separation query needs two distinct nodes (got {0} twice)")]
    SamePair(usize),
    #[error("conditioning set contains an endpoint of the queried pair")]
    EndpointConditioned,
    #[error("conditioning set size {max_cond} exceeds n-2 = {limit}")]
    CondTooLarge { max_cond: usize, limit: usize },
    #[error("graphs have different node counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("an equivalence class needs at least one member")]
    EmptyMec,
    #[error("members do not share a skeleton and v-structures")]
    NotEquivalent,
}

/// Unordered pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn unordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}
