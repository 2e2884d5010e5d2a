//! The symbolic causal-discovery procedure: build the complete adjacency matrix, delete
//! independent pairs, detect and orient colliders, optionally propagate.

mod matrix;
mod relations;
mod steps;

use thiserror::Error;

pub use matrix::{AdjMatrix, EdgeMark};
pub use relations::{CondIndep, Pair, RelationSet, StatementSelection};
pub use steps::{
    apply_conditional, apply_unconditional, candidate_pairs, filter_collider_pairs,
    initial_matrix, orient_colliders, propagate_orientations, run_engine, EngineOptions,
    ColliderCandidates, FilterMode, Trace,
};

use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("variable index {0} is not in the variable table")]
    UnknownVariable(usize),
    #[error("a pair needs two distinct variables (got {0} twice)")]
    DegeneratePair(usize),
    #[error("pair {pair:?} is stated both dependent and independent")]
    Contradiction { pair: Pair },
    #[error("conditional independence for {pair:?} has an empty conditioning set")]
    EmptyGiven { pair: Pair },
    #[error("conditioning set for {pair:?} contains one of the pair")]
    EndpointInGiven { pair: Pair },
    #[error("declared cause-effect pairs form a cycle")]
    CyclicCauses,
    #[error("matrix must be {expected}x{expected}")]
    Shape { expected: usize },
    #[error("cell ({row}, {col}) holds {value}; only 0 and 1 are allowed")]
    CellValue { row: usize, col: usize, value: u8 },
    #[error("diagonal cell ({0}, {0}) must be 0")]
    Diagonal(usize),
    #[error("directed edges form a cycle")]
    DirectedCycle,
    #[error("unknown collider filter mode `{0}` (expected uncond-only or pc-correct)")]
    UnknownMode(String),
    #[error("matrix has no consistent DAG extension")]
    NoExtension,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
