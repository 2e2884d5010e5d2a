//! Consistent DAG extensions of a partially directed matrix.

use super::dag::{bit, is_acyclic, parent_sets, Dag};
use super::mec::v_structures;
use crate::engine::{AdjMatrix, EngineError};

/// Every DAG with the matrix's skeleton that keeps its directed entries, is
/// acyclic, and has exactly the matrix's oriented colliders as v-structures.
///
/// An empty result means the matrix admits no consistent extension.
pub fn dag_extensions(matrix: &AdjMatrix) -> Result<Vec<Dag>, EngineError> {
    matrix.validate_pdag()?;
    let n = matrix.n();
    let base = matrix
        .directed_edges()
        .into_iter()
        .fold(0u64, |acc, (p, c)| acc | bit(n, p, c));
    let undirected = matrix.undirected_edges();
    let colliders = matrix.colliders();
    let mut out = Vec::new();
    for choice in 0u32..(1u32 << undirected.len()) {
        let mut mask = base;
        for (k, &(a, b)) in undirected.iter().enumerate() {
            mask |= if choice >> k & 1 == 0 {
                bit(n, a, b)
            } else {
                bit(n, b, a)
            };
        }
        if !is_acyclic(n, &parent_sets(n, mask)) {
            continue;
        }
        let dag = Dag::from_mask_unchecked(n, mask);
        if v_structures(&dag) == colliders {
            out.push(dag);
        }
    }
    out.sort();
    Ok(out)
}
