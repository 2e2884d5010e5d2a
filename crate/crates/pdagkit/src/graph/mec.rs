//! Skeletons, v-structures and Markov equivalence classes.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::dag::{iter_bits, Dag, MAX_NODES};
use super::GraphError;

const PAIR_SLOTS: usize = MAX_NODES * (MAX_NODES - 1) / 2;

/// Index of the unordered pair `{i, j}` among the pairs of `n` nodes.
#[inline]
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Unordered pairs `(i, j)` with `i < j`, in `pair_index` order.
pub(crate) fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Undirected edges as canonical `(smaller, larger)` pairs.
pub fn skeleton(dag: &Dag) -> BTreeSet<(usize, usize)> {
    pairs(dag.n()).filter(|&(i, j)| dag.adjacent(i, j)).collect()
}

/// `(x, collider, y)` with `x -> collider <- y`, `x < y`, and `x`, `y` non-adjacent.
pub fn v_structures(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..dag.n() {
        let parents: Vec<usize> = iter_bits(dag.parents(c)).collect();
        for (a, &x) in parents.iter().enumerate() {
            for &y in &parents[a + 1..] {
                if !dag.adjacent(x, y) {
                    out.insert((x, c, y));
                }
            }
        }
    }
    out
}

pub fn markov_equivalent(d1: &Dag, d2: &Dag) -> Result<bool, GraphError> {
    if d1.n() != d2.n() {
        return Err(GraphError::SizeMismatch {
            left: d1.n(),
            right: d2.n(),
        });
    }
    Ok(MecKey::of(d1) == MecKey::of(d2))
}

/// Compact (skeleton, v-structure set) key shared by Markov-equivalent DAGs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MecKey {
    n: u8,
    skeleton: u16,
    vstructs: u128,
}

impl MecKey {
    pub fn of(dag: &Dag) -> Self {
        let n = dag.n();
        let mut skeleton = 0u16;
        for (i, j) in pairs(n) {
            if dag.adjacent(i, j) {
                skeleton |= 1 << pair_index(n, i, j);
            }
        }
        let mut vstructs = 0u128;
        for (x, c, y) in v_structures(dag) {
            vstructs |= 1u128 << (c * PAIR_SLOTS + pair_index(n, x, y));
        }
        Self {
            n: n as u8,
            skeleton,
            vstructs,
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        pairs(self.n())
            .filter(|&(i, j)| self.skeleton >> pair_index(self.n(), i, j) & 1 == 1)
            .collect()
    }

    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let n = self.n();
        let mut out = BTreeSet::new();
        for c in 0..n {
            for (x, y) in pairs(n) {
                if self.vstructs >> (c * PAIR_SLOTS + pair_index(n, x, y)) & 1 == 1 {
                    out.insert((x, c, y));
                }
            }
        }
        out
    }

    /// Short stable hex digest, used as a dataset field.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("mec:v1:{}:{:x}:{:x}", self.n, self.skeleton, self.vstructs));
        hex::encode(&h.finalize()[..8])
    }
}

/// A Markov equivalence class: its key and its member DAGs in mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mec {
    key: MecKey,
    members: Vec<Dag>,
}

impl Mec {
    pub fn new(members: Vec<Dag>) -> Result<Self, GraphError> {
        let first = members.first().ok_or(GraphError::EmptyMec)?;
        let key = MecKey::of(first);
        let mut members = members;
        members.sort();
        members.dedup();
        if members.iter().any(|d| MecKey::of(d) != key) {
            return Err(GraphError::NotEquivalent);
        }
        Ok(Self { key, members })
    }

    pub fn key(&self) -> &MecKey {
        &self.key
    }

    pub fn members(&self) -> &[Dag] {
        &self.members
    }

    pub fn n(&self) -> usize {
        self.key.n()
    }

    /// Smallest-mask member; premises are derived from it.
    pub fn representative(&self) -> &Dag {
        &self.members[0]
    }

    pub fn digest(&self) -> String {
        self.key.digest()
    }

    /// Directed edges shared by every member; everything else in the skeleton
    /// is undirected. Returned as (directed, undirected) edge lists.
    pub fn cpdag_edges(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        for (i, j) in self.key.skeleton() {
            if self.members.iter().all(|d| d.has_edge(i, j)) {
                directed.push((i, j));
            } else if self.members.iter().all(|d| d.has_edge(j, i)) {
                directed.push((j, i));
            } else {
                undirected.push((i, j));
            }
        }
        (directed, undirected)
    }
}

/// Partition `dags` into Markov equivalence classes. Classes are ordered by
/// their smallest member; members by mask.
pub fn group_mecs(dags: &[Dag]) -> Result<Vec<Mec>, GraphError> {
    if let Some(first) = dags.first() {
        if let Some(bad) = dags.iter().find(|d| d.n() != first.n()) {
            return Err(GraphError::SizeMismatch {
                left: first.n(),
                right: bad.n(),
            });
        }
    }
    let keys: Vec<MecKey> = dags.par_iter().map(MecKey::of).collect();
    let mut index: HashMap<MecKey, usize> = HashMap::new();
    let mut groups: Vec<(MecKey, Vec<Dag>)> = Vec::new();
    for (dag, key) in dags.iter().zip(keys) {
        let slot = *index.entry(key).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(*dag);
    }
    let mut mecs: Vec<Mec> = groups
        .into_iter()
        .map(|(key, mut members)| {
            members.sort();
            members.dedup();
            Mec { key, members }
        })
        .collect();
    mecs.sort_by_key(|m| m.members[0]);
    Ok(mecs)
}
