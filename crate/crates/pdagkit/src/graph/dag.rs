use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Largest supported node count.
pub const MAX_NODES: usize = 6;

/// Node set over at most [`MAX_NODES`] nodes, one bit per node.
pub type NodeSet = u8;

/// A labeled DAG on `n` nodes.
///
/// Edges live in a bitmask with bit `parent * n + child`; the mask also fixes
/// the canonical (lexicographic) order used by enumeration and grouping.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct Dag {
    n: u8,
    mask: u64,
}

#[derive(Serialize, Deserialize)]
struct DagRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<DagRepr> for Dag {
    type Error = GraphError;

    fn try_from(r: DagRepr) -> Result<Self, Self::Error> {
        Dag::new(r.n, r.edges)
    }
}

impl From<Dag> for DagRepr {
    fn from(d: Dag) -> Self {
        DagRepr {
            n: d.n(),
            edges: d.edges(),
        }
    }
}

pub(crate) fn check_n(n: usize) -> Result<(), GraphError> {
    if (1..=MAX_NODES).contains(&n) {
        Ok(())
    } else {
        Err(GraphError::NodeCount { n, max: MAX_NODES })
    }
}

#[inline]
pub(crate) fn bit(n: usize, parent: usize, child: usize) -> u64 {
    1u64 << (parent * n + child)
}

/// Parent sets of every node of the directed graph encoded by `mask`.
#[inline]
pub(crate) fn parent_sets(n: usize, mask: u64) -> [NodeSet; MAX_NODES] {
    let mut parents = [0u8; MAX_NODES];
    for p in 0..n {
        let row = (mask >> (p * n)) & ((1u64 << n) - 1);
        for (c, slot) in parents.iter_mut().enumerate().take(n) {
            if row >> c & 1 == 1 {
                *slot |= 1 << p;
            }
        }
    }
    parents
}

/// Kahn-style peeling on parent bitsets.
pub(crate) fn is_acyclic(n: usize, parents: &[NodeSet; MAX_NODES]) -> bool {
    let mut remaining: NodeSet = ((1u16 << n) - 1) as u8;
    while remaining != 0 {
        let mut peeled = false;
        for v in 0..n {
            if remaining >> v & 1 == 1 && parents[v] & remaining == 0 {
                remaining &= !(1 << v);
                peeled = true;
            }
        }
        if !peeled {
            return false;
        }
    }
    true
}

impl Dag {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_n(n)?;
        let mut mask = 0u64;
        for (p, c) in edges {
            if p >= n || c >= n {
                return Err(GraphError::IndexOutOfRange {
                    index: p.max(c),
                    n,
                });
            }
            if p == c {
                return Err(GraphError::SelfLoop(p));
            }
            mask |= bit(n, p, c);
        }
        Self::from_mask(n, mask)
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self, GraphError> {
        check_n(n)?;
        if n < 64 && mask >> (n * n) != 0 {
            return Err(GraphError::IndexOutOfRange { index: n, n });
        }
        for v in 0..n {
            if mask & bit(n, v, v) != 0 {
                return Err(GraphError::SelfLoop(v));
            }
        }
        if !is_acyclic(n, &parent_sets(n, mask)) {
            return Err(GraphError::Cyclic);
        }
        Ok(Self { n: n as u8, mask })
    }

    /// Edgeless graph.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_mask(n, 0)
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u64) -> Self {
        Self { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        parent < self.n() && child < self.n() && self.mask & bit(self.n(), parent, child) != 0
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    pub fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Edges as (parent, child), ordered by parent then child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|p| (0..n).map(move |c| (p, c)))
            .filter(|&(p, c)| self.has_edge(p, c))
            .collect()
    }

    pub fn children(&self, v: usize) -> NodeSet {
        let n = self.n();
        ((self.mask >> (v * n)) & ((1u64 << n) - 1)) as NodeSet
    }

    pub fn parents(&self, v: usize) -> NodeSet {
        (0..self.n())
            .filter(|&p| self.has_edge(p, v))
            .fold(0, |acc, p| acc | 1 << p)
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: usize) -> NodeSet {
        let mut seen: NodeSet = 0;
        let mut frontier = self.children(v);
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0;
            for u in iter_bits(frontier) {
                next |= self.children(u);
            }
            frontier = next & !seen;
        }
        seen
    }

    /// Strict ancestors of every node in `set`, unioned.
    pub fn ancestors_of_set(&self, set: NodeSet) -> NodeSet {
        let mut seen: NodeSet = 0;
        let mut frontier = iter_bits(set).fold(0, |acc, v| acc | self.parents(v));
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0;
            for u in iter_bits(frontier) {
                next |= self.parents(u);
            }
            frontier = next & !seen;
        }
        seen
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let mask = self
            .edges()
            .into_iter()
            .fold(0, |acc, (p, c)| acc | bit(n, c, p));
        Self::from_mask_unchecked(n, mask)
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}; ", self.n)?;
        let edges = self.edges();
        if edges.is_empty() {
            write!(f, "no edges")?;
        }
        for (i, (p, c)) in edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}->{c}")?;
        }
        write!(f, ")")
    }
}

/// Indices of the set bits of a node set, ascending.
pub fn iter_bits(set: NodeSet) -> impl Iterator<Item = usize> {
    (0..8).filter(move |i| set >> i & 1 == 1)
}

/// Every labeled DAG on `n` nodes, once each, in ascending edge-mask order.
pub fn enumerate_dags(n: usize) -> Result<impl Iterator<Item = Dag>, GraphError> {
    check_n(n)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut masks = Vec::new();
    // each unordered pair is absent, i->j, or j->i
    let mut digits = vec![0u8; pairs.len()];
    for _ in 0..total {
        let mut mask = 0u64;
        for (d, &(i, j)) in digits.iter().zip(&pairs) {
            match d {
                1 => mask |= bit(n, i, j),
                2 => mask |= bit(n, j, i),
                _ => {}
            }
        }
        if is_acyclic(n, &parent_sets(n, mask)) {
            masks.push(mask);
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < 3 {
                break;
            }
            *d = 0;
        }
    }
    masks.sort_unstable();
    Ok(masks.into_iter().map(move |m| Dag::from_mask_unchecked(n, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_self_loops() {
        assert_eq!(Dag::new(3, [(0, 1), (1, 2), (2, 0)]), Err(GraphError::Cyclic));
        assert_eq!(Dag::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            Dag::new(2, [(0, 2)]),
            Err(GraphError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn node_cap_is_enforced() {
        assert!(matches!(
            enumerate_dags(7),
            Err(GraphError::NodeCount { n: 7, max: 6 })
        ));
        assert!(enumerate_dags(0).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_dags(1).unwrap().count(), 1);
        assert_eq!(enumerate_dags(2).unwrap().count(), 3);
        assert_eq!(enumerate_dags(3).unwrap().count(), 25);
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let dags: Vec<Dag> = enumerate_dags(4).unwrap().collect();
        assert!(dags.windows(2).all(|w| w[0].mask() < w[1].mask()));
    }

    #[test]
    fn descendants_and_ancestors() {
        // 0 -> 1 -> 2, 3 -> 2
        let d = Dag::new(4, [(0, 1), (1, 2), (3, 2)]).unwrap();
        assert_eq!(d.descendants(0), 0b0110);
        assert_eq!(d.descendants(2), 0);
        assert_eq!(d.ancestors_of_set(1 << 2), 0b1011);
        assert_eq!(d.parents(2), 0b1010);
    }

    #[test]
    fn serde_round_trip() {
        let d = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"n":3,"edges":[[0,2],[1,2]]}"#);
        assert_eq!(serde_json::from_str::<Dag>(&s).unwrap(), d);
        assert!(serde_json::from_str::<Dag>(r#"{"n":2,"edges":[[0,1],[1,0]]}"#).is_err());
    }
}
