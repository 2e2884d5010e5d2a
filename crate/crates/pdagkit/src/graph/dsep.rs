//! d-separation by reachability ("Bayes ball") over a [`Dag`].
//!
//! A path is blocked when it passes a non-collider that is conditioned on, or a
//! collider such that neither it nor any of its descendants is conditioned on.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::dag::{iter_bits, Dag, NodeSet};
use super::GraphError;

/// `x ⊥ y | cond`, stored with `x < y` and `cond` sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SepStatement {
    pub x: usize,
    pub y: usize,
    pub cond: Vec<usize>,
}

impl SepStatement {
    pub fn new(x: usize, y: usize, cond: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        if x == y {
            return Err(GraphError::SamePair(x));
        }
        let mut cond: Vec<usize> = cond.into_iter().collect();
        cond.sort_unstable();
        cond.dedup();
        if cond.contains(&x) || cond.contains(&y) {
            return Err(GraphError::EndpointConditioned);
        }
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        Ok(Self { x, y, cond })
    }

    pub fn is_unconditional(&self) -> bool {
        self.cond.is_empty()
    }
}

impl Ord for SepStatement {
    /// Pair first, then smaller conditioning sets, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.x, self.y, self.cond.len(), &self.cond).cmp(&(
            other.x,
            other.y,
            other.cond.len(),
            &other.cond,
        ))
    }
}

impl PartialOrd for SepStatement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check(dag: &Dag, x: usize, y: usize, cond: NodeSet) -> Result<(), GraphError> {
    let n = dag.n();
    for v in [x, y].into_iter().chain(iter_bits(cond)) {
        if v >= n {
            return Err(GraphError::IndexOutOfRange { index: v, n });
        }
    }
    if x == y {
        return Err(GraphError::SamePair(x));
    }
    if cond >> x & 1 == 1 || cond >> y & 1 == 1 {
        return Err(GraphError::EndpointConditioned);
    }
    Ok(())
}

/// Whether `x` and `y` are d-separated by `cond` in `dag`.
pub fn d_separated(dag: &Dag, x: usize, y: usize, cond: &[usize]) -> Result<bool, GraphError> {
    let n = dag.n();
    let mut set: NodeSet = 0;
    for &v in cond {
        if v >= n {
            return Err(GraphError::IndexOutOfRange { index: v, n });
        }
        set |= 1 << v;
    }
    check(dag, x, y, set)?;
    Ok(d_separated_set(dag, x, y, set))
}

/// Bitset form without argument validation.
pub(crate) fn d_separated_set(dag: &Dag, x: usize, y: usize, cond: NodeSet) -> bool {
    reachable(dag, x, cond) >> y & 1 == 0
}

/// Nodes with an active trail from `source` given `cond`.
fn reachable(dag: &Dag, source: usize, cond: NodeSet) -> NodeSet {
    // colliders are open when they are in cond or have a descendant in cond
    let opens_collider = cond | dag.ancestors_of_set(cond);
    // visited[dir] where dir 0 = arrived from a child (moving up), 1 = from a parent
    let mut visited = [0 as NodeSet; 2];
    let mut reached: NodeSet = 0;
    let mut stack = vec![(source, 0usize)];
    while let Some((v, dir)) = stack.pop() {
        if visited[dir] >> v & 1 == 1 {
            continue;
        }
        visited[dir] |= 1 << v;
        let conditioned = cond >> v & 1 == 1;
        if !conditioned {
            reached |= 1 << v;
        }
        if dir == 0 {
            if !conditioned {
                for p in iter_bits(dag.parents(v)) {
                    stack.push((p, 0));
                }
                for c in iter_bits(dag.children(v)) {
                    stack.push((c, 1));
                }
            }
        } else {
            if !conditioned {
                for c in iter_bits(dag.children(v)) {
                    stack.push((c, 1));
                }
            }
            if opens_collider >> v & 1 == 1 {
                for p in iter_bits(dag.parents(v)) {
                    stack.push((p, 0));
                }
            }
        }
    }
    reached & !(1 << source)
}

/// Every d-separation statement of `dag` with at most `max_cond` conditioning
/// variables, in canonical order.
pub fn all_dsep_statements(dag: &Dag, max_cond: usize) -> Result<Vec<SepStatement>, GraphError> {
    let n = dag.n();
    if n >= 2 && max_cond > n - 2 {
        return Err(GraphError::CondTooLarge {
            max_cond,
            limit: n - 2,
        });
    }
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let others: NodeSet = ((1u16 << n) - 1) as u8 & !(1 << x) & !(1 << y);
            for cond in subsets(others) {
                if cond.count_ones() as usize <= max_cond && d_separated_set(dag, x, y, cond) {
                    out.push(SepStatement {
                        x,
                        y,
                        cond: iter_bits(cond).collect(),
                    });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All subsets of `set`, including the empty set.
pub(crate) fn subsets(set: NodeSet) -> impl Iterator<Item = NodeSet> {
    // standard submask walk, ascending order
    let mut next = Some(0u8);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set {
            None
        } else {
            Some(cur.wrapping_sub(set) & set)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Dag {
        Dag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn collider() -> Dag {
        Dag::new(3, [(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn chain_blocked_by_mediator() {
        assert!(d_separated(&chain(), 0, 2, &[1]).unwrap());
        assert!(!d_separated(&chain(), 0, 2, &[]).unwrap());
    }

    #[test]
    fn collider_opens_when_conditioned() {
        assert!(d_separated(&collider(), 0, 1, &[]).unwrap());
        assert!(!d_separated(&collider(), 0, 1, &[2]).unwrap());
    }

    #[test]
    fn collider_opens_through_descendant() {
        // 0 -> 2 <- 1, 2 -> 3
        let d = Dag::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separated(&d, 0, 1, &[]).unwrap());
        assert!(!d_separated(&d, 0, 1, &[3]).unwrap());
    }

    #[test]
    fn argument_errors() {
        assert_eq!(d_separated(&chain(), 0, 0, &[]), Err(GraphError::SamePair(0)));
        assert_eq!(
            d_separated(&chain(), 0, 2, &[0]),
            Err(GraphError::EndpointConditioned)
        );
        assert!(matches!(
            d_separated(&chain(), 0, 5, &[]),
            Err(GraphError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn statements_of_collider_and_chain() {
        let s = all_dsep_statements(&collider(), 1).unwrap();
        assert_eq!(s, vec![SepStatement::new(0, 1, []).unwrap()]);
        let s = all_dsep_statements(&chain(), 1).unwrap();
        assert_eq!(s, vec![SepStatement::new(0, 2, [1]).unwrap()]);
    }

    #[test]
    fn statement_canonical_form() {
        let s = SepStatement::new(3, 1, [4, 0, 4]).unwrap();
        assert_eq!((s.x, s.y, s.cond.clone()), (1, 3, vec![0, 4]));
        assert!(SepStatement::new(1, 2, [1]).is_err());
    }

    #[test]
    fn max_cond_is_bounded() {
        assert!(all_dsep_statements(&chain(), 2).is_err());
    }

    #[test]
    fn subsets_enumerates_all() {
        let all: Vec<u8> = subsets(0b1010).collect();
        assert_eq!(all, vec![0, 0b0010, 0b1000, 0b1010]);
    }
}
