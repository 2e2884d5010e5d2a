//! Seeded stratified sampling.
//!
//! Each item gets a priority from a keyed mix of the seed and its stable
//! key; a cell keeps its `per_cell` smallest priorities. The result is a
//! uniform draw without replacement that does not depend on iteration order,
//! so parallel and sequential paths select identical samples.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;

use super::DatasetError;
use crate::hypothesis::Label;

/// An item that belongs to an `(n_vars, label)` cell and has a stable key.
pub trait Stratum {
    fn stratum(&self) -> (usize, Label);
    fn sample_key(&self) -> u64;
}

type Cell = (usize, Label);

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn priority(seed: u64, key: u64) -> u64 {
    mix(seed ^ mix(key))
}

struct Entry<C> {
    prio: u64,
    key: u64,
    item: C,
}

impl<C> PartialEq for Entry<C> {
    fn eq(&self, other: &Self) -> bool {
        (self.prio, self.key) == (other.prio, other.key)
    }
}
impl<C> Eq for Entry<C> {}
impl<C> PartialOrd for Entry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C> Ord for Entry<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.prio, self.key).cmp(&(other.prio, other.key))
    }
}

struct Reservoirs<C> {
    k: usize,
    seed: u64,
    cells: HashMap<Cell, (usize, BinaryHeap<Entry<C>>)>,
}

impl<C> Reservoirs<C> {
    fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            cells: HashMap::new(),
        }
    }

    fn offer(&mut self, cell: Cell, key: u64, item: C) {
        let entry = Entry {
            prio: priority(self.seed, key),
            key,
            item,
        };
        let (count, heap) = self.cells.entry(cell).or_insert_with(|| (0, BinaryHeap::new()));
        *count += 1;
        push_bounded(heap, entry, self.k);
    }

    fn merge(mut self, other: Self) -> Self {
        for (cell, (count, heap)) in other.cells {
            let (c, h) = self.cells.entry(cell).or_insert_with(|| (0, BinaryHeap::new()));
            *c += count;
            for e in heap {
                push_bounded(h, e, self.k);
            }
        }
        self
    }

    fn finish(self, required: &[Cell]) -> Result<Vec<C>, DatasetError> {
        let mut cells = self.cells;
        let mut out: Vec<(usize, u64, C)> = Vec::new();
        let wanted: BTreeSet<Cell> = required.iter().copied().collect();
        for cell in &wanted {
            let (count, heap) = cells.remove(cell).unwrap_or((0, BinaryHeap::new()));
            if count < self.k {
                return Err(DatasetError::Capacity {
                    n_vars: cell.0,
                    label: cell.1,
                    needed: self.k,
                    available: count,
                });
            }
            out.extend(heap.into_iter().map(|e| (cell.0, e.key, e.item)));
        }
        out.sort_by_key(|&(n, key, _)| (n, key));
        Ok(out.into_iter().map(|(_, _, c)| c).collect())
    }
}

fn push_bounded<C>(heap: &mut BinaryHeap<Entry<C>>, e: Entry<C>, k: usize) {
    if k == 0 {
        return;
    }
    if heap.len() < k {
        heap.push(e);
    } else if heap.peek().is_some_and(|top| e < *top) {
        heap.pop();
        heap.push(e);
    }
}

/// Draws `per_cell` items for each label at every variable count present in
/// `items`. Output is ordered by variable count, then key.
pub fn balanced_sample<T: Stratum>(
    items: impl IntoIterator<Item = T>,
    per_cell: usize,
    seed: u64,
) -> Result<Vec<T>, DatasetError> {
    let mut res = Reservoirs::new(per_cell, seed);
    let mut ns = BTreeSet::new();
    for item in items {
        let cell = item.stratum();
        ns.insert(cell.0);
        let key = item.sample_key();
        res.offer(cell, key, item);
    }
    let required: Vec<Cell> = ns
        .into_iter()
        .flat_map(|n| [(n, Label::Yes), (n, Label::No)])
        .collect();
    res.finish(&required)
}

/// Parallel bottom-k over `(cell, key, item)` triples.
pub(crate) fn bottom_k_par<C: Send>(
    items: impl ParallelIterator<Item = (Cell, u64, C)>,
    per_cell: usize,
    seed: u64,
    required: &[Cell],
) -> Result<Vec<C>, DatasetError> {
    items
        .fold(
            || Reservoirs::new(per_cell, seed),
            |mut r, (cell, key, item)| {
                r.offer(cell, key, item);
                r
            },
        )
        .reduce(|| Reservoirs::new(per_cell, seed), Reservoirs::merge)
        .finish(required)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    struct Item(usize, Label, u64);

    impl Stratum for Item {
        fn stratum(&self) -> (usize, Label) {
            (self.0, self.1)
        }
        fn sample_key(&self) -> u64 {
            self.2
        }
    }

    fn population() -> Vec<Item> {
        (0..200u64)
            .map(|k| {
                let n = 3 + (k % 2) as usize;
                let label = if k % 3 == 0 { Label::Yes } else { Label::No };
                Item(n, label, k)
            })
            .collect()
    }

    #[test]
    fn equal_cells() {
        let out = balanced_sample(population(), 4, 9).unwrap();
        assert_eq!(out.len(), 16);
        for n in [3, 4] {
            for l in [Label::Yes, Label::No] {
                assert_eq!(out.iter().filter(|i| i.0 == n && i.1 == l).count(), 4);
            }
        }
    }

    #[test]
    fn order_independent_and_seeded() {
        let a = balanced_sample(population(), 4, 9).unwrap();
        let mut rev = population();
        rev.reverse();
        assert_eq!(balanced_sample(rev, 4, 9).unwrap(), a);
        assert_ne!(balanced_sample(population(), 4, 10).unwrap(), a);
        let par = bottom_k_par(
            population().into_par_iter().map(|i| ((i.0, i.1), i.2, i)),
            4,
            9,
            &[(3, Label::Yes), (3, Label::No), (4, Label::Yes), (4, Label::No)],
        )
        .unwrap();
        assert_eq!(par, a);
    }

    #[test]
    fn single_per_cell() {
        let out = balanced_sample(population().into_iter().filter(|i| i.0 == 3), 1, 0).unwrap();
        assert_eq!(out.len(), 2);
        assert_ne!(out[0].1, out[1].1);
    }

    #[test]
    fn capacity_error_names_cell() {
        let only_no: Vec<Item> = population().into_iter().filter(|i| i.1 == Label::No).collect();
        match balanced_sample(only_no, 2, 0) {
            Err(DatasetError::Capacity { n_vars, label, available, .. }) => {
                assert_eq!((n_vars, label, available), (3, Label::Yes, 0));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
