//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls the library's graph algorithms.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use pdagkit::engine::RelationSet;
use pdagkit::{Dag, HypothesisKind};

/// Labeled DAG counts from the inclusion-exclusion recurrence.
pub fn dag_count_recurrence(n: usize) -> u128 {
    let mut a = vec![1u128];
    for m in 1..=n {
        let mut total: i128 = 0;
        for k in 1..=m {
            let term = binom(m, k) as i128 * (1i128 << (k * (m - k))) * a[m - k] as i128;
            total += if k % 2 == 1 { term } else { -term };
        }
        a.push(total as u128);
    }
    a[n]
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Edge lists of every DAG on `n` nodes, by trying all 3^(pairs)
/// orientations and keeping the acyclic ones.
pub fn brute_force_dags(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match code % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            code /= 3;
        }
        if acyclic(n, &edges) {
            edges.sort();
            out.push(edges);
        }
    }
    out
}

fn acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; n];
    for &(_, c) in edges {
        indeg[c] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &(p, c) in edges {
            if p == v {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
    }
    seen == n
}

pub fn parents(dag: &Dag, v: usize) -> Vec<usize> {
    (0..dag.n()).filter(|&p| dag.has_edge(p, v)).collect()
}

fn reaches(dag: &Dag, from: usize, to: usize, min_len: usize) -> bool {
    // BFS over (node, path length capped at min_len)
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(from, 0usize)]);
    while let Some((v, len)) = queue.pop_front() {
        for c in (0..dag.n()).filter(|&c| dag.has_edge(v, c)) {
            let l = (len + 1).min(min_len);
            if c == to && l >= min_len {
                return true;
            }
            if seen.insert((c, l)) {
                queue.push_back((c, l));
            }
        }
    }
    false
}

/// Truth of a hypothesis kind in one DAG.
pub fn holds(kind: HypothesisKind, s: usize, o: usize, dag: &Dag) -> bool {
    match kind {
        HypothesisKind::DirectCause => dag.has_edge(s, o),
        HypothesisKind::Cause => reaches(dag, s, o, 1),
        HypothesisKind::IndirectCause => reaches(dag, s, o, 2),
        HypothesisKind::CommonEffect => (0..dag.n()).any(|z| dag.has_edge(s, z) && dag.has_edge(o, z)),
        HypothesisKind::CommonCause => (0..dag.n()).any(|z| dag.has_edge(z, s) && dag.has_edge(z, o)),
    }
}

pub fn skeleton(dag: &Dag) -> BTreeSet<(usize, usize)> {
    let n = dag.n();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| dag.has_edge(i, j) || dag.has_edge(j, i))
        .collect()
}

/// `(x, c, y)` with `x -> c <- y`, `x < y` and `x`, `y` non-adjacent.
pub fn v_structures(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..dag.n() {
        let ps = parents(dag, c);
        for (i, &x) in ps.iter().enumerate() {
            for &y in &ps[i + 1..] {
                if !dag.has_edge(x, y) && !dag.has_edge(y, x) {
                    out.insert((x.min(y), c, x.max(y)));
                }
            }
        }
    }
    out
}

/// d-separation via the moralized ancestral graph.
pub fn d_separated(dag: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let n = dag.n();
    let mut keep = vec![false; n];
    let mut stack: Vec<usize> = [x, y].iter().chain(z).copied().collect();
    while let Some(v) = stack.pop() {
        if !keep[v] {
            keep[v] = true;
            stack.extend(parents(dag, v));
        }
    }
    let mut adj = vec![BTreeSet::new(); n];
    for c in (0..n).filter(|&c| keep[c]) {
        let ps = parents(dag, c);
        for &p in &ps {
            adj[p].insert(c);
            adj[c].insert(p);
        }
        for &a in &ps {
            for &b in &ps {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let blocked: BTreeSet<usize> = z.iter().copied().collect();
    let mut seen = vec![false; n];
    let mut stack = vec![x];
    seen[x] = true;
    while let Some(v) = stack.pop() {
        if v == y {
            return false;
        }
        for &w in &adj[v] {
            if keep[w] && !seen[w] && !blocked.contains(&w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    true
}

/// Relations a faithful distribution over `dag` would state: marginal
/// dependencies plus inclusion-minimal separating sets of size <= `max_cond`.
pub fn oracle_relations(dag: &Dag, max_cond: usize) -> RelationSet {
    let n = dag.n();
    let mut rels = RelationSet::default();
    for x in 0..n {
        for y in x + 1..n {
            let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            let mut seps: Vec<Vec<usize>> = Vec::new();
            for mask in 0u32..(1 << others.len()) {
                let set: Vec<usize> = others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                if set.len() <= max_cond && d_separated(dag, x, y, &set) {
                    seps.push(set);
                }
            }
            if !seps.iter().any(Vec::is_empty) {
                rels.add_dependency(x, y).unwrap();
            }
            for s in &seps {
                let has_smaller = seps
                    .iter()
                    .any(|t| t.len() < s.len() && t.iter().all(|v| s.contains(v)));
                if !has_smaller {
                    rels.add_independence(x, y, s.iter().copied()).unwrap();
                }
            }
        }
    }
    rels
}
