use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{AdjMatrix, EngineError, Pair, RelationSet};
use crate::vars::VariableTable;

/// Row variable -> unordered column pairs whose cells are both 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColliderCandidates {
    rows: BTreeMap<usize, Vec<Pair>>,
}

impl ColliderCandidates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, row: usize, pair: Pair) {
        let pairs = self.rows.entry(row).or_default();
        if !pairs.contains(&pair) {
            pairs.push(pair);
            pairs.sort();
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[Pair])> {
        self.rows.iter().map(|(&r, p)| (r, p.as_slice()))
    }

    pub fn pairs_of(&self, row: usize) -> &[Pair] {
        self.rows.get(&row).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn pair_count(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    pub fn to_json(&self, vars: &VariableTable) -> Value {
        let mut map = Map::new();
        for (&r, pairs) in &self.rows {
            let list: Vec<Value> = pairs
                .iter()
                .map(|p| {
                    Value::from(vec![
                        vars.label(p.first()).to_string(),
                        vars.label(p.second()).to_string(),
                    ])
                })
                .collect();
            map.insert(vars.label(r).to_string(), Value::Array(list));
        }
        Value::Object(map)
    }

    /// `{"D": [["A", "B"], ["B", "C"]], "E": [["A", "B"]]}`
    pub fn to_text(&self, vars: &VariableTable) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|(&r, pairs)| {
                let ps: Vec<String> = pairs
                    .iter()
                    .map(|p| {
                        format!(
                            "[\"{}\", \"{}\"]",
                            vars.label(p.first()),
                            vars.label(p.second())
                        )
                    })
                    .collect();
                format!("\"{}\": [{}]", vars.label(r), ps.join(", "))
            })
            .collect();
        format!("{{{}}}", rows.join(", "))
    }
}

/// How step 7 decides which candidate pairs mark a collider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Keep a pair iff it is listed as unconditionally independent.
    UncondOnly,
    /// Keep a pair iff some stated separating set for it excludes the row variable.
    #[default]
    PcCorrect,
}

impl FromStr for FilterMode {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uncond-only" => Ok(Self::UncondOnly),
            "pc-correct" => Ok(Self::PcCorrect),
            other => Err(EngineError::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UncondOnly => "uncond-only",
            Self::PcCorrect => "pc-correct",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EngineOptions {
    pub filter: FilterMode,
    /// Run orientation propagation after collider orientation.
    pub propagate: bool,
}

/// Step 3: complete undirected graph, with declared causes pointing one way.
pub fn initial_matrix(
    vars: &VariableTable,
    declared: &std::collections::BTreeSet<(usize, usize)>,
) -> Result<AdjMatrix, EngineError> {
    let mut m = AdjMatrix::complete(vars.clone());
    for &(cause, effect) in declared {
        for v in [cause, effect] {
            if v >= vars.len() {
                return Err(EngineError::UnknownVariable(v));
            }
        }
        m.set(effect, cause, 0);
    }
    Ok(m)
}

/// Step 4: drop edges between unconditionally independent pairs.
pub fn apply_unconditional(matrix: &AdjMatrix, rels: &RelationSet) -> AdjMatrix {
    let mut m = matrix.clone();
    for p in &rels.uncond_indep {
        m.set(p.first(), p.second(), 0);
        m.set(p.second(), p.first(), 0);
    }
    m
}

/// Step 5: drop edges between conditionally independent pairs.
pub fn apply_conditional(matrix: &AdjMatrix, rels: &RelationSet) -> AdjMatrix {
    let mut m = matrix.clone();
    for c in &rels.cond_indep {
        m.set(c.pair.first(), c.pair.second(), 0);
        m.set(c.pair.second(), c.pair.first(), 0);
    }
    m
}

/// Step 6: for each row with at least two 1-cells, every pair of those columns.
pub fn candidate_pairs(matrix: &AdjMatrix) -> ColliderCandidates {
    let n = matrix.n();
    let mut out = ColliderCandidates::new();
    for r in 0..n {
        let ones: Vec<usize> = (0..n).filter(|&c| matrix.get(r, c) == 1).collect();
        for (i, &a) in ones.iter().enumerate() {
            for &b in &ones[i + 1..] {
                out.insert(r, Pair::new(a, b).expect("distinct columns"));
            }
        }
    }
    out
}

/// Step 7: keep candidate pairs whose independence certifies a collider at the row.
pub fn filter_collider_pairs(
    cands: &ColliderCandidates,
    rels: &RelationSet,
    mode: FilterMode,
) -> ColliderCandidates {
    let mut out = ColliderCandidates::new();
    for (row, pairs) in cands.rows() {
        for &pair in pairs {
            let keep = match mode {
                FilterMode::UncondOnly => rels.uncond_indep.contains(&pair),
                FilterMode::PcCorrect => rels.separating_sets(pair).any(|s| !s.contains(&row)),
            };
            if keep {
                out.insert(row, pair);
            }
        }
    }
    out
}

/// Step 8: orient `C1 -> R <- C2` by clearing the row cells of `R`.
pub fn orient_colliders(matrix: &AdjMatrix, filtered: &ColliderCandidates) -> AdjMatrix {
    let mut m = matrix.clone();
    for (row, pairs) in filtered.rows() {
        for p in pairs {
            m.set(row, p.first(), 0);
            m.set(row, p.second(), 0);
        }
    }
    m
}

/// Orientation propagation: `X1 -> X2 - X3` with `X1`, `X3` non-adjacent
/// becomes `X2 -> X3`, repeated to a fixpoint.
pub fn propagate_orientations(matrix: &AdjMatrix) -> AdjMatrix {
    let mut m = matrix.clone();
    let n = m.n();
    loop {
        let mut changed = false;
        for x1 in 0..n {
            for x2 in 0..n {
                if x1 == x2 || !m.directed(x1, x2) {
                    continue;
                }
                for x3 in 0..n {
                    if x3 == x1 || x3 == x2 {
                        continue;
                    }
                    if m.undirected(x2, x3) && !m.adjacent(x1, x3) {
                        m.set(x3, x2, 0);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Intermediate artifacts of one engine run, steps 3 through 8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: AdjMatrix,
    pub after_unconditional: AdjMatrix,
    pub after_conditional: AdjMatrix,
    pub candidates: ColliderCandidates,
    pub filtered: ColliderCandidates,
    pub oriented: AdjMatrix,
    pub propagated: Option<AdjMatrix>,
    pub options: EngineOptions,
}

impl Trace {
    pub fn final_matrix(&self) -> &AdjMatrix {
        self.propagated.as_ref().unwrap_or(&self.oriented)
    }

    pub fn vars(&self) -> &VariableTable {
        self.initial.vars()
    }

    /// `{"step_3": ..., ..., "step_8": ...}` plus `step_8_propagated` when enabled.
    pub fn to_json(&self) -> Value {
        let vars = self.vars();
        let mut map = Map::new();
        map.insert("step_3".into(), self.initial.to_json());
        map.insert("step_4".into(), self.after_unconditional.to_json());
        map.insert("step_5".into(), self.after_conditional.to_json());
        map.insert("step_6".into(), self.candidates.to_json(vars));
        map.insert("step_7".into(), self.filtered.to_json(vars));
        map.insert("step_8".into(), self.oriented.to_json());
        if let Some(p) = &self.propagated {
            map.insert("step_8_propagated".into(), p.to_json());
        }
        Value::Object(map)
    }
}

/// Steps 3-8 (plus optional propagation) over a validated relation set.
pub fn run_engine(
    vars: &VariableTable,
    rels: &RelationSet,
    options: EngineOptions,
) -> Result<Trace, EngineError> {
    rels.validate(vars.len())?;
    let initial = initial_matrix(vars, &rels.declared_causes)?;
    let after_unconditional = apply_unconditional(&initial, rels);
    let after_conditional = apply_conditional(&after_unconditional, rels);
    let candidates = candidate_pairs(&after_conditional);
    let filtered = filter_collider_pairs(&candidates, rels, options.filter);
    let oriented = orient_colliders(&after_conditional, &filtered);
    let propagated = options.propagate.then(|| propagate_orientations(&oriented));
    Ok(Trace {
        initial,
        after_unconditional,
        after_conditional,
        candidates,
        filtered,
        oriented,
        propagated,
        options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn vars(n: usize) -> VariableTable {
        VariableTable::letters(n)
    }

    #[test]
    fn initial_without_causes_is_complete() {
        let m = initial_matrix(&vars(3), &BTreeSet::new()).unwrap();
        assert_eq!(m.ones(), 6);
    }

    #[test]
    fn declared_cause_clears_reverse_cell() {
        let m = initial_matrix(&vars(2), &BTreeSet::from([(0, 1)])).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (1, 0));
        assert!(matches!(
            initial_matrix(&vars(2), &BTreeSet::from([(0, 5)])),
            Err(EngineError::UnknownVariable(5))
        ));
    }

    #[test]
    fn unconditional_identity_and_total() {
        let m = AdjMatrix::complete(vars(3));
        assert_eq!(apply_unconditional(&m, &RelationSet::default()), m);
        let mut all = RelationSet::default();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            all.add_independence(a, b, []).unwrap();
        }
        assert_eq!(apply_unconditional(&m, &all).ones(), 0);
    }

    #[test]
    fn conditional_is_idempotent() {
        let m = AdjMatrix::complete(vars(3));
        let mut r = RelationSet::default();
        r.add_independence(0, 2, [1]).unwrap();
        let once = apply_conditional(&m, &r);
        assert_eq!(apply_conditional(&once, &r), once);
        assert_eq!(apply_conditional(&m, &RelationSet::default()), m);
    }

    #[test]
    fn candidates_edge_cases() {
        assert!(candidate_pairs(&AdjMatrix::zeros(vars(3))).is_empty());
        let m = AdjMatrix::from_edges(vars(3), &[], &[(0, 2), (1, 2)]);
        let c = candidate_pairs(&m);
        assert_eq!(c.pair_count(), 1);
        assert_eq!(c.pairs_of(2), &[Pair::new(0, 1).unwrap()]);
    }

    #[test]
    fn filter_mode_parse() {
        assert_eq!("pc-correct".parse::<FilterMode>().unwrap(), FilterMode::PcCorrect);
        assert_eq!(
            "uncond-only".parse::<FilterMode>().unwrap(),
            FilterMode::UncondOnly
        );
        assert!(matches!(
            "greedy".parse::<FilterMode>(),
            Err(EngineError::UnknownMode(_))
        ));
    }

    #[test]
    fn filter_empty_is_empty() {
        let r = RelationSet::default();
        for mode in [FilterMode::UncondOnly, FilterMode::PcCorrect] {
            assert!(filter_collider_pairs(&ColliderCandidates::new(), &r, mode).is_empty());
        }
    }

    #[test]
    fn pc_correct_uses_conditional_separating_sets() {
        // A -> C <- B with A ⊥ B | D (D elsewhere): only pc-correct keeps the pair
        let mut r = RelationSet::default();
        r.add_independence(0, 1, [3]).unwrap();
        let mut c = ColliderCandidates::new();
        c.insert(2, Pair::new(0, 1).unwrap());
        assert!(filter_collider_pairs(&c, &r, FilterMode::UncondOnly).is_empty());
        assert_eq!(filter_collider_pairs(&c, &r, FilterMode::PcCorrect), c);
        // the row variable inside the separating set disqualifies it
        let mut r2 = RelationSet::default();
        r2.add_independence(0, 1, [2]).unwrap();
        assert!(filter_collider_pairs(&c, &r2, FilterMode::PcCorrect).is_empty());
    }

    #[test]
    fn orient_empty_is_identity() {
        let m = AdjMatrix::complete(vars(3));
        assert_eq!(orient_colliders(&m, &ColliderCandidates::new()), m);
    }

    #[test]
    fn propagation_rule() {
        // A -> B - C, A and C non-adjacent
        let m = AdjMatrix::from_edges(vars(3), &[(0, 1)], &[(1, 2)]);
        let p = propagate_orientations(&m);
        assert!(p.directed(1, 2));
        // triangle: A -> B, B - C, A - C stays put
        let t = AdjMatrix::from_edges(vars(3), &[(0, 1)], &[(1, 2), (0, 2)]);
        assert_eq!(propagate_orientations(&t), t);
    }

    #[test]
    fn no_independencies_gives_complete_undirected() {
        let t = run_engine(&vars(4), &RelationSet::default(), EngineOptions::default()).unwrap();
        assert_eq!(t.final_matrix(), &AdjMatrix::complete(vars(4)));
    }
}
