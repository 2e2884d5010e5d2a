use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::graph::{Dag, SepStatement};
use crate::vars::VariableTable;

/// Unordered pair stored as `(smaller, larger)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Pair(usize, usize);

impl Pair {
    pub fn new(a: usize, b: usize) -> Result<Self, EngineError> {
        if a == b {
            return Err(EngineError::DegeneratePair(a));
        }
        Ok(if a < b { Self(a, b) } else { Self(b, a) })
    }

    pub fn first(&self) -> usize {
        self.0
    }

    pub fn second(&self) -> usize {
        self.1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }
}

impl From<Pair> for [usize; 2] {
    fn from(p: Pair) -> Self {
        [p.0, p.1]
    }
}

impl TryFrom<[usize; 2]> for Pair {
    type Error = EngineError;

    fn try_from(v: [usize; 2]) -> Result<Self, Self::Error> {
        Pair::new(v[0], v[1])
    }
}

/// `pair ⊥ | given`, with `given` non-empty for statements in the conditional list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CondIndep {
    pub pair: Pair,
    pub given: BTreeSet<usize>,
}

/// The verbalized statistical facts of a premise, by variable index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    pub dependencies: BTreeSet<Pair>,
    pub uncond_indep: BTreeSet<Pair>,
    pub cond_indep: BTreeSet<CondIndep>,
    /// (cause, effect)
    pub declared_causes: BTreeSet<(usize, usize)>,
}

/// Which independence statements a derived premise verbalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementSelection {
    /// Only separating sets with no separating proper subset.
    #[default]
    Minimal,
    /// Every separating set up to the size cap.
    FullClosure,
}

impl RelationSet {
    pub fn is_empty(&self) -> bool {
        self.dependencies.is_empty()
            && self.uncond_indep.is_empty()
            && self.cond_indep.is_empty()
            && self.declared_causes.is_empty()
    }

    /// Number of verbalized statements.
    pub fn statement_count(&self) -> usize {
        self.dependencies.len()
            + self.uncond_indep.len()
            + self.cond_indep.len()
            + self.declared_causes.len()
    }

    pub fn add_dependency(&mut self, a: usize, b: usize) -> Result<(), EngineError> {
        self.dependencies.insert(Pair::new(a, b)?);
        Ok(())
    }

    /// Adds `a ⊥ b | given`; an empty `given` lands in the unconditional list.
    pub fn add_independence(
        &mut self,
        a: usize,
        b: usize,
        given: impl IntoIterator<Item = usize>,
    ) -> Result<(), EngineError> {
        let pair = Pair::new(a, b)?;
        let given: BTreeSet<usize> = given.into_iter().collect();
        if given.contains(&a) || given.contains(&b) {
            return Err(EngineError::EndpointInGiven { pair });
        }
        if given.is_empty() {
            self.uncond_indep.insert(pair);
        } else {
            self.cond_indep.insert(CondIndep { pair, given });
        }
        Ok(())
    }

    pub fn add_cause(&mut self, cause: usize, effect: usize) -> Result<(), EngineError> {
        if cause == effect {
            return Err(EngineError::DegeneratePair(cause));
        }
        self.declared_causes.insert((cause, effect));
        Ok(())
    }

    /// Every conditioning set under which the pair is stated independent
    /// (the empty set for an unconditional statement).
    pub fn separating_sets(&self, pair: Pair) -> impl Iterator<Item = BTreeSet<usize>> + '_ {
        let uncond = self
            .uncond_indep
            .contains(&pair)
            .then(BTreeSet::new)
            .into_iter();
        let cond = self
            .cond_indep
            .iter()
            .filter(move |c| c.pair == pair)
            .map(|c| c.given.clone());
        uncond.chain(cond)
    }

    pub fn is_stated_independent(&self, pair: Pair) -> bool {
        self.separating_sets(pair).next().is_some()
    }

    /// Checks indices, conflicting statements and acyclicity of declared causes.
    pub fn validate(&self, n: usize) -> Result<(), EngineError> {
        let check = |v: usize| {
            if v < n {
                Ok(())
            } else {
                Err(EngineError::UnknownVariable(v))
            }
        };
        for p in self.dependencies.iter().chain(&self.uncond_indep) {
            check(p.0)?;
            check(p.1)?;
        }
        for c in &self.cond_indep {
            check(c.pair.0)?;
            check(c.pair.1)?;
            for &g in &c.given {
                check(g)?;
            }
            if c.given.is_empty() {
                return Err(EngineError::EmptyGiven { pair: c.pair });
            }
            if c.given.contains(&c.pair.0) || c.given.contains(&c.pair.1) {
                return Err(EngineError::EndpointInGiven { pair: c.pair });
            }
        }
        for &(a, b) in &self.declared_causes {
            check(a)?;
            check(b)?;
        }
        if let Some(p) = self.dependencies.intersection(&self.uncond_indep).next() {
            return Err(EngineError::Contradiction { pair: *p });
        }
        if !self.declared_causes.is_empty() {
            if n > crate::graph::MAX_NODES {
                return Ok(());
            }
            Dag::new(n, self.declared_causes.iter().copied())
                .map_err(|_| EngineError::CyclicCauses)?;
        }
        Ok(())
    }

    /// Premise relations implied by a DAG's d-separation statements.
    ///
    /// Dependencies are the marginally dependent pairs; independencies follow
    /// `selection` over statements with at most `max_cond` conditioning
    /// variables.
    pub fn from_statements(
        n: usize,
        statements: &[SepStatement],
        selection: StatementSelection,
    ) -> Self {
        let mut rels = RelationSet::default();
        for (x, y) in crate::graph::unordered_pairs(n) {
            let seps: Vec<&SepStatement> =
                statements.iter().filter(|s| s.x == x && s.y == y).collect();
            let pair = Pair(x, y);
            if !seps.iter().any(|s| s.is_unconditional()) {
                rels.dependencies.insert(pair);
            }
            for s in &seps {
                let keep = match selection {
                    StatementSelection::FullClosure => true,
                    StatementSelection::Minimal => !seps.iter().any(|t| {
                        t.cond.len() < s.cond.len() && t.cond.iter().all(|v| s.cond.contains(v))
                    }),
                };
                if keep {
                    rels.add_independence(x, y, s.cond.iter().copied())
                        .expect("d-separation statements are well formed");
                }
            }
        }
        rels
    }

    /// Convenience: derive relations straight from a DAG.
    pub fn from_dag(
        dag: &Dag,
        max_cond: usize,
        selection: StatementSelection,
    ) -> Result<Self, EngineError> {
        let statements = crate::graph::all_dsep_statements(dag, max_cond)?;
        Ok(Self::from_statements(dag.n(), &statements, selection))
    }

    /// Label pairs for display, e.g. `[["A", "C"], ["B", "C"]]`.
    pub fn pair_labels(vars: &VariableTable, pairs: impl IntoIterator<Item = Pair>) -> Vec<[String; 2]> {
        pairs
            .into_iter()
            .map(|p| [vars.label(p.0).to_string(), vars.label(p.1).to_string()])
            .collect()
    }
}
