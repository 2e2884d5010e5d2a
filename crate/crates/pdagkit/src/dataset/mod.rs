//! Labeled premise/hypothesis generation from exhaustive DAG enumeration.
//!
//! Every Markov equivalence class on `n` nodes yields one premise (derived
//! from its smallest-mask member) and one sample per hypothesis kind and
//! variable pair. A sample is labeled Yes iff the hypothesis holds in every
//! member of the class.

mod io;
mod sampling;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{EngineError, RelationSet, StatementSelection};
use crate::graph::{enumerate_dags, group_mecs, GraphError, Mec, MAX_NODES};
use crate::hypothesis::{label_idx, Hypothesis, HypothesisKind, Label};
use crate::premise::{
    parse_hypothesis, parse_premise, render_hypothesis, PremiseDoc, PremiseError, RenderStyle, Theme,
};
use crate::vars::VariableTable;

pub use io::{read_records, write_records};
pub use sampling::{balanced_sample, Stratum};

/// Version written into every record.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("variable count {n} outside the supported range 2..={max}")]
    NodeCount { n: usize, max: usize },
    #[error("cell (n_vars={n_vars}, label={label}) has {available} samples, {needed} requested")]
    Capacity {
        n_vars: usize,
        label: Label,
        needed: usize,
        available: usize,
    },
    #[error("record {line}: {message}")]
    Record { line: usize, message: String },
    #[error(transparent)]
    Premise(#[from] PremiseError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Symbolic,
    Story,
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Symbolic => "symbolic",
            Style::Story => "story",
        })
    }
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" => Ok(Style::Symbolic),
            "story" => Ok(Style::Story),
            other => Err(format!("unknown style `{other}` (expected symbolic or story)")),
        }
    }
}

/// One line of a dataset file. Field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub n_vars: usize,
    pub premise: String,
    pub hypothesis: String,
    pub label: Label,
    pub kind: HypothesisKind,
    pub mec_digest: String,
    pub style: Style,
    pub schema_version: u32,
}

/// A record together with its parsed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub record: Record,
    pub variables: VariableTable,
    pub relations: RelationSet,
    pub claim: Hypothesis,
    key: u64,
}

impl Sample {
    pub fn id(&self) -> &str {
        &self.record.id
    }

    pub fn label(&self) -> Label {
        self.record.label
    }

    pub fn n_vars(&self) -> usize {
        self.record.n_vars
    }

    /// Re-parses a stored record; the premise must parse and the hypothesis
    /// must agree with the stored kind.
    pub fn from_record(record: Record) -> Result<Self, DatasetError> {
        let doc = parse_premise(&record.premise)?;
        let claim = parse_hypothesis(&record.hypothesis, &doc.variables)?;
        if claim.kind != record.kind {
            return Err(DatasetError::Record {
                line: 0,
                message: format!(
                    "{}: hypothesis text reads as {} but kind is {}",
                    record.id, claim.kind, record.kind
                ),
            });
        }
        if doc.variables.len() != record.n_vars {
            return Err(DatasetError::Record {
                line: 0,
                message: format!("{}: premise declares {} variables", record.id, doc.variables.len()),
            });
        }
        let key = key_from_id(&record.id).unwrap_or_else(|| digest_key(&record.id));
        Ok(Self {
            record,
            variables: doc.variables,
            relations: doc.relations,
            claim,
            key,
        })
    }
}

impl Stratum for Sample {
    fn stratum(&self) -> (usize, Label) {
        (self.record.n_vars, self.record.label)
    }

    fn sample_key(&self) -> u64 {
        self.key
    }
}

/// Generation settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub kinds: Vec<HypothesisKind>,
    /// Conditioning-set cap; `None` means `n - 2`.
    pub max_cond: Option<usize>,
    pub selection: StatementSelection,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            kinds: HypothesisKind::ALL.to_vec(),
            max_cond: None,
            selection: StatementSelection::Minimal,
        }
    }
}

/// Lightweight (class, kind, pair) triple with its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub mec: usize,
    pub kind: HypothesisKind,
    pub subject: usize,
    pub object: usize,
    pub label: Label,
}

fn kind_code(k: HypothesisKind) -> u64 {
    HypothesisKind::ALL.iter().position(|&x| x == k).expect("listed kind") as u64
}

/// Packed identity used for deterministic sampling.
pub(crate) fn pack_key(n: usize, mec: usize, kind: HypothesisKind, s: usize, o: usize) -> u64 {
    ((mec as u64) << 12) | (n as u64) << 9 | kind_code(kind) << 6 | (s as u64) << 3 | o as u64
}

fn key_from_id(id: &str) -> Option<u64> {
    // n{n}-m{idx}-{kind}-{X}-{Y} with letter labels
    let mut parts = id.split('-');
    let n: usize = parts.next()?.strip_prefix('n')?.parse().ok()?;
    let mec: usize = parts.next()?.strip_prefix('m')?.parse().ok()?;
    let kind: HypothesisKind = parts.next()?.parse().ok()?;
    let letter = |s: &str| -> Option<usize> {
        let b = s.as_bytes();
        (b.len() == 1 && b[0].is_ascii_uppercase()).then(|| (b[0] - b'A') as usize)
    };
    let s = letter(parts.next()?)?;
    let o = letter(parts.next()?)?;
    (parts.next().is_none() && s < 8 && o < 8).then(|| pack_key(n, mec, kind, s, o))
}

/// `(n, class index)` from an id of the form `n{n}-m{idx}-...`.
pub fn class_of_id(id: &str) -> Option<(usize, usize)> {
    let mut parts = id.split('-');
    let n = parts.next()?.strip_prefix('n')?.parse().ok()?;
    let mec = parts.next()?.strip_prefix('m')?.parse().ok()?;
    Some((n, mec))
}

fn digest_key(id: &str) -> u64 {
    let d = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

/// All classes on `n` nodes, ready to emit samples.
#[derive(Debug, Clone)]
pub struct Generator {
    n: usize,
    dag_count: usize,
    mecs: Vec<Mec>,
}

impl Generator {
    pub fn new(n: usize) -> Result<Self, DatasetError> {
        if !(2..=MAX_NODES).contains(&n) {
            return Err(DatasetError::NodeCount { n, max: MAX_NODES });
        }
        let dags: Vec<_> = enumerate_dags(n)?.collect();
        let mecs = group_mecs(&dags)?;
        log::debug!("n={n}: {} DAGs in {} classes", dags.len(), mecs.len());
        Ok(Self {
            n,
            dag_count: dags.len(),
            mecs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dag_count(&self) -> usize {
        self.dag_count
    }

    pub fn mecs(&self) -> &[Mec] {
        &self.mecs
    }

    /// Variable pairs a kind is asked about: ordered, or unordered for
    /// symmetric kinds.
    fn pairs(&self, kind: HypothesisKind) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|s| (0..n).map(move |o| (s, o)))
            .filter(|&(s, o)| if kind.is_symmetric() { s < o } else { s != o })
            .collect()
    }

    /// Labeled candidates of one class, in emission order.
    pub fn candidates_of(&self, mec: usize, cfg: &GenerateConfig) -> Vec<Candidate> {
        let members = self.mecs[mec].members();
        let mut out = Vec::new();
        for &kind in &cfg.kinds {
            for (s, o) in self.pairs(kind) {
                out.push(Candidate {
                    mec,
                    kind,
                    subject: s,
                    object: o,
                    label: label_idx(kind, s, o, members),
                });
            }
        }
        out
    }

    fn relations(&self, mec: usize, cfg: &GenerateConfig) -> Result<RelationSet, DatasetError> {
        let max_cond = cfg.max_cond.unwrap_or(self.n - 2);
        Ok(RelationSet::from_dag(
            self.mecs[mec].representative(),
            max_cond,
            cfg.selection,
        )?)
    }

    /// Builds the symbolic sample for a candidate.
    pub fn materialize(&self, c: &Candidate, cfg: &GenerateConfig) -> Result<Sample, DatasetError> {
        let rels = self.relations(c.mec, cfg)?;
        self.materialize_with(c, rels)
    }

    fn materialize_with(&self, c: &Candidate, rels: RelationSet) -> Result<Sample, DatasetError> {
        let vars = VariableTable::letters(self.n);
        let doc = PremiseDoc::render(vars.clone(), rels, &RenderStyle::Symbolic)?;
        let claim = Hypothesis::new(c.kind, vars.label(c.subject), vars.label(c.object))
            .map_err(PremiseError::from)?;
        let hypothesis = render_hypothesis(&claim, &vars, false)?;
        let id = format!(
            "n{}-m{:06}-{}-{}-{}",
            self.n,
            c.mec,
            c.kind,
            vars.label(c.subject),
            vars.label(c.object)
        );
        Ok(Sample {
            record: Record {
                id,
                n_vars: self.n,
                premise: doc.raw_text,
                hypothesis,
                label: c.label,
                kind: c.kind,
                mec_digest: self.mecs[c.mec].digest(),
                style: Style::Symbolic,
                schema_version: SCHEMA_VERSION,
            },
            variables: doc.variables,
            relations: doc.relations,
            claim,
            key: pack_key(self.n, c.mec, c.kind, c.subject, c.object),
        })
    }

    fn samples_of(&self, mec: usize, cfg: &GenerateConfig) -> Result<Vec<Sample>, DatasetError> {
        let rels = self.relations(mec, cfg)?;
        self.candidates_of(mec, cfg)
            .iter()
            .map(|c| self.materialize_with(c, rels.clone()))
            .collect()
    }

    /// Lazy, deterministic stream over every class and hypothesis.
    pub fn generate<'a>(
        &'a self,
        cfg: &'a GenerateConfig,
    ) -> impl Iterator<Item = Result<Sample, DatasetError>> + 'a {
        (0..self.mecs.len()).flat_map(move |m| match self.samples_of(m, cfg) {
            Ok(v) => v.into_iter().map(Ok).collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        })
    }

    /// Same stream as [`Generator::generate`], built in parallel across
    /// classes; order is preserved.
    pub fn generate_all(&self, cfg: &GenerateConfig) -> Result<Vec<Sample>, DatasetError> {
        let chunks: Vec<Vec<Sample>> = (0..self.mecs.len())
            .into_par_iter()
            .map(|m| self.samples_of(m, cfg))
            .collect::<Result<_, _>>()?;
        Ok(chunks.into_iter().flatten().collect())
    }

    /// Yes/No counts over the full stream without materializing text.
    pub fn label_counts(&self, cfg: &GenerateConfig) -> (usize, usize) {
        (0..self.mecs.len())
            .into_par_iter()
            .map(|m| {
                let c = self.candidates_of(m, cfg);
                let yes = c.iter().filter(|c| c.label == Label::Yes).count();
                (yes, c.len() - yes)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    }

    /// Recomputes a sample's label from the class its id names. Fails when
    /// the id does not point into this generator or the class digest differs.
    pub fn relabel(&self, sample: &Sample) -> Result<Label, DatasetError> {
        let bad = |message: String| DatasetError::Record { line: 0, message };
        let (n, mec) = class_of_id(sample.id())
            .ok_or_else(|| bad(format!("id `{}` does not name a class", sample.id())))?;
        if n != self.n || mec >= self.mecs.len() {
            return Err(bad(format!("id `{}` is outside the n={} classes", sample.id(), self.n)));
        }
        let class = &self.mecs[mec];
        if class.digest() != sample.record.mec_digest {
            return Err(bad(format!("id `{}`: class digest differs", sample.id())));
        }
        let (s, o) = sample
            .claim
            .resolve(&sample.variables)
            .map_err(|e| bad(e.to_string()))?;
        Ok(label_idx(sample.claim.kind, s, o, class.members()))
    }

    /// Balanced draw straight from the candidate space: `per_cell` Yes and
    /// `per_cell` No samples. Picks the same samples [`balanced_sample`] would
    /// pick from the materialized stream.
    pub fn balanced(&self, cfg: &GenerateConfig, per_cell: usize, seed: u64) -> Result<Vec<Sample>, DatasetError> {
        let n = self.n;
        let picked = sampling::bottom_k_par(
            (0..self.mecs.len()).into_par_iter().flat_map_iter(|m| {
                self.candidates_of(m, cfg).into_iter().map(move |c| {
                    let key = pack_key(n, c.mec, c.kind, c.subject, c.object);
                    ((n, c.label), key, c)
                })
            }),
            per_cell,
            seed,
            &[(n, Label::Yes), (n, Label::No)],
        )?;
        picked
            .into_iter()
            .map(|c| self.materialize(&c, cfg))
            .collect()
    }
}

/// Re-renders a sample in story style with names from `theme`. With a seed
/// the bank is shuffled first; without one names bind in bank order.
pub fn storyify(sample: &Sample, theme: &Theme, seed: Option<u64>) -> Result<Sample, DatasetError> {
    let n = sample.variables.len();
    if theme.len() < n {
        return Err(PremiseError::BankTooSmall {
            needed: n,
            available: theme.len(),
        }
        .into());
    }
    let mut names = theme.names.clone();
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ sample.key);
        names.shuffle(&mut rng);
    }
    let bank = Theme {
        name: theme.name.clone(),
        names: names[..n].to_vec(),
    };
    let doc = PremiseDoc::render(
        sample.variables.without_aliases(),
        sample.relations.clone(),
        &RenderStyle::Story(bank),
    )?;
    let hypothesis = render_hypothesis(&sample.claim, &doc.variables, true)?;
    let mut out = sample.clone();
    out.record.premise = doc.raw_text;
    out.record.hypothesis = hypothesis;
    out.record.style = Style::Story;
    out.variables = doc.variables;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(matches!(Generator::new(1), Err(DatasetError::NodeCount { .. })));
        assert!(matches!(Generator::new(7), Err(DatasetError::NodeCount { .. })));
    }

    #[test]
    fn three_nodes() {
        let g = Generator::new(3).unwrap();
        assert_eq!(g.dag_count(), 25);
        assert_eq!(g.mecs().len(), 11);
        let cfg = GenerateConfig::default();
        let all = g.generate_all(&cfg).unwrap();
        // 6 ordered pairs x 3 kinds + 3 unordered pairs x 2 kinds per class
        assert_eq!(all.len(), 11 * 24);
        let lazy: Vec<Sample> = g.generate(&cfg).collect::<Result<_, _>>().unwrap();
        assert_eq!(lazy, all);
        let collider = all
            .iter()
            .find(|s| {
                s.record.premise
                    == "Suppose that there is a closed system of 3 variables, A, B and C. All statistical relations among these 3 variables are as follows: A correlates with C. B correlates with C. However, A is independent of B."
                    && s.record.hypothesis == "A directly affects C."
            })
            .expect("collider sample present");
        assert_eq!(collider.label(), Label::Yes);
    }

    #[test]
    fn two_node_direct_cause_is_no() {
        let g = Generator::new(2).unwrap();
        let cfg = GenerateConfig {
            kinds: vec![HypothesisKind::DirectCause],
            ..Default::default()
        };
        let all = g.generate_all(&cfg).unwrap();
        let linked: Vec<_> = all.iter().filter(|s| !s.relations.dependencies.is_empty()).collect();
        assert_eq!(linked.len(), 2);
        assert!(linked.iter().all(|s| s.label() == Label::No));
    }

    #[test]
    fn records_round_trip_through_parser() {
        let g = Generator::new(3).unwrap();
        for s in g.generate_all(&GenerateConfig::default()).unwrap() {
            let back = Sample::from_record(s.record.clone()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn balanced_paths_agree() {
        let g = Generator::new(3).unwrap();
        let cfg = GenerateConfig::default();
        let fast = g.balanced(&cfg, 5, 11).unwrap();
        let slow = balanced_sample(g.generate_all(&cfg).unwrap(), 5, 11).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast.iter().filter(|s| s.label() == Label::Yes).count(), 5);
        let other = g.balanced(&cfg, 5, 12).unwrap();
        assert_ne!(fast, other);
    }

    #[test]
    fn storyify_keeps_relations_and_label() {
        let g = Generator::new(4).unwrap();
        let s = g.generate_all(&GenerateConfig::default()).unwrap().swap_remove(100);
        let theme = Theme::builtin("marketing").unwrap();
        let story = storyify(&s, &theme, Some(3)).unwrap();
        assert_eq!(story.record.style, Style::Story);
        assert_eq!(story.label(), s.label());
        let back = Sample::from_record(story.record.clone()).unwrap();
        assert_eq!(back.relations, s.relations);
        assert_eq!(back.claim, s.claim);
        assert_eq!(storyify(&s, &theme, Some(3)).unwrap(), story);

        let small = Theme::custom("tiny", vec!["x".into(), "y".into(), "z".into()]).unwrap();
        assert!(storyify(&s, &small, None).is_err());
    }

    #[test]
    fn identity_bank_keeps_labels() {
        let g = Generator::new(3).unwrap();
        let s = g.generate_all(&GenerateConfig::default()).unwrap().swap_remove(30);
        let theme = Theme::custom("identity", vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let story = storyify(&s, &theme, None).unwrap();
        let back = Sample::from_record(story.record.clone()).unwrap();
        assert_eq!(back.relations, s.relations);
        assert_eq!(story.record.hypothesis, s.record.hypothesis);
    }

    #[test]
    fn id_key_round_trip() {
        let k = pack_key(5, 1234, HypothesisKind::CommonCause, 1, 4);
        assert_eq!(key_from_id("n5-m001234-common_cause-B-E"), Some(k));
        assert_eq!(key_from_id("junk"), None);
    }
}
