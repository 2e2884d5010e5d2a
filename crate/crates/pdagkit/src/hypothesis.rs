//! Typed causal hypotheses: truth in a single DAG, ground-truth labels over a
//! Markov equivalence class, and three-valued evaluation against a matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{AdjMatrix, EdgeMark, EngineError};
use crate::graph::{dag_extensions, iter_bits, Dag, Mec};
use crate::vars::VariableTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypothesisError {
    #[error("hypothesis subject and object are the same variable `{0}`")]
    SameVariable(String),
    #[error("unknown variable `{0}` in hypothesis")]
    UnknownVariable(String),
    #[error("unknown hypothesis kind `{0}`")]
    UnknownKind(String),
    #[error("unknown evaluation mode `{0}` (expected rule-based or extension-quantified)")]
    UnknownMode(String),
    #[error("the matrix admits no consistent DAG extension")]
    Inconsistent,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    /// edge subject -> object
    DirectCause,
    /// directed path of length >= 2
    IndirectCause,
    /// directed path of length >= 1
    Cause,
    /// some Z with subject -> Z <- object
    CommonEffect,
    /// some Z with subject <- Z -> object
    CommonCause,
}

impl HypothesisKind {
    pub const ALL: [HypothesisKind; 5] = [
        Self::DirectCause,
        Self::IndirectCause,
        Self::Cause,
        Self::CommonEffect,
        Self::CommonCause,
    ];

    /// Symmetric kinds are generated once per unordered pair.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Self::CommonEffect | Self::CommonCause)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DirectCause => "direct_cause",
            Self::IndirectCause => "indirect_cause",
            Self::Cause => "cause",
            Self::CommonEffect => "common_effect",
            Self::CommonCause => "common_cause",
        }
    }
}

impl fmt::Display for HypothesisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HypothesisKind {
    type Err = HypothesisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| HypothesisError::UnknownKind(s.to_string()))
    }
}

/// A causal claim about two variables, by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    pub kind: HypothesisKind,
    pub subject: String,
    pub object: String,
}

impl Hypothesis {
    pub fn new(
        kind: HypothesisKind,
        subject: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<Self, HypothesisError> {
        let (subject, object) = (subject.into(), object.into());
        if subject == object {
            return Err(HypothesisError::SameVariable(subject));
        }
        Ok(Self {
            kind,
            subject,
            object,
        })
    }

    /// Subject and object indices in `vars`.
    pub fn resolve(&self, vars: &VariableTable) -> Result<(usize, usize), HypothesisError> {
        let s = vars
            .index_of(&self.subject)
            .map_err(|_| HypothesisError::UnknownVariable(self.subject.clone()))?;
        let o = vars
            .index_of(&self.object)
            .map_err(|_| HypothesisError::UnknownVariable(self.object.clone()))?;
        Ok((s, o))
    }
}

/// Ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Yes,
    No,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Yes => "Yes",
            Label::No => "No",
        })
    }
}

/// Three-valued answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    Yes,
    No,
    Undetermined,
}

impl Answer {
    /// Undetermined counts as No: a Yes label needs truth in every graph.
    pub fn binary(self) -> Label {
        match self {
            Answer::Yes => Label::Yes,
            Answer::No | Answer::Undetermined => Label::No,
        }
    }
}

impl From<Label> for Answer {
    fn from(l: Label) -> Self {
        match l {
            Label::Yes => Answer::Yes,
            Label::No => Answer::No,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "Yes",
            Answer::No => "No",
            Answer::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Read the matrix directly with the step-9 rules.
    RuleBased,
    /// Quantify over every consistent DAG extension.
    #[default]
    ExtensionQuantified,
}

impl FromStr for EvalMode {
    type Err = HypothesisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule-based" | "rule" => Ok(Self::RuleBased),
            "extension-quantified" | "extension" => Ok(Self::ExtensionQuantified),
            other => Err(HypothesisError::UnknownMode(other.to_string())),
        }
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    DirectedEdge { from: String, to: String },
    UndirectedEdge { a: String, b: String },
    NoEdge { a: String, b: String },
    DirectedPath { nodes: Vec<String> },
    Colliders { nodes: Vec<String> },
    CommonCauses { nodes: Vec<String> },
    /// Candidates that some extension could realize, none forced.
    Possible { nodes: Vec<String> },
    /// No possibly-directed route or shared neighbor exists.
    Excluded,
    Extensions { holding: usize, total: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    fn new(answer: Answer, witness: Witness) -> Self {
        Self {
            answer,
            witness: Some(witness),
        }
    }
}

/// Index-level truth of a hypothesis in one DAG.
pub(crate) fn holds_idx(kind: HypothesisKind, s: usize, o: usize, dag: &Dag) -> bool {
    match kind {
        HypothesisKind::DirectCause => dag.has_edge(s, o),
        HypothesisKind::Cause => dag.descendants(s) >> o & 1 == 1,
        HypothesisKind::IndirectCause => iter_bits(dag.children(s))
            .filter(|&c| c != o)
            .any(|c| dag.descendants(c) >> o & 1 == 1),
        HypothesisKind::CommonEffect => dag.children(s) & dag.children(o) != 0,
        HypothesisKind::CommonCause => dag.parents(s) & dag.parents(o) != 0,
    }
}

pub fn holds_in_dag(h: &Hypothesis, dag: &Dag, vars: &VariableTable) -> Result<bool, HypothesisError> {
    let (s, o) = h.resolve(vars)?;
    if vars.len() != dag.n() {
        return Err(HypothesisError::Engine(EngineError::Shape {
            expected: vars.len(),
        }));
    }
    Ok(holds_idx(h.kind, s, o, dag))
}

/// Yes iff the hypothesis holds in every member of the class.
pub fn label_against_mec(h: &Hypothesis, mec: &Mec, vars: &VariableTable) -> Result<Label, HypothesisError> {
    let (s, o) = h.resolve(vars)?;
    Ok(label_idx(h.kind, s, o, mec.members()))
}

pub(crate) fn label_idx(kind: HypothesisKind, s: usize, o: usize, members: &[Dag]) -> Label {
    if members.iter().all(|d| holds_idx(kind, s, o, d)) {
        Label::Yes
    } else {
        Label::No
    }
}

pub fn evaluate_on_pdag(
    h: &Hypothesis,
    matrix: &AdjMatrix,
    mode: EvalMode,
) -> Result<Verdict, HypothesisError> {
    let (s, o) = h.resolve(matrix.vars())?;
    match mode {
        EvalMode::ExtensionQuantified => {
            let ext = dag_extensions(matrix)?;
            if ext.is_empty() {
                return Err(HypothesisError::Inconsistent);
            }
            let holding = ext.iter().filter(|d| holds_idx(h.kind, s, o, d)).count();
            let answer = if holding == ext.len() {
                Answer::Yes
            } else if holding == 0 {
                Answer::No
            } else {
                Answer::Undetermined
            };
            Ok(Verdict::new(
                answer,
                Witness::Extensions {
                    holding,
                    total: ext.len(),
                },
            ))
        }
        EvalMode::RuleBased => {
            matrix.validate_pdag()?;
            Ok(rule_based(h.kind, s, o, matrix))
        }
    }
}

fn labels(m: &AdjMatrix, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&v| m.vars().label(v).to_string()).collect()
}

/// Edge `a -> b` possible in some orientation.
fn may_point(m: &AdjMatrix, a: usize, b: usize) -> bool {
    matches!(m.mark(a, b), EdgeMark::Forward | EdgeMark::Undirected)
}

fn rule_based(kind: HypothesisKind, s: usize, o: usize, m: &AdjMatrix) -> Verdict {
    let name = |v: usize| m.vars().label(v).to_string();
    let n = m.n();
    match kind {
        HypothesisKind::DirectCause => match m.mark(s, o) {
            EdgeMark::Forward => Verdict::new(
                Answer::Yes,
                Witness::DirectedEdge {
                    from: name(s),
                    to: name(o),
                },
            ),
            EdgeMark::Backward => Verdict::new(
                Answer::No,
                Witness::DirectedEdge {
                    from: name(o),
                    to: name(s),
                },
            ),
            EdgeMark::Undirected => Verdict::new(
                Answer::Undetermined,
                Witness::UndirectedEdge { a: name(s), b: name(o) },
            ),
            EdgeMark::Absent => Verdict::new(Answer::No, Witness::NoEdge { a: name(s), b: name(o) }),
        },
        HypothesisKind::CommonEffect | HypothesisKind::CommonCause => {
            let into = kind == HypothesisKind::CommonEffect;
            let (certain, possible): (Vec<usize>, Vec<usize>) = {
                let others: Vec<usize> = (0..n).filter(|&r| r != s && r != o).collect();
                let certain = others
                    .iter()
                    .copied()
                    .filter(|&r| {
                        if into {
                            m.directed(s, r) && m.directed(o, r)
                        } else {
                            m.directed(r, s) && m.directed(r, o)
                        }
                    })
                    .collect();
                let possible = others
                    .iter()
                    .copied()
                    .filter(|&r| {
                        if into {
                            may_point(m, s, r) && may_point(m, o, r)
                        } else {
                            may_point(m, r, s) && may_point(m, r, o)
                        }
                    })
                    .collect();
                (certain, possible)
            };
            if !certain.is_empty() {
                let nodes = labels(m, &certain);
                let w = if into {
                    Witness::Colliders { nodes }
                } else {
                    Witness::CommonCauses { nodes }
                };
                Verdict::new(Answer::Yes, w)
            } else if !possible.is_empty() {
                Verdict::new(
                    Answer::Undetermined,
                    Witness::Possible {
                        nodes: labels(m, &possible),
                    },
                )
            } else {
                Verdict::new(Answer::No, Witness::Excluded)
            }
        }
        HypothesisKind::Cause | HypothesisKind::IndirectCause => {
            let min_len = if kind == HypothesisKind::Cause { 1 } else { 2 };
            if let Some(path) = find_path(m, s, o, min_len, |a, b| m.directed(a, b)) {
                Verdict::new(
                    Answer::Yes,
                    Witness::DirectedPath {
                        nodes: labels(m, &path),
                    },
                )
            } else if let Some(path) = find_path(m, s, o, min_len, |a, b| may_point(m, a, b)) {
                Verdict::new(
                    Answer::Undetermined,
                    Witness::Possible {
                        nodes: labels(m, &path),
                    },
                )
            } else {
                Verdict::new(Answer::No, Witness::Excluded)
            }
        }
    }
}

/// Simple path `from ~> to` with at least `min_len` edges along `step`.
fn find_path(
    m: &AdjMatrix,
    from: usize,
    to: usize,
    min_len: usize,
    step: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    fn dfs(
        n: usize,
        path: &mut Vec<usize>,
        to: usize,
        min_len: usize,
        step: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        let cur = *path.last().expect("path starts non-empty");
        for next in 0..n {
            if path.contains(&next) || !step(cur, next) {
                continue;
            }
            path.push(next);
            if next == to {
                if path.len() > min_len {
                    return true;
                }
            } else if dfs(n, path, to, min_len, step) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = vec![from];
    dfs(m.n(), &mut path, to, min_len, &step).then_some(path)
}

/// Step-9 style explanation of how the matrix bears on the hypothesis.
pub fn explain(h: &Hypothesis, matrix: &AdjMatrix) -> Result<Vec<String>, HypothesisError> {
    let (s, o) = h.resolve(matrix.vars())?;
    let l = |v: usize| matrix.vars().label(v).to_string();
    let (a, b) = (l(s), l(o));
    let cell = |r: usize, c: usize| matrix.get(r, c);
    let mut lines = Vec::new();
    match h.kind {
        HypothesisKind::DirectCause | HypothesisKind::Cause | HypothesisKind::IndirectCause => {
            let head = format!(
                "Checking matrix[{a}][{b}] = {} and matrix[{b}][{a}] = {}.",
                cell(s, o),
                cell(o, s)
            );
            let tail = match matrix.mark(s, o) {
                EdgeMark::Undirected => {
                    format!("According to rule 1, the causal direction between {a} and {b} is undetermined.")
                }
                EdgeMark::Forward => format!(
                    "According to rule 2, this suggests {a} is a direct cause of {b}, or {b} is a direct effect of {a}."
                ),
                EdgeMark::Backward => format!(
                    "According to rule 3, this suggests {b} is a direct cause of {a}, or {a} is a direct effect of {b}."
                ),
                EdgeMark::Absent => format!("There is no direct edge between {a} and {b}."),
            };
            lines.push(format!("{head} {tail}"));
            if h.kind != HypothesisKind::DirectCause {
                let v = rule_based(h.kind, s, o, matrix);
                if let Some(Witness::DirectedPath { nodes }) = &v.witness {
                    lines.push(format!("Directed path: {}.", nodes.join(" -> ")));
                } else if let Some(Witness::Possible { nodes }) = &v.witness {
                    lines.push(format!(
                        "Path {} contains undetermined directions.",
                        nodes.join(" - ")
                    ));
                } else {
                    lines.push(format!("No directed path leads from {a} to {b}."));
                }
            }
        }
        HypothesisKind::CommonEffect | HypothesisKind::CommonCause => {
            let into = h.kind == HypothesisKind::CommonEffect;
            let what = if into { "common effect" } else { "common cause" };
            for r in (0..matrix.n()).filter(|&r| r != s && r != o) {
                let rn = l(r);
                if !matrix.adjacent(r, s) && !matrix.adjacent(r, o) {
                    continue;
                }
                let ok = if into {
                    matrix.directed(s, r) && matrix.directed(o, r)
                } else {
                    matrix.directed(r, s) && matrix.directed(r, o)
                };
                let clauses: Vec<String> = [(s, &a), (o, &b)]
                    .into_iter()
                    .filter(|&(v, _)| matrix.adjacent(r, v))
                    .map(|(v, vn)| {
                        format!(
                            "[\"{rn}\", \"{vn}\"] = {} and [\"{vn}\", \"{rn}\"] = {}",
                            cell(r, v),
                            cell(v, r)
                        )
                    })
                    .collect();
                lines.push(format!(
                    "Node {rn}: {}, so {rn} is {}a {what} of {a} and {b}.",
                    clauses.join(", and "),
                    if ok { "" } else { "not " }
                ));
            }
            if lines.is_empty() {
                lines.push(format!("No variable is adjacent to both {a} and {b}."));
            }
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_dags, group_mecs};

    fn abc() -> VariableTable {
        VariableTable::letters(3)
    }

    fn h(kind: HypothesisKind, s: &str, o: &str) -> Hypothesis {
        Hypothesis::new(kind, s, o).unwrap()
    }

    #[test]
    fn kinds_in_single_dags() {
        let vars = abc();
        let collider = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert!(holds_in_dag(&h(HypothesisKind::DirectCause, "A", "C"), &collider, &vars).unwrap());
        assert!(holds_in_dag(&h(HypothesisKind::CommonEffect, "A", "B"), &collider, &vars).unwrap());

        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(holds_in_dag(&h(HypothesisKind::IndirectCause, "A", "C"), &chain, &vars).unwrap());
        assert!(!holds_in_dag(&h(HypothesisKind::DirectCause, "A", "C"), &chain, &vars).unwrap());
        assert!(holds_in_dag(&h(HypothesisKind::Cause, "A", "C"), &chain, &vars).unwrap());

        // A <- C -> B with C playing the confounder
        let fork = Dag::new(3, [(2, 0), (2, 1)]).unwrap();
        assert!(holds_in_dag(&h(HypothesisKind::CommonCause, "A", "B"), &fork, &vars).unwrap());
    }

    #[test]
    fn indirect_does_not_exclude_direct_edge() {
        // A -> B -> C plus A -> C
        let d = Dag::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(holds_in_dag(&h(HypothesisKind::IndirectCause, "A", "C"), &d, &abc()).unwrap());
        let direct_only = Dag::new(3, [(0, 2)]).unwrap();
        assert!(!holds_in_dag(&h(HypothesisKind::IndirectCause, "A", "C"), &direct_only, &abc()).unwrap());
    }

    #[test]
    fn same_variable_rejected() {
        assert!(matches!(
            Hypothesis::new(HypothesisKind::Cause, "A", "A"),
            Err(HypothesisError::SameVariable(_))
        ));
    }

    #[test]
    fn unknown_label_rejected() {
        let d = Dag::empty(3).unwrap();
        assert!(matches!(
            holds_in_dag(&h(HypothesisKind::Cause, "A", "Z"), &d, &abc()),
            Err(HypothesisError::UnknownVariable(_))
        ));
    }

    #[test]
    fn mec_labels() {
        let vars = abc();
        let all: Vec<Dag> = enumerate_dags(3).unwrap().collect();
        let mecs = group_mecs(&all).unwrap();
        let collider = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let cm = mecs.iter().find(|m| m.members().contains(&collider)).unwrap();
        assert_eq!(cm.members().len(), 1);
        assert_eq!(
            label_against_mec(&h(HypothesisKind::DirectCause, "A", "C"), cm, &vars).unwrap(),
            Label::Yes
        );
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let chm = mecs.iter().find(|m| m.members().contains(&chain)).unwrap();
        assert_eq!(chm.members().len(), 3);
        assert_eq!(
            label_against_mec(&h(HypothesisKind::DirectCause, "A", "B"), chm, &vars).unwrap(),
            Label::No
        );
    }

    #[test]
    fn undirected_edge_is_undetermined_by_rule() {
        let m = AdjMatrix::complete(VariableTable::letters(2));
        let v = evaluate_on_pdag(&h(HypothesisKind::DirectCause, "A", "B"), &m, EvalMode::RuleBased).unwrap();
        assert_eq!(v.answer, Answer::Undetermined);
        let v = evaluate_on_pdag(
            &h(HypothesisKind::DirectCause, "A", "B"),
            &m,
            EvalMode::ExtensionQuantified,
        )
        .unwrap();
        assert_eq!(v.answer, Answer::Undetermined);
        assert_eq!(v.witness, Some(Witness::Extensions { holding: 1, total: 2 }));
        assert_eq!(v.answer.binary(), Label::No);
    }

    #[test]
    fn verdict_serialization_shape() {
        let v = Verdict::new(
            Answer::Yes,
            Witness::Colliders {
                nodes: vec!["D".into(), "E".into()],
            },
        );
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"answer":"Yes","witness":{"type":"colliders","nodes":["D","E"]}}"#
        );
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("direct-cause".parse::<HypothesisKind>().unwrap(), HypothesisKind::DirectCause);
        assert!("sideways".parse::<HypothesisKind>().is_err());
    }
}
