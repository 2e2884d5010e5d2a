//! Binary classification metrics with "Yes" as the positive class.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pipeline::EvalRecord;
use super::HarnessError;
use crate::hypothesis::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// A missing prediction counts as the wrong answer.
    pub fn add(&mut self, label: Label, predicted: Option<Label>) {
        match (label, predicted) {
            (Label::Yes, Some(Label::Yes)) => self.tp += 1,
            (Label::No, Some(Label::No)) => self.tn += 1,
            (Label::No, _) => self.fp += 1,
            (Label::Yes, _) => self.fn_ += 1,
        }
    }
}

/// Ratios are 0 where undefined, with the reason listed in `degenerate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub counts: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub degenerate: Vec<String>,
}

impl Metrics {
    pub fn from_counts(c: Confusion) -> Self {
        let mut degenerate = Vec::new();
        let ratio = |num: usize, den: usize, what: &str, flags: &mut Vec<String>| {
            if den == 0 {
                flags.push(what.to_string());
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(c.tp, c.tp + c.fp, "precision: no positive predictions", &mut degenerate);
        let recall = ratio(c.tp, c.tp + c.fn_, "recall: no positive labels", &mut degenerate);
        let accuracy = ratio(c.tp + c.tn, c.total(), "accuracy: no records", &mut degenerate);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            degenerate.push("f1: precision and recall are both 0".into());
            0.0
        };
        Self {
            counts: c,
            precision,
            recall,
            f1,
            accuracy,
            degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.correct += usize::from(ok);
        self.accuracy = self.correct as f64 / self.total as f64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupBy {
    NVars,
    Kind,
    Mode,
    /// Per-subtask accuracy is always reported; accepted for symmetry.
    Subtask,
}

impl std::str::FromStr for GroupBy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n-vars" | "n_vars" => Ok(Self::NVars),
            "kind" => Ok(Self::Kind),
            "mode" => Ok(Self::Mode),
            "subtask" => Ok(Self::Subtask),
            other => Err(HarnessError::UnknownGroup(other.to_string())),
        }
    }
}

impl GroupBy {
    fn key(self, r: &EvalRecord) -> Option<String> {
        match self {
            GroupBy::NVars => Some(format!("n_vars={}", r.n_vars)),
            GroupBy::Kind => Some(format!("kind={}", r.kind.as_str())),
            GroupBy::Mode => Some(format!("mode={}", r.mode)),
            GroupBy::Subtask => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore {
    pub metrics: Metrics,
    pub subtasks: BTreeMap<String, Tally>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub records: usize,
    /// Records without a readable final answer.
    pub parse_failures: usize,
    pub errors: usize,
    pub overall: GroupScore,
    pub steps: BTreeMap<String, Tally>,
    pub groups: BTreeMap<String, GroupScore>,
}

/// S1-S3 are steps 1-3, S4 is steps 4-8 together, S5 is the final answer.
fn subtask_outcomes(r: &EvalRecord) -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();
    for (name, k) in [("S1", 1u8), ("S2", 2), ("S3", 3), ("S5", 9)] {
        if let Some(s) = r.step(k) {
            out.push((name, s.matched));
        }
    }
    let mid: Vec<bool> = (4..=8).filter_map(|k| r.step(k).map(|s| s.matched)).collect();
    if mid.len() == 5 {
        out.push(("S4", mid.iter().all(|&m| m)));
    }
    out.sort();
    out
}

fn group_score<'a>(records: impl IntoIterator<Item = &'a EvalRecord>) -> GroupScore {
    let mut c = Confusion::default();
    let mut subtasks: BTreeMap<String, Tally> = BTreeMap::new();
    for r in records {
        c.add(r.label, r.predicted);
        for (name, ok) in subtask_outcomes(r) {
            subtasks.entry(name.to_string()).or_default().add(ok);
        }
    }
    GroupScore {
        metrics: Metrics::from_counts(c),
        subtasks,
    }
}

pub fn score(records: &[EvalRecord], group_by: &[GroupBy]) -> Result<ScoreReport, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NothingToScore);
    }
    let mut steps: BTreeMap<String, Tally> = BTreeMap::new();
    for r in records {
        for s in &r.steps {
            steps.entry(format!("step_{}", s.step)).or_default().add(s.matched);
        }
    }
    let mut keyed: BTreeMap<String, Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        for key in group_by.iter().filter_map(|g| g.key(r)) {
            keyed.entry(key).or_default().push(r);
        }
    }
    Ok(ScoreReport {
        records: records.len(),
        parse_failures: records.iter().filter(|r| r.predicted.is_none()).count(),
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        overall: group_score(records),
        steps,
        groups: keyed
            .into_iter()
            .map(|(k, rs)| (k, group_score(rs)))
            .collect(),
    })
}

impl ScoreReport {
    /// Fixed-layout plain text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, name: &str, g: &GroupScore| {
            let m = &g.metrics;
            let _ = write!(
                out,
                "{name:<22} n={:<5} P={:.4} R={:.4} F1={:.4} Acc={:.4}",
                m.counts.total(),
                m.precision,
                m.recall,
                m.f1,
                m.accuracy
            );
            for (s, t) in &g.subtasks {
                let _ = write!(out, " {s}={:.4}", t.accuracy);
            }
            if !m.degenerate.is_empty() {
                let _ = write!(out, "  [{}]", m.degenerate.join("; "));
            }
            out.push('\n');
        };
        let _ = writeln!(
            out,
            "records={} parse_failures={} errors={}",
            self.records, self.parse_failures, self.errors
        );
        line(&mut out, "overall", &self.overall);
        for (k, g) in &self.groups {
            line(&mut out, k, g);
        }
        if !self.steps.is_empty() {
            let cells: Vec<String> = self
                .steps
                .iter()
                .map(|(k, t)| format!("{k}={}/{}", t.correct, t.total))
                .collect();
            let _ = writeln!(out, "steps: {}", cells.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_to_metrics() {
        let m = Metrics::from_counts(Confusion { tp: 13, fp: 1, tn: 14, fn_: 2 });
        assert!((m.precision - 13.0 / 14.0).abs() < 1e-12);
        assert!((m.recall - 13.0 / 15.0).abs() < 1e-12);
        assert!((m.accuracy - 0.9).abs() < 1e-12);
        assert!(m.degenerate.is_empty());
    }

    #[test]
    fn degenerate_cases_are_flagged() {
        let none_positive = Metrics::from_counts(Confusion { tp: 0, fp: 0, tn: 5, fn_: 0 });
        assert_eq!(none_positive.precision, 0.0);
        assert_eq!(none_positive.accuracy, 1.0);
        assert_eq!(none_positive.degenerate.len(), 3);
        let empty = Metrics::from_counts(Confusion::default());
        assert!(empty.degenerate.iter().any(|d| d.starts_with("accuracy")));
    }

    #[test]
    fn missing_prediction_is_wrong() {
        let mut c = Confusion::default();
        c.add(Label::Yes, None);
        c.add(Label::No, None);
        assert_eq!(c, Confusion { tp: 0, fp: 1, tn: 0, fn_: 1 });
    }
}
