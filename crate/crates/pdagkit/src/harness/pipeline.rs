//! Running samples through a backend and recording what came back.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::backend::{request_digest, ChatBackend, Exchange, Message, Transcript, Usage};
use super::parse::{output_json, parse_answer, parse_step_output, split_subtasks, StepOutput};
use super::prompts::{
    candidates_text, cond_text, independencies_text, matrix_text, relations_text,
    render_cot_prompt, render_few_shot_prompt, render_step_prompt, uncond_text, variables_text,
    Slot,
};
use super::{HarnessError, Reference};
use crate::dataset::Sample;
use crate::engine::EngineOptions;
use crate::hypothesis::{HypothesisKind, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One prompt per step, each fed the parsed output of earlier steps.
    #[default]
    StepByStep,
    /// Ten worked examples, then all nine subtasks in one response.
    FewShot,
    /// Plain step-by-step reasoning without the structured procedure.
    BaselineCot,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::StepByStep => "step-by-step",
            Mode::FewShot => "few-shot",
            Mode::BaselineCot => "baseline-cot",
        })
    }
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "step-by-step" => Ok(Mode::StepByStep),
            "few-shot" => Ok(Mode::FewShot),
            "baseline-cot" => Ok(Mode::BaselineCot),
            other => Err(HarnessError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u8,
    pub raw: String,
    /// Parsed value, `null` when the output could not be read.
    pub parsed: Value,
    pub parse_error: Option<String>,
    /// Parsed value equals the engine's output for this step.
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub sample_id: String,
    pub n_vars: usize,
    pub kind: HypothesisKind,
    pub mode: Mode,
    pub label: Label,
    pub predicted: Option<Label>,
    pub correct: bool,
    pub steps: Vec<StepRecord>,
    pub exchanges: Vec<Exchange>,
    pub usage: Usage,
    /// Why the run stopped early, if it did.
    pub error: Option<String>,
    pub elapsed_ms: u64,
}

impl EvalRecord {
    pub fn step(&self, k: u8) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.step == k)
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            sample_id: self.sample_id.clone(),
            mode: self.mode,
            exchanges: self.exchanges.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub engine: EngineOptions,
}

fn step_matches(step: u8, out: &StepOutput, r: &Reference) -> bool {
    let t = &r.trace;
    match (step, out) {
        (1, StepOutput::Variables { count, names }) => {
            *count == r.vars.len() && names.len() == r.vars.len()
        }
        (2, StepOutput::Relations(p)) => p.matches(&r.relations),
        (3, StepOutput::Matrix(m)) => *m == t.initial,
        (4, StepOutput::Matrix(m)) => *m == t.after_unconditional,
        (5, StepOutput::Matrix(m)) => *m == t.after_conditional,
        (6, StepOutput::Candidates(c)) => *c == t.candidates,
        (7, StepOutput::Candidates(c)) => *c == t.filtered,
        (8, StepOutput::Matrix(m)) => *m == t.oriented,
        (9, StepOutput::Answer(a)) => *a == r.answer,
        _ => false,
    }
}

struct Run<'a> {
    backend: &'a dyn ChatBackend,
    record: EvalRecord,
}

impl Run<'_> {
    fn ask(&mut self, prompt: String) -> Result<String, HarnessError> {
        let messages = [Message::user(prompt)];
        let digest = request_digest(&messages);
        let reply = self.backend.complete(&messages)?;
        if let Some(u) = reply.usage {
            self.record.usage += u;
        }
        self.record.exchanges.push(Exchange {
            request_digest: digest,
            response: reply.text.clone(),
        });
        Ok(reply.text)
    }

    fn record_step(&mut self, step: u8, raw: &str, r: &Reference) -> Option<StepOutput> {
        let parsed = if step == 9 {
            parse_answer(raw).map(StepOutput::Answer)
        } else {
            parse_step_output(step, raw, &r.vars)
        };
        let (out, err) = match parsed {
            Ok(o) => (Some(o), None),
            Err(e) => (None, Some(e)),
        };
        self.record.steps.push(StepRecord {
            step,
            raw: raw.to_string(),
            parsed: output_json(&out, &r.vars),
            parse_error: err,
            matched: out.as_ref().is_some_and(|o| step_matches(step, o, r)),
        });
        if let Some(StepOutput::Answer(a)) = out {
            self.record.predicted = Some(a);
        }
        out
    }
}

/// Runs one sample. Failures are recorded on the returned record rather
/// than raised.
pub fn run_pipeline(
    sample: &Sample,
    backend: &dyn ChatBackend,
    mode: Mode,
    options: &PipelineOptions,
) -> EvalRecord {
    let start = Instant::now();
    let mut run = Run {
        backend,
        record: EvalRecord {
            sample_id: sample.id().to_string(),
            n_vars: sample.n_vars(),
            kind: sample.claim.kind,
            mode,
            label: sample.label(),
            predicted: None,
            correct: false,
            steps: Vec::new(),
            exchanges: Vec::new(),
            usage: Usage::default(),
            error: None,
            elapsed_ms: 0,
        },
    };
    let outcome = Reference::build(&sample.variables, &sample.relations, &sample.claim, options.engine)
        .and_then(|r| match mode {
            Mode::StepByStep => step_by_step(&mut run, sample, &r),
            Mode::FewShot => few_shot(&mut run, sample, &r),
            Mode::BaselineCot => baseline(&mut run, sample, &r),
        });
    let mut record = run.record;
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record.correct = record.predicted == Some(record.label);
    record.elapsed_ms = start.elapsed().as_millis() as u64;
    record
}

fn step_by_step(run: &mut Run<'_>, sample: &Sample, r: &Reference) -> Result<(), HarnessError> {
    let vars = &r.vars;
    let mut outputs: BTreeMap<u8, StepOutput> = BTreeMap::new();
    for step in 1..=9u8 {
        let mut slots = BTreeMap::new();
        if let Some(StepOutput::Variables { names, .. }) = outputs.get(&1) {
            slots.insert(Slot::Variables, variables_text(vars, names.iter().copied()));
        }
        if let Some(StepOutput::Relations(rels)) = outputs.get(&2) {
            slots.insert(Slot::Relations, relations_text(vars, rels));
            slots.insert(Slot::UnconditionalIndependencies, uncond_text(vars, rels));
            slots.insert(Slot::ConditionalIndependencies, cond_text(vars, rels));
            slots.insert(Slot::Independencies, independencies_text(vars, rels));
        }
        let matrix_from = match step {
            4 => Some(3),
            5 => Some(4),
            6 | 8 => Some(5),
            9 => Some(8),
            _ => None,
        };
        if let Some(StepOutput::Matrix(m)) = matrix_from.and_then(|k| outputs.get(&k)) {
            slots.insert(Slot::Matrix, matrix_text(m));
        }
        if let Some(StepOutput::Candidates(c)) = outputs.get(&(step - 1)).filter(|_| step >= 7) {
            slots.insert(Slot::Candidates, candidates_text(vars, c));
        }
        let prompt = render_step_prompt(step, &sample.record.premise, &sample.record.hypothesis, &slots)?;
        let raw = run.ask(prompt)?;
        if let Some(out) = run.record_step(step, &raw, r) {
            outputs.insert(step, out);
        }
    }
    Ok(())
}

fn few_shot(run: &mut Run<'_>, sample: &Sample, r: &Reference) -> Result<(), HarnessError> {
    let prompt = render_few_shot_prompt(&sample.record.premise, &sample.record.hypothesis);
    let raw = run.ask(prompt)?;
    let sections = split_subtasks(&raw);
    for step in 1..=9u8 {
        match sections.get(&step) {
            Some(body) => {
                run.record_step(step, body, r);
            }
            None if step == 9 => {
                run.record_step(9, &raw, r);
            }
            None => run.record.steps.push(StepRecord {
                step,
                raw: String::new(),
                parsed: Value::Null,
                parse_error: Some(format!("no \"Subtask {step}\" section")),
                matched: false,
            }),
        }
    }
    Ok(())
}

fn baseline(run: &mut Run<'_>, sample: &Sample, r: &Reference) -> Result<(), HarnessError> {
    let raw = run.ask(render_cot_prompt(&sample.record.premise, &sample.record.hypothesis))?;
    run.record_step(9, &raw, r);
    Ok(())
}

/// Runs every sample with at most `parallelism` concurrent requests.
/// Records come back in sample order.
pub fn run_batch(
    samples: &[Sample],
    backend: &dyn ChatBackend,
    mode: Mode,
    options: &PipelineOptions,
    parallelism: usize,
) -> Vec<EvalRecord> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<EvalRecord>>> = Mutex::new(vec![None; samples.len()]);
    let workers = parallelism.clamp(1, samples.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(sample) = samples.get(i) else { break };
                let rec = run_pipeline(sample, backend, mode, options);
                log::info!(
                    "{} {} -> {:?}",
                    rec.sample_id,
                    rec.mode,
                    rec.predicted
                );
                slots.lock().expect("result lock")[i] = Some(rec);
            });
        }
    });
    slots
        .into_inner()
        .expect("result lock")
        .into_iter()
        .map(|r| r.expect("every sample ran"))
        .collect()
}
