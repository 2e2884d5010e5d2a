//! Prompting language models through the nine-step procedure and scoring
//! their answers against the engine.

mod backend;
mod metrics;
mod parse;
mod pipeline;
mod prompts;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use backend::{
    request_digest, BackendError, ChatBackend, Exchange, HttpBackend, HttpConfig, Message,
    MockBackend, Reply, ReplayBackend, Role, Transcript, Usage,
};
pub use metrics::{score, Confusion, GroupBy, GroupScore, Metrics, ScoreReport, Tally};
pub use parse::{parse_answer, parse_step_output, split_subtasks, ParsedRelations, StepOutput};
pub use pipeline::{run_batch, run_pipeline, EvalRecord, Mode, PipelineOptions, StepRecord};
pub use prompts::{
    canonical_output, canonical_response, render_cot_prompt, render_few_shot_prompt,
    render_step_prompt, slots_of, step_instruction, Slot, FEW_SHOT_EXAMPLE,
};

use crate::engine::{run_engine, EngineOptions, EngineError, RelationSet, Trace};
use crate::hypothesis::{evaluate_on_pdag, explain, EvalMode, Hypothesis, HypothesisError, Label};
use crate::vars::VariableTable;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("step {step} prompt needs the {slot} slot, which no earlier step supplied")]
    Template { step: u8, slot: Slot },
    #[error("there is no step {0}; steps run 1 to 9")]
    NoSuchStep(u8),
    #[error("unknown mode `{0}` (expected step-by-step, few-shot or baseline-cot)")]
    UnknownMode(String),
    #[error("unknown grouping `{0}` (expected n_vars, kind, mode or subtask)")]
    UnknownGroup(String),
    #[error("no records to score")]
    NothingToScore,
    #[error("record line {line}: {message}")]
    Record { line: usize, message: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The engine's answers for one sample, used to grade every step.
#[derive(Debug, Clone)]
pub struct Reference {
    pub vars: VariableTable,
    pub relations: RelationSet,
    pub trace: Trace,
    pub answer: Label,
    pub explanation: Vec<String>,
}

impl Reference {
    pub fn build(
        vars: &VariableTable,
        relations: &RelationSet,
        hypothesis: &Hypothesis,
        options: EngineOptions,
    ) -> Result<Self, HarnessError> {
        let trace = run_engine(vars, relations, options)?;
        let matrix = trace.final_matrix();
        let verdict = match evaluate_on_pdag(hypothesis, matrix, EvalMode::ExtensionQuantified) {
            Err(HypothesisError::Inconsistent) => {
                evaluate_on_pdag(hypothesis, matrix, EvalMode::RuleBased)?
            }
            other => other?,
        };
        let explanation = explain(hypothesis, matrix)?;
        Ok(Self {
            vars: vars.clone(),
            relations: relations.clone(),
            answer: verdict.answer.binary(),
            explanation,
            trace,
        })
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What produced a set of evaluation records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub mode: Mode,
    pub backend: String,
    pub samples: usize,
    pub dataset_digest: String,
    pub config_digest: String,
    pub options: EngineOptions,
}

impl RunManifest {
    /// `config` must already be free of secrets; only its digest is kept.
    pub fn new(
        mode: Mode,
        backend: &dyn ChatBackend,
        samples: &[crate::dataset::Sample],
        config: &impl Serialize,
        options: EngineOptions,
    ) -> Result<Self, HarnessError> {
        let mut h = Sha256::new();
        for s in samples {
            h.update(serde_json::to_vec(&s.record)?);
            h.update(b"\n");
        }
        Ok(Self {
            version: format!("v{}", env!("CARGO_PKG_VERSION")),
            mode,
            backend: backend.name(),
            samples: samples.len(),
            dataset_digest: hex::encode(h.finalize()),
            config_digest: sha256_hex(&serde_json::to_vec(config)?),
            options,
        })
    }
}

/// One JSON object per line.
pub fn write_eval_records(path: &Path, records: &[EvalRecord]) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_eval_records(path: &Path) -> Result<Vec<EvalRecord>, HarnessError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| HarnessError::Record {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Writes one transcript file per record into `dir`.
pub fn write_transcripts(dir: &Path, records: &[EvalRecord]) -> Result<(), HarnessError> {
    for r in records {
        r.transcript().write_to(dir)?;
    }
    Ok(())
}
