//! Step prompts, context slots and canonical step outputs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::parse::ParsedRelations;
use super::{HarnessError, Reference};
use crate::dataset::{GenerateConfig, Generator};
use crate::engine::{AdjMatrix, EngineOptions, ColliderCandidates, Pair};
use crate::hypothesis::Label;
use crate::vars::VariableTable;

const STEP_TEMPLATES: [&str; 9] = [
    include_str!("../../assets/prompts/step_1.txt"),
    include_str!("../../assets/prompts/step_2.txt"),
    include_str!("../../assets/prompts/step_3.txt"),
    include_str!("../../assets/prompts/step_4.txt"),
    include_str!("../../assets/prompts/step_5.txt"),
    include_str!("../../assets/prompts/step_6.txt"),
    include_str!("../../assets/prompts/step_7.txt"),
    include_str!("../../assets/prompts/step_8.txt"),
    include_str!("../../assets/prompts/step_9.txt"),
];

/// Worked example shipped as the first few-shot demonstration.
pub const FEW_SHOT_EXAMPLE: &str = include_str!("../../assets/prompts/few_shot_example.txt");

pub const FEW_SHOT_HEADER: &str = "Solve the last premise and hypothesis the way the examples do: answer \"Subtask 1\" through \"Subtask 9\" in order, each followed by Output:, and finish with Final Answer: \"Yes\" or Final Answer: \"No\".";

pub const COT_INSTRUCTION: &str = "Decide whether the hypothesis follows from the premise. Let's think step by step, then finish with Final Answer: \"Yes\" or Final Answer: \"No\".";

/// Number of demonstrations in the few-shot prompt.
pub const FEW_SHOT_COUNT: usize = 10;

/// Instruction text for step 1-9, without the trailing newline.
pub fn step_instruction(step: u8) -> &'static str {
    STEP_TEMPLATES[usize::from(step) - 1].trim_end_matches('\n')
}

/// Named context a step prompt carries from earlier steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Variables,
    Relations,
    Matrix,
    UnconditionalIndependencies,
    ConditionalIndependencies,
    Candidates,
    Independencies,
}

impl Slot {
    fn title(self) -> &'static str {
        match self {
            Slot::Variables => "Variables",
            Slot::Relations => "Statistical relations",
            Slot::Matrix => "Adjacency matrix",
            Slot::UnconditionalIndependencies => "Unconditional independencies",
            Slot::ConditionalIndependencies => "Conditional independencies",
            Slot::Candidates => "All Pairs",
            Slot::Independencies => "Independencies",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

pub fn slots_of(step: u8) -> &'static [Slot] {
    match step {
        2 => &[Slot::Variables],
        3 => &[Slot::Variables, Slot::Relations],
        4 => &[Slot::Matrix, Slot::UnconditionalIndependencies],
        5 => &[Slot::Matrix, Slot::ConditionalIndependencies],
        6 | 9 => &[Slot::Matrix],
        7 => &[Slot::Candidates, Slot::Independencies],
        8 => &[Slot::Matrix, Slot::Candidates],
        _ => &[],
    }
}

/// `Premise: ...\nHypothesis: ...\n\n<instruction>` followed by one titled
/// block per slot.
pub fn render_step_prompt(
    step: u8,
    premise: &str,
    hypothesis: &str,
    slots: &BTreeMap<Slot, String>,
) -> Result<String, HarnessError> {
    if !(1..=9).contains(&step) {
        return Err(HarnessError::NoSuchStep(step));
    }
    let mut out = format!(
        "Premise: {premise}\nHypothesis: {hypothesis}\n\n{}",
        step_instruction(step)
    );
    for &slot in slots_of(step) {
        let value = slots
            .get(&slot)
            .ok_or(HarnessError::Template { step, slot })?;
        out.push_str(&format!("\n\n{}:\n{value}", slot.title()));
    }
    Ok(out)
}

pub fn render_cot_prompt(premise: &str, hypothesis: &str) -> String {
    format!("Premise: {premise}\nHypothesis: {hypothesis}\n\n{COT_INSTRUCTION}")
}

pub fn render_few_shot_prompt(premise: &str, hypothesis: &str) -> String {
    let mut out = format!("{FEW_SHOT_HEADER}\n\nExample 1:\n{}", FEW_SHOT_EXAMPLE.trim_end());
    for (i, ex) in generated_examples().iter().enumerate() {
        out.push_str(&format!("\n\nExample {}:\n{ex}", i + 2));
    }
    out.push_str(&format!("\n\nPremise: {premise}\nHypothesis: {hypothesis}\n"));
    out
}

/// Nine engine-solved demonstrations drawn from four-variable graphs.
fn generated_examples() -> &'static [String] {
    static EXAMPLES: OnceLock<Vec<String>> = OnceLock::new();
    EXAMPLES.get_or_init(|| {
        let generator = Generator::new(4).expect("four variables are supported");
        let picks = generator
            .balanced(&GenerateConfig::default(), FEW_SHOT_COUNT / 2, 0x5eed)
            .expect("four-variable graphs fill every cell");
        picks
            .iter()
            .take(FEW_SHOT_COUNT - 1)
            .map(|s| {
                let r = Reference::build(&s.variables, &s.relations, &s.claim, EngineOptions::default())
                    .expect("generated samples are consistent");
                format!(
                    "Premise: {}\nHypothesis: {}\n\n{}",
                    s.record.premise,
                    s.record.hypothesis,
                    canonical_response(&r)
                )
            })
            .collect()
    })
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn pair_text(vars: &VariableTable, p: &Pair) -> String {
    format!("[{}, {}]", quoted(vars.label(p.first())), quoted(vars.label(p.second())))
}

fn pairs_text<'a>(vars: &VariableTable, pairs: impl IntoIterator<Item = &'a Pair>) -> String {
    let items: Vec<String> = pairs.into_iter().map(|p| pair_text(vars, p)).collect();
    format!("[{}]", items.join(", "))
}

pub fn variables_text(vars: &VariableTable, names: impl IntoIterator<Item = usize>) -> String {
    let names: Vec<String> = names.into_iter().map(|v| quoted(vars.label(v))).collect();
    format!(
        "{{\"number of random variables\": {}, \"names of random variables\": [{}]}}",
        names.len(),
        names.join(", ")
    )
}

pub fn uncond_text(vars: &VariableTable, rels: &ParsedRelations) -> String {
    pairs_text(vars, &rels.uncond)
}

/// Conditional statements as `[X, Y, [Z, ...]]`, or bare pairs when the
/// conditioning set is unknown.
pub fn cond_text(vars: &VariableTable, rels: &ParsedRelations) -> String {
    let items: Vec<String> = rels
        .cond
        .iter()
        .map(|(p, given)| match given {
            Some(g) => {
                let g: Vec<String> = g.iter().map(|&v| quoted(vars.label(v))).collect();
                format!(
                    "[{}, {}, [{}]]",
                    quoted(vars.label(p.first())),
                    quoted(vars.label(p.second())),
                    g.join(", ")
                )
            }
            None => pair_text(vars, p),
        })
        .collect();
    format!("[{}]", items.join(", "))
}

pub fn relations_text(vars: &VariableTable, rels: &ParsedRelations) -> String {
    let mut body = format!(
        "\"Dependencies\": {}, \"Unconditional Independencies\": {}, \"Conditional Independencies\": {}",
        pairs_text(vars, &rels.dependencies),
        uncond_text(vars, rels),
        cond_text(vars, rels)
    );
    if !rels.causes.is_empty() {
        let causes: Vec<String> = rels
            .causes
            .iter()
            .map(|&(a, b)| format!("[{}, {}]", quoted(vars.label(a)), quoted(vars.label(b))))
            .collect();
        body.push_str(&format!(", \"Causes\": [{}]", causes.join(", ")));
    }
    format!("{{\"All of Statistical Relations\": {{{body}}}}}")
}

pub fn independencies_text(vars: &VariableTable, rels: &ParsedRelations) -> String {
    format!(
        "{{\"Unconditional Independencies\": {}, \"Conditional Independencies\": {}}}",
        uncond_text(vars, rels),
        cond_text(vars, rels)
    )
}

pub fn matrix_text(m: &AdjMatrix) -> String {
    m.to_text()
}

pub fn candidates_text(vars: &VariableTable, c: &ColliderCandidates) -> String {
    c.to_text(vars)
}

pub fn answer_text(explanation: &[String], answer: Label) -> String {
    let mut out = explanation.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&format!("Final Answer: \"{answer}\""));
    out
}

/// What a faithful model answers at `step`.
pub fn canonical_output(step: u8, r: &Reference) -> String {
    let vars = &r.vars;
    let rels = ParsedRelations::from_set(&r.relations);
    match step {
        1 => variables_text(vars, 0..vars.len()),
        2 => relations_text(vars, &rels),
        3 => matrix_text(&r.trace.initial),
        4 => matrix_text(&r.trace.after_unconditional),
        5 => matrix_text(&r.trace.after_conditional),
        6 => candidates_text(vars, &r.trace.candidates),
        7 => candidates_text(vars, &r.trace.filtered),
        8 => matrix_text(&r.trace.oriented),
        _ => answer_text(&r.explanation, r.answer),
    }
}

/// All nine subtasks in the few-shot response layout.
pub fn canonical_response(r: &Reference) -> String {
    (1..=9)
        .map(|k| format!("\"Subtask {k}\" Output:\n{}", canonical_output(k, r)))
        .collect::<Vec<_>>()
        .join("\n")
}
