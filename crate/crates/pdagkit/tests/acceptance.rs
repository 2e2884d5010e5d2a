//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde_json::Value;

use pdagkit::dataset::{storyify, GenerateConfig, Generator, Record, Sample, Style, SCHEMA_VERSION};
use pdagkit::engine::{run_engine, EngineOptions, FilterMode, RelationSet, StatementSelection};
use pdagkit::graph::{enumerate_dags, group_mecs};
use pdagkit::harness::{
    parse_answer, parse_step_output, run_pipeline, split_subtasks, BackendError, ChatBackend,
    Confusion, Message, Metrics, Mode, PipelineOptions, Reference, Reply, StepOutput,
    FEW_SHOT_EXAMPLE,
};
use pdagkit::hypothesis::{evaluate_on_pdag, explain, EvalMode};
use pdagkit::premise::{parse_hypothesis, parse_premise, PremiseFixture, Theme};
use pdagkit::{Dag, HypothesisKind, Label, VariableTable};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

fn cli(args: &[&str]) -> Result<(i32, String, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pdagkit"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, stdout, stderr) = cli(&full)?;
    ensure!(code == 0, "pdagkit {} exited {code}: {stderr}", args.join(" "));
    serde_json::from_str(&stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

fn line_after<'a>(text: &'a str, prefix: &str) -> Result<&'a str, String> {
    text.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .map(str::trim)
        .ok_or_else(|| format!("no line starting with `{prefix}`"))
}

fn generator(n: usize) -> &'static Generator {
    static CACHE: OnceLock<BTreeMap<usize, Generator>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (3..=6)
            .map(|n| (n, Generator::new(n).expect("supported size")))
            .collect()
    });
    &all[&n]
}

/// Compares parsed step outputs against the engine's reference, steps 1-9.
fn compare_steps(outputs: &BTreeMap<u8, String>, reference: &Reference) -> Result<(), String> {
    let t = &reference.trace;
    let vars = &reference.vars;
    for step in 1u8..=9 {
        let text = outputs.get(&step).ok_or(format!("no output for step {step}"))?;
        if step == 9 {
            let answer = parse_answer(text).map_err(|e| format!("step 9: {e}"))?;
            ensure!(answer == reference.answer, "step 9 answer {answer}, engine says {}", reference.answer);
            continue;
        }
        let parsed = parse_step_output(step, text, vars).map_err(|e| format!("step {step}: {e}"))?;
        let ok = match (&parsed, step) {
            (StepOutput::Variables { count, names }, 1) => {
                *count == vars.len() && names.len() == vars.len()
            }
            (StepOutput::Relations(r), 2) => r.matches(&reference.relations),
            (StepOutput::Matrix(m), 3) => *m == t.initial,
            (StepOutput::Matrix(m), 4) => *m == t.after_unconditional,
            (StepOutput::Matrix(m), 5) => *m == t.after_conditional,
            (StepOutput::Candidates(c), 6) => *c == t.candidates,
            (StepOutput::Candidates(c), 7) => *c == t.filtered,
            (StepOutput::Matrix(m), 8) => *m == t.oriented,
            _ => false,
        };
        ensure!(ok, "step {step} differs from the engine: {parsed:?}");
    }
    Ok(())
}

fn golden_trace() -> Outcome {
    let started = Instant::now();
    let premise = line_after(FEW_SHOT_EXAMPLE, "Premise:")?;
    let hypothesis = line_after(FEW_SHOT_EXAMPLE, "Hypothesis:")?;
    let doc = parse_premise(premise).map_err(|e| e.to_string())?;
    let h = parse_hypothesis(hypothesis, &doc.variables).map_err(|e| e.to_string())?;
    ensure!(h.kind == HypothesisKind::CommonEffect, "hypothesis read as {}", h.kind);
    let outputs = split_subtasks(FEW_SHOT_EXAMPLE);
    for filter in [FilterMode::PcCorrect, FilterMode::UncondOnly] {
        let options = EngineOptions { filter, propagate: false };
        let reference = Reference::build(&doc.variables, &doc.relations, &h, options)
            .map_err(|e| e.to_string())?;
        compare_steps(&outputs, &reference).map_err(|e| format!("{filter}: {e}"))?;
    }
    let v = cli_json(&["solve", "--premise", premise, "--hypothesis", hypothesis, "--trace"])?;
    ensure!(v["label"] == "Yes", "solve answered {}", v["label"]);
    let t8 = parse_step_output(8, &outputs[&8], &doc.variables).map_err(|e| e.to_string())?;
    let StepOutput::Matrix(m8) = t8 else { return Err("step 8 is not a matrix".into()) };
    ensure!(v["trace"]["step_8"] == m8.to_json(), "solve step 8 differs from the printed matrix");
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("steps 1-9 match cell-exactly under both filters, answer Yes, {took:.1?}"))
}

struct Canned(String);

impl ChatBackend for Canned {
    fn name(&self) -> String {
        "canned".into()
    }
    fn complete(&self, _: &[Message]) -> Result<Reply, BackendError> {
        Ok(Reply { text: self.0.clone(), usage: None })
    }
}

fn junk_food() -> Outcome {
    let started = Instant::now();
    let premise = std::fs::read_to_string(fixture("junk_food_premise.txt")).map_err(|e| e.to_string())?;
    let response = std::fs::read_to_string(fixture("junk_food_response.txt")).map_err(|e| e.to_string())?;
    let hypothesis = "Eating junk food directly affects obesity";
    let doc = parse_premise(&premise).map_err(|e| e.to_string())?;
    let names: Vec<&str> = doc.variables.labels().collect();
    ensure!(names == ["A", "B", "C"], "variables {names:?}");
    let h = parse_hypothesis(hypothesis, &doc.variables).map_err(|e| e.to_string())?;
    ensure!(h.kind == HypothesisKind::DirectCause, "hypothesis read as {}", h.kind);
    let reference = Reference::build(&doc.variables, &doc.relations, &h, EngineOptions::default())
        .map_err(|e| e.to_string())?;
    compare_steps(&split_subtasks(&response), &reference)?;

    let expected_step_9 = "Checking matrix[A][C] = 1 and matrix[C][A] = 0. According to rule 2, this suggests A is a direct cause of C, or C is a direct effect of A.";
    let why = explain(&h, reference.trace.final_matrix()).map_err(|e| e.to_string())?;
    ensure!(why.first().map(String::as_str) == Some(expected_step_9), "explanation {why:?}");

    let record = Record {
        id: "junk-food".into(),
        n_vars: 3,
        premise: premise.trim().to_string(),
        hypothesis: hypothesis.into(),
        label: Label::Yes,
        kind: HypothesisKind::DirectCause,
        mec_digest: String::new(),
        style: Style::Story,
        schema_version: SCHEMA_VERSION,
    };
    let sample = Sample::from_record(record).map_err(|e| e.to_string())?;
    let rec = run_pipeline(&sample, &Canned(response), Mode::FewShot, &PipelineOptions::default());
    ensure!(rec.steps.len() == 9 && rec.steps.iter().all(|s| s.matched), "pipeline grading: {:?}", rec.steps);
    ensure!(rec.predicted == Some(Label::Yes), "pipeline read {:?}", rec.predicted);

    let v = cli_json(&["solve", "--premise", premise.trim(), "--hypothesis", hypothesis])?;
    ensure!(v["label"] == "Yes", "solve answered {}", v["label"]);
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("transcript steps 1-9 match the engine, step 9 text reproduced, answer Yes, {took:.1?}"))
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut checked = 0usize;
    for n in 1..=5usize {
        let vars = VariableTable::letters(n);
        for dag in enumerate_dags(n).map_err(|e| e.to_string())? {
            let rels = common::oracle_relations(&dag, n.saturating_sub(2));
            let lib = RelationSet::from_dag(&dag, n.saturating_sub(2), StatementSelection::Minimal)
                .map_err(|e| e.to_string())?;
            ensure!(rels == lib, "n={n} {:?}: derived relations differ from the oracle", dag.edges());
            let trace = run_engine(&vars, &rels, EngineOptions::default()).map_err(|e| e.to_string())?;
            let m = trace.final_matrix();
            ensure!(m.skeleton() == common::skeleton(&dag), "n={n} {:?}: skeleton", dag.edges());
            ensure!(m.colliders() == common::v_structures(&dag), "n={n} {:?}: v-structures", dag.edges());
            let directed: BTreeSet<(usize, usize)> = m.directed_edges().into_iter().collect();
            ensure!(directed == collider_arms(&m.colliders()), "n={n} {:?}: orientation beyond colliders", dag.edges());
            checked += 1;
        }
    }
    ensure!(checked == 1 + 3 + 25 + 543 + 29_281, "checked {checked} DAGs");
    Ok(format!("{checked} DAGs (n<=5): skeleton and v-structures recovered, {:.1?}", started.elapsed()))
}

fn collider_arms(colliders: &BTreeSet<(usize, usize, usize)>) -> BTreeSet<(usize, usize)> {
    colliders.iter().flat_map(|&(x, c, y)| [(x, c), (y, c)]).collect()
}

fn counts() -> Outcome {
    let mut dag_counts = Vec::new();
    for n in 1..=6usize {
        let dags: Vec<Dag> = enumerate_dags(n).map_err(|e| e.to_string())?.collect();
        let expected = common::dag_count_recurrence(n);
        ensure!(dags.len() as u128 == expected, "n={n}: {} DAGs, recurrence says {expected}", dags.len());
        if n <= 5 {
            let lib: BTreeSet<Vec<(usize, usize)>> = dags.iter().map(Dag::edges).collect();
            let brute: BTreeSet<Vec<(usize, usize)>> = common::brute_force_dags(n).into_iter().collect();
            ensure!(lib == brute, "n={n}: enumerated DAGs differ from brute force");
        }
        dag_counts.push(dags.len());
    }
    ensure!(dag_counts == [1, 3, 25, 543, 29_281, 3_781_503], "DAG counts {dag_counts:?}");

    let mut mec_counts = Vec::new();
    for n in 1..=5usize {
        let dags: Vec<Dag> = enumerate_dags(n).map_err(|e| e.to_string())?.collect();
        let mecs = group_mecs(&dags).map_err(|e| e.to_string())?;
        let oracle: BTreeSet<_> = dags
            .iter()
            .map(|d| (common::skeleton(d), common::v_structures(d)))
            .collect();
        ensure!(mecs.len() == oracle.len(), "n={n}: {} classes, oracle {}", mecs.len(), oracle.len());
        for mec in &mecs {
            let keys: BTreeSet<_> = mec
                .members()
                .iter()
                .map(|d| (common::skeleton(d), common::v_structures(d)))
                .collect();
            ensure!(keys.len() == 1, "n={n}: a class mixes skeletons or v-structures");
        }
        mec_counts.push(mecs.len());
    }
    ensure!(mec_counts[..4] == [1, 2, 11, 185], "MEC counts {mec_counts:?}");
    Ok(format!("DAGs {dag_counts:?}, MECs {mec_counts:?}"))
}

fn balanced_self_solve() -> Outcome {
    let started = Instant::now();
    let cfg = GenerateConfig::default();
    let mut confusion = Confusion::default();
    let mut per_cell = BTreeMap::new();
    for n in 3..=6 {
        let gen = generator(n);
        for s in gen.balanced(&cfg, 15, 2024).map_err(|e| e.to_string())? {
            *per_cell.entry((n, s.label())).or_insert(0usize) += 1;
            let (_, mec) = pdagkit::dataset::class_of_id(s.id()).ok_or("id without class")?;
            let members = gen.mecs()[mec].members();
            let (subj, obj) = s.claim.resolve(&s.variables).map_err(|e| e.to_string())?;
            let truth = members.iter().all(|d| common::holds(s.claim.kind, subj, obj, d));
            ensure!(
                (s.label() == Label::Yes) == truth,
                "{}: label {} but the oracle says {truth}",
                s.id(),
                s.label()
            );
            let trace = run_engine(&s.variables, &s.relations, EngineOptions::default()).map_err(|e| e.to_string())?;
            let verdict = evaluate_on_pdag(&s.claim, trace.final_matrix(), EvalMode::ExtensionQuantified)
                .map_err(|e| e.to_string())?;
            confusion.add(s.label(), Some(verdict.answer.binary()));
        }
    }
    ensure!(per_cell.len() == 8 && per_cell.values().all(|&c| c == 15), "cells {per_cell:?}");
    let m = Metrics::from_counts(confusion);
    ensure!(m.accuracy == 1.0 && m.f1 == 1.0, "accuracy {} F1 {}", m.accuracy, m.f1);
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(format!("120 samples (15 Yes/15 No for n=3..6): accuracy 1.0, F1 1.0, labels match oracle, {took:.1?}"))
}

fn metrics_arithmetic() -> Outcome {
    let m = Metrics::from_counts(Confusion { tp: 13, fp: 1, tn: 14, fn_: 2 });
    let want = [("precision", m.precision, 0.9286), ("recall", m.recall, 0.8667), ("accuracy", m.accuracy, 0.9000), ("f1", m.f1, 0.8966)];
    for (name, got, expected) in want {
        ensure!((got - expected).abs() <= 1e-4, "{name} {got}, expected {expected}");
    }
    let path = fixture("scored_records.jsonl");
    let v = cli_json(&["score", path.to_str().ok_or("path")?])?;
    let o = &v["overall"]["metrics"];
    ensure!(o["counts"]["tp"] == 13 && o["counts"]["fp"] == 1 && o["counts"]["tn"] == 14 && o["counts"]["fn"] == 2, "score counts {}", o["counts"]);
    for (name, _, expected) in want {
        let got = o[name].as_f64().ok_or(format!("no {name}"))?;
        ensure!((got - expected).abs() <= 1e-4, "score {name} {got}");
    }
    Ok(format!(
        "P={:.4} R={:.4} Acc={:.4} F1={:.4} from the library and the score command",
        m.precision, m.recall, m.accuracy, m.f1
    ))
}

fn mock_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data.jsonl");
    let data_s = data.to_str().ok_or("path")?;
    let (code, _, err) = cli(&["generate", "--n", "3,4,5", "--per-cell", "4", "--seed", "11", "--out", data_s])?;
    ensure!(code == 0, "generate exited {code}: {err}");
    for mode in ["step-by-step", "few-shot", "baseline-cot"] {
        let out = dir.path().join(mode);
        let out_s = out.to_str().ok_or("path")?;
        let v = cli_json(&["eval", "--dataset", data_s, "--backend", "mock", "--mode", mode, "--out", out_s])?;
        let m = &v["overall"]["metrics"];
        for key in ["precision", "recall", "f1", "accuracy"] {
            ensure!(m[key] == 1.0, "{mode}: {key} = {}", m[key]);
        }
        for (name, tally) in v["steps"].as_object().ok_or("no steps")? {
            ensure!(tally["accuracy"] == 1.0, "{mode}: {name} accuracy {}", tally["accuracy"]);
        }
        let subtasks = v["overall"]["subtasks"].as_object().ok_or("no subtasks")?;
        let expected = if mode == "baseline-cot" { 1 } else { 5 };
        ensure!(subtasks.len() == expected, "{mode}: {} subtasks scored", subtasks.len());
        ensure!(subtasks.values().all(|t| t["accuracy"] == 1.0), "{mode}: subtasks {subtasks:?}");
    }
    let first = dir.path().join("step-by-step");
    let again = dir.path().join("replayed");
    let (code, _, err) = cli(&[
        "eval", "--dataset", data_s, "--replay", first.to_str().ok_or("path")?,
        "--out", again.to_str().ok_or("path")?,
    ])?;
    ensure!(code == 0, "replay exited {code}: {err}");
    let strip = |p: &Path| -> Result<Vec<Value>, String> {
        let text = std::fs::read_to_string(p.join("records.jsonl")).map_err(|e| e.to_string())?;
        text.lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).map_err(|e| e.to_string())?;
                v["elapsed_ms"] = Value::from(0);
                Ok(v)
            })
            .collect()
    };
    ensure!(strip(&first)? == strip(&again)?, "replayed records differ");
    Ok("24 samples in 3 modes: all metrics and subtasks 1.0; replay reproduces records".into())
}

fn parser_round_trip() -> Outcome {
    let mut symbolic = 0usize;
    let mut story = 0usize;
    let themes: Vec<Theme> = Theme::BUILTIN.iter().map(|t| Theme::builtin(t).unwrap()).collect();
    for n in 3..=6usize {
        let gen = generator(n);
        for selection in [StatementSelection::Minimal, StatementSelection::FullClosure] {
            let cfg = GenerateConfig { selection, ..GenerateConfig::default() };
            let per_cell = if n == 3 { 15 } else { 90 };
            let samples = gen.balanced(&cfg, per_cell, 77 + n as u64).map_err(|e| e.to_string())?;
            for (i, s) in samples.iter().enumerate() {
                check_round_trip(s)?;
                symbolic += 1;
                let theme = &themes[i % themes.len()];
                let st = storyify(s, theme, Some(i as u64)).map_err(|e| e.to_string())?;
                check_round_trip(&st)?;
                story += 1;
            }
        }
    }
    ensure!(symbolic >= 1000 && story >= 1000, "only {symbolic} symbolic and {story} story samples");
    Ok(format!("{symbolic} symbolic and {story} story premises parse back to their relation sets"))
}

fn check_round_trip(s: &Sample) -> Result<(), String> {
    let doc = parse_premise(&s.record.premise).map_err(|e| format!("{}: {e}", s.id()))?;
    ensure!(doc.relations == s.relations, "{} ({}): relations differ", s.id(), s.record.style);
    ensure!(doc.variables.len() == s.variables.len(), "{}: variable count", s.id());
    let h = parse_hypothesis(&s.record.hypothesis, &doc.variables).map_err(|e| e.to_string())?;
    ensure!(
        h.resolve(&doc.variables).ok() == s.claim.resolve(&s.variables).ok() && h.kind == s.claim.kind,
        "{}: hypothesis reads back as {h:?}",
        s.id()
    );
    Ok(())
}

fn smbh_fixture() -> Outcome {
    let path = fixture("smbh.json");
    let fx: PremiseFixture = serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let doc = fx.to_doc().map_err(|e| e.to_string())?;
    let text = fx.hypothesis.clone().ok_or("fixture has no hypothesis")?;
    ensure!(text == "Does central density affect black hole mass?", "hypothesis `{text}`");
    let h = parse_hypothesis(&text, &doc.variables).map_err(|e| e.to_string())?;
    let (s, o) = h.resolve(&doc.variables).map_err(|e| e.to_string())?;

    // The fixture's class: every DAG whose faithful relations equal the fixture's.
    let class: Vec<Dag> = enumerate_dags(5)
        .map_err(|e| e.to_string())?
        .filter(|d| common::oracle_relations(d, 3) == doc.relations)
        .collect();
    ensure!(!class.is_empty(), "no DAG states the fixture's relations");
    let oracle = if class.iter().all(|d| common::holds(h.kind, s, o, d)) { "Yes" } else { "No" };

    let golden: Value = serde_json::from_str(
        &std::fs::read_to_string(fixture("smbh_golden.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    ensure!(golden["label"] == oracle, "golden {} vs oracle {oracle}", golden["label"]);
    let v = cli_json(&["solve", "--fixture", path.to_str().ok_or("path")?])?;
    ensure!(v == golden, "solve output differs from the golden file");
    let trace = run_engine(&doc.variables, &doc.relations, EngineOptions::default()).map_err(|e| e.to_string())?;
    let m = trace.final_matrix();
    ensure!(
        m.skeleton() == common::skeleton(&class[0]) && m.colliders() == common::v_structures(&class[0]),
        "PDAG does not match the class"
    );
    Ok(format!("{} DAG(s) in the class; verdict {oracle} matches oracle and golden", class.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden trace: five-variable worked example", golden_trace),
        ("golden trace: junk-food story", junk_food),
        ("oracle equivalence for every DAG with n <= 5", oracle_equivalence),
        ("DAG and equivalence-class counts", counts),
        ("balanced set: label soundness and self-solvability", balanced_self_solve),
        ("metrics arithmetic", metrics_arithmetic),
        ("mock backend end to end", mock_end_to_end),
        ("premise parser round trip", parser_round_trip),
        ("SMBH relation fixture", smbh_fixture),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
