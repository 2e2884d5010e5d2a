use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use super::{
    BackendKind, Cli, CliError, Command, EngineArgs, EvalArgs, FileConfig, Format, GenerateArgs,
    LabelArgs, ParseArgs, PremiseInput, ScoreArgs, SolveArgs,
};
use crate::dataset::{
    read_records, storyify, write_records, GenerateConfig, Generator, Sample, Style,
};
use crate::engine::{run_engine, EngineOptions, RelationSet};
use crate::harness::{
    read_eval_records, run_batch, score, write_eval_records, write_transcripts, ChatBackend,
    EvalRecord, GroupBy, HttpBackend, MockBackend, PipelineOptions, ReplayBackend, RunManifest,
};
use crate::hypothesis::{evaluate_on_pdag, explain, label_against_mec, EvalMode, HypothesisError};
use crate::premise::{
    parse_hypothesis, parse_premise_report, render_premise, PremiseDoc, PremiseFixture,
    RenderStyle, Theme,
};

struct Ctx {
    config: FileConfig,
    format: Format,
}

impl Ctx {
    fn emit(&self, text: &str, value: &Value) -> Result<(), CliError> {
        let mut out = io::stdout().lock();
        match self.format {
            Format::Text => out.write_all(text.as_bytes())?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, value)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    fn engine_opts(&self, args: &EngineArgs) -> EngineOptions {
        let cfg = &self.config.engine;
        EngineOptions {
            filter: args.filter.or(cfg.filter).unwrap_or_default(),
            propagate: if args.propagate {
                true
            } else if args.no_propagate {
                false
            } else {
                cfg.propagate.unwrap_or(false)
            },
        }
    }
}

pub(super) fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig {
            version: super::config::CONFIG_VERSION,
            ..FileConfig::default()
        },
    };
    let format = match (cli.format, config.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("text")) => Format::Text,
        (None, Some("json")) => Format::Json,
        (None, Some(other)) => {
            return Err(CliError::Usage(format!(
                "config format `{other}` (expected text or json)"
            )))
        }
    };
    let ctx = Ctx { config, format };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Parse(a) => parse(&ctx, a),
        Command::Solve(a) => solve(&ctx, a),
        Command::Label(a) => label(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Score(a) => score_cmd(&ctx, a),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn premise_text(premise: &Option<String>, file: &Option<PathBuf>) -> Result<String, CliError> {
    if let Some(p) = premise {
        return Ok(p.clone());
    }
    if let Some(f) = file {
        return read_text(f);
    }
    let mut buf = String::new();
    io::stdin().read_to_string(&mut buf)?;
    Ok(buf)
}

/// A parsed premise plus the hypothesis text to use with it.
fn load_premise(input: &PremiseInput) -> Result<(PremiseDoc, Option<String>), CliError> {
    if let Some(path) = &input.fixture {
        let fixture: PremiseFixture = serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let doc = fixture.to_doc()?;
        return Ok((doc, input.hypothesis.clone().or(fixture.hypothesis)));
    }
    let text = premise_text(&input.premise, &input.premise_file)?;
    let report = parse_premise_report(&text)?;
    match report.doc {
        Some(doc) => Ok((doc, input.hypothesis.clone())),
        None => Err(crate::premise::PremiseError::Invalid(report.diagnostics).into()),
    }
}

fn generate(ctx: &Ctx, a: GenerateArgs) -> Result<(), CliError> {
    let g = &ctx.config.generate;
    let ns = a.n.or_else(|| g.n.clone()).ok_or_else(|| CliError::Usage("--n is required".into()))?;
    let style = a.style.or(g.style).unwrap_or(Style::Symbolic);
    let seed = a.seed.or(ctx.config.seed);
    let per_cell = a.per_cell.or(g.per_cell);
    let gzip = a.gzip || g.gzip.unwrap_or(false);
    if gzip && a.out.is_none() {
        return Err(CliError::Usage("--gzip needs --out".into()));
    }
    if seed.is_none() && (per_cell.is_some() || style == Style::Story) {
        return Err(CliError::Usage(
            "--seed is required for story style or --per-cell sampling".into(),
        ));
    }
    let theme = if style == Style::Story {
        Some(match (&a.theme_file, a.theme.as_ref().or(g.theme.as_ref())) {
            (Some(path), _) => {
                let names = read_text(path)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(String::from)
                    .collect();
                let name = path.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
                Theme::custom(name, names)?
            }
            (None, Some(name)) => Theme::builtin(name)?,
            (None, None) => Theme::builtin("health")?,
        })
    } else {
        None
    };
    let cfg = GenerateConfig {
        kinds: a.kinds.or_else(|| g.kinds.clone()).unwrap_or_else(|| GenerateConfig::default().kinds),
        max_cond: a.max_cond.or(g.max_cond),
        selection: a.selection.or(g.selection).unwrap_or_default(),
    };

    let mut all = Vec::new();
    let mut summary = String::new();
    let mut cells = Vec::new();
    for &n in &ns {
        let started = Instant::now();
        let gen = Generator::new(n)?;
        let mut samples = match per_cell {
            Some(k) => gen.balanced(&cfg, k, seed.expect("checked above"))?,
            None => gen.generate_all(&cfg)?,
        };
        if let Some(theme) = &theme {
            samples = samples
                .iter()
                .map(|s| storyify(s, theme, seed))
                .collect::<Result<_, _>>()?;
        }
        let yes = samples.iter().filter(|s| s.label() == crate::Label::Yes).count();
        let _ = writeln!(
            summary,
            "n={n}: {} DAGs, {} MECs, {} samples ({yes} Yes, {} No)",
            gen.dag_count(),
            gen.mecs().len(),
            samples.len(),
            samples.len() - yes
        );
        log::info!("n={n} generated in {:?}", started.elapsed());
        cells.push(json!({
            "n": n,
            "dags": gen.dag_count(),
            "mecs": gen.mecs().len(),
            "samples": samples.len(),
            "yes": yes,
            "no": samples.len() - yes,
        }));
        all.extend(samples);
    }

    match &a.out {
        Some(path) => {
            write_records(path, all.iter().map(|s| &s.record), gzip)?;
            ctx.emit(&summary, &json!({ "out": path, "cells": cells }))
        }
        None => {
            let mut out = io::stdout().lock();
            for s in &all {
                serde_json::to_writer(&mut out, &s.record)?;
                out.write_all(b"\n")?;
            }
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn parse(ctx: &Ctx, a: ParseArgs) -> Result<(), CliError> {
    let (doc, hyp_text) = if a.input.fixture.is_some() {
        load_premise(&a.input)?
    } else {
        let text = premise_text(&a.input.premise, &a.input.premise_file)?;
        let report = parse_premise_report(&text)?;
        match report.doc {
            Some(doc) => (doc, a.input.hypothesis.clone()),
            None => {
                let mut text = String::new();
                for d in &report.diagnostics {
                    let _ = writeln!(text, "{d}");
                }
                let value = json!({
                    "sentences": report.sentences,
                    "parsed": report.parsed,
                    "diagnostics": report.diagnostics,
                });
                ctx.emit(&text, &value)?;
                return Err(CliError::Parse(format!(
                    "{} of {} sentences did not parse",
                    report.diagnostics.len(),
                    report.sentences
                )));
            }
        }
    };
    let hypothesis = hyp_text
        .as_deref()
        .map(|h| parse_hypothesis(h, &doc.variables))
        .transpose()?;
    let (canonical, _) = render_premise(&doc, &RenderStyle::Symbolic)?;
    let mut text = String::new();
    let names: Vec<String> = (0..doc.variables.len())
        .map(|i| match doc.variables.alias(i) {
            Some(alias) => format!("{} ({alias})", doc.variables.label(i)),
            None => doc.variables.label(i).to_string(),
        })
        .collect();
    let _ = writeln!(text, "variables: {}", names.join(", "));
    let _ = writeln!(text, "statements: {}", doc.relations.statement_count());
    let _ = writeln!(text, "canonical: {canonical}");
    if let Some(h) = &hypothesis {
        let _ = writeln!(text, "hypothesis: {} {} {}", h.kind, h.subject, h.object);
    }
    let value = json!({
        "variables": doc.variables,
        "relations": doc.relations,
        "provenance": doc.provenance,
        "canonical": canonical,
        "hypothesis": hypothesis,
    });
    ctx.emit(&text, &value)
}

fn solve(ctx: &Ctx, a: SolveArgs) -> Result<(), CliError> {
    let (doc, hyp_text) = load_premise(&a.input)?;
    let options = ctx.engine_opts(&a.engine);
    let trace = run_engine(&doc.variables, &doc.relations, options)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let matrix = trace.final_matrix();
    let mut text = String::new();
    if a.trace {
        let steps = [
            ("step 3: initial matrix", &trace.initial),
            ("step 4: after unconditional independencies", &trace.after_unconditional),
            ("step 5: after conditional independencies", &trace.after_conditional),
        ];
        for (title, m) in steps {
            let _ = writeln!(text, "{title}\n{m}");
        }
        let _ = writeln!(text, "step 6: collider candidates\n{}\n", trace.candidates.to_text(trace.vars()));
        let _ = writeln!(text, "step 7: colliders kept\n{}\n", trace.filtered.to_text(trace.vars()));
        let _ = writeln!(text, "step 8: oriented\n{}", trace.oriented);
        if let Some(p) = &trace.propagated {
            let _ = writeln!(text, "propagated\n{p}");
        }
    } else {
        let _ = writeln!(text, "{matrix}");
    }
    let mut value = json!({ "matrix": matrix.to_json(), "options": options });
    if a.trace {
        value["trace"] = trace.to_json();
    }
    if let Some(h) = hyp_text {
        let h = parse_hypothesis(&h, &doc.variables)?;
        let mode = a.eval_mode.unwrap_or_default();
        let verdict = match evaluate_on_pdag(&h, matrix, mode) {
            Err(HypothesisError::Inconsistent) if mode == EvalMode::ExtensionQuantified => {
                log::warn!("no consistent extension; falling back to rule-based reading");
                evaluate_on_pdag(&h, matrix, EvalMode::RuleBased)
            }
            other => other,
        }
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        let why = explain(&h, matrix).map_err(|e| CliError::Runtime(e.to_string()))?;
        for line in &why {
            let _ = writeln!(text, "{line}");
        }
        let _ = writeln!(text, "answer: {} ({})", verdict.answer.binary(), verdict.answer);
        value["hypothesis"] = json!(h);
        value["verdict"] = json!(verdict);
        value["label"] = json!(verdict.answer.binary());
        value["explanation"] = json!(why);
    }
    ctx.emit(&text, &value)
}

fn label(ctx: &Ctx, a: LabelArgs) -> Result<(), CliError> {
    let g = &ctx.config.generate;
    let max_cond = a.max_cond.or(g.max_cond);
    let selection = a.selection.or(g.selection).unwrap_or_default();
    if let Some(path) = &a.dataset {
        let records = read_records(path)?;
        let mut gens: BTreeMap<usize, Generator> = BTreeMap::new();
        let mut mismatches = Vec::new();
        for (i, rec) in records.into_iter().enumerate() {
            let at = |e: CliError| CliError::Parse(format!("record {}: {e}", i + 1));
            let sample = Sample::from_record(rec).map_err(|e| at(e.into()))?;
            let n = sample.n_vars();
            if !gens.contains_key(&n) {
                gens.insert(n, Generator::new(n)?);
            }
            let got = gens[&n].relabel(&sample).map_err(|e| at(e.into()))?;
            if got != sample.label() {
                mismatches.push(json!({
                    "id": sample.id(),
                    "stored": sample.label(),
                    "derived": got,
                }));
            }
        }
        let mut text = String::new();
        for m in &mismatches {
            let _ = writeln!(text, "mismatch {}: stored {} derived {}", m["id"], m["stored"], m["derived"]);
        }
        let _ = writeln!(text, "{} mismatches", mismatches.len());
        ctx.emit(&text, &json!({ "mismatches": mismatches }))?;
        if !mismatches.is_empty() {
            return Err(CliError::Runtime(format!("{} labels differ", mismatches.len())));
        }
        return Ok(());
    }

    let text = premise_text(&a.premise, &a.premise_file)?;
    let report = parse_premise_report(&text)?;
    let doc = report
        .doc
        .ok_or_else(|| CliError::from(crate::premise::PremiseError::Invalid(report.diagnostics)))?;
    let h = parse_hypothesis(a.hypothesis.as_deref().expect("required by clap"), &doc.variables)?;
    let n = doc.variables.len();
    let gen = Generator::new(n)?;
    let max_cond = max_cond.unwrap_or(n.saturating_sub(2));
    let mut found = None;
    for (i, mec) in gen.mecs().iter().enumerate() {
        let rels = RelationSet::from_dag(mec.representative(), max_cond, selection)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        if rels == doc.relations {
            found = Some(i);
            break;
        }
    }
    let Some(idx) = found else {
        return Err(CliError::Runtime(format!(
            "no equivalence class on {n} variables states exactly these relations"
        )));
    };
    let mec = &gen.mecs()[idx];
    let answer = label_against_mec(&h, mec, &doc.variables)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let out = format!("class {idx} ({} DAGs): {answer}\n", mec.members().len());
    ctx.emit(
        &out,
        &json!({
            "class": idx,
            "class_size": mec.members().len(),
            "mec_digest": mec.digest(),
            "label": answer,
        }),
    )
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<(), CliError> {
    let records = read_records(&a.dataset)?;
    let samples: Vec<Sample> = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            Sample::from_record(r).map_err(|e| CliError::Parse(format!("record {}: {e}", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let engine_opts = ctx.engine_opts(&a.engine);
    let mode = a.mode.or(ctx.config.eval.mode).unwrap_or_default();
    let parallelism = a
        .parallelism
        .or(ctx.config.eval.parallelism)
        .unwrap_or(4)
        .max(1);
    let backend: Box<dyn ChatBackend> = if let Some(dir) = &a.replay {
        let nested = dir.join("transcripts");
        let dir = if nested.is_dir() { nested } else { dir.clone() };
        let r = ReplayBackend::from_dir(&dir)?;
        if r.is_empty() {
            return Err(CliError::Usage(format!("no transcripts in {}", dir.display())));
        }
        Box::new(r)
    } else {
        match a.backend.or(ctx.config.eval.backend).unwrap_or(BackendKind::Mock) {
            BackendKind::Mock => Box::new(MockBackend::new(engine_opts)),
            BackendKind::Http => {
                let cfg = ctx.config.backend.clone().unwrap_or_default();
                Box::new(HttpBackend::new(cfg)?)
            }
        }
    };
    let mut effective = ctx.config.clone();
    effective.engine.filter = Some(engine_opts.filter);
    effective.engine.propagate = Some(engine_opts.propagate);
    effective.eval.mode = Some(mode);
    effective.eval.parallelism = Some(parallelism);
    let manifest = RunManifest::new(mode, backend.as_ref(), &samples, &effective, engine_opts)?;

    log::info!("evaluating {} samples with {} in {mode} mode", samples.len(), backend.name());
    let opts = PipelineOptions { engine: engine_opts };
    let results = run_batch(&samples, backend.as_ref(), mode, &opts, parallelism);

    fs::create_dir_all(&a.out)?;
    write_eval_records(&a.out.join("records.jsonl"), &results)?;
    write_transcripts(&a.out.join("transcripts"), &results)?;
    fs::write(
        a.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    let report = score(&results, &[GroupBy::NVars])?;
    fs::write(a.out.join("report.txt"), report.to_text())?;
    fs::write(
        a.out.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    ctx.emit(&report.to_text(), &serde_json::to_value(&report)?)?;

    let failed: Vec<&EvalRecord> = results.iter().filter(|r| r.error.is_some()).collect();
    if let Some(first) = failed.first() {
        return Err(CliError::Runtime(format!(
            "{} of {} samples failed; first {}: {}",
            failed.len(),
            results.len(),
            first.sample_id,
            first.error.as_deref().unwrap_or_default()
        )));
    }
    Ok(())
}

fn collect_records(path: &Path) -> Result<Vec<EvalRecord>, CliError> {
    if !path.is_dir() {
        return Ok(read_eval_records(path)?);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(read_eval_records(&f)?);
    }
    Ok(out)
}

fn score_cmd(ctx: &Ctx, a: ScoreArgs) -> Result<(), CliError> {
    let group_by: Vec<GroupBy> = a
        .group_by
        .iter()
        .map(|g| g.parse())
        .collect::<Result<_, _>>()?;
    let records = collect_records(&a.records)?;
    let report = score(&records, &group_by)?;
    ctx.emit(&report.to_text(), &serde_json::to_value(&report)?)
}
