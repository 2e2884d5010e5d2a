//! Closed template grammar for premise and hypothesis sentences.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

use super::lexer::{normalize, parse_count, sentences, split_list, split_word, strip_connective};
use super::{Diagnostic, DiagnosticKind, PremiseDoc, PremiseError, Provenance};
use crate::engine::{Pair, RelationSet};
use crate::hypothesis::{Hypothesis, HypothesisKind};
use crate::vars::{Variable, VariableTable};

fn re(p: &str) -> Regex {
    Regex::new(&format!("(?i)^{p}$")).expect("grammar pattern compiles")
}

static SUPPOSE: LazyLock<Regex> = LazyLock::new(|| {
    re(r"suppose (?:that )?there is a closed system of (?P<n>\w+) variables?[,:]? (?P<list>.+)")
});
static ALL_RELATIONS: LazyLock<Regex> = LazyLock::new(|| {
    re(r"all (?:the )?statistical relations among these (?P<n>\w+) variables? are as follows:\s*(?P<rest>.*)")
});
static ALIAS_HEADER: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?P<list>.+?) (?:have|has) relations? with each other"));
static CONSIDER: LazyLock<Regex> = LazyLock::new(|| {
    re(r"let'?s consider (?P<n>\w+) (?:factors|variables): (?P<list>.+)")
});
static ALIAS_ITEM: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?P<name>.+?)\s*\((?P<label>[^()]+)\)"));

static CORRELATES: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?P<a>.+?) (?:correlates|is correlated) with (?P<b>.+)")
});
static CORRELATION_BETWEEN: LazyLock<Regex> =
    LazyLock::new(|| re(r"there (?:is|exists) a correlation between (?P<rest>.+)"));
static INDEP_GIVEN_ARE: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?P<a>.+?) and (?P<b>.+?) are (?:conditionally )?independent (?:(?:of|from) each other )?given (?P<g>.+)")
});
static INDEP_GIVEN_IS: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?P<a>.+?) is (?:conditionally )?independent (?:of|from) (?P<b>.+?) given (?P<g>.+)")
});
static INDEP_IS: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?P<a>.+?) is independent (?:of|from) (?P<b>.+)"));
static INDEP_ARE: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?P<a>.+?) and (?P<b>.+?) are independent(?: (?:of|from) each other)?")
});
static CAUSE_OF: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?P<a>.+?) is (?:the|a) cause of (?P<b>.+)"));

static H_COLLIDER: LazyLock<Regex> = LazyLock::new(|| {
    re(r"there (?:exists|is) at least one (?:collider|common effect)(?: \(i\.e\.,? common effect\))? of (?P<a>.+?) and (?P<b>.+)")
});
static H_CONFOUNDER: LazyLock<Regex> = LazyLock::new(|| {
    re(r"there (?:exists|is) at least one (?:confounder|common cause)(?: \(i\.e\.,? common cause\))? of (?P<a>.+?) and (?P<b>.+)")
});
static H_DIRECT: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?:does )?(?P<a>.+?) directly (?:affects?|causes?) (?P<b>.+)")
});
static H_INDIRECT: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?:does )?(?P<a>.+?) indirectly (?:affects?|causes?) (?P<b>.+)")
});
static H_INDIRECT_TAIL: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?:does )?(?P<a>.+?) (?:affects?|causes?) (?P<b>.+?) indirectly")
});
static H_CAUSE: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?:does )?(?P<a>.+?) (?:affects?|causes?) (?P<b>.+)"));

#[derive(Debug, Clone)]
enum Decl {
    /// Declared label list, optional stated count.
    Labels(Option<usize>, Vec<String>),
    /// `name (L)` pairs.
    Aliased(Vec<(String, String)>),
    /// Names without labels; letters are assigned in order.
    Named(Option<usize>, Vec<String>),
    Count(usize),
}

#[derive(Debug, Clone)]
enum Stmt {
    Dep(String, String),
    Indep(String, String, Vec<String>),
    Cause(String, String),
}

#[derive(Debug, Default)]
struct Clause {
    decls: Vec<Decl>,
    stmts: Vec<Stmt>,
}

fn count(word: &str) -> Result<usize, String> {
    parse_count(word).ok_or_else(|| format!("`{word}` is not a variable count"))
}

fn classify(sentence: &str) -> Result<Clause, String> {
    let norm = normalize(sentence);
    let body = strip_connective(&norm);
    let mut clause = Clause::default();

    if let Some(c) = SUPPOSE.captures(body) {
        let n = count(&c["n"])?;
        clause.decls.push(Decl::Labels(Some(n), split_list(&c["list"])));
        return Ok(clause);
    }
    if let Some(c) = ALL_RELATIONS.captures(body) {
        clause.decls.push(Decl::Count(count(&c["n"])?));
        let rest = strip_connective(c["rest"].trim());
        if !rest.is_empty() {
            clause.stmts = statement(rest)?;
        }
        return Ok(clause);
    }
    if let Some(c) = CONSIDER.captures(body) {
        let n = count(&c["n"])?;
        clause.decls.push(Decl::Named(Some(n), split_list(&c["list"])));
        return Ok(clause);
    }
    if let Some(c) = ALIAS_HEADER.captures(body) {
        let mut pairs = Vec::new();
        for item in split_list(&c["list"]) {
            let ic = ALIAS_ITEM
                .captures(&item)
                .ok_or_else(|| format!("expected `name (label)`, found `{item}`"))?;
            pairs.push((ic["name"].trim().to_string(), ic["label"].trim().to_string()));
        }
        clause.decls.push(Decl::Aliased(pairs));
        return Ok(clause);
    }
    clause.stmts = statement(body)?;
    Ok(clause)
}

fn statement(body: &str) -> Result<Vec<Stmt>, String> {
    let own = |s: &str| s.trim().to_string();
    if let Some(c) = CORRELATION_BETWEEN.captures(body) {
        let rest = c["rest"].to_string();
        let mut out = Vec::new();
        for chunk in split_between(&rest) {
            let parts = split_word(chunk, "and");
            if parts.len() != 2 {
                return Err(format!("expected `X and Y` in correlation list, found `{chunk}`"));
            }
            out.push(Stmt::Dep(own(parts[0]), own(parts[1])));
        }
        return Ok(out);
    }
    if let Some(c) = INDEP_GIVEN_ARE
        .captures(body)
        .or_else(|| INDEP_GIVEN_IS.captures(body))
    {
        let given = split_list(&c["g"]);
        return Ok(vec![Stmt::Indep(own(&c["a"]), own(&c["b"]), given)]);
    }
    if let Some(c) = INDEP_IS.captures(body).or_else(|| INDEP_ARE.captures(body)) {
        return Ok(vec![Stmt::Indep(own(&c["a"]), own(&c["b"]), Vec::new())]);
    }
    if let Some(c) = CORRELATES.captures(body) {
        return Ok(vec![Stmt::Dep(own(&c["a"]), own(&c["b"]))]);
    }
    if let Some(c) = CAUSE_OF.captures(body) {
        return Ok(vec![Stmt::Cause(own(&c["a"]), own(&c["b"]))]);
    }
    Err("unrecognized sentence".to_string())
}

/// `X and Y, and between W and Z` -> [`X and Y`, `W and Z`].
fn split_between(s: &str) -> Vec<&str> {
    let lower = s.to_ascii_lowercase();
    let mut out = Vec::new();
    let mut last = 0;
    let mut from = 0;
    while let Some(pos) = lower[from..].find("between ") {
        let at = from + pos;
        let head = s[last..at].trim_end();
        let head = head
            .strip_suffix("and")
            .map(str::trim_end)
            .unwrap_or(head)
            .trim_end_matches(',')
            .trim();
        out.push(head);
        last = at + "between ".len();
        from = last;
    }
    out.push(s[last..].trim());
    out
}

#[derive(Debug, Clone)]
struct VarSlot {
    label: String,
    alias: Option<String>,
}

/// Per-sentence outcome of a lenient parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReport {
    pub sentences: usize,
    pub parsed: usize,
    pub diagnostics: Vec<Diagnostic>,
    /// Present when every sentence parsed.
    pub doc: Option<PremiseDoc>,
}

/// Parses a premise, failing on the first batch of diagnostics.
pub fn parse_premise(text: &str) -> Result<PremiseDoc, PremiseError> {
    let report = parse_premise_report(text)?;
    match report.doc {
        Some(doc) => Ok(doc),
        None => Err(PremiseError::Invalid(report.diagnostics)),
    }
}

/// Parses every sentence it can and reports the rest. Each sentence is either
/// counted as parsed or carries exactly one diagnostic.
pub fn parse_premise_report(text: &str) -> Result<ParseReport, PremiseError> {
    if text.trim().is_empty() {
        return Err(PremiseError::Empty);
    }
    let sents = sentences(text);
    let mut outcomes: Vec<Result<Clause, Diagnostic>> = sents
        .iter()
        .map(|s| {
            classify(s.text).map_err(|m| Diagnostic::new(DiagnosticKind::Syntax, s.span, m, s.text))
        })
        .collect();

    // variable table
    let mut slots: Vec<VarSlot> = Vec::new();
    let mut story = false;
    let mut declared = false;
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let Ok(clause) = o else { continue };
        for d in &clause.decls {
            declared = true;
            match d {
                Decl::Labels(n, labels) => {
                    for l in labels {
                        upsert(&mut slots, l, None);
                    }
                    if let Some(n) = n {
                        counts.push((i, *n));
                    }
                }
                Decl::Aliased(pairs) => {
                    story = true;
                    for (name, label) in pairs {
                        upsert(&mut slots, label, Some(name));
                    }
                }
                Decl::Named(n, names) => {
                    story = true;
                    for name in names {
                        if !slots.iter().any(|s| s.alias.as_deref() == Some(name.as_str())) {
                            let label = next_letter(&slots);
                            slots.push(VarSlot {
                                label,
                                alias: Some(name.clone()),
                            });
                        }
                    }
                    if let Some(n) = n {
                        counts.push((i, *n));
                    }
                }
                Decl::Count(n) => counts.push((i, *n)),
            }
        }
    }
    if !declared {
        // headerless symbolic premise: single capital letters declare themselves
        for clause in outcomes.iter().flatten() {
            for s in &clause.stmts {
                for m in mentions(s) {
                    if is_letter_label(m) {
                        upsert(&mut slots, m, None);
                    }
                }
            }
        }
    }
    slots.sort_by(|a, b| a.label.cmp(&b.label));
    let vars = VariableTable::with_aliases(slots.iter().map(|s| Variable {
        label: s.label.clone(),
        alias: s.alias.clone(),
    }))?;

    for (i, n) in counts {
        if n != vars.len() && outcomes[i].is_ok() {
            let s = sents[i];
            outcomes[i] = Err(Diagnostic::new(
                DiagnosticKind::Consistency,
                s.span,
                format!("sentence states {n} variables but {} are declared", vars.len()),
                s.text,
            ));
        }
    }

    // relations
    let mut rels = RelationSet::default();
    let mut dep_at: BTreeMap<Pair, usize> = BTreeMap::new();
    let mut ind_at: BTreeMap<Pair, usize> = BTreeMap::new();
    for i in 0..outcomes.len() {
        let Ok(clause) = &outcomes[i] else { continue };
        let s = sents[i];
        let applied = apply(&vars, &clause.stmts, &mut rels, i, &mut dep_at, &mut ind_at);
        if let Err(msg) = applied {
            let kind = if msg.starts_with("unknown variable") {
                DiagnosticKind::Reference
            } else {
                DiagnosticKind::Consistency
            };
            outcomes[i] = Err(Diagnostic::new(kind, s.span, msg, s.text));
        }
    }
    // a pair stated both dependent and marginally independent
    for (pair, &j) in &ind_at {
        if let Some(&i) = dep_at.get(pair) {
            let at = i.max(j);
            if outcomes[at].is_ok() {
                let s = sents[at];
                outcomes[at] = Err(Diagnostic::new(
                    DiagnosticKind::Consistency,
                    s.span,
                    format!(
                        "{} and {} are stated both dependent and independent",
                        vars.label(pair.first()),
                        vars.label(pair.second())
                    ),
                    s.text,
                ));
            }
        }
    }
    if let Err(e) = rels.validate(vars.len()) {
        if let Some(s) = sents.last() {
            let last = outcomes.len() - 1;
            if outcomes[last].is_ok() {
                outcomes[last] = Err(Diagnostic::new(
                    DiagnosticKind::Consistency,
                    s.span,
                    e.to_string(),
                    s.text,
                ));
            }
        }
    }

    let diagnostics: Vec<Diagnostic> = outcomes.iter().filter_map(|o| o.as_ref().err().cloned()).collect();
    let parsed = outcomes.len() - diagnostics.len();
    let doc = diagnostics.is_empty().then(|| PremiseDoc {
        raw_text: text.to_string(),
        variables: vars,
        relations: rels,
        provenance: if story {
            Provenance::NaturalStory
        } else {
            Provenance::Symbolic
        },
    });
    Ok(ParseReport {
        sentences: sents.len(),
        parsed,
        diagnostics,
        doc,
    })
}

fn mentions(s: &Stmt) -> Vec<&str> {
    match s {
        Stmt::Dep(a, b) | Stmt::Cause(a, b) => vec![a, b],
        Stmt::Indep(a, b, g) => {
            let mut v: Vec<&str> = vec![a, b];
            v.extend(g.iter().map(String::as_str));
            v
        }
    }
}

fn is_letter_label(m: &str) -> bool {
    m.len() == 1 && m.bytes().all(|b| b.is_ascii_uppercase())
}

fn upsert(slots: &mut Vec<VarSlot>, label: &str, alias: Option<&String>) {
    match slots.iter_mut().find(|s| s.label == label) {
        Some(s) => {
            if s.alias.is_none() {
                s.alias = alias.cloned();
            }
        }
        None => slots.push(VarSlot {
            label: label.to_string(),
            alias: alias.cloned(),
        }),
    }
}

fn next_letter(slots: &[VarSlot]) -> String {
    (b'A'..=b'Z')
        .map(|b| (b as char).to_string())
        .find(|l| !slots.iter().any(|s| &s.label == l))
        .unwrap_or_else(|| format!("V{}", slots.len()))
}

fn apply(
    vars: &VariableTable,
    stmts: &[Stmt],
    rels: &mut RelationSet,
    at: usize,
    dep_at: &mut BTreeMap<Pair, usize>,
    ind_at: &mut BTreeMap<Pair, usize>,
) -> Result<(), String> {
    let look = |m: &str| vars.resolve(m).ok_or_else(|| format!("unknown variable `{m}`"));
    for s in stmts {
        match s {
            Stmt::Dep(a, b) => {
                let (a, b) = (look(a)?, look(b)?);
                let p = Pair::new(a, b).map_err(|e| e.to_string())?;
                rels.dependencies.insert(p);
                dep_at.entry(p).or_insert(at);
            }
            Stmt::Indep(a, b, g) => {
                let (a, b) = (look(a)?, look(b)?);
                let given = g.iter().map(|m| look(m)).collect::<Result<Vec<_>, _>>()?;
                rels.add_independence(a, b, given.iter().copied())
                    .map_err(|e| e.to_string())?;
                if given.is_empty() {
                    ind_at.entry(Pair::new(a, b).map_err(|e| e.to_string())?).or_insert(at);
                }
            }
            Stmt::Cause(a, b) => {
                let (a, b) = (look(a)?, look(b)?);
                rels.add_cause(a, b).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(())
}

/// Parses a hypothesis sentence against a variable table.
pub fn parse_hypothesis(text: &str, vars: &VariableTable) -> Result<Hypothesis, PremiseError> {
    let norm = normalize(text);
    let table: [(&LazyLock<Regex>, HypothesisKind); 6] = [
        (&H_COLLIDER, HypothesisKind::CommonEffect),
        (&H_CONFOUNDER, HypothesisKind::CommonCause),
        (&H_DIRECT, HypothesisKind::DirectCause),
        (&H_INDIRECT, HypothesisKind::IndirectCause),
        (&H_INDIRECT_TAIL, HypothesisKind::IndirectCause),
        (&H_CAUSE, HypothesisKind::Cause),
    ];
    for (pattern, kind) in table {
        if let Some(c) = pattern.captures(&norm) {
            let look = |m: &str| {
                vars.resolve(m)
                    .map(|i| vars.label(i).to_string())
                    .ok_or_else(|| PremiseError::Reference(m.trim().to_string()))
            };
            let (a, b) = (look(&c["a"])?, look(&c["b"])?);
            return Hypothesis::new(kind, a, b).map_err(PremiseError::from);
        }
    }
    Err(PremiseError::HypothesisSyntax(text.trim().to_string()))
}

/// Reads bare relation sentences (no header) against a known table.
pub(crate) fn parse_statements(text: &str, vars: &VariableTable) -> Result<RelationSet, String> {
    let mut rels = RelationSet::default();
    let look = |m: &str| vars.resolve(m).ok_or_else(|| format!("unknown variable `{}`", m.trim()));
    let found = sentences(text);
    if found.is_empty() {
        return Err("no sentences".to_string());
    }
    for s in found {
        let norm = normalize(s.text);
        for stmt in statement(strip_connective(&norm))? {
            let r = match stmt {
                Stmt::Dep(a, b) => rels.add_dependency(look(&a)?, look(&b)?),
                Stmt::Indep(a, b, g) => {
                    let given = g.iter().map(|m| look(m)).collect::<Result<Vec<_>, _>>()?;
                    rels.add_independence(look(&a)?, look(&b)?, given)
                }
                Stmt::Cause(a, b) => rels.add_cause(look(&a)?, look(&b)?),
            };
            r.map_err(|e| e.to_string())?;
        }
    }
    Ok(rels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn pairs(list: &[(usize, usize)]) -> BTreeSet<Pair> {
        list.iter().map(|&(a, b)| Pair::new(a, b).unwrap()).collect()
    }

    #[test]
    fn three_variable_symbolic() {
        let doc = parse_premise(
            "Suppose that there is a closed system of 3 variables, A, B and C. All statistical relations among these 3 variables are as follows: A correlates with C. B correlates with C. However, A is independent of B.",
        )
        .unwrap();
        assert_eq!(doc.variables.labels().collect::<Vec<_>>(), ["A", "B", "C"]);
        assert_eq!(doc.relations.dependencies, pairs(&[(0, 2), (1, 2)]));
        assert_eq!(doc.relations.uncond_indep, pairs(&[(0, 1)]));
        assert_eq!(doc.provenance, Provenance::Symbolic);
    }

    #[test]
    fn aliased_story() {
        let doc = parse_premise(
            "eating junk food (A), obesity (C), and watching television (B) have relations with each other. There is a correlation between eating junk food and obesity, and between watching television and obesity. However, eating junk food and watching television are independent from each other.",
        )
        .unwrap();
        assert_eq!(doc.variables.labels().collect::<Vec<_>>(), ["A", "B", "C"]);
        assert_eq!(doc.variables.alias(1), Some("watching television"));
        assert_eq!(doc.relations.dependencies, pairs(&[(0, 2), (1, 2)]));
        assert_eq!(doc.relations.uncond_indep, pairs(&[(0, 1)]));
        assert_eq!(doc.provenance, Provenance::NaturalStory);
    }

    #[test]
    fn consider_header_assigns_letters() {
        let doc = parse_premise(
            "Let\u{2019}s consider three factors: eating junk food, obesity, and watching television. There is a correlation between eating junk food and obesity, and between watching television and obesity. However, eating junk food and watching television are independent from each other.",
        )
        .unwrap();
        assert_eq!(doc.variables.alias(0), Some("eating junk food"));
        assert_eq!(doc.variables.alias(1), Some("obesity"));
        assert_eq!(doc.relations.dependencies, pairs(&[(0, 1), (1, 2)]));
        assert_eq!(doc.relations.uncond_indep, pairs(&[(0, 2)]));
    }

    #[test]
    fn conditional_lists() {
        let doc = parse_premise("C and E are independent given A, B, and D. A and B are independent given C.").unwrap();
        assert_eq!(doc.variables.len(), 5);
        let given: Vec<Vec<usize>> = doc
            .relations
            .cond_indep
            .iter()
            .map(|c| c.given.iter().copied().collect())
            .collect();
        assert!(given.contains(&vec![0, 1, 3]));
        assert!(given.contains(&vec![2]));
    }

    #[test]
    fn unknown_sentence_reports_span() {
        let text = "A correlates with B. The moon is made of cheese. A is the cause of B.";
        let report = parse_premise_report(text).unwrap();
        assert_eq!(report.sentences, 3);
        assert_eq!(report.parsed, 2);
        assert_eq!(report.diagnostics.len(), 1);
        let d = &report.diagnostics[0];
        assert_eq!(d.span.slice(text), "The moon is made of cheese.");
        assert_eq!(d.kind, DiagnosticKind::Syntax);
        assert!(parse_premise(text).is_err());
    }

    #[test]
    fn contradiction_is_consistency_error() {
        let report = parse_premise_report("A correlates with B. A is independent of B.").unwrap();
        assert_eq!(report.diagnostics.len(), 1);
        assert_eq!(report.diagnostics[0].kind, DiagnosticKind::Consistency);
        assert_eq!(report.parsed + report.diagnostics.len(), report.sentences);
    }

    #[test]
    fn unknown_mention_is_reference_error() {
        let report = parse_premise_report(
            "Suppose there is a closed system of 2 variables, A and B. All statistical relations among these 2 variables are as follows: A correlates with Q.",
        )
        .unwrap();
        assert_eq!(report.diagnostics[0].kind, DiagnosticKind::Reference);
    }

    #[test]
    fn count_mismatch_flagged() {
        let report =
            parse_premise_report("Suppose there is a closed system of 4 variables, A, B and C.").unwrap();
        assert_eq!(report.diagnostics.len(), 1);
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(parse_premise("   "), Err(PremiseError::Empty)));
    }

    #[test]
    fn hypotheses() {
        let vars = VariableTable::letters(5);
        let h = parse_hypothesis("A directly affects C.", &vars).unwrap();
        assert_eq!(h, Hypothesis::new(HypothesisKind::DirectCause, "A", "C").unwrap());
        let h = parse_hypothesis(
            "There exists at least one collider (i.e., common effect) of A and B.",
            &vars,
        )
        .unwrap();
        assert_eq!(h.kind, HypothesisKind::CommonEffect);
        let h = parse_hypothesis("There exists at least one confounder (i.e., common cause) of D and E.", &vars)
            .unwrap();
        assert_eq!(h.kind, HypothesisKind::CommonCause);
        assert_eq!(
            parse_hypothesis("A causes E indirectly.", &vars).unwrap().kind,
            HypothesisKind::IndirectCause
        );
        assert_eq!(
            parse_hypothesis("B indirectly affects D.", &vars).unwrap().kind,
            HypothesisKind::IndirectCause
        );
        assert_eq!(parse_hypothesis("Does A affect B?", &vars).unwrap().kind, HypothesisKind::Cause);
        assert!(matches!(
            parse_hypothesis("A directly affects Z.", &vars),
            Err(PremiseError::Reference(_))
        ));
        assert!(matches!(
            parse_hypothesis("Nothing to see here.", &vars),
            Err(PremiseError::HypothesisSyntax(_))
        ));
    }

    #[test]
    fn aliased_hypothesis() {
        let vars = VariableTable::with_aliases([
            Variable { label: "CD".into(), alias: Some("central density".into()) },
            Variable { label: "BHM".into(), alias: Some("black hole mass".into()) },
        ])
        .unwrap();
        let h = parse_hypothesis("Does central density affect black hole mass?", &vars).unwrap();
        assert_eq!(h, Hypothesis::new(HypothesisKind::Cause, "CD", "BHM").unwrap());
        let vars = VariableTable::letters(3)
            .with_names(&["eating junk food".into(), "watching television".into(), "obesity".into()])
            .unwrap();
        let h = parse_hypothesis("Eating junk food directly affects obesity", &vars).unwrap();
        assert_eq!(h, Hypothesis::new(HypothesisKind::DirectCause, "A", "C").unwrap());
    }
}
