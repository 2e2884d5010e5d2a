//! Tolerant readers for model step outputs.
//!
//! Models emit near-JSON: bare identifiers, single quotes, missing outer
//! braces, prose around the payload. The loose reader accepts all of that;
//! step readers then apply a strict schema to whatever structure was found.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;
use serde_json::{json, Value};

use crate::engine::{AdjMatrix, ColliderCandidates, Pair, RelationSet};
use crate::hypothesis::Label;
use crate::premise::parse_statements;
use crate::vars::VariableTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loose {
    Atom(String),
    List(Vec<Loose>),
    Map(Vec<(String, Loose)>),
}

impl Loose {
    fn as_atom(&self) -> Option<&str> {
        match self {
            Loose::Atom(s) => Some(s),
            _ => None,
        }
    }
}

struct Reader {
    chars: Vec<char>,
    pos: usize,
}

const STOP: &[char] = &[',', ':', '[', ']', '{', '}', '\n'];

impl Reader {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn value(&mut self) -> Option<Loose> {
        self.skip_ws();
        match self.peek()? {
            '{' => self.map(),
            '[' => self.list(),
            '"' | '\'' => self.quoted().map(Loose::Atom),
            _ => self.bare().map(Loose::Atom),
        }
    }

    fn map(&mut self) -> Option<Loose> {
        self.eat('{');
        let mut out = Vec::new();
        loop {
            if self.eat('}') {
                return Some(Loose::Map(out));
            }
            self.skip_ws();
            let key = match self.peek()? {
                '"' | '\'' => self.quoted()?,
                _ => self.bare()?,
            };
            if !self.eat(':') {
                return None;
            }
            out.push((key, self.value()?));
            if !self.eat(',') && self.peek_non_ws() != Some('}') {
                return None;
            }
        }
    }

    fn list(&mut self) -> Option<Loose> {
        self.eat('[');
        let mut out = Vec::new();
        loop {
            if self.eat(']') {
                return Some(Loose::List(out));
            }
            out.push(self.value()?);
            if !self.eat(',') && self.peek_non_ws() != Some(']') {
                return None;
            }
        }
    }

    fn peek_non_ws(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek()
    }

    fn quoted(&mut self) -> Option<String> {
        let q = self.peek()?;
        self.pos += 1;
        let mut s = String::new();
        while let Some(c) = self.peek() {
            self.pos += 1;
            if c == q {
                return Some(s);
            }
            if c == '\\' {
                if let Some(n) = self.peek() {
                    self.pos += 1;
                    s.push(n);
                    continue;
                }
            }
            s.push(c);
        }
        None
    }

    fn bare(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| !STOP.contains(&c)) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let s = s.trim().trim_matches(|c| c == '"' || c == '\'').trim();
        (!s.is_empty()).then(|| s.to_string())
    }
}

fn fold_quotes(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            '\u{201C}' | '\u{201D}' => '"',
            '\u{2018}' | '\u{2019}' => '\'',
            c => c,
        })
        .collect()
}

fn strip_fences(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Structures found in `text`: the whole text read as map entries first,
/// then every `{`-delimited object in order of appearance.
pub fn loose_candidates(text: &str) -> Vec<Loose> {
    let text = strip_fences(&fold_quotes(text));
    let mut out = Vec::new();
    let trimmed = text.trim().trim_end_matches('.');
    if !trimmed.starts_with('{') {
        let wrapped = format!("{{{trimmed}}}");
        let mut r = Reader::new(&wrapped);
        if let Some(v) = r.map() {
            if r.peek_non_ws().is_none() {
                out.push(v);
            }
        }
    }
    for (i, c) in text.char_indices() {
        if c == '{' {
            let mut r = Reader::new(&text[i..]);
            if let Some(v) = r.map() {
                out.push(v);
            }
        }
    }
    out
}

/// Parsed statistical relations as a model reported them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedRelations {
    pub dependencies: BTreeSet<Pair>,
    pub uncond: BTreeSet<Pair>,
    /// Conditioning sets are `None` when the output lists pairs only.
    pub cond: BTreeSet<(Pair, Option<BTreeSet<usize>>)>,
    pub causes: BTreeSet<(usize, usize)>,
}

impl ParsedRelations {
    pub fn from_set(rels: &RelationSet) -> Self {
        Self {
            dependencies: rels.dependencies.clone(),
            uncond: rels.uncond_indep.clone(),
            cond: rels
                .cond_indep
                .iter()
                .map(|c| (c.pair, Some(c.given.clone())))
                .collect(),
            causes: rels.declared_causes.clone(),
        }
    }

    /// Equal to `rels`; conditioning sets are compared only when every
    /// reported conditional statement carries one.
    pub fn matches(&self, rels: &RelationSet) -> bool {
        if self.dependencies != rels.dependencies
            || self.uncond != rels.uncond_indep
            || self.causes != rels.declared_causes
        {
            return false;
        }
        if self.cond.iter().all(|(_, g)| g.is_some()) {
            let mine: BTreeSet<(Pair, BTreeSet<usize>)> = self
                .cond
                .iter()
                .map(|(p, g)| (*p, g.clone().unwrap_or_default()))
                .collect();
            let theirs: BTreeSet<(Pair, BTreeSet<usize>)> =
                rels.cond_indep.iter().map(|c| (c.pair, c.given.clone())).collect();
            mine == theirs
        } else {
            let mine: BTreeSet<Pair> = self.cond.iter().map(|(p, _)| *p).collect();
            let theirs: BTreeSet<Pair> = rels.cond_indep.iter().map(|c| c.pair).collect();
            mine == theirs
        }
    }

    fn to_json(&self, vars: &VariableTable) -> Value {
        let pair = |p: &Pair| json!([vars.label(p.first()), vars.label(p.second())]);
        json!({
            "dependencies": self.dependencies.iter().map(pair).collect::<Vec<_>>(),
            "unconditional_independencies": self.uncond.iter().map(pair).collect::<Vec<_>>(),
            "conditional_independencies": self.cond.iter().map(|(p, g)| json!({
                "pair": pair(p),
                "given": g.as_ref().map(|g| g.iter().map(|&v| vars.label(v)).collect::<Vec<_>>()),
            })).collect::<Vec<_>>(),
            "causes": self.causes.iter().map(|&(a, b)| json!([vars.label(a), vars.label(b)])).collect::<Vec<_>>(),
        })
    }
}

/// A step output after schema checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutput {
    Variables { count: usize, names: BTreeSet<usize> },
    Relations(ParsedRelations),
    Matrix(AdjMatrix),
    Candidates(ColliderCandidates),
    Answer(Label),
}

impl StepOutput {
    pub fn to_json(&self, vars: &VariableTable) -> Value {
        match self {
            StepOutput::Variables { count, names } => json!({
                "count": count,
                "names": names.iter().map(|&v| vars.label(v)).collect::<Vec<_>>(),
            }),
            StepOutput::Relations(r) => r.to_json(vars),
            StepOutput::Matrix(m) => m.to_json(),
            StepOutput::Candidates(c) => c.to_json(vars),
            StepOutput::Answer(l) => json!(l.to_string()),
        }
    }
}

/// Reads step `step` (1-9) of a model response.
pub fn parse_step_output(step: u8, text: &str, vars: &VariableTable) -> Result<StepOutput, String> {
    match step {
        1 => parse_variables(text, vars),
        2 => parse_relations(text, vars).map(StepOutput::Relations),
        3 | 4 | 5 | 8 => first_valid(text, |l| to_matrix(l, vars)).map(StepOutput::Matrix),
        6 | 7 => first_valid(text, |l| to_candidates(l, vars)).map(StepOutput::Candidates),
        9 => parse_answer(text).map(StepOutput::Answer),
        other => Err(format!("no step {other}")),
    }
}

fn first_valid<T>(text: &str, f: impl Fn(&Loose) -> Result<T, String>) -> Result<T, String> {
    let mut last = "no structured payload found".to_string();
    for cand in loose_candidates(text) {
        match f(&cand) {
            Ok(v) => return Ok(v),
            Err(e) => last = e,
        }
    }
    Err(last)
}

static COUNT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)number of (?:random )?variables?"?\s*:?\s*"?\s*(\d+)"#).expect("pattern compiles")
});
static NAMES: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)names? of (?:random )?variables?"?\s*:\s*(.+)"#).expect("pattern compiles")
});

fn parse_variables(text: &str, vars: &VariableTable) -> Result<StepOutput, String> {
    let text = fold_quotes(text);
    let count: usize = COUNT
        .captures(&text)
        .and_then(|c| c[1].parse().ok())
        .ok_or("no variable count")?;
    let rest = NAMES.captures(&text).ok_or("no variable names")?;
    let rest = rest.get(1).map_or("", |m| m.as_str());
    let raw: Vec<String> = if let Some(open) = rest.trim_start().strip_prefix('[') {
        let body = open.split(']').next().unwrap_or_default();
        body.split(',').map(str::to_string).collect()
    } else {
        rest.lines()
            .next()
            .unwrap_or_default()
            .split(',')
            .map(str::to_string)
            .collect()
    };
    let mut names = BTreeSet::new();
    for r in raw {
        let m = r.trim().trim_matches(|c| matches!(c, '"' | '\'' | '}' | '.')).trim();
        if m.is_empty() {
            continue;
        }
        names.insert(vars.resolve(m).ok_or_else(|| format!("unknown variable `{m}`"))?);
    }
    Ok(StepOutput::Variables { count, names })
}

fn atom_pair(l: &Loose, vars: &VariableTable) -> Result<(usize, usize), String> {
    match l {
        Loose::List(items) if items.len() == 2 => {
            let a = resolve(items[0].as_atom(), vars)?;
            let b = resolve(items[1].as_atom(), vars)?;
            Ok((a, b))
        }
        other => Err(format!("expected a pair, found {other:?}")),
    }
}

fn resolve(atom: Option<&str>, vars: &VariableTable) -> Result<usize, String> {
    let a = atom.ok_or("expected a variable name")?;
    vars.resolve(a).ok_or_else(|| format!("unknown variable `{a}`"))
}

fn pair_list(l: &Loose, vars: &VariableTable) -> Result<Vec<Pair>, String> {
    match l {
        Loose::List(items) => items
            .iter()
            .map(|i| atom_pair(i, vars).and_then(|(a, b)| Pair::new(a, b).map_err(|e| e.to_string())))
            .collect(),
        _ => Err("expected a list of pairs".into()),
    }
}

/// Finds the map holding the relation keys, possibly nested one level.
fn relation_map(l: &Loose) -> Option<&[(String, Loose)]> {
    let Loose::Map(entries) = l else { return None };
    let has = |k: &str| k.to_lowercase().contains("dependenc");
    if entries.iter().any(|(k, _)| has(k)) {
        return Some(entries);
    }
    entries.iter().find_map(|(_, v)| relation_map(v))
}

fn parse_relations(text: &str, vars: &VariableTable) -> Result<ParsedRelations, String> {
    let structured = first_valid(text, |l| to_relations(l, vars));
    structured.or_else(|e| {
        parse_statements(text, vars)
            .map(|r| ParsedRelations::from_set(&r))
            .map_err(|_| e)
    })
}

fn to_relations(l: &Loose, vars: &VariableTable) -> Result<ParsedRelations, String> {
    let entries = relation_map(l).ok_or("no relation lists")?;
    let mut out = ParsedRelations::default();
    let mut seen_dep = false;
    for (k, v) in entries {
        let key = k.to_lowercase();
        if key.contains("unconditional") {
            out.uncond.extend(pair_list(v, vars)?);
        } else if key.contains("conditional") {
            let Loose::List(items) = v else {
                return Err("conditional independencies must be a list".into());
            };
            for item in items {
                out.cond.insert(cond_entry(item, vars)?);
            }
        } else if key.contains("independenc") {
            out.uncond.extend(pair_list(v, vars)?);
        } else if key.contains("dependenc") {
            seen_dep = true;
            out.dependencies.extend(pair_list(v, vars)?);
        } else if key.contains("cause") {
            let Loose::List(items) = v else {
                return Err("causes must be a list".into());
            };
            for item in items {
                out.causes.insert(atom_pair(item, vars)?);
            }
        }
    }
    if !seen_dep {
        return Err("no dependency list".into());
    }
    Ok(out)
}

/// `[A, B]`, `[A, B, [C, D]]`, `[A, B, C]` or `{pair: [A, B], given: [C]}`.
fn cond_entry(l: &Loose, vars: &VariableTable) -> Result<(Pair, Option<BTreeSet<usize>>), String> {
    let pair = |a: &Loose, b: &Loose| {
        let (a, b) = (resolve(a.as_atom(), vars)?, resolve(b.as_atom(), vars)?);
        Pair::new(a, b).map_err(|e| e.to_string())
    };
    let given_of = |g: &[Loose]| -> Result<BTreeSet<usize>, String> {
        g.iter().map(|x| resolve(x.as_atom(), vars)).collect()
    };
    match l {
        Loose::List(items) if items.len() == 2 => Ok((pair(&items[0], &items[1])?, None)),
        Loose::List(items) if items.len() == 3 => {
            let g = match &items[2] {
                Loose::List(g) => given_of(g)?,
                atom => given_of(std::slice::from_ref(atom))?,
            };
            Ok((pair(&items[0], &items[1])?, Some(g)))
        }
        Loose::Map(entries) => {
            let get = |name: &str| entries.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v);
            let (a, b) = atom_pair(get("pair").ok_or("missing pair")?, vars)?;
            let g = match get("given") {
                Some(Loose::List(g)) => Some(given_of(g)?),
                _ => None,
            };
            Ok((Pair::new(a, b).map_err(|e| e.to_string())?, g))
        }
        other => Err(format!("unreadable conditional independence {other:?}")),
    }
}

/// Strips single-key wrappers such as `{"Candidates": {...}}`.
fn unwrap_single<'a>(l: &'a Loose, vars: &VariableTable) -> &'a Loose {
    match l {
        Loose::Map(entries) if entries.len() == 1 && vars.resolve(&entries[0].0).is_none() => {
            unwrap_single(&entries[0].1, vars)
        }
        other => other,
    }
}

fn to_matrix(l: &Loose, vars: &VariableTable) -> Result<AdjMatrix, String> {
    let Loose::Map(rows) = unwrap_single(l, vars) else {
        return Err("matrix must be an object of rows".into());
    };
    let n = vars.len();
    let mut grid: Vec<Option<Vec<u8>>> = vec![None; n];
    for (rk, rv) in rows {
        let r = resolve(Some(rk), vars)?;
        let Loose::Map(cells) = rv else {
            return Err(format!("row `{rk}` is not an object"));
        };
        let mut row: Vec<Option<u8>> = vec![None; n];
        for (ck, cv) in cells {
            let c = resolve(Some(ck), vars)?;
            let v = match cv.as_atom().map(str::trim) {
                Some("0") => 0,
                Some("1") => 1,
                other => return Err(format!("cell [{rk}][{ck}] holds {other:?}")),
            };
            if row[c].replace(v).is_some() {
                return Err(format!("cell [{rk}][{ck}] given twice"));
            }
        }
        let row: Vec<u8> = row
            .into_iter()
            .enumerate()
            .map(|(c, v)| v.ok_or_else(|| format!("row `{rk}` lacks column `{}`", vars.label(c))))
            .collect::<Result<_, _>>()?;
        if grid[r].replace(row).is_some() {
            return Err(format!("row `{rk}` given twice"));
        }
    }
    let grid: Vec<Vec<u8>> = grid
        .into_iter()
        .enumerate()
        .map(|(r, row)| row.ok_or_else(|| format!("missing row `{}`", vars.label(r))))
        .collect::<Result<_, _>>()?;
    AdjMatrix::from_rows(vars.clone(), &grid).map_err(|e| e.to_string())
}

fn to_candidates(l: &Loose, vars: &VariableTable) -> Result<ColliderCandidates, String> {
    let Loose::Map(rows) = unwrap_single(l, vars) else {
        return Err("candidates must be an object".into());
    };
    let mut out = ColliderCandidates::new();
    for (rk, rv) in rows {
        let r = resolve(Some(rk), vars)?;
        let pairs = match rv {
            // `C: [A, B]` is a single pair written flat
            Loose::List(items) if items.len() == 2 && items.iter().all(|i| i.as_atom().is_some()) => {
                let (a, b) = atom_pair(rv, vars)?;
                vec![Pair::new(a, b).map_err(|e| e.to_string())?]
            }
            other => pair_list(other, vars)?,
        };
        for p in pairs {
            if p.contains(r) {
                return Err(format!("row `{rk}` pairs with itself"));
            }
            out.insert(r, p);
        }
    }
    Ok(out)
}

static FINAL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)final answer\s*(?:is)?\s*:?\s*\**\s*["'“]?\s*(yes|no)\b"#).expect("pattern compiles")
});
static ANSWER_IS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)answer is\s*:?\s*["'“]?\s*(yes|no)\b"#).expect("pattern compiles")
});
static QUOTED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"["“](yes|no|Yes|No|YES|NO)["”]"#).expect("pattern compiles"));

/// The final yes/no; the last explicit marker wins.
pub fn parse_answer(text: &str) -> Result<Label, String> {
    let pick = |re: &Regex| {
        re.captures_iter(text)
            .last()
            .map(|c| if c[1].eq_ignore_ascii_case("yes") { Label::Yes } else { Label::No })
    };
    pick(&FINAL)
        .or_else(|| pick(&ANSWER_IS))
        .or_else(|| pick(&QUOTED))
        .ok_or_else(|| "no final yes/no answer".to_string())
}

/// The body of each `"Subtask k"` section of a few-shot response, taken
/// after its last `Output:` marker.
pub fn split_subtasks(text: &str) -> BTreeMap<u8, String> {
    static MARK: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(r#"(?m)^[\s*#-]*"?Subtask\s*(\d)"?"#).expect("pattern compiles")
    });
    static OUTPUT: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"(?m)^\s*\**Output\**:").expect("pattern compiles"));
    let marks: Vec<(usize, usize, u8)> = MARK
        .captures_iter(text)
        .filter_map(|c| {
            let m = c.get(0)?;
            Some((m.start(), m.end(), c[1].parse().ok()?))
        })
        .collect();
    let mut out = BTreeMap::new();
    for (i, &(_, body_start, step)) in marks.iter().enumerate() {
        let end = marks.get(i + 1).map_or(text.len(), |m| m.0);
        let section = &text[body_start..end];
        let body = match OUTPUT.find_iter(section).last() {
            Some(m) => &section[m.end()..],
            None => section.trim_start_matches(|c: char| c == ':' || c == '-' || c.is_whitespace()),
        };
        out.insert(step, body.trim().to_string());
    }
    out
}

/// JSON for records: the parsed value or null.
pub(crate) fn output_json(out: &Option<StepOutput>, vars: &VariableTable) -> Value {
    out.as_ref().map_or(Value::Null, |o| o.to_json(vars))
}
