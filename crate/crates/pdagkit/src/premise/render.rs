use super::{PremiseDoc, PremiseError, Theme};
use crate::engine::{CondIndep, Pair, RelationSet};
use crate::hypothesis::{Hypothesis, HypothesisKind};
use crate::vars::VariableTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenderStyle {
    /// Letter labels in the closed-system template.
    Symbolic,
    /// Theme names bound to labels by position.
    Story(Theme),
}

fn join_and(items: &[String], oxford: bool) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => {
            let sep = if oxford { ", and " } else { " and " };
            format!("{}{sep}{last}", init.join(", "))
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Independence statements grouped by pair: unconditional first, then
/// conditioning sets by size.
fn ordered_independencies(rels: &RelationSet) -> Vec<(Pair, Vec<usize>)> {
    let mut out: Vec<(Pair, Vec<usize>)> = rels
        .uncond_indep
        .iter()
        .map(|&p| (p, Vec::new()))
        .chain(
            rels.cond_indep
                .iter()
                .map(|CondIndep { pair, given }| (*pair, given.iter().copied().collect())),
        )
        .collect();
    out.sort_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));
    out
}

/// Renders premise text. Returns the text and the variable table it binds
/// (story style attaches the theme names as aliases).
pub fn render_premise(doc: &PremiseDoc, style: &RenderStyle) -> Result<(String, VariableTable), PremiseError> {
    doc.relations.validate(doc.variables.len())?;
    let n = doc.variables.len();
    match style {
        RenderStyle::Symbolic => {
            let vars = doc.variables.without_aliases();
            let name = |i: usize| vars.label(i).to_string();
            let labels: Vec<String> = (0..n).map(name).collect();
            let noun = if n == 1 { "variable" } else { "variables" };
            let mut text = format!(
                "Suppose that there is a closed system of {n} {noun}, {}.",
                join_and(&labels, false)
            );
            let mut stmts: Vec<String> = doc
                .relations
                .dependencies
                .iter()
                .map(|p| format!("{} correlates with {}.", name(p.first()), name(p.second())))
                .collect();
            let had_deps = !stmts.is_empty();
            for (i, (p, given)) in ordered_independencies(&doc.relations).into_iter().enumerate() {
                let lead = if i == 0 && had_deps { "However, " } else { "" };
                let s = if given.is_empty() {
                    format!("{lead}{} is independent of {}.", name(p.first()), name(p.second()))
                } else {
                    let g: Vec<String> = given.into_iter().map(name).collect();
                    format!(
                        "{lead}{} and {} are independent given {}.",
                        name(p.first()),
                        name(p.second()),
                        join_and(&g, false)
                    )
                };
                stmts.push(s);
            }
            for &(c, e) in &doc.relations.declared_causes {
                stmts.push(format!("{} is the cause of {}.", name(c), name(e)));
            }
            if !stmts.is_empty() {
                text.push_str(&format!(
                    " All statistical relations among these {n} {noun} are as follows: {}",
                    stmts.join(" ")
                ));
            }
            Ok((text, vars))
        }
        RenderStyle::Story(theme) => {
            if theme.len() < n {
                return Err(PremiseError::BankTooSmall {
                    needed: n,
                    available: theme.len(),
                });
            }
            let vars = doc.variables.with_names(&theme.names[..n])?;
            let name = |i: usize| vars.display_name(i).to_string();
            let entries: Vec<String> = (0..n)
                .map(|i| format!("{} ({})", name(i), vars.label(i)))
                .collect();
            let verb = if n == 1 { "has" } else { "have" };
            let mut sentences = vec![format!(
                "{} {verb} relations with each other.",
                join_and(&entries, true)
            )];
            let deps: Vec<String> = doc
                .relations
                .dependencies
                .iter()
                .map(|p| format!("{} and {}", name(p.first()), name(p.second())))
                .collect();
            if !deps.is_empty() {
                sentences.push(format!(
                    "There is a correlation between {}.",
                    deps.join(", and between ")
                ));
            }
            for (i, (p, given)) in ordered_independencies(&doc.relations).into_iter().enumerate() {
                let lead = if i == 0 && !deps.is_empty() { "However, " } else { "" };
                let body = if given.is_empty() {
                    format!("{} and {} are independent from each other.", name(p.first()), name(p.second()))
                } else {
                    let g: Vec<String> = given.into_iter().map(name).collect();
                    format!(
                        "{} and {} are independent given {}.",
                        name(p.first()),
                        name(p.second()),
                        join_and(&g, true)
                    )
                };
                sentences.push(if lead.is_empty() {
                    capitalize(&body)
                } else {
                    format!("{lead}{body}")
                });
            }
            for &(c, e) in &doc.relations.declared_causes {
                sentences.push(capitalize(&format!("{} is the cause of {}.", name(c), name(e))));
            }
            Ok((sentences.join(" "), vars))
        }
    }
}

/// Hypothesis sentence; story style uses aliases where the table has them.
pub fn render_hypothesis(h: &Hypothesis, vars: &VariableTable, story: bool) -> Result<String, PremiseError> {
    let (s, o) = h.resolve(vars)?;
    let name = |i: usize| {
        if story {
            vars.display_name(i).to_string()
        } else {
            vars.label(i).to_string()
        }
    };
    let (a, b) = (name(s), name(o));
    let text = match h.kind {
        HypothesisKind::DirectCause => format!("{a} directly affects {b}."),
        HypothesisKind::IndirectCause => format!("{a} indirectly affects {b}."),
        HypothesisKind::Cause => format!("{a} affects {b}."),
        HypothesisKind::CommonEffect => {
            format!("There exists at least one collider (i.e., common effect) of {a} and {b}.")
        }
        HypothesisKind::CommonCause => {
            format!("There exists at least one confounder (i.e., common cause) of {a} and {b}.")
        }
    };
    Ok(capitalize(&text))
}
