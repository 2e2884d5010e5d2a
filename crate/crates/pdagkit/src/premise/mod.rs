//! Premise and hypothesis text: parsing verbalized statistical relations into
//! a [`RelationSet`] and rendering relation sets back into premise text.

mod fixture;
mod grammar;
mod lexer;
mod render;
mod themes;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, RelationSet};
use crate::hypothesis::HypothesisError;
use crate::vars::{VarError, VariableTable};

pub use fixture::{FixtureIndependence, PremiseFixture};
pub use grammar::{parse_hypothesis, parse_premise, parse_premise_report, ParseReport};
pub(crate) use grammar::parse_statements;
pub use lexer::{sentences, Sentence, Span};
pub use render::{render_hypothesis, render_premise, RenderStyle};
pub use themes::Theme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Symbolic,
    NaturalStory,
    Fixture,
}

/// A parsed (or rendered) premise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseDoc {
    pub raw_text: String,
    pub variables: VariableTable,
    pub relations: RelationSet,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    Reference,
    Consistency,
}

/// A problem tied to one sentence of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
    pub excerpt: String,
}

impl Diagnostic {
    pub(crate) fn new(kind: DiagnosticKind, span: Span, message: impl Into<String>, text: &str) -> Self {
        let excerpt: String = text.chars().take(80).collect();
        Self {
            kind,
            span,
            message: message.into(),
            excerpt,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bytes {}..{}: {}: \"{}\"",
            self.span.start, self.span.end, self.message, self.excerpt
        )
    }
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PremiseError {
    #[error("premise text is empty")]
    Empty,
    #[error("premise has {} unparsed sentence(s): {}", .0.len(), summarize(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("unrecognized hypothesis `{0}`")]
    HypothesisSyntax(String),
    #[error("hypothesis mentions unknown variable `{0}`")]
    Reference(String),
    #[error("theme bank has {available} names but {needed} variables need one each")]
    BankTooSmall { needed: usize, available: usize },
    #[error("unknown theme `{0}`")]
    UnknownTheme(String),
    #[error("theme name `{0}` cannot be used in premise text")]
    BadThemeName(String),
    #[error(transparent)]
    Variables(#[from] VarError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
}

impl PremiseDoc {
    /// Renders `relations` over `variables` in the given style.
    pub fn render(
        variables: VariableTable,
        relations: RelationSet,
        style: &RenderStyle,
    ) -> Result<Self, PremiseError> {
        let mut doc = PremiseDoc {
            raw_text: String::new(),
            variables,
            relations,
            provenance: Provenance::Symbolic,
        };
        let (text, vars) = render_premise(&doc, style)?;
        doc.raw_text = text;
        doc.variables = vars;
        if matches!(style, RenderStyle::Story(_)) {
            doc.provenance = Provenance::NaturalStory;
        }
        Ok(doc)
    }
}
