//! Ordered variable labels with optional long-form aliases.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarError {
    #[error("variable label must be non-empty")]
    EmptyLabel,
    #[error("duplicate variable label `{0}`")]
    DuplicateLabel(String),
    #[error("alias `{alias}` collides with another variable name")]
    AliasCollision { alias: String },
    #[error("unknown variable `{0}`")]
    Unknown(String),
    #[error("index {index} out of range for {len} variables")]
    OutOfRange { index: usize, len: usize },
}

/// One entry of a [`VariableTable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
}

/// Ordered, unique variable labels. Position in the table is the row/column
/// index used by matrices, DAGs and relation sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Variable>", into = "Vec<Variable>")]
pub struct VariableTable {
    vars: Vec<Variable>,
    lookup: HashMap<String, usize>,
}

impl VariableTable {
    pub fn new<I, S>(labels: I) -> Result<Self, VarError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_aliases(labels.into_iter().map(|l| Variable {
            label: l.into(),
            alias: None,
        }))
    }

    pub fn with_aliases<I>(vars: I) -> Result<Self, VarError>
    where
        I: IntoIterator<Item = Variable>,
    {
        let vars: Vec<Variable> = vars.into_iter().collect();
        let mut lookup = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if v.label.trim().is_empty() {
                return Err(VarError::EmptyLabel);
            }
            if lookup.insert(v.label.clone(), i).is_some() {
                return Err(VarError::DuplicateLabel(v.label.clone()));
            }
        }
        // aliases are matched case-insensitively and must not shadow anything
        let mut seen: HashMap<String, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.label.to_lowercase(), i))
            .collect();
        for (i, v) in vars.iter().enumerate() {
            if let Some(alias) = &v.alias {
                let key = normalize_mention(alias);
                if key.is_empty() {
                    return Err(VarError::AliasCollision { alias: alias.clone() });
                }
                match seen.get(&key) {
                    Some(&j) if j != i => {
                        return Err(VarError::AliasCollision { alias: alias.clone() })
                    }
                    _ => {
                        seen.insert(key, i);
                    }
                }
            }
        }
        Ok(Self { vars, lookup })
    }

    /// `A`, `B`, `C`, ... for the first `n` letters.
    pub fn letters(n: usize) -> Self {
        assert!(n <= 26, "at most 26 letter labels");
        Self::new((0..n).map(|i| ((b'A' + i as u8) as char).to_string()))
            .expect("letter labels are unique")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.vars[i].label
    }

    pub fn alias(&self, i: usize) -> Option<&str> {
        self.vars[i].alias.as_deref()
    }

    /// Alias when present, otherwise the label.
    pub fn display_name(&self, i: usize) -> &str {
        self.alias(i).unwrap_or_else(|| self.label(i))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.vars.iter().map(|v| v.label.as_str())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn has_aliases(&self) -> bool {
        self.vars.iter().any(|v| v.alias.is_some())
    }

    pub fn index_of(&self, label: &str) -> Result<usize, VarError> {
        self.lookup
            .get(label)
            .copied()
            .ok_or_else(|| VarError::Unknown(label.to_string()))
    }

    pub fn check_index(&self, index: usize) -> Result<(), VarError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(VarError::OutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Resolve a free-text mention: exact label first, then a case-insensitive
    /// match on labels and aliases.
    pub fn resolve(&self, mention: &str) -> Option<usize> {
        let trimmed = mention.trim();
        if let Some(&i) = self.lookup.get(trimmed) {
            return Some(i);
        }
        let key = normalize_mention(trimmed);
        self.vars.iter().position(|v| {
            v.label.to_lowercase() == key
                || v.alias.as_deref().map(normalize_mention).as_deref() == Some(key.as_str())
        })
    }

    /// Copy of this table with new aliases, by position.
    pub fn with_names(&self, names: &[String]) -> Result<Self, VarError> {
        Self::with_aliases(self.vars.iter().zip(names).map(|(v, n)| Variable {
            label: v.label.clone(),
            alias: Some(n.clone()),
        }))
    }

    /// Copy of this table with aliases dropped.
    pub fn without_aliases(&self) -> Self {
        Self::new(self.labels().map(str::to_string)).expect("labels already validated")
    }
}

/// Lowercase, whitespace-collapsed form used for alias comparison.
pub fn normalize_mention(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

impl TryFrom<Vec<Variable>> for VariableTable {
    type Error = VarError;

    fn try_from(vars: Vec<Variable>) -> Result<Self, Self::Error> {
        Self::with_aliases(vars)
    }
}

impl From<VariableTable> for Vec<Variable> {
    fn from(t: VariableTable) -> Self {
        t.vars
    }
}
