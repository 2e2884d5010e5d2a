use serde::{Deserialize, Serialize};

use super::PremiseError;

const HEALTH: &[&str] = &[
    "eating junk food",
    "watching television",
    "obesity",
    "sleep quality",
    "blood pressure",
    "daily exercise",
    "stress level",
    "sugar intake",
];

const ECONOMICS: &[&str] = &[
    "interest rates",
    "housing prices",
    "consumer spending",
    "unemployment",
    "inflation",
    "wage growth",
    "stock returns",
    "business investment",
];

const ENVIRONMENT: &[&str] = &[
    "rainfall",
    "crop yield",
    "soil erosion",
    "river pollution",
    "forest cover",
    "air temperature",
    "pollinator density",
    "fertilizer use",
];

const MARKETING: &[&str] = &[
    "ad spending",
    "brand awareness",
    "store traffic",
    "product price",
    "customer loyalty",
    "online reviews",
    "seasonal demand",
    "discount frequency",
];

const SOCIAL: &[&str] = &[
    "ice cream sales",
    "swimming pool attendance",
    "hot weather",
    "school attendance",
    "library visits",
    "neighborhood safety",
    "public transit use",
    "volunteer hours",
];

/// Words the grammar treats as structure; a name containing one would not
/// parse back unambiguously.
const RESERVED: &[&str] = &[
    "and", "of", "from", "given", "with", "between", "is", "are", "the", "cause", "causes",
    "affect", "affects", "directly", "indirectly", "correlates", "correlated", "independent",
    "correlation", "does", "have", "has", "relations",
];

/// A named bank of phrases used as variable names in story-style premises.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theme {
    pub name: String,
    pub names: Vec<String>,
}

impl Theme {
    pub const BUILTIN: [&'static str; 5] = ["health", "economics", "environment", "marketing", "social"];

    pub fn builtin(name: &str) -> Result<Self, PremiseError> {
        let bank = match name {
            "health" => HEALTH,
            "economics" => ECONOMICS,
            "environment" => ENVIRONMENT,
            "marketing" => MARKETING,
            "social" => SOCIAL,
            other => return Err(PremiseError::UnknownTheme(other.to_string())),
        };
        Ok(Self {
            name: name.to_string(),
            names: bank.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// A custom bank; names are checked against the grammar's reserved words.
    pub fn custom(name: impl Into<String>, names: Vec<String>) -> Result<Self, PremiseError> {
        for n in &names {
            check_name(n)?;
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.to_lowercase()) {
                return Err(PremiseError::BadThemeName(n.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            names,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

fn check_name(n: &str) -> Result<(), PremiseError> {
    let bad = n.trim().is_empty()
        || n.chars().any(|c| matches!(c, ',' | '.' | '?' | '!' | '(' | ')' | ':' | ';'))
        || n
            .split_whitespace()
            .any(|w| RESERVED.contains(&w.to_lowercase().as_str()));
    if bad {
        Err(PremiseError::BadThemeName(n.to_string()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_banks_are_clean() {
        for name in Theme::BUILTIN {
            let t = Theme::builtin(name).unwrap();
            assert!(t.len() >= 6, "{name} must cover six variables");
            Theme::custom(name, t.names.clone()).unwrap();
        }
    }

    #[test]
    fn reserved_words_rejected() {
        assert!(Theme::custom("x", vec!["salt and pepper".into()]).is_err());
        assert!(Theme::custom("x", vec!["level of noise".into()]).is_err());
        assert!(Theme::custom("x", vec!["noise".into(), "Noise".into()]).is_err());
        assert!(Theme::builtin("astrology").is_err());
    }
}
