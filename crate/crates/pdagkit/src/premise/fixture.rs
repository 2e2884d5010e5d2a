//! Pre-parsed premises stored as label-keyed JSON.

use serde::{Deserialize, Serialize};

use super::{render_premise, PremiseDoc, PremiseError, Provenance, RenderStyle};
use crate::engine::RelationSet;
use crate::vars::{VarError, Variable, VariableTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureIndependence {
    pub pair: [String; 2],
    #[serde(default)]
    pub given: Vec<String>,
}

/// A premise given directly as relations, bypassing the sentence grammar.
/// Names may be labels or aliases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremiseFixture {
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub dependencies: Vec<[String; 2]>,
    #[serde(default)]
    pub independencies: Vec<FixtureIndependence>,
    /// `[cause, effect]`
    #[serde(default)]
    pub causes: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
}

impl PremiseFixture {
    /// Validated document; `raw_text` is the symbolic rendering.
    pub fn to_doc(&self) -> Result<PremiseDoc, PremiseError> {
        let vars = VariableTable::with_aliases(self.variables.iter().cloned())?;
        let idx = |m: &str| vars.resolve(m).ok_or_else(|| VarError::Unknown(m.to_string()));
        let mut rels = RelationSet::default();
        for [a, b] in &self.dependencies {
            rels.add_dependency(idx(a)?, idx(b)?)?;
        }
        for ind in &self.independencies {
            let given = ind.given.iter().map(|g| idx(g)).collect::<Result<Vec<_>, _>>()?;
            rels.add_independence(idx(&ind.pair[0])?, idx(&ind.pair[1])?, given)?;
        }
        for [a, b] in &self.causes {
            rels.add_cause(idx(a)?, idx(b)?)?;
        }
        rels.validate(vars.len())?;
        let mut doc = PremiseDoc {
            raw_text: String::new(),
            variables: vars,
            relations: rels,
            provenance: Provenance::Fixture,
        };
        doc.raw_text = render_premise(&doc, &RenderStyle::Symbolic)?.0;
        Ok(doc)
    }

    pub fn from_doc(doc: &PremiseDoc, hypothesis: Option<String>) -> Self {
        let v = &doc.variables;
        let l = |i: usize| v.label(i).to_string();
        let r = &doc.relations;
        let mut independencies: Vec<FixtureIndependence> = r
            .uncond_indep
            .iter()
            .map(|p| FixtureIndependence {
                pair: [l(p.first()), l(p.second())],
                given: Vec::new(),
            })
            .collect();
        independencies.extend(r.cond_indep.iter().map(|c| FixtureIndependence {
            pair: [l(c.pair.first()), l(c.pair.second())],
            given: c.given.iter().map(|&g| l(g)).collect(),
        }));
        Self {
            variables: v.variables().to_vec(),
            dependencies: r
                .dependencies
                .iter()
                .map(|p| [l(p.first()), l(p.second())])
                .collect(),
            independencies,
            causes: r.declared_causes.iter().map(|&(a, b)| [l(a), l(b)]).collect(),
            hypothesis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::premise::parse_premise;

    #[test]
    fn round_trips_through_doc() {
        let doc = parse_premise(
            "Suppose that there is a closed system of 3 variables, A, B and C. All statistical relations among these 3 variables are as follows: A correlates with C. B correlates with C. However, A is independent of B. A is the cause of C.",
        )
        .unwrap();
        let fx = PremiseFixture::from_doc(&doc, None);
        let back = fx.to_doc().unwrap();
        assert_eq!(back.relations, doc.relations);
        assert_eq!(back.provenance, Provenance::Fixture);
        let json = serde_json::to_string(&fx).unwrap();
        assert_eq!(serde_json::from_str::<PremiseFixture>(&json).unwrap(), fx);
    }

    #[test]
    fn unknown_names_rejected() {
        let fx: PremiseFixture = serde_json::from_str(
            r#"{"variables": [{"label": "X"}, {"label": "Y"}], "dependencies": [["X", "Z"]]}"#,
        )
        .unwrap();
        assert!(matches!(fx.to_doc(), Err(PremiseError::Variables(VarError::Unknown(_)))));
    }
}
