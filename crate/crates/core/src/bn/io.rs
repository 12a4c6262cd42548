//! JSON network definition files.
//!
//! ```json
//! {
//!   "units": "percent",
//!   "variables": [{ "name": "A", "states": ["a0", "a1"] }],
//!   "cpts": [{ "child": "A", "parents": [], "rows": [[30.0, 70.0]] }]
//! }
//! ```
//!
//! Rows are given in `fraction` (the default) or `percent`. Saving always
//! writes fractions, so load → save → load is lossless.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{build_network, BnError, CptDef, Network, Scale, Variable};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed network document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Network(#[from] BnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Fraction,
    Percent,
}

impl Units {
    /// Factor that converts a stored entry into a probability.
    pub fn scale(self) -> f64 {
        match self {
            Units::Fraction => 1.0,
            Units::Percent => 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub name: String,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "is_nominal")]
    pub scale: Scale,
}

fn is_nominal(s: &Scale) -> bool {
    *s == Scale::Nominal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptDoc {
    pub child: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    #[serde(default)]
    pub units: Units,
    pub variables: Vec<VariableDoc>,
    pub cpts: Vec<CptDoc>,
}

impl NetworkDocument {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network documents always serialize")
    }

    pub fn read(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path)
            .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn variables(&self) -> Result<Vec<Variable>, BnError> {
        self.variables
            .iter()
            .map(|v| Variable::new(v.name.clone(), v.states.iter().cloned()).map(|var| var.with_scale(v.scale)))
            .collect()
    }

    /// CPT rows converted to fractions, without any renormalization.
    pub fn cpt_definitions(&self) -> Vec<CptDef> {
        let scale = self.units.scale();
        self.cpts
            .iter()
            .map(|c| CptDef {
                child: c.child.clone(),
                parents: c.parents.clone(),
                rows: c.rows.iter().map(|r| r.iter().map(|p| p / scale).collect()).collect(),
            })
            .collect()
    }

    /// Strict conversion: rows must already sum to one.
    pub fn to_network(&self) -> Result<Network, BnError> {
        build_network(self.variables()?, self.cpt_definitions())
    }

    pub fn from_network(network: &Network) -> Self {
        let (variables, cpts) = network.to_definitions();
        NetworkDocument {
            units: Units::Fraction,
            variables: variables
                .into_iter()
                .map(|v| VariableDoc { name: v.name().to_string(), states: v.states().to_vec(), scale: v.scale() })
                .collect(),
            cpts: cpts
                .into_iter()
                .map(|c| CptDoc { child: c.child, parents: c.parents, rows: c.rows })
                .collect(),
        }
    }
}

pub fn load_network(path: &Path) -> Result<Network, LoadError> {
    Ok(NetworkDocument::read(path)?.to_network()?)
}

pub fn save_network(network: &Network, path: &Path) -> Result<(), LoadError> {
    fs::write(path, NetworkDocument::from_network(network).to_json())
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "units": "percent",
        "variables": [
            { "name": "A", "states": ["a0", "a1"] },
            { "name": "B", "states": ["b0", "b1", "b2"], "scale": "ordinal" }
        ],
        "cpts": [
            { "child": "A", "rows": [[30.0, 70.0]] },
            { "child": "B", "parents": ["A"], "rows": [[10.0, 20.0, 70.0], [33.3, 33.3, 33.4]] }
        ]
    }"#;

    #[test]
    fn percent_document_loads() {
        let net = NetworkDocument::from_json(DOC).unwrap().to_network().unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(net.variable(1).scale(), Scale::Ordinal);
        assert!((net.cpt(0).row(0)[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn round_trip_is_exact() {
        let net = NetworkDocument::from_json(DOC).unwrap().to_network().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        save_network(&net, &path).unwrap();
        let again = load_network(&path).unwrap();
        assert_eq!(net, again);
        save_network(&again, &path).unwrap();
        assert_eq!(load_network(&path).unwrap(), net);
    }

    #[test]
    fn cycle_in_document() {
        let doc = r#"{"variables":[{"name":"A","states":["0","1"]},{"name":"B","states":["0","1"]}],
            "cpts":[{"child":"A","parents":["B"],"rows":[[0.5,0.5],[0.5,0.5]]},
                    {"child":"B","parents":["A"],"rows":[[0.5,0.5],[0.5,0.5]]}]}"#;
        let err = NetworkDocument::from_json(doc).unwrap().to_network().unwrap_err();
        assert!(matches!(err, BnError::CycleDetected { .. }));
    }
}
