//! JSON network files.
//!
//! ```json
//! {
//!   "description": "optional free text",
//!   "variables": [ { "name": "Y", "cardinality": 2 }, ... ],
//!   "edges": [ ["Y", "X1"], ... ],
//!   "cpts": [
//!     { "child": "X1", "parents": ["Y"], "rows": [[0.9, 0.1], [0.1, 0.9]] }
//!   ]
//! }
//! ```
//!
//! Variable ids follow the order of `variables`. Each `edges` entry is a
//! `[parent, child]` pair and the edge set must equal the one implied by the
//! CPT parent lists. `rows` are indexed mixed-radix over `parents` in the
//! order listed, last parent fastest.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BayesNet, Cpt, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub variables: Vec<VarEntry>,
    pub edges: Vec<(String, String)>,
    pub cpts: Vec<CptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarEntry {
    pub name: String,
    pub cardinality: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptEntry {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NetFile {
    pub fn from_net(net: &BayesNet, description: Option<String>) -> Self {
        let name = |id: usize| net.variable(id).name.clone();
        let mut edges = Vec::new();
        let mut cpts = Vec::new();
        for v in 0..net.num_vars() {
            let cpt = net.cpt(v);
            for &p in &cpt.parents {
                edges.push((name(p), name(v)));
            }
            cpts.push(CptEntry {
                child: name(v),
                parents: cpt.parents.iter().map(|&p| name(p)).collect(),
                rows: cpt.rows.clone(),
            });
        }
        NetFile {
            description,
            variables: net
                .variables()
                .iter()
                .map(|v| VarEntry {
                    name: v.name.clone(),
                    cardinality: v.cardinality,
                })
                .collect(),
            edges,
            cpts,
        }
    }

    pub fn into_net(self) -> Result<BayesNet> {
        let lookup = |name: &str, context: &str| {
            self.variables
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::Schema(format!("{context}: unknown variable '{name}'")))
        };
        let variables: Vec<Variable> = self
            .variables
            .iter()
            .enumerate()
            .map(|(id, v)| Variable {
                id,
                name: v.name.clone(),
                cardinality: v.cardinality,
            })
            .collect();

        let mut cpts = Vec::with_capacity(self.cpts.len());
        let mut implied = BTreeSet::new();
        for entry in &self.cpts {
            let child = lookup(&entry.child, "cpts.child")?;
            let parents = entry
                .parents
                .iter()
                .map(|p| lookup(p, &format!("cpts entry for '{}'", entry.child)))
                .collect::<Result<Vec<_>>>()?;
            for &p in &parents {
                implied.insert((p, child));
            }
            cpts.push(Cpt::new(child, parents, entry.rows.clone()));
        }
        for v in &self.variables {
            if !self.cpts.iter().any(|c| c.child == v.name) {
                return Err(Error::Schema(format!("missing cpts entry for variable '{}'", v.name)));
            }
        }
        let mut declared = BTreeSet::new();
        for (p, c) in &self.edges {
            declared.insert((lookup(p, "edges")?, lookup(c, "edges")?));
        }
        if let Some(&(p, c)) = declared.symmetric_difference(&implied).next() {
            return Err(Error::Schema(format!(
                "edge {} -> {} is not consistent between `edges` and CPT parent lists",
                self.variables[p].name, self.variables[c].name
            )));
        }
        BayesNet::new(variables, cpts)
    }
}

/// Parses and validates a network from JSON text.
pub fn parse_network(text: &str) -> Result<BayesNet> {
    let file: NetFile = serde_json::from_str(text)?;
    file.into_net()
}

/// Reads and validates a network file.
pub fn load_network(path: impl AsRef<Path>) -> Result<BayesNet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

/// Pretty-printed JSON for `net`.
pub fn to_json(net: &BayesNet, description: Option<String>) -> String {
    let mut s = serde_json::to_string_pretty(&NetFile::from_net(net, description)).expect("network serializes");
    s.push('\n');
    s
}

pub(super) fn canonical_bytes(net: &BayesNet) -> Vec<u8> {
    serde_json::to_vec(&NetFile::from_net(net, None)).expect("network serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{fig4a, scene};

    #[test]
    fn json_round_trip() {
        for net in [fig4a(0.1, 0.3), scene()] {
            let back = parse_network(&to_json(&net, Some("x".into()))).unwrap();
            assert_eq!(back, net);
        }
    }

    #[test]
    fn missing_cpt_names_variable() {
        let text = r#"{
            "variables": [{"name": "A", "cardinality": 2}, {"name": "B", "cardinality": 2}],
            "edges": [],
            "cpts": [{"child": "A", "parents": [], "rows": [[0.5, 0.5]]}]
        }"#;
        let err = parse_network(text).unwrap_err();
        assert!(err.to_string().contains("'B'"), "{err}");
    }

    #[test]
    fn bad_row_sum_is_a_validation_error() {
        let text = r#"{
            "variables": [{"name": "A", "cardinality": 2}],
            "edges": [],
            "cpts": [{"child": "A", "parents": [], "rows": [[0.6, 0.6]]}]
        }"#;
        assert!(matches!(parse_network(text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_error_has_location() {
        let err = parse_network("{\n  \"variables\": [,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn edges_must_match_cpts() {
        let text = r#"{
            "variables": [{"name": "A", "cardinality": 2}, {"name": "B", "cardinality": 2}],
            "edges": [["A", "B"]],
            "cpts": [
                {"child": "A", "parents": [], "rows": [[0.5, 0.5]]},
                {"child": "B", "parents": [], "rows": [[0.5, 0.5]]}
            ]
        }"#;
        assert!(matches!(parse_network(text), Err(Error::Schema(_))));
    }
}
