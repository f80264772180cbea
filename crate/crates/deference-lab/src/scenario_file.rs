//! The JSON scenario format.
//!
//! ```json
//! {
//!   "worlds": ["w1", "w2"],
//!   "agent": [0.5, 0.5],
//!   "expert": [[0, 1], [1, 0]],
//!   "gambles": { "flip": [1, -1] }
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use deflab_core::{Gamble, ProbMass, Scenario, WorldSpace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    worlds: Vec<String>,
    agent: Vec<f64>,
    expert: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    gambles: BTreeMap<String, Vec<f64>>,
}

/// A validated scenario plus its named gambles (sorted by name).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub gambles: BTreeMap<String, Gamble>,
}

impl ScenarioFile {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            gambles: BTreeMap::new(),
        }
    }

    pub fn with_gamble(mut self, name: &str, values: &[f64]) -> Result<Self, InputError> {
        let g = gamble_field(&self.scenario, name, values.to_vec())?;
        self.gambles.insert(name.to_owned(), g);
        Ok(self)
    }

    pub fn gamble(&self, name: &str) -> Result<&Gamble, InputError> {
        self.gambles.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.gambles.keys().map(String::as_str).collect();
            InputError::new(format!("no gamble named {name:?} (known: {known:?})"))
        })
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| InputError::new(format!("malformed scenario: {e}")))?;
        Self::from_document(doc)
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| InputError::new(format!("{}: {}", path.display(), e.message)))
    }

    fn from_document(doc: Document) -> Result<Self, InputError> {
        let space =
            WorldSpace::new(doc.worlds).map_err(|e| InputError::new(format!("worlds: {e}")))?;
        let n = space.len();
        let agent = mass_field("agent", n, doc.agent)?;
        if doc.expert.len() != n {
            return Err(InputError::new(format!(
                "expert: expected {n} rows, found {}",
                doc.expert.len()
            )));
        }
        let expert = doc
            .expert
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                mass_field(
                    &format!("expert row {} ({})", i + 1, space.label(i)),
                    n,
                    row,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scenario =
            Scenario::new(space, agent, expert).map_err(|e| InputError::new(e.to_string()))?;
        let gambles = doc
            .gambles
            .into_iter()
            .map(|(name, values)| Ok((name.clone(), gamble_field(&scenario, &name, values)?)))
            .collect::<Result<_, InputError>>()?;
        Ok(Self { scenario, gambles })
    }

    fn document(&self) -> Document {
        let s = &self.scenario;
        Document {
            worlds: s.space().labels().to_vec(),
            agent: s.agent().weights().to_vec(),
            expert: s.expert().iter().map(|p| p.weights().to_vec()).collect(),
            gambles: self
                .gambles
                .iter()
                .map(|(k, g)| (k.clone(), g.values().to_vec()))
                .collect(),
        }
    }

    /// Pretty JSON that parses back to an identical value.
    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(&self.document()).expect("plain data serializes");
        out.push('\n');
        out
    }

    /// SHA-256 over the compact JSON of labels, masses and gambles, in hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.document()).expect("plain data serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn mass_field(field: &str, n: usize, values: Vec<f64>) -> Result<ProbMass, InputError> {
    if values.len() != n {
        return Err(InputError::new(format!(
            "{field}: expected {n} entries, found {}",
            values.len()
        )));
    }
    ProbMass::new(values).map_err(|e| InputError::new(format!("{field} {e}")))
}

fn gamble_field(s: &Scenario, name: &str, values: Vec<f64>) -> Result<Gamble, InputError> {
    if values.len() != s.n() {
        return Err(InputError::new(format!(
            "gamble {name:?}: expected {} entries, found {}",
            s.n(),
            values.len()
        )));
    }
    Gamble::new(values).map_err(|e| InputError::new(format!("gamble {name:?}: {e}")))
}
