//! Claims and their expectations, loaded from a JSON data file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::checks::CheckKind;
use crate::CliError;

/// The registry shipped with the tool.
pub const BUILTIN_REGISTRY: &str = include_str!("../claims.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Claims with asserted expectations.
    Paper,
    /// Report-only probes.
    Open,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub parameters: Value,
    #[serde(default)]
    pub expected: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Claim {
    pub claim_id: String,
    pub check: CheckKind,
    pub suite: Suite,
    pub statement: String,
    pub anchor: String,
    #[serde(default)]
    pub note: Option<String>,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Registry {
    pub claims: Vec<Claim>,
}

impl Registry {
    pub fn builtin() -> Registry {
        Registry::parse(BUILTIN_REGISTRY).expect("built-in registry is valid")
    }

    pub fn parse(text: &str) -> Result<Registry, CliError> {
        let r: Registry = serde_json::from_str(text).map_err(|e| CliError::Registry(e.to_string()))?;
        let mut ids: Vec<&str> = r.claims.iter().map(|c| c.claim_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Registry(format!("duplicate claim id {}", w[0])));
        }
        Ok(r)
    }

    pub fn load(path: Option<&Path>) -> Result<Registry, CliError> {
        match path {
            None => Ok(Registry::builtin()),
            Some(p) => Registry::parse(&std::fs::read_to_string(p)?),
        }
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    /// The first instance of a `check` claim whose parameters all appear,
    /// with equal values, in `params`.
    pub fn find(&self, check: CheckKind, params: &Value) -> Option<(&Claim, &Instance)> {
        self.claims.iter().filter(|c| c.check == check).find_map(|c| {
            c.instances.iter().find(|i| params_match(&i.parameters, params)).map(|i| (c, i))
        })
    }
}

fn params_match(pattern: &Value, params: &Value) -> bool {
    match (pattern.as_object(), params.as_object()) {
        (Some(p), Some(q)) => p.iter().all(|(k, v)| q.get(k) == Some(v)),
        _ => false,
    }
}
