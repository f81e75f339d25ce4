//! Result documents printed on standard output.

use serde::Serialize;
use sha2::{Digest, Sha256};

use ixsys::State;

pub const RESULT_SCHEMA: &str = "ixsys-result/1";

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub budget: u64,
    pub scenario_sha256: String,
}

impl Provenance {
    pub fn new(scenario: &[u8], seed: u64, budget: u64) -> Self {
        Provenance {
            tool: "ixsys",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            budget,
            scenario_sha256: hex::encode(Sha256::digest(scenario)),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Statistics {
    pub nodes: usize,
    pub state_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scc_count: Option<usize>,
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommitEntry {
    pub state: State,
    pub committed_to: Option<State>,
}

/// The reaction table of a built system, in scenario form.
#[derive(Debug, Clone, Serialize)]
pub struct TableSystem {
    pub kind: &'static str,
    pub sizes: Vec<usize>,
    pub table: Vec<State>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub schema: &'static str,
    pub command: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    /// The witness's starting state with 1-based actions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_states: Option<Vec<State>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pne: Option<Vec<State>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<State>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub committed: Option<Vec<CommitEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<TableSystem>,
    pub statistics: Statistics,
    pub provenance: Provenance,
}

impl ResultDocument {
    pub fn new(command: &str, verdict: &str, statistics: Statistics, provenance: Provenance) -> Self {
        ResultDocument {
            schema: RESULT_SCHEMA,
            command: command.into(),
            verdict: verdict.into(),
            witness: None,
            witness_state: None,
            stable_states: None,
            pne: None,
            spectrum: None,
            committed: None,
            run: None,
            system: None,
            statistics,
            provenance,
        }
    }
}

pub fn one_based(state: &State) -> String {
    let parts: Vec<String> = state.iter().map(|x| (x + 1).to_string()).collect();
    format!("({})", parts.join(","))
}
