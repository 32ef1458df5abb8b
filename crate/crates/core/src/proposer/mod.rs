//! Candidate rule-set generation: prompts, an HTTP chat-completion oracle,
//! a deterministic scripted oracle, and candidate extraction.

mod client;
mod extract;
mod prompt;
mod scripted;
mod stub;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{
    ChatClient, CountingTransport, HttpComparator, HttpOracle, HttpResponse, OracleClientConfig, Transport,
    UreqTransport, API_KEY_ENV, DEFAULT_MODEL,
};
pub use extract::{extract_candidates, fenced_blocks, validate_candidate, DropReason, Dropped, Extraction};
pub use prompt::{build_comparison_prompt, build_crossover_prompt, build_mutation_prompt, build_prompt, SYSTEM_PROMPT};
pub use scripted::{ScriptEntry, ScriptedOracle, Trigger};
pub use stub::{StubResponse, StubServer};

use crate::distance::{DistanceOracle, LevenshteinComparator};
use crate::pddl::{Domain, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
    #[error("oracle authentication failed: {0}")]
    Auth(String),
    #[error("no script entry matches domain `{0}`")]
    NoScriptMatch(String),
}

/// Everything a proposer sees about the current search node.
#[derive(Debug, Clone)]
pub struct ProposalContext {
    pub domain: Domain,
    pub problem: Problem,
    /// `None` when the goal is currently unreachable.
    pub baseline_length: Option<usize>,
    pub target_length: usize,
    pub failure_summary: String,
    pub history: Vec<String>,
}

pub trait ProposalOracle: Send + Sync {
    /// At most `k` validated candidates, deduplicated by canonical text.
    fn propose(&self, ctx: &ProposalContext, k: usize) -> Result<Extraction, OracleError>;

    fn crossover(&self, ctx: &ProposalContext, parent_a: &str, parent_b: &str) -> Result<String, OracleError>;

    fn mutate(&self, ctx: &ProposalContext, candidate: &str) -> Result<String, OracleError>;

    /// Oracle requests issued so far.
    fn calls(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Http,
    Scripted,
}

/// The proposal and distance oracles for one run. Scripted runs never
/// touch `transport`.
pub fn build_oracles(
    kind: OracleKind,
    cfg: &OracleClientConfig,
    transport: Arc<dyn Transport>,
) -> Result<(Box<dyn ProposalOracle>, DistanceOracle), OracleError> {
    match kind {
        OracleKind::Scripted => Ok((
            Box::new(ScriptedOracle::builtin()),
            DistanceOracle::new(LevenshteinComparator::new()).with_samples(cfg.samples),
        )),
        OracleKind::Http => {
            let client = Arc::new(ChatClient::from_env(cfg.clone(), transport)?);
            Ok((
                Box::new(HttpOracle::new(client.clone())),
                DistanceOracle::new(HttpComparator::new(client)).with_samples(cfg.samples),
            ))
        }
    }
}
