use std::sync::atomic::{AtomicU64, Ordering};

use super::extract::{validate_candidate, Extraction};
use super::{OracleError, ProposalContext, ProposalOracle};
use crate::corpus::{BLOCKSWORLD_MID_EXTRACT, BLOCKSWORLD_MULTI_LIFT};
use crate::pddl::{parse_domain, print_canonical};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    DomainName(String),
    /// Matches when the context's domain prints to this canonical text.
    CanonicalText(String),
    Always,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptEntry {
    pub trigger: Trigger,
    pub responses: Vec<String>,
}

impl ScriptEntry {
    pub fn new(trigger: Trigger, responses: Vec<String>) -> Self {
        let trigger = match trigger {
            Trigger::CanonicalText(t) => Trigger::CanonicalText(canonical(&t)),
            Trigger::DomainName(n) => Trigger::DomainName(n.to_ascii_lowercase()),
            t => t,
        };
        Self { trigger, responses }
    }
}

fn canonical(text: &str) -> String {
    parse_domain(text).map_or_else(|_| text.to_string(), |d| print_canonical(&d))
}

/// Offline oracle replaying fixed responses. The first entry whose trigger
/// matches the context answers.
pub struct ScriptedOracle {
    entries: Vec<ScriptEntry>,
    calls: AtomicU64,
}

impl ScriptedOracle {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        Self {
            entries,
            calls: AtomicU64::new(0),
        }
    }

    /// Answers blocksworld with the multi-lift and mid-extract variants.
    pub fn builtin() -> Self {
        Self::new(vec![ScriptEntry::new(
            Trigger::DomainName("blocksworld".into()),
            vec![BLOCKSWORLD_MULTI_LIFT.to_string(), BLOCKSWORLD_MID_EXTRACT.to_string()],
        )])
    }

    fn matching(&self, ctx: &ProposalContext) -> Option<&ScriptEntry> {
        let mut text = None;
        self.entries.iter().find(|e| match &e.trigger {
            Trigger::Always => true,
            Trigger::DomainName(n) => *n == ctx.domain.name,
            Trigger::CanonicalText(t) => t == text.get_or_insert_with(|| print_canonical(&ctx.domain)),
        })
    }
}

impl ProposalOracle for ScriptedOracle {
    fn propose(&self, ctx: &ProposalContext, k: usize) -> Result<Extraction, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let entry = self
            .matching(ctx)
            .ok_or_else(|| OracleError::NoScriptMatch(ctx.domain.name.clone()))?;
        let mut out = Extraction::default();
        let mut seen = std::collections::HashSet::new();
        for (block, text) in entry.responses.iter().enumerate() {
            if out.candidates.len() == k {
                break;
            }
            match validate_candidate(text, Some(&ctx.problem)) {
                Ok(d) if seen.insert(print_canonical(&d)) => out.candidates.push(d),
                Ok(_) => out.dropped.push(super::Dropped {
                    block,
                    reason: super::DropReason::Duplicate,
                }),
                Err(reason) => out.dropped.push(super::Dropped { block, reason }),
            }
        }
        Ok(out)
    }

    fn crossover(&self, _: &ProposalContext, parent_a: &str, _: &str) -> Result<String, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(parent_a.to_string())
    }

    /// The first response of a canonical-text entry matching `candidate`,
    /// otherwise `candidate` unchanged.
    fn mutate(&self, _: &ProposalContext, candidate: &str) -> Result<String, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let key = canonical(candidate);
        Ok(self
            .entries
            .iter()
            .find_map(|e| match &e.trigger {
                Trigger::CanonicalText(t) if *t == key => e.responses.first().cloned(),
                _ => None,
            })
            .unwrap_or_else(|| candidate.to_string()))
    }

    fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}
