use std::collections::HashSet;

use crate::pddl::{link, parse_domain, print_canonical, Diagnostic, Domain, LinkError, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropReason {
    Parse(Vec<Diagnostic>),
    Link(Vec<LinkError>),
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dropped {
    /// Position of the block in the response, counting from zero.
    pub block: usize,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub candidates: Vec<Domain>,
    pub dropped: Vec<Dropped>,
}

impl Extraction {
    pub fn canonical_texts(&self) -> Vec<String> {
        self.candidates.iter().map(print_canonical).collect()
    }
}

/// Contents of every ``` fenced block, in order. An unterminated final
/// fence is ignored.
pub fn fenced_blocks(raw: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut rest = raw;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        // the info string runs to the end of the opening line
        let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let body = &after[body_start..];
        let Some(close) = body.find("```") else {
            break;
        };
        blocks.push(&body[..close]);
        rest = &body[close + 3..];
    }
    blocks
}

/// Parses a candidate and, when a problem is given, links it against it.
pub fn validate_candidate(text: &str, problem: Option<&Problem>) -> Result<Domain, DropReason> {
    let domain = parse_domain(text).map_err(DropReason::Parse)?;
    if let Some(p) = problem {
        link(&domain, p).map_err(DropReason::Link)?;
    }
    Ok(domain)
}

/// Extracts at most `k` valid, distinct domains from a free-text response.
pub fn extract_candidates(raw: &str, k: usize, problem: Option<&Problem>) -> Extraction {
    let mut out = Extraction::default();
    let mut seen = HashSet::new();
    for (block, text) in fenced_blocks(raw).into_iter().enumerate() {
        if out.candidates.len() == k {
            break;
        }
        match validate_candidate(text, problem) {
            Ok(domain) => {
                if seen.insert(print_canonical(&domain)) {
                    out.candidates.push(domain);
                } else {
                    out.dropped.push(Dropped {
                        block,
                        reason: DropReason::Duplicate,
                    });
                }
            }
            Err(reason) => out.dropped.push(Dropped { block, reason }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::pddl::{parse_problem, DiagnosticKind};

    fn fence(text: &str) -> String {
        format!("```pddl\n{text}\n```\n")
    }

    #[test]
    fn two_valid_one_malformed() {
        let raw = format!(
            "Here you go.\n{}Some words.\n{}{}",
            fence(corpus::domain_text("gripper").unwrap()),
            fence("(define (domain broken) (:action"),
            fence(corpus::domain_text("hanoi").unwrap()),
        );
        let ex = extract_candidates(&raw, 10, None);
        assert_eq!(ex.candidates.len(), 2);
        assert_eq!(ex.dropped.len(), 1);
        assert_eq!(ex.dropped[0].block, 1);
        assert_eq!(ex.candidates[0].name, "gripper");
    }

    #[test]
    fn garbage_and_empty_input() {
        assert!(extract_candidates("", 3, None).candidates.is_empty());
        assert!(extract_candidates("no fences at all (define", 3, None)
            .candidates
            .is_empty());
        assert!(extract_candidates("```\nunterminated", 3, None).candidates.is_empty());
        assert!(extract_candidates("``````", 3, None).candidates.is_empty());
    }

    #[test]
    fn undeclared_predicate_is_recorded() {
        let raw = fence(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x) :precondition (q ?x) :effect (p ?x)))",
        );
        let ex = extract_candidates(&raw, 3, None);
        let DropReason::Parse(diags) = &ex.dropped[0].reason else {
            panic!("expected parse failure");
        };
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::UndeclaredPredicate("q".into())));
    }

    #[test]
    fn link_failures_and_duplicates_are_dropped() {
        let entry = corpus::load("blocksworld").unwrap();
        let problem = parse_problem(entry.flagship().text).unwrap();
        let raw = format!(
            "{}{}{}",
            fence(entry.domain_text),
            fence(entry.domain_text),
            fence(corpus::domain_text("hanoi").unwrap())
        );
        let ex = extract_candidates(&raw, 10, Some(&problem));
        assert_eq!(ex.candidates.len(), 1);
        assert_eq!(ex.dropped[0].reason, DropReason::Duplicate);
        assert!(matches!(ex.dropped[1].reason, DropReason::Link(_)));
    }

    #[test]
    fn k_caps_the_result() {
        let raw = format!(
            "{}{}",
            fence(corpus::domain_text("gripper").unwrap()),
            fence(corpus::domain_text("hanoi").unwrap())
        );
        assert_eq!(extract_candidates(&raw, 1, None).candidates.len(), 1);
    }
}
