//! The twelve embedded game domains with authored problem instances.

use thiserror::Error;

use crate::pddl::{parse_problem, Problem};

pub const NAMES: [&str; 12] = [
    "blocksworld",
    "briefcase",
    "bulldozer",
    "casino",
    "depot",
    "ferry",
    "gripper",
    "hanoi",
    "logistics",
    "maze",
    "miconic",
    "monkey",
];

/// Blocksworld with `(clear ?ob)` dropped from pickup and unstack, so a
/// whole tower can be lifted by its bottom block.
pub const BLOCKSWORLD_MULTI_LIFT: &str = include_str!("../corpus/variants/blocksworld-multi-lift.pddl");

/// Blocksworld plus an `extract` action that pulls a block out from the
/// middle of a tower.
pub const BLOCKSWORLD_MID_EXTRACT: &str = include_str!("../corpus/variants/blocksworld-mid-extract.pddl");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Optimal(usize),
    Unsolvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusProblem {
    pub name: &'static str,
    pub text: &'static str,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub domain_text: &'static str,
    /// The first problem is the domain's flagship instance.
    pub problems: Vec<CorpusProblem>,
}

impl CorpusEntry {
    pub fn flagship(&self) -> &CorpusProblem {
        &self.problems[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown corpus domain `{0}`")]
pub struct UnknownDomain(pub String);

macro_rules! problem {
    ($file:literal, $expected:expr) => {
        CorpusProblem {
            name: $file,
            text: include_str!(concat!("../corpus/problems/", $file, ".pddl")),
            expected: $expected,
        }
    };
}

use Expected::{Optimal, Unsolvable};

pub fn domain_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "blocksworld" => include_str!("../corpus/blocksworld.pddl"),
        "briefcase" => include_str!("../corpus/briefcase.pddl"),
        "bulldozer" => include_str!("../corpus/bulldozer.pddl"),
        "casino" => include_str!("../corpus/casino.pddl"),
        "depot" => include_str!("../corpus/depot.pddl"),
        "ferry" => include_str!("../corpus/ferry.pddl"),
        "gripper" => include_str!("../corpus/gripper.pddl"),
        "hanoi" => include_str!("../corpus/hanoi.pddl"),
        "logistics" => include_str!("../corpus/logistics.pddl"),
        "maze" => include_str!("../corpus/maze.pddl"),
        "miconic" => include_str!("../corpus/miconic.pddl"),
        "monkey" => include_str!("../corpus/monkey.pddl"),
        _ => return None,
    })
}

fn problems(name: &str) -> Vec<CorpusProblem> {
    match name {
        "blocksworld" => vec![
            problem!("blocksworld-01", Optimal(6)),
            problem!("blocksworld-02", Optimal(4)),
            problem!("blocksworld-03", Optimal(4)),
        ],
        "briefcase" => vec![
            problem!("briefcase-01", Optimal(2)),
            problem!("briefcase-02", Optimal(6)),
        ],
        "bulldozer" => vec![
            problem!("bulldozer-01", Optimal(3)),
            problem!("bulldozer-02", Optimal(6)),
        ],
        "casino" => vec![problem!("casino-01", Optimal(4)), problem!("casino-02", Optimal(3))],
        "depot" => vec![problem!("depot-01", Optimal(5)), problem!("depot-02", Optimal(4))],
        "ferry" => vec![problem!("ferry-01", Optimal(3)), problem!("ferry-02", Optimal(6))],
        "gripper" => vec![
            problem!("gripper-01", Optimal(3)),
            problem!("gripper-02", Optimal(5)),
            problem!("gripper-03", Optimal(9)),
        ],
        "hanoi" => vec![
            problem!("hanoi-01", Optimal(7)),
            problem!("hanoi-02", Optimal(3)),
            problem!("hanoi-03", Unsolvable),
        ],
        "logistics" => vec![
            problem!("logistics-01", Optimal(7)),
            problem!("logistics-02", Optimal(3)),
        ],
        "maze" => vec![problem!("maze-01", Optimal(2)), problem!("maze-02", Optimal(6))],
        "miconic" => vec![problem!("miconic-01", Optimal(3)), problem!("miconic-02", Optimal(7))],
        "monkey" => vec![problem!("monkey-01", Optimal(5)), problem!("monkey-02", Optimal(5))],
        _ => Vec::new(),
    }
}

/// Returns the embedded entry for `name`.
pub fn load(name: &str) -> Result<CorpusEntry, UnknownDomain> {
    let lowered = name.to_ascii_lowercase();
    let index = NAMES
        .iter()
        .position(|n| *n == lowered)
        .ok_or_else(|| UnknownDomain(name.to_string()))?;
    let name = NAMES[index];
    Ok(CorpusEntry {
        name,
        domain_text: domain_text(name).expect("every listed name has a domain"),
        problems: problems(name),
    })
}

pub fn entries() -> impl Iterator<Item = CorpusEntry> {
    NAMES.iter().map(|n| load(n).expect("listed"))
}

/// The solvable problems of `name`, parsed, paired with their optimal length.
pub fn regression_suite(name: &str) -> Result<Vec<(Problem, usize)>, UnknownDomain> {
    let entry = load(name)?;
    Ok(entry
        .problems
        .iter()
        .filter_map(|p| match p.expected {
            Optimal(k) => Some((parse_problem(p.text).expect("corpus problems parse"), k)),
            Unsolvable => None,
        })
        .collect())
}
