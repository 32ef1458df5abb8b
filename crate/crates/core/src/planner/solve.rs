use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ground::{GroundAction, GroundedTask};
use super::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_expanded_states: usize,
    pub max_plan_length: usize,
    pub budget_ms: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_expanded_states: 1_000_000,
            max_plan_length: 100,
            budget_ms: 10_000,
        }
    }
}

/// A sequence of ground actions, by index into the grounded task, with
/// their printable labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<usize>,
    pub labels: Vec<String>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn from_steps(task: &GroundedTask, steps: Vec<usize>) -> Self {
        let labels = steps.iter().map(|&s| task.actions[s].label()).collect();
        Self { steps, labels }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Solved(Plan),
    Unsolvable,
    ResourceExceeded,
}

impl SolveOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SolveOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("precondition of `{action}` does not hold")]
pub struct PreconditionViolated {
    pub action: String,
}

/// Successor of `state` under `action`. Unconditional deletes then adds are
/// applied first; each conditional effect whose condition held in `state`
/// then applies its deletes followed by its adds.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, PreconditionViolated> {
    if !action.precondition.holds(state) {
        return Err(PreconditionViolated { action: action.label() });
    }
    Ok(apply_unchecked(state, action))
}

pub(crate) fn apply_unchecked(state: &State, action: &GroundAction) -> State {
    let triggered: Vec<bool> = action.conditional.iter().map(|c| c.condition.holds(state)).collect();
    let fired = || {
        action
            .conditional
            .iter()
            .zip(&triggered)
            .filter(|(_, &t)| t)
            .map(|(c, _)| c)
    };
    let mut next = state.clone();
    for &d in action.delete.iter().chain(fired().flat_map(|c| &c.delete)) {
        next.remove(d);
    }
    for &a in action.add.iter().chain(fired().flat_map(|c| &c.add)) {
        next.insert(a);
    }
    next
}

struct Node {
    state: State,
    parent: usize,
    action: usize,
    depth: usize,
}

/// Breadth-first search with duplicate detection. Returned plans are
/// step-optimal. Successors are generated in ground-action order, so the
/// result is deterministic.
pub fn solve(task: &GroundedTask, limits: SearchLimits) -> SolveOutcome {
    if task.goal.holds(&task.init) {
        return SolveOutcome::Solved(Plan {
            steps: Vec::new(),
            labels: Vec::new(),
        });
    }
    let started = Instant::now();
    let budget = Duration::from_millis(limits.budget_ms);

    let mut seen: HashSet<State> = HashSet::new();
    seen.insert(task.init.clone());
    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: usize::MAX,
        action: usize::MAX,
        depth: 0,
    }];
    let mut head = 0;
    let mut expanded = 0usize;
    let mut truncated = false;

    while head < nodes.len() {
        let current = head;
        head += 1;
        if nodes[current].depth >= limits.max_plan_length {
            truncated = true;
            continue;
        }
        if expanded >= limits.max_expanded_states {
            return SolveOutcome::ResourceExceeded;
        }
        if expanded.is_multiple_of(1024) && started.elapsed() > budget {
            return SolveOutcome::ResourceExceeded;
        }
        expanded += 1;

        for (i, action) in task.actions.iter().enumerate() {
            if !action.precondition.holds(&nodes[current].state) {
                continue;
            }
            let next = apply_unchecked(&nodes[current].state, action);
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            let reached = task.goal.holds(&next);
            nodes.push(Node {
                state: next,
                parent: current,
                action: i,
                depth: nodes[current].depth + 1,
            });
            if reached {
                return SolveOutcome::Solved(reconstruct(task, &nodes, nodes.len() - 1));
            }
        }
    }

    if truncated {
        SolveOutcome::ResourceExceeded
    } else {
        SolveOutcome::Unsolvable
    }
}

fn reconstruct(task: &GroundedTask, nodes: &[Node], mut at: usize) -> Plan {
    let mut steps = Vec::new();
    while nodes[at].parent != usize::MAX {
        steps.push(nodes[at].action);
        at = nodes[at].parent;
    }
    steps.reverse();
    Plan::from_steps(task, steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlanCheck {
    pub valid: bool,
    /// Index of the first step whose precondition fails, or the plan
    /// length when every step applies but the goal does not hold.
    pub failure_index: Option<usize>,
}

pub fn validate_plan(task: &GroundedTask, plan: &Plan) -> PlanCheck {
    let mut state = task.init.clone();
    for (i, &step) in plan.steps.iter().enumerate() {
        let Some(action) = task.actions.get(step) else {
            return PlanCheck {
                valid: false,
                failure_index: Some(i),
            };
        };
        match apply(&state, action) {
            Ok(next) => state = next,
            Err(_) => {
                return PlanCheck {
                    valid: false,
                    failure_index: Some(i),
                }
            }
        }
    }
    if task.goal.holds(&state) {
        PlanCheck {
            valid: true,
            failure_index: None,
        }
    } else {
        PlanCheck {
            valid: false,
            failure_index: Some(plan.len()),
        }
    }
}
