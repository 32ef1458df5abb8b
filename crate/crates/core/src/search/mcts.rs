use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EditCandidate, SearchConfig, SearchError, SearchResult, SearchTask, Session};
use crate::proposer::ProposalOracle;
use crate::trajectory::StepSink;

/// Upper confidence bound; unvisited nodes score +infinity.
pub fn ucb1(mean_reward: f64, visits: u64, parent_visits: u64, c: f64) -> f64 {
    if visits == 0 {
        return f64::INFINITY;
    }
    mean_reward + c * ((parent_visits as f64).ln() / visits as f64).sqrt()
}

/// Index of the child maximizing [`ucb1`]; ties go to the lowest index.
pub fn select_ucb1(children: &[(f64, u64)], parent_visits: u64, c: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &(mean, visits)) in children.iter().enumerate() {
        let value = ucb1(mean, visits, parent_visits, c);
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((i, value));
        }
    }
    best.map(|(i, _)| i)
}

struct Node {
    candidate: usize,
    children: Vec<usize>,
    visits: u64,
    total_reward: f64,
    expanded: bool,
    depth: usize,
}

impl Node {
    fn new(candidate: usize, depth: usize) -> Self {
        Self {
            candidate,
            children: Vec::new(),
            visits: 0,
            total_reward: 0.0,
            expanded: false,
            depth,
        }
    }

    fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total_reward / self.visits as f64
        }
    }
}

/// Relative plan-length improvement over the original, in `[0, 1]`.
fn reward(c: &EditCandidate, baseline: Option<usize>) -> f64 {
    if !c.regression_ok {
        return 0.0;
    }
    match (c.plan_length(), baseline) {
        (Some(len), Some(base)) if base > 0 => ((base as f64 - len as f64) / base as f64).clamp(0.0, 1.0),
        (Some(_), None) => 1.0,
        _ => 0.0,
    }
}

/// Runs every iteration: UCB1 selection, one proposal round to expand,
/// a random proposal chain as rollout, and backpropagation of the best
/// reward seen along the rollout.
pub fn mcts_search(
    cfg: &SearchConfig,
    task: &SearchTask,
    proposer: &dyn ProposalOracle,
    sink: &mut dyn StepSink,
) -> Result<SearchResult, SearchError> {
    let mut s = Session::start(cfg, task, proposer, None, sink)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let baseline = s.candidates[0].plan_length();
    let mut tree = vec![Node::new(0, 0)];

    for _ in 0..cfg.mcts_iterations {
        let mut path = vec![0];
        let mut at = 0;
        while tree[at].expanded && !tree[at].children.is_empty() {
            let stats: Vec<(f64, u64)> = tree[at]
                .children
                .iter()
                .map(|&c| (tree[c].mean(), tree[c].visits))
                .collect();
            let pick = select_ucb1(&stats, tree[at].visits, cfg.mcts_exploration_c).expect("non-empty");
            at = tree[at].children[pick];
            path.push(at);
        }

        if !tree[at].expanded && tree[at].depth < cfg.max_depth {
            tree[at].expanded = true;
            let on_path: HashSet<usize> = path.iter().map(|&n| tree[n].candidate).collect();
            let mut seen = HashSet::new();
            for (id, _) in s.expand(tree[at].candidate, cfg.proposals_per_expansion, "mcts-expand")? {
                if !on_path.contains(&id) && seen.insert(id) {
                    let child = tree.len();
                    tree.push(Node::new(id, tree[at].depth + 1));
                    tree[at].children.push(child);
                }
            }
            if let Some(&first) = tree[at].children.first() {
                at = first;
                path.push(at);
            }
        }

        let mut current = tree[at].candidate;
        let mut value = reward(&s.candidates[current], baseline);
        for _ in 0..cfg.rollout_depth {
            let admitted = s.expand(current, cfg.proposals_per_expansion, "mcts-rollout")?;
            if admitted.is_empty() {
                break;
            }
            current = admitted[rng.random_range(0..admitted.len())].0;
            value = value.max(reward(&s.candidates[current], baseline));
        }

        for &n in &path {
            tree[n].visits += 1;
            tree[n].total_reward += value;
        }
    }

    s.trace.root_visits = tree[0].visits;
    s.trace.root_child_visits = tree[0].children.iter().map(|&c| tree[c].visits).collect();
    Ok(s.finish(None))
}
