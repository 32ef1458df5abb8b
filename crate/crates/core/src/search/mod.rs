//! Search over rule edits: BFS, MCTS, a genetic algorithm and beam search,
//! all scored by one objective (plan length plus compactness and distance
//! regularizers).

mod beam;
mod bfs;
mod genetic;
mod mcts;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

pub use beam::beam_search;
pub use bfs::bfs_search;
pub use genetic::genetic_search;
pub use mcts::{mcts_search, select_ucb1, ucb1};

use crate::corpus;
use crate::distance::{levenshtein, DistanceOracle};
use crate::pddl::{print_canonical, Domain, Problem};
use crate::planner::{ground_problem, solve, Plan, PlanningError, SearchLimits, SolveOutcome};
use crate::proposer::{OracleError, ProposalContext, ProposalOracle};
use crate::trajectory::{hash_hex, now_millis, text_hash, StepSink, TrajectoryError, TrajectoryStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bfs,
    Mcts,
    Genetic,
    Beam,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Bfs => "bfs",
            Algorithm::Mcts => "mcts",
            Algorithm::Genetic => "genetic",
            Algorithm::Beam => "beam",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    /// Weight of the plan length term.
    pub length: f64,
    /// Weight of the edit distance to the original rules.
    pub alpha: f64,
    /// Weight of the literal count.
    pub lambda: f64,
    pub unsolvable_penalty: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            length: 1.0,
            alpha: 0.01,
            lambda: 0.01,
            unsolvable_penalty: 1e6,
        }
    }
}

impl ObjectiveWeights {
    pub fn plan_length_only() -> Self {
        Self {
            alpha: 0.0,
            lambda: 0.0,
            ..Self::default()
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            length: self.length * k,
            alpha: self.alpha * k,
            lambda: self.lambda * k,
            unsolvable_penalty: self.unsolvable_penalty * k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub target_length: usize,
    pub beam_width: usize,
    /// Candidates kept for oracle ranking in each beam step; `None` means
    /// twice the beam width.
    pub hybrid_keep: Option<usize>,
    pub mcts_iterations: usize,
    pub mcts_exploration_c: f64,
    pub rollout_depth: usize,
    pub ga_population: usize,
    pub ga_generations: usize,
    pub ga_mutation_rate: f64,
    pub max_depth: usize,
    pub proposals_per_expansion: usize,
    pub seed: u64,
    pub weights: ObjectiveWeights,
    pub limits: SearchLimits,
    /// Evaluation worker threads.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Beam,
            target_length: 0,
            beam_width: 8,
            hybrid_keep: None,
            mcts_iterations: 32,
            mcts_exploration_c: std::f64::consts::SQRT_2,
            rollout_depth: 2,
            ga_population: 8,
            ga_generations: 5,
            ga_mutation_rate: 0.3,
            max_depth: 3,
            proposals_per_expansion: 8,
            seed: 0,
            weights: ObjectiveWeights::default(),
            limits: SearchLimits::default(),
            jobs: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        let w = &self.weights;
        if self.beam_width == 0 {
            return bad("beam width must be at least 1");
        }
        if self.mcts_exploration_c.is_nan() || self.mcts_exploration_c < 0.0 {
            return bad("exploration constant must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.ga_mutation_rate) {
            return bad("mutation rate must lie in [0, 1]");
        }
        if self.ga_population < 2 {
            return bad("population must be at least 2");
        }
        if self.mcts_iterations == 0 || self.max_depth == 0 {
            return bad("iterations and max depth must be at least 1");
        }
        if !(w.alpha >= 0.0 && w.lambda >= 0.0 && w.length > 0.0 && w.unsolvable_penalty > 0.0) {
            return bad("weights must be non-negative and the penalty positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanOutcome {
    Solved(Plan),
    Unsolvable,
    ResourceExceeded,
    GroundingExplosion,
}

impl PlanOutcome {
    pub fn length(&self) -> Option<usize> {
        match self {
            PlanOutcome::Solved(p) => Some(p.len()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub plan: PlanOutcome,
    pub regression_ok: bool,
    pub compactness: usize,
    pub lev: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditCandidate {
    /// Step id within the run; the original rules are 0.
    pub id: usize,
    pub parent: Option<usize>,
    pub oracle_round: usize,
    pub phase: String,
    pub description: String,
    pub domain: Domain,
    pub text: String,
    pub plan: PlanOutcome,
    pub regression_ok: bool,
    pub compactness: usize,
    pub lev: usize,
    pub semantic_position: Option<usize>,
    pub score: f64,
}

impl EditCandidate {
    pub fn plan_length(&self) -> Option<usize> {
        self.plan.length()
    }

    pub fn hash(&self) -> u64 {
        text_hash(&self.text)
    }

    /// Plan within `target` steps and every regression problem still solvable.
    pub fn qualifies(&self, target: usize) -> bool {
        self.regression_ok && self.plan_length().is_some_and(|l| l <= target)
    }
}

/// Lower is better. Solvable, regression-safe candidates score their
/// weighted length, compactness and distance; grounding blow-ups score
/// infinity; everything else scores the penalty.
pub fn score(plan: &PlanOutcome, regression_ok: bool, compactness: usize, lev: usize, w: &ObjectiveWeights) -> f64 {
    match plan {
        PlanOutcome::GroundingExplosion => f64::INFINITY,
        PlanOutcome::Solved(p) if regression_ok => {
            w.length * p.len() as f64 + w.lambda * compactness as f64 + w.alpha * lev as f64
        }
        _ => w.unsolvable_penalty,
    }
}

pub fn score_candidate(c: &EditCandidate, w: &ObjectiveWeights) -> f64 {
    score(&c.plan, c.regression_ok, c.compactness, c.lev, w)
}

fn plan_outcome(domain: &Domain, problem: &Problem, limits: SearchLimits) -> PlanOutcome {
    match ground_problem(domain, problem) {
        Ok(task) => match solve(&task, limits) {
            SolveOutcome::Solved(p) => PlanOutcome::Solved(p),
            SolveOutcome::Unsolvable => PlanOutcome::Unsolvable,
            SolveOutcome::ResourceExceeded => PlanOutcome::ResourceExceeded,
        },
        Err(PlanningError::Grounding(_)) => PlanOutcome::GroundingExplosion,
        Err(PlanningError::Link(_)) => PlanOutcome::Unsolvable,
    }
}

/// Scores candidate rule sets against one target problem and a regression
/// suite.
#[derive(Debug, Clone)]
pub struct Evaluator {
    original_text: String,
    problem: Problem,
    suite: Vec<Problem>,
    limits: SearchLimits,
    weights: ObjectiveWeights,
}

impl Evaluator {
    /// Suite problems the original rules cannot solve are discarded: only
    /// previously solvable problems constrain candidates.
    pub fn new(
        original: &Domain,
        problem: Problem,
        suite: Vec<Problem>,
        limits: SearchLimits,
        weights: ObjectiveWeights,
    ) -> Self {
        let suite = suite
            .into_iter()
            .filter(|p| matches!(plan_outcome(original, p, limits), PlanOutcome::Solved(_)))
            .collect();
        Self {
            original_text: print_canonical(original),
            problem,
            suite,
            limits,
            weights,
        }
    }

    pub fn suite(&self) -> &[Problem] {
        &self.suite
    }

    pub fn evaluate(&self, domain: &Domain) -> Evaluation {
        evaluate_with_text(domain, &print_canonical(domain), self)
    }
}

fn evaluate_with_text(domain: &Domain, text: &str, ev: &Evaluator) -> Evaluation {
    let plan = plan_outcome(domain, &ev.problem, ev.limits);
    let regression_ok = plan != PlanOutcome::GroundingExplosion
        && ev
            .suite
            .iter()
            .all(|p| matches!(plan_outcome(domain, p, ev.limits), PlanOutcome::Solved(_)));
    let compactness = domain.compactness();
    let lev = levenshtein(&ev.original_text, text);
    let score = score(&plan, regression_ok, compactness, lev, &ev.weights);
    Evaluation {
        plan,
        regression_ok,
        compactness,
        lev,
        score,
    }
}

/// One-shot evaluation of `domain` relative to `original`.
pub fn evaluate(
    domain: &Domain,
    original: &Domain,
    problem: &Problem,
    suite: &[Problem],
    limits: SearchLimits,
    weights: ObjectiveWeights,
) -> Evaluation {
    Evaluator::new(original, problem.clone(), suite.to_vec(), limits, weights).evaluate(domain)
}

/// Names the actions a child adds, removes or changes relative to its parent.
pub fn describe_edit(parent: &Domain, child: &Domain) -> String {
    let mut parts = Vec::new();
    let added: Vec<&str> = child
        .actions
        .iter()
        .filter(|a| parent.action(&a.name).is_none())
        .map(|a| a.name.as_str())
        .collect();
    let removed: Vec<&str> = parent
        .actions
        .iter()
        .filter(|a| child.action(&a.name).is_none())
        .map(|a| a.name.as_str())
        .collect();
    let changed: Vec<&str> = child
        .actions
        .iter()
        .filter(|a| parent.action(&a.name).is_some_and(|p| p != *a))
        .map(|a| a.name.as_str())
        .collect();
    for (label, names) in [("added", added), ("removed", removed), ("changed", changed)] {
        if !names.is_empty() {
            parts.push(format!("{label} {}", names.join(", ")));
        }
    }
    if parent.predicates != child.predicates || parent.types != child.types || parent.constants != child.constants {
        parts.push("changed declarations".into());
    }
    if parts.is_empty() {
        "no rule change".into()
    } else {
        parts.join("; ")
    }
}

/// The original rules, the problem to shorten, and the regression suite.
#[derive(Debug, Clone)]
pub struct SearchTask {
    pub original: Domain,
    pub problem: Problem,
    pub suite: Vec<Problem>,
}

impl SearchTask {
    /// Uses the corpus regression suite when the domain name matches a
    /// corpus entry, plus the target problem itself.
    pub fn new(original: Domain, problem: Problem) -> Self {
        let mut suite: Vec<Problem> = corpus::regression_suite(&original.name)
            .map(|s| s.into_iter().map(|(p, _)| p).collect())
            .unwrap_or_default();
        if !suite.contains(&problem) {
            suite.push(problem.clone());
        }
        Self {
            original,
            problem,
            suite,
        }
    }

    pub fn with_suite(original: Domain, problem: Problem, suite: Vec<Problem>) -> Self {
        Self {
            original,
            problem,
            suite,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

/// Per-algorithm bookkeeping, for inspection and tests.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchTrace {
    /// Candidates per BFS level, beam size per beam step.
    pub level_sizes: Vec<usize>,
    pub population_sizes: Vec<usize>,
    pub elite_scores: Vec<f64>,
    pub root_visits: u64,
    pub root_child_visits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: Option<EditCandidate>,
    pub success: bool,
    /// Distinct candidates evaluated, the original included.
    pub explored: usize,
    /// Proposal-oracle requests plus distance-oracle backend requests.
    pub oracle_calls: u64,
    pub trajectory_id: Option<Uuid>,
    pub candidates: Vec<EditCandidate>,
    pub trace: SearchTrace,
}

/// Runs the configured algorithm.
pub fn run_search(
    cfg: &SearchConfig,
    task: &SearchTask,
    proposer: &dyn ProposalOracle,
    distance: &DistanceOracle,
    sink: &mut dyn StepSink,
) -> Result<SearchResult, SearchError> {
    match cfg.algorithm {
        Algorithm::Bfs => bfs_search(cfg, task, proposer, sink),
        Algorithm::Mcts => mcts_search(cfg, task, proposer, sink),
        Algorithm::Genetic => genetic_search(cfg, task, proposer, sink),
        Algorithm::Beam => beam_search(cfg, task, proposer, distance, sink),
    }
}

struct Pending {
    domain: Domain,
    parent: usize,
    phase: &'static str,
}

/// State shared by every algorithm: the evaluated candidates (unique by
/// canonical text), the trajectory sink and oracle accounting.
struct Session<'a> {
    cfg: &'a SearchConfig,
    evaluator: Evaluator,
    problem: &'a Problem,
    proposer: &'a dyn ProposalOracle,
    distance: Option<&'a DistanceOracle>,
    sink: &'a mut dyn StepSink,
    candidates: Vec<EditCandidate>,
    by_text: HashMap<String, usize>,
    rounds: usize,
    proposer_start: u64,
    distance_start: u64,
    trace: SearchTrace,
}

impl<'a> Session<'a> {
    fn start(
        cfg: &'a SearchConfig,
        task: &'a SearchTask,
        proposer: &'a dyn ProposalOracle,
        distance: Option<&'a DistanceOracle>,
        sink: &'a mut dyn StepSink,
    ) -> Result<Self, SearchError> {
        cfg.validate()?;
        let evaluator = Evaluator::new(
            &task.original,
            task.problem.clone(),
            task.suite.clone(),
            cfg.limits,
            cfg.weights,
        );
        let mut session = Self {
            cfg,
            evaluator,
            problem: &task.problem,
            proposer,
            distance,
            sink,
            candidates: Vec::new(),
            by_text: HashMap::new(),
            rounds: 0,
            proposer_start: proposer.calls(),
            distance_start: distance.map_or(0, |d| d.backend_calls()),
            trace: SearchTrace::default(),
        };
        let text = print_canonical(&task.original);
        let eval = session.evaluator.evaluate(&task.original);
        session.push(task.original.clone(), text, eval, None, "root", "original rules".into())?;
        Ok(session)
    }

    fn push(
        &mut self,
        domain: Domain,
        text: String,
        eval: Evaluation,
        parent: Option<usize>,
        phase: &str,
        description: String,
    ) -> Result<usize, SearchError> {
        let id = self.candidates.len();
        let candidate = EditCandidate {
            id,
            parent,
            oracle_round: self.rounds,
            phase: phase.to_string(),
            description,
            domain,
            plan: eval.plan,
            regression_ok: eval.regression_ok,
            compactness: eval.compactness,
            lev: eval.lev,
            semantic_position: None,
            score: eval.score,
            text,
        };
        self.sink.record(TrajectoryStep {
            step_id: id as u64,
            parent_id: parent.map(|p| p as u64),
            phase: candidate.phase.clone(),
            hash: hash_hex(candidate.hash()),
            text: candidate.text.clone(),
            edit_description: candidate.description.clone(),
            plan_length: candidate.plan_length(),
            regression_ok: candidate.regression_ok,
            score: Some(candidate.score).filter(|s| s.is_finite()),
            lev: candidate.lev,
            oracle_round: candidate.oracle_round,
            timestamp: now_millis(),
        })?;
        self.by_text.insert(candidate.text.clone(), id);
        self.candidates.push(candidate);
        Ok(id)
    }

    /// Evaluates and records the batch in order. Returns each entry's
    /// candidate id and whether it was new to this run.
    fn admit(&mut self, batch: Vec<Pending>) -> Result<Vec<(usize, bool)>, SearchError> {
        let texts: Vec<String> = batch.iter().map(|p| print_canonical(&p.domain)).collect();
        let mut fresh: Vec<usize> = Vec::new();
        let mut fresh_texts: HashMap<&str, usize> = HashMap::new();
        for (i, t) in texts.iter().enumerate() {
            if !self.by_text.contains_key(t) && !fresh_texts.contains_key(t.as_str()) {
                fresh_texts.insert(t, i);
                fresh.push(i);
            }
        }
        let evals = self.evaluate_all(&batch, &texts, &fresh);
        let mut evals: HashMap<usize, Evaluation> = fresh.iter().copied().zip(evals).collect();

        let mut out = Vec::with_capacity(batch.len());
        for (i, (pending, text)) in batch.into_iter().zip(texts).enumerate() {
            if let Some(eval) = evals.remove(&i) {
                let description = describe_edit(&self.candidates[pending.parent].domain, &pending.domain);
                let id = self.push(
                    pending.domain,
                    text,
                    eval,
                    Some(pending.parent),
                    pending.phase,
                    description,
                )?;
                out.push((id, true));
            } else {
                out.push((self.by_text[&text], false));
            }
        }
        Ok(out)
    }

    fn evaluate_all(&self, batch: &[Pending], texts: &[String], fresh: &[usize]) -> Vec<Evaluation> {
        let jobs = self.cfg.jobs.max(1).min(fresh.len().max(1));
        if jobs == 1 {
            return fresh
                .iter()
                .map(|&i| evaluate_with_text(&batch[i].domain, &texts[i], &self.evaluator))
                .collect();
        }
        let mut slots: Vec<Option<Evaluation>> = vec![None; fresh.len()];
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let ev = &self.evaluator;
                    scope.spawn(move || {
                        (w..fresh.len())
                            .step_by(jobs)
                            .map(|k| (k, evaluate_with_text(&batch[fresh[k]].domain, &texts[fresh[k]], ev)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (k, e) in h.join().expect("evaluation worker panicked") {
                    slots[k] = Some(e);
                }
            }
        });
        slots.into_iter().map(|e| e.expect("every slot filled")).collect()
    }

    fn context(&self, node: usize) -> ProposalContext {
        let c = &self.candidates[node];
        let target = self.cfg.target_length;
        let mut failure = match &c.plan {
            PlanOutcome::Solved(p) if p.len() > target => {
                format!("The shortest plan has {} steps; the target is {target}.", p.len())
            }
            PlanOutcome::Solved(_) => String::new(),
            PlanOutcome::Unsolvable => "The goal cannot be reached.".into(),
            PlanOutcome::ResourceExceeded => "The planner ran out of budget.".into(),
            PlanOutcome::GroundingExplosion => "Grounding produced too many actions.".into(),
        };
        if !c.regression_ok {
            failure.push_str(" Some previously solvable problems became unsolvable.");
        }
        let mut history = Vec::new();
        let mut at = c.parent.map(|_| node);
        while let Some(i) = at {
            let cand = &self.candidates[i];
            if cand.parent.is_some() {
                history.push(cand.description.clone());
            }
            at = cand.parent;
        }
        history.reverse();
        ProposalContext {
            domain: c.domain.clone(),
            problem: self.problem.clone(),
            baseline_length: c.plan_length(),
            target_length: target,
            failure_summary: failure.trim().to_string(),
            history,
        }
    }

    /// One proposal round for `node`. A script without a matching entry
    /// yields no proposals.
    fn propose(&mut self, node: usize, k: usize) -> Result<Vec<Domain>, SearchError> {
        let ctx = self.context(node);
        self.rounds += 1;
        match self.proposer.propose(&ctx, k) {
            Ok(ex) => Ok(ex.candidates),
            Err(OracleError::NoScriptMatch(_)) => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Proposals for `node`, evaluated and recorded.
    fn expand(&mut self, node: usize, k: usize, phase: &'static str) -> Result<Vec<(usize, bool)>, SearchError> {
        let proposals = self.propose(node, k)?;
        self.admit(
            proposals
                .into_iter()
                .map(|domain| Pending {
                    domain,
                    parent: node,
                    phase,
                })
                .collect(),
        )
    }

    fn qualifies(&self, id: usize) -> bool {
        self.candidates[id].qualifies(self.cfg.target_length)
    }

    fn key(&self, id: usize) -> (f64, &str) {
        (self.candidates[id].score, self.candidates[id].text.as_str())
    }

    /// Total order on candidates: score, then canonical text.
    fn better(&self, a: usize, b: usize) -> bool {
        let (sa, ta) = self.key(a);
        let (sb, tb) = self.key(b);
        sa.total_cmp(&sb).then_with(|| ta.cmp(tb)).is_lt()
    }

    fn oracle_calls(&self) -> u64 {
        let proposals = self.proposer.calls() - self.proposer_start;
        let distance = self.distance.map_or(0, |d| d.backend_calls() - self.distance_start);
        proposals + distance
    }

    /// `chosen` overrides the default pick (best qualifying, else best).
    fn finish(self, chosen: Option<usize>) -> SearchResult {
        let pick = |filter: &dyn Fn(usize) -> bool| {
            (0..self.candidates.len())
                .filter(|&i| filter(i))
                .reduce(|a, b| if self.better(b, a) { b } else { a })
        };
        let best = chosen
            .or_else(|| pick(&|i| self.qualifies(i)))
            .or_else(|| pick(&|_| true));
        let success = best.is_some_and(|b| self.qualifies(b));
        SearchResult {
            best: best.map(|b| self.candidates[b].clone()),
            success,
            explored: self.candidates.len(),
            oracle_calls: self.oracle_calls(),
            trajectory_id: None,
            candidates: self.candidates,
            trace: self.trace,
        }
    }
}
