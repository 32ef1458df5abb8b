//! Command-line front end. Exit codes: 0 success, 1 domain or logic
//! failure, 2 usage error, 3 external failure (oracle, IO).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use uuid::Uuid;

use crate::corpus;
use crate::distance::{hybrid_rank, lev_rank, levenshtein, semantic_rank, DistanceOracle, LevenshteinComparator};
use crate::pddl::{parse_domain, parse_problem, print_canonical, render_diagnostics, Domain, Problem};
use crate::planner::{ground_problem, solve, validate_plan, Plan, PlanningError, SearchLimits, SolveOutcome};
use crate::proposer::{
    build_oracles, ChatClient, HttpComparator, OracleClientConfig, OracleKind, Transport, UreqTransport,
};
use crate::search::{run_search, Algorithm, ObjectiveWeights, SearchConfig, SearchError, SearchTask};
use crate::trajectory::{
    export, hash_hex, text_hash, ExportFormat, MemorySink, RunSummary, StepSink, TrajectoryHeader, TrajectoryWriter,
    ENGINE_VERSION,
};

pub const BASE_URL_ENV: &str = "AXIOMFORGE_BASE_URL";
pub const MODEL_ENV: &str = "AXIOMFORGE_MODEL";

#[derive(Parser, Debug)]
#[command(name = "axiomforge", version, about = "Evolve PDDL game rules toward shorter plans")]
struct Cli {
    /// Print a JSON object as the final line.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a domain and print its canonical form.
    Parse { domain: String },
    /// Find a shortest plan.
    Plan {
        domain: String,
        problem: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Check a plan file, one ground action per line.
    Validate {
        domain: String,
        problem: String,
        plan: PathBuf,
    },
    /// Search for rule edits that reach the goal within the target length.
    Evolve(Box<EvolveArgs>),
    /// Order candidate domains by closeness to a reference domain.
    Rank {
        reference: String,
        #[arg(required = true)]
        candidates: Vec<String>,
        #[arg(long, value_enum, default_value_t = Metric::Lev)]
        metric: Metric,
        /// Candidates kept for oracle ranking under the hybrid metric.
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long, value_enum, default_value_t = OracleKind::Scripted)]
        oracle: OracleKind,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Inspect the embedded corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Merge trajectory files into a dataset.
    Export {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    /// List domains and their problems.
    List,
    /// Write a domain, its problems and variants to a directory.
    Dump {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Metric {
    Lev,
    Semantic,
    Hybrid,
}

#[derive(Args, Debug, Clone, Copy)]
struct LimitArgs {
    #[arg(long, default_value_t = SearchLimits::default().max_expanded_states)]
    max_states: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_plan_length)]
    max_len: usize,
    #[arg(long, default_value_t = SearchLimits::default().budget_ms)]
    budget_ms: u64,
}

impl From<LimitArgs> for SearchLimits {
    fn from(a: LimitArgs) -> Self {
        SearchLimits {
            max_expanded_states: a.max_states,
            max_plan_length: a.max_len,
            budget_ms: a.budget_ms,
        }
    }
}

#[derive(Args, Debug)]
struct EvolveArgs {
    domain: String,
    problem: String,
    #[arg(long, value_enum)]
    algo: Algorithm,
    #[arg(long)]
    target_len: usize,
    #[arg(long, default_value_t = 8)]
    beam_width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OracleKind::Scripted)]
    oracle: OracleKind,
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 8)]
    proposals: usize,
    /// Oracle-ranked pool size per beam step; defaults to twice the width.
    #[arg(long)]
    keep: Option<usize>,
    #[arg(long, default_value_t = 32)]
    iterations: usize,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    exploration: f64,
    #[arg(long, default_value_t = 2)]
    rollout_depth: usize,
    #[arg(long, default_value_t = 8)]
    population: usize,
    #[arg(long, default_value_t = 5)]
    generations: usize,
    #[arg(long, default_value_t = 0.3)]
    mutation_rate: f64,
    /// Extra regression problems; corpus problems are added automatically.
    #[arg(long)]
    regression: Vec<String>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    #[command(flatten)]
    limits: LimitArgs,
}

/// Failure carrying its exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn logic(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn external(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Parse { domain } => cmd_parse(&domain, cli.json, out),
        Command::Plan {
            domain,
            problem,
            limits,
        } => cmd_plan(&domain, &problem, limits.into(), cli.json, out),
        Command::Validate { domain, problem, plan } => cmd_validate(&domain, &problem, &plan, cli.json, out),
        Command::Evolve(args) => cmd_evolve(&args, cli.json, out),
        Command::Rank {
            reference,
            candidates,
            metric,
            keep,
            oracle,
            samples,
        } => cmd_rank(&reference, &candidates, metric, keep, oracle, samples, cli.json, out),
        Command::Corpus { action } => cmd_corpus(action, cli.json, out),
        Command::Export {
            runs,
            format,
            out: path,
        } => cmd_export(&runs, format, &path, cli.json, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{line}").map_err(|e| Failure::external(e.to_string()))
}

/// Reads a file, or a corpus entry written `corpus:NAME` (domain) or
/// `corpus:NAME[/PROBLEM]` (problem; the flagship when PROBLEM is omitted).
fn read_source(source: &str, want_problem: bool) -> Result<String, Failure> {
    if let Some(rest) = source.strip_prefix("corpus:") {
        let (name, problem) = match rest.split_once('/') {
            Some((n, p)) => (n, Some(p)),
            None => (rest, None),
        };
        let entry = corpus::load(name).map_err(|e| Failure::usage(e.to_string()))?;
        if !want_problem {
            return Ok(entry.domain_text.to_string());
        }
        let p = match problem {
            None => entry.flagship(),
            Some(p) => entry
                .problems
                .iter()
                .find(|c| c.name == p)
                .ok_or_else(|| Failure::usage(format!("no corpus problem `{p}` in {}", entry.name)))?,
        };
        return Ok(p.text.to_string());
    }
    std::fs::read_to_string(source).map_err(|e| Failure::external(format!("{source}: {e}")))
}

fn load_domain(source: &str) -> Result<(Domain, String), Failure> {
    let text = read_source(source, false)?;
    parse_domain(&text)
        .map(|d| (d, text.clone()))
        .map_err(|d| Failure::logic(format!("{source}:\n{}", render_diagnostics(&d))))
}

fn load_problem(source: &str) -> Result<(Problem, String), Failure> {
    let text = read_source(source, true)?;
    parse_problem(&text)
        .map(|p| (p, text.clone()))
        .map_err(|d| Failure::logic(format!("{source}:\n{}", render_diagnostics(&d))))
}

fn cmd_parse(source: &str, as_json: bool, out: &mut dyn Write) -> Outcome {
    let text = read_source(source, false)?;
    match parse_domain(&text) {
        Ok(d) => {
            let canonical = print_canonical(&d);
            write!(out, "{canonical}").map_err(|e| Failure::external(e.to_string()))?;
            if as_json {
                emit(
                    out,
                    json!({"ok": true, "domain": d.name, "hash": hash_hex(text_hash(&canonical))}),
                )?;
            }
            Ok(0)
        }
        Err(diags) => {
            emit(out, render_diagnostics(&diags).trim_end())?;
            if as_json {
                let list: Vec<String> = diags.iter().map(ToString::to_string).collect();
                emit(out, json!({"ok": false, "diagnostics": list}))?;
            }
            Ok(1)
        }
    }
}

fn cmd_plan(domain: &str, problem: &str, limits: SearchLimits, as_json: bool, out: &mut dyn Write) -> Outcome {
    let (d, _) = load_domain(domain)?;
    let (p, _) = load_problem(problem)?;
    let status = match ground_problem(&d, &p) {
        Err(PlanningError::Link(errors)) => {
            let msg: Vec<String> = errors.iter().map(ToString::to_string).collect();
            return Err(Failure::logic(msg.join("\n")));
        }
        Err(PlanningError::Grounding(e)) => {
            emit(out, "grounding-explosion")?;
            if as_json {
                emit(out, json!({"outcome": "grounding-explosion", "detail": e.to_string()}))?;
            }
            return Ok(1);
        }
        Ok(task) => solve(&task, limits),
    };
    match status {
        SolveOutcome::Solved(plan) => {
            for label in &plan.labels {
                emit(out, label)?;
            }
            emit(out, format!("length: {}", plan.len()))?;
            if as_json {
                emit(
                    out,
                    json!({"outcome": "solved", "length": plan.len(), "plan": plan.labels}),
                )?;
            }
            Ok(0)
        }
        SolveOutcome::Unsolvable => {
            emit(out, "unsolvable")?;
            if as_json {
                emit(out, json!({"outcome": "unsolvable"}))?;
            }
            Ok(1)
        }
        SolveOutcome::ResourceExceeded => {
            emit(out, "resource-exceeded")?;
            if as_json {
                emit(out, json!({"outcome": "resource-exceeded"}))?;
            }
            Ok(1)
        }
    }
}

fn cmd_validate(domain: &str, problem: &str, plan_path: &Path, as_json: bool, out: &mut dyn Write) -> Outcome {
    let (d, _) = load_domain(domain)?;
    let (p, _) = load_problem(problem)?;
    let task = ground_problem(&d, &p).map_err(|e| Failure::logic(e.to_string()))?;
    let text =
        std::fs::read_to_string(plan_path).map_err(|e| Failure::external(format!("{}: {e}", plan_path.display())))?;
    let mut steps = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with(';') || line.starts_with("length:") {
            continue;
        }
        match task.find_action(line) {
            Some(i) => steps.push(i),
            None => {
                emit(out, format!("invalid at step {}: unknown action {line}", steps.len()))?;
                if as_json {
                    emit(out, json!({"valid": false, "failure_index": steps.len()}))?;
                }
                return Ok(1);
            }
        }
    }
    let plan = Plan::from_steps(&task, steps);
    let check = validate_plan(&task, &plan);
    match check.failure_index {
        None => emit(out, format!("valid, length: {}", plan.len()))?,
        Some(i) if i == plan.len() => emit(out, "invalid: goal not reached")?,
        Some(i) => emit(out, format!("invalid at step {i}: {}", plan.labels[i]))?,
    }
    if as_json {
        emit(
            out,
            json!({"valid": check.valid, "failure_index": check.failure_index, "length": plan.len()}),
        )?;
    }
    Ok(if check.valid { 0 } else { 1 })
}

fn client_config(samples: usize, max_retries: u32, timeout_ms: u64) -> OracleClientConfig {
    let mut cfg = OracleClientConfig {
        samples: samples.max(1),
        max_retries,
        timeout_ms,
        ..OracleClientConfig::default()
    };
    if let Ok(url) = std::env::var(BASE_URL_ENV) {
        if !url.is_empty() {
            cfg.base_url = url;
        }
    }
    if let Ok(model) = std::env::var(MODEL_ENV) {
        if !model.is_empty() {
            cfg.model = model;
        }
    }
    cfg
}

fn cmd_evolve(a: &EvolveArgs, as_json: bool, out: &mut dyn Write) -> Outcome {
    let (original, _) = load_domain(&a.domain)?;
    let (problem, problem_text) = load_problem(&a.problem)?;
    let mut task = SearchTask::new(original.clone(), problem);
    for source in &a.regression {
        task.suite.push(load_problem(source)?.0);
    }

    let cfg = SearchConfig {
        algorithm: a.algo,
        target_length: a.target_len,
        beam_width: a.beam_width,
        hybrid_keep: a.keep,
        mcts_iterations: a.iterations,
        mcts_exploration_c: a.exploration,
        rollout_depth: a.rollout_depth,
        ga_population: a.population,
        ga_generations: a.generations,
        ga_mutation_rate: a.mutation_rate,
        max_depth: a.max_depth,
        proposals_per_expansion: a.proposals,
        seed: a.seed,
        weights: ObjectiveWeights {
            alpha: a.alpha,
            lambda: a.lambda,
            ..ObjectiveWeights::default()
        },
        limits: a.limits.into(),
        jobs: a.jobs,
    };
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let transport = Arc::new(UreqTransport::new());
    let client_cfg = client_config(a.samples, a.max_retries, a.timeout_ms);
    let (proposer, distance) =
        build_oracles(a.oracle, &client_cfg, transport.clone()).map_err(|e| Failure::external(e.to_string()))?;

    let header = TrajectoryHeader {
        run_id: Uuid::new_v4(),
        config: cfg.clone(),
        original_domain_text: print_canonical(&original),
        problem_text,
        corpus_domain_name: corpus::load(&original.name).ok().map(|e| e.name.to_string()),
        seed: cfg.seed,
        engine_version: ENGINE_VERSION.to_string(),
    };
    let mut writer = match &a.trajectory {
        Some(path) => Some(TrajectoryWriter::create(path, &header).map_err(|e| Failure::external(e.to_string()))?),
        None => None,
    };
    let mut memory = MemorySink::default();
    let sink: &mut dyn StepSink = match writer.as_mut() {
        Some(w) => w,
        None => &mut memory,
    };

    let mut result = match run_search(&cfg, &task, proposer.as_ref(), &distance, sink) {
        Ok(r) => r,
        Err(SearchError::InvalidConfig(m)) => return Err(Failure::usage(m)),
        Err(e) => return Err(Failure::external(e.to_string())),
    };
    result.trajectory_id = Some(header.run_id);
    let best = result.best.as_ref();
    let summary = RunSummary {
        success: result.success,
        best_step_id: best.map(|b| b.id as u64),
        best_length: best.and_then(|b| b.plan_length()),
        explored: result.explored,
        oracle_calls: result.oracle_calls,
    };
    if let Some(w) = writer {
        w.finish(&summary).map_err(|e| Failure::external(e.to_string()))?;
    }

    let length = summary.best_length.map_or("none".to_string(), |l| l.to_string());
    emit(out, format!("algorithm: {}", cfg.algorithm))?;
    emit(out, format!("success: {}", result.success))?;
    emit(out, format!("best-length: {length}"))?;
    if let Some(b) = best {
        emit(out, format!("best-step: {}", b.id))?;
        emit(out, format!("best-edit: {}", b.description))?;
        emit(out, format!("best-hash: {}", hash_hex(b.hash())))?;
        emit(out, format!("regression-ok: {}", b.regression_ok))?;
    }
    emit(out, format!("explored: {}", result.explored))?;
    emit(out, format!("oracle-calls: {}", result.oracle_calls))?;
    emit(out, format!("network-requests: {}", transport.requests()))?;
    if let Some(path) = &a.trajectory {
        emit(out, format!("trajectory: {}", path.display()))?;
    }
    if as_json {
        emit(
            out,
            json!({
                "algorithm": cfg.algorithm.to_string(),
                "success": result.success,
                "best_length": summary.best_length,
                "best_step": summary.best_step_id,
                "best_hash": best.map(|b| hash_hex(b.hash())),
                "regression_ok": best.map(|b| b.regression_ok),
                "explored": result.explored,
                "oracle_calls": result.oracle_calls,
                "network_requests": transport.requests(),
            }),
        )?;
    }
    Ok(if result.success { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_rank(
    reference: &str,
    candidates: &[String],
    metric: Metric,
    keep: Option<usize>,
    oracle: OracleKind,
    samples: usize,
    as_json: bool,
    out: &mut dyn Write,
) -> Outcome {
    let canonical = |source: &str| -> Result<String, Failure> {
        let text = read_source(source, false)?;
        Ok(parse_domain(&text).map_or(text, |d| print_canonical(&d)))
    };
    let reference_text = canonical(reference)?;
    let texts: Vec<String> = candidates.iter().map(|c| canonical(c)).collect::<Result<_, _>>()?;

    let distance = || -> Result<DistanceOracle, Failure> {
        Ok(match oracle {
            OracleKind::Scripted => DistanceOracle::new(LevenshteinComparator::new()),
            OracleKind::Http => {
                let transport: Arc<dyn Transport> = Arc::new(UreqTransport::new());
                let client = ChatClient::from_env(client_config(samples, 3, 60_000), transport)
                    .map_err(|e| Failure::external(e.to_string()))?;
                DistanceOracle::new(HttpComparator::new(Arc::new(client)))
            }
        }
        .with_samples(samples))
    };
    let ranked = match metric {
        Metric::Lev => Ok(lev_rank(&reference_text, &texts)),
        Metric::Semantic => semantic_rank(&reference_text, &texts, &distance()?),
        Metric::Hybrid => hybrid_rank(&reference_text, &texts, keep.unwrap_or(texts.len()), &distance()?),
    }
    .map_err(|e| Failure::external(e.to_string()))?;

    for (pos, &i) in ranked.order.iter().enumerate() {
        emit(
            out,
            format!(
                "{}. {} (lev {})",
                pos + 1,
                candidates[i],
                levenshtein(&reference_text, &texts[i])
            ),
        )?;
    }
    if as_json {
        let order: Vec<&str> = ranked.order.iter().map(|&i| candidates[i].as_str()).collect();
        emit(out, json!({"order": order, "queries_used": ranked.queries_used}))?;
    }
    Ok(0)
}

fn cmd_corpus(action: CorpusAction, as_json: bool, out: &mut dyn Write) -> Outcome {
    match action {
        CorpusAction::List => {
            let mut listing = Vec::new();
            for entry in corpus::entries() {
                let problems: Vec<String> = entry
                    .problems
                    .iter()
                    .map(|p| match p.expected {
                        corpus::Expected::Optimal(k) => format!("{}={k}", p.name),
                        corpus::Expected::Unsolvable => format!("{}=unsolvable", p.name),
                    })
                    .collect();
                emit(out, format!("{}: {}", entry.name, problems.join(" ")))?;
                listing.push(json!({"name": entry.name, "problems": problems}));
            }
            if as_json {
                emit(out, json!({"domains": listing}))?;
            }
            Ok(0)
        }
        CorpusAction::Dump { name, out: dir } => {
            let entry = corpus::load(&name).map_err(|e| Failure::usage(e.to_string()))?;
            let io = |e: std::io::Error| Failure::external(format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(&dir).map_err(io)?;
            let mut files = vec![(format!("{}.pddl", entry.name), entry.domain_text)];
            for p in &entry.problems {
                files.push((format!("{}.pddl", p.name), p.text));
            }
            if entry.name == "blocksworld" {
                files.push(("blocksworld-multi-lift.pddl".into(), corpus::BLOCKSWORLD_MULTI_LIFT));
                files.push(("blocksworld-mid-extract.pddl".into(), corpus::BLOCKSWORLD_MID_EXTRACT));
            }
            for (file, text) in &files {
                std::fs::write(dir.join(file), text).map_err(io)?;
                emit(out, dir.join(file).display())?;
            }
            if as_json {
                emit(out, json!({"written": files.len()}))?;
            }
            Ok(0)
        }
    }
}

fn cmd_export(runs: &[PathBuf], format: ExportFormat, path: &Path, as_json: bool, out: &mut dyn Write) -> Outcome {
    let count = export(runs, path, format).map_err(|e| match e {
        crate::trajectory::TrajectoryError::MalformedTrajectory { .. } => Failure::logic(e.to_string()),
        _ => Failure::external(e.to_string()),
    })?;
    emit(out, format!("exported {count} runs to {}", path.display()))?;
    if as_json {
        emit(out, json!({"runs": count, "out": path.display().to_string()}))?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("axiomforge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn plan_flagship_ends_with_length() {
        let (code, out, _) = run_args(&["plan", "corpus:blocksworld", "corpus:blocksworld"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("length: 6\n"));
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn unsolvable_plan_exits_one() {
        let (code, out, _) = run_args(&["plan", "corpus:hanoi", "corpus:hanoi/hanoi-03"]);
        assert_eq!(code, 1);
        assert_eq!(out, "unsolvable\n");
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = run_args(&["plan", "--frobnicate"]);
        assert_eq!(code, 2);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn missing_file_is_external() {
        let (code, _, _) = run_args(&["parse", "/nonexistent/domain.pddl"]);
        assert_eq!(code, 3);
    }

    #[test]
    fn json_final_line_parses() {
        let (_, out, _) = run_args(&["--json", "corpus", "list"]);
        let last = out.lines().last().unwrap();
        let v: serde_json::Value = serde_json::from_str(last).unwrap();
        assert_eq!(v["domains"].as_array().unwrap().len(), 12);
    }
}
