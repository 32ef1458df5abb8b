//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach stdout.

mod common;

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axiomforge::corpus::{self, Expected};
use axiomforge::distance::{levenshtein, semantic_rank, DistanceOracle};
use axiomforge::pddl::{parse_domain, parse_problem, print_canonical, Domain, Requirement, TypeRef};
use axiomforge::planner::{ground_problem, solve, validate_plan, SearchLimits, SolveOutcome};
use axiomforge::proposer::{
    build_oracles, ChatClient, CountingTransport, HttpOracle, OracleClientConfig, OracleKind, ProposalContext,
    ProposalOracle, StubResponse, StubServer, Transport, UreqTransport,
};
use axiomforge::search::{run_search, select_ucb1, ucb1, Algorithm, SearchConfig};
use axiomforge::trajectory::{export, read_trajectory, ExportFormat, MemorySink};
use common::{BruteForce, BruteOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn optimum(domain: &Domain, problem_text: &str) -> Result<usize, String> {
    let problem = parse_problem(problem_text).map_err(|d| format!("{d:?}"))?;
    let task = ground_problem(domain, &problem).map_err(|e| e.to_string())?;
    match solve(&task, SearchLimits::default()) {
        SolveOutcome::Solved(plan) => {
            ensure(validate_plan(&task, &plan).valid, "plan fails validation")?;
            Ok(plan.len())
        }
        other => Err(format!("{} not solved: {other:?}", problem.name)),
    }
}

fn flagship_triple() -> Check {
    let started = Instant::now();
    let entry = corpus::load("blocksworld").map_err(|e| e.to_string())?;
    let flagship = entry.flagship().text;
    let mut got = Vec::new();
    for text in [
        entry.domain_text,
        corpus::BLOCKSWORLD_MULTI_LIFT,
        corpus::BLOCKSWORLD_MID_EXTRACT,
    ] {
        let domain = parse_domain(text).map_err(|d| format!("{d:?}"))?;
        got.push(optimum(&domain, flagship)?);
    }
    let elapsed = started.elapsed();
    ensure(got == [6, 2, 4], format!("lengths {got:?}, expected [6, 2, 4]"))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("lengths {got:?} in {elapsed:?}"))
}

const EVOLVE: [&str; 14] = [
    "evolve",
    "corpus:blocksworld",
    "corpus:blocksworld",
    "--algo",
    "beam",
    "--beam-width",
    "8",
    "--target-len",
    "4",
    "--oracle",
    "scripted",
    "--seed",
    "1",
    "--trajectory",
];

/// Runs the replay command in `dir`, writing `run.jsonl` there.
fn evolve_in(dir: &Path) -> Result<(String, Duration), String> {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_axiomforge"))
        .args(EVOLVE)
        .arg("run.jsonl")
        .current_dir(dir)
        .env_remove("AXIOMFORGE_API_KEY")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.code() == Some(0), format!("exit {:?}", out.status.code()))?;
    Ok((String::from_utf8_lossy(&out.stdout).into_owned(), elapsed))
}

fn step_hashes(path: &Path) -> Result<Vec<String>, String> {
    let runs = read_trajectory(path).map_err(|e| e.to_string())?;
    ensure(runs.len() == 1, "expected one run")?;
    Ok(runs[0].hashes().into_iter().map(String::from).collect())
}

fn experiment_replay(dirs: &[tempfile::TempDir]) -> Check {
    let mut outputs = Vec::new();
    let mut hashes = Vec::new();
    for dir in dirs {
        let (stdout, elapsed) = evolve_in(dir.path())?;
        ensure(elapsed < Duration::from_secs(10), format!("run took {elapsed:?}"))?;
        outputs.push(stdout);
        hashes.push(step_hashes(&dir.path().join("run.jsonl"))?);
    }
    let out = &outputs[0];
    for line in [
        "success: true",
        "best-length: 2",
        "regression-ok: true",
        "network-requests: 0",
    ] {
        ensure(out.lines().any(|l| l == line), format!("missing `{line}` in:\n{out}"))?;
    }
    ensure(outputs.iter().all(|o| o == out), "stdout differs between runs")?;
    ensure(
        hashes.iter().all(|h| h == &hashes[0]),
        "trajectory hashes differ between runs",
    )?;

    // the winning rules must solve every blocksworld problem the original solves
    let runs = read_trajectory(dirs[0].path().join("run.jsonl")).map_err(|e| e.to_string())?;
    let summary = runs[0].summary.as_ref().ok_or("no summary record")?;
    let best_id = summary.best_step_id.ok_or("no best step")?;
    let best = runs[0]
        .steps
        .iter()
        .find(|s| s.step_id == best_id)
        .ok_or("best step missing")?;
    let rules = parse_domain(&best.text).map_err(|d| format!("{d:?}"))?;
    let entry = corpus::load("blocksworld").map_err(|e| e.to_string())?;
    for p in &entry.problems {
        if matches!(p.expected, Expected::Optimal(_)) {
            let problem = parse_problem(p.text).map_err(|d| format!("{d:?}"))?;
            let reference = BruteForce::new(&rules, &problem).shortest(&problem, 100_000);
            ensure(
                matches!(reference, BruteOutcome::Length(_)),
                format!("best rules fail {}", p.name),
            )?;
        }
    }
    Ok(format!(
        "best length 2, {} identical steps over 3 runs",
        hashes[0].len()
    ))
}

fn levenshtein_anchor() -> Check {
    let d = levenshtein("(and (clear ?x) (clear ?y))", "(or (clear ?x) (clear ?y))");
    ensure(d == 3, format!("and->or distance {d}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphabet: Vec<char> = "ab()? é-".chars().collect();
    let word = |rng: &mut ChaCha8Rng| -> String {
        let n = rng.random_range(0..20);
        (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
    };
    for _ in 0..1000 {
        let (a, b, c) = (word(&mut rng), word(&mut rng), word(&mut rng));
        let ab = levenshtein(&a, &b);
        ensure(ab == common::naive_levenshtein(&a, &b), format!("{a:?} {b:?}"))?;
        ensure(
            levenshtein(&a, &a) == 0 && (ab == 0) == (a == b),
            format!("identity {a:?} {b:?}"),
        )?;
        ensure(ab == levenshtein(&b, &a), format!("symmetry {a:?} {b:?}"))?;
        ensure(
            levenshtein(&a, &c) <= ab + levenshtein(&b, &c),
            format!("triangle {a:?} {b:?} {c:?}"),
        )?;
    }
    Ok("and->or = 3; 1000 triples satisfy the metric axioms".into())
}

fn semantic_ranking() -> Check {
    let mut worst = 0;
    for (i, name) in corpus::NAMES.iter().enumerate() {
        let reference =
            print_canonical(&parse_domain(corpus::domain_text(name).unwrap()).map_err(|d| format!("{d:?}"))?);
        let mutations = common::string_mutations(&reference, 32, i as u64);
        let oracle = DistanceOracle::levenshtein_mock();
        let ranked = semantic_rank(&reference, &mutations, &oracle).map_err(|e| e.to_string())?;
        let mut direct: Vec<usize> = (0..mutations.len()).collect();
        direct.sort_by_cached_key(|&j| {
            (
                common::naive_levenshtein(&reference, &mutations[j]),
                mutations[j].clone(),
            )
        });
        ensure(
            ranked.order == direct,
            format!("{name}: order differs from direct sort"),
        )?;
        ensure(
            ranked.queries_used <= 160,
            format!("{name}: {} queries", ranked.queries_used),
        )?;
        ensure(
            oracle.cached_queries() <= 160,
            format!("{name}: {} distinct queries", oracle.cached_queries()),
        )?;
        worst = worst.max(ranked.queries_used);
    }
    Ok(format!(
        "12 domains x 32 mutations sorted correctly, at most {worst} queries"
    ))
}

fn planner_equivalence() -> Check {
    let mut compared = 0;
    for entry in corpus::entries() {
        let domain = parse_domain(entry.domain_text).map_err(|d| format!("{d:?}"))?;
        for p in &entry.problems {
            let problem = parse_problem(p.text).map_err(|d| format!("{d:?}"))?;
            let task = ground_problem(&domain, &problem).map_err(|e| e.to_string())?;
            let ours = match solve(&task, SearchLimits::default()) {
                SolveOutcome::Solved(plan) => Some(plan.len()),
                SolveOutcome::Unsolvable => None,
                SolveOutcome::ResourceExceeded => return Err(format!("{}: resource limit", p.name)),
            };
            let reference = match BruteForce::new(&domain, &problem).shortest(&problem, 100_000) {
                BruteOutcome::Length(k) => Some(k),
                BruteOutcome::Unsolvable => None,
                BruteOutcome::TooLarge => return Err(format!("{}: over 10^5 states", p.name)),
            };
            ensure(
                ours == reference,
                format!("{}: planner {ours:?}, brute force {reference:?}", p.name),
            )?;
            compared += 1;
        }
    }
    Ok(format!("{compared}/{compared} problems agree"))
}

fn parser_coverage() -> Check {
    for name in corpus::NAMES {
        let domain =
            parse_domain(corpus::domain_text(name).unwrap()).map_err(|d| format!("{name}: {} diagnostics", d.len()))?;
        let printed = print_canonical(&domain);
        let reparsed =
            parse_domain(&printed).map_err(|d| format!("{name}: canonical text has {} diagnostics", d.len()))?;
        ensure(reparsed == domain, format!("{name}: round trip changes the rules"))?;
        ensure(
            print_canonical(&reparsed) == printed,
            format!("{name}: canonical text unstable"),
        )?;
    }
    let briefcase = parse_domain(corpus::domain_text("briefcase").unwrap()).unwrap();
    ensure(
        briefcase.requirements.contains(&Requirement::ConditionalEffects)
            && briefcase.requirements.contains(&Requirement::UniversalPreconditions),
        "briefcase requirements",
    )?;
    let logistics = parse_domain(corpus::domain_text("logistics").unwrap()).unwrap();
    let has_either = logistics
        .actions
        .iter()
        .flat_map(|a| &a.params)
        .chain(logistics.predicates.iter().flat_map(|p| &p.params))
        .any(|p| matches!(p.ty, TypeRef::Either(_)));
    ensure(has_either, "logistics has no either-type")?;
    Ok("12 domains parse cleanly and round-trip".into())
}

fn algorithm_mechanics() -> Check {
    let staged = common::staged();
    let task = common::flagship_task();
    let run = |cfg: &SearchConfig| {
        let mut sink = MemorySink::default();
        let r = run_search(
            cfg,
            &task,
            &staged.oracle(),
            &DistanceOracle::levenshtein_mock(),
            &mut sink,
        );
        r.map(|r| (r, sink)).map_err(|e| e.to_string())
    };

    let bfs = SearchConfig {
        algorithm: Algorithm::Bfs,
        target_length: 4,
        ..SearchConfig::default()
    };
    let (r, _) = run(&bfs)?;
    let best = r.best.as_ref().ok_or("bfs found nothing")?;
    let depth = common::depth_of(&r, best.id);
    ensure(
        r.success && depth == staged.minimal_depth(4),
        format!("bfs depth {depth}"),
    )?;

    let mcts = SearchConfig {
        algorithm: Algorithm::Mcts,
        target_length: 4,
        mcts_iterations: 12,
        seed: 5,
        ..SearchConfig::default()
    };
    let (r, _) = run(&mcts)?;
    let visits: u64 = r.trace.root_child_visits.iter().sum();
    ensure(
        visits == 12 && r.trace.root_visits == 12,
        format!("mcts child visits {visits}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let parent = rng.random_range(1..200u64);
        let c = rng.random::<f64>() * 3.0;
        let children: Vec<(f64, u64)> = (0..rng.random_range(1..8))
            .map(|_| (rng.random::<f64>(), rng.random_range(1..=parent)))
            .collect();
        let values: Vec<f64> = children
            .iter()
            .map(|&(m, n)| m + c * ((parent as f64).ln() / n as f64).sqrt())
            .collect();
        for (&(m, n), v) in children.iter().zip(&values) {
            ensure((ucb1(m, n, parent, c) - v).abs() <= 1e-12, "ucb1 formula")?;
        }
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let argmax = values.iter().position(|&v| v == max);
        ensure(
            select_ucb1(&children, parent, c) == argmax,
            "ucb1 selection is not the argmax",
        )?;
    }

    let ga = SearchConfig {
        algorithm: Algorithm::Genetic,
        target_length: 1,
        ga_population: 6,
        ga_generations: 5,
        ga_mutation_rate: 0.5,
        seed: 2,
        ..SearchConfig::default()
    };
    let (r, _) = run(&ga)?;
    ensure(
        r.trace.population_sizes == vec![6; 6],
        format!("ga sizes {:?}", r.trace.population_sizes),
    )?;
    ensure(
        r.trace.elite_scores.windows(2).all(|w| w[1] <= w[0]),
        format!("ga elite {:?}", r.trace.elite_scores),
    )?;

    for width in [1, 2, 8] {
        let beam = SearchConfig {
            algorithm: Algorithm::Beam,
            target_length: 4,
            beam_width: width,
            ..SearchConfig::default()
        };
        let (r, _) = run(&beam)?;
        ensure(
            r.trace.level_sizes.iter().all(|&n| n <= width),
            format!("beam {width}: {:?}", r.trace.level_sizes),
        )?;
    }

    for cfg in [&bfs, &mcts, &ga] {
        let hashes = |s: MemorySink| s.steps.into_iter().map(|s| s.hash).collect::<Vec<_>>();
        let (_, a) = run(cfg)?;
        let (_, b) = run(cfg)?;
        ensure(
            hashes(a) == hashes(b),
            format!("{} is not deterministic", cfg.algorithm),
        )?;
    }
    Ok(format!(
        "bfs depth {depth}, mcts visits 12/12, ga and beam invariants hold"
    ))
}

fn http_contract() -> Check {
    let valid = [corpus::BLOCKSWORLD_MULTI_LIFT, corpus::BLOCKSWORLD_MID_EXTRACT];
    let reply = StubResponse::chat(&[format!(
        "```pddl\n{}\n```\n```pddl\n(define (domain x) (:action\n```\n```\n{}\n```",
        valid[0], valid[1]
    )]);
    let server = StubServer::start(vec![StubResponse::status(500), StubResponse::status(500), reply])
        .map_err(|e| e.to_string())?;
    let cfg = OracleClientConfig {
        base_url: server.url(),
        samples: 1,
        backoff_ms: 1,
        ..OracleClientConfig::default()
    };
    let oracle = HttpOracle::new(Arc::new(ChatClient::new(
        cfg,
        Some("stub".into()),
        Arc::new(UreqTransport::new()),
    )));
    let entry = corpus::load("blocksworld").map_err(|e| e.to_string())?;
    let ctx = ProposalContext {
        domain: parse_domain(entry.domain_text).unwrap(),
        problem: parse_problem(entry.flagship().text).unwrap(),
        baseline_length: Some(6),
        target_length: 4,
        failure_summary: String::new(),
        history: Vec::new(),
    };
    let ex = oracle.propose(&ctx, 8).map_err(|e| e.to_string())?;
    let expected: Vec<String> = valid
        .iter()
        .map(|t| print_canonical(&parse_domain(t).unwrap()))
        .collect();
    ensure(
        ex.canonical_texts() == expected,
        "extracted domains differ from the stub's valid blocks",
    )?;
    ensure(ex.dropped.len() == 1, format!("{} dropped blocks", ex.dropped.len()))?;
    ensure(
        server.requests() == 3,
        format!("{} requests, expected 2 failures then success", server.requests()),
    )?;

    let transport = Arc::new(CountingTransport::unreachable());
    let (proposer, distance) = build_oracles(OracleKind::Scripted, &OracleClientConfig::default(), transport.clone())
        .map_err(|e| e.to_string())?;
    let cfg = SearchConfig {
        algorithm: Algorithm::Beam,
        target_length: 4,
        ..SearchConfig::default()
    };
    let r = run_search(
        &cfg,
        &common::flagship_task(),
        proposer.as_ref(),
        &distance,
        &mut MemorySink::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(r.success, "scripted search failed")?;
    ensure(
        transport.requests() == 0,
        format!("scripted mode made {} requests", transport.requests()),
    )?;
    Ok("2 valid blocks extracted after 2 injected 500s; scripted transport count 0".into())
}

fn trajectory_replay(dirs: &[tempfile::TempDir]) -> Check {
    let recorded = step_hashes(&dirs[0].path().join("run.jsonl"))?;
    let replay = tempfile::tempdir().map_err(|e| e.to_string())?;
    evolve_in(replay.path())?;
    ensure(
        step_hashes(&replay.path().join("run.jsonl"))? == recorded,
        "replayed hash sequence differs",
    )?;

    let runs: Vec<_> = dirs.iter().map(|d| d.path().join("run.jsonl")).collect();
    let out = replay.path();
    let bytes = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    for (format, ext) in [(ExportFormat::Jsonl, "jsonl"), (ExportFormat::CsvSummary, "csv")] {
        let first = out.join(format!("first.{ext}"));
        let second = out.join(format!("second.{ext}"));
        let n = export(&runs, &first, format).map_err(|e| e.to_string())?;
        export(&runs, &second, format).map_err(|e| e.to_string())?;
        ensure(n == 3, format!("{n} runs exported"))?;
        ensure(
            bytes(&first)? == bytes(&second)?,
            format!("{ext} export not repeatable"),
        )?;
    }
    let again = out.join("again.jsonl");
    export(&[out.join("first.jsonl")], &again, ExportFormat::Jsonl).map_err(|e| e.to_string())?;
    ensure(
        bytes(&again)? == bytes(&out.join("first.jsonl"))?,
        "re-exporting a jsonl export changes it",
    )?;
    let csv_again = out.join("again.csv");
    export(&[again], &csv_again, ExportFormat::CsvSummary).map_err(|e| e.to_string())?;
    ensure(
        bytes(&csv_again)? == bytes(&out.join("first.csv"))?,
        "csv from the export differs",
    )?;
    Ok(format!(
        "{} hashes replayed; jsonl and csv-summary exports idempotent",
        recorded.len()
    ))
}

fn main() {
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().expect("temp dir")).collect();
    let checks: Vec<Criterion> = vec![
        ("flagship triple 6/2/4", Box::new(flagship_triple)),
        ("beam experiment replay", Box::new(|| experiment_replay(&dirs))),
        ("levenshtein anchor and metric axioms", Box::new(levenshtein_anchor)),
        ("semantic ranking mechanics", Box::new(semantic_ranking)),
        ("planner matches brute force", Box::new(planner_equivalence)),
        ("parser coverage", Box::new(parser_coverage)),
        ("search algorithm mechanics", Box::new(algorithm_mechanics)),
        ("http oracle contract", Box::new(http_contract)),
        ("trajectory replay and export", Box::new(|| trajectory_replay(&dirs))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
