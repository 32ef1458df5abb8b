mod common;

use axiomforge::distance::DistanceOracle;
use axiomforge::proposer::{ScriptEntry, ScriptedOracle, Trigger};
use axiomforge::search::{run_search, Algorithm, SearchConfig, SearchResult};
use axiomforge::trajectory::MemorySink;
use common::{canonical, depth_of, flagship_task, staged};

fn run(cfg: &SearchConfig, oracle: &ScriptedOracle) -> (SearchResult, MemorySink) {
    let mut sink = MemorySink::default();
    let result = run_search(
        cfg,
        &flagship_task(),
        oracle,
        &DistanceOracle::levenshtein_mock(),
        &mut sink,
    )
    .unwrap();
    (result, sink)
}

#[test]
fn bfs_finds_the_shallowest_success() {
    let s = staged();
    let cfg = SearchConfig {
        algorithm: Algorithm::Bfs,
        target_length: 4,
        ..SearchConfig::default()
    };
    let (result, _) = run(&cfg, &s.oracle());
    let best = result.best.as_ref().unwrap();
    assert!(result.success);
    assert_eq!(depth_of(&result, best.id), s.minimal_depth(4));
    assert_eq!(best.text, canonical(&s.c));
    assert_eq!(result.trace.level_sizes, vec![1, 2, 2]);
}

#[test]
fn mcts_visits_add_up() {
    for iterations in [1, 5, 17] {
        let cfg = SearchConfig {
            algorithm: Algorithm::Mcts,
            target_length: 4,
            mcts_iterations: iterations,
            seed: 3,
            ..SearchConfig::default()
        };
        let (result, _) = run(&cfg, &staged().oracle());
        assert_eq!(result.trace.root_visits, iterations as u64);
        assert_eq!(result.trace.root_child_visits.iter().sum::<u64>(), iterations as u64);
        assert!(result.success);
    }
}

#[test]
fn genetic_population_is_constant_and_elite_never_worsens() {
    let s = staged();
    let mut entries: Vec<ScriptEntry> = s
        .edges
        .iter()
        .map(|(from, to)| ScriptEntry::new(Trigger::CanonicalText(from.clone()), to.clone()))
        .collect();
    entries.push(ScriptEntry::new(Trigger::Always, vec![]));
    let oracle = ScriptedOracle::new(entries);
    for (population, target) in [(4, 1), (6, 1), (5, 4)] {
        let cfg = SearchConfig {
            algorithm: Algorithm::Genetic,
            target_length: target,
            ga_population: population,
            ga_generations: 6,
            ga_mutation_rate: 0.8,
            seed: 11,
            ..SearchConfig::default()
        };
        let (result, _) = run(&cfg, &oracle);
        let sizes = &result.trace.population_sizes;
        assert!(!sizes.is_empty());
        assert!(sizes.iter().all(|&n| n == population));
        let elites = &result.trace.elite_scores;
        assert!(elites.windows(2).all(|w| w[1] <= w[0]), "{elites:?}");
        if target == 1 {
            assert_eq!(sizes.len(), 7);
        }
    }
}

#[test]
fn beam_never_exceeds_width() {
    let s = staged();
    for width in [1, 2, 3, 8] {
        let cfg = SearchConfig {
            algorithm: Algorithm::Beam,
            target_length: 4,
            beam_width: width,
            ..SearchConfig::default()
        };
        let (result, _) = run(&cfg, &s.oracle());
        assert!(
            result.trace.level_sizes.iter().all(|&n| n <= width),
            "{:?}",
            result.trace.level_sizes
        );
        if width >= 3 {
            assert!(result.success);
        }
    }
}

#[test]
fn every_algorithm_is_deterministic() {
    for algorithm in [Algorithm::Bfs, Algorithm::Mcts, Algorithm::Genetic, Algorithm::Beam] {
        let cfg = SearchConfig {
            algorithm,
            target_length: 4,
            seed: 7,
            mcts_iterations: 8,
            ..SearchConfig::default()
        };
        let runs: Vec<Vec<(String, String)>> = (0..3)
            .map(|_| {
                let (_, sink) = run(&cfg, &staged().oracle());
                sink.steps.into_iter().map(|s| (s.hash, s.phase)).collect()
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{algorithm}");
        assert_eq!(runs[1], runs[2], "{algorithm}");
    }
}

#[test]
fn parallel_evaluation_matches_serial() {
    let serial = SearchConfig {
        algorithm: Algorithm::Beam,
        target_length: 4,
        ..SearchConfig::default()
    };
    let parallel = SearchConfig {
        jobs: 4,
        ..serial.clone()
    };
    let (_, a) = run(&serial, &staged().oracle());
    let (_, b) = run(&parallel, &staged().oracle());
    let hashes = |s: MemorySink| s.steps.into_iter().map(|s| s.hash).collect::<Vec<_>>();
    assert_eq!(hashes(a), hashes(b));
}
