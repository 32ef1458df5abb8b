//! Runs all four search strategies on the same task and prints their traces.

use axiomforge::corpus;
use axiomforge::distance::DistanceOracle;
use axiomforge::pddl::{parse_domain, parse_problem};
use axiomforge::proposer::ScriptedOracle;
use axiomforge::search::{run_search, Algorithm, SearchConfig, SearchTask};
use axiomforge::trajectory::MemorySink;

fn main() {
    let entry = corpus::load("blocksworld").unwrap();
    let task = SearchTask::new(
        parse_domain(entry.domain_text).unwrap(),
        parse_problem(entry.flagship().text).unwrap(),
    );
    let oracle = ScriptedOracle::builtin();
    let distance = DistanceOracle::levenshtein_mock();

    for algorithm in [Algorithm::Bfs, Algorithm::Mcts, Algorithm::Genetic, Algorithm::Beam] {
        let cfg = SearchConfig {
            algorithm,
            target_length: 4,
            mcts_iterations: 8,
            seed: 42,
            ..SearchConfig::default()
        };
        let result = run_search(&cfg, &task, &oracle, &distance, &mut MemorySink::default()).unwrap();
        let best = result.best.as_ref().and_then(|b| b.plan_length());
        println!(
            "{algorithm:<8} success {:<5} best {best:?} explored {}",
            result.success, result.explored
        );
        let t = &result.trace;
        match algorithm {
            Algorithm::Bfs | Algorithm::Beam => println!("         level sizes {:?}", t.level_sizes),
            Algorithm::Mcts => println!(
                "         root visits {} children {:?}",
                t.root_visits, t.root_child_visits
            ),
            Algorithm::Genetic => println!(
                "         population {:?} elite {:?}",
                t.population_sizes, t.elite_scores
            ),
        }
    }
    println!(
        "proposal calls: {}",
        axiomforge::proposer::ProposalOracle::calls(&oracle)
    );
}
