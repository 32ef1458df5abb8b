//! Beam search over rule edits with the offline scripted oracle: the flagship
//! needs six steps and the target is four.

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
    println!("regression suite: {} problems", task.suite.len());

    let cfg = SearchConfig {
        algorithm: Algorithm::Beam,
        target_length: 4,
        beam_width: 8,
        seed: 1,
        ..SearchConfig::default()
    };
    let mut steps = MemorySink::default();
    let result = run_search(
        &cfg,
        &task,
        &ScriptedOracle::builtin(),
        &DistanceOracle::levenshtein_mock(),
        &mut steps,
    )
    .unwrap();

    for c in &result.candidates {
        println!(
            "#{} parent {:?} length {:?} regression-ok {} lev {} score {:.2}  {}",
            c.id,
            c.parent,
            c.plan_length(),
            c.regression_ok,
            c.lev,
            c.score,
            c.description
        );
    }
    let best = result.best.unwrap();
    println!(
        "\nsuccess {} with #{} ({:?} steps)",
        result.success,
        best.id,
        best.plan_length()
    );
    println!("{}", best.text);
}
