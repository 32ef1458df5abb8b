//! Edit distance, oracle-driven merge-sort ranking and the hybrid filter.

use axiomforge::corpus;
use axiomforge::distance::{hybrid_rank, lev_rank, levenshtein, semantic_rank, DistanceOracle};
use axiomforge::pddl::{parse_domain, print_canonical};

fn main() {
    let a = "(and (clear ?x) (clear ?y))";
    let b = "(or (clear ?x) (clear ?y))";
    println!("levenshtein({a}, {b}) = {}", levenshtein(a, b));

    let canonical = |t: &str| print_canonical(&parse_domain(t).unwrap());
    let reference = canonical(corpus::domain_text("blocksworld").unwrap());
    let candidates = vec![
        canonical(corpus::BLOCKSWORLD_MULTI_LIFT),
        canonical(corpus::BLOCKSWORLD_MID_EXTRACT),
        reference.replacen("(arm-empty)", "(not (arm-empty))", 1),
        reference.replace(":precondition (and", ":precondition (or"),
    ];

    let by_lev = lev_rank(&reference, &candidates);
    println!("\nedit-distance order: {:?}", by_lev.order);
    for &i in &by_lev.order {
        println!("  #{i}: {} edits", levenshtein(&reference, &candidates[i]));
    }

    let oracle = DistanceOracle::levenshtein_mock();
    let ranked = semantic_rank(&reference, &candidates, &oracle).unwrap();
    println!(
        "\noracle order: {:?} after {} queries",
        ranked.order, ranked.queries_used
    );

    let hybrid = hybrid_rank(&reference, &candidates, 2, &oracle).unwrap();
    println!("hybrid order (2 kept for the oracle): {:?}", hybrid.order);
    println!("backend calls so far: {}", oracle.backend_calls());
}
