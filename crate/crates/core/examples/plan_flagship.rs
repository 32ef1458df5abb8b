//! Plans the flagship blocksworld tower move under the original rules and the
//! two edited rule sets.

use axiomforge::corpus;
use axiomforge::pddl::{parse_domain, parse_problem};
use axiomforge::planner::{plan, SearchLimits};

fn main() {
    let entry = corpus::load("blocksworld").unwrap();
    let problem = parse_problem(entry.flagship().text).unwrap();
    let rule_sets = [
        ("original", entry.domain_text),
        ("multi-lift", corpus::BLOCKSWORLD_MULTI_LIFT),
        ("mid-extract", corpus::BLOCKSWORLD_MID_EXTRACT),
    ];
    for (label, text) in rule_sets {
        let domain = parse_domain(text).unwrap();
        let outcome = plan(&domain, &problem, SearchLimits::default()).unwrap();
        let steps = outcome.plan().expect("all three rule sets solve the flagship");
        println!("{label}: {} steps", steps.len());
        for step in &steps.labels {
            println!("  {step}");
        }
    }
}
