//! Parses every embedded domain and shows its shape and canonical round trip.

use axiomforge::corpus;
use axiomforge::pddl::{parse_domain, print_canonical};

fn main() {
    for entry in corpus::entries() {
        let domain = parse_domain(entry.domain_text).expect("corpus domains parse");
        let canonical = print_canonical(&domain);
        let stable = parse_domain(&canonical).map(|d| d == domain).unwrap_or(false);
        let requirements: Vec<&str> = domain.requirements.iter().map(|r| r.keyword()).collect();
        println!(
            "{:<12} {:>2} types {:>2} predicates {:>2} actions  round-trip {}  {}",
            domain.name,
            domain.types.len(),
            domain.predicates.len(),
            domain.actions.len(),
            if stable { "ok" } else { "CHANGED" },
            requirements.join(" "),
        );
    }

    let broken =
        "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (q ?x) :effect (p ?y)))";
    if let Err(diagnostics) = parse_domain(broken) {
        println!("\ndiagnostics for a broken domain:");
        println!("{}", axiomforge::pddl::render_diagnostics(&diagnostics).trim_end());
    }
}
