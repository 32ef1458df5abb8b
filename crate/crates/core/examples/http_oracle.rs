//! Drives the HTTP proposal oracle against a local stub server that fails
//! once before answering.

use std::sync::Arc;

use axiomforge::corpus;
use axiomforge::pddl::{parse_domain, parse_problem};
use axiomforge::proposer::{
    build_prompt, ChatClient, HttpOracle, OracleClientConfig, ProposalContext, ProposalOracle, StubResponse,
    StubServer, UreqTransport,
};

fn main() {
    let reply = format!(
        "Try this:\n```pddl\n{}\n```\nor this broken one:\n```pddl\n(define (domain blocksworld)\n```",
        corpus::BLOCKSWORLD_MULTI_LIFT
    );
    let server = StubServer::start(vec![StubResponse::status(503), StubResponse::chat(&[reply])]).unwrap();

    let cfg = OracleClientConfig {
        base_url: server.url(),
        samples: 1,
        backoff_ms: 10,
        ..OracleClientConfig::default()
    };
    let client = ChatClient::new(cfg, Some("not-a-real-key".into()), Arc::new(UreqTransport::new()));
    let oracle = HttpOracle::new(Arc::new(client));

    let entry = corpus::load("blocksworld").unwrap();
    let ctx = ProposalContext {
        domain: parse_domain(entry.domain_text).unwrap(),
        problem: parse_problem(entry.flagship().text).unwrap(),
        baseline_length: Some(6),
        target_length: 4,
        failure_summary: String::new(),
        history: Vec::new(),
    };
    println!(
        "prompt preview:\n{}\n...",
        build_prompt(&ctx).lines().take(4).collect::<Vec<_>>().join("\n")
    );

    let extraction = oracle.propose(&ctx, 8).unwrap();
    println!("\nrequests sent: {}", server.requests());
    println!("valid candidates: {}", extraction.candidates.len());
    for d in &extraction.dropped {
        println!("dropped block {}: {:?}", d.block, d.reason);
    }
}
