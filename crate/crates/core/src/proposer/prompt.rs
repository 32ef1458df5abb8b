use std::fmt::Write;

use super::ProposalContext;
use crate::pddl::{print_canonical, print_problem};

pub const SYSTEM_PROMPT: &str = "You edit PDDL domain files for puzzle games. \
Reply only with complete PDDL domains, each inside its own ``` fenced block.";

/// The proposal prompt: current rules, the task, the step budget and the
/// output contract.
pub fn build_prompt(ctx: &ProposalContext) -> String {
    let mut out = String::new();
    out.push_str("Current domain:\n```pddl\n");
    out.push_str(&print_canonical(&ctx.domain));
    out.push_str("```\n\nProblem:\n```pddl\n");
    out.push_str(&print_problem(&ctx.problem));
    out.push_str("```\n\n");
    match ctx.baseline_length {
        Some(k) => {
            let _ = writeln!(out, "The shortest plan under the current rules takes {k} steps.");
        }
        None => out.push_str("The goal is currently unreachable under these rules.\n"),
    }
    let _ = writeln!(
        out,
        "Change the action rules so the goal can be reached in at most {} steps, \
keeping every predicate the problem uses.",
        ctx.target_length
    );
    if !ctx.failure_summary.is_empty() {
        let _ = writeln!(out, "\nObserved failures:\n{}", ctx.failure_summary);
    }
    if !ctx.history.is_empty() {
        out.push_str("\nEdits already tried:\n");
        for h in &ctx.history {
            let _ = writeln!(out, "- {h}");
        }
    }
    out.push_str(
        "\nReturn each proposal as a complete PDDL domain inside its own ``` fenced block. \
Do not return partial domains or diffs.\n",
    );
    out
}

pub fn build_crossover_prompt(ctx: &ProposalContext, parent_a: &str, parent_b: &str) -> String {
    format!(
        "{}\nCombine the rule changes of these two domains into one domain.\n\
First:\n```pddl\n{parent_a}\n```\nSecond:\n```pddl\n{parent_b}\n```\n\
Return exactly one complete domain in a fenced block.\n",
        build_prompt(ctx)
    )
}

pub fn build_mutation_prompt(ctx: &ProposalContext, candidate: &str) -> String {
    format!(
        "{}\nMake one small rule change to this domain:\n```pddl\n{candidate}\n```\n\
Return exactly one complete domain in a fenced block.\n",
        build_prompt(ctx)
    )
}

pub fn build_comparison_prompt(reference: &str, a: &str, b: &str) -> String {
    format!(
        "Reference domain:\n```pddl\n{reference}\n```\n\
Candidate A:\n```pddl\n{a}\n```\nCandidate B:\n```pddl\n{b}\n```\n\
Which candidate changes the game's rules less, judged by what players can do rather than by text? \
Answer with the single letter A or B.\n"
    )
}
