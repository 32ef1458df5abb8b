//! Grounding, optimal plan search and plan validation: the simulator that
//! scores every candidate rule set.

mod ground;
mod solve;
mod state;

use thiserror::Error;

pub use ground::{
    ground, ground_with_limits, ConditionalEffect, GroundAction, GroundFormula, GroundedTask, GroundingError,
    GroundingLimits,
};
pub use solve::{apply, solve, validate_plan, Plan, PlanCheck, PreconditionViolated, SearchLimits, SolveOutcome};
pub use state::State;

use crate::pddl::{link, Domain, LinkError, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanningError {
    #[error("link failed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Link(Vec<LinkError>),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

/// Links, grounds and solves in one call.
pub fn plan(domain: &Domain, problem: &Problem, limits: SearchLimits) -> Result<SolveOutcome, PlanningError> {
    let task = ground_problem(domain, problem)?;
    Ok(solve(&task, limits))
}

pub fn ground_problem(domain: &Domain, problem: &Problem) -> Result<GroundedTask, PlanningError> {
    let linked = link(domain, problem).map_err(PlanningError::Link)?;
    Ok(ground(&linked)?)
}
