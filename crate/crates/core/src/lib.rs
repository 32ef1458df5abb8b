pub mod cli;
pub mod corpus;
pub mod distance;
pub mod pddl;
pub mod planner;
pub mod proposer;
pub mod search;
pub mod trajectory;
