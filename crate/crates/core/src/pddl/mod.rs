//! PDDL front end: parsing, validation, linking and canonical printing for
//! the STRIPS/ADL subset used by the bundled game corpus.
//!
//! Supported: `:strips`, `:typing`, `:equality`, `:negative-preconditions`,
//! `:disjunctive-preconditions`, `:conditional-effects`,
//! `:universal-preconditions`, `either` types and domain constants.

mod ast;
mod error;
mod link;
mod parser;
mod print;
mod sexpr;

pub use ast::*;
pub use error::{render_diagnostics, Diagnostic, DiagnosticKind, LinkError, Pos};
pub use link::{link, LinkedTask, TypeTable};
pub use parser::{parse_domain, parse_problem};
pub use print::{formula as print_formula, print_canonical, print_problem};
