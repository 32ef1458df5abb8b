//! Canonical text rendering.
//!
//! Output is lowercase with single spaces, one section per line and every
//! formula on one line. Declaration and conjunct order are kept as parsed.

use std::fmt::Write;

use super::ast::*;

pub fn print_canonical(domain: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain.name);
    if !domain.requirements.is_empty() {
        let flags: Vec<&str> = domain.requirements.iter().map(|r| r.keyword()).collect();
        let _ = writeln!(out, "  (:requirements {})", flags.join(" "));
    }
    if !domain.types.is_empty() {
        let typed: Vec<TypedName> = domain
            .types
            .iter()
            .map(|t| TypedName::new(t.name.clone(), TypeRef::Named(t.parent.clone())))
            .collect();
        let _ = writeln!(out, "  (:types {})", typed_list(&typed, false));
    }
    if !domain.constants.is_empty() {
        let _ = writeln!(out, "  (:constants {})", typed_list(&domain.constants, false));
    }
    out.push_str("  (:predicates");
    for p in &domain.predicates {
        out.push_str(" (");
        out.push_str(&p.name);
        if !p.params.is_empty() {
            out.push(' ');
            out.push_str(&typed_list(&p.params, true));
        }
        out.push(')');
    }
    out.push_str(")\n");
    for a in &domain.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let _ = writeln!(out, "    :parameters ({})", typed_list(&a.params, true));
        let _ = writeln!(out, "    :precondition {}", formula(&a.precondition));
        let _ = writeln!(out, "    :effect {})", formula(&a.effect));
    }
    out.push_str(")\n");
    out
}

pub fn print_problem(problem: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", problem.name);
    let _ = writeln!(out, "  (:domain {})", problem.domain);
    if !problem.requirements.is_empty() {
        let flags: Vec<&str> = problem.requirements.iter().map(|r| r.keyword()).collect();
        let _ = writeln!(out, "  (:requirements {})", flags.join(" "));
    }
    if !problem.objects.is_empty() {
        let _ = writeln!(out, "  (:objects {})", typed_list(&problem.objects, false));
    }
    out.push_str("  (:init");
    for atom in &problem.init {
        let _ = write!(out, " {atom}");
    }
    out.push_str(")\n");
    let _ = writeln!(out, "  (:goal {})", formula(&problem.goal));
    out.push_str(")\n");
    out
}

/// Groups consecutive names of equal type. The root type is written
/// explicitly unless it closes the list, where it is implied.
fn typed_list(names: &[TypedName], variables: bool) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < names.len() {
        let ty = &names[i].ty;
        let mut j = i;
        while j < names.len() && &names[j].ty == ty {
            let n = &names[j].name;
            parts.push(if variables { format!("?{n}") } else { n.clone() });
            j += 1;
        }
        let implicit_root = j == names.len() && *ty == TypeRef::root();
        if !implicit_root {
            parts.push("-".to_string());
            parts.push(ty.to_string());
        }
        i = j;
    }
    parts.join(" ")
}

pub fn formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom { predicate, args } => {
            out.push('(');
            out.push_str(predicate);
            for a in args {
                let _ = write!(out, " {a}");
            }
            out.push(')');
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "(= {a} {b})");
        }
        Formula::Not(inner) => {
            out.push_str("(not ");
            write_formula(out, inner);
            out.push(')');
        }
        Formula::And(parts) | Formula::Or(parts) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for p in parts {
                out.push(' ');
                write_formula(out, p);
            }
            out.push(')');
        }
        Formula::Forall(vars, body) => {
            let _ = write!(out, "(forall ({}) ", typed_list(vars, true));
            write_formula(out, body);
            out.push(')');
        }
        Formula::When(cond, eff) => {
            out.push_str("(when ");
            write_formula(out, cond);
            out.push(' ');
            write_formula(out, eff);
            out.push(')');
        }
    }
}
