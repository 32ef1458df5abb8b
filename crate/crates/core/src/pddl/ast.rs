//! Abstract syntax for the supported PDDL subset.
//!
//! Identifiers are stored lowercase. Variables are stored without the
//! leading `?`.

use std::fmt;

pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Requirement {
    Strips,
    Typing,
    Equality,
    NegativePreconditions,
    DisjunctivePreconditions,
    ConditionalEffects,
    UniversalPreconditions,
}

impl Requirement {
    pub const ALL: [Requirement; 7] = [
        Requirement::Strips,
        Requirement::Typing,
        Requirement::Equality,
        Requirement::NegativePreconditions,
        Requirement::DisjunctivePreconditions,
        Requirement::ConditionalEffects,
        Requirement::UniversalPreconditions,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::Equality => ":equality",
            Requirement::NegativePreconditions => ":negative-preconditions",
            Requirement::DisjunctivePreconditions => ":disjunctive-preconditions",
            Requirement::ConditionalEffects => ":conditional-effects",
            Requirement::UniversalPreconditions => ":universal-preconditions",
        }
    }

    pub fn from_keyword(keyword: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.keyword() == keyword)
    }
}

/// A declared type with its parent; undeclared parents default to `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Named(String),
    Either(Vec<String>),
}

impl TypeRef {
    pub fn root() -> Self {
        TypeRef::Named(ROOT_TYPE.to_string())
    }

    pub fn names(&self) -> &[String] {
        match self {
            TypeRef::Named(n) => std::slice::from_ref(n),
            TypeRef::Either(ns) => ns,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Named(n) => f.write_str(n),
            TypeRef::Either(ns) => write!(f, "(either {})", ns.join(" ")),
        }
    }
}

/// A name with a type: an action parameter, a predicate slot, a constant or
/// an object.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedName {
    pub name: String,
    pub ty: TypeRef,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: TypeRef) -> Self {
        Self { name: name.into(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Forall(Vec<TypedName>, Box<Formula>),
    When(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn empty() -> Self {
        Formula::And(Vec::new())
    }

    /// Number of literals (atoms and equalities, negated or not).
    pub fn literal_count(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 1,
            Formula::Not(inner) => inner.literal_count(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::literal_count).sum(),
            Formula::Forall(_, body) => body.literal_count(),
            Formula::When(cond, eff) => cond.literal_count() + eff.literal_count(),
        }
    }

    /// Visits every atom in the formula, including conditions of `when`.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Atom { predicate, args } => f(predicate, args),
            Formula::Eq(..) => {}
            Formula::Not(inner) => inner.for_each_atom(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.for_each_atom(f)),
            Formula::Forall(_, body) => body.for_each_atom(f),
            Formula::When(cond, eff) => {
                cond.for_each_atom(f);
                eff.for_each_atom(f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Formula,
    pub effect: Formula,
}

impl ActionSchema {
    /// Predicates whose atoms appear in this action's effect (including
    /// conditional effects, but not their conditions).
    pub fn effect_predicates(&self) -> Vec<&str> {
        let mut out = Vec::new();
        collect_effect_predicates(&self.effect, &mut out);
        out
    }
}

fn collect_effect_predicates<'a>(effect: &'a Formula, out: &mut Vec<&'a str>) {
    match effect {
        Formula::Atom { predicate, .. } => out.push(predicate),
        Formula::Not(inner) => collect_effect_predicates(inner, out),
        Formula::And(fs) => fs.iter().for_each(|g| collect_effect_predicates(g, out)),
        Formula::Forall(_, body) => collect_effect_predicates(body, out),
        Formula::When(_, eff) => collect_effect_predicates(eff, out),
        Formula::Eq(..) | Formula::Or(_) => {}
    }
}

/// A parsed domain: the rule set that the search procedures edit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<Requirement>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Total literal count over every action precondition and effect.
    pub fn compactness(&self) -> usize {
        self.actions
            .iter()
            .map(|a| a.precondition.literal_count() + a.effect.literal_count())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Self {
            predicate: predicate.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A parsed problem: objects, initial state and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub requirements: Vec<Requirement>,
    pub objects: Vec<TypedName>,
    pub init: Vec<GroundAtom>,
    pub goal: Formula,
}
