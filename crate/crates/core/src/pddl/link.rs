use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::error::LinkError;

/// Type hierarchy of a domain rooted at `object`.
#[derive(Debug, Clone)]
pub struct TypeTable {
    parents: HashMap<String, String>,
}

impl TypeTable {
    pub fn new(domain: &Domain) -> Self {
        let parents = domain
            .types
            .iter()
            .map(|t| (t.name.clone(), t.parent.clone()))
            .collect();
        Self { parents }
    }

    pub fn is_declared(&self, ty: &str) -> bool {
        ty == ROOT_TYPE || self.parents.contains_key(ty)
    }

    /// True when `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == ROOT_TYPE {
            return true;
        }
        let mut current = ty;
        // Bounded walk; a cyclic hierarchy terminates instead of spinning.
        for _ in 0..=self.parents.len() {
            if current == ancestor {
                return true;
            }
            match self.parents.get(current) {
                Some(p) => current = p,
                None => return false,
            }
        }
        false
    }

    pub fn satisfies(&self, object_type: &TypeRef, required: &TypeRef) -> bool {
        object_type
            .names()
            .iter()
            .any(|t| required.names().iter().any(|r| self.is_subtype(t, r)))
    }
}

/// A problem checked against its domain, ready for grounding.
#[derive(Debug, Clone)]
pub struct LinkedTask<'a> {
    pub domain: &'a Domain,
    pub problem: &'a Problem,
    pub types: TypeTable,
    /// Domain constants followed by problem objects, in declaration order.
    pub objects: Vec<TypedName>,
}

impl LinkedTask<'_> {
    pub fn object_type(&self, name: &str) -> Option<&TypeRef> {
        self.objects.iter().find(|o| o.name == name).map(|o| &o.ty)
    }

    /// Objects that may fill a slot of type `ty`, in declaration order.
    pub fn objects_of(&self, ty: &TypeRef) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|o| self.types.satisfies(&o.ty, ty))
            .map(|o| o.name.as_str())
            .collect()
    }
}

pub fn link<'a>(domain: &'a Domain, problem: &'a Problem) -> Result<LinkedTask<'a>, Vec<LinkError>> {
    let mut errors = Vec::new();
    if domain.name != problem.domain {
        errors.push(LinkError::DomainNameMismatch {
            expected: domain.name.clone(),
            found: problem.domain.clone(),
        });
    }

    let types = TypeTable::new(domain);
    let mut objects: Vec<TypedName> = Vec::new();
    let mut seen = HashSet::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        if !seen.insert(o.name.as_str()) {
            errors.push(LinkError::DuplicateObject(o.name.clone()));
            continue;
        }
        for t in o.ty.names() {
            if !types.is_declared(t) {
                errors.push(LinkError::UnknownType(t.clone()));
            }
        }
        objects.push(o.clone());
    }

    let task = LinkedTask {
        domain,
        problem,
        types,
        objects,
    };

    for atom in &problem.init {
        check_atom(
            &task,
            &atom.predicate,
            atom.args.iter().map(String::as_str),
            &[],
            &mut errors,
        );
    }
    check_goal(&task, &problem.goal, &mut Vec::new(), &mut errors);

    if errors.is_empty() {
        Ok(task)
    } else {
        Err(errors)
    }
}

fn check_goal<'f>(
    task: &LinkedTask<'_>,
    goal: &'f Formula,
    bound: &mut Vec<&'f TypedName>,
    errors: &mut Vec<LinkError>,
) {
    match goal {
        Formula::Atom { predicate, args } => {
            let names: Vec<&str> = args
                .iter()
                .map(|t| match t {
                    Term::Var(v) | Term::Const(v) => v.as_str(),
                })
                .collect();
            check_atom(task, predicate, names.into_iter(), bound, errors);
        }
        Formula::Eq(a, b) => {
            for t in [a, b] {
                if let Term::Const(c) = t {
                    if task.object_type(c).is_none() {
                        errors.push(LinkError::UnknownObject(c.clone()));
                    }
                }
            }
        }
        Formula::Not(inner) => check_goal(task, inner, bound, errors),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| check_goal(task, f, bound, errors)),
        Formula::Forall(vars, body) => {
            let depth = bound.len();
            bound.extend(vars.iter());
            check_goal(task, body, bound, errors);
            bound.truncate(depth);
        }
        Formula::When(..) => {}
    }
}

fn check_atom<'n>(
    task: &LinkedTask<'_>,
    predicate: &str,
    args: impl ExactSizeIterator<Item = &'n str>,
    bound: &[&TypedName],
    errors: &mut Vec<LinkError>,
) {
    let Some(decl) = task.domain.predicate(predicate) else {
        errors.push(LinkError::UndeclaredPredicate(predicate.to_string()));
        return;
    };
    if decl.arity() != args.len() {
        errors.push(LinkError::ArityMismatch {
            predicate: predicate.to_string(),
            expected: decl.arity(),
            got: args.len(),
        });
        return;
    }
    for (arg, param) in args.zip(&decl.params) {
        // Quantified variables are checked against their own declared type.
        if let Some(var) = bound.iter().rev().find(|v| v.name == arg) {
            if !task.types.satisfies(&var.ty, &param.ty) && !task.types.satisfies(&param.ty, &var.ty) {
                errors.push(LinkError::TypeError {
                    object: format!("?{arg}"),
                    expected: param.ty.to_string(),
                });
            }
            continue;
        }
        match task.object_type(arg) {
            None => errors.push(LinkError::UnknownObject(arg.to_string())),
            Some(ty) if !task.types.satisfies(ty, &param.ty) => errors.push(LinkError::TypeError {
                object: arg.to_string(),
                expected: param.ty.to_string(),
            }),
            Some(_) => {}
        }
    }
}
