//! Grounding of linked tasks into propositional transition systems.
//!
//! Predicates that no action ever changes are static: their atoms, along
//! with equality tests, are decided against the initial state at grounding
//! time. Instantiations whose precondition is statically false are omitted,
//! as are instantiations that can never change a state.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::state::State;
use crate::pddl::{Formula, GroundAtom, LinkedTask, Term, TypedName};

/// Ground formula over atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundFormula {
    True,
    False,
    Atom(usize),
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
}

impl GroundFormula {
    pub fn holds(&self, state: &State) -> bool {
        match self {
            GroundFormula::True => true,
            GroundFormula::False => false,
            GroundFormula::Atom(a) => state.contains(*a),
            GroundFormula::Not(f) => !f.holds(state),
            GroundFormula::And(fs) => fs.iter().all(|f| f.holds(state)),
            GroundFormula::Or(fs) => fs.iter().any(|f| f.holds(state)),
        }
    }

    fn not(f: GroundFormula) -> GroundFormula {
        match f {
            GroundFormula::True => GroundFormula::False,
            GroundFormula::False => GroundFormula::True,
            GroundFormula::Not(inner) => *inner,
            other => GroundFormula::Not(Box::new(other)),
        }
    }

    fn and(parts: Vec<GroundFormula>) -> GroundFormula {
        let mut kept = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                GroundFormula::True => {}
                GroundFormula::False => return GroundFormula::False,
                GroundFormula::And(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => GroundFormula::True,
            1 => kept.pop().unwrap(),
            _ => GroundFormula::And(kept),
        }
    }

    fn or(parts: Vec<GroundFormula>) -> GroundFormula {
        let mut kept = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                GroundFormula::False => {}
                GroundFormula::True => return GroundFormula::True,
                GroundFormula::Or(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => GroundFormula::False,
            1 => kept.pop().unwrap(),
            _ => GroundFormula::Or(kept),
        }
    }

    /// Atoms required true by the top-level conjunction.
    fn positive_conjuncts(&self) -> Vec<usize> {
        match self {
            GroundFormula::Atom(a) => vec![*a],
            GroundFormula::And(fs) => fs
                .iter()
                .filter_map(|f| match f {
                    GroundFormula::Atom(a) => Some(*a),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn atoms(&self, out: &mut Vec<usize>) {
        match self {
            GroundFormula::True | GroundFormula::False => {}
            GroundFormula::Atom(a) => out.push(*a),
            GroundFormula::Not(f) => f.atoms(out),
            GroundFormula::And(fs) | GroundFormula::Or(fs) => fs.iter().for_each(|f| f.atoms(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalEffect {
    pub condition: GroundFormula,
    pub add: Vec<usize>,
    pub delete: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub precondition: GroundFormula,
    pub add: Vec<usize>,
    pub delete: Vec<usize>,
    pub conditional: Vec<ConditionalEffect>,
}

impl GroundAction {
    /// `(name arg1 arg2 ...)`
    pub fn label(&self) -> String {
        let mut s = format!("({}", self.name);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

#[derive(Debug, Clone)]
pub struct GroundedTask {
    pub atoms: Vec<GroundAtom>,
    pub init: State,
    pub goal: GroundFormula,
    pub actions: Vec<GroundAction>,
}

impl GroundedTask {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, atom: &GroundAtom) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Finds a ground action by its label, ignoring case and spacing.
    pub fn find_action(&self, label: &str) -> Option<usize> {
        let wanted = normalize_label(label);
        self.actions.iter().position(|a| a.label() == wanted)
    }
}

pub(crate) fn normalize_label(label: &str) -> String {
    let inner = label
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .to_lowercase();
    format!("({})", inner.split_whitespace().collect::<Vec<_>>().join(" "))
}

#[derive(Debug, Clone, Copy)]
pub struct GroundingLimits {
    pub max_atoms: usize,
    pub max_actions: usize,
    /// Cap on parameter tuples enumerated for a single schema.
    pub max_tuples: usize,
}

impl Default for GroundingLimits {
    fn default() -> Self {
        Self {
            max_atoms: 1_000_000,
            max_actions: 1_000_000,
            max_tuples: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("grounding explosion: {what} count {count} exceeds cap {cap}")]
    GroundingExplosion {
        what: &'static str,
        count: usize,
        cap: usize,
    },
}

pub fn ground(task: &LinkedTask<'_>) -> Result<GroundedTask, GroundingError> {
    ground_with_limits(task, GroundingLimits::default())
}

pub fn ground_with_limits(task: &LinkedTask<'_>, limits: GroundingLimits) -> Result<GroundedTask, GroundingError> {
    let mut g = Grounder::new(task, limits);
    for atom in &task.problem.init {
        if g.fluents.contains(atom.predicate.as_str()) {
            g.intern(atom.clone())?;
        }
    }
    let mut actions = Vec::new();
    for schema in &task.domain.actions {
        let slots: Vec<Vec<&str>> = schema.params.iter().map(|p| task.objects_of(&p.ty)).collect();
        let total = slots
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
            .unwrap_or(usize::MAX);
        if total > limits.max_tuples {
            return Err(GroundingError::GroundingExplosion {
                what: "parameter tuple",
                count: total,
                cap: limits.max_tuples,
            });
        }
        if total == 0 {
            continue;
        }
        let mut cursor = vec![0usize; slots.len()];
        loop {
            let binding: Vec<(&str, &str)> = schema
                .params
                .iter()
                .zip(&cursor)
                .enumerate()
                .map(|(i, (p, &c))| (p.name.as_str(), slots[i][c]))
                .collect();
            if let Some(action) = g.instantiate(&schema.name, &binding, &schema.precondition, &schema.effect)? {
                actions.push(action);
                if actions.len() > limits.max_actions {
                    return Err(GroundingError::GroundingExplosion {
                        what: "ground action",
                        count: actions.len(),
                        cap: limits.max_actions,
                    });
                }
            }
            if !advance(&mut cursor, &slots) {
                break;
            }
        }
    }
    let goal = g.condition(&task.problem.goal, &mut Vec::new())?;
    let init_atoms: Vec<usize> = task
        .problem
        .init
        .iter()
        .filter_map(|a| g.index.get(a).copied())
        .collect();
    let n = g.atoms.len();
    Ok(GroundedTask {
        init: State::from_atoms(n, init_atoms),
        atoms: g.atoms,
        goal,
        actions,
    })
}

fn advance(cursor: &mut [usize], slots: &[Vec<&str>]) -> bool {
    for i in (0..cursor.len()).rev() {
        cursor[i] += 1;
        if cursor[i] < slots[i].len() {
            return true;
        }
        cursor[i] = 0;
    }
    false
}

struct Grounder<'t, 'a> {
    task: &'t LinkedTask<'a>,
    limits: GroundingLimits,
    fluents: HashSet<&'t str>,
    init: HashSet<&'t GroundAtom>,
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, usize>,
}

#[derive(Default)]
struct EffectGroup {
    add: Vec<usize>,
    delete: Vec<usize>,
}

impl EffectGroup {
    fn normalize(&mut self) {
        self.add.sort_unstable();
        self.add.dedup();
        self.delete.sort_unstable();
        self.delete.dedup();
        // Adds win over deletes of the same atom.
        let add = &self.add;
        self.delete.retain(|d| add.binary_search(d).is_err());
    }
}

type Bindings<'t> = Vec<(&'t str, &'t str)>;

impl<'t, 'a> Grounder<'t, 'a> {
    fn new(task: &'t LinkedTask<'a>, limits: GroundingLimits) -> Self {
        let fluents = task.domain.actions.iter().flat_map(|a| a.effect_predicates()).collect();
        Self {
            task,
            limits,
            fluents,
            init: task.problem.init.iter().collect(),
            atoms: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn intern(&mut self, atom: GroundAtom) -> Result<usize, GroundingError> {
        if let Some(&i) = self.index.get(&atom) {
            return Ok(i);
        }
        let i = self.atoms.len();
        if i >= self.limits.max_atoms {
            return Err(GroundingError::GroundingExplosion {
                what: "atom",
                count: i + 1,
                cap: self.limits.max_atoms,
            });
        }
        self.atoms.push(atom.clone());
        self.index.insert(atom, i);
        Ok(i)
    }

    fn resolve(term: &'t Term, binding: &Bindings<'t>) -> &'t str {
        match term {
            Term::Const(c) => c,
            Term::Var(v) => binding
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, value)| *value)
                .expect("validated formulas have no free variables"),
        }
    }

    fn ground_atom(predicate: &str, args: &'t [Term], binding: &Bindings<'t>) -> GroundAtom {
        GroundAtom {
            predicate: predicate.to_string(),
            args: args.iter().map(|t| Self::resolve(t, binding).to_string()).collect(),
        }
    }

    /// All assignments of `vars` to objects of their declared types.
    fn quantified(&self, vars: &'t [TypedName]) -> Vec<Vec<(&'t str, &'t str)>> {
        let task: &'t LinkedTask<'a> = self.task;
        let mut out = vec![Vec::new()];
        for v in vars {
            let objects = task.objects_of(&v.ty);
            let mut next = Vec::with_capacity(out.len() * objects.len());
            for prefix in &out {
                for &o in &objects {
                    let mut b = prefix.clone();
                    b.push((v.name.as_str(), o));
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    fn condition(&mut self, f: &'t Formula, binding: &mut Bindings<'t>) -> Result<GroundFormula, GroundingError> {
        Ok(match f {
            Formula::Atom { predicate, args } => {
                let atom = Self::ground_atom(predicate, args, binding);
                if self.fluents.contains(predicate.as_str()) {
                    GroundFormula::Atom(self.intern(atom)?)
                } else if self.init.contains(&atom) {
                    GroundFormula::True
                } else {
                    GroundFormula::False
                }
            }
            Formula::Eq(a, b) => {
                if Self::resolve(a, binding) == Self::resolve(b, binding) {
                    GroundFormula::True
                } else {
                    GroundFormula::False
                }
            }
            Formula::Not(inner) => GroundFormula::not(self.condition(inner, binding)?),
            Formula::And(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for p in parts {
                    let g = self.condition(p, binding)?;
                    if g == GroundFormula::False {
                        return Ok(GroundFormula::False);
                    }
                    out.push(g);
                }
                GroundFormula::and(out)
            }
            Formula::Or(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for p in parts {
                    out.push(self.condition(p, binding)?);
                }
                GroundFormula::or(out)
            }
            Formula::Forall(vars, body) => {
                let mut out = Vec::new();
                for assignment in self.quantified(vars) {
                    let depth = binding.len();
                    binding.extend(assignment);
                    let g = self.condition(body, binding);
                    binding.truncate(depth);
                    let g = g?;
                    if g == GroundFormula::False {
                        return Ok(GroundFormula::False);
                    }
                    out.push(g);
                }
                GroundFormula::and(out)
            }
            Formula::When(..) => unreachable!("validated conditions contain no `when`"),
        })
    }

    fn effect(
        &mut self,
        f: &'t Formula,
        binding: &mut Bindings<'t>,
        group: &mut EffectGroup,
        conditional: &mut Vec<(GroundFormula, EffectGroup)>,
    ) -> Result<(), GroundingError> {
        match f {
            Formula::Atom { predicate, args } => {
                let atom = Self::ground_atom(predicate, args, binding);
                group.add.push(self.intern(atom)?);
            }
            Formula::Not(inner) => {
                if let Formula::Atom { predicate, args } = inner.as_ref() {
                    let atom = Self::ground_atom(predicate, args, binding);
                    group.delete.push(self.intern(atom)?);
                }
            }
            Formula::And(parts) => {
                for p in parts {
                    self.effect(p, binding, group, conditional)?;
                }
            }
            Formula::Forall(vars, body) => {
                for assignment in self.quantified(vars) {
                    let depth = binding.len();
                    binding.extend(assignment);
                    let r = self.effect(body, binding, group, conditional);
                    binding.truncate(depth);
                    r?;
                }
            }
            Formula::When(cond, eff) => {
                let cond = self.condition(cond, binding)?;
                if cond != GroundFormula::False {
                    let mut inner = EffectGroup::default();
                    let mut nested = Vec::new();
                    self.effect(eff, binding, &mut inner, &mut nested)?;
                    inner.normalize();
                    if !inner.add.is_empty() || !inner.delete.is_empty() {
                        conditional.push((cond, inner));
                    }
                }
            }
            Formula::Eq(..) | Formula::Or(_) => {}
        }
        Ok(())
    }

    fn instantiate(
        &mut self,
        name: &str,
        params: &Bindings<'t>,
        precondition: &'t Formula,
        effect: &'t Formula,
    ) -> Result<Option<GroundAction>, GroundingError> {
        let mut binding = params.clone();
        let pre = self.condition(precondition, &mut binding)?;
        if pre == GroundFormula::False {
            return Ok(None);
        }
        let mut group = EffectGroup::default();
        let mut conditional = Vec::new();
        self.effect(effect, &mut binding, &mut group, &mut conditional)?;
        group.normalize();

        // No deletes, no conditional effects and only adds of atoms the
        // precondition already demands: the action can never change a state.
        if group.delete.is_empty() && conditional.is_empty() {
            let required = pre.positive_conjuncts();
            if group.add.iter().all(|a| required.contains(a)) {
                return Ok(None);
            }
        }

        Ok(Some(GroundAction {
            name: name.to_string(),
            args: params.iter().map(|(_, o)| o.to_string()).collect(),
            precondition: pre,
            add: group.add,
            delete: group.delete,
            conditional: conditional
                .into_iter()
                .map(|(condition, g)| ConditionalEffect {
                    condition,
                    add: g.add,
                    delete: g.delete,
                })
                .collect(),
        }))
    }
}
