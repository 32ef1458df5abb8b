#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use axiomforge::corpus;
use axiomforge::pddl::{
    parse_domain, parse_problem, print_canonical, Domain, Formula, Problem, Term, TypeRef, ROOT_TYPE,
};
use axiomforge::proposer::{ScriptEntry, ScriptedOracle, Trigger};
use axiomforge::search::{SearchResult, SearchTask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Atom = (String, Vec<String>);
type World = BTreeSet<Atom>;

/// Lifted reference planner: interprets schemas directly over sets of
/// string atoms, with no grounding or bitsets.
pub struct BruteForce<'a> {
    domain: &'a Domain,
    objects: Vec<(String, HashSet<String>)>,
}

pub enum BruteOutcome {
    Length(usize),
    Unsolvable,
    TooLarge,
}

impl<'a> BruteForce<'a> {
    pub fn new(domain: &'a Domain, problem: &Problem) -> Self {
        let parents: HashMap<&str, &str> = domain
            .types
            .iter()
            .map(|t| (t.name.as_str(), t.parent.as_str()))
            .collect();
        let ancestry = |ty: &TypeRef| {
            let mut out = HashSet::from([ROOT_TYPE.to_string()]);
            for name in ty.names() {
                let mut at = name.as_str();
                while out.insert(at.to_string()) {
                    match parents.get(at) {
                        Some(p) => at = p,
                        None => break,
                    }
                }
            }
            out
        };
        let mut objects: Vec<(String, HashSet<String>)> = Vec::new();
        for o in domain.constants.iter().chain(&problem.objects) {
            match objects.iter_mut().find(|(n, _)| *n == o.name) {
                Some((_, types)) => types.extend(ancestry(&o.ty)),
                None => objects.push((o.name.clone(), ancestry(&o.ty))),
            }
        }
        Self { domain, objects }
    }

    fn of_type(&self, ty: &TypeRef) -> Vec<String> {
        self.objects
            .iter()
            .filter(|(_, types)| ty.names().iter().any(|n| types.contains(n)))
            .map(|(n, _)| n.clone())
            .collect()
    }

    fn bindings(&self, params: &[axiomforge::pddl::TypedName]) -> Vec<HashMap<String, String>> {
        let mut out = vec![HashMap::new()];
        for p in params {
            let choices = self.of_type(&p.ty);
            let mut next = Vec::new();
            for b in &out {
                for c in &choices {
                    let mut nb = b.clone();
                    nb.insert(p.name.clone(), c.clone());
                    next.push(nb);
                }
            }
            out = next;
        }
        out
    }

    fn term(t: &Term, env: &HashMap<String, String>) -> String {
        match t {
            Term::Var(v) => env[v].clone(),
            Term::Const(c) => c.clone(),
        }
    }

    fn holds(&self, f: &Formula, w: &World, env: &HashMap<String, String>) -> bool {
        match f {
            Formula::Atom { predicate, args } => {
                w.contains(&(predicate.clone(), args.iter().map(|a| Self::term(a, env)).collect()))
            }
            Formula::Eq(a, b) => Self::term(a, env) == Self::term(b, env),
            Formula::Not(g) => !self.holds(g, w, env),
            Formula::And(gs) => gs.iter().all(|g| self.holds(g, w, env)),
            Formula::Or(gs) => gs.iter().any(|g| self.holds(g, w, env)),
            Formula::Forall(vars, body) => self.bindings(vars).into_iter().all(|b| {
                let mut e = env.clone();
                e.extend(b);
                self.holds(body, w, &e)
            }),
            Formula::When(..) => panic!("`when` inside a condition"),
        }
    }

    fn effects(&self, f: &Formula, w: &World, env: &HashMap<String, String>, add: &mut Vec<Atom>, del: &mut Vec<Atom>) {
        match f {
            Formula::Atom { predicate, args } => {
                add.push((predicate.clone(), args.iter().map(|a| Self::term(a, env)).collect()))
            }
            Formula::Not(g) => {
                let mut inner = Vec::new();
                self.effects(g, w, env, &mut inner, del);
                del.extend(inner);
            }
            Formula::And(gs) => gs.iter().for_each(|g| self.effects(g, w, env, add, del)),
            Formula::Forall(vars, body) => {
                for b in self.bindings(vars) {
                    let mut e = env.clone();
                    e.extend(b);
                    self.effects(body, w, &e, add, del);
                }
            }
            Formula::When(cond, eff) => {
                if self.holds(cond, w, env) {
                    self.effects(eff, w, env, add, del);
                }
            }
            Formula::Eq(..) | Formula::Or(_) => panic!("unsupported effect"),
        }
    }

    /// Shortest plan length by exhaustive breadth-first search.
    pub fn shortest(&self, problem: &Problem, max_states: usize) -> BruteOutcome {
        let init: World = problem
            .init
            .iter()
            .map(|a| (a.predicate.clone(), a.args.clone()))
            .collect();
        let empty = HashMap::new();
        let instances: Vec<_> = self
            .domain
            .actions
            .iter()
            .flat_map(|a| self.bindings(&a.params).into_iter().map(move |b| (a, b)))
            .collect();
        let mut seen = HashSet::from([init.clone()]);
        let mut queue = VecDeque::from([(init, 0)]);
        while let Some((w, d)) = queue.pop_front() {
            if self.holds(&problem.goal, &w, &empty) {
                return BruteOutcome::Length(d);
            }
            for (action, env) in &instances {
                if !self.holds(&action.precondition, &w, env) {
                    continue;
                }
                let (mut add, mut del) = (Vec::new(), Vec::new());
                self.effects(&action.effect, &w, env, &mut add, &mut del);
                let mut next = w.clone();
                for a in del {
                    next.remove(&a);
                }
                next.extend(add);
                if seen.insert(next.clone()) {
                    if seen.len() > max_states {
                        return BruteOutcome::TooLarge;
                    }
                    queue.push_back((next, d + 1));
                }
            }
        }
        BruteOutcome::Unsolvable
    }
}

/// Appends a harmless action so that the result is a distinct rule set with
/// unchanged plans.
pub fn with_noop(domain_text: &str, name: &str, precondition: &str) -> String {
    let end = domain_text.trim_end().rfind(')').expect("closing paren");
    format!(
        "{}  (:action {name} :parameters () :precondition {precondition} :effect (and))\n)\n",
        &domain_text[..end]
    )
}

/// `count` distinct seeded character-level mutations of `text`.
pub fn string_mutations(text: &str, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz()?- ".chars().collect();
    let mut seen = HashSet::from([text.to_string()]);
    let mut out = Vec::new();
    while out.len() < count {
        let mut chars: Vec<char> = text.chars().collect();
        let edits = rng.random_range(1..=12);
        for _ in 0..edits {
            let at = rng.random_range(0..chars.len());
            match rng.random_range(0..3) {
                0 => chars[at] = alphabet[rng.random_range(0..alphabet.len())],
                1 => chars.insert(at, alphabet[rng.random_range(0..alphabet.len())]),
                _ => {
                    chars.remove(at);
                }
            }
        }
        let s: String = chars.into_iter().collect();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Reference edit distance: full-matrix dynamic program over chars.
pub fn naive_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    m[0] = (0..=b.len()).collect();
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = m[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            m[i][j] = sub.min(m[i - 1][j] + 1).min(m[i][j - 1] + 1);
        }
    }
    m[a.len()][b.len()]
}

pub fn flagship_task() -> SearchTask {
    let entry = corpus::load("blocksworld").unwrap();
    SearchTask::new(
        parse_domain(entry.domain_text).unwrap(),
        parse_problem(entry.flagship().text).unwrap(),
    )
}

pub fn canonical(text: &str) -> String {
    print_canonical(&parse_domain(text).unwrap())
}

/// A proposal graph over rule sets: root -> [a1, a2], a1 -> [b1],
/// a2 -> [c], b1 -> [d]. `c` (depth 2) and `d` (depth 3) both reach the
/// goal within four steps; a1, a2 and b1 do not.
pub struct Staged {
    pub root: String,
    pub edges: Vec<(String, Vec<String>)>,
    pub c: String,
}

pub fn staged() -> Staged {
    let root = corpus::domain_text("blocksworld").unwrap().to_string();
    let a1 = with_noop(&root, "wait-a", "(arm-empty)");
    let a2 = with_noop(&root, "wait-b", "(arm-empty)");
    let b1 = with_noop(&a1, "wait-c", "(arm-empty)");
    let c = with_noop(corpus::BLOCKSWORLD_MULTI_LIFT, "wait-d", "(arm-empty)");
    let d = with_noop(corpus::BLOCKSWORLD_MID_EXTRACT, "wait-e", "(arm-empty)");
    let edges = vec![
        (root.clone(), vec![a1.clone(), a2.clone()]),
        (a1, vec![b1.clone()]),
        (a2, vec![c.clone()]),
        (b1, vec![d]),
    ];
    Staged { root, edges, c }
}

impl Staged {
    pub fn oracle(&self) -> ScriptedOracle {
        ScriptedOracle::new(
            self.edges
                .iter()
                .map(|(from, to)| ScriptEntry::new(Trigger::CanonicalText(from.clone()), to.clone()))
                .collect(),
        )
    }

    /// Depth of the shallowest qualifying node, found by walking the
    /// proposal graph with the brute-force planner as judge.
    pub fn minimal_depth(&self, target: usize) -> usize {
        let problem = parse_problem(corpus::load("blocksworld").unwrap().flagship().text).unwrap();
        let graph: HashMap<&str, &Vec<String>> = self.edges.iter().map(|(f, t)| (f.as_str(), t)).collect();
        let mut queue = VecDeque::from([(self.root.as_str(), 0)]);
        while let Some((node, depth)) = queue.pop_front() {
            let domain = parse_domain(node).unwrap();
            if let BruteOutcome::Length(k) = BruteForce::new(&domain, &problem).shortest(&problem, 100_000) {
                if k <= target {
                    return depth;
                }
            }
            for child in graph.get(node).into_iter().flat_map(|c| c.iter()) {
                queue.push_back((child, depth + 1));
            }
        }
        panic!("no qualifying node");
    }
}

pub fn depth_of(result: &SearchResult, id: usize) -> usize {
    let mut depth = 0;
    let mut at = id;
    while let Some(p) = result.candidates[at].parent {
        at = p;
        depth += 1;
    }
    depth
}
