//! Domain and problem parsing with structural validation.
//!
//! Validation runs while the AST is built so every diagnostic keeps the
//! position of the offending construct.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::error::{Diagnostic, DiagnosticKind, Pos};
use super::sexpr::{read_document, syntax, SExpr};

/// Heads outside the supported subset; reported as unsupported rather than
/// as undeclared predicates.
const UNSUPPORTED_HEADS: &[&str] = &[
    "exists",
    "imply",
    "increase",
    "decrease",
    "assign",
    "scale-up",
    "scale-down",
    ">",
    "<",
    ">=",
    "<=",
    "preference",
    "always",
    "sometime",
];

const UNSUPPORTED_SECTIONS: &[&str] = &[
    ":functions",
    ":durative-action",
    ":derived",
    ":constraints",
    ":metric",
    ":timed-initial-literals",
];

#[derive(Default)]
struct Diags(Vec<Diagnostic>);

impl Diags {
    fn push(&mut self, pos: Pos, kind: DiagnosticKind) {
        self.0.push(Diagnostic::new(pos, kind));
    }

    fn syntax(&mut self, pos: Pos, expected: &str, found: &str) {
        self.0.push(syntax(pos, expected, found));
    }
}

/// Parses and validates a domain.
pub fn parse_domain(text: &str) -> Result<Domain, Vec<Diagnostic>> {
    let doc = read_document(text).map_err(|d| vec![d])?;
    let mut diags = Diags::default();
    let sections = match header(&doc, "domain", &mut diags) {
        Some(s) => s,
        None => return Err(diags.0),
    };
    let (name, sections) = sections;

    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };

    // Declarations first so actions can be checked regardless of section order.
    let mut action_sections = Vec::new();
    let mut has_types_section = false;
    for section in sections {
        let Some((head, body, pos)) = section_parts(section, &mut diags) else {
            continue;
        };
        match head {
            ":requirements" => domain.requirements = requirements(body, &mut diags),
            ":types" => {
                has_types_section = true;
                domain.types = type_decls(body, &mut diags)
            }
            ":constants" => domain.constants = typed_list(body, false, &mut diags),
            ":predicates" => domain.predicates = predicate_decls(body, &mut diags),
            ":action" => action_sections.push((body, pos)),
            h if UNSUPPORTED_SECTIONS.contains(&h) => {
                diags.push(pos, DiagnosticKind::UnsupportedConstruct(h.to_string()))
            }
            other => diags.syntax(pos, "a domain section", &format!("`{other}`")),
        }
    }

    if !has_types_section {
        domain.types = implicit_types(&domain, &action_sections);
    }
    let declared_types = declared_type_names(&domain.types);
    check_type_decls(&domain.types, &declared_types, section_pos(&doc), &mut diags);
    check_typed_names(&domain.constants, &declared_types, section_pos(&doc), &mut diags);
    let mut seen = HashSet::new();
    for c in &domain.constants {
        if !seen.insert(c.name.as_str()) {
            diags.push(section_pos(&doc), DiagnosticKind::DuplicateObject(c.name.clone()));
        }
    }
    for p in &domain.predicates {
        check_typed_names(&p.params, &declared_types, section_pos(&doc), &mut diags);
    }

    let arities: HashMap<&str, usize> = domain.predicates.iter().map(|p| (p.name.as_str(), p.arity())).collect();
    let constants: HashSet<&str> = domain.constants.iter().map(|c| c.name.as_str()).collect();

    let mut actions = Vec::new();
    let mut action_names = HashSet::new();
    for (body, pos) in action_sections {
        let scope = FormulaScope {
            arities: Some(&arities),
            constants: Some(&constants),
            types: &declared_types,
        };
        if let Some(action) = action(body, pos, &scope, &mut diags) {
            if !action_names.insert(action.name.clone()) {
                diags.push(pos, DiagnosticKind::DuplicateAction(action.name.clone()));
            }
            actions.push(action);
        }
    }
    domain.actions = actions;

    if diags.0.is_empty() {
        Ok(domain)
    } else {
        Err(diags.0)
    }
}

/// Parses a problem. Predicate and object checks against a domain happen in
/// [`link`](super::link).
pub fn parse_problem(text: &str) -> Result<Problem, Vec<Diagnostic>> {
    let doc = read_document(text).map_err(|d| vec![d])?;
    let mut diags = Diags::default();
    let Some((name, sections)) = header(&doc, "problem", &mut diags) else {
        return Err(diags.0);
    };

    let mut domain_name = None;
    let mut requirements_list = Vec::new();
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = None;

    for section in sections {
        let Some((head, body, pos)) = section_parts(section, &mut diags) else {
            continue;
        };
        match head {
            ":domain" => match body {
                [SExpr::Symbol { text, .. }] => domain_name = Some(text.clone()),
                _ => diags.syntax(pos, "a domain name", "something else"),
            },
            ":requirements" => requirements_list = requirements(body, &mut diags),
            ":objects" => objects = typed_list(body, false, &mut diags),
            ":init" => init = init_atoms(body, &mut diags),
            ":goal" => match body {
                [f] => {
                    let types = HashSet::new();
                    let scope = FormulaScope {
                        arities: None,
                        constants: None,
                        types: &types,
                    };
                    let mut fp = FormulaParser {
                        scope: &scope,
                        owner: "goal",
                        bound: Vec::new(),
                        diags: &mut diags,
                    };
                    goal = fp.condition(f, Context::Goal);
                }
                _ => diags.syntax(pos, "exactly one goal formula", "something else"),
            },
            h if UNSUPPORTED_SECTIONS.contains(&h) => {
                diags.push(pos, DiagnosticKind::UnsupportedConstruct(h.to_string()))
            }
            other => diags.syntax(pos, "a problem section", &format!("`{other}`")),
        }
    }

    let mut seen = HashSet::new();
    for o in &objects {
        if !seen.insert(o.name.as_str()) {
            diags.push(section_pos(&doc), DiagnosticKind::DuplicateObject(o.name.clone()));
        }
    }
    let domain_name = match domain_name {
        Some(d) => d,
        None => {
            diags.syntax(doc.pos(), "`(:domain ...)`", "no domain section");
            String::new()
        }
    };
    if goal.is_none() && diags.0.is_empty() {
        diags.syntax(doc.pos(), "`(:goal ...)`", "no goal section");
    }

    match (diags.0.is_empty(), goal) {
        (true, Some(goal)) => Ok(Problem {
            name,
            domain: domain_name,
            requirements: requirements_list,
            objects,
            init,
            goal,
        }),
        _ => Err(diags.0),
    }
}

fn section_pos(doc: &SExpr) -> Pos {
    doc.pos()
}

/// Checks `(define (<kind> name) sections...)` and returns the name and
/// remaining sections.
fn header<'a>(doc: &'a SExpr, kind: &str, diags: &mut Diags) -> Option<(String, &'a [SExpr])> {
    let items = doc.as_list()?;
    match items.first().and_then(SExpr::as_symbol) {
        Some("define") => {}
        _ => {
            diags.syntax(doc.pos(), "`(define ...)`", &doc.describe());
            return None;
        }
    }
    let Some(decl) = items.get(1) else {
        diags.syntax(doc.pos(), &format!("`({kind} <name>)`"), "end of list");
        return None;
    };
    match decl.as_list() {
        Some([SExpr::Symbol { text: k, .. }, SExpr::Symbol { text: name, .. }]) if k == kind => {
            Some((name.clone(), &items[2..]))
        }
        _ => {
            diags.syntax(decl.pos(), &format!("`({kind} <name>)`"), &decl.describe());
            None
        }
    }
}

fn section_parts<'a>(section: &'a SExpr, diags: &mut Diags) -> Option<(&'a str, &'a [SExpr], Pos)> {
    match section.as_list() {
        Some([SExpr::Symbol { text, .. }, rest @ ..]) if text.starts_with(':') => {
            Some((text.as_str(), rest, section.pos()))
        }
        _ => {
            diags.syntax(section.pos(), "a `(:keyword ...)` section", &section.describe());
            None
        }
    }
}

fn requirements(body: &[SExpr], diags: &mut Diags) -> Vec<Requirement> {
    let mut out = Vec::new();
    for item in body {
        match item.as_symbol() {
            Some(kw) => match Requirement::from_keyword(kw) {
                Some(r) if !out.contains(&r) => out.push(r),
                Some(_) => {}
                None => diags.push(item.pos(), DiagnosticKind::UnsupportedConstruct(kw.to_string())),
            },
            None => diags.syntax(item.pos(), "a requirement flag", &item.describe()),
        }
    }
    out
}

/// Parses `a b - t c ?d - (either x y) e` style lists. Names without a type
/// get the root type.
fn typed_list(body: &[SExpr], variables: bool, diags: &mut Diags) -> Vec<TypedName> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut iter = body.iter();
    while let Some(item) = iter.next() {
        match item {
            SExpr::Symbol { text, .. } if text == "-" => {
                let ty = match iter.next() {
                    Some(t) => type_ref(t, diags),
                    None => {
                        diags.syntax(item.pos(), "a type after `-`", "end of list");
                        None
                    }
                };
                if pending.is_empty() {
                    diags.syntax(item.pos(), "a name before `-`", "`-`");
                }
                let ty = ty.unwrap_or_else(TypeRef::root);
                out.extend(pending.drain(..).map(|n| TypedName::new(n, ty.clone())));
            }
            SExpr::Symbol { text, pos } => {
                let is_var = text.starts_with('?');
                if variables && is_var && text.len() > 1 {
                    pending.push(text[1..].to_string());
                } else if !variables && !is_var {
                    pending.push(text.clone());
                } else {
                    let expected = if variables { "a `?variable`" } else { "an object name" };
                    diags.syntax(*pos, expected, &format!("`{text}`"));
                }
            }
            SExpr::List { .. } => {
                let expected = if variables { "a `?variable`" } else { "a name" };
                diags.syntax(item.pos(), expected, &item.describe());
            }
        }
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, TypeRef::root())));
    out
}

fn type_ref(item: &SExpr, diags: &mut Diags) -> Option<TypeRef> {
    match item {
        SExpr::Symbol { text, .. } => Some(TypeRef::Named(text.clone())),
        SExpr::List { items, pos } => match items.split_first() {
            Some((head, rest)) if head.as_symbol() == Some("either") && !rest.is_empty() => {
                let mut names = Vec::new();
                for r in rest {
                    match r.as_symbol() {
                        Some(n) => names.push(n.to_string()),
                        None => diags.syntax(r.pos(), "a type name", &r.describe()),
                    }
                }
                Some(TypeRef::Either(names))
            }
            _ => {
                diags.syntax(*pos, "a type or `(either ...)`", &item.describe());
                None
            }
        },
    }
}

fn type_decls(body: &[SExpr], diags: &mut Diags) -> Vec<TypeDecl> {
    let mut out: Vec<TypeDecl> = Vec::new();
    for tn in typed_list(body, false, diags) {
        if tn.name == ROOT_TYPE || out.iter().any(|t| t.name == tn.name) {
            continue;
        }
        let parent = match tn.ty {
            TypeRef::Named(p) => p,
            TypeRef::Either(_) => {
                let pos = body.first().map(SExpr::pos).unwrap_or_default();
                diags.push(pos, DiagnosticKind::UnsupportedConstruct("either in :types".into()));
                ROOT_TYPE.to_string()
            }
        };
        out.push(TypeDecl { name: tn.name, parent });
    }
    out
}

/// Without a `:types` section, every type named in predicates, constants or
/// action parameters is taken as a direct subtype of the root type.
fn implicit_types(domain: &Domain, actions: &[(&[SExpr], Pos)]) -> Vec<TypeDecl> {
    let mut names: Vec<String> = Vec::new();
    let mut note = |list: &[TypedName]| {
        for tn in list {
            for t in tn.ty.names() {
                if t != ROOT_TYPE && !names.contains(t) {
                    names.push(t.clone());
                }
            }
        }
    };
    note(&domain.constants);
    for p in &domain.predicates {
        note(&p.params);
    }
    for (body, _) in actions {
        let mut items = body.iter();
        while let Some(item) = items.next() {
            if item.as_symbol() == Some(":parameters") {
                if let Some(list) = items.next().and_then(SExpr::as_list) {
                    note(&typed_list(list, true, &mut Diags::default()));
                }
            }
        }
    }
    names
        .into_iter()
        .map(|name| TypeDecl {
            name,
            parent: ROOT_TYPE.to_string(),
        })
        .collect()
}

fn declared_type_names(types: &[TypeDecl]) -> HashSet<String> {
    let mut names: HashSet<String> = types.iter().map(|t| t.name.clone()).collect();
    names.insert(ROOT_TYPE.to_string());
    names
}

fn check_type_decls(types: &[TypeDecl], declared: &HashSet<String>, pos: Pos, diags: &mut Diags) {
    for t in types {
        if !declared.contains(&t.parent) {
            diags.push(pos, DiagnosticKind::UnknownType(t.parent.clone()));
        }
    }
}

fn check_typed_names(names: &[TypedName], declared: &HashSet<String>, pos: Pos, diags: &mut Diags) {
    for tn in names {
        for t in tn.ty.names() {
            if !declared.contains(t) {
                diags.push(pos, DiagnosticKind::UnknownType(t.clone()));
            }
        }
    }
}

fn predicate_decls(body: &[SExpr], diags: &mut Diags) -> Vec<PredicateDecl> {
    let mut out: Vec<PredicateDecl> = Vec::new();
    for item in body {
        match item.as_list() {
            Some([SExpr::Symbol { text: name, .. }, params @ ..]) => {
                let params = typed_list(params, true, diags);
                check_distinct(&params, item.pos(), diags);
                if out.iter().any(|p| &p.name == name) {
                    diags.push(item.pos(), DiagnosticKind::DuplicatePredicate(name.clone()));
                    continue;
                }
                out.push(PredicateDecl {
                    name: name.clone(),
                    params,
                });
            }
            _ => diags.syntax(item.pos(), "a predicate declaration", &item.describe()),
        }
    }
    out
}

fn check_distinct(params: &[TypedName], pos: Pos, diags: &mut Diags) {
    let mut seen = HashSet::new();
    for p in params {
        if !seen.insert(p.name.as_str()) {
            diags.push(pos, DiagnosticKind::DuplicateParameter(p.name.clone()));
        }
    }
}

fn init_atoms(body: &[SExpr], diags: &mut Diags) -> Vec<GroundAtom> {
    let mut out: Vec<GroundAtom> = Vec::new();
    for item in body {
        match item.as_list() {
            Some([SExpr::Symbol { text: head, .. }, args @ ..]) => {
                if head == "not" {
                    diags.push(
                        item.pos(),
                        DiagnosticKind::MisplacedConstruct {
                            construct: "not".into(),
                            context: "the initial state".into(),
                        },
                    );
                    continue;
                }
                if head == "=" || UNSUPPORTED_HEADS.contains(&head.as_str()) {
                    diags.push(item.pos(), DiagnosticKind::UnsupportedConstruct(head.clone()));
                    continue;
                }
                let mut ground = Vec::new();
                for a in args {
                    match a.as_symbol() {
                        Some(s) if !s.starts_with('?') => ground.push(s.to_string()),
                        _ => diags.syntax(a.pos(), "an object name", &a.describe()),
                    }
                }
                let atom = GroundAtom {
                    predicate: head.clone(),
                    args: ground,
                };
                if !out.contains(&atom) {
                    out.push(atom);
                }
            }
            _ => diags.syntax(item.pos(), "a ground atom", &item.describe()),
        }
    }
    out
}

fn action(body: &[SExpr], pos: Pos, scope: &FormulaScope<'_>, diags: &mut Diags) -> Option<ActionSchema> {
    let Some((name_expr, rest)) = body.split_first() else {
        diags.syntax(pos, "an action name", "end of list");
        return None;
    };
    let Some(name) = name_expr.as_symbol().map(str::to_string) else {
        diags.syntax(name_expr.pos(), "an action name", &name_expr.describe());
        return None;
    };

    let mut params = Vec::new();
    let mut precondition = None;
    let mut effect = None;
    let mut i = 0;
    while i < rest.len() {
        let key = &rest[i];
        let Some(value) = rest.get(i + 1) else {
            diags.syntax(key.pos(), "a key/value pair", &key.describe());
            break;
        };
        match key.as_symbol() {
            Some(":parameters") => match value.as_list() {
                Some(items) => {
                    params = typed_list(items, true, diags);
                    check_distinct(&params, value.pos(), diags);
                    check_typed_names(&params, scope.types, value.pos(), diags);
                }
                None => diags.syntax(value.pos(), "a parameter list", &value.describe()),
            },
            Some(":precondition") => precondition = Some(value),
            Some(":effect") => effect = Some(value),
            _ => diags.syntax(
                key.pos(),
                "`:parameters`, `:precondition` or `:effect`",
                &key.describe(),
            ),
        }
        i += 2;
    }

    let bound: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    let mut fp = FormulaParser {
        scope,
        owner: &name,
        bound,
        diags,
    };
    let precondition = match precondition {
        Some(p) => fp.condition(p, Context::Precondition)?,
        None => Formula::empty(),
    };
    let effect = match effect {
        Some(e) => fp.effect(e, false)?,
        None => Formula::empty(),
    };
    Some(ActionSchema {
        name,
        params,
        precondition,
        effect,
    })
}

struct FormulaScope<'a> {
    /// Predicate arities; `None` defers predicate checks (problem goals).
    arities: Option<&'a HashMap<&'a str, usize>>,
    /// Domain constants; `None` accepts any object name.
    constants: Option<&'a HashSet<&'a str>>,
    types: &'a HashSet<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Precondition,
    Goal,
}

impl Context {
    fn describe(self) -> &'static str {
        match self {
            Context::Precondition => "a precondition",
            Context::Goal => "a goal",
        }
    }
}

struct FormulaParser<'s, 'd> {
    scope: &'s FormulaScope<'s>,
    owner: &'s str,
    bound: Vec<String>,
    diags: &'d mut Diags,
}

impl FormulaParser<'_, '_> {
    fn misplaced(&mut self, pos: Pos, construct: &str, context: &str) {
        self.diags.push(
            pos,
            DiagnosticKind::MisplacedConstruct {
                construct: construct.to_string(),
                context: context.to_string(),
            },
        );
    }

    fn condition(&mut self, expr: &SExpr, ctx: Context) -> Option<Formula> {
        let items = match expr.as_list() {
            Some(items) => items,
            None => {
                self.diags.syntax(expr.pos(), "a formula", &expr.describe());
                return None;
            }
        };
        let Some((head, args)) = items.split_first() else {
            return Some(Formula::empty());
        };
        let Some(head) = head.as_symbol() else {
            self.diags.syntax(head.pos(), "a formula head", &head.describe());
            return None;
        };
        match head {
            "and" | "or" => {
                let mut parts = Vec::with_capacity(args.len());
                let mut ok = true;
                for a in args {
                    match self.condition(a, ctx) {
                        Some(f) => parts.push(f),
                        None => ok = false,
                    }
                }
                ok.then(|| {
                    if head == "and" {
                        Formula::And(parts)
                    } else {
                        Formula::Or(parts)
                    }
                })
            }
            "not" => match args {
                [inner] => self.condition(inner, ctx).map(|f| Formula::Not(Box::new(f))),
                _ => {
                    self.diags.syntax(expr.pos(), "`(not <formula>)`", &expr.describe());
                    None
                }
            },
            "=" => match args {
                [a, b] => Some(Formula::Eq(self.term(a)?, self.term(b)?)),
                _ => {
                    self.diags.syntax(expr.pos(), "`(= <term> <term>)`", &expr.describe());
                    None
                }
            },
            "forall" => {
                let (vars, body) = self.quantifier(expr, args)?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().map(|v| v.name.clone()));
                let body = self.condition(body, ctx);
                self.bound.truncate(depth);
                Some(Formula::Forall(vars, Box::new(body?)))
            }
            "when" => {
                self.misplaced(expr.pos(), "when", ctx.describe());
                None
            }
            _ => self.atom(expr.pos(), head, args),
        }
    }

    fn effect(&mut self, expr: &SExpr, inside_when: bool) -> Option<Formula> {
        let items = match expr.as_list() {
            Some(items) => items,
            None => {
                self.diags.syntax(expr.pos(), "an effect", &expr.describe());
                return None;
            }
        };
        let Some((head, args)) = items.split_first() else {
            return Some(Formula::empty());
        };
        let Some(head) = head.as_symbol() else {
            self.diags.syntax(head.pos(), "an effect head", &head.describe());
            return None;
        };
        match head {
            "and" => {
                let mut parts = Vec::with_capacity(args.len());
                let mut ok = true;
                for a in args {
                    match self.effect(a, inside_when) {
                        Some(f) => parts.push(f),
                        None => ok = false,
                    }
                }
                ok.then_some(Formula::And(parts))
            }
            "not" => match args {
                [inner] => match inner.as_list() {
                    Some([SExpr::Symbol { text, .. }, rest @ ..])
                        if !matches!(text.as_str(), "and" | "or" | "not" | "forall" | "when" | "=") =>
                    {
                        let atom = self.atom(inner.pos(), text, rest)?;
                        Some(Formula::Not(Box::new(atom)))
                    }
                    _ => {
                        self.misplaced(inner.pos(), "non-atomic negation", "an effect");
                        None
                    }
                },
                _ => {
                    self.diags.syntax(expr.pos(), "`(not <atom>)`", &expr.describe());
                    None
                }
            },
            "forall" => {
                let (vars, body) = self.quantifier(expr, args)?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().map(|v| v.name.clone()));
                let body = self.effect(body, inside_when);
                self.bound.truncate(depth);
                Some(Formula::Forall(vars, Box::new(body?)))
            }
            "when" => {
                if inside_when {
                    self.misplaced(expr.pos(), "when", "a conditional effect");
                    return None;
                }
                match args {
                    [cond, eff] => {
                        let cond = self.condition(cond, Context::Precondition);
                        let eff = self.effect(eff, true);
                        Some(Formula::When(Box::new(cond?), Box::new(eff?)))
                    }
                    _ => {
                        self.diags
                            .syntax(expr.pos(), "`(when <condition> <effect>)`", &expr.describe());
                        None
                    }
                }
            }
            "or" | "=" => {
                self.misplaced(expr.pos(), head, "an effect");
                None
            }
            _ => self.atom(expr.pos(), head, args),
        }
    }

    fn quantifier<'e>(&mut self, expr: &SExpr, args: &'e [SExpr]) -> Option<(Vec<TypedName>, &'e SExpr)> {
        match args {
            [vars, body] => match vars.as_list() {
                Some(items) => {
                    let vars = typed_list(items, true, self.diags);
                    check_distinct(&vars, expr.pos(), self.diags);
                    if self.scope.arities.is_some() {
                        check_typed_names(&vars, self.scope.types, expr.pos(), self.diags);
                    }
                    Some((vars, body))
                }
                None => {
                    self.diags.syntax(vars.pos(), "a variable list", &vars.describe());
                    None
                }
            },
            _ => {
                self.diags
                    .syntax(expr.pos(), "`(forall (<vars>) <formula>)`", &expr.describe());
                None
            }
        }
    }

    fn atom(&mut self, pos: Pos, head: &str, args: &[SExpr]) -> Option<Formula> {
        let declared = match self.scope.arities {
            Some(arities) => arities.get(head).copied(),
            None => None,
        };
        if declared.is_none() {
            if UNSUPPORTED_HEADS.contains(&head) {
                self.diags
                    .push(pos, DiagnosticKind::UnsupportedConstruct(head.to_string()));
                return None;
            }
            if self.scope.arities.is_some() {
                self.diags
                    .push(pos, DiagnosticKind::UndeclaredPredicate(head.to_string()));
                return None;
            }
        }
        let mut terms = Vec::with_capacity(args.len());
        let mut ok = true;
        for a in args {
            match self.term(a) {
                Some(t) => terms.push(t),
                None => ok = false,
            }
        }
        if let Some(expected) = declared {
            if expected != args.len() {
                self.diags.push(
                    pos,
                    DiagnosticKind::ArityMismatch {
                        predicate: head.to_string(),
                        expected,
                        got: args.len(),
                    },
                );
                return None;
            }
        }
        ok.then(|| Formula::atom(head, terms))
    }

    fn term(&mut self, expr: &SExpr) -> Option<Term> {
        match expr {
            SExpr::Symbol { text, pos } => {
                if let Some(var) = text.strip_prefix('?') {
                    if !self.bound.iter().any(|b| b == var) {
                        self.diags.push(
                            *pos,
                            DiagnosticKind::UnboundVariable {
                                action: self.owner.to_string(),
                                var: var.to_string(),
                            },
                        );
                        return None;
                    }
                    Some(Term::Var(var.to_string()))
                } else {
                    if let Some(constants) = self.scope.constants {
                        if !constants.contains(text.as_str()) {
                            self.diags.push(*pos, DiagnosticKind::UndeclaredConstant(text.clone()));
                            return None;
                        }
                    }
                    Some(Term::Const(text.clone()))
                }
            }
            SExpr::List { pos, .. } => {
                self.diags.syntax(*pos, "a term", &expr.describe());
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<DiagnosticKind> {
        parse_domain(text).unwrap_err().into_iter().map(|d| d.kind).collect()
    }

    #[test]
    fn empty_domain_is_well_formed() {
        let d = parse_domain("(define (domain empty) (:requirements :strips) (:predicates))").unwrap();
        assert_eq!(d.name, "empty");
        assert!(d.actions.is_empty());
        assert!(d.predicates.is_empty());
        assert_eq!(d.requirements, vec![Requirement::Strips]);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let k = kinds(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x) :precondition (p ?x ?x) :effect (p ?x)))",
        );
        assert_eq!(
            k,
            vec![DiagnosticKind::ArityMismatch {
                predicate: "p".into(),
                expected: 1,
                got: 2
            }]
        );
    }

    #[test]
    fn unbound_variable_is_reported() {
        let k = kinds(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x) :precondition (p ?y) :effect (p ?x)))",
        );
        assert_eq!(
            k,
            vec![DiagnosticKind::UnboundVariable {
                action: "a".into(),
                var: "y".into()
            }]
        );
    }

    #[test]
    fn forall_binds_variables() {
        let d = parse_domain(
            "(define (domain d) (:requirements :conditional-effects) (:predicates (p ?x) (q))
               (:action a :parameters () :precondition (forall (?x) (p ?x))
                :effect (forall (?y) (when (p ?y) (not (p ?y))))))",
        )
        .unwrap();
        assert!(matches!(d.actions[0].effect, Formula::Forall(..)));
    }

    #[test]
    fn unsupported_requirement_and_section() {
        let k = kinds("(define (domain d) (:requirements :fluents) (:functions (f)))");
        assert_eq!(
            k,
            vec![
                DiagnosticKind::UnsupportedConstruct(":fluents".into()),
                DiagnosticKind::UnsupportedConstruct(":functions".into()),
            ]
        );
    }

    #[test]
    fn when_in_precondition_and_or_in_effect_are_rejected() {
        let k = kinds(
            "(define (domain d) (:predicates (p))
               (:action a :parameters () :precondition (when (p) (p)) :effect (p))
               (:action b :parameters () :precondition (p) :effect (or (p) (p))))",
        );
        assert_eq!(k.len(), 2);
        assert!(k.iter().all(|k| matches!(k, DiagnosticKind::MisplacedConstruct { .. })));
    }

    #[test]
    fn nested_when_is_rejected() {
        let k = kinds(
            "(define (domain d) (:predicates (p))
               (:action a :parameters () :precondition (p) :effect (when (p) (when (p) (p)))))",
        );
        assert!(matches!(k[0], DiagnosticKind::MisplacedConstruct { .. }));
    }

    #[test]
    fn duplicates_are_reported() {
        let k = kinds(
            "(define (domain d) (:predicates (p) (p))
               (:action a :parameters (?x ?x) :precondition (p) :effect (p))
               (:action a :parameters () :precondition (p) :effect (p)))",
        );
        assert!(k.contains(&DiagnosticKind::DuplicatePredicate("p".into())));
        assert!(k.contains(&DiagnosticKind::DuplicateParameter("x".into())));
        assert!(k.contains(&DiagnosticKind::DuplicateAction("a".into())));
    }

    #[test]
    fn undeclared_constant_and_type() {
        let k = kinds(
            "(define (domain d) (:requirements :typing) (:types a) (:predicates (p ?x - b))
               (:action g :parameters (?x - a) :precondition (p box) :effect (p ?x)))",
        );
        assert!(k.contains(&DiagnosticKind::UnknownType("b".into())));
        assert!(k.contains(&DiagnosticKind::UndeclaredConstant("box".into())));
    }

    #[test]
    fn types_are_implicit_without_types_section() {
        let d = parse_domain(
            "(define (domain d) (:requirements :typing) (:predicates (at ?x - thing ?l - place))
               (:action go :parameters (?x - thing ?a ?b - place ?v - vehicle)
                 :precondition (at ?x ?a) :effect (at ?x ?b)))",
        )
        .unwrap();
        let names: Vec<&str> = d.types.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, vec!["thing", "place", "vehicle"]);
        assert!(d.types.iter().all(|t| t.parent == ROOT_TYPE));
    }

    #[test]
    fn problem_basics() {
        let p = parse_problem(
            "(define (problem p1) (:domain blocksworld)
               (:objects a b c)
               (:init (on-table a) (on b a) (on c b) (clear c) (arm-empty))
               (:goal (and (on a b) (on b c))))",
        )
        .unwrap();
        assert_eq!(p.objects.len(), 3);
        assert_eq!(p.init.len(), 5);
        assert_eq!(p.domain, "blocksworld");
    }

    #[test]
    fn problem_empty_goal_and_duplicate_object() {
        let p = parse_problem("(define (problem e) (:domain blocksworld) (:init) (:goal (and)))").unwrap();
        assert!(p.objects.is_empty());
        assert_eq!(p.goal, Formula::And(vec![]));

        let err = parse_problem("(define (problem e) (:domain d) (:objects a a) (:init) (:goal (and)))").unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::DuplicateObject("a".into()));
    }

    #[test]
    fn goal_free_variable_is_rejected() {
        let err = parse_problem("(define (problem e) (:domain d) (:init) (:goal (p ?x)))").unwrap_err();
        assert!(matches!(err[0].kind, DiagnosticKind::UnboundVariable { .. }));
    }
}
