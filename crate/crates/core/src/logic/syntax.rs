use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// A first-order term over a many-sorted signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Applies a simultaneous variable-to-term replacement.
    pub fn replace(&self, sub: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => sub.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.replace(sub)).collect()),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

/// Function symbol type: argument sorts and result sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionType {
    pub args: Vec<String>,
    pub result: String,
}

/// Many-sorted signature `⟨S, R, F⟩`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub sorts: BTreeSet<String>,
    pub relations: BTreeMap<String, Vec<String>>,
    pub functions: BTreeMap<String, FunctionType>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sort(mut self, s: impl Into<String>) -> Self {
        self.sorts.insert(s.into());
        self
    }

    pub fn with_relation(mut self, r: impl Into<String>, args: &[&str]) -> Self {
        self.relations.insert(r.into(), args.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn with_function(mut self, f: impl Into<String>, args: &[&str], result: &str) -> Self {
        self.functions.insert(
            f.into(),
            FunctionType { args: args.iter().map(|s| s.to_string()).collect(), result: result.to_string() },
        );
        self
    }

    /// True if `name` is used by a sort, relation or function symbol.
    pub fn uses_name(&self, name: &str) -> bool {
        self.sorts.contains(name) || self.relations.contains_key(name) || self.functions.contains_key(name)
    }

    /// Union of two signatures; entries of `other` win on conflicting names.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut out = self.clone();
        out.sorts.extend(other.sorts.iter().cloned());
        out.relations.extend(other.relations.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.functions.extend(other.functions.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty() && self.relations.is_empty() && self.functions.is_empty()
    }
}

/// Ordered list of typed variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context(pub Vec<(String, String)>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Context(pairs.iter().map(|(v, s)| (v.to_string(), s.to_string())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(v, _)| v.as_str())
    }

    pub fn sorts(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(_, s)| s.as_str())
    }

    pub fn sort_of(&self, var: &str) -> Option<&str> {
        self.0.iter().rev().find(|(v, _)| v == var).map(|(_, s)| s.as_str())
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.iter().any(|(v, _)| v == var)
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.0.iter().position(|(v, _)| v == var)
    }

    pub fn push(&mut self, var: impl Into<String>, sort: impl Into<String>) {
        self.0.push((var.into(), sort.into()));
    }

    pub fn concat(&self, other: &Context) -> Context {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Context(v)
    }

    pub fn has_distinct_vars(&self) -> bool {
        let set: BTreeSet<&str> = self.vars().collect();
        set.len() == self.0.len()
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.vars().map(str::to_string).collect()
    }
}

/// First-order formula. The coherent fragment uses only `Eq`, `Rel`, `And`,
/// `Or` and `Exists`; `⊤` is the empty conjunction and `⊥` the empty
/// disjunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, String, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, String, Box<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Or(v) if v.is_empty())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn rel(r: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel(r.into(), args)
    }

    /// Flattened n-ary conjunction: nested conjunctions are spliced in and
    /// `⊤` conjuncts dropped; a single remaining conjunct is returned as is.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    /// Flattened n-ary disjunction, dual to [`Formula::and`].
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::Or(out)
        }
    }

    pub fn exists(var: impl Into<String>, sort: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), sort.into(), Box::new(body))
    }

    /// `∃x₁…∃xₙ body`, outermost binder first.
    pub fn exists_many(ctx: &Context, body: Formula) -> Formula {
        ctx.0.iter().rev().fold(body, |acc, (v, s)| Formula::exists(v.clone(), s.clone(), acc))
    }

    pub fn forall(var: impl Into<String>, sort: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), sort.into(), Box::new(body))
    }

    pub fn not(body: Formula) -> Formula {
        Formula::Not(Box::new(body))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Rebuilds the formula bottom-up through the flattening constructors.
    pub fn normalized(&self) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => self.clone(),
            Formula::And(ps) => Formula::and(ps.iter().map(Formula::normalized)),
            Formula::Or(ps) => Formula::or(ps.iter().map(Formula::normalized)),
            Formula::Exists(v, s, b) => Formula::exists(v.clone(), s.clone(), b.normalized()),
            Formula::Forall(v, s, b) => Formula::forall(v.clone(), s.clone(), b.normalized()),
            Formula::Not(b) => Formula::not(b.normalized()),
            Formula::Implies(a, b) => Formula::implies(a.normalized(), b.normalized()),
        }
    }

    /// No negation, implication or universal quantifier anywhere.
    pub fn is_coherent(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(Formula::is_coherent),
            Formula::Exists(_, _, b) => b.is_coherent(),
            Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Rel(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_free(out)),
            Formula::Exists(v, _, b) | Formula::Forall(v, _, b) => {
                let mut inner = BTreeSet::new();
                b.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Formula::Not(b) => b.collect_free(out),
            Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
        }
    }

    /// Every variable name occurring in the formula, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Rel(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_all(out)),
            Formula::Exists(v, _, b) | Formula::Forall(v, _, b) => {
                out.insert(v.clone());
                b.collect_all(out);
            }
            Formula::Not(b) => b.collect_all(out),
            Formula::Implies(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
        }
    }

    /// Relation and function symbols used anywhere in the formula.
    pub fn symbols(&self) -> BTreeSet<String> {
        fn term_syms(t: &Term, out: &mut BTreeSet<String>) {
            if let Term::App(f, args) = t {
                out.insert(f.clone());
                args.iter().for_each(|a| term_syms(a, out));
            }
        }
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Eq(a, b) => {
                    term_syms(a, out);
                    term_syms(b, out);
                }
                Formula::Rel(r, ts) => {
                    out.insert(r.clone());
                    ts.iter().for_each(|t| term_syms(t, out));
                }
                Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| go(p, out)),
                Formula::Exists(_, _, b) | Formula::Forall(_, _, b) | Formula::Not(b) => go(b, out),
                Formula::Implies(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => Vec::new(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().collect(),
            Formula::Exists(_, _, b) | Formula::Forall(_, _, b) | Formula::Not(b) => vec![b],
            Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// Renames sort names through `map` (binder annotations only).
    pub fn map_sorts(&self, map: &dyn Fn(&str) -> String) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => self.clone(),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.map_sorts(map)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.map_sorts(map)).collect()),
            Formula::Exists(v, s, b) => Formula::Exists(v.clone(), map(s), Box::new(b.map_sorts(map))),
            Formula::Forall(v, s, b) => Formula::Forall(v.clone(), map(s), Box::new(b.map_sorts(map))),
            Formula::Not(b) => Formula::Not(Box::new(b.map_sorts(map))),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.map_sorts(map)), Box::new(b.map_sorts(map))),
        }
    }

    /// Renames relation and function symbols through `map`.
    pub fn map_symbols(&self, map: &dyn Fn(&str) -> String) -> Formula {
        fn term(t: &Term, map: &dyn Fn(&str) -> String) -> Term {
            match t {
                Term::Var(_) => t.clone(),
                Term::App(f, args) => Term::App(map(f), args.iter().map(|a| term(a, map)).collect()),
            }
        }
        match self {
            Formula::Eq(a, b) => Formula::Eq(term(a, map), term(b, map)),
            Formula::Rel(r, ts) => Formula::Rel(map(r), ts.iter().map(|t| term(t, map)).collect()),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.map_symbols(map)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.map_symbols(map)).collect()),
            Formula::Exists(v, s, b) => Formula::Exists(v.clone(), s.clone(), Box::new(b.map_symbols(map))),
            Formula::Forall(v, s, b) => Formula::Forall(v.clone(), s.clone(), Box::new(b.map_symbols(map))),
            Formula::Not(b) => Formula::Not(Box::new(b.map_symbols(map))),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.map_symbols(map)), Box::new(b.map_symbols(map))),
        }
    }
}

/// `φ ⇒ ψ` in an explicit context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sequent {
    pub ctx: Context,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(ctx: Context, lhs: Formula, rhs: Formula) -> Self {
        Sequent { ctx, lhs, rhs }
    }

    pub fn is_coherent(&self) -> bool {
        self.lhs.is_coherent() && self.rhs.is_coherent()
    }

    pub fn map_names(&self, sorts: &dyn Fn(&str) -> String, symbols: &dyn Fn(&str) -> String) -> Sequent {
        Sequent {
            ctx: Context(self.ctx.0.iter().map(|(v, s)| (v.clone(), sorts(s))).collect()),
            lhs: self.lhs.map_sorts(sorts).map_symbols(symbols),
            rhs: self.rhs.map_sorts(sorts).map_symbols(symbols),
        }
    }
}

/// A signature together with a finite list of axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Sequent>,
}

impl Theory {
    pub fn new(signature: Signature) -> Self {
        Theory { signature, axioms: Vec::new() }
    }

    pub fn with_axiom(mut self, s: Sequent) -> Self {
        self.axioms.push(s);
        self
    }

    pub fn is_coherent(&self) -> bool {
        self.axioms.iter().all(Sequent::is_coherent)
    }
}
