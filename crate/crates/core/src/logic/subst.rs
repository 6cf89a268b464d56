use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{Context, Formula, Signature, Term};
use super::LogicError;

/// `base` primed as often as needed to avoid every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding simultaneous substitution. Bound variables that would
/// capture a variable of the substituted terms are renamed with primes.
pub fn substitute(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Eq(a, b) => Formula::Eq(a.replace(map), b.replace(map)),
        Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(|t| t.replace(map)).collect()),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| substitute(p, map)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| substitute(p, map)).collect()),
        Formula::Not(b) => Formula::not(substitute(b, map)),
        Formula::Implies(a, b) => Formula::implies(substitute(a, map), substitute(b, map)),
        Formula::Exists(v, s, b) | Formula::Forall(v, s, b) => {
            let free = b.free_vars();
            let mut inner: BTreeMap<String, Term> =
                map.iter().filter(|(k, _)| *k != v && free.contains(*k)).map(|(k, t)| (k.clone(), t.clone())).collect();
            let mut range = BTreeSet::new();
            for t in inner.values() {
                t.collect_vars(&mut range);
            }
            let mut var = v.clone();
            if range.contains(v) {
                let mut avoid = range;
                avoid.extend(b.all_vars());
                avoid.extend(inner.keys().cloned());
                var = fresh_name(v, &avoid);
                inner.insert(v.clone(), Term::Var(var.clone()));
            }
            let body = substitute(b, &inner);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(var, s.clone(), body)
            } else {
                Formula::forall(var, s.clone(), body)
            }
        }
    }
}

/// A variable-to-term assignment with an optional sort check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, t: Term) -> Self {
        self.0.insert(var.into(), t);
        self
    }

    /// Checks that every bound variable of `from` receives a term of the same
    /// sort, typed in `to`.
    pub fn check(&self, sig: &Signature, from: &Context, to: &Context) -> Result<(), LogicError> {
        for (v, t) in &self.0 {
            let want = from.sort_of(v).ok_or_else(|| LogicError::UnboundVariable(v.clone()))?;
            let got = sig.term_sort(to, t)?;
            if got != want {
                return Err(LogicError::SortMismatch {
                    expected: want.to_string(),
                    found: got,
                    at: format!("substitution for {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        substitute(f, &self.0)
    }

    /// Checked application: sort-correct or an error.
    pub fn apply_checked(
        &self,
        sig: &Signature,
        from: &Context,
        to: &Context,
        f: &Formula,
    ) -> Result<Formula, LogicError> {
        self.check(sig, from, to)?;
        Ok(self.apply(f))
    }

    /// `then ∘ self`: first `self`, then `then`.
    pub fn then(&self, then: &Substitution) -> Substitution {
        let mut out: BTreeMap<String, Term> = self.0.iter().map(|(k, t)| (k.clone(), t.replace(&then.0))).collect();
        for (k, t) in &then.0 {
            out.entry(k.clone()).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }
}

/// Renames every binder to a name distinct from all other binders, from the
/// free variables and from `avoid`.
pub fn rename_apart(f: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut used: BTreeSet<String> = avoid.clone();
    used.extend(f.free_vars());
    go_apart(f, &BTreeMap::new(), &mut used)
}

fn go_apart(f: &Formula, env: &BTreeMap<String, Term>, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(a.replace(env), b.replace(env)),
        Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(|t| t.replace(env)).collect()),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| go_apart(p, env, used)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| go_apart(p, env, used)).collect()),
        Formula::Not(b) => Formula::not(go_apart(b, env, used)),
        Formula::Implies(a, b) => {
            let a = go_apart(a, env, used);
            Formula::implies(a, go_apart(b, env, used))
        }
        Formula::Exists(v, s, b) | Formula::Forall(v, s, b) => {
            let var = if used.contains(v) { fresh_name(v, used) } else { v.clone() };
            used.insert(var.clone());
            let mut inner = env.clone();
            inner.insert(v.clone(), Term::Var(var.clone()));
            let body = go_apart(b, &inner, used);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(var, s.clone(), body)
            } else {
                Formula::forall(var, s.clone(), body)
            }
        }
    }
}

/// Positional normal form: context variables become `v0, v1, …`, binders
/// `w0, w1, …` in pre-order, and connectives are flattened.
pub fn normalize(ctx: &Context, f: &Formula) -> (Context, Formula) {
    let mut env = BTreeMap::new();
    let mut out_ctx = Context::new();
    for (i, (v, s)) in ctx.0.iter().enumerate() {
        let n = format!("v{i}");
        env.insert(v.clone(), Term::Var(n.clone()));
        out_ctx.push(n, s.clone());
    }
    let mut counter = 0;
    (out_ctx, norm(&f.normalized(), &env, &mut counter))
}

fn norm(f: &Formula, env: &BTreeMap<String, Term>, k: &mut usize) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(a.replace(env), b.replace(env)),
        Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(|t| t.replace(env)).collect()),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| norm(p, env, k)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| norm(p, env, k)).collect()),
        Formula::Not(b) => Formula::not(norm(b, env, k)),
        Formula::Implies(a, b) => {
            let a = norm(a, env, k);
            Formula::implies(a, norm(b, env, k))
        }
        Formula::Exists(v, s, b) | Formula::Forall(v, s, b) => {
            let n = format!("w{k}");
            *k += 1;
            let mut inner = env.clone();
            inner.insert(v.clone(), Term::Var(n.clone()));
            let body = norm(b, &inner, k);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(n, s.clone(), body)
            } else {
                Formula::forall(n, s.clone(), body)
            }
        }
    }
}

/// Alpha-equivalence of formulas in context. Contexts must have the same
/// length and sorts; the formulas must agree after positional renaming.
pub fn alpha_eq(a: (&Context, &Formula), b: (&Context, &Formula)) -> bool {
    a.0.len() == b.0.len() && normalize(a.0, a.1) == normalize(b.0, b.1)
}
