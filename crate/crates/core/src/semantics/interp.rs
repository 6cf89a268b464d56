use std::collections::{BTreeMap, BTreeSet};

use super::structure::FinStructure;
use crate::logic::{fresh_name, substitute, Context, Formula, Sequent, Term, Theory};

/// `M_{x⃗}(φ)`: the tuples of the context satisfying φ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretedSubset {
    pub ctx: Context,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// Value of `t` at the assignment `env` (positions of `ctx`).
pub fn eval_term(m: &FinStructure, ctx: &Context, t: &Term, env: &[usize]) -> usize {
    match t {
        Term::Var(v) => {
            let i =
                ctx.0.iter().rposition(|(w, _)| w == v).unwrap_or_else(|| panic!("variable {v} outside the context"));
            env[i]
        }
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval_term(m, ctx, a, env)).collect();
            m.functions.get(f).unwrap_or_else(|| panic!("no table for {f}")).apply(&vals)
        }
    }
}

/// `M_{x⃗}(t)` as a table from context tuples to values.
pub fn interpret_term(m: &FinStructure, ctx: &Context, t: &Term) -> BTreeMap<Vec<usize>, usize> {
    m.product(ctx)
        .into_iter()
        .map(|a| {
            let v = eval_term(m, ctx, t, &a);
            (a, v)
        })
        .collect()
}

/// Set-algebraic interpretation of a formula: equalizers, preimages,
/// intersections, unions, projection images, and complements for the
/// first-order connectives.
pub fn interpret_formula(m: &FinStructure, ctx: &Context, phi: &Formula) -> InterpretedSubset {
    InterpretedSubset { ctx: ctx.clone(), tuples: subset(m, ctx, phi) }
}

fn subset(m: &FinStructure, ctx: &Context, phi: &Formula) -> BTreeSet<Vec<usize>> {
    match phi {
        Formula::Eq(a, b) => {
            m.product(ctx).into_iter().filter(|t| eval_term(m, ctx, a, t) == eval_term(m, ctx, b, t)).collect()
        }
        Formula::Rel(r, ts) => {
            let rel = m.relation(r);
            m.product(ctx)
                .into_iter()
                .filter(|t| {
                    let img: Vec<usize> = ts.iter().map(|x| eval_term(m, ctx, x, t)).collect();
                    rel.contains(&img)
                })
                .collect()
        }
        Formula::And(ps) => {
            let Some((first, rest)) = ps.split_first() else {
                return m.product(ctx).into_iter().collect();
            };
            let mut acc = subset(m, ctx, first);
            for p in rest {
                if acc.is_empty() {
                    break;
                }
                let s = subset(m, ctx, p);
                acc = acc.intersection(&s).cloned().collect();
            }
            acc
        }
        Formula::Or(ps) => {
            let mut acc = BTreeSet::new();
            for p in ps {
                acc.extend(subset(m, ctx, p));
            }
            acc
        }
        Formula::Not(b) => {
            let s = subset(m, ctx, b);
            m.product(ctx).into_iter().filter(|t| !s.contains(t)).collect()
        }
        Formula::Implies(a, b) => {
            let sa = subset(m, ctx, a);
            let sb = subset(m, ctx, b);
            m.product(ctx).into_iter().filter(|t| !sa.contains(t) || sb.contains(t)).collect()
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            let (wide, body, universal) = open_binder(ctx, phi);
            let inner = subset(m, &wide, &body);
            if universal {
                let n = m.size(&wide.0.last().unwrap().1);
                m.product(ctx)
                    .into_iter()
                    .filter(|t| {
                        (0..n).all(|y| {
                            let mut e = t.clone();
                            e.push(y);
                            inner.contains(&e)
                        })
                    })
                    .collect()
            } else {
                inner
                    .into_iter()
                    .map(|mut t| {
                        t.pop();
                        t
                    })
                    .collect()
            }
        }
    }
}

/// Extends `ctx` by the binder of `phi`, renaming it if it clashes.
fn open_binder(ctx: &Context, phi: &Formula) -> (Context, Formula, bool) {
    let (v, s, b, universal) = match phi {
        Formula::Exists(v, s, b) => (v, s, b, false),
        Formula::Forall(v, s, b) => (v, s, b, true),
        _ => unreachable!(),
    };
    let mut wide = ctx.clone();
    if ctx.contains(v) {
        let mut avoid = ctx.var_set();
        avoid.extend(b.all_vars());
        let w = fresh_name(v, &avoid);
        let body = substitute(b, &BTreeMap::from([(v.clone(), Term::Var(w.clone()))]));
        wide.push(w, s.clone());
        (wide, body, universal)
    } else {
        wide.push(v.clone(), s.clone());
        (wide, (**b).clone(), universal)
    }
}

/// `M ⊨ φ ⇒ ψ`: inclusion of interpretations over the sequent's context.
pub fn holds_sequent(m: &FinStructure, s: &Sequent) -> bool {
    let l = subset(m, &s.ctx, &s.lhs);
    if l.is_empty() {
        return true;
    }
    let r = subset(m, &s.ctx, &s.rhs);
    l.is_subset(&r)
}

pub fn is_model(m: &FinStructure, thy: &Theory) -> bool {
    thy.axioms.iter().all(|s| holds_sequent(m, s))
}

/// The first axiom (by index) that fails in `m`.
pub fn first_failure(m: &FinStructure, thy: &Theory) -> Option<usize> {
    thy.axioms.iter().position(|s| !holds_sequent(m, s))
}
