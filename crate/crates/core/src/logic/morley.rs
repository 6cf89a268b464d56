//! Morleyization: a coherent theory with the same finite Set-models as a
//! first-order theory, up to a unique definitional expansion.
//!
//! Every subformula `φ` of an axiom, with free variables `xs`, receives two
//! relation symbols `P(xs)` and `N(xs)`, constrained by
//!
//! * `⊤ ⇒ P ∨ N` and `P ∧ N ⇒ ⊥`, so `N` is the complement of `P`;
//! * clauses for the head connective of `φ`, forcing `P ↔ φ` classically.
//!
//! A first-order axiom `φ ⇒ ψ` becomes `P_φ ⇒ P_ψ`. A coherent axiom is kept
//! verbatim, its subformulas still receive their definitional layer.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::subst::{fresh_name, rename_apart};
use super::syntax::{Context, Formula, Sequent, Signature, Term, Theory};
use crate::semantics::{interpret_formula, FinStructure};

/// One subformula together with the symbols that define it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub positive: String,
    pub negative: String,
    pub ctx: Context,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morleyization {
    pub source: Theory,
    pub theory: Theory,
    pub definitions: Vec<Definition>,
}

/// The coherent theory of [`Morleyization::new`].
pub fn morleyize(thy: &Theory) -> Theory {
    Morleyization::new(thy).theory
}

struct Builder {
    sig: Signature,
    axioms: Vec<Sequent>,
    defs: Vec<Definition>,
    taken: BTreeSet<String>,
    counter: usize,
}

impl Builder {
    fn fresh(&mut self, prefix: &str) -> String {
        let base = format!("{prefix}_{}", self.counter);
        let name = if self.taken.contains(&base) { fresh_name(&base, &self.taken) } else { base };
        self.taken.insert(name.clone());
        name
    }

    fn atom(name: &str, ctx: &Context) -> Formula {
        Formula::rel(name, ctx.vars().map(Term::var).collect())
    }

    /// Defines `phi` in scope `scope` (ordered variables in force) and returns
    /// its definition index.
    fn define(&mut self, scope: &Context, phi: &Formula) -> usize {
        let free = phi.free_vars();
        let ctx = Context(scope.0.iter().filter(|(v, _)| free.contains(v)).cloned().collect());
        let p = self.fresh("P");
        let n = self.fresh("N");
        self.counter += 1;
        let sorts: Vec<String> = ctx.sorts().map(str::to_string).collect();
        self.sig.relations.insert(p.clone(), sorts.clone());
        self.sig.relations.insert(n.clone(), sorts);
        let pa = Self::atom(&p, &ctx);
        let na = Self::atom(&n, &ctx);
        self.axioms.push(Sequent::new(ctx.clone(), Formula::top(), Formula::or([pa.clone(), na.clone()])));
        self.axioms.push(Sequent::new(ctx.clone(), Formula::and([pa.clone(), na.clone()]), Formula::bottom()));
        let me = self.defs.len();
        self.defs.push(Definition { positive: p, negative: n, ctx: ctx.clone(), formula: phi.clone() });

        let push = |b: &mut Builder, c: &Context, l: Formula, r: Formula| b.axioms.push(Sequent::new(c.clone(), l, r));
        match phi {
            Formula::Eq(..) | Formula::Rel(..) => {
                push(self, &ctx, pa.clone(), phi.clone());
                push(self, &ctx, phi.clone(), pa);
            }
            Formula::And(ps) => {
                let kids: Vec<Formula> = ps.iter().map(|q| self.define_atom(scope, q)).collect();
                for k in &kids {
                    push(self, &ctx, pa.clone(), k.clone());
                }
                push(self, &ctx, Formula::and(kids), pa);
            }
            Formula::Or(ps) => {
                let kids: Vec<Formula> = ps.iter().map(|q| self.define_atom(scope, q)).collect();
                for k in &kids {
                    push(self, &ctx, k.clone(), pa.clone());
                }
                push(self, &ctx, pa, Formula::or(kids));
            }
            Formula::Not(b) => {
                let k = self.define(scope, b);
                let nb = Self::atom(&self.defs[k].negative, &self.defs[k].ctx);
                push(self, &ctx, pa.clone(), nb.clone());
                push(self, &ctx, nb, pa);
            }
            Formula::Implies(a, b) => {
                let ka = self.define(scope, a);
                let kb = self.define(scope, b);
                let pa_ = Self::atom(&self.defs[ka].positive, &self.defs[ka].ctx);
                let na_ = Self::atom(&self.defs[ka].negative, &self.defs[ka].ctx);
                let pb_ = Self::atom(&self.defs[kb].positive, &self.defs[kb].ctx);
                push(self, &ctx, Formula::and([pa.clone(), pa_]), pb_.clone());
                push(self, &ctx, na_, pa.clone());
                push(self, &ctx, pb_, pa);
            }
            Formula::Exists(v, s, b) => {
                let mut inner = scope.clone();
                inner.push(v.clone(), s.clone());
                let k = self.define(&inner, b);
                let pb = Self::atom(&self.defs[k].positive, &self.defs[k].ctx);
                let mut wide = ctx.clone();
                wide.push(v.clone(), s.clone());
                push(self, &ctx, pa.clone(), Formula::exists(v.clone(), s.clone(), pb.clone()));
                push(self, &wide, pb, pa);
            }
            Formula::Forall(v, s, b) => {
                let mut inner = scope.clone();
                inner.push(v.clone(), s.clone());
                let k = self.define(&inner, b);
                let pb = Self::atom(&self.defs[k].positive, &self.defs[k].ctx);
                let nb = Self::atom(&self.defs[k].negative, &self.defs[k].ctx);
                let mut wide = ctx.clone();
                wide.push(v.clone(), s.clone());
                push(self, &wide, pa, pb);
                push(self, &ctx, na, Formula::exists(v.clone(), s.clone(), nb));
            }
        }
        me
    }

    fn define_atom(&mut self, scope: &Context, phi: &Formula) -> Formula {
        let k = self.define(scope, phi);
        Self::atom(&self.defs[k].positive, &self.defs[k].ctx)
    }
}

impl Morleyization {
    pub fn new(thy: &Theory) -> Self {
        let mut taken: BTreeSet<String> = thy.signature.sorts.iter().cloned().collect();
        taken.extend(thy.signature.relations.keys().cloned());
        taken.extend(thy.signature.functions.keys().cloned());
        let mut b = Builder { sig: thy.signature.clone(), axioms: Vec::new(), defs: Vec::new(), taken, counter: 0 };
        let mut translated = Vec::new();
        for ax in &thy.axioms {
            let avoid = ax.ctx.var_set();
            let lhs = rename_apart(&ax.lhs, &avoid);
            let rhs = rename_apart(&ax.rhs, &avoid);
            let l = b.define_atom(&ax.ctx, &lhs);
            let r = b.define_atom(&ax.ctx, &rhs);
            if ax.is_coherent() {
                translated.push(ax.clone());
            } else {
                translated.push(Sequent::new(ax.ctx.clone(), l, r));
            }
        }
        let mut axioms = translated;
        axioms.extend(b.axioms);
        Morleyization { source: thy.clone(), theory: Theory { signature: b.sig, axioms }, definitions: b.defs }
    }

    /// The unique expansion of a structure over the source signature to the
    /// Morleyized signature.
    pub fn expand(&self, m: &FinStructure) -> FinStructure {
        let mut out = m.clone();
        for d in &self.definitions {
            let pos = interpret_formula(m, &d.ctx, &d.formula).tuples;
            let all = m.product(&d.ctx);
            let neg: BTreeSet<Vec<usize>> = all.into_iter().filter(|t| !pos.contains(t)).collect();
            out.relations.insert(d.positive.clone(), pos);
            out.relations.insert(d.negative.clone(), neg);
        }
        out
    }

    /// True if `m` (over the output signature) is the expansion of its own
    /// restriction to the source signature.
    pub fn is_expansion(&self, m: &FinStructure) -> bool {
        let restricted = m.restrict(&self.source.signature);
        &self.expand(&restricted) == m
    }

    /// Symbols added by the construction.
    pub fn added_relations(&self) -> BTreeMap<String, Vec<String>> {
        self.theory
            .signature
            .relations
            .iter()
            .filter(|(k, _)| !self.source.signature.relations.contains_key(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}
