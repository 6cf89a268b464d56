use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::syntax::{Context, Formula, Sequent, Signature, Term, Theory};
use super::LogicError;

/// One well-formedness violation, with the place it was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl Signature {
    /// Sort of `t` in `ctx`, checking arities and argument sorts.
    pub fn term_sort(&self, ctx: &Context, t: &Term) -> Result<String, LogicError> {
        match t {
            Term::Var(v) => ctx.sort_of(v).map(str::to_string).ok_or_else(|| LogicError::UnboundVariable(v.clone())),
            Term::App(f, args) => {
                let ty = self.functions.get(f).ok_or_else(|| LogicError::UndeclaredSymbol(f.clone()))?;
                if ty.args.len() != args.len() {
                    return Err(LogicError::Arity { symbol: f.clone(), expected: ty.args.len(), found: args.len() });
                }
                for (a, want) in args.iter().zip(&ty.args) {
                    let got = self.term_sort(ctx, a)?;
                    if &got != want {
                        return Err(LogicError::SortMismatch {
                            expected: want.clone(),
                            found: got,
                            at: format!("argument of {f}"),
                        });
                    }
                }
                Ok(ty.result.clone())
            }
        }
    }

    /// Checks that `phi` is well-formed in `ctx`; the first violation wins.
    pub fn check_formula(&self, ctx: &Context, phi: &Formula) -> Result<(), LogicError> {
        let mut diags = Vec::new();
        self.formula_diags(ctx, phi, "formula", &mut diags);
        match diags.into_iter().next() {
            None => Ok(()),
            Some(d) => Err(LogicError::IllFormed(d.message)),
        }
    }

    pub fn check_sequent(&self, s: &Sequent) -> Result<(), LogicError> {
        let mut diags = Vec::new();
        self.sequent_diags(s, "sequent", &mut diags);
        match diags.into_iter().next() {
            None => Ok(()),
            Some(d) => Err(LogicError::IllFormed(d.message)),
        }
    }

    fn context_diags(&self, ctx: &Context, loc: &str, out: &mut Vec<Diagnostic>) {
        if !ctx.has_distinct_vars() {
            out.push(diag(loc, "context variables are not pairwise distinct"));
        }
        for (v, s) in &ctx.0 {
            if !self.sorts.contains(s) {
                out.push(diag(loc, format!("variable {v} has undeclared sort {s}")));
            }
        }
    }

    fn sequent_diags(&self, s: &Sequent, loc: &str, out: &mut Vec<Diagnostic>) {
        self.context_diags(&s.ctx, loc, out);
        self.formula_diags(&s.ctx, &s.lhs, loc, out);
        self.formula_diags(&s.ctx, &s.rhs, loc, out);
    }

    fn term_diags(&self, ctx: &Context, t: &Term, loc: &str, out: &mut Vec<Diagnostic>) -> Option<String> {
        match t {
            Term::Var(v) => match ctx.sort_of(v) {
                Some(s) => Some(s.to_string()),
                None => {
                    out.push(diag(loc, format!("variable {v} is not in the context")));
                    None
                }
            },
            Term::App(f, args) => {
                let Some(ty) = self.functions.get(f) else {
                    out.push(diag(loc, format!("undeclared symbol {f}")));
                    return None;
                };
                if ty.args.len() != args.len() {
                    out.push(diag(loc, format!("{f} expects {} arguments, got {}", ty.args.len(), args.len())));
                    return None;
                }
                for (i, (a, want)) in args.iter().zip(&ty.args).enumerate() {
                    if let Some(got) = self.term_diags(ctx, a, loc, out) {
                        if &got != want {
                            out.push(diag(loc, format!("argument {} of {f} has sort {got}, expected {want}", i + 1)));
                        }
                    }
                }
                Some(ty.result.clone())
            }
        }
    }

    fn formula_diags(&self, ctx: &Context, phi: &Formula, loc: &str, out: &mut Vec<Diagnostic>) {
        match phi {
            Formula::Eq(a, b) => {
                let sa = self.term_diags(ctx, a, loc, out);
                let sb = self.term_diags(ctx, b, loc, out);
                if let (Some(sa), Some(sb)) = (sa, sb) {
                    if sa != sb {
                        out.push(diag(loc, format!("equation between sorts {sa} and {sb}")));
                    }
                }
            }
            Formula::Rel(r, ts) => {
                let Some(arity) = self.relations.get(r) else {
                    out.push(diag(loc, format!("undeclared symbol {r}")));
                    return;
                };
                if arity.len() != ts.len() {
                    out.push(diag(loc, format!("{r} expects {} arguments, got {}", arity.len(), ts.len())));
                    return;
                }
                for (i, (t, want)) in ts.iter().zip(arity).enumerate() {
                    if let Some(got) = self.term_diags(ctx, t, loc, out) {
                        if &got != want {
                            out.push(diag(loc, format!("argument {} of {r} has sort {got}, expected {want}", i + 1)));
                        }
                    }
                }
            }
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| self.formula_diags(ctx, p, loc, out)),
            Formula::Exists(v, s, b) | Formula::Forall(v, s, b) => {
                if !self.sorts.contains(s) {
                    out.push(diag(loc, format!("bound variable {v} has undeclared sort {s}")));
                }
                let mut inner = ctx.clone();
                inner.push(v.clone(), s.clone());
                self.formula_diags(&inner, b, loc, out);
            }
            Formula::Not(b) => self.formula_diags(ctx, b, loc, out),
            Formula::Implies(a, b) => {
                self.formula_diags(ctx, a, loc, out);
                self.formula_diags(ctx, b, loc, out);
            }
        }
    }
}

fn diag(loc: &str, msg: impl Into<String>) -> Diagnostic {
    Diagnostic { location: loc.to_string(), message: msg.into() }
}

/// Full well-formedness report for a theory: signature sanity, every axiom
/// well-sorted in its context, and every axiom coherent.
pub fn wf_check(thy: &Theory) -> Vec<Diagnostic> {
    wf_check_with(thy, true)
}

/// As [`wf_check`] but optionally accepting first-order axioms.
pub fn wf_check_with(thy: &Theory, require_coherent: bool) -> Vec<Diagnostic> {
    let sig = &thy.signature;
    let mut out = Vec::new();
    for (r, args) in &sig.relations {
        for s in args {
            if !sig.sorts.contains(s) {
                out.push(diag(&format!("relation {r}"), format!("undeclared sort {s}")));
            }
        }
    }
    for (f, ty) in &sig.functions {
        for s in ty.args.iter().chain(std::iter::once(&ty.result)) {
            if !sig.sorts.contains(s) {
                out.push(diag(&format!("function {f}"), format!("undeclared sort {s}")));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let names = sig.sorts.iter().chain(sig.relations.keys()).chain(sig.functions.keys());
    for n in names {
        if !seen.insert(n) {
            out.push(diag("signature", format!("name {n} is declared in more than one namespace")));
        }
    }
    for (i, ax) in thy.axioms.iter().enumerate() {
        let loc = format!("axiom {}", i + 1);
        sig.sequent_diags(ax, &loc, &mut out);
        if require_coherent && !ax.is_coherent() {
            out.push(diag(&loc, "axiom is not coherent (uses ~, -> or forall)"));
        }
    }
    out
}
