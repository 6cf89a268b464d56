//! Compilation of coherent sequents into flat clauses: the left side in
//! disjunctive normal form with existentials pulled out as universal
//! variables, the right side as a disjunction of existential conjunctions,
//! and every function application named by a slot.

use std::collections::{BTreeMap, BTreeSet};

use super::ChaseError;
use crate::logic::{rename_apart, Context, Formula, Sequent, Signature, Term};

const MAX_DNF: usize = 4096;

pub(crate) type Slot = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Atom {
    Rel(String, Vec<Slot>),
    Fun(String, Vec<Slot>, Slot),
    Eq(Slot, Slot),
}

/// Slot metadata: display name, sort, and whether it is a named variable
/// (as opposed to a slot standing for a function application).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SlotInfo {
    pub name: String,
    pub sort: String,
    pub named: bool,
}

/// A conjunction of flat atoms over slots; slots below `base` belong to an
/// enclosing pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Pattern {
    pub slots: Vec<SlotInfo>,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone)]
pub(crate) struct Clause {
    pub axiom: usize,
    /// Universal slots: context variables first, then the left side's own.
    pub body: Pattern,
    /// Each head extends `body.slots`.
    pub heads: Vec<Pattern>,
}

/// A coherent formula in disjunctive normal form: a list of existential
/// conjunctions of atomic formulas.
type Dnf = Vec<(Vec<(String, String)>, Vec<Formula>)>;

fn dnf(phi: &Formula) -> Result<Dnf, ChaseError> {
    Ok(match phi {
        Formula::Eq(..) | Formula::Rel(..) => vec![(Vec::new(), vec![phi.clone()])],
        Formula::Or(ps) => {
            let mut out = Vec::new();
            for p in ps {
                out.extend(dnf(p)?);
                if out.len() > MAX_DNF {
                    return Err(ChaseError::TooLarge);
                }
            }
            out
        }
        Formula::And(ps) => {
            let mut acc: Dnf = vec![(Vec::new(), Vec::new())];
            for p in ps {
                let d = dnf(p)?;
                if acc.len() * d.len() > MAX_DNF {
                    return Err(ChaseError::TooLarge);
                }
                let mut next = Vec::new();
                for (v1, a1) in &acc {
                    for (v2, a2) in &d {
                        let mut v = v1.clone();
                        v.extend(v2.iter().cloned());
                        let mut a = a1.clone();
                        a.extend(a2.iter().cloned());
                        next.push((v, a));
                    }
                }
                acc = next;
            }
            acc
        }
        Formula::Exists(v, s, b) => {
            let mut d = dnf(b)?;
            for (vars, _) in &mut d {
                vars.insert(0, (v.clone(), s.clone()));
            }
            d
        }
        Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => return Err(ChaseError::NotCoherent),
    })
}

/// Builds patterns on top of a fixed prefix of slots.
pub(crate) struct Flattener<'a> {
    sig: &'a Signature,
    pub slots: Vec<SlotInfo>,
    scope: BTreeMap<String, Slot>,
    memo: BTreeMap<Term, Slot>,
    pub atoms: Vec<Atom>,
}

impl<'a> Flattener<'a> {
    pub fn new(sig: &'a Signature, prefix: &[SlotInfo]) -> Self {
        let scope = prefix.iter().enumerate().filter(|(_, s)| s.named).map(|(i, s)| (s.name.clone(), i)).collect();
        Flattener { sig, slots: prefix.to_vec(), scope, memo: BTreeMap::new(), atoms: Vec::new() }
    }

    pub fn bind(&mut self, name: &str, sort: &str) -> Slot {
        self.slots.push(SlotInfo { name: name.to_string(), sort: sort.to_string(), named: true });
        let k = self.slots.len() - 1;
        self.scope.insert(name.to_string(), k);
        k
    }

    fn term(&mut self, t: &Term) -> Result<Slot, ChaseError> {
        match t {
            Term::Var(v) => {
                self.scope.get(v).copied().ok_or_else(|| ChaseError::IllFormed(format!("unbound variable {v}")))
            }
            Term::App(f, args) => {
                if let Some(&s) = self.memo.get(t) {
                    return Ok(s);
                }
                let ty =
                    self.sig.functions.get(f).ok_or_else(|| ChaseError::IllFormed(format!("undeclared symbol {f}")))?;
                let arg_slots = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                self.slots.push(SlotInfo { name: t.to_string(), sort: ty.result.clone(), named: false });
                let k = self.slots.len() - 1;
                self.atoms.push(Atom::Fun(f.clone(), arg_slots, k));
                self.memo.insert(t.clone(), k);
                Ok(k)
            }
        }
    }

    pub fn atom(&mut self, phi: &Formula) -> Result<(), ChaseError> {
        match phi {
            Formula::Eq(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                if x != y {
                    self.atoms.push(Atom::Eq(x, y));
                }
            }
            Formula::Rel(r, ts) => {
                let args = ts.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                self.atoms.push(Atom::Rel(r.clone(), args));
            }
            _ => unreachable!("dnf yields atoms only"),
        }
        Ok(())
    }

    pub fn finish(self) -> Pattern {
        Pattern { slots: self.slots, atoms: self.atoms }
    }
}

pub(crate) fn ctx_slots(ctx: &Context) -> Vec<SlotInfo> {
    ctx.0.iter().map(|(v, s)| SlotInfo { name: v.clone(), sort: s.clone(), named: true }).collect()
}

/// The disjuncts of `phi` as patterns extending `prefix`.
pub(crate) fn patterns(sig: &Signature, prefix: &[SlotInfo], phi: &Formula) -> Result<Vec<Pattern>, ChaseError> {
    let avoid: BTreeSet<String> = prefix.iter().map(|s| s.name.clone()).collect();
    let phi = rename_apart(phi, &avoid);
    let mut out = Vec::new();
    for (vars, atoms) in dnf(&phi)? {
        let mut fl = Flattener::new(sig, prefix);
        for (v, s) in &vars {
            fl.bind(v, s);
        }
        for a in &atoms {
            fl.atom(a)?;
        }
        out.push(fl.finish());
    }
    Ok(out)
}

pub(crate) fn check_sequent(sig: &Signature, s: &Sequent) -> Result<(), ChaseError> {
    if !s.is_coherent() {
        return Err(ChaseError::NotCoherent);
    }
    sig.check_sequent(s).map_err(|e| ChaseError::IllFormed(e.to_string()))
}

/// One clause per left-side disjunct of the axiom.
pub(crate) fn compile_axiom(sig: &Signature, index: usize, s: &Sequent) -> Result<Vec<Clause>, ChaseError> {
    check_sequent(sig, s)?;
    let prefix = ctx_slots(&s.ctx);
    let mut out = Vec::new();
    for body in patterns(sig, &prefix, &s.lhs)? {
        // the right side sees only the context variables
        let heads = patterns(sig, &prefix, &s.rhs)?.into_iter().map(|h| shift(h, prefix.len(), &body.slots)).collect();
        out.push(Clause { axiom: index, body, heads });
    }
    Ok(out)
}

/// Re-bases a pattern built on `ctx_len` context slots onto `base` slots.
fn shift(p: Pattern, ctx_len: usize, base: &[SlotInfo]) -> Pattern {
    let off = base.len() - ctx_len;
    let m = |s: Slot| if s < ctx_len { s } else { s + off };
    let mut slots = base.to_vec();
    slots.extend(p.slots[ctx_len..].iter().cloned());
    let atoms = p
        .atoms
        .into_iter()
        .map(|a| match a {
            Atom::Rel(r, args) => Atom::Rel(r, args.into_iter().map(m).collect()),
            Atom::Fun(f, args, r) => Atom::Fun(f, args.into_iter().map(m).collect(), m(r)),
            Atom::Eq(a, b) => Atom::Eq(m(a), m(b)),
        })
        .collect();
    Pattern { slots, atoms }
}
