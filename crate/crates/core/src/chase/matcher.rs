//! Backtracking homomorphic matching of flat patterns into a fact base.
//!
//! With `totality` on, an application `f(a⃗)` missing from the fact base may
//! be matched by a virtual value standing for the (always existing) value of
//! `f` at `a⃗`. Virtual values carry no relation facts and equal only
//! themselves, so any match using them holds in every model extending the
//! fact base.

use super::compile::{Atom, Pattern};
use super::factbase::FactBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Val {
    C(usize),
    V(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Virtual {
    pub f: String,
    pub args: Vec<Val>,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Match {
    pub vals: Vec<Val>,
    pub virtuals: Vec<Virtual>,
}

struct Search<'a> {
    fb: &'a FactBase,
    pat: &'a Pattern,
    totality: bool,
    limit: usize,
    vals: Vec<Option<Val>>,
    virt: Vec<Virtual>,
    done: Vec<bool>,
    out: Vec<Match>,
}

pub(crate) fn search(
    fb: &FactBase,
    pat: &Pattern,
    init: &[Option<Val>],
    virt: &[Virtual],
    totality: bool,
    limit: usize,
) -> Vec<Match> {
    let mut vals: Vec<Option<Val>> = vec![None; pat.slots.len()];
    for (i, v) in init.iter().enumerate() {
        vals[i] = v.map(|v| match v {
            Val::C(c) => Val::C(fb.find(c)),
            other => other,
        });
    }
    let mut s = Search {
        fb,
        pat,
        totality,
        limit,
        vals,
        virt: virt.to_vec(),
        done: vec![false; pat.atoms.len()],
        out: Vec::new(),
    };
    s.step();
    s.out
}

/// First match, if any.
pub(crate) fn find_one(
    fb: &FactBase,
    pat: &Pattern,
    init: &[Option<Val>],
    virt: &[Virtual],
    totality: bool,
) -> Option<Match> {
    search(fb, pat, init, virt, totality, 1).pop()
}

impl Search<'_> {
    fn full(&self) -> bool {
        self.out.len() >= self.limit
    }

    fn bound(&self, s: usize) -> bool {
        self.vals[s].is_some()
    }

    fn priority(&self, a: &Atom) -> usize {
        match a {
            Atom::Rel(_, args) => {
                let b = args.iter().filter(|&&s| self.bound(s)).count();
                if b == args.len() {
                    1000
                } else {
                    b * 2
                }
            }
            Atom::Fun(_, args, r) => {
                if args.iter().all(|&s| self.bound(s)) {
                    1000
                } else {
                    args.iter().filter(|&&s| self.bound(s)).count() * 2 + self.bound(*r) as usize
                }
            }
            Atom::Eq(a, b) => {
                if self.bound(*a) || self.bound(*b) {
                    1000
                } else {
                    0
                }
            }
        }
    }

    fn step(&mut self) {
        if self.full() {
            return;
        }
        let next = (0..self.pat.atoms.len())
            .filter(|&i| !self.done[i])
            .max_by_key(|&i| (self.priority(&self.pat.atoms[i]), std::cmp::Reverse(i)));
        let Some(i) = next else {
            self.enumerate_rest(0);
            return;
        };
        self.done[i] = true;
        let atom = self.pat.atoms[i].clone();
        match &atom {
            Atom::Rel(r, args) => self.match_rel(r, args),
            Atom::Fun(f, args, res) => self.match_fun(f, args, *res),
            Atom::Eq(a, b) => self.match_eq(*a, *b),
        }
        self.done[i] = false;
    }

    fn enumerate_rest(&mut self, from: usize) {
        if self.full() {
            return;
        }
        match (from..self.vals.len()).find(|&s| self.vals[s].is_none()) {
            None => self
                .out
                .push(Match { vals: self.vals.iter().map(|v| v.unwrap()).collect(), virtuals: self.virt.clone() }),
            Some(s) => {
                for c in self.fb.constants_of(&self.pat.slots[s].sort) {
                    self.vals[s] = Some(Val::C(c));
                    self.enumerate_rest(s + 1);
                    if self.full() {
                        break;
                    }
                }
                self.vals[s] = None;
            }
        }
    }

    /// Binds `slots` to `vals` where unbound; returns the newly bound slots,
    /// or None on a clash.
    fn unify(&mut self, slots: &[usize], vals: &[Val]) -> Option<Vec<usize>> {
        let mut fresh = Vec::new();
        for (&s, &v) in slots.iter().zip(vals) {
            match self.vals[s] {
                Some(w) if w == v => {}
                Some(_) => {
                    for &f in &fresh {
                        self.vals[f] = None;
                    }
                    return None;
                }
                None => {
                    self.vals[s] = Some(v);
                    fresh.push(s);
                }
            }
        }
        Some(fresh)
    }

    fn undo(&mut self, fresh: Vec<usize>) {
        for s in fresh {
            self.vals[s] = None;
        }
    }

    fn match_rel(&mut self, r: &str, args: &[usize]) {
        if args.iter().any(|&s| matches!(self.vals[s], Some(Val::V(_)))) {
            return;
        }
        let Some(set) = self.fb.relation(r) else { return };
        let tuples: Vec<Vec<usize>> = set.iter().cloned().collect();
        for t in tuples {
            let vals: Vec<Val> = t.iter().map(|&c| Val::C(c)).collect();
            if let Some(fresh) = self.unify(args, &vals) {
                self.step();
                self.undo(fresh);
            }
            if self.full() {
                return;
            }
        }
    }

    fn virtual_value(&mut self, f: &str, args: Vec<Val>, sort: &str) -> (Val, bool) {
        if let Some(k) = self.virt.iter().position(|v| v.f == f && v.args == args) {
            return (Val::V(k), false);
        }
        self.virt.push(Virtual { f: f.to_string(), args, sort: sort.to_string() });
        (Val::V(self.virt.len() - 1), true)
    }

    fn match_fun(&mut self, f: &str, args: &[usize], res: usize) {
        if args.iter().all(|&s| self.bound(s)) {
            let vals: Vec<Val> = args.iter().map(|&s| self.vals[s].unwrap()).collect();
            let consts: Option<Vec<usize>> = vals
                .iter()
                .map(|v| match v {
                    Val::C(c) => Some(*c),
                    Val::V(_) => None,
                })
                .collect();
            let existing = consts.as_ref().and_then(|c| self.fb.apply(f, c)).map(|v| Val::C(self.fb.find(v)));
            let (value, created) = match existing {
                Some(v) => (v, false),
                None if self.totality => {
                    let sort = self.pat.slots[res].sort.clone();
                    self.virtual_value(f, vals, &sort)
                }
                None => return,
            };
            if let Some(fresh) = self.unify(&[res], &[value]) {
                self.step();
                self.undo(fresh);
            }
            if created {
                self.virt.pop();
            }
            return;
        }
        let facts: Vec<(Vec<usize>, usize)> = self.fb.function_facts(f).map(|(a, v)| (a.clone(), v)).collect();
        let mut slots = args.to_vec();
        slots.push(res);
        for (a, v) in facts {
            let mut vals: Vec<Val> = a.iter().map(|&c| Val::C(c)).collect();
            vals.push(Val::C(v));
            if let Some(fresh) = self.unify(&slots, &vals) {
                self.step();
                self.undo(fresh);
            }
            if self.full() {
                return;
            }
        }
    }

    fn match_eq(&mut self, a: usize, b: usize) {
        match (self.vals[a], self.vals[b]) {
            (Some(x), Some(y)) => {
                if x == y {
                    self.step();
                }
            }
            (Some(x), None) => {
                self.vals[b] = Some(x);
                self.step();
                self.vals[b] = None;
            }
            (None, Some(y)) => {
                self.vals[a] = Some(y);
                self.step();
                self.vals[a] = None;
            }
            (None, None) => {
                for c in self.fb.constants_of(&self.pat.slots[a].sort) {
                    self.vals[a] = Some(Val::C(c));
                    self.vals[b] = Some(Val::C(c));
                    self.step();
                    if self.full() {
                        break;
                    }
                }
                self.vals[a] = None;
                self.vals[b] = None;
            }
        }
    }
}
