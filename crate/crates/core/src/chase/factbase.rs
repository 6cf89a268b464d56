use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChaseError;
use crate::logic::Signature;

/// Ground saturation state: named constants with sorts, relation facts and
/// function-application facts, all kept canonical under a union-find whose
/// representatives are the least indices of their classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactBase {
    names: Vec<String>,
    sorts: Vec<String>,
    parent: Vec<usize>,
    by_name: HashMap<String, usize>,
    rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
    funs: BTreeMap<(String, Vec<usize>), usize>,
    fresh: usize,
}

impl Default for FactBase {
    fn default() -> Self {
        Self::new()
    }
}

impl FactBase {
    pub fn new() -> Self {
        FactBase {
            names: Vec::new(),
            sorts: Vec::new(),
            parent: Vec::new(),
            by_name: HashMap::new(),
            rels: BTreeMap::new(),
            funs: BTreeMap::new(),
            fresh: 0,
        }
    }

    pub fn add_constant(&mut self, name: impl Into<String>, sort: impl Into<String>) -> Result<usize, ChaseError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(ChaseError::IllFormed(format!("constant {name} declared twice")));
        }
        Ok(self.push_constant(name, sort.into()))
    }

    fn push_constant(&mut self, name: String, sort: String) -> usize {
        let k = self.names.len();
        self.by_name.insert(name.clone(), k);
        self.names.push(name);
        self.sorts.push(sort);
        self.parent.push(k);
        k
    }

    /// A fresh witness constant `w1, w2, …`.
    pub(crate) fn fresh_constant(&mut self, sort: &str) -> usize {
        loop {
            self.fresh += 1;
            let name = format!("w{}", self.fresh);
            if !self.by_name.contains_key(&name) {
                return self.push_constant(name, sort.to_string());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).map(|&k| self.find(k))
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn sort(&self, x: usize) -> &str {
        &self.sorts[x]
    }

    /// Representatives of the given sort, in index order.
    pub fn constants_of(&self, sort: &str) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| self.parent[i] == i && self.sorts[i] == sort).collect()
    }

    pub fn representatives(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| self.parent[i] == i).collect()
    }

    pub fn relation(&self, r: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.rels.get(r)
    }

    pub fn function_facts<'a>(&'a self, f: &'a str) -> impl Iterator<Item = (&'a Vec<usize>, usize)> + 'a {
        self.funs.range((f.to_string(), Vec::new())..).take_while(move |((g, _), _)| g == f).map(|((_, a), &v)| (a, v))
    }

    pub fn apply(&self, f: &str, args: &[usize]) -> Option<usize> {
        let key = (f.to_string(), args.iter().map(|&a| self.find(a)).collect());
        self.funs.get(&key).copied()
    }

    pub fn holds(&self, r: &str, args: &[usize]) -> bool {
        let t: Vec<usize> = args.iter().map(|&a| self.find(a)).collect();
        self.rels.get(r).is_some_and(|s| s.contains(&t))
    }

    pub fn add_fact(&mut self, r: &str, args: &[usize]) {
        let t: Vec<usize> = args.iter().map(|&a| self.find(a)).collect();
        self.rels.entry(r.to_string()).or_default().insert(t);
    }

    /// Records `f(args) = v`, merging with an existing value.
    pub fn set_function(&mut self, f: &str, args: &[usize], v: usize) {
        let key = (f.to_string(), args.iter().map(|&a| self.find(a)).collect::<Vec<_>>());
        match self.funs.get(&key).copied() {
            Some(w) => self.merge(v, w),
            None => {
                let v = self.find(v);
                self.funs.insert(key, v);
            }
        }
    }

    /// Value of `f(args)`, creating a fresh constant if absent.
    pub(crate) fn ensure_function(&mut self, f: &str, args: &[usize], sort: &str) -> usize {
        if let Some(v) = self.apply(f, args) {
            return self.find(v);
        }
        let v = self.fresh_constant(sort);
        self.set_function(f, args, v);
        v
    }

    /// Merges two classes and restores congruence.
    pub fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        self.rebuild();
    }

    fn rebuild(&mut self) {
        loop {
            let mut pending = Vec::new();
            let rels = std::mem::take(&mut self.rels);
            for (r, set) in rels {
                let canon: BTreeSet<Vec<usize>> =
                    set.into_iter().map(|t| t.into_iter().map(|x| self.find(x)).collect()).collect();
                self.rels.insert(r, canon);
            }
            let funs = std::mem::take(&mut self.funs);
            for ((f, args), v) in funs {
                let key = (f, args.into_iter().map(|x| self.find(x)).collect::<Vec<_>>());
                let v = self.find(v);
                match self.funs.get(&key) {
                    Some(&w) if w != v => pending.push((v, w)),
                    Some(_) => {}
                    None => {
                        self.funs.insert(key, v);
                    }
                }
            }
            if pending.is_empty() {
                return;
            }
            for (a, b) in pending {
                let (a, b) = (self.find(a), self.find(b));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    self.parent[hi] = lo;
                }
            }
        }
    }

    /// All facts as display strings, canonical order.
    pub fn facts(&self) -> Vec<String> {
        let n = |x: usize| self.names[x].as_str();
        let mut out = Vec::new();
        for (r, set) in &self.rels {
            for t in set {
                let args: Vec<&str> = t.iter().map(|&x| n(x)).collect();
                out.push(format!("{r}({})", args.join(",")));
            }
        }
        for ((f, args), v) in &self.funs {
            let a: Vec<&str> = args.iter().map(|&x| n(x)).collect();
            out.push(format!("{f}({}) = {}", a.join(","), n(*v)));
        }
        for i in 0..self.names.len() {
            let r = self.find(i);
            if r != i {
                out.push(format!("{} = {}", n(i), n(r)));
            }
        }
        out
    }

    pub fn summary(&self) -> BranchSummary {
        BranchSummary {
            constants: self
                .representatives()
                .into_iter()
                .map(|i| (self.names[i].clone(), self.sorts[i].clone()))
                .collect(),
            facts: self.facts(),
        }
    }

    /// Checks every constant and fact against the signature.
    pub fn check(&self, sig: &Signature) -> Result<(), ChaseError> {
        for (i, s) in self.sorts.iter().enumerate() {
            if !sig.sorts.contains(s) {
                return Err(ChaseError::IllFormed(format!("constant {} has undeclared sort {s}", self.names[i])));
            }
        }
        for (r, set) in &self.rels {
            let arity = sig.relations.get(r).ok_or_else(|| ChaseError::IllFormed(format!("undeclared symbol {r}")))?;
            for t in set {
                if t.len() != arity.len() || t.iter().zip(arity).any(|(&x, s)| &self.sorts[x] != s) {
                    return Err(ChaseError::IllFormed(format!("ill-sorted fact for {r}")));
                }
            }
        }
        for ((f, args), v) in &self.funs {
            let ty = sig.functions.get(f).ok_or_else(|| ChaseError::IllFormed(format!("undeclared symbol {f}")))?;
            if args.len() != ty.args.len()
                || args.iter().zip(&ty.args).any(|(&x, s)| &self.sorts[x] != s)
                || self.sorts[*v] != ty.result
            {
                return Err(ChaseError::IllFormed(format!("ill-sorted fact for {f}")));
            }
        }
        Ok(())
    }
}

/// Serializable snapshot of a branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub constants: Vec<(String, String)>,
    pub facts: Vec<String>,
}

impl fmt::Display for BranchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.facts.join(", "))
    }
}
