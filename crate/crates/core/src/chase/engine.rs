use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::compile::{check_sequent, compile_axiom, ctx_slots, patterns, Atom, Clause, Pattern};
use super::factbase::{BranchSummary, FactBase};
use super::matcher::{find_one, search, Match, Val, Virtual};
use super::ChaseError;
use crate::logic::{Sequent, Signature, Theory};

/// Resource caps for a chase run. Hitting one stops the run early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseLimits {
    pub max_branches: usize,
    pub max_constants: usize,
}

impl Default for ChaseLimits {
    fn default() -> Self {
        ChaseLimits { max_branches: 512, max_constants: 2000 }
    }
}

/// Label of a certificate node: an axiom index, or one of the markers
/// `"seed"` and `"goal"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepLabel {
    Axiom(usize),
    Mark(String),
}

/// A node of the derivation tree. An axiom node has one child per disjunct
/// of the axiom's right side; a node with no children closes its branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub axiom: StepLabel,
    pub substitution: BTreeMap<String, String>,
    pub children: Vec<CertNode>,
}

impl CertNode {
    fn mark(m: &str, substitution: BTreeMap<String, String>, children: Vec<CertNode>) -> Self {
        CertNode { axiom: StepLabel::Mark(m.to_string()), substitution, children }
    }

    /// Number of axiom firings recorded in the tree.
    pub fn steps(&self) -> usize {
        let own = matches!(self.axiom, StepLabel::Axiom(_)) as usize;
        own + self.children.iter().map(CertNode::steps).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ProofOutcome {
    Proved { certificate: CertNode, rounds: usize },
    NotProvedWithinBound { frontier: Vec<BranchSummary>, budget_exhausted: bool },
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved { .. })
    }

    pub fn certificate(&self) -> Option<&CertNode> {
        match self {
            ProofOutcome::Proved { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Step {
    axiom: usize,
    subst: BTreeMap<String, String>,
    case: usize,
    of: usize,
}

#[derive(Debug, Clone)]
struct Branch {
    fb: FactBase,
    seed: usize,
    history: Vec<Step>,
}

enum Fired {
    Skipped(Branch),
    Closed(Branch),
    Split(Vec<Branch>),
}

struct Exhausted;

struct Program {
    clauses: Vec<Clause>,
}

fn val_const(mat: &[usize], v: Val) -> usize {
    match v {
        Val::C(c) => c,
        Val::V(k) => mat[k],
    }
}

fn val_name(fb: &FactBase, virt: &[Virtual], v: Val) -> String {
    match v {
        Val::C(c) => fb.name(fb.find(c)).to_string(),
        Val::V(k) => {
            let args: Vec<String> = virt[k].args.iter().map(|&a| val_name(fb, virt, a)).collect();
            format!("{}({})", virt[k].f, args.join(","))
        }
    }
}

/// Turns the virtual values of a match into constants.
fn materialize(fb: &mut FactBase, m: &Match) -> Vec<usize> {
    let mut mat: Vec<usize> = Vec::new();
    for v in &m.virtuals {
        let args: Vec<usize> = v.args.iter().map(|&a| val_const(&mat, a)).collect();
        let c = fb.ensure_function(&v.f, &args, &v.sort);
        mat.push(c);
    }
    m.vals.iter().map(|&v| fb.find(val_const(&mat, v))).collect()
}

/// Adds the atoms of `pat` to `fb`, with `init` assigned to its first slots
/// and fresh constants for the remaining ones.
fn apply_pattern(fb: &mut FactBase, pat: &Pattern, init: &[usize]) {
    let mut assign: Vec<Option<usize>> = vec![None; pat.slots.len()];
    for (i, &c) in init.iter().enumerate() {
        assign[i] = Some(c);
    }
    loop {
        let mut progress = false;
        for atom in &pat.atoms {
            match atom {
                Atom::Fun(f, args, r) if assign[*r].is_none() && args.iter().all(|&a| assign[a].is_some()) => {
                    let a: Vec<usize> = args.iter().map(|&a| assign[a].unwrap()).collect();
                    assign[*r] = Some(fb.ensure_function(f, &a, &pat.slots[*r].sort));
                    progress = true;
                }
                Atom::Eq(a, b) => match (assign[*a], assign[*b]) {
                    (Some(x), None) => {
                        assign[*b] = Some(x);
                        progress = true;
                    }
                    (None, Some(y)) => {
                        assign[*a] = Some(y);
                        progress = true;
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        if !progress {
            match assign.iter().position(Option::is_none) {
                Some(s) => assign[s] = Some(fb.fresh_constant(&pat.slots[s].sort)),
                None => break,
            }
        }
    }
    let get = |s: usize| assign[s].unwrap();
    for atom in &pat.atoms {
        match atom {
            Atom::Rel(r, args) => {
                let a: Vec<usize> = args.iter().map(|&s| get(s)).collect();
                fb.add_fact(r, &a);
            }
            Atom::Fun(f, args, r) => {
                let a: Vec<usize> = args.iter().map(|&s| get(s)).collect();
                fb.set_function(f, &a, get(*r));
            }
            Atom::Eq(a, b) => fb.merge(get(*a), get(*b)),
        }
    }
}

fn some_vals(vals: &[Val]) -> Vec<Option<Val>> {
    vals.iter().map(|&v| Some(v)).collect()
}

impl Program {
    fn new(thy: &Theory) -> Result<Self, ChaseError> {
        let mut clauses = Vec::new();
        for (i, ax) in thy.axioms.iter().enumerate() {
            clauses.extend(compile_axiom(&thy.signature, i, ax)?);
        }
        Ok(Program { clauses })
    }

    fn head_holds(&self, fb: &FactBase, c: &Clause, vals: &[Val], virt: &[Virtual]) -> bool {
        let init = some_vals(vals);
        c.heads.iter().any(|h| find_one(fb, h, &init, virt, true).is_some())
    }

    /// Active triggers in canonical order: clause order, then match order.
    fn triggers(&self, fb: &FactBase) -> Vec<(usize, Match)> {
        let mut out = Vec::new();
        for (ci, c) in self.clauses.iter().enumerate() {
            for m in search(fb, &c.body, &[], &[], true, usize::MAX) {
                if !self.head_holds(fb, c, &m.vals, &m.virtuals) {
                    out.push((ci, m));
                }
            }
        }
        out
    }

    fn fire(&self, mut b: Branch, ci: usize, m: &Match) -> Fired {
        let c = &self.clauses[ci];
        if self.head_holds(&b.fb, c, &m.vals, &m.virtuals) {
            return Fired::Skipped(b);
        }
        let vals = materialize(&mut b.fb, m);
        let subst: BTreeMap<String, String> = c
            .body
            .slots
            .iter()
            .zip(&vals)
            .filter(|(s, _)| s.named)
            .map(|(s, &v)| (s.name.clone(), b.fb.name(b.fb.find(v)).to_string()))
            .collect();
        let of = c.heads.len();
        if of == 0 {
            b.history.push(Step { axiom: c.axiom, subst, case: 0, of });
            return Fired::Closed(b);
        }
        let mut out = Vec::with_capacity(of);
        for (j, h) in c.heads.iter().enumerate() {
            let mut nb = if j + 1 == of { std::mem::replace(&mut b, empty_branch()) } else { b.clone() };
            let init: Vec<usize> = vals.iter().map(|&v| nb.fb.find(v)).collect();
            apply_pattern(&mut nb.fb, h, &init);
            nb.history.push(Step { axiom: c.axiom, subst: subst.clone(), case: j, of });
            out.push(nb);
        }
        Fired::Split(out)
    }

    /// One breadth-first round on one branch. Returns the open and the
    /// closed descendants, and whether anything fired.
    fn round(
        &self,
        b: Branch,
        limits: &ChaseLimits,
        others: usize,
    ) -> Result<(Vec<Branch>, Vec<Branch>, bool), Exhausted> {
        let triggers = self.triggers(&b.fb);
        let fired_any = !triggers.is_empty();
        let mut open = vec![b];
        let mut closed = Vec::new();
        for (ci, m) in &triggers {
            let mut next = Vec::with_capacity(open.len());
            for sb in open {
                match self.fire(sb, *ci, m) {
                    Fired::Skipped(sb) => next.push(sb),
                    Fired::Closed(sb) => closed.push(sb),
                    Fired::Split(bs) => next.extend(bs),
                }
            }
            open = next;
            if others + open.len() > limits.max_branches || open.iter().any(|b| b.fb.len() > limits.max_constants) {
                return Err(Exhausted);
            }
        }
        Ok((open, closed, fired_any))
    }

    fn rounds(
        &self,
        open: Vec<Branch>,
        limits: &ChaseLimits,
        closed: &mut Vec<Branch>,
    ) -> Result<(Vec<Branch>, bool), (Vec<Branch>, Exhausted)> {
        let mut next = Vec::new();
        let mut fired = false;
        let mut rest = open.into_iter();
        while let Some(b) = rest.next() {
            let keep = b.clone();
            match self.round(b, limits, next.len() + rest.len()) {
                Ok((o, c, f)) => {
                    next.extend(o);
                    closed.extend(c);
                    fired |= f;
                }
                Err(e) => {
                    next.push(keep);
                    next.extend(rest);
                    return Err((next, e));
                }
            }
        }
        Ok((next, fired))
    }
}

fn empty_branch() -> Branch {
    Branch { fb: FactBase::new(), seed: 0, history: Vec::new() }
}

/// Breadth-first saturation of `base` for at most `bound` rounds. Returns
/// the open branches; branches closed by an axiom with right side ⊥ are
/// dropped.
pub fn saturate(thy: &Theory, base: &FactBase, bound: usize) -> Result<Vec<FactBase>, ChaseError> {
    saturate_with(thy, base, bound, &ChaseLimits::default())
}

pub fn saturate_with(
    thy: &Theory,
    base: &FactBase,
    bound: usize,
    limits: &ChaseLimits,
) -> Result<Vec<FactBase>, ChaseError> {
    base.check(&thy.signature)?;
    let prog = Program::new(thy)?;
    let mut open = vec![Branch { fb: base.clone(), seed: 0, history: Vec::new() }];
    let mut closed = Vec::new();
    for _ in 0..bound {
        match prog.rounds(open, limits, &mut closed) {
            Ok((next, fired)) => {
                open = next;
                if !fired {
                    break;
                }
            }
            Err(_) => return Err(ChaseError::Budget),
        }
    }
    Ok(open.into_iter().map(|b| b.fb).collect())
}

struct Goal {
    ctx_len: usize,
    patterns: Vec<Pattern>,
}

impl Goal {
    fn new(sig: &Signature, s: &Sequent) -> Result<Self, ChaseError> {
        let prefix = ctx_slots(&s.ctx);
        Ok(Goal { ctx_len: prefix.len(), patterns: patterns(sig, &prefix, &s.rhs)? })
    }

    /// A witness for the right side, as a map from its variables to terms.
    fn witness(&self, fb: &FactBase) -> Option<BTreeMap<String, String>> {
        let init: Vec<Option<Val>> = (0..self.ctx_len).map(|i| Some(Val::C(i))).collect();
        for p in &self.patterns {
            if let Some(m) = find_one(fb, p, &init, &[], true) {
                return Some(
                    p.slots
                        .iter()
                        .zip(&m.vals)
                        .skip(self.ctx_len)
                        .filter(|(s, _)| s.named)
                        .map(|(s, &v)| (s.name.clone(), val_name(fb, &m.virtuals, v)))
                        .collect(),
                );
            }
        }
        None
    }
}

/// Context constants followed by one seeded branch per left-side disjunct.
fn seed(sig: &Signature, s: &Sequent) -> Result<Vec<FactBase>, ChaseError> {
    let mut base = FactBase::new();
    for (v, srt) in &s.ctx.0 {
        base.add_constant(v.clone(), srt.clone())?;
    }
    let prefix = ctx_slots(&s.ctx);
    let init: Vec<usize> = (0..prefix.len()).collect();
    Ok(patterns(sig, &prefix, &s.lhs)?
        .iter()
        .map(|p| {
            let mut fb = base.clone();
            apply_pattern(&mut fb, p, &init);
            fb
        })
        .collect())
}

enum Leaf {
    Goal(BTreeMap<String, String>),
    Closed,
}

fn build_tree(items: Vec<(&[Step], &Leaf)>, depth: usize) -> CertNode {
    if let Some((_, leaf)) = items.iter().find(|(h, _)| h.len() == depth) {
        return match leaf {
            Leaf::Goal(w) => CertNode::mark("goal", w.clone(), Vec::new()),
            Leaf::Closed => unreachable!("closed branches end with a firing"),
        };
    }
    let step = &items[0].0[depth];
    let children = (0..step.of)
        .map(|case| {
            let group: Vec<(&[Step], &Leaf)> = items.iter().filter(|(h, _)| h[depth].case == case).copied().collect();
            build_tree(group, depth + 1)
        })
        .collect();
    CertNode { axiom: StepLabel::Axiom(step.axiom), substitution: step.subst.clone(), children }
}

fn certificate(seeds: usize, proved: &[(Branch, Leaf)], closed: &[Branch]) -> CertNode {
    let closed_leaf = Leaf::Closed;
    let mut children = Vec::with_capacity(seeds);
    for j in 0..seeds {
        let mut items: Vec<(&[Step], &Leaf)> = Vec::new();
        for (b, leaf) in proved {
            if b.seed == j {
                items.push((&b.history, leaf));
            }
        }
        for b in closed {
            if b.seed == j {
                items.push((&b.history, &closed_leaf));
            }
        }
        children.push(build_tree(items, 0));
    }
    CertNode::mark("seed", BTreeMap::new(), children)
}

/// Tries to derive `s` from `thy` within `bound` rounds.
pub fn prove_sequent(thy: &Theory, s: &Sequent, bound: usize) -> Result<ProofOutcome, ChaseError> {
    prove_sequent_with(thy, s, bound, &ChaseLimits::default())
}

pub fn prove_sequent_with(
    thy: &Theory,
    s: &Sequent,
    bound: usize,
    limits: &ChaseLimits,
) -> Result<ProofOutcome, ChaseError> {
    check_sequent(&thy.signature, s)?;
    let prog = Program::new(thy)?;
    let goal = Goal::new(&thy.signature, s)?;
    let seeds = seed(&thy.signature, s)?;
    let n_seeds = seeds.len();
    let mut open: Vec<Branch> =
        seeds.into_iter().enumerate().map(|(j, fb)| Branch { fb, seed: j, history: Vec::new() }).collect();
    let mut proved: Vec<(Branch, Leaf)> = Vec::new();
    let mut closed: Vec<Branch> = Vec::new();
    for round in 0..=bound {
        let mut still = Vec::new();
        for b in open {
            match goal.witness(&b.fb) {
                Some(w) => proved.push((b, Leaf::Goal(w))),
                None => still.push(b),
            }
        }
        open = still;
        if open.is_empty() {
            return Ok(ProofOutcome::Proved { certificate: certificate(n_seeds, &proved, &closed), rounds: round });
        }
        if round == bound {
            break;
        }
        match prog.rounds(open, limits, &mut closed) {
            Ok((next, _)) => open = next,
            Err((frontier, _)) => {
                return Ok(ProofOutcome::NotProvedWithinBound {
                    frontier: frontier.iter().map(|b| b.fb.summary()).collect(),
                    budget_exhausted: true,
                })
            }
        }
    }
    Ok(ProofOutcome::NotProvedWithinBound {
        frontier: open.iter().map(|b| b.fb.summary()).collect(),
        budget_exhausted: false,
    })
}

/// Re-executes the steps of a certificate and checks that every branch
/// ends in the goal or is closed.
pub fn replay(thy: &Theory, s: &Sequent, cert: &CertNode) -> Result<bool, ChaseError> {
    check_sequent(&thy.signature, s)?;
    let prog = Program::new(thy)?;
    let goal = Goal::new(&thy.signature, s)?;
    let seeds = seed(&thy.signature, s)?;
    if cert.axiom != StepLabel::Mark("seed".into()) || cert.children.len() != seeds.len() {
        return Ok(false);
    }
    Ok(seeds.into_iter().zip(&cert.children).all(|(fb, node)| replay_node(&prog, &goal, fb, node)))
}

fn replay_node(prog: &Program, goal: &Goal, mut fb: FactBase, node: &CertNode) -> bool {
    let axiom = match &node.axiom {
        StepLabel::Mark(m) if m == "goal" => return goal.witness(&fb).is_some(),
        StepLabel::Mark(_) => return false,
        StepLabel::Axiom(i) => *i,
    };
    for c in prog.clauses.iter().filter(|c| c.axiom == axiom) {
        let named = c.body.slots.iter().filter(|s| s.named).count();
        if c.heads.len() != node.children.len() || named != node.substitution.len() {
            continue;
        }
        let mut init: Vec<Option<Val>> = Vec::with_capacity(c.body.slots.len());
        let mut known = true;
        for slot in &c.body.slots {
            if !slot.named {
                init.push(None);
                continue;
            }
            match node.substitution.get(&slot.name).and_then(|n| fb.lookup(n)) {
                Some(k) => init.push(Some(Val::C(k))),
                None => {
                    known = false;
                    break;
                }
            }
        }
        if !known {
            continue;
        }
        let Some(m) = find_one(&fb, &c.body, &init, &[], true) else { continue };
        let vals = materialize(&mut fb, &m);
        return c.heads.iter().zip(&node.children).all(|(h, child)| {
            let mut nb = fb.clone();
            let init: Vec<usize> = vals.iter().map(|&v| nb.find(v)).collect();
            apply_pattern(&mut nb, h, &init);
            replay_node(prog, goal, nb, child)
        });
    }
    false
}
