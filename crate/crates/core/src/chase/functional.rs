//! The three provability conditions making a formula θ(x⃗, y⃗) the graph of
//! an arrow from {x⃗. φ} to {y⃗. ψ}.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::engine::{prove_sequent_with, ChaseLimits, ProofOutcome};
use super::ChaseError;
use crate::logic::{fresh_name, substitute, Context, Formula, Sequent, Term, Theory};
use crate::semantics::{
    for_each_structure, holds_sequent, is_model, size_vectors, space_size, FinStructure, DEFAULT_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Functionality {
    pub verdict: Verdict,
    pub sequents: Vec<Sequent>,
    pub outcomes: Vec<ProofOutcome>,
    /// Index of the refuted sequent and a model of the theory refuting it.
    pub countermodel: Option<(usize, FinStructure)>,
}

/// `[x⃗,y⃗] θ ⇒ φ∧ψ`, `[x⃗,y⃗,y⃗'] θ ∧ θ[y⃗'/y⃗] ⇒ y⃗=y⃗'` and `[x⃗] φ ⇒ ∃y⃗ θ`.
pub fn functionality_sequents(
    theta: (&Context, &Formula),
    src: (&Context, &Formula),
    tgt: (&Context, &Formula),
) -> Result<Vec<Sequent>, ChaseError> {
    let (xs, ys) = (src.0, tgt.0);
    let shared: Vec<&str> = ys.vars().filter(|v| xs.contains(v)).collect();
    if !shared.is_empty() {
        return Err(ChaseError::ContextOverlap(shared.join(", ")));
    }
    let full = xs.concat(ys);
    if theta.0 != &full {
        return Err(ChaseError::IllFormed(format!("graph context {} is not {}", theta.0, full)));
    }
    let th = theta.1;
    let s1 = Sequent::new(full.clone(), th.clone(), Formula::and(vec![src.1.clone(), tgt.1.clone()]));

    let mut avoid: BTreeSet<String> = full.var_set();
    avoid.extend(th.all_vars());
    let mut renaming = BTreeMap::new();
    let mut primed = Context::new();
    for (y, s) in &ys.0 {
        let y2 = fresh_name(y, &avoid);
        avoid.insert(y2.clone());
        renaming.insert(y.clone(), Term::var(&y2));
        primed.push(y2, s.clone());
    }
    let eqs: Vec<Formula> = ys.0.iter().map(|(y, _)| Formula::Eq(Term::var(y), renaming[y].clone())).collect();
    let s2 = Sequent::new(
        full.concat(&primed),
        Formula::and(vec![th.clone(), substitute(th, &renaming)]),
        Formula::and(eqs),
    );

    let s3 = Sequent::new(xs.clone(), src.1.clone(), Formula::exists_many(ys, th.clone()));
    Ok(vec![s1, s2, s3])
}

pub fn provably_functional(
    thy: &Theory,
    theta: (&Context, &Formula),
    src: (&Context, &Formula),
    tgt: (&Context, &Formula),
    bound: usize,
) -> Result<Functionality, ChaseError> {
    provably_functional_with(thy, theta, src, tgt, bound, 3, &ChaseLimits::default())
}

/// As [`provably_functional`], searching countermodels with carriers of
/// size at most `model_size`.
pub fn provably_functional_with(
    thy: &Theory,
    theta: (&Context, &Formula),
    src: (&Context, &Formula),
    tgt: (&Context, &Formula),
    bound: usize,
    model_size: usize,
    limits: &ChaseLimits,
) -> Result<Functionality, ChaseError> {
    let sequents = functionality_sequents(theta, src, tgt)?;
    let outcomes = sequents.iter().map(|s| prove_sequent_with(thy, s, bound, limits)).collect::<Result<Vec<_>, _>>()?;
    if outcomes.iter().all(ProofOutcome::is_proved) {
        return Ok(Functionality { verdict: Verdict::Yes, sequents, outcomes, countermodel: None });
    }
    let countermodel = find_countermodel(thy, &sequents, model_size);
    let verdict = if countermodel.is_some() { Verdict::No } else { Verdict::Unknown };
    Ok(Functionality { verdict, sequents, outcomes, countermodel })
}

/// First model (smallest carriers first) refuting one of `sequents`.
/// Size vectors whose search space exceeds the default budget are skipped.
pub fn find_countermodel(thy: &Theory, sequents: &[Sequent], k: usize) -> Option<(usize, FinStructure)> {
    let mut vs = size_vectors(&thy.signature, 0, k);
    vs.sort_by_key(|v| v.values().sum::<usize>());
    for v in vs {
        if space_size(&thy.signature, &v) > DEFAULT_BUDGET {
            continue;
        }
        let mut found = None;
        for_each_structure(&thy.signature, &v, |m| {
            if let Some(i) = sequents.iter().position(|s| !holds_sequent(m, s)) {
                if is_model(m, thy) {
                    found = Some((i, m.clone()));
                    return false;
                }
            }
            true
        });
        if found.is_some() {
            return found;
        }
    }
    None
}
