//! The syntactic category of a coherent theory, explored lazily: objects
//! are formulas in context, arrows provably functional formulas, and
//! equality of arrows is decided by the bounded prover when it can be.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::chase::{
    find_countermodel, provably_functional_with, prove_sequent_with, replay, ChaseError, ChaseLimits, ProofOutcome,
    Verdict,
};
use crate::logic::{normalize, substitute, Context, Formula, Sequent, Term, Theory};
use crate::semantics::{interpret_formula, is_model, FinStructure};

pub const DEFAULT_BOUND: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynError {
    #[error("formula is not coherent")]
    NotCoherent,
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error("endpoints do not match: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error("structure is not a model of the theory")]
    NotAModel,
    #[error("certified arrow does not evaluate to a function: {0}")]
    CertifiedArrowViolation(String),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ObjData {
    ctx: Context,
    formula: Formula,
}

/// A normalized formula in context (variables `v0, v1, …`).
#[derive(Debug, Clone, Eq)]
pub struct SynObject(Arc<ObjData>);

impl PartialEq for SynObject {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl SynObject {
    pub fn ctx(&self) -> &Context {
        &self.0.ctx
    }

    pub fn formula(&self) -> &Formula {
        &self.0.formula
    }

    /// The object's formula over the variables `{prefix}0, {prefix}1, …`.
    pub fn instantiate(&self, prefix: &str) -> (Context, Formula) {
        let mut ctx = Context::new();
        let mut map = BTreeMap::new();
        for (i, (v, s)) in self.0.ctx.0.iter().enumerate() {
            let n = format!("{prefix}{i}");
            map.insert(v.clone(), Term::var(&n));
            ctx.push(n, s.clone());
        }
        (ctx, substitute(&self.0.formula, &map))
    }
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// The three functionality proofs.
    Proved(Vec<ProofOutcome>),
    Unknown,
}

/// An arrow `[θ]`: θ is over `x0… ++ y0…`, the source variables then the
/// target variables.
#[derive(Debug, Clone)]
pub struct SynArrow {
    pub src: SynObject,
    pub tgt: SynObject,
    pub theta: Formula,
    pub certificate: Certificate,
}

impl SynArrow {
    pub fn is_certified(&self) -> bool {
        matches!(self.certificate, Certificate::Proved(_))
    }

    pub fn context(&self) -> Context {
        self.src.instantiate("x").0.concat(&self.tgt.instantiate("y").0)
    }
}

#[derive(Debug, Clone)]
pub enum ArrowOutcome {
    Yes(SynArrow),
    /// A model of the theory refuting functionality condition `index`.
    No {
        index: usize,
        countermodel: FinStructure,
    },
    /// Not decided within the bound; the arrow is uncertified.
    Unknown(SynArrow),
}

impl ArrowOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            ArrowOutcome::Yes(_) => Verdict::Yes,
            ArrowOutcome::No { .. } => Verdict::No,
            ArrowOutcome::Unknown(_) => Verdict::Unknown,
        }
    }

    pub fn arrow(&self) -> Option<&SynArrow> {
        match self {
            ArrowOutcome::Yes(a) | ArrowOutcome::Unknown(a) => Some(a),
            ArrowOutcome::No { .. } => None,
        }
    }

    /// The arrow, if certified.
    pub fn certified(self) -> Option<SynArrow> {
        match self {
            ArrowOutcome::Yes(a) => Some(a),
            _ => None,
        }
    }
}

/// A theory with a fixed proof bound and a table of objects.
#[derive(Debug)]
pub struct Session {
    pub thy: Theory,
    pub bound: usize,
    /// Largest carrier searched for countermodels.
    pub model_size: usize,
    pub limits: ChaseLimits,
    objects: HashMap<(Context, Formula), SynObject>,
}

impl Session {
    pub fn new(thy: Theory) -> Session {
        Session::with_bound(thy, DEFAULT_BOUND)
    }

    pub fn with_bound(thy: Theory, bound: usize) -> Session {
        Session { thy, bound, model_size: 3, limits: ChaseLimits::default(), objects: HashMap::new() }
    }

    pub fn object(&mut self, ctx: &Context, phi: &Formula) -> Result<SynObject, SynError> {
        if !phi.is_coherent() {
            return Err(SynError::NotCoherent);
        }
        self.thy.signature.check_formula(ctx, phi).map_err(|e| SynError::IllFormed(e.to_string()))?;
        if !ctx.has_distinct_vars() {
            return Err(SynError::IllFormed("context variables repeat".into()));
        }
        let key = normalize(ctx, phi);
        let o = self
            .objects
            .entry(key.clone())
            .or_insert_with(|| SynObject(Arc::new(ObjData { ctx: key.0, formula: key.1 })));
        Ok(o.clone())
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// `[x⃗, y⃗] φ(x⃗) ∧ y⃗ = x⃗`.
    pub fn identity(&mut self, o: &SynObject) -> Result<ArrowOutcome, SynError> {
        let (xs, phi) = o.instantiate("x");
        let (ys, _) = o.instantiate("y");
        let eqs = ys.vars().zip(xs.vars()).map(|(y, x)| Formula::eq(Term::var(y), Term::var(x)));
        let theta = Formula::and(std::iter::once(phi).chain(eqs));
        self.certify(o.clone(), o.clone(), theta)
    }

    /// Wraps the functionality check for `θ` over `src.ctx ++ tgt.ctx`.
    pub fn arrow(
        &mut self,
        theta: &Formula,
        src: (&Context, &Formula),
        tgt: (&Context, &Formula),
    ) -> Result<ArrowOutcome, SynError> {
        let shared: Vec<&str> = tgt.0.vars().filter(|v| src.0.contains(v)).collect();
        if !shared.is_empty() {
            return Err(ChaseError::ContextOverlap(shared.join(", ")).into());
        }
        let full = src.0.concat(tgt.0);
        if !theta.is_coherent() {
            return Err(SynError::NotCoherent);
        }
        self.thy.signature.check_formula(&full, theta).map_err(|e| SynError::IllFormed(e.to_string()))?;
        let so = self.object(src.0, src.1)?;
        let to = self.object(tgt.0, tgt.1)?;
        let mut map = BTreeMap::new();
        for (i, v) in src.0.vars().enumerate() {
            map.insert(v.to_string(), Term::var(format!("x{i}")));
        }
        for (i, v) in tgt.0.vars().enumerate() {
            map.insert(v.to_string(), Term::var(format!("y{i}")));
        }
        self.certify(so, to, substitute(theta, &map))
    }

    fn certify(&mut self, src: SynObject, tgt: SynObject, theta: Formula) -> Result<ArrowOutcome, SynError> {
        let (xs, phi) = src.instantiate("x");
        let (ys, psi) = tgt.instantiate("y");
        let full = xs.concat(&ys);
        let r = provably_functional_with(
            &self.thy,
            (&full, &theta),
            (&xs, &phi),
            (&ys, &psi),
            self.bound,
            self.model_size,
            &self.limits,
        )?;
        Ok(match r.verdict {
            Verdict::Yes => {
                ArrowOutcome::Yes(SynArrow { src, tgt, theta, certificate: Certificate::Proved(r.outcomes) })
            }
            Verdict::No => {
                let (index, countermodel) = r.countermodel.unwrap();
                ArrowOutcome::No { index, countermodel }
            }
            Verdict::Unknown => ArrowOutcome::Unknown(SynArrow { src, tgt, theta, certificate: Certificate::Unknown }),
        })
    }

    /// Checks every proof of a certified arrow by replay.
    pub fn replay(&self, a: &SynArrow) -> Result<bool, SynError> {
        let Certificate::Proved(outcomes) = &a.certificate else { return Ok(false) };
        let (xs, phi) = a.src.instantiate("x");
        let (ys, psi) = a.tgt.instantiate("y");
        let full = xs.concat(&ys);
        let seqs = crate::chase::functionality_sequents((&full, &a.theta), (&xs, &phi), (&ys, &psi))?;
        for (s, o) in seqs.iter().zip(outcomes) {
            match o.certificate() {
                Some(c) if replay(&self.thy, s, c)? => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// `∃m⃗ (θ(x⃗, m⃗) ∧ δ(m⃗, y⃗))`, re-certified.
    pub fn compose(&mut self, a: &SynArrow, b: &SynArrow) -> Result<ArrowOutcome, SynError> {
        if a.tgt != b.src {
            return Err(SynError::Mismatch("target of the first arrow is not the source of the second".into()));
        }
        let (ms, _) = a.tgt.instantiate("m");
        let mut avoid: BTreeSet<String> = a.theta.all_vars();
        avoid.extend(b.theta.all_vars());
        // middle variables must not clash with anything in either formula
        let mut middle = Context::new();
        let mut to_mid = BTreeMap::new();
        let mut from_mid = BTreeMap::new();
        for (i, (m, s)) in ms.0.iter().enumerate() {
            let mut n = m.clone();
            while avoid.contains(&n) {
                n.push('\'');
            }
            avoid.insert(n.clone());
            to_mid.insert(format!("y{i}"), Term::var(&n));
            from_mid.insert(format!("x{i}"), Term::var(&n));
            middle.push(n, s.clone());
        }
        let left = substitute(&a.theta, &to_mid);
        let right = substitute(&b.theta, &from_mid);
        let theta = Formula::exists_many(&middle, Formula::and([left, right]));
        self.certify(a.src.clone(), b.tgt.clone(), theta)
    }

    /// Provable equivalence of two parallel arrows.
    pub fn eq(&mut self, a: &SynArrow, b: &SynArrow) -> Result<Verdict, SynError> {
        if a.src != b.src || a.tgt != b.tgt {
            return Err(SynError::Mismatch("arrows are not parallel".into()));
        }
        let ctx = a.context();
        let s1 = Sequent::new(ctx.clone(), a.theta.clone(), b.theta.clone());
        let s2 = Sequent::new(ctx, b.theta.clone(), a.theta.clone());
        let p1 = prove_sequent_with(&self.thy, &s1, self.bound, &self.limits)?;
        let p2 = prove_sequent_with(&self.thy, &s2, self.bound, &self.limits)?;
        if p1.is_proved() && p2.is_proved() {
            return Ok(Verdict::Yes);
        }
        Ok(match find_countermodel(&self.thy, &[s1, s2], self.model_size) {
            Some(_) => Verdict::No,
            None => Verdict::Unknown,
        })
    }

    /// `[x⃗ ++ y⃗] φ(x⃗) ∧ ψ(y⃗)` with its two projections.
    pub fn product(
        &mut self,
        a: &SynObject,
        b: &SynObject,
    ) -> Result<(SynObject, ArrowOutcome, ArrowOutcome), SynError> {
        let (xs, phi) = a.instantiate("p");
        let (ys, psi) = b.instantiate("q");
        let ctx = xs.concat(&ys);
        let body = Formula::and([phi.clone(), psi.clone()]);
        let prod = self.object(&ctx, &body)?;
        let proj = |s: &mut Session, part: &Context, tgt: &SynObject| {
            let (ts, tf) = tgt.instantiate("t");
            let eqs = ts.vars().zip(part.vars()).map(|(t, v)| Formula::eq(Term::var(t), Term::var(v)));
            let theta = Formula::and(std::iter::once(body.clone()).chain(eqs));
            s.arrow(&theta, (&ctx, &body), (&ts, &tf))
        };
        let p1 = proj(self, &xs, a)?;
        let p2 = proj(self, &ys, b)?;
        Ok((prod, p1, p2))
    }

    /// The image `[y⃗] ∃x⃗ θ` of an arrow with its inclusion into the target.
    pub fn image(&mut self, f: &SynArrow) -> Result<(SynObject, ArrowOutcome), SynError> {
        let (xs, _) = f.src.instantiate("x");
        let (ys, psi) = f.tgt.instantiate("y");
        let img = Formula::exists_many(&xs, f.theta.clone());
        let o = self.object(&ys, &img)?;
        let (zs, _) = f.tgt.instantiate("z");
        let eqs = zs.vars().zip(ys.vars()).map(|(z, y)| Formula::eq(Term::var(z), Term::var(y)));
        let theta = Formula::and(std::iter::once(img.clone()).chain(eqs));
        let m = self.arrow(&theta, (&ys, &img), (&zs, &substitute(&psi, &rename(&ys, &zs))))?;
        Ok((o, m))
    }

    /// The union `[x⃗] φ ∨ ψ` of two objects over the same context, with its
    /// inclusion into `[x⃗] χ`.
    pub fn union(
        &mut self,
        a: &SynObject,
        b: &SynObject,
        whole: &SynObject,
    ) -> Result<(SynObject, ArrowOutcome), SynError> {
        if a.ctx() != b.ctx() || a.ctx() != whole.ctx() {
            return Err(SynError::Mismatch("union of objects over different contexts".into()));
        }
        let (xs, phi) = a.instantiate("x");
        let (_, psi) = b.instantiate("x");
        let (zs, chi) = whole.instantiate("z");
        let u = Formula::or([phi, psi]);
        let o = self.object(&xs, &u)?;
        let eqs = zs.vars().zip(xs.vars()).map(|(z, x)| Formula::eq(Term::var(z), Term::var(x)));
        let theta = Formula::and(std::iter::once(u.clone()).chain(eqs));
        let m = self.arrow(&theta, (&xs, &u), (&zs, &chi))?;
        Ok((o, m))
    }
}

fn rename(from: &Context, to: &Context) -> BTreeMap<String, Term> {
    from.vars().zip(to.vars()).map(|(a, b)| (a.to_string(), Term::var(b))).collect()
}

/// The value of an arrow in a model: a function between the interpreted
/// objects, elements listed in increasing tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalArrow {
    pub src: Vec<Vec<usize>>,
    pub tgt: Vec<Vec<usize>>,
    pub map: Vec<usize>,
}

/// Evaluation of the syntactic category in a model.
#[derive(Debug, Clone)]
pub struct EvalFunctor<'a> {
    pub model: &'a FinStructure,
}

pub fn eval_functor<'a>(thy: &Theory, model: &'a FinStructure) -> Result<EvalFunctor<'a>, SynError> {
    if !is_model(model, thy) {
        return Err(SynError::NotAModel);
    }
    Ok(EvalFunctor { model })
}

impl EvalFunctor<'_> {
    pub fn object(&self, o: &SynObject) -> Vec<Vec<usize>> {
        interpret_formula(self.model, o.ctx(), o.formula()).tuples.into_iter().collect()
    }

    /// Fails loudly when the graph is not a function between the objects.
    pub fn arrow(&self, a: &SynArrow) -> Result<EvalArrow, SynError> {
        let src = self.object(&a.src);
        let tgt = self.object(&a.tgt);
        let ctx = a.context();
        let n = a.src.ctx().len();
        let graph = interpret_formula(self.model, &ctx, &a.theta).tuples;
        let mut map = vec![usize::MAX; src.len()];
        for t in &graph {
            let (x, y) = t.split_at(n);
            let i = src
                .binary_search(&x.to_vec())
                .map_err(|_| SynError::CertifiedArrowViolation(format!("{x:?} outside the source")))?;
            let j = tgt
                .binary_search(&y.to_vec())
                .map_err(|_| SynError::CertifiedArrowViolation(format!("{y:?} outside the target")))?;
            if map[i] != usize::MAX && map[i] != j {
                return Err(SynError::CertifiedArrowViolation(format!("{x:?} has two values")));
            }
            map[i] = j;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(SynError::CertifiedArrowViolation(format!("{:?} has no value", src[i])));
        }
        Ok(EvalArrow { src, tgt, map })
    }
}
