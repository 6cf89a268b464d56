//! A stage-bounded small object argument for coherent theories, presented
//! by their signatures and axioms. Morphisms send symbols to symbols; a
//! morphism `T → T′` acts on models by restriction `T′-mod → T-mod`.
//! 2-cells are witnessed on finite families of probe models.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::chase::{find_countermodel, prove_sequent, ChaseError};
use crate::logic::{Sequent, Signature, Theory};
use crate::semantics::{enumerate_models, FinStructure, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoaError {
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("axiom {0} is not preserved")]
    NotAMorphism(usize),
    #[error("chain is not strict: {0}")]
    NotStrict(String),
    #[error("incompatible identifications: {0}")]
    SortConflict(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error(transparent)]
    Chase(#[from] ChaseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomStatus {
    /// The translated axiom is literally an axiom of the target.
    Member,
    Proved,
    Unknown,
}

/// A symbol-for-symbol interpretation of `src` in `tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryMorphism {
    pub src: Theory,
    pub tgt: Theory,
    pub sorts: BTreeMap<String, String>,
    pub symbols: BTreeMap<String, String>,
    pub axioms: Vec<AxiomStatus>,
}

fn symbol_names(sig: &Signature) -> impl Iterator<Item = &String> {
    sig.relations.keys().chain(sig.functions.keys())
}

fn check_shape(
    src: &Signature,
    tgt: &Signature,
    sorts: &BTreeMap<String, String>,
    symbols: &BTreeMap<String, String>,
) -> Result<(), SoaError> {
    let bad = |m: String| Err(SoaError::Shape(m));
    for s in &src.sorts {
        match sorts.get(s) {
            Some(t) if tgt.sorts.contains(t) => {}
            Some(t) => return bad(format!("sort {s} goes to unknown sort {t}")),
            None => return bad(format!("sort {s} is not mapped")),
        }
    }
    let map_all = |xs: &[String]| xs.iter().map(|x| sorts[x].clone()).collect::<Vec<_>>();
    for (r, args) in &src.relations {
        match symbols.get(r).and_then(|t| tgt.relations.get(t)) {
            Some(targs) if *targs == map_all(args) => {}
            Some(_) => return bad(format!("relation {r} changes arity")),
            None => return bad(format!("relation {r} is not mapped to a relation")),
        }
    }
    for (f, ty) in &src.functions {
        match symbols.get(f).and_then(|t| tgt.functions.get(t)) {
            Some(tt) if tt.args == map_all(&ty.args) && tt.result == sorts[&ty.result] => {}
            Some(_) => return bad(format!("function {f} changes type")),
            None => return bad(format!("function {f} is not mapped to a function")),
        }
    }
    Ok(())
}

impl TheoryMorphism {
    /// Checks arities and tries to prove every translated axiom at `bound`.
    /// A refuted axiom is an error; an undecided one is tagged Unknown.
    pub fn new(
        src: Theory,
        tgt: Theory,
        sorts: BTreeMap<String, String>,
        symbols: BTreeMap<String, String>,
        bound: usize,
    ) -> Result<TheoryMorphism, SoaError> {
        check_shape(&src.signature, &tgt.signature, &sorts, &symbols)?;
        let mut m = TheoryMorphism { src, tgt, sorts, symbols, axioms: Vec::new() };
        let members: BTreeSet<&Sequent> = m.tgt.axioms.iter().collect();
        let mut statuses = Vec::new();
        for (i, ax) in m.src.axioms.iter().enumerate() {
            let s = m.translate(ax);
            if members.contains(&s) {
                statuses.push(AxiomStatus::Member);
            } else if prove_sequent(&m.tgt, &s, bound)?.is_proved() {
                statuses.push(AxiomStatus::Proved);
            } else if find_countermodel(&m.tgt, std::slice::from_ref(&s), 2).is_some() {
                return Err(SoaError::NotAMorphism(i));
            } else {
                statuses.push(AxiomStatus::Unknown);
            }
        }
        m.axioms = statuses;
        Ok(m)
    }

    pub fn identity(thy: &Theory) -> TheoryMorphism {
        inclusion(thy, thy).unwrap()
    }

    pub fn is_certified(&self) -> bool {
        !self.axioms.contains(&AxiomStatus::Unknown)
    }

    pub fn translate(&self, s: &Sequent) -> Sequent {
        let sorts = |x: &str| self.sorts.get(x).cloned().unwrap_or_else(|| x.to_string());
        let syms = |x: &str| self.symbols.get(x).cloned().unwrap_or_else(|| x.to_string());
        s.map_names(&sorts, &syms)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &TheoryMorphism) -> Result<TheoryMorphism, SoaError> {
        if self.tgt != other.src {
            return Err(SoaError::Shape("morphisms are not composable".into()));
        }
        let sorts = self.sorts.iter().map(|(k, v)| (k.clone(), other.sorts[v].clone())).collect();
        let symbols = self.symbols.iter().map(|(k, v)| (k.clone(), other.symbols[v].clone())).collect();
        let members: BTreeSet<&Sequent> = other.tgt.axioms.iter().collect();
        let certified = self.is_certified() && other.is_certified();
        let mut m =
            TheoryMorphism { src: self.src.clone(), tgt: other.tgt.clone(), sorts, symbols, axioms: Vec::new() };
        m.axioms = m
            .src
            .axioms
            .iter()
            .map(|ax| match (members.contains(&m.translate(ax)), certified) {
                (true, _) => AxiomStatus::Member,
                (false, true) => AxiomStatus::Proved,
                (false, false) => AxiomStatus::Unknown,
            })
            .collect();
        Ok(m)
    }

    /// Same source, target and symbol maps.
    pub fn same_maps(&self, other: &TheoryMorphism) -> bool {
        self.src == other.src && self.tgt == other.tgt && self.sorts == other.sorts && self.symbols == other.symbols
    }

    /// Identity on names, with the source contained in the target.
    pub fn is_inclusion(&self) -> bool {
        self.sorts.iter().all(|(k, v)| k == v) && self.symbols.iter().all(|(k, v)| k == v)
    }

    /// The reduct of a target structure to the source signature.
    pub fn restrict(&self, m: &FinStructure) -> FinStructure {
        let sig = &self.src.signature;
        FinStructure {
            carriers: sig.sorts.iter().map(|s| (s.clone(), m.carriers[&self.sorts[s]].clone())).collect(),
            relations: sig.relations.keys().map(|r| (r.clone(), m.relation(&self.symbols[r]).clone())).collect(),
            functions: sig.functions.keys().map(|f| (f.clone(), m.functions[&self.symbols[f]].clone())).collect(),
        }
    }
}

/// The inclusion of `src` into `tgt`, if every name and axiom of `src`
/// is present in `tgt`.
pub fn inclusion(src: &Theory, tgt: &Theory) -> Result<TheoryMorphism, SoaError> {
    let (a, b) = (&src.signature, &tgt.signature);
    let contained = a.sorts.is_subset(&b.sorts)
        && a.relations.iter().all(|(k, v)| b.relations.get(k) == Some(v))
        && a.functions.iter().all(|(k, v)| b.functions.get(k) == Some(v))
        && src.axioms.iter().all(|ax| tgt.axioms.contains(ax));
    if !contained {
        return Err(SoaError::NotStrict("source is not contained in the target".into()));
    }
    Ok(TheoryMorphism {
        src: src.clone(),
        tgt: tgt.clone(),
        sorts: a.sorts.iter().map(|s| (s.clone(), s.clone())).collect(),
        symbols: symbol_names(a).map(|s| (s.clone(), s.clone())).collect(),
        axioms: vec![AxiomStatus::Member; src.axioms.len()],
    })
}

/// Agreement of the reducts of every probe model along both morphisms.
pub fn probe_equal(a: &TheoryMorphism, b: &TheoryMorphism, probes: &[FinStructure]) -> bool {
    probes.iter().all(|m| a.restrict(m) == b.restrict(m))
}

/// Models with carriers ≤ `k`, or none if the space is too large.
pub fn probe_models(thy: &Theory, k: usize) -> Vec<FinStructure> {
    enumerate_models(thy, k, DEFAULT_BUDGET).unwrap_or_default()
}

fn add_dedup(out: &mut Vec<Sequent>, s: Sequent) {
    if !out.contains(&s) {
        out.push(s);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Coproduct {
    pub theory: Theory,
    pub injections: Vec<TheoryMorphism>,
}

fn prefixed(k: usize, name: &str) -> String {
    format!("i{k}_{name}")
}

/// Disjoint union with every name of the k-th theory prefixed `i{k}_`.
pub fn theory_coproduct(ts: &[Theory]) -> Coproduct {
    let mut sig = Signature::new();
    let mut axioms = Vec::new();
    let mut maps = Vec::new();
    for (k, t) in ts.iter().enumerate() {
        let s = &t.signature;
        let sorts: BTreeMap<String, String> = s.sorts.iter().map(|x| (x.clone(), prefixed(k, x))).collect();
        let symbols: BTreeMap<String, String> = symbol_names(s).map(|x| (x.clone(), prefixed(k, x))).collect();
        sig.sorts.extend(sorts.values().cloned());
        for (r, args) in &s.relations {
            sig.relations.insert(symbols[r].clone(), args.iter().map(|a| sorts[a].clone()).collect());
        }
        for (f, ty) in &s.functions {
            sig.functions.insert(
                symbols[f].clone(),
                crate::logic::FunctionType {
                    args: ty.args.iter().map(|a| sorts[a].clone()).collect(),
                    result: sorts[&ty.result].clone(),
                },
            );
        }
        maps.push((sorts, symbols));
    }
    let mut theory = Theory::new(sig);
    for (t, (sorts, symbols)) in ts.iter().zip(&maps) {
        let sf = |x: &str| sorts[x].clone();
        let yf = |x: &str| symbols[x].clone();
        for ax in &t.axioms {
            add_dedup(&mut axioms, ax.map_names(&sf, &yf));
        }
    }
    theory.axioms = axioms;
    let injections = ts
        .iter()
        .zip(maps)
        .map(|(t, (sorts, symbols))| TheoryMorphism {
            src: t.clone(),
            tgt: theory.clone(),
            sorts,
            symbols,
            axioms: vec![AxiomStatus::Member; t.axioms.len()],
        })
        .collect();
    Coproduct { theory, injections }
}

/// The morphism out of a coproduct with the given components.
pub fn copair(c: &Coproduct, legs: &[TheoryMorphism], tgt: &Theory) -> Result<TheoryMorphism, SoaError> {
    if legs.len() != c.injections.len() {
        return Err(SoaError::Shape("one leg per summand is needed".into()));
    }
    let mut sorts = BTreeMap::new();
    let mut symbols = BTreeMap::new();
    for (inj, leg) in c.injections.iter().zip(legs) {
        if inj.src != leg.src || &leg.tgt != tgt {
            return Err(SoaError::Shape("leg does not match its summand".into()));
        }
        for (x, y) in &inj.sorts {
            sorts.insert(y.clone(), leg.sorts[x].clone());
        }
        for (x, y) in &inj.symbols {
            symbols.insert(y.clone(), leg.symbols[x].clone());
        }
    }
    let certified = legs.iter().all(TheoryMorphism::is_certified);
    let members: BTreeSet<&Sequent> = tgt.axioms.iter().collect();
    let mut m = TheoryMorphism { src: c.theory.clone(), tgt: tgt.clone(), sorts, symbols, axioms: Vec::new() };
    m.axioms = m
        .src
        .axioms
        .iter()
        .map(|ax| match (members.contains(&m.translate(ax)), certified) {
            (true, _) => AxiomStatus::Member,
            (false, true) => AxiomStatus::Proved,
            (false, false) => AxiomStatus::Unknown,
        })
        .collect();
    Ok(m)
}

/// `⊔ g_k : ⊔ A_k → ⊔ B_k`.
pub fn coproduct_of_morphisms(gs: &[&TheoryMorphism]) -> (Coproduct, Coproduct, TheoryMorphism) {
    let a = theory_coproduct(&gs.iter().map(|g| g.src.clone()).collect::<Vec<_>>());
    let b = theory_coproduct(&gs.iter().map(|g| g.tgt.clone()).collect::<Vec<_>>());
    let legs: Vec<TheoryMorphism> =
        gs.iter().zip(&b.injections).map(|(g, inj)| g.then(inj).expect("composable")).collect();
    let sum = copair(&a, &legs, &b.theory).expect("legs match");
    (a, b, sum)
}

#[derive(Debug, Clone, Serialize)]
pub struct Pushout {
    pub theory: Theory,
    /// `T₁ → P`; an inclusion unless the span identifies names of `T₁`.
    pub left: TheoryMorphism,
    /// `T₂ → P`.
    pub right: TheoryMorphism,
}

struct Classes {
    parent: BTreeMap<String, String>,
}

impl Classes {
    fn find(&mut self, x: &str) -> String {
        let p = self.parent.get(x).cloned().unwrap_or_else(|| x.to_string());
        if p == x {
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(x.to_string(), r.clone());
        r
    }

    fn union(&mut self, a: &str, b: &str) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }
}

/// Pushout of `a: T₀ → T₁` and `b: T₀ → T₂`. Names of `T₁` are kept; names
/// of `T₂` outside the image of `b` get `prefix`.
pub fn theory_pushout(a: &TheoryMorphism, b: &TheoryMorphism, prefix: &str) -> Result<Pushout, SoaError> {
    if a.src != b.src {
        return Err(SoaError::Shape("span legs have different sources".into()));
    }
    let (t1, t2) = (&a.tgt.signature, &b.tgt.signature);
    // '1' sorts before '2', so classes meeting T₁ are represented there
    let left = |x: &str| format!("1{x}");
    let right = |x: &str| format!("2{x}");
    let mut cls = Classes { parent: BTreeMap::new() };
    for s in &a.src.signature.sorts {
        cls.union(&left(&a.sorts[s]), &right(&b.sorts[s]));
    }
    for s in symbol_names(&a.src.signature) {
        cls.union(&left(&a.symbols[s]), &right(&b.symbols[s]));
    }
    let mut taken: BTreeSet<String> = t1.sorts.iter().chain(symbol_names(t1)).cloned().collect();
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let mut name_of = |cls: &mut Classes, tagged: String| -> String {
        let rep = cls.find(&tagged);
        if let Some(n) = names.get(&rep) {
            return n.clone();
        }
        let n = if let Some(x) = rep.strip_prefix('1') {
            x.to_string()
        } else {
            let mut n = format!("{prefix}{}", &rep[1..]);
            while taken.contains(&n) {
                n.push('\'');
            }
            taken.insert(n.clone());
            n
        };
        names.insert(rep, n.clone());
        n
    };
    let mut lsorts = BTreeMap::new();
    let mut rsorts = BTreeMap::new();
    let mut lsyms = BTreeMap::new();
    let mut rsyms = BTreeMap::new();
    for s in &t1.sorts {
        lsorts.insert(s.clone(), name_of(&mut cls, left(s)));
    }
    for s in &t2.sorts {
        rsorts.insert(s.clone(), name_of(&mut cls, right(s)));
    }
    for s in symbol_names(t1) {
        lsyms.insert(s.clone(), name_of(&mut cls, left(s)));
    }
    for s in symbol_names(t2) {
        rsyms.insert(s.clone(), name_of(&mut cls, right(s)));
    }

    let mut sig = Signature::new();
    sig.sorts.extend(lsorts.values().cloned());
    sig.sorts.extend(rsorts.values().cloned());
    let add =
        |sig: &mut Signature, side: &Signature, sorts: &BTreeMap<String, String>, syms: &BTreeMap<String, String>| {
            for (r, args) in &side.relations {
                let args: Vec<String> = args.iter().map(|x| sorts[x].clone()).collect();
                let name = &syms[r];
                if sig.functions.contains_key(name) {
                    return Err(SoaError::SortConflict(format!("{name} is both a relation and a function")));
                }
                match sig.relations.get(name) {
                    Some(old) if *old != args => return Err(SoaError::SortConflict(format!("relation {name}"))),
                    _ => {
                        sig.relations.insert(name.clone(), args);
                    }
                }
            }
            for (f, ty) in &side.functions {
                let ty = crate::logic::FunctionType {
                    args: ty.args.iter().map(|x| sorts[x].clone()).collect(),
                    result: sorts[&ty.result].clone(),
                };
                let name = &syms[f];
                if sig.relations.contains_key(name) {
                    return Err(SoaError::SortConflict(format!("{name} is both a relation and a function")));
                }
                match sig.functions.get(name) {
                    Some(old) if *old != ty => return Err(SoaError::SortConflict(format!("function {name}"))),
                    _ => {
                        sig.functions.insert(name.clone(), ty);
                    }
                }
            }
            Ok(())
        };
    add(&mut sig, t1, &lsorts, &lsyms)?;
    add(&mut sig, t2, &rsorts, &rsyms)?;

    let mut theory = Theory::new(sig);
    let lm = TheoryMorphism {
        src: a.tgt.clone(),
        tgt: Theory::default(),
        sorts: lsorts,
        symbols: lsyms,
        axioms: Vec::new(),
    };
    let rm = TheoryMorphism {
        src: b.tgt.clone(),
        tgt: Theory::default(),
        sorts: rsorts,
        symbols: rsyms,
        axioms: Vec::new(),
    };
    let mut axioms = Vec::new();
    for ax in &a.tgt.axioms {
        add_dedup(&mut axioms, lm.translate(ax));
    }
    for ax in &b.tgt.axioms {
        add_dedup(&mut axioms, rm.translate(ax));
    }
    theory.axioms = axioms;
    let finish = |mut m: TheoryMorphism| {
        m.tgt = theory.clone();
        m.axioms = vec![AxiomStatus::Member; m.src.axioms.len()];
        m
    };
    let (left, right) = (finish(lm), finish(rm));
    debug_assert!(a.then(&left).unwrap().same_maps(&b.then(&right).unwrap()));
    Ok(Pushout { theory, left, right })
}

/// The colimit of a strict chain of theories and the coprojection from the
/// first stage.
pub fn transfinite_composition(stages: &[Theory]) -> Result<(Theory, TheoryMorphism), SoaError> {
    let first = stages.first().ok_or_else(|| SoaError::Shape("empty chain".into()))?;
    let mut colimit = first.clone();
    for (j, w) in stages.windows(2).enumerate() {
        inclusion(&w[0], &w[1])
            .map_err(|_| SoaError::NotStrict(format!("stage {j} is not contained in stage {}", j + 1)))?;
        colimit.signature = colimit.signature.merged(&w[1].signature);
        for ax in &w[1].axioms {
            add_dedup(&mut colimit.axioms, ax.clone());
        }
    }
    let coprojection = inclusion(first, &colimit)?;
    Ok((colimit, coprojection))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SoaConfig {
    pub stages: usize,
    pub bound: usize,
    pub probe_size: usize,
    /// Most candidate morphisms examined per search.
    pub budget: usize,
}

impl Default for SoaConfig {
    fn default() -> Self {
        SoaConfig { stages: 2, bound: 6, probe_size: 2, budget: 20_000 }
    }
}

/// Predicates and fixed assignments for a search over symbol maps.
struct Search<'a> {
    src: &'a Theory,
    tgt: &'a Theory,
    fixed_sorts: BTreeMap<String, String>,
    fixed_syms: BTreeMap<String, String>,
    sort_ok: &'a dyn Fn(&str, &str) -> bool,
    sym_ok: &'a dyn Fn(&str, &str) -> bool,
}

#[derive(Debug, Clone, Default)]
struct Found {
    morphisms: Vec<TheoryMorphism>,
    unknown: usize,
    examined: usize,
    truncated: bool,
}

impl Search<'_> {
    fn run(&self, cfg: &SoaConfig) -> Result<Found, SoaError> {
        let sorts: Vec<&String> = self.src.signature.sorts.iter().collect();
        let mut out = Found::default();
        let mut map = BTreeMap::new();
        self.sorts_from(&sorts, 0, &mut map, &mut out, cfg)?;
        Ok(out)
    }

    fn sorts_from(
        &self,
        sorts: &[&String],
        k: usize,
        map: &mut BTreeMap<String, String>,
        out: &mut Found,
        cfg: &SoaConfig,
    ) -> Result<(), SoaError> {
        if out.truncated {
            return Ok(());
        }
        if k == sorts.len() {
            let syms: Vec<&String> = symbol_names(&self.src.signature).collect();
            return self.syms_from(map, &syms, 0, &mut BTreeMap::new(), out, cfg);
        }
        let s = sorts[k];
        let cands: Vec<&String> = match self.fixed_sorts.get(s) {
            Some(t) => self.tgt.signature.sorts.get(t).into_iter().collect(),
            None => self.tgt.signature.sorts.iter().collect(),
        };
        for t in cands {
            if (self.sort_ok)(s, t) {
                map.insert(s.clone(), t.clone());
                self.sorts_from(sorts, k + 1, map, out, cfg)?;
                map.remove(s);
            }
        }
        Ok(())
    }

    fn syms_from(
        &self,
        sorts: &BTreeMap<String, String>,
        syms: &[&String],
        k: usize,
        map: &mut BTreeMap<String, String>,
        out: &mut Found,
        cfg: &SoaConfig,
    ) -> Result<(), SoaError> {
        if out.truncated {
            return Ok(());
        }
        if k == syms.len() {
            out.examined += 1;
            if out.examined > cfg.budget {
                out.truncated = true;
                return Ok(());
            }
            match TheoryMorphism::new(self.src.clone(), self.tgt.clone(), sorts.clone(), map.clone(), cfg.bound) {
                Ok(m) if m.is_certified() => out.morphisms.push(m),
                Ok(_) => out.unknown += 1,
                Err(SoaError::NotAMorphism(_)) => {}
                Err(e) => return Err(e),
            }
            return Ok(());
        }
        let s = syms[k];
        let (src, tgt) = (&self.src.signature, &self.tgt.signature);
        let ms = |xs: &[String]| xs.iter().map(|x| sorts[x].clone()).collect::<Vec<_>>();
        let cands: Vec<&String> = if let Some(args) = src.relations.get(s) {
            let want = ms(args);
            tgt.relations.iter().filter(|(_, a)| **a == want).map(|(n, _)| n).collect()
        } else {
            let ty = &src.functions[s];
            let (want, res) = (ms(&ty.args), &sorts[&ty.result]);
            tgt.functions.iter().filter(|(_, t)| t.args == want && &t.result == res).map(|(n, _)| n).collect()
        };
        for t in cands {
            if self.fixed_syms.get(s).is_some_and(|f| f != t) || !(self.sym_ok)(s, t) {
                continue;
            }
            map.insert(s.clone(), t.clone());
            self.syms_from(sorts, syms, k + 1, map, out, cfg)?;
            map.remove(s);
        }
        Ok(())
    }
}

/// All certified morphisms `src → tgt`, in lexicographic order of their
/// symbol maps.
pub fn enumerate_morphisms(src: &Theory, tgt: &Theory, cfg: &SoaConfig) -> Result<Vec<TheoryMorphism>, SoaError> {
    let any = |_: &str, _: &str| true;
    let s = Search { src, tgt, fixed_sorts: BTreeMap::new(), fixed_syms: BTreeMap::new(), sort_ok: &any, sym_ok: &any };
    let found = s.run(cfg)?;
    if found.truncated {
        return Err(SoaError::Budget(format!("more than {} candidate morphisms", cfg.budget)));
    }
    Ok(found.morphisms)
}

/// A commuting square from `I[g]` into a morphism `ρ: X → Y`: `h: A → X`,
/// `k: B → Y` with `ρ∘h = k∘g`. The 2-cell is the identity.
#[derive(Debug, Clone, Serialize)]
pub struct Square {
    pub g: usize,
    pub h: TheoryMorphism,
    pub k: TheoryMorphism,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SquareSet {
    pub squares: Vec<Square>,
    /// Candidates whose axioms were neither proved nor refuted.
    pub unknown: usize,
    pub truncated: bool,
}

/// Fixes `k` on the image of `g` to agree with `ρ∘h`; None on a clash.
fn forced(g: &TheoryMorphism, image: &TheoryMorphism) -> Option<(BTreeMap<String, String>, BTreeMap<String, String>)> {
    let mut sorts = BTreeMap::new();
    let mut syms = BTreeMap::new();
    for (a, b) in &g.sorts {
        if sorts.insert(b.clone(), image.sorts[a].clone()).is_some_and(|old| old != image.sorts[a]) {
            return None;
        }
    }
    for (a, b) in &g.symbols {
        if syms.insert(b.clone(), image.symbols[a].clone()).is_some_and(|old| old != image.symbols[a]) {
            return None;
        }
    }
    Some((sorts, syms))
}

pub fn enumerate_lifting_squares(
    i: &[TheoryMorphism],
    rho: &TheoryMorphism,
    cfg: &SoaConfig,
) -> Result<SquareSet, SoaError> {
    let mut out = SquareSet::default();
    let any = |_: &str, _: &str| true;
    for (gi, g) in i.iter().enumerate() {
        let hs = Search {
            src: &g.src,
            tgt: &rho.src,
            fixed_sorts: BTreeMap::new(),
            fixed_syms: BTreeMap::new(),
            sort_ok: &any,
            sym_ok: &any,
        }
        .run(cfg)?;
        out.unknown += hs.unknown;
        out.truncated |= hs.truncated;
        for h in hs.morphisms {
            let image = h.then(rho)?;
            let Some((fixed_sorts, fixed_syms)) = forced(g, &image) else { continue };
            let ks =
                Search { src: &g.tgt, tgt: &rho.tgt, fixed_sorts, fixed_syms, sort_ok: &any, sym_ok: &any }.run(cfg)?;
            out.unknown += ks.unknown;
            out.truncated |= ks.truncated;
            for k in ks.morphisms {
                out.squares.push(Square { g: gi, h: h.clone(), k });
            }
        }
    }
    Ok(out)
}

/// A lift `l: B → X` with `l∘g = h` and `f∘l = k`, confirmed on probes.
#[derive(Debug, Clone, Serialize)]
pub struct LiftSolution {
    pub lift: TheoryMorphism,
    /// `l∘g` and `h` agree on the probes.
    pub nu1: bool,
    /// `f∘l` and `k` agree on the probes.
    pub nu2: bool,
    /// The pasted cell equals the square's cell on the probes.
    pub pasting: bool,
    pub probes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub enum RlpOutcome {
    Lift(LiftSolution),
    Refused { searched: usize },
    Unknown { searched: usize, unknown: usize },
}

impl RlpOutcome {
    pub fn is_lift(&self) -> bool {
        matches!(self, RlpOutcome::Lift(_))
    }
}

pub fn check_rlp(g: &TheoryMorphism, f: &TheoryMorphism, sq: &Square, cfg: &SoaConfig) -> Result<RlpOutcome, SoaError> {
    if sq.h.src != g.src || sq.k.src != g.tgt || sq.h.tgt != f.src || sq.k.tgt != f.tgt {
        return Err(SoaError::Shape("square does not fit g and f".into()));
    }
    let Some((fixed_sorts, fixed_syms)) = forced(g, &sq.h) else {
        return Ok(RlpOutcome::Refused { searched: 0 });
    };
    let sort_ok = |x: &str, t: &str| f.sorts[t] == sq.k.sorts[x];
    let sym_ok = |x: &str, t: &str| f.symbols[t] == sq.k.symbols[x];
    let found =
        Search { src: &g.tgt, tgt: &f.src, fixed_sorts, fixed_syms, sort_ok: &sort_ok, sym_ok: &sym_ok }.run(cfg)?;
    let Some(lift) = found.morphisms.into_iter().next() else {
        if found.unknown > 0 || found.truncated {
            return Ok(RlpOutcome::Unknown { searched: found.examined, unknown: found.unknown });
        }
        return Ok(RlpOutcome::Refused { searched: found.examined });
    };
    let ys = probe_models(&f.tgt, cfg.probe_size);
    let xs: Vec<FinStructure> = ys.iter().map(|m| f.restrict(m)).collect();
    let nu1 = probe_equal(&g.then(&lift)?, &sq.h, &xs);
    let nu2 = probe_equal(&lift.then(f)?, &sq.k, &ys);
    let eta = probe_equal(&sq.h.then(f)?, &g.then(&sq.k)?, &ys);
    Ok(RlpOutcome::Lift(LiftSolution { lift, nu1, nu2, pasting: nu1 && nu2 && eta, probes: ys.len() }))
}

/// One successor stage: the squares, `⊔g_s`, `⊔h_s`, the pushout leg
/// `i_{j,j+1}` and the induced `ρ_{j+1}`.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub index: usize,
    pub squares: Vec<Square>,
    pub glue: TheoryMorphism,
    pub attach: TheoryMorphism,
    pub step: TheoryMorphism,
    pub cells: TheoryMorphism,
    pub rho: TheoryMorphism,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellStageLog {
    pub z0: Theory,
    pub rho0: TheoryMorphism,
    pub stages: Vec<Stage>,
}

impl CellStageLog {
    pub fn theory(&self, j: usize) -> &Theory {
        if j == 0 {
            &self.z0
        } else {
            &self.stages[j - 1].step.tgt
        }
    }

    /// Rebuilds every stage as a pushout of a coproduct of maps from `i`
    /// and compares; also checks that the induced maps commute.
    pub fn check(&self, i: &[TheoryMorphism]) -> Vec<String> {
        let mut out = Vec::new();
        let mut rho = &self.rho0;
        for st in &self.stages {
            let j = st.index;
            let z = self.theory(j - 1);
            if st.squares.iter().any(|s| s.g >= i.len()) {
                out.push(format!("stage {j}: square names a map outside I"));
                continue;
            }
            let gs: Vec<&TheoryMorphism> = st.squares.iter().map(|s| &i[s.g]).collect();
            let (ca, _, glue) = coproduct_of_morphisms(&gs);
            if !glue.same_maps(&st.glue) {
                out.push(format!("stage {j}: glue is not the coproduct of the attached maps"));
            }
            let hs: Vec<TheoryMorphism> = st.squares.iter().map(|s| s.h.clone()).collect();
            match copair(&ca, &hs, z) {
                Ok(a) if a.same_maps(&st.attach) => {}
                _ => out.push(format!("stage {j}: attaching map is not the copairing of the squares")),
            }
            match theory_pushout(&st.attach, &st.glue, &format!("c{j}_")) {
                Ok(p) if p.theory == st.step.tgt && p.left.same_maps(&st.step) && p.right.same_maps(&st.cells) => {}
                _ => out.push(format!("stage {j}: not the pushout of glue along attach")),
            }
            if !st.step.then(&st.rho).is_ok_and(|m| m.same_maps(rho)) {
                out.push(format!("stage {j}: rho does not extend the previous rho"));
            }
            let ks: Vec<TheoryMorphism> = st.squares.iter().map(|s| s.k.clone()).collect();
            let (_, cb, _) = coproduct_of_morphisms(&gs);
            match (st.cells.then(&st.rho), copair(&cb, &ks, &rho.tgt)) {
                (Ok(a), Ok(b)) if a.same_maps(&b) => {}
                _ => out.push(format!("stage {j}: rho does not restrict to the k maps")),
            }
            rho = &st.rho;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InjReport {
    pub squares: usize,
    pub lifted: usize,
    pub refused: usize,
    pub unknown: usize,
    /// Lifts whose probe pasting check failed.
    pub bad_pasting: usize,
    /// Squares whose top map lands in the previous stage; these were
    /// attached at the last stage and lift by construction.
    pub inherited: usize,
    pub inherited_lifted: usize,
}

impl InjReport {
    pub fn all_lift(&self) -> bool {
        self.lifted == self.squares && self.bad_pasting == 0
    }
}

/// `f″ ∘ f′` with `f′` the composite of the stage pushouts. `injectivity`
/// covers the squares enumerated against `f″` after the last stage only.
#[derive(Debug, Clone, Serialize)]
pub struct SoaResult {
    pub fprime: TheoryMorphism,
    pub fsecond: TheoryMorphism,
    pub log: CellStageLog,
    pub injectivity: InjReport,
    /// Reducts along `f″∘f′` and along `f` agree on every probe model.
    pub composite_agrees: bool,
    pub probes: usize,
}

pub fn soa_factorize(f: &TheoryMorphism, i: &[TheoryMorphism], cfg: &SoaConfig) -> Result<SoaResult, SoaError> {
    let mut z = f.src.clone();
    let mut rho = f.clone();
    let mut fprime = TheoryMorphism::identity(&z);
    let mut stages = Vec::new();
    for j in 1..=cfg.stages {
        let set = enumerate_lifting_squares(i, &rho, cfg)?;
        if set.truncated {
            return Err(SoaError::Budget(format!("square enumeration at stage {j}")));
        }
        let gs: Vec<&TheoryMorphism> = set.squares.iter().map(|s| &i[s.g]).collect();
        let (ca, cb, glue) = coproduct_of_morphisms(&gs);
        let hs: Vec<TheoryMorphism> = set.squares.iter().map(|s| s.h.clone()).collect();
        let attach = copair(&ca, &hs, &z)?;
        let po = theory_pushout(&attach, &glue, &format!("c{j}_"))?;
        let mut sorts = BTreeMap::new();
        let mut symbols = BTreeMap::new();
        let assign = |m: &mut BTreeMap<String, String>, k: &String, v: &String| match m.insert(k.clone(), v.clone()) {
            Some(old) if &old != v => Err(SoaError::SortConflict(format!("{k} is sent to {old} and {v}"))),
            _ => Ok(()),
        };
        for (x, y) in &po.left.sorts {
            assign(&mut sorts, y, &rho.sorts[x])?;
        }
        for (x, y) in &po.left.symbols {
            assign(&mut symbols, y, &rho.symbols[x])?;
        }
        for (inj, sq) in cb.injections.iter().zip(&set.squares) {
            for (x, y) in &inj.sorts {
                assign(&mut sorts, &po.right.sorts[y], &sq.k.sorts[x])?;
            }
            for (x, y) in &inj.symbols {
                assign(&mut symbols, &po.right.symbols[y], &sq.k.symbols[x])?;
            }
        }
        let next = TheoryMorphism::new(po.theory.clone(), f.tgt.clone(), sorts, symbols, cfg.bound)?;
        fprime = fprime.then(&po.left)?;
        z = po.theory.clone();
        stages.push(Stage {
            index: j,
            squares: set.squares,
            glue,
            attach,
            step: po.left,
            cells: po.right,
            rho: next.clone(),
        });
        rho = next;
    }
    let log = CellStageLog { z0: f.src.clone(), rho0: f.clone(), stages };

    let mut injectivity = InjReport::default();
    let previous = log.stages.last().map(|st| {
        let sorts: BTreeSet<&String> = st.step.sorts.values().collect();
        let syms: BTreeSet<&String> = st.step.symbols.values().collect();
        (sorts, syms)
    });
    let set = enumerate_lifting_squares(i, &rho, cfg)?;
    if set.truncated {
        return Err(SoaError::Budget("square enumeration after the last stage".into()));
    }
    injectivity.unknown += set.unknown;
    for sq in &set.squares {
        injectivity.squares += 1;
        let inherited = previous.as_ref().is_some_and(|(sorts, syms)| {
            sq.h.sorts.values().all(|x| sorts.contains(x)) && sq.h.symbols.values().all(|x| syms.contains(x))
        });
        injectivity.inherited += inherited as usize;
        match check_rlp(&i[sq.g], &rho, sq, cfg)? {
            RlpOutcome::Lift(l) => {
                injectivity.lifted += 1;
                injectivity.inherited_lifted += inherited as usize;
                if !l.pasting {
                    injectivity.bad_pasting += 1;
                }
            }
            RlpOutcome::Refused { .. } => injectivity.refused += 1,
            RlpOutcome::Unknown { .. } => injectivity.unknown += 1,
        }
    }
    let probes = probe_models(&f.tgt, cfg.probe_size);
    let composite_agrees = probe_equal(&fprime.then(&rho)?, f, &probes);
    Ok(SoaResult { fprime, fsecond: rho, log, injectivity, composite_agrees, probes: probes.len() })
}
