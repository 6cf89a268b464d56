//! Homotopy limits of finite categories: the equivalence–isofibration
//! factorization, homotopy products and pullbacks with their universal
//! data, and splitting of 2-cells through a 2-equalizer.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{
    enumerate_functors, enumerate_natural_isos, pullback_category, reflection_failures, sample_limits,
    validate_functor, validate_two_cell, Arrow, Diagram, FinCat, FinCatError, Functor, Pullback, TwoCell,
};

/// Cap on enumerations used for uniqueness and equivalence checks.
pub const ENUM_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwoCatError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot lift {0} through the isofibration")]
    LiftFailure(String),
    #[error("object or arrow missing from the pullback: {0}")]
    NotInPullback(String),
    #[error("compatibility fails: {0}")]
    Compatibility(String),
    #[error("expected exactly one connecting 2-cell, found {0}")]
    NotUnique(usize),
    #[error("no 2-cell splits the given one")]
    NoSplit,
    #[error(transparent)]
    FinCat(#[from] FinCatError),
}

fn check_functor(what: &str, f: &Functor) -> Result<(), TwoCatError> {
    let errs = validate_functor(f);
    if errs.is_empty() {
        Ok(())
    } else {
        Err(TwoCatError::Invalid(format!("{what}: {}", errs.join("; "))))
    }
}

fn check_cell(what: &str, t: &TwoCell) -> Result<(), TwoCatError> {
    let errs = validate_two_cell(t);
    if errs.is_empty() {
        Ok(())
    } else {
        Err(TwoCatError::Invalid(format!("{what}: {}", errs.join("; "))))
    }
}

/// `phi: C → D` with quasi-inverse `inv`, unit `1_D ⇒ phi∘inv` and counit
/// `inv∘phi ⇒ 1_C`.
#[derive(Debug, Clone)]
pub struct EquivalenceData {
    pub phi: Functor,
    pub inv: Functor,
    pub unit: TwoCell,
    pub counit: TwoCell,
}

impl EquivalenceData {
    /// Empty iff all four pieces are valid and both triangle identities hold.
    pub fn check(&self) -> Vec<String> {
        let mut out = validate_functor(&self.phi);
        out.extend(validate_functor(&self.inv));
        if !out.is_empty() {
            return out;
        }
        let (c, d) = (&self.phi.src, &self.phi.tgt);
        if self.unit.from != Functor::identity(d) || self.unit.to != self.inv.then(&self.phi) {
            out.push("unit has the wrong boundary".into());
        }
        if self.counit.from != self.phi.then(&self.inv) || self.counit.to != Functor::identity(c) {
            out.push("counit has the wrong boundary".into());
        }
        out.extend(validate_two_cell(&self.unit).into_iter().map(|e| format!("unit: {e}")));
        out.extend(validate_two_cell(&self.counit).into_iter().map(|e| format!("counit: {e}")));
        if !out.is_empty() {
            return out;
        }
        // phi --(unit phi)--> phi inv phi --(phi counit)--> phi
        for x in 0..c.n_objects() {
            let a = self.unit.comps[self.phi.obj[x]];
            let b = self.phi.arr[self.counit.comps[x]];
            if !d.is_identity(d.comp(b, a)) {
                out.push(format!("triangle identity fails at {}", c.objects[x]));
            }
        }
        // inv --(inv unit)--> inv phi inv --(counit inv)--> inv
        for y in 0..d.n_objects() {
            let a = self.inv.arr[self.unit.comps[y]];
            let b = self.counit.comps[self.inv.obj[y]];
            if !c.is_identity(c.comp(b, a)) {
                out.push(format!("triangle identity fails at {}", d.objects[y]));
            }
        }
        out
    }
}

/// Searches for an adjoint equivalence `c → d`.
pub fn find_equivalence(c: &Arc<FinCat>, d: &Arc<FinCat>, limit: usize) -> Option<EquivalenceData> {
    if c.n_objects() == 0 || d.n_objects() == 0 {
        if c.n_objects() != d.n_objects() {
            return None;
        }
        let phi = Functor::new(c.clone(), d.clone(), Vec::new(), Vec::new());
        let inv = Functor::new(d.clone(), c.clone(), Vec::new(), Vec::new());
        let unit = TwoCell::identity(&Functor::identity(d));
        let counit = TwoCell::identity(&Functor::identity(c));
        return Some(EquivalenceData { phi, inv, unit, counit });
    }
    let forward = enumerate_functors(c, d, limit);
    let backward = enumerate_functors(d, c, limit);
    for phi in &forward {
        for inv in &backward {
            let units = enumerate_natural_isos(&Functor::identity(d), &inv.then(phi), limit);
            if units.is_empty() {
                continue;
            }
            let counits = enumerate_natural_isos(&phi.then(inv), &Functor::identity(c), limit);
            for unit in &units {
                for counit in &counits {
                    let e = EquivalenceData {
                        phi: phi.clone(),
                        inv: inv.clone(),
                        unit: unit.clone(),
                        counit: counit.clone(),
                    };
                    if e.check().is_empty() {
                        return Some(e);
                    }
                }
            }
        }
    }
    None
}

pub fn are_equivalent(c: &Arc<FinCat>, d: &Arc<FinCat>) -> bool {
    find_equivalence(c, d, ENUM_LIMIT).is_some()
}

/// `F = iso ∘ j` with `j` an equivalence injective on objects.
#[derive(Debug, Clone)]
pub struct Factorization {
    /// `C → C′`, part of `equiv`.
    pub j: Functor,
    /// The isofibration `C′ → D`.
    pub iso: Functor,
    pub equiv: EquivalenceData,
}

/// Factors `F: C → D` through the category of triples `(c, d, h: F(c) ≅ d)`.
/// An arrow `(c, d, h) → (c′, d′, h′)` is an arrow `a: c → c′`; it lies over
/// `h′ ∘ F(a) ∘ h⁻¹`.
pub fn factor_equiv_isofib(f: &Functor) -> Factorization {
    let (c, d) = (&f.src, &f.tgt);
    let mut objects = Vec::new();
    let mut triples = Vec::new();
    let mut canonical = vec![0; c.n_objects()];
    for x in 0..c.n_objects() {
        let fx = f.obj[x];
        for y in 0..d.n_objects() {
            for &h in d.hom(fx, y) {
                if !d.is_iso(h) {
                    continue;
                }
                if h == d.id(fx) {
                    canonical[x] = triples.len();
                }
                objects.push(format!("({},{})", c.objects[x], d.arrows[h].name));
                triples.push((x, y, h));
            }
        }
    }
    let mut arrows = Vec::new();
    let mut data = Vec::new();
    let mut index = HashMap::new();
    for (s, &(x, _, _)) in triples.iter().enumerate() {
        for (t, &(x2, _, _)) in triples.iter().enumerate() {
            for &a in c.hom(x, x2) {
                index.insert((s, t, a), arrows.len());
                arrows.push(Arrow {
                    name: format!("{}:{}>{}", c.arrows[a].name, objects[s], objects[t]),
                    src: s,
                    tgt: t,
                });
                data.push(a);
            }
        }
    }
    let ids: Vec<usize> = (0..triples.len()).map(|s| index[&(s, s, c.id(triples[s].0))]).collect();
    let cp = Arc::new(FinCat::from_fn(objects, arrows.clone(), ids, |g, k| {
        let h = c.compose(data[g], data[k])?;
        index.get(&(arrows[k].src, arrows[g].tgt, h)).copied()
    }));

    let over = |s: usize, t: usize, a: usize| {
        let (_, _, h1) = triples[s];
        let (_, _, h2) = triples[t];
        d.comp(h2, d.comp(f.arr[a], d.inverse(h1).unwrap()))
    };
    let iso = Functor::new(
        cp.clone(),
        d.clone(),
        triples.iter().map(|t| t.1).collect(),
        cp.arrows.iter().enumerate().map(|(i, ar)| over(ar.src, ar.tgt, data[i])).collect(),
    );
    let j = Functor::new(
        c.clone(),
        cp.clone(),
        canonical.clone(),
        (0..c.n_arrows()).map(|a| index[&(canonical[c.src(a)], canonical[c.tgt(a)], a)]).collect(),
    );
    let inv = Functor::new(cp.clone(), c.clone(), triples.iter().map(|t| t.0).collect(), data.clone());
    // (c, d, h) → (c, F(c), id) over h⁻¹
    let unit = TwoCell {
        from: Functor::identity(&cp),
        to: inv.then(&j),
        comps: (0..triples.len()).map(|s| index[&(s, canonical[triples[s].0], c.id(triples[s].0))]).collect(),
    };
    let counit = TwoCell::identity(&Functor::identity(c));
    Factorization { j: j.clone(), iso, equiv: EquivalenceData { phi: j, inv, unit, counit } }
}

/// A finite product of categories with its projections.
#[derive(Debug, Clone)]
pub struct HoProduct {
    pub cat: Arc<FinCat>,
    pub projections: Vec<Functor>,
    factors: Vec<Arc<FinCat>>,
}

fn digits(mut i: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for k in (0..radices.len()).rev() {
        out[k] = i % radices[k];
        i /= radices[k];
    }
    out
}

fn number(ds: &[usize], radices: &[usize]) -> usize {
    ds.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

/// The componentwise product; the empty product is the terminal category.
pub fn homotopy_product(cs: &[Arc<FinCat>]) -> HoProduct {
    let orad: Vec<usize> = cs.iter().map(|c| c.n_objects()).collect();
    let arad: Vec<usize> = cs.iter().map(|c| c.n_arrows()).collect();
    let n_obj: usize = orad.iter().product();
    let n_arr: usize = arad.iter().product();
    let objects: Vec<String> = (0..n_obj)
        .map(|o| {
            if cs.is_empty() {
                return "*".to_string();
            }
            let names: Vec<&str> = digits(o, &orad).iter().zip(cs).map(|(&x, c)| c.objects[x].as_str()).collect();
            format!("({})", names.join(","))
        })
        .collect();
    let arrows: Vec<Arrow> = (0..n_arr)
        .map(|a| {
            let ds = digits(a, &arad);
            let src: Vec<usize> = ds.iter().zip(cs).map(|(&f, c)| c.src(f)).collect();
            let tgt: Vec<usize> = ds.iter().zip(cs).map(|(&f, c)| c.tgt(f)).collect();
            let name = if cs.is_empty() {
                "id_*".to_string()
            } else {
                let names: Vec<&str> = ds.iter().zip(cs).map(|(&f, c)| c.arrows[f].name.as_str()).collect();
                format!("({})", names.join(","))
            };
            Arrow { name, src: number(&src, &orad), tgt: number(&tgt, &orad) }
        })
        .collect();
    let ids = (0..n_obj)
        .map(|o| {
            let ds: Vec<usize> = digits(o, &orad).iter().zip(cs).map(|(&x, c)| c.id(x)).collect();
            number(&ds, &arad)
        })
        .collect();
    let cat = Arc::new(FinCat::from_fn(objects, arrows, ids, |g, f| {
        let (gs, fs) = (digits(g, &arad), digits(f, &arad));
        let hs = gs.iter().zip(&fs).zip(cs).map(|((&g, &f), c)| c.compose(g, f)).collect::<Option<Vec<_>>>()?;
        Some(number(&hs, &arad))
    }));
    let projections = cs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Functor::new(
                cat.clone(),
                c.clone(),
                (0..n_obj).map(|o| digits(o, &orad)[i]).collect(),
                (0..n_arr).map(|a| digits(a, &arad)[i]).collect(),
            )
        })
        .collect();
    HoProduct { cat, projections, factors: cs.to_vec() }
}

impl HoProduct {
    /// The functor into the product with the given components.
    pub fn pair(&self, legs: &[Functor]) -> Result<Functor, TwoCatError> {
        if legs.len() != self.factors.len() {
            return Err(TwoCatError::Invalid("wrong number of legs".into()));
        }
        let d = match legs.first() {
            Some(l) => l.src.clone(),
            None => return Err(TwoCatError::Invalid("pairing into the empty product needs a source".into())),
        };
        let orad: Vec<usize> = self.factors.iter().map(|c| c.n_objects()).collect();
        let arad: Vec<usize> = self.factors.iter().map(|c| c.n_arrows()).collect();
        let obj =
            (0..d.n_objects()).map(|x| number(&legs.iter().map(|l| l.obj[x]).collect::<Vec<_>>(), &orad)).collect();
        let arr =
            (0..d.n_arrows()).map(|a| number(&legs.iter().map(|l| l.arr[a]).collect::<Vec<_>>(), &arad)).collect();
        Ok(Functor::new(d, self.cat.clone(), obj, arr))
    }

    /// The 2-cell `f ⇒ g` whose i-th projection is `etas[i]`.
    pub fn pair_cells(&self, f: &Functor, g: &Functor, etas: &[TwoCell]) -> Result<TwoCell, TwoCatError> {
        if etas.len() != self.factors.len() {
            return Err(TwoCatError::Invalid("wrong number of 2-cells".into()));
        }
        for (i, (e, p)) in etas.iter().zip(&self.projections).enumerate() {
            check_cell(&format!("eta_{i}"), e)?;
            if e.from != f.then(p) || e.to != g.then(p) {
                return Err(TwoCatError::Invalid(format!("eta_{i} has the wrong boundary")));
            }
        }
        let arad: Vec<usize> = self.factors.iter().map(|c| c.n_arrows()).collect();
        let comps = (0..f.src.n_objects())
            .map(|x| number(&etas.iter().map(|e| e.comps[x]).collect::<Vec<_>>(), &arad))
            .collect();
        let t = TwoCell { from: f.clone(), to: g.clone(), comps };
        check_cell("paired cell", &t)?;
        Ok(t)
    }

    /// Number of natural isos `f ⇒ g` projecting to `etas`.
    pub fn count_cells_over(&self, f: &Functor, g: &Functor, etas: &[TwoCell]) -> usize {
        enumerate_natural_isos(f, g, ENUM_LIMIT)
            .iter()
            .filter(|t| etas.iter().zip(&self.projections).all(|(e, p)| t.whisker_right(p).comps == e.comps))
            .count()
    }
}

/// The homotopy pullback of `f: B → A ← C: gstar`, built as the strict
/// pullback of `f` along the isofibration part of `gstar`.
#[derive(Debug, Clone)]
pub struct HoPullbackResult {
    pub f: Functor,
    pub gstar: Functor,
    pub factor: Factorization,
    pub pullback: Pullback,
    /// `C* → B`.
    pub gprime: Functor,
    /// `C* → C′`.
    pub fprime: Functor,
    /// `C* → C`, equal to `inv ∘ fprime`.
    pub fstar: Functor,
    /// `f∘gprime ⇒ gstar∘fstar`.
    pub eta: TwoCell,
    obj_index: HashMap<(usize, usize), usize>,
    arr_index: HashMap<(usize, usize), usize>,
}

impl HoPullbackResult {
    pub fn apex(&self) -> &Arc<FinCat> {
        &self.pullback.cat
    }

    /// Limit cones of sampled diagrams in the apex that both projections
    /// send to limit cones while the apex cone is not one.
    pub fn reflection_failures(&self, samples: usize) -> Vec<(Diagram, usize, Vec<usize>)> {
        let mut out = Vec::new();
        let mut seen = Vec::new();
        for (d, _, _) in sample_limits(self.apex(), samples) {
            if seen.contains(&d) {
                continue;
            }
            for (apex, legs) in reflection_failures(&self.pullback, &d) {
                out.push((d.clone(), apex, legs));
            }
            seen.push(d);
        }
        out
    }

    fn pair_object(&self, b: usize, c: usize) -> Result<usize, TwoCatError> {
        self.obj_index.get(&(b, c)).copied().ok_or_else(|| {
            TwoCatError::NotInPullback(format!("({}, {})", self.f.src.objects[b], self.factor.iso.src.objects[c]))
        })
    }

    fn pair_arrow(&self, b: usize, c: usize) -> Result<usize, TwoCatError> {
        self.arr_index.get(&(b, c)).copied().ok_or_else(|| {
            TwoCatError::NotInPullback(format!(
                "({}, {})",
                self.f.src.arrows[b].name, self.factor.iso.src.arrows[c].name
            ))
        })
    }

    /// Lifts the components of `nu: f h1 ⇒ gstar h2` to isos
    /// `mu_d: c′_d → j h2(d)` over `nu_d`.
    fn lift(&self, h2: &Functor, nu: &TwoCell) -> Result<Vec<usize>, TwoCatError> {
        let (cp, a) = (&self.factor.iso.src, &self.f.tgt);
        let g = &self.factor.iso;
        let phi = &self.factor.j;
        (0..nu.comps.len())
            .map(|x| {
                let back = a.inverse(nu.comps[x]).unwrap();
                let start = phi.obj[h2.obj[x]];
                (0..cp.n_objects())
                    .flat_map(|z| cp.hom(start, z).iter().copied())
                    .find(|&k| cp.is_iso(k) && g.arr[k] == back)
                    .map(|k| cp.inverse(k).unwrap())
                    .ok_or_else(|| TwoCatError::LiftFailure(a.arrows[nu.comps[x]].name.clone()))
            })
            .collect()
    }
}

pub fn homotopy_pullback(f: &Functor, gstar: &Functor) -> Result<HoPullbackResult, TwoCatError> {
    check_functor("f", f)?;
    check_functor("g*", gstar)?;
    if f.tgt != gstar.tgt {
        return Err(TwoCatError::Invalid("legs have different targets".into()));
    }
    let factor = factor_equiv_isofib(gstar);
    let pullback = pullback_category(f, &factor.iso)?;
    let gprime = pullback.p1.clone();
    let fprime = pullback.p2.clone();
    let fstar = fprime.then(&factor.equiv.inv);
    let g = &factor.iso;
    let eta = TwoCell {
        from: gprime.then(f),
        to: fstar.then(gstar),
        comps: fprime.obj.iter().map(|&y| g.arr[factor.equiv.unit.comps[y]]).collect(),
    };
    let obj_index = (0..pullback.cat.n_objects()).map(|o| ((gprime.obj[o], fprime.obj[o]), o)).collect();
    let arr_index = (0..pullback.cat.n_arrows()).map(|a| ((gprime.arr[a], fprime.arr[a]), a)).collect();
    Ok(HoPullbackResult {
        f: f.clone(),
        gstar: gstar.clone(),
        factor,
        pullback,
        gprime,
        fprime,
        fstar,
        eta,
        obj_index,
        arr_index,
    })
}

/// A mediating functor `r: D → C*` with `alpha1: gprime∘r ⇒ h1` and
/// `alpha2: fstar∘r ⇒ h2`.
#[derive(Debug, Clone)]
pub struct ConeSolution {
    pub r: Functor,
    pub alpha1: TwoCell,
    pub alpha2: TwoCell,
}

fn check_cone(res: &HoPullbackResult, h1: &Functor, h2: &Functor, nu: &TwoCell) -> Result<(), TwoCatError> {
    check_functor("h1", h1)?;
    check_functor("h2", h2)?;
    check_cell("nu", nu)?;
    if nu.from != h1.then(&res.f) || nu.to != h2.then(&res.gstar) {
        return Err(TwoCatError::Invalid("nu has the wrong boundary".into()));
    }
    Ok(())
}

pub fn mediate_into_hopullback(
    res: &HoPullbackResult,
    h1: &Functor,
    h2: &Functor,
    nu: &TwoCell,
) -> Result<ConeSolution, TwoCatError> {
    check_cone(res, h1, h2, nu)?;
    let d = &h1.src;
    let cp = &res.factor.iso.src;
    let c = &res.gstar.src;
    let phi = &res.factor.j;
    let mu = res.lift(h2, nu)?;
    let h_obj: Vec<usize> = mu.iter().map(|&m| cp.src(m)).collect();
    let h_arr: Vec<usize> = d
        .arrows
        .iter()
        .enumerate()
        .map(|(i, a)| cp.comp(cp.inverse(mu[a.tgt]).unwrap(), cp.comp(phi.arr[h2.arr[i]], mu[a.src])))
        .collect();
    let obj = (0..d.n_objects()).map(|x| res.pair_object(h1.obj[x], h_obj[x])).collect::<Result<Vec<_>, _>>()?;
    let arr = (0..d.n_arrows()).map(|a| res.pair_arrow(h1.arr[a], h_arr[a])).collect::<Result<Vec<_>, _>>()?;
    let r = Functor::new(d.clone(), res.apex().clone(), obj, arr);
    let alpha1 = TwoCell::identity(h1);
    let inv = &res.factor.equiv.inv;
    let counit = &res.factor.equiv.counit;
    let alpha2 = TwoCell {
        from: r.then(&res.fstar),
        to: h2.clone(),
        comps: (0..d.n_objects()).map(|x| c.comp(counit.comps[h2.obj[x]], inv.arr[mu[x]])).collect(),
    };
    let sol = ConeSolution { r, alpha1, alpha2 };
    let errs = check_cone_solution(res, h1, h2, nu, &sol);
    if !errs.is_empty() {
        return Err(TwoCatError::Compatibility(errs.join("; ")));
    }
    Ok(sol)
}

/// Empty iff `r` is a functor, both alphas are valid isos with the right
/// boundaries, and `gstar(alpha2) ∘ eta_r ∘ f(alpha1⁻¹) = nu` componentwise.
pub fn check_cone_solution(
    res: &HoPullbackResult,
    h1: &Functor,
    h2: &Functor,
    nu: &TwoCell,
    s: &ConeSolution,
) -> Vec<String> {
    let mut out = validate_functor(&s.r);
    out.extend(validate_two_cell(&s.alpha1).into_iter().map(|e| format!("alpha1: {e}")));
    out.extend(validate_two_cell(&s.alpha2).into_iter().map(|e| format!("alpha2: {e}")));
    if !out.is_empty() {
        return out;
    }
    if s.alpha1.from != s.r.then(&res.gprime) || &s.alpha1.to != h1 {
        out.push("alpha1 has the wrong boundary".into());
    }
    if s.alpha2.from != s.r.then(&res.fstar) || &s.alpha2.to != h2 {
        out.push("alpha2 has the wrong boundary".into());
    }
    if !out.is_empty() {
        return out;
    }
    let a = &res.f.tgt;
    for x in 0..s.r.src.n_objects() {
        let back = res.f.arr[s.src_inverse(x)];
        let pasted = a.comp(res.gstar.arr[s.alpha2.comps[x]], a.comp(res.eta.comps[s.r.obj[x]], back));
        if pasted != nu.comps[x] {
            out.push(format!("pasting differs from nu at {}", s.r.src.objects[x]));
        }
    }
    out
}

impl ConeSolution {
    fn src_inverse(&self, x: usize) -> usize {
        self.alpha1.from.tgt.inverse(self.alpha1.comps[x]).unwrap()
    }
}

/// The connecting iso between two solutions of the same cone.
#[derive(Debug, Clone)]
pub struct Connection {
    pub cell: TwoCell,
    /// Compatible natural isos `r1 ⇒ r2` found by enumeration.
    pub candidates: usize,
}

/// Builds the iso `r1 ⇒ r2` from its `B` and `C′` parts and confirms by
/// enumeration that it is the only compatible one.
pub fn uniqueness_check(
    res: &HoPullbackResult,
    h1: &Functor,
    h2: &Functor,
    nu: &TwoCell,
    s1: &ConeSolution,
    s2: &ConeSolution,
) -> Result<Connection, TwoCatError> {
    check_cone(res, h1, h2, nu)?;
    for (i, s) in [s1, s2].into_iter().enumerate() {
        let errs = check_cone_solution(res, h1, h2, nu, s);
        if !errs.is_empty() {
            return Err(TwoCatError::Invalid(format!("solution {}: {}", i + 1, errs.join("; "))));
        }
    }
    let (b, cp, a) = (&res.f.src, &res.factor.iso.src, &res.f.tgt);
    let phi = &res.factor.j;
    let unit = &res.factor.equiv.unit;
    let mu = res.lift(h2, nu)?;
    let n = h1.src.n_objects();
    // α_i : f′r_i ⇒ h, through φ(α′_i) and μ⁻¹
    let to_h = |s: &ConeSolution, x: usize| {
        let start = unit.comps[res.fprime.obj[s.r.obj[x]]];
        cp.comp(cp.inverse(mu[x]).unwrap(), cp.comp(phi.arr[s.alpha2.comps[x]], start))
    };
    let mut comps = Vec::with_capacity(n);
    for x in 0..n {
        let alpha = cp.comp(cp.inverse(to_h(s2, x)).unwrap(), to_h(s1, x));
        let beta = b.comp(b.inverse(s2.alpha1.comps[x]).unwrap(), s1.alpha1.comps[x]);
        if res.f.arr[beta] != res.factor.iso.arr[alpha] {
            return Err(TwoCatError::Compatibility(format!(
                "f(beta) = {} but g(alpha) = {} at {}",
                a.arrows[res.f.arr[beta]].name, a.arrows[res.factor.iso.arr[alpha]].name, h1.src.objects[x]
            )));
        }
        comps.push(res.pair_arrow(beta, alpha)?);
    }
    let cell = TwoCell { from: s1.r.clone(), to: s2.r.clone(), comps };
    check_cell("connecting cell", &cell)?;
    let compatible = |t: &TwoCell| {
        let c = &res.gstar.src;
        (0..n).all(|x| {
            b.comp(s2.alpha1.comps[x], res.gprime.arr[t.comps[x]]) == s1.alpha1.comps[x]
                && c.comp(s2.alpha2.comps[x], res.fstar.arr[t.comps[x]]) == s1.alpha2.comps[x]
        })
    };
    if !compatible(&cell) {
        return Err(TwoCatError::Compatibility("constructed cell does not fit the solutions".into()));
    }
    let all: Vec<TwoCell> = enumerate_natural_isos(&s1.r, &s2.r, ENUM_LIMIT).into_iter().filter(compatible).collect();
    if all.len() != 1 || all[0] != cell {
        return Err(TwoCatError::NotUnique(all.len()));
    }
    Ok(Connection { cell, candidates: all.len() })
}

/// A cone `e: V → W`, `e′: V → W′` over parallel functors `f_i: W → W′`
/// related by natural isos, with `etas[i]: e′ ⇒ f_i∘e`.
#[derive(Debug, Clone)]
pub struct EqualizerCone {
    pub e: Functor,
    pub eprime: Functor,
    pub family: Vec<Functor>,
    /// `(i, j, θ: f_i ⇒ f_j)`.
    pub cells: Vec<(usize, usize, TwoCell)>,
    pub etas: Vec<TwoCell>,
}

impl EqualizerCone {
    /// Validity of the data and `θe ∘ η_i = η_j` for every diagram cell.
    pub fn check(&self) -> Vec<String> {
        let mut out = validate_functor(&self.e);
        out.extend(validate_functor(&self.eprime));
        for f in &self.family {
            out.extend(validate_functor(f));
        }
        for (i, eta) in self.etas.iter().enumerate() {
            out.extend(validate_two_cell(eta).into_iter().map(|m| format!("eta_{i}: {m}")));
        }
        for (_, _, t) in &self.cells {
            out.extend(validate_two_cell(t));
        }
        if !out.is_empty() {
            return out;
        }
        if self.etas.len() != self.family.len() {
            return vec!["one eta per parallel functor is needed".into()];
        }
        for (i, (eta, f)) in self.etas.iter().zip(&self.family).enumerate() {
            if eta.from != self.eprime || eta.to != self.e.then(f) {
                out.push(format!("eta_{i} has the wrong boundary"));
            }
        }
        let w2 = &self.eprime.tgt;
        for (i, j, t) in &self.cells {
            if t.from != self.family[*i] || t.to != self.family[*j] {
                out.push(format!("cell {i}=>{j} has the wrong boundary"));
                continue;
            }
            let te = t.whisker_left(&self.e);
            let ok = (0..self.e.src.n_objects())
                .all(|x| w2.comp(te.comps[x], self.etas[*i].comps[x]) == self.etas[*j].comps[x]);
            if !ok {
                out.push(format!("cell {i}=>{j} is not compatible with the etas"));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub gamma: TwoCell,
    /// `β_i: e′g ⇒ e′h` built from `η_i`, `f_i α` and `η_i⁻¹`.
    pub betas: Vec<TwoCell>,
    /// Whether `e′γ = β_i` for every i.
    pub betas_redundant: bool,
}

/// The unique `γ: g ⇒ h` with `eγ = α`.
pub fn equalizer_split(cone: &EqualizerCone, g: &Functor, h: &Functor, alpha: &TwoCell) -> Result<Split, TwoCatError> {
    let errs = cone.check();
    if !errs.is_empty() {
        return Err(TwoCatError::Invalid(errs.join("; ")));
    }
    check_functor("g", g)?;
    check_functor("h", h)?;
    check_cell("alpha", alpha)?;
    if alpha.from != g.then(&cone.e) || alpha.to != h.then(&cone.e) {
        return Err(TwoCatError::Invalid("alpha has the wrong boundary".into()));
    }
    let gammas: Vec<TwoCell> = enumerate_natural_isos(g, h, ENUM_LIMIT)
        .into_iter()
        .filter(|t| t.whisker_right(&cone.e).comps == alpha.comps)
        .collect();
    let gamma = match gammas.len() {
        0 => return Err(TwoCatError::NoSplit),
        1 => gammas.into_iter().next().unwrap(),
        k => return Err(TwoCatError::NotUnique(k)),
    };
    let betas: Vec<TwoCell> = cone
        .etas
        .iter()
        .zip(&cone.family)
        .map(|(eta, f)| eta.whisker_left(g).then(&alpha.whisker_right(f)).then(&eta.inverse().unwrap().whisker_left(h)))
        .collect();
    let eg = gamma.whisker_right(&cone.eprime);
    let betas_redundant = betas.iter().all(|b| b.comps == eg.comps);
    Ok(Split { gamma, betas, betas_redundant })
}
