//! Closing a subcategory of finite sets under finite limits, images and
//! binary unions.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::category::Diagram;
use super::fragment::{finset_limit, image, is_concrete_limit, is_injective, FragmentBuilder, Func, SetFragment};
use super::functor::Functor;
use super::FinCatError;

#[derive(Debug, Clone, Copy)]
pub struct ClosureConfig {
    pub rounds: usize,
    /// Largest carrier a new set may have (free ambient only).
    pub max_carrier: usize,
    pub max_arrows: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { rounds: 8, max_carrier: 4, max_arrows: 4000 }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClosureRound {
    pub round: usize,
    pub objects: usize,
    pub arrows: usize,
    /// Instances already closed at the start of the round.
    pub found: usize,
    pub added: Vec<String>,
    /// Instances with no witness within the carrier cap or the ambient.
    pub unavailable: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub fragment: SetFragment,
    /// Object and arrow embedding into the ambient fragment, if any.
    pub embedding: Option<(Vec<usize>, Vec<usize>)>,
    pub log: Vec<ClosureRound>,
    /// The last round added nothing.
    pub fixed_point: bool,
}

impl Closure {
    /// Fixed point with every instance closed.
    pub fn complete(&self) -> bool {
        self.fixed_point && self.log.last().is_some_and(|r| r.unavailable.is_empty())
    }
}

enum Task {
    Limit(String, Diagram),
    Image(usize),
    Union(usize, usize),
}

struct State<'a> {
    b: FragmentBuilder,
    ambient: Option<&'a SetFragment>,
    emb: (Vec<usize>, Vec<usize>),
}

/// Closure inside finite sets: new sets have at most `max_carrier`
/// elements, and a construction reuses any present set of the right size.
pub fn coherent_closure(sub: &SetFragment, cfg: &ClosureConfig) -> Result<Closure, FinCatError> {
    let st = State { b: sub.builder(), ambient: None, emb: (Vec::new(), Vec::new()) };
    run(st, cfg)
}

/// Closure of the subcategory on `objects` and `arrows` inside `ambient`,
/// using only witnesses present there.
pub fn coherent_closure_in(
    ambient: &SetFragment,
    objects: &[usize],
    arrows: &[usize],
    cfg: &ClosureConfig,
) -> Result<Closure, FinCatError> {
    let mut st = State { b: FragmentBuilder::new(), ambient: Some(ambient), emb: (Vec::new(), Vec::new()) };
    for &o in objects {
        st.import_object(o);
    }
    for &a in arrows {
        st.import_arrow(a);
    }
    st.close(cfg.max_arrows)?;
    run(st, cfg)
}

impl State<'_> {
    fn import_object(&mut self, o: usize) -> usize {
        let e = self.ambient.unwrap();
        if let Some(k) = self.emb.0.iter().position(|&x| x == o) {
            return k;
        }
        let k = self.b.object_labelled(&e.cat.objects[o], e.carriers[o].clone());
        self.emb.0.push(o);
        self.emb.1.push(e.cat.id(o));
        k
    }

    fn import_arrow(&mut self, a: usize) -> usize {
        let e = self.ambient.unwrap();
        let s = self.import_object(e.cat.src(a));
        let t = self.import_object(e.cat.tgt(a));
        let before = self.b.arrows.len();
        let k = self.b.arrow(&e.cat.arrows[a].name, s, t, e.funcs[a].clone());
        if self.b.arrows.len() > before {
            self.emb.1.push(a);
        }
        k
    }

    fn close(&mut self, max_arrows: usize) -> Result<(), FinCatError> {
        self.b.close(max_arrows)?;
        if let Some(e) = self.ambient {
            for k in self.emb.1.len()..self.b.arrows.len() {
                let (_, s, t, f) = &self.b.arrows[k];
                let a = e
                    .find_arrow(self.emb.0[*s], self.emb.0[*t], f)
                    .ok_or_else(|| FinCatError::Shape("ambient is not closed under composition".into()))?;
                self.emb.1.push(a);
            }
        }
        Ok(())
    }

    /// A present object of size `n`, or a new one.
    fn set_of_size(&mut self, n: usize) -> usize {
        match (0..self.b.objects.len()).find(|&o| self.b.size(o) == n) {
            Some(o) => o,
            None => self.b.object(&n.to_string(), n),
        }
    }

    /// Adds a construction for the task; false if none is available.
    fn construct(&mut self, s: &SetFragment, task: &Task, cfg: &ClosureConfig) -> bool {
        match (self.ambient, task) {
            (None, Task::Limit(name, d)) => {
                let lim = finset_limit(s, d);
                if lim.tuples.len() > cfg.max_carrier {
                    return false;
                }
                let apex = self.set_of_size(lim.tuples.len());
                for (v, p) in lim.projections.into_iter().enumerate() {
                    self.b.arrow(&format!("{name}.p{v}"), apex, d.vertices[v], p);
                }
                true
            }
            (None, Task::Image(f)) => {
                let img: Vec<usize> = image(&s.funcs[*f]).into_iter().collect();
                let o = self.set_of_size(img.len());
                let e: Func = s.funcs[*f].iter().map(|y| img.binary_search(y).unwrap()).collect();
                let name = &s.cat.arrows[*f].name;
                self.b.arrow(&format!("e({name})"), s.cat.src(*f), o, e);
                self.b.arrow(&format!("m({name})"), o, s.cat.tgt(*f), img);
                true
            }
            (None, Task::Union(m1, m2)) => {
                let u: Vec<usize> = image(&s.funcs[*m1]).union(&image(&s.funcs[*m2])).copied().collect();
                let o = self.set_of_size(u.len());
                let (n1, n2) = (&s.cat.arrows[*m1].name, &s.cat.arrows[*m2].name);
                for (m, n) in [(*m1, n1), (*m2, n2)] {
                    let k: Func = s.funcs[m].iter().map(|y| u.binary_search(y).unwrap()).collect();
                    self.b.arrow(&format!("k({n},{n1}∪{n2})"), s.cat.src(m), o, k);
                }
                self.b.arrow(&format!("{n1}∪{n2}"), o, s.cat.tgt(*m1), u);
                true
            }
            (Some(e), task) => {
                let Some(arrows) = witness(e, &self.lift(task), None) else { return false };
                for a in arrows {
                    self.import_arrow(a);
                }
                true
            }
        }
    }

    /// The task in ambient indices.
    fn lift(&self, task: &Task) -> Task {
        match task {
            Task::Limit(n, d) => Task::Limit(
                n.clone(),
                Diagram {
                    vertices: d.vertices.iter().map(|&v| self.emb.0[v]).collect(),
                    edges: d.edges.iter().map(|&(a, s, t)| (self.emb.1[a], s, t)).collect(),
                },
            ),
            Task::Image(f) => Task::Image(self.emb.1[*f]),
            Task::Union(a, b) => Task::Union(self.emb.1[*a], self.emb.1[*b]),
        }
    }
}

/// Arrows of `s` witnessing that the task is already closed; `size_hint`
/// short-cuts the limit size.
fn witness(s: &SetFragment, task: &Task, size_hint: Option<usize>) -> Option<Vec<usize>> {
    let c = &s.cat;
    match task {
        Task::Limit(_, d) => {
            let n = size_hint.unwrap_or_else(|| finset_limit(s, d).tuples.len());
            for x in (0..c.n_objects()).filter(|&x| s.size(x) == n) {
                let mut found = None;
                c.for_each_cone(d, x, &mut |legs| {
                    let fs: Vec<&[usize]> = legs.iter().map(|&l| s.funcs[l].as_slice()).collect();
                    if is_concrete_limit(s, d, n, &fs) {
                        found = Some(legs.to_vec());
                    }
                    found.is_none()
                });
                if let Some(legs) = found {
                    return Some(legs.into_iter().chain([c.id(x)]).collect());
                }
            }
            None
        }
        Task::Image(f) => {
            let (a, b) = (c.src(*f), c.tgt(*f));
            let img = image(&s.funcs[*f]);
            (0..c.n_arrows())
                .filter(|&m| c.tgt(m) == b && is_injective(&s.funcs[m]) && image(&s.funcs[m]) == img)
                .find_map(|m| c.hom(a, c.src(m)).iter().find(|&&e| c.compose(m, e) == Some(*f)).map(|&e| vec![e, m]))
        }
        Task::Union(m1, m2) => {
            let x = c.tgt(*m1);
            let u: BTreeSet<usize> = image(&s.funcs[*m1]).union(&image(&s.funcs[*m2])).copied().collect();
            (0..c.n_arrows())
                .filter(|&g| c.tgt(g) == x && is_injective(&s.funcs[g]) && image(&s.funcs[g]) == u)
                .find_map(|g| {
                    let k = |m: usize| c.hom(c.src(m), c.src(g)).iter().copied().find(|&k| c.compose(g, k) == Some(m));
                    Some(vec![k(*m1)?, k(*m2)?, g])
                })
        }
    }
}

fn describe(s: &SetFragment, t: &Task) -> String {
    let an = |a: usize| s.cat.arrows[a].name.clone();
    match t {
        Task::Limit(n, _) => n.clone(),
        Task::Image(f) => format!("im({})", an(*f)),
        Task::Union(a, b) => format!("{}∪{}", an(*a), an(*b)),
    }
}

/// The diagrams of size at most three examined in a round.
fn tasks(s: &SetFragment) -> Vec<Task> {
    let c = &s.cat;
    let on = |o: usize| c.objects[o].clone();
    let an = |a: usize| c.arrows[a].name.clone();
    let mut out = vec![Task::Limit("1".into(), Diagram::default())];
    let n = c.n_objects();
    for a in 0..n {
        for b in a..n {
            out.push(Task::Limit(format!("{}×{}", on(a), on(b)), Diagram { vertices: vec![a, b], edges: Vec::new() }));
        }
    }
    let proper: Vec<usize> = (0..c.n_arrows()).filter(|&f| !c.is_identity(f)).collect();
    for (i, &f) in proper.iter().enumerate() {
        for &g in &proper[i + 1..] {
            if c.src(f) == c.src(g) && c.tgt(f) == c.tgt(g) {
                out.push(Task::Limit(
                    format!("eq({},{})", an(f), an(g)),
                    Diagram { vertices: vec![c.src(f), c.tgt(f)], edges: vec![(f, 0, 1), (g, 0, 1)] },
                ));
            }
        }
    }
    for (i, &f) in proper.iter().enumerate() {
        for &g in &proper[i..] {
            if c.tgt(f) == c.tgt(g) {
                out.push(Task::Limit(
                    format!("{}×{}", an(f), an(g)),
                    Diagram { vertices: vec![c.src(f), c.src(g), c.tgt(f)], edges: vec![(f, 0, 2), (g, 1, 2)] },
                ));
            }
        }
    }
    for &f in &proper {
        out.push(Task::Image(f));
    }
    let monos: Vec<usize> = (0..c.n_arrows()).filter(|&m| is_injective(&s.funcs[m])).collect();
    for (i, &m1) in monos.iter().enumerate() {
        for &m2 in &monos[i + 1..] {
            if c.tgt(m1) == c.tgt(m2) {
                out.push(Task::Union(m1, m2));
            }
        }
    }
    out
}

fn run(mut st: State, cfg: &ClosureConfig) -> Result<Closure, FinCatError> {
    let mut log = Vec::new();
    let mut fixed_point = false;
    for round in 1..=cfg.rounds {
        let s = st.b.build()?;
        let mut r = ClosureRound { round, ..Default::default() };
        let before = (st.b.objects.len(), st.b.arrows.len());
        for t in tasks(&s) {
            if witness(&s, &t, None).is_some() {
                r.found += 1;
                continue;
            }
            let d = describe(&s, &t);
            if st.construct(&s, &t, cfg) {
                r.added.push(d);
            } else {
                r.unavailable.push(d);
            }
        }
        st.close(cfg.max_arrows)?;
        r.objects = st.b.objects.len();
        r.arrows = st.b.arrows.len();
        let grew = (r.objects, r.arrows) != before;
        log.push(r);
        if !grew {
            fixed_point = true;
            break;
        }
    }
    let fragment = st.b.build()?;
    let embedding = st.ambient.map(|_| st.emb);
    Ok(Closure { fragment, embedding, log, fixed_point })
}

/// A cocone `fᵢ: Dᵢ → C` factored as `g ∘ f̃ᵢ` through the closure of the
/// joint image.
#[derive(Debug, Clone)]
pub struct FactoredCocone {
    pub closure: Closure,
    pub g: Functor,
    pub factors: Vec<Functor>,
}

pub fn factor_cocone_through_closure(
    ambient: &SetFragment,
    legs: &[Functor],
    cfg: &ClosureConfig,
) -> Result<FactoredCocone, FinCatError> {
    if legs.iter().any(|f| *f.tgt != ambient.cat) {
        return Err(FinCatError::Shape("cocone leg does not land in the ambient fragment".into()));
    }
    let objects: BTreeSet<usize> = legs.iter().flat_map(|f| f.obj.iter().copied()).collect();
    let arrows: BTreeSet<usize> = legs.iter().flat_map(|f| f.arr.iter().copied()).collect();
    let objects: Vec<usize> = objects.into_iter().collect();
    let arrows: Vec<usize> = arrows.into_iter().collect();
    let closure = coherent_closure_in(ambient, &objects, &arrows, cfg)?;
    let (eo, ea) = closure.embedding.clone().unwrap();
    let cl = Arc::new(closure.fragment.cat.clone());
    let tgt = legs.first().map_or_else(|| Arc::new(ambient.cat.clone()), |f| f.tgt.clone());
    let g = Functor::new(cl.clone(), tgt, eo.clone(), ea.clone());
    let factors = legs
        .iter()
        .map(|f| {
            let obj = f.obj.iter().map(|o| eo.iter().position(|x| x == o).unwrap()).collect();
            let arr = f.arr.iter().map(|a| ea.iter().position(|x| x == a).unwrap()).collect();
            Functor::new(f.src.clone(), cl.clone(), obj, arr)
        })
        .collect();
    Ok(FactoredCocone { closure, g, factors })
}

/// The full subcategory of finite sets on the given carrier sizes, with
/// every function between them.
pub fn full_finset(sizes: &[usize], max_arrows: usize) -> Result<SetFragment, FinCatError> {
    let mut b = FragmentBuilder::new();
    for (i, &n) in sizes.iter().enumerate() {
        b.object(&format!("S{i}"), n);
    }
    for (i, &n) in sizes.iter().enumerate() {
        for (j, &m) in sizes.iter().enumerate() {
            for f in crate::semantics::tuples(&vec![m; n]) {
                if b.arrows.len() >= max_arrows {
                    return Err(FinCatError::Budget(format!("more than {max_arrows} arrows")));
                }
                let name = format!("f{i}_{j}_{}", f.iter().map(|x| x.to_string()).collect::<String>());
                b.arrow(&name, i, j, f);
            }
        }
    }
    b.finish(max_arrows)
}
