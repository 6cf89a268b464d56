//! Filtered colimits of finite diagrams of categories, and truncated
//! ω-chains.

use std::collections::HashMap;
use std::sync::Arc;

use super::category::{Arrow, Diagram, FinCat, Marker};
use super::fragment::{quotient, Func};
use super::functor::{validate_functor, Functor};
use super::pullback::map_diagram;
use super::FinCatError;

/// A diagram of categories indexed by a finite category: one stage per
/// index object, one functor per index arrow.
#[derive(Debug, Clone)]
pub struct CatDiagram {
    pub index: Arc<FinCat>,
    pub stages: Vec<Arc<FinCat>>,
    pub maps: Vec<Functor>,
}

impl CatDiagram {
    /// The chain `stages[0] → stages[1] → …` along `steps`, indexed by a
    /// finite total order.
    pub fn chain(stages: Vec<Arc<FinCat>>, steps: Vec<Functor>) -> CatDiagram {
        assert_eq!(steps.len() + 1, stages.len().max(1));
        let n = stages.len();
        let index = Arc::new(FinCat::total_order(n));
        let mut maps = vec![None; index.n_arrows()];
        for a in 0..index.n_arrows() {
            let (i, j) = (index.src(a), index.tgt(a));
            let mut f = Functor::identity(&stages[i]);
            for s in &steps[i..j] {
                f = f.then(s);
            }
            maps[a] = Some(f);
        }
        CatDiagram { index, stages, maps: maps.into_iter().map(Option::unwrap).collect() }
    }

    /// Diagnostics for functors that do not match the index.
    pub fn validate(&self) -> Vec<String> {
        let ix = &self.index;
        let mut out = Vec::new();
        if self.stages.len() != ix.n_objects() || self.maps.len() != ix.n_arrows() {
            return vec!["diagram does not match its index".into()];
        }
        for (a, f) in self.maps.iter().enumerate() {
            if f.src != self.stages[ix.src(a)] || f.tgt != self.stages[ix.tgt(a)] {
                out.push(format!("map {} has wrong endpoints", ix.arrows[a].name));
            }
            out.extend(validate_functor(f).into_iter().map(|e| format!("map {}: {e}", ix.arrows[a].name)));
        }
        for o in 0..ix.n_objects() {
            if self.maps[ix.id(o)].obj != (0..self.stages[o].n_objects()).collect::<Vec<_>>()
                || self.maps[ix.id(o)].arr != (0..self.stages[o].n_arrows()).collect::<Vec<_>>()
            {
                out.push(format!("map at identity of {} is not the identity", ix.objects[o]));
            }
        }
        for (g, f) in ix.composable_pairs() {
            let (gf, h) = (self.maps[f].then(&self.maps[g]), &self.maps[ix.comp(g, f)]);
            if gf.obj != h.obj || gf.arr != h.arr {
                out.push(format!("maps do not compose at {} ∘ {}", ix.arrows[g].name, ix.arrows[f].name));
            }
        }
        out
    }
}

/// Nonempty, any two objects have a common upper bound, and any parallel
/// pair is equalized by some arrow out of its target.
pub fn is_filtered(c: &FinCat) -> bool {
    let n = c.n_objects();
    if n == 0 {
        return false;
    }
    let bound = |i: usize, j: usize| (0..n).any(|k| !c.hom(i, k).is_empty() && !c.hom(j, k).is_empty());
    let pairs_ok = (0..n).all(|i| (0..n).all(|j| bound(i, j)));
    let forks_ok = (0..n).all(|i| {
        (0..n).all(|j| {
            let h = c.hom(i, j);
            h.iter().all(|&u| {
                h.iter().all(|&v| u == v || (0..c.n_arrows()).any(|w| c.src(w) == j && c.comp(w, u) == c.comp(w, v)))
            })
        })
    });
    pairs_ok && forks_ok
}

/// The colimit of a diagram of finite sets: the class of each element of
/// each stage.
pub fn set_colimit(index: &FinCat, sizes: &[usize], maps: &[Func]) -> (usize, Vec<Vec<usize>>) {
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let mut pairs = Vec::new();
    for (a, f) in maps.iter().enumerate() {
        let (i, j) = (index.src(a), index.tgt(a));
        for (x, &y) in f.iter().enumerate() {
            pairs.push((offsets[i] + x, offsets[j] + y));
        }
    }
    let q = quotient(total, pairs);
    let count = q.iter().max().map_or(0, |m| m + 1);
    let classes = (0..sizes.len()).map(|i| q[offsets[i]..offsets[i] + sizes[i]].to_vec()).collect();
    (count, classes)
}

#[derive(Debug, Clone)]
pub struct Colimit {
    pub cat: Arc<FinCat>,
    pub coprojections: Vec<Functor>,
}

/// The colimit of a filtered diagram of categories: objects and arrows
/// are classes of pairs `(x, i)`, glued along the transition functors.
pub fn chain_colimit(d: &CatDiagram) -> Result<Colimit, FinCatError> {
    let ix = &*d.index;
    if !is_filtered(ix) {
        return Err(FinCatError::NotFiltered);
    }
    let osizes: Vec<usize> = d.stages.iter().map(|s| s.n_objects()).collect();
    let asizes: Vec<usize> = d.stages.iter().map(|s| s.n_arrows()).collect();
    let (no, ocls) = set_colimit(ix, &osizes, &d.maps.iter().map(|f| f.obj.clone()).collect::<Vec<_>>());
    let (na, acls) = set_colimit(ix, &asizes, &d.maps.iter().map(|f| f.arr.clone()).collect::<Vec<_>>());

    // a representative (stage, element) for each class, first in canonical order
    let reps = |cls: &[Vec<usize>], n: usize| {
        let mut r = vec![(usize::MAX, 0); n];
        for (i, c) in cls.iter().enumerate() {
            for (x, &k) in c.iter().enumerate() {
                if r[k].0 == usize::MAX {
                    r[k] = (i, x);
                }
            }
        }
        r
    };
    let orep = reps(&ocls, no);
    let arep = reps(&acls, na);
    let objects: Vec<String> = orep.iter().map(|&(i, x)| d.stages[i].objects[x].clone()).collect();
    let objects = disambiguate(objects, &orep, ix);
    let arrows: Vec<Arrow> = arep
        .iter()
        .map(|&(i, f)| {
            let s = &d.stages[i];
            Arrow { name: s.arrows[f].name.clone(), src: ocls[i][s.src(f)], tgt: ocls[i][s.tgt(f)] }
        })
        .collect();
    let arrows = disambiguate_arrows(arrows, &arep, ix);
    let identities = orep.iter().map(|&(i, x)| acls[i][d.stages[i].id(x)]).collect();

    // composite of classes through a common later stage
    let mut table = Vec::new();
    for g in 0..na {
        for f in 0..na {
            if arrows[f].tgt != arrows[g].src {
                continue;
            }
            let ((i, fa), (j, ga)) = (arep[f], arep[g]);
            let h = (0..ix.n_objects()).find_map(|k| {
                ix.hom(i, k).iter().find_map(|&u| {
                    ix.hom(j, k).iter().find_map(|&v| {
                        let (fu, gv) = (d.maps[u].arr[fa], d.maps[v].arr[ga]);
                        d.stages[k].compose(gv, fu).map(|h| acls[k][h])
                    })
                })
            });
            if let Some(h) = h {
                table.push((g, f, h));
            }
        }
    }
    let cat = Arc::new(FinCat::from_parts(objects, arrows, identities, table));
    let coprojections = (0..ix.n_objects())
        .map(|i| Functor::new(d.stages[i].clone(), cat.clone(), ocls[i].clone(), acls[i].clone()))
        .collect();
    Ok(Colimit { cat, coprojections })
}

fn disambiguate(names: Vec<String>, reps: &[(usize, usize)], ix: &FinCat) -> Vec<String> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for n in &names {
        *count.entry(n.as_str()).or_default() += 1;
    }
    names
        .iter()
        .zip(reps)
        .map(|(n, &(i, _))| if count[n.as_str()] > 1 { format!("{n}@{}", ix.objects[i]) } else { n.clone() })
        .collect()
}

fn disambiguate_arrows(arrows: Vec<Arrow>, reps: &[(usize, usize)], ix: &FinCat) -> Vec<Arrow> {
    let names = disambiguate(arrows.iter().map(|a| a.name.clone()).collect(), reps, ix);
    let mut names = names;
    // names may still clash after tagging with the stage
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, n) in names.iter_mut().enumerate() {
        let c = seen.entry(n.clone()).or_default();
        if *c > 0 {
            *n = format!("{n}#{k}");
        }
        *c += 1;
    }
    arrows.into_iter().zip(names).map(|(a, name)| Arrow { name, ..a }).collect()
}

/// Checks that stage structure survives into the colimit: every marker of
/// every stage, carried along each transition and each coprojection, still
/// holds; and up to `samples` limits of binary products, pullbacks and
/// equalizers found at each stage stay limits.
pub fn verify_colimit_coherent(d: &CatDiagram, col: &Colimit, samples: usize) -> Vec<String> {
    let ix = &*d.index;
    let mut out = Vec::new();
    let carry = |f: &Functor, m: &Marker| m.map(|o| f.obj[o], |a| f.arr[a]);
    for (a, f) in d.maps.iter().enumerate() {
        if ix.is_identity(a) {
            continue;
        }
        let (i, j) = (ix.src(a), ix.tgt(a));
        for m in &d.stages[i].markers {
            if !d.stages[j].marker_holds(&carry(f, m)) {
                out.push(format!("{} marker of stage {} lost along {}", m.tag(), ix.objects[i], ix.arrows[a].name));
            }
        }
    }
    for (i, p) in col.coprojections.iter().enumerate() {
        let s = &d.stages[i];
        for m in &s.markers {
            if !col.cat.marker_holds(&carry(p, m)) {
                out.push(format!("{} marker of stage {} fails in the colimit", m.tag(), ix.objects[i]));
            }
        }
        for (dg, apex, legs) in sample_limits(s, samples) {
            let legs2: Vec<usize> = legs.iter().map(|&l| p.arr[l]).collect();
            if !col.cat.is_limit_cone(&map_diagram(p, &dg), p.obj[apex], &legs2) {
                out.push(format!("a limit at stage {} is not a limit in the colimit", ix.objects[i]));
            }
        }
    }
    out
}

/// Limits of small diagrams found in `c`, in canonical order.
pub fn sample_limits(c: &FinCat, samples: usize) -> Vec<(Diagram, usize, Vec<usize>)> {
    let mut out = Vec::new();
    let mut diagrams = Vec::new();
    let n = c.n_objects();
    for a in 0..n {
        for b in a..n {
            diagrams.push(Diagram { vertices: vec![a, b], edges: Vec::new() });
        }
    }
    for f in 0..c.n_arrows() {
        for g in f..c.n_arrows() {
            if c.is_identity(f) || c.is_identity(g) {
                continue;
            }
            if c.src(f) == c.src(g) && c.tgt(f) == c.tgt(g) && f != g {
                diagrams.push(Diagram { vertices: vec![c.src(f), c.tgt(f)], edges: vec![(f, 0, 1), (g, 0, 1)] });
            }
            if c.tgt(f) == c.tgt(g) {
                diagrams
                    .push(Diagram { vertices: vec![c.src(f), c.src(g), c.tgt(f)], edges: vec![(f, 0, 2), (g, 1, 2)] });
            }
        }
    }
    for dg in diagrams {
        if out.len() >= samples {
            break;
        }
        if let Some((apex, legs)) = c.find_limit(&dg) {
            out.push((dg, apex, legs));
        }
    }
    out
}

/// The least stage through which `f: C → colimit` factors, with the
/// factorization. Stages are tried in index order. When `coherent` is set,
/// the stage is advanced until the factorization also carries every
/// marker of `C` to a marker that holds at that stage.
pub fn factor_through_stage(
    f: &Functor,
    d: &CatDiagram,
    col: &Colimit,
    coherent: bool,
) -> Result<(usize, Functor), FinCatError> {
    let c = &f.src;
    for k in 0..d.stages.len() {
        let p = &col.coprojections[k];
        let s = &d.stages[k];
        let ocands: Vec<Vec<usize>> =
            (0..c.n_objects()).map(|o| (0..s.n_objects()).filter(|&x| p.obj[x] == f.obj[o]).collect()).collect();
        let mut found = None;
        let mut obj = Vec::new();
        lift_objects(c, s, p, f, &ocands, &mut obj, &mut |g| {
            let good = !coherent || c.markers.iter().all(|m| s.marker_holds(&m.map(|o| g.obj[o], |a| g.arr[a])));
            if good {
                found = Some(g.clone());
            }
            !good
        });
        if let Some(g) = found {
            return Ok((k, g));
        }
    }
    Err(FinCatError::StageBound(d.stages.len()))
}

fn lift_objects(
    c: &Arc<FinCat>,
    s: &Arc<FinCat>,
    p: &Functor,
    f: &Functor,
    ocands: &[Vec<usize>],
    obj: &mut Vec<usize>,
    visit: &mut dyn FnMut(&Functor) -> bool,
) -> bool {
    if obj.len() == ocands.len() {
        let acands: Vec<Vec<usize>> = (0..c.n_arrows())
            .map(|a| s.hom(obj[c.src(a)], obj[c.tgt(a)]).iter().copied().filter(|&b| p.arr[b] == f.arr[a]).collect())
            .collect();
        let mut arr = Vec::new();
        return lift_arrows(c, s, obj, &acands, &mut arr, visit);
    }
    for &x in &ocands[obj.len()] {
        obj.push(x);
        let go_on = lift_objects(c, s, p, f, ocands, obj, visit);
        obj.pop();
        if !go_on {
            return false;
        }
    }
    true
}

fn lift_arrows(
    c: &Arc<FinCat>,
    s: &Arc<FinCat>,
    obj: &[usize],
    acands: &[Vec<usize>],
    arr: &mut Vec<usize>,
    visit: &mut dyn FnMut(&Functor) -> bool,
) -> bool {
    if arr.len() == acands.len() {
        let g = Functor::new(c.clone(), s.clone(), obj.to_vec(), arr.clone());
        return !validate_functor(&g).is_empty() || visit(&g);
    }
    for &b in &acands[arr.len()] {
        arr.push(b);
        let go_on = lift_arrows(c, s, obj, acands, arr, visit);
        arr.pop();
        if !go_on {
            return false;
        }
    }
    true
}
