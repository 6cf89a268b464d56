//! Strict pullbacks of categories.

use std::collections::HashMap;
use std::sync::Arc;

use super::category::{Arrow, Diagram, FinCat};
use super::functor::{is_isofibration, Functor};
use super::FinCatError;

#[derive(Debug, Clone)]
pub struct Pullback {
    pub cat: Arc<FinCat>,
    pub p1: Functor,
    pub p2: Functor,
}

/// The strict pullback of `f: C → D ← C′: g`; one leg must be an
/// isofibration.
pub fn pullback_category(f: &Functor, g: &Functor) -> Result<Pullback, FinCatError> {
    if !is_isofibration(f) && !is_isofibration(g) {
        return Err(FinCatError::NotIsofibration);
    }
    Ok(pullback_category_unchecked(f, g))
}

/// The strict pullback without the isofibration precondition.
pub fn pullback_category_unchecked(f: &Functor, g: &Functor) -> Pullback {
    let (c, c2) = (&f.src, &g.src);
    let mut objects = Vec::new();
    let mut pairs = Vec::new();
    let mut obj_index = HashMap::new();
    for x in 0..c.n_objects() {
        for y in 0..c2.n_objects() {
            if f.obj[x] == g.obj[y] {
                obj_index.insert((x, y), pairs.len());
                pairs.push((x, y));
                objects.push(format!("({},{})", c.objects[x], c2.objects[y]));
            }
        }
    }
    let mut arrows = Vec::new();
    let mut arr_pairs = Vec::new();
    let mut arr_index = HashMap::new();
    for a in 0..c.n_arrows() {
        for b in 0..c2.n_arrows() {
            if f.arr[a] != g.arr[b] {
                continue;
            }
            let (Some(&s), Some(&t)) = (obj_index.get(&(c.src(a), c2.src(b))), obj_index.get(&(c.tgt(a), c2.tgt(b))))
            else {
                continue;
            };
            arr_index.insert((a, b), arr_pairs.len());
            arr_pairs.push((a, b));
            arrows.push(Arrow { name: format!("({},{})", c.arrows[a].name, c2.arrows[b].name), src: s, tgt: t });
        }
    }
    let ids = pairs.iter().map(|&(x, y)| arr_index[&(c.id(x), c2.id(y))]).collect();
    let cat = Arc::new(FinCat::from_fn(objects, arrows, ids, |h, k| {
        let (h1, h2) = arr_pairs[h];
        let (k1, k2) = arr_pairs[k];
        arr_index.get(&(c.compose(h1, k1)?, c2.compose(h2, k2)?)).copied()
    }));
    let p1 = Functor::new(
        cat.clone(),
        c.clone(),
        pairs.iter().map(|p| p.0).collect(),
        arr_pairs.iter().map(|p| p.0).collect(),
    );
    let p2 = Functor::new(
        cat.clone(),
        c2.clone(),
        pairs.iter().map(|p| p.1).collect(),
        arr_pairs.iter().map(|p| p.1).collect(),
    );
    Pullback { cat, p1, p2 }
}

/// Image of a diagram under a functor.
pub fn map_diagram(f: &Functor, d: &Diagram) -> Diagram {
    Diagram {
        vertices: d.vertices.iter().map(|&v| f.obj[v]).collect(),
        edges: d.edges.iter().map(|&(a, s, t)| (f.arr[a], s, t)).collect(),
    }
}

/// Whether a cone in the pullback is limiting there, and whether its two
/// projections are limiting in the factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeReport {
    pub in_pullback: bool,
    pub in_left: bool,
    pub in_right: bool,
}

pub fn cone_report(pb: &Pullback, d: &Diagram, apex: usize, legs: &[usize]) -> ConeReport {
    let side = |p: &Functor| {
        let legs: Vec<usize> = legs.iter().map(|&l| p.arr[l]).collect();
        p.tgt.is_limit_cone(&map_diagram(p, d), p.obj[apex], &legs)
    };
    ConeReport { in_pullback: pb.cat.is_limit_cone(d, apex, legs), in_left: side(&pb.p1), in_right: side(&pb.p2) }
}

/// Checks joint reflection on every cone over `d`: a cone whose two
/// projections are limits is a limit. Returns the failing cones.
pub fn reflection_failures(pb: &Pullback, d: &Diagram) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for apex in 0..pb.cat.n_objects() {
        pb.cat.for_each_cone(d, apex, &mut |legs| {
            let r = cone_report(pb, d, apex, legs);
            if r.in_left && r.in_right && !r.in_pullback {
                out.push((apex, legs.to_vec()));
            }
            true
        });
    }
    out
}
