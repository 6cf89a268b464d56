use std::sync::Arc;

use serde_json::{json, Value};

use super::category::FinCat;
use super::FinCatError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub src: Arc<FinCat>,
    pub tgt: Arc<FinCat>,
    pub obj: Vec<usize>,
    pub arr: Vec<usize>,
}

/// A natural transformation between parallel functors, by components.
/// Two-cells in this crate are meant to be invertible; see
/// [`validate_two_cell`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCell {
    pub from: Functor,
    pub to: Functor,
    pub comps: Vec<usize>,
}

impl Functor {
    pub fn new(src: Arc<FinCat>, tgt: Arc<FinCat>, obj: Vec<usize>, arr: Vec<usize>) -> Functor {
        Functor { src, tgt, obj, arr }
    }

    pub fn identity(c: &Arc<FinCat>) -> Functor {
        Functor::new(c.clone(), c.clone(), (0..c.n_objects()).collect(), (0..c.n_arrows()).collect())
    }

    /// The functor given by an arrow map; objects follow identities.
    pub fn from_arrows(src: Arc<FinCat>, tgt: Arc<FinCat>, arr: Vec<usize>) -> Functor {
        let obj = src.identities.iter().map(|&i| tgt.src(arr[i])).collect();
        Functor::new(src, tgt, obj, arr)
    }

    /// The constant functor at object `o`.
    pub fn constant(src: Arc<FinCat>, tgt: Arc<FinCat>, o: usize) -> Functor {
        let id = tgt.id(o);
        Functor::new(src.clone(), tgt, vec![o; src.n_objects()], vec![id; src.n_arrows()])
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Functor {
        Functor::new(
            self.src.clone(),
            other.tgt.clone(),
            self.obj.iter().map(|&o| other.obj[o]).collect(),
            self.arr.iter().map(|&a| other.arr[a]).collect(),
        )
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = self.obj.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn to_json(&self) -> Value {
        let s = &self.src;
        let t = &self.tgt;
        json!({
            "source": s.to_json(),
            "target": t.to_json(),
            "objects": s.objects.iter().zip(&self.obj).map(|(a, &b)| (a.clone(), json!(t.objects[b]))).collect::<serde_json::Map<_, _>>(),
            "arrows": s.arrows.iter().zip(&self.arr).map(|(a, &b)| (a.name.clone(), json!(t.arrows[b].name))).collect::<serde_json::Map<_, _>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Functor, FinCatError> {
        let src = Arc::new(FinCat::from_json(&v["source"])?);
        let tgt = Arc::new(FinCat::from_json(&v["target"])?);
        Functor::from_json_between(v, src, tgt)
    }

    /// Reads only the object and arrow maps of `v`.
    pub fn from_json_between(v: &Value, src: Arc<FinCat>, tgt: Arc<FinCat>) -> Result<Functor, FinCatError> {
        let bad = |m: String| FinCatError::Json(m);
        let lookup = |map: &Value, key: &str, what: &str| -> Result<String, FinCatError> {
            map.get(key)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| bad(format!("functor has no image for {what} {key}")))
        };
        let obj = src
            .objects
            .iter()
            .map(|o| {
                let t = lookup(&v["objects"], o, "object")?;
                tgt.object_index(&t).ok_or_else(|| bad(format!("unknown object {t}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let arr = src
            .arrows
            .iter()
            .map(|a| {
                let t = lookup(&v["arrows"], &a.name, "arrow")?;
                tgt.arrow_index(&t).ok_or_else(|| bad(format!("unknown arrow {t}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Functor::new(src, tgt, obj, arr))
    }
}

/// Empty iff `f` preserves endpoints, identities and composition.
pub fn validate_functor(f: &Functor) -> Vec<String> {
    let (c, d) = (&*f.src, &*f.tgt);
    let mut out = Vec::new();
    if f.obj.len() != c.n_objects() || f.arr.len() != c.n_arrows() {
        return vec!["object or arrow map has the wrong length".into()];
    }
    if f.obj.iter().any(|&o| o >= d.n_objects()) || f.arr.iter().any(|&a| a >= d.n_arrows()) {
        return vec!["map leaves the target category".into()];
    }
    for (i, a) in c.arrows.iter().enumerate() {
        let b = &d.arrows[f.arr[i]];
        if b.src != f.obj[a.src] || b.tgt != f.obj[a.tgt] {
            out.push(format!("{} is not sent between the images of its endpoints", a.name));
        }
    }
    for o in 0..c.n_objects() {
        if f.arr[c.id(o)] != d.id(f.obj[o]) {
            out.push(format!("identity of {} is not preserved", c.objects[o]));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (g, h) in c.composable_pairs() {
        if d.compose(f.arr[g], f.arr[h]) != Some(f.arr[c.comp(g, h)]) {
            out.push(format!("composite {} ∘ {} is not preserved", c.arrows[g].name, c.arrows[h].name));
        }
    }
    out
}

impl TwoCell {
    pub fn identity(f: &Functor) -> TwoCell {
        TwoCell { from: f.clone(), to: f.clone(), comps: f.obj.iter().map(|&o| f.tgt.id(o)).collect() }
    }

    /// Vertical composite: `self` then `next`.
    pub fn then(&self, next: &TwoCell) -> TwoCell {
        let d = &self.from.tgt;
        TwoCell {
            from: self.from.clone(),
            to: next.to.clone(),
            comps: self.comps.iter().zip(&next.comps).map(|(&a, &b)| d.comp(b, a)).collect(),
        }
    }

    /// Componentwise inverse; None if some component is not invertible.
    pub fn inverse(&self) -> Option<TwoCell> {
        let d = &self.from.tgt;
        let comps = self.comps.iter().map(|&a| d.inverse(a)).collect::<Option<Vec<_>>>()?;
        Some(TwoCell { from: self.to.clone(), to: self.from.clone(), comps })
    }

    /// `self · H` for `H: B → A` into the common source.
    pub fn whisker_left(&self, h: &Functor) -> TwoCell {
        TwoCell {
            from: h.then(&self.from),
            to: h.then(&self.to),
            comps: h.obj.iter().map(|&o| self.comps[o]).collect(),
        }
    }

    /// `K · self` for `K` out of the common target.
    pub fn whisker_right(&self, k: &Functor) -> TwoCell {
        TwoCell { from: self.from.then(k), to: self.to.then(k), comps: self.comps.iter().map(|&a| k.arr[a]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        let d = &self.from.tgt;
        self.comps.iter().all(|&a| d.is_identity(a))
    }

    pub fn to_json(&self) -> Value {
        let c = &self.from.src;
        let d = &self.from.tgt;
        json!({
            "from": self.from.to_json(),
            "to": self.to.to_json(),
            "components": c.objects.iter().zip(&self.comps).map(|(o, &a)| (o.clone(), json!(d.arrows[a].name))).collect::<serde_json::Map<_, _>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<TwoCell, FinCatError> {
        let from = Functor::from_json(&v["from"])?;
        let to = Functor::from_json_between(&v["to"], from.src.clone(), from.tgt.clone())?;
        let comps = from
            .src
            .objects
            .iter()
            .map(|o| {
                let name =
                    v["components"][o].as_str().ok_or_else(|| FinCatError::Json(format!("no component at {o}")))?;
                from.tgt.arrow_index(name).ok_or_else(|| FinCatError::Json(format!("unknown arrow {name}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TwoCell { from, to, comps })
    }
}

/// Empty iff the cell is natural and every component is invertible.
pub fn validate_two_cell(t: &TwoCell) -> Vec<String> {
    let mut out = Vec::new();
    if t.from.src != t.to.src || t.from.tgt != t.to.tgt {
        return vec!["functors are not parallel".into()];
    }
    let (c, d) = (&*t.from.src, &*t.from.tgt);
    if t.comps.len() != c.n_objects() {
        return vec!["component map has the wrong length".into()];
    }
    for (o, &a) in t.comps.iter().enumerate() {
        if a >= d.n_arrows() || d.src(a) != t.from.obj[o] || d.tgt(a) != t.to.obj[o] {
            out.push(format!("component at {} has the wrong endpoints", c.objects[o]));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (o, &a) in t.comps.iter().enumerate() {
        if !d.is_iso(a) {
            out.push(format!("component at {} is not iso", c.objects[o]));
        }
    }
    for (i, a) in c.arrows.iter().enumerate() {
        let lhs = d.comp(t.to.arr[i], t.comps[a.src]);
        let rhs = d.comp(t.comps[a.tgt], t.from.arr[i]);
        if lhs != rhs {
            out.push(format!("naturality square at {} does not commute", a.name));
        }
    }
    out
}

/// Every iso out of an image `F(c)` lifts to an iso out of `c`.
pub fn is_isofibration(f: &Functor) -> bool {
    let (c, d) = (&*f.src, &*f.tgt);
    (0..c.n_objects()).all(|x| {
        (0..d.n_objects()).all(|y| {
            d.hom(f.obj[x], y)
                .iter()
                .filter(|&&h| d.is_iso(h))
                .all(|&h| (0..c.n_objects()).any(|z| c.hom(x, z).iter().any(|&k| f.arr[k] == h && c.is_iso(k))))
        })
    })
}

/// All functors `c → d`, in canonical order, at most `limit` of them.
pub fn enumerate_functors(c: &Arc<FinCat>, d: &Arc<FinCat>, limit: usize) -> Vec<Functor> {
    let mut out = Vec::new();
    let mut obj = vec![usize::MAX; c.n_objects()];
    functor_objects(c, d, 0, &mut obj, &mut out, limit);
    out
}

fn functor_objects(
    c: &Arc<FinCat>,
    d: &Arc<FinCat>,
    k: usize,
    obj: &mut Vec<usize>,
    out: &mut Vec<Functor>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == obj.len() {
        let mut arr: Vec<usize> = vec![usize::MAX; c.n_arrows()];
        for o in 0..c.n_objects() {
            arr[c.id(o)] = d.id(obj[o]);
        }
        let order: Vec<usize> = (0..c.n_arrows()).filter(|&a| !c.is_identity(a)).collect();
        functor_arrows(c, d, &order, 0, obj, &mut arr, out, limit);
        return;
    }
    for o in 0..d.n_objects() {
        obj[k] = o;
        functor_objects(c, d, k + 1, obj, out, limit);
    }
}

#[allow(clippy::too_many_arguments)]
fn functor_arrows(
    c: &Arc<FinCat>,
    d: &Arc<FinCat>,
    order: &[usize],
    k: usize,
    obj: &[usize],
    arr: &mut Vec<usize>,
    out: &mut Vec<Functor>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == order.len() {
        out.push(Functor::new(c.clone(), d.clone(), obj.to_vec(), arr.clone()));
        return;
    }
    let a = order[k];
    for &b in d.hom(obj[c.src(a)], obj[c.tgt(a)]) {
        arr[a] = b;
        // check every composite whose three arrows are already assigned
        let ok = c.composable_pairs().all(|(g, f)| {
            let h = c.comp(g, f);
            if arr[g] == usize::MAX || arr[f] == usize::MAX || arr[h] == usize::MAX {
                true
            } else {
                d.compose(arr[g], arr[f]) == Some(arr[h])
            }
        });
        if ok {
            functor_arrows(c, d, order, k + 1, obj, arr, out, limit);
        }
    }
    arr[a] = usize::MAX;
}

/// All natural isomorphisms `f ⇒ g`, in canonical order.
pub fn enumerate_natural_isos(f: &Functor, g: &Functor, limit: usize) -> Vec<TwoCell> {
    let (c, d) = (&*f.src, &*f.tgt);
    let mut out = Vec::new();
    let mut comps = Vec::with_capacity(c.n_objects());
    nat_step(f, g, c, d, &mut comps, &mut out, limit);
    out
}

fn nat_step(
    f: &Functor,
    g: &Functor,
    c: &FinCat,
    d: &FinCat,
    comps: &mut Vec<usize>,
    out: &mut Vec<TwoCell>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let k = comps.len();
    if k == c.n_objects() {
        out.push(TwoCell { from: f.clone(), to: g.clone(), comps: comps.clone() });
        return;
    }
    for &a in d.hom(f.obj[k], g.obj[k]) {
        if !d.is_iso(a) {
            continue;
        }
        comps.push(a);
        let ok = c.arrows.iter().enumerate().all(|(i, ar)| {
            ar.src.max(ar.tgt) != k || d.comp(g.arr[i], comps[ar.src]) == d.comp(comps[ar.tgt], f.arr[i])
        });
        if ok {
            nat_step(f, g, c, d, comps, out, limit);
        }
        comps.pop();
    }
}

/// Product of two categories, with its projections.
pub fn product(a: &Arc<FinCat>, b: &Arc<FinCat>) -> (Arc<FinCat>, Functor, Functor) {
    let (na, nb) = (a.n_arrows(), b.n_arrows());
    let objects: Vec<String> =
        a.objects.iter().flat_map(|x| b.objects.iter().map(move |y| format!("({x},{y})"))).collect();
    let oi = |x: usize, y: usize| x * b.n_objects() + y;
    let arrows: Vec<super::category::Arrow> = (0..na)
        .flat_map(|f| (0..nb).map(move |g| (f, g)))
        .map(|(f, g)| super::category::Arrow {
            name: format!("({},{})", a.arrows[f].name, b.arrows[g].name),
            src: oi(a.src(f), b.src(g)),
            tgt: oi(a.tgt(f), b.tgt(g)),
        })
        .collect();
    let ids = (0..a.n_objects())
        .flat_map(|x| (0..b.n_objects()).map(move |y| (x, y)))
        .map(|(x, y)| a.id(x) * nb + b.id(y))
        .collect();
    let p = Arc::new(FinCat::from_fn(objects, arrows, ids, |g, f| {
        let (g1, g2) = (g / nb, g % nb);
        let (f1, f2) = (f / nb, f % nb);
        Some(a.compose(g1, f1)? * nb + b.compose(g2, f2)?)
    }));
    let p1 = Functor::new(
        p.clone(),
        a.clone(),
        (0..p.n_objects()).map(|o| o / b.n_objects()).collect(),
        (0..p.n_arrows()).map(|f| f / nb).collect(),
    );
    let p2 = Functor::new(
        p.clone(),
        b.clone(),
        (0..p.n_objects()).map(|o| o % b.n_objects()).collect(),
        (0..p.n_arrows()).map(|f| f % nb).collect(),
    );
    (p, p1, p2)
}
