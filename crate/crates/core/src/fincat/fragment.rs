//! Finite categories realized concretely inside finite sets.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde_json::{json, Value};

use super::category::{validate_category, Arrow, Diagram, FinCat, Marker};
use super::FinCatError;

/// A function between finite sets `{0..n}`, as its value list.
pub type Func = Vec<usize>;

/// A subcategory of finite sets: every object a finite set, every arrow a
/// function, composition agreeing with function composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFragment {
    pub cat: FinCat,
    pub carriers: Vec<Vec<String>>,
    pub funcs: Vec<Func>,
}

/// Mutable construction of a fragment, closed under composition on
/// [`FragmentBuilder::close`].
#[derive(Debug, Clone, Default)]
pub struct FragmentBuilder {
    pub objects: Vec<(String, Vec<String>)>,
    pub arrows: Vec<(String, usize, usize, Func)>,
    index: HashMap<(usize, usize, Func), usize>,
    names: HashSet<String>,
    pub markers: Vec<Marker>,
}

pub fn compose_fn(g: &[usize], f: &[usize]) -> Func {
    f.iter().map(|&x| g[x]).collect()
}

pub fn is_injective(f: &[usize]) -> bool {
    let s: BTreeSet<usize> = f.iter().copied().collect();
    s.len() == f.len()
}

pub fn is_surjective(f: &[usize], cod: usize) -> bool {
    let s: BTreeSet<usize> = f.iter().copied().collect();
    s.len() == cod
}

pub fn image(f: &[usize]) -> BTreeSet<usize> {
    f.iter().copied().collect()
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl FragmentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an object with carrier `{0..size}` and its identity arrow.
    pub fn object(&mut self, name: &str, size: usize) -> usize {
        self.object_labelled(name, labels(size))
    }

    pub fn object_labelled(&mut self, name: &str, carrier: Vec<String>) -> usize {
        let k = self.objects.len();
        let n = carrier.len();
        let mut name = name.to_string();
        while self.objects.iter().any(|o| o.0 == name) {
            name.push('\'');
        }
        self.objects.push((name.clone(), carrier));
        self.arrow(&format!("id_{name}"), k, k, (0..n).collect());
        k
    }

    /// Adds an arrow unless one with the same endpoints and function
    /// exists; returns its index either way.
    pub fn arrow(&mut self, name: &str, src: usize, tgt: usize, f: Func) -> usize {
        debug_assert_eq!(f.len(), self.objects[src].1.len());
        debug_assert!(f.iter().all(|&y| y < self.objects[tgt].1.len()));
        let key = (src, tgt, f);
        if let Some(&k) = self.index.get(&key) {
            return k;
        }
        let k = self.arrows.len();
        let mut name = name.to_string();
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.names.insert(name.clone());
        self.arrows.push((name, src, tgt, key.2.clone()));
        self.index.insert(key, k);
        k
    }

    pub fn find_arrow(&self, src: usize, tgt: usize, f: &[usize]) -> Option<usize> {
        self.index.get(&(src, tgt, f.to_vec())).copied()
    }

    pub fn size(&self, o: usize) -> usize {
        self.objects[o].1.len()
    }

    /// Adds all composites; fails if more than `max_arrows` arrows result.
    pub fn close(&mut self, max_arrows: usize) -> Result<(), FinCatError> {
        let mut done = 0;
        loop {
            let n = self.arrows.len();
            if done == n {
                return Ok(());
            }
            for g in 0..n {
                for f in 0..n {
                    if g < done && f < done {
                        continue;
                    }
                    let (fs, ft) = (self.arrows[f].1, self.arrows[f].2);
                    let (gs, gt) = (self.arrows[g].1, self.arrows[g].2);
                    if ft != gs {
                        continue;
                    }
                    let h = compose_fn(&self.arrows[g].3, &self.arrows[f].3);
                    if self.find_arrow(fs, gt, &h).is_none() {
                        let name = format!("{}.{}", self.arrows[g].0, self.arrows[f].0);
                        self.arrow(&name, fs, gt, h);
                        if self.arrows.len() > max_arrows {
                            return Err(FinCatError::Budget(format!("more than {max_arrows} arrows")));
                        }
                    }
                }
            }
            done = n;
        }
    }

    /// The fragment; the arrow set must already be closed under composition.
    pub fn build(&self) -> Result<SetFragment, FinCatError> {
        let objects: Vec<String> = self.objects.iter().map(|o| o.0.clone()).collect();
        let arrows: Vec<Arrow> =
            self.arrows.iter().map(|(n, s, t, _)| Arrow { name: n.clone(), src: *s, tgt: *t }).collect();
        let mut ids = Vec::with_capacity(objects.len());
        for (o, (name, carrier)) in self.objects.iter().enumerate() {
            let id: Func = (0..carrier.len()).collect();
            ids.push(self.find_arrow(o, o, &id).ok_or_else(|| FinCatError::Shape(format!("no identity on {name}")))?);
        }
        let mut missing = None;
        let cat = FinCat::from_fn(objects, arrows, ids, |g, f| {
            let h = compose_fn(&self.arrows[g].3, &self.arrows[f].3);
            let r = self.find_arrow(self.arrows[f].1, self.arrows[g].2, &h);
            if r.is_none() {
                missing = Some((g, f));
            }
            r
        });
        if let Some((g, f)) = missing {
            return Err(FinCatError::Shape(format!(
                "composite {}.{} is not in the fragment",
                self.arrows[g].0, self.arrows[f].0
            )));
        }
        Ok(SetFragment {
            cat: cat.with_markers(self.markers.clone()),
            carriers: self.objects.iter().map(|o| o.1.clone()).collect(),
            funcs: self.arrows.iter().map(|a| a.3.clone()).collect(),
        })
    }

    /// Closes under composition and builds.
    pub fn finish(mut self, max_arrows: usize) -> Result<SetFragment, FinCatError> {
        self.close(max_arrows)?;
        self.build()
    }
}

impl SetFragment {
    pub fn builder(&self) -> FragmentBuilder {
        let mut b = FragmentBuilder::new();
        for (o, c) in self.cat.objects.iter().zip(&self.carriers) {
            b.objects.push((o.clone(), c.clone()));
        }
        for (a, f) in self.cat.arrows.iter().zip(&self.funcs) {
            b.arrows.push((a.name.clone(), a.src, a.tgt, f.clone()));
            b.index.insert((a.src, a.tgt, f.clone()), b.arrows.len() - 1);
            b.names.insert(a.name.clone());
        }
        b.markers = self.cat.markers.clone();
        b
    }

    pub fn size(&self, o: usize) -> usize {
        self.carriers[o].len()
    }

    pub fn func(&self, a: usize) -> &Func {
        &self.funcs[a]
    }

    pub fn with_markers(mut self, markers: Vec<Marker>) -> SetFragment {
        self.cat.markers = markers;
        self
    }

    /// The arrow with these endpoints and function, if present.
    pub fn find_arrow(&self, src: usize, tgt: usize, f: &[usize]) -> Option<usize> {
        self.cat.hom(src, tgt).iter().copied().find(|&a| self.funcs[a] == f)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.cat.to_json();
        let objects: serde_json::Map<String, Value> =
            self.cat.objects.iter().zip(&self.carriers).map(|(o, c)| (o.clone(), json!(c))).collect();
        let arrows: serde_json::Map<String, Value> = self
            .cat
            .arrows
            .iter()
            .zip(&self.funcs)
            .map(|(a, f)| {
                let (s, t) = (&self.carriers[a.src], &self.carriers[a.tgt]);
                let m: serde_json::Map<String, Value> =
                    f.iter().enumerate().map(|(x, &y)| (s[x].clone(), json!(t[y]))).collect();
                (a.name.clone(), Value::Object(m))
            })
            .collect();
        v["realization"] = json!({"objects": objects, "arrows": arrows});
        v
    }

    pub fn from_json(v: &Value) -> Result<SetFragment, FinCatError> {
        let cat = FinCat::from_json(v)?;
        let bad = |m: String| FinCatError::Json(m);
        let r = &v["realization"];
        let mut carriers = Vec::new();
        for o in &cat.objects {
            let c = r["objects"][o].as_array().ok_or_else(|| bad(format!("no carrier for {o}")))?;
            carriers.push(
                c.iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("carrier labels are strings".into())))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let mut funcs = Vec::new();
        for a in &cat.arrows {
            let m = r["arrows"][&a.name].as_object().ok_or_else(|| bad(format!("no function for {}", a.name)))?;
            let (s, t) = (&carriers[a.src], &carriers[a.tgt]);
            let f = s
                .iter()
                .map(|x| {
                    let y =
                        m.get(x).and_then(Value::as_str).ok_or_else(|| bad(format!("{} undefined at {x}", a.name)))?;
                    t.iter().position(|l| l == y).ok_or_else(|| bad(format!("{} sends {x} outside its target", a.name)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            funcs.push(f);
        }
        Ok(SetFragment { cat, carriers, funcs })
    }
}

/// Empty iff the category is valid, arrows are functions between the
/// carriers, distinct parallel arrows differ as functions, and the
/// composition table is function composition.
pub fn validate_fragment(frag: &SetFragment) -> Vec<String> {
    let c = &frag.cat;
    let mut out = validate_category(c);
    if !out.is_empty() {
        return out;
    }
    if frag.carriers.len() != c.n_objects() || frag.funcs.len() != c.n_arrows() {
        return vec!["realization does not cover the category".into()];
    }
    for (i, a) in c.arrows.iter().enumerate() {
        let f = &frag.funcs[i];
        if f.len() != frag.size(a.src) || f.iter().any(|&y| y >= frag.size(a.tgt)) {
            out.push(format!("{} is not a function between its carriers", a.name));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for o in 0..c.n_objects() {
        if frag.funcs[c.id(o)] != (0..frag.size(o)).collect::<Vec<_>>() {
            out.push(format!("identity of {} is not the identity function", c.objects[o]));
        }
    }
    for a in 0..c.n_arrows() {
        for b in 0..a {
            if c.src(a) == c.src(b) && c.tgt(a) == c.tgt(b) && frag.funcs[a] == frag.funcs[b] {
                out.push(format!("{} and {} are the same function", c.arrows[b].name, c.arrows[a].name));
            }
        }
    }
    for (g, f) in c.composable_pairs() {
        if frag.funcs[c.comp(g, f)] != compose_fn(&frag.funcs[g], &frag.funcs[f]) {
            out.push(format!("composite {} ∘ {} disagrees with its function", c.arrows[g].name, c.arrows[f].name));
        }
    }
    out
}

/// The standard concrete limit: tuples over the vertices satisfying every
/// edge, with projection functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetLimit {
    pub tuples: Vec<Vec<usize>>,
    pub projections: Vec<Func>,
}

pub fn finset_limit(frag: &SetFragment, d: &Diagram) -> SetLimit {
    let sizes: Vec<usize> = d.vertices.iter().map(|&v| frag.size(v)).collect();
    let tuples: Vec<Vec<usize>> = crate::semantics::tuples(&sizes)
        .into_iter()
        .filter(|t| d.edges.iter().all(|&(a, from, to)| frag.funcs[a][t[from]] == t[to]))
        .collect();
    let projections = (0..d.vertices.len()).map(|v| tuples.iter().map(|t| t[v]).collect()).collect();
    SetLimit { tuples, projections }
}

/// Whether the cone `legs` from an object of size `apex_size` is a limit
/// in sets: the induced map into the concrete limit is a bijection.
pub fn is_concrete_limit(frag: &SetFragment, d: &Diagram, apex_size: usize, legs: &[&[usize]]) -> bool {
    if d.edges.iter().any(|&(a, from, to)| compose_fn(&frag.funcs[a], legs[from]) != legs[to]) {
        return false;
    }
    let lim = finset_limit(frag, d);
    if lim.tuples.len() != apex_size {
        return false;
    }
    let seen: BTreeSet<Vec<usize>> = (0..apex_size).map(|x| legs.iter().map(|l| l[x]).collect()).collect();
    seen.len() == apex_size
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageFactorization {
    /// Image elements, increasing, as elements of the codomain.
    pub image: Vec<usize>,
    /// Surjection onto the image (indices into `image`).
    pub e: Func,
    /// Inclusion of the image.
    pub m: Func,
    /// `e` is the coequalizer of the kernel pair of the arrow.
    pub e_coequalizes_kernel_pair: bool,
}

/// Quotient of `0..n` by the equivalence generated by `pairs`, as class
/// indices in order of first appearance.
pub fn quotient(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Func {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if class[r] == usize::MAX {
            class[r] = next;
            next += 1;
        }
        out[x] = class[r];
    }
    out
}

/// Kernel pair of `f`: all pairs with equal image.
pub fn kernel_pair(f: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..f.len() {
        for y in 0..f.len() {
            if f[x] == f[y] {
                out.push((x, y));
            }
        }
    }
    out
}

/// Whether `f: X → Y` is (up to a bijection) the coequalizer of its
/// kernel pair in sets.
pub fn coequalizes_kernel_pair(f: &[usize], cod: usize) -> bool {
    let q = quotient(f.len(), kernel_pair(f));
    let classes = q.iter().max().map_or(0, |m| m + 1);
    // the induced map from the quotient must be a bijection onto Y
    let mut induced = vec![usize::MAX; classes];
    for (x, &c) in q.iter().enumerate() {
        if induced[c] != usize::MAX && induced[c] != f[x] {
            return false;
        }
        induced[c] = f[x];
    }
    is_injective(&induced) && induced.len() == cod
}

pub fn image_factorization(frag: &SetFragment, f: usize) -> ImageFactorization {
    image_of(&frag.funcs[f])
}

pub fn image_of(func: &[usize]) -> ImageFactorization {
    let image: Vec<usize> = image(func).into_iter().collect();
    let e: Func = func.iter().map(|y| image.binary_search(y).unwrap()).collect();
    let ok = coequalizes_kernel_pair(&e, image.len());
    ImageFactorization { m: image.clone(), image, e, e_coequalizes_kernel_pair: ok }
}

/// Effective epi in sets: checked both as surjectivity and as coequalizing
/// the kernel pair; the two must agree.
pub fn is_effective_epi(frag: &SetFragment, f: usize) -> bool {
    let cod = frag.size(frag.cat.tgt(f));
    let a = is_surjective(&frag.funcs[f], cod);
    let b = coequalizes_kernel_pair(&frag.funcs[f], cod);
    assert_eq!(a, b, "surjectivity and effective-epi checks disagree");
    a
}

/// The subobject lattice of a finite set, subobjects as subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subobjects {
    pub size: usize,
}

pub type Subset = BTreeSet<usize>;

impl Subobjects {
    pub fn of(frag: &SetFragment, x: usize) -> Subobjects {
        Subobjects { size: frag.size(x) }
    }

    pub fn top(&self) -> Subset {
        (0..self.size).collect()
    }

    pub fn bottom(&self) -> Subset {
        Subset::new()
    }

    pub fn meet(&self, a: &Subset, b: &Subset) -> Subset {
        a.intersection(b).copied().collect()
    }

    pub fn join(&self, a: &Subset, b: &Subset) -> Subset {
        a.union(b).copied().collect()
    }

    pub fn leq(&self, a: &Subset, b: &Subset) -> bool {
        a.is_subset(b)
    }

    pub fn all(&self) -> Vec<Subset> {
        (0..1usize << self.size).map(|m| (0..self.size).filter(|i| m >> i & 1 == 1).collect()).collect()
    }

    /// The subset given by the image of a mono.
    pub fn of_mono(m: &[usize]) -> Subset {
        image(m)
    }
}

/// `f⁻¹(B)`.
pub fn preimage(f: &[usize], b: &Subset) -> Subset {
    (0..f.len()).filter(|x| b.contains(&f[*x])).collect()
}

/// Checks that `f⁻¹` preserves top, bottom, meets and joins on all
/// subsets of a codomain of size `cod`.
pub fn preimage_is_lattice_hom(f: &[usize], cod: usize) -> bool {
    let (x, y) = (Subobjects { size: f.len() }, Subobjects { size: cod });
    if preimage(f, &y.top()) != x.top() || preimage(f, &y.bottom()) != x.bottom() {
        return false;
    }
    let all = y.all();
    all.iter().all(|a| {
        all.iter().all(|b| {
            preimage(f, &y.meet(a, b)) == x.meet(&preimage(f, a), &preimage(f, b))
                && preimage(f, &y.join(a, b)) == x.join(&preimage(f, a), &preimage(f, b))
        })
    })
}

/// Shape of a marker in a fragment, including the monos that rows 8–10
/// presuppose.
pub fn well_shaped(frag: &SetFragment, m: &Marker) -> Result<(), String> {
    super::category::marker_shape(&frag.cat, m)?;
    let inj = |a: usize| is_injective(&frag.funcs[a]);
    match m {
        Marker::Equalizer { eps, .. } if !inj(*eps) => Err("equalizer leg is not mono".into()),
        Marker::Sup { g, family } | Marker::Inf { g, family } if !inj(*g) || !family.iter().all(|&a| inj(a)) => {
            Err(format!("{} family contains a non-mono", m.tag()))
        }
        _ => Ok(()),
    }
}

/// Whether the marked property holds in sets, checked directly on the
/// functions (row by row of the characterization table).
pub fn concrete_property(frag: &SetFragment, m: &Marker) -> bool {
    let c = &frag.cat;
    let f = |a: usize| &frag.funcs[a];
    let size = |o: usize| frag.size(o);
    match m {
        Marker::Identity(a) => f(*a).iter().enumerate().all(|(x, &y)| x == y),
        Marker::Triangle { f: a, g, h } => compose_fn(f(*g), f(*a)) == *f(*h),
        Marker::Mono(a) => is_injective(f(*a)),
        Marker::Surjective(a) => is_surjective(f(*a), size(c.tgt(*a))),
        Marker::Terminal(o) => size(*o) == 1,
        Marker::Initial(o) => size(*o) == 0,
        Marker::Product { f: a, g } => {
            let d = Diagram { vertices: vec![c.tgt(*a), c.tgt(*g)], edges: Vec::new() };
            is_concrete_limit(frag, &d, size(c.src(*a)), &[f(*a), f(*g)])
        }
        Marker::Equalizer { eps, f: a, g } => {
            let eq: Subset = (0..size(c.src(*a))).filter(|&x| f(*a)[x] == f(*g)[x]).collect();
            is_injective(f(*eps)) && image(f(*eps)) == eq
        }
        Marker::Sup { g, family } => {
            let u: Subset = family.iter().flat_map(|&a| f(a).iter().copied()).collect();
            image(f(*g)) == u
        }
        Marker::Inf { g, family } => {
            let mut it = family.iter();
            let first: Subset = match it.next() {
                Some(&a) => image(f(a)),
                None => (0..size(c.tgt(*g))).collect(),
            };
            let i = it.fold(first, |acc, &a| acc.intersection(&image(f(a))).copied().collect());
            image(f(*g)) == i
        }
    }
}
