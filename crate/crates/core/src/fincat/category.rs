use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use super::FinCatError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// Declared diagram data on a category, by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Marker {
    Identity(usize),
    /// `g∘f = h`
    Triangle {
        f: usize,
        g: usize,
        h: usize,
    },
    Mono(usize),
    Surjective(usize),
    Terminal(usize),
    Initial(usize),
    /// legs `f: C→A`, `g: C→B`
    Product {
        f: usize,
        g: usize,
    },
    /// `eps: E→A` equalizing `f, g: A→B`
    Equalizer {
        eps: usize,
        f: usize,
        g: usize,
    },
    /// `g: B→X` is the union of the `family: Aᵢ→X`
    Sup {
        g: usize,
        family: Vec<usize>,
    },
    Inf {
        g: usize,
        family: Vec<usize>,
    },
}

impl Marker {
    pub fn tag(&self) -> &'static str {
        match self {
            Marker::Identity(_) => "identity",
            Marker::Triangle { .. } => "triangle",
            Marker::Mono(_) => "mono",
            Marker::Surjective(_) => "surjective",
            Marker::Terminal(_) => "terminal",
            Marker::Initial(_) => "initial",
            Marker::Product { .. } => "product",
            Marker::Equalizer { .. } => "equalizer",
            Marker::Sup { .. } => "sup",
            Marker::Inf { .. } => "inf",
        }
    }

    pub fn arrows(&self) -> Vec<usize> {
        match self {
            Marker::Identity(f) | Marker::Mono(f) | Marker::Surjective(f) => vec![*f],
            Marker::Triangle { f, g, h } => vec![*f, *g, *h],
            Marker::Terminal(_) | Marker::Initial(_) => Vec::new(),
            Marker::Product { f, g } => vec![*f, *g],
            Marker::Equalizer { eps, f, g } => vec![*eps, *f, *g],
            Marker::Sup { g, family } | Marker::Inf { g, family } => {
                std::iter::once(*g).chain(family.iter().copied()).collect()
            }
        }
    }

    /// The same marker with arrows and objects renamed.
    pub fn map(&self, obj: impl Fn(usize) -> usize, arr: impl Fn(usize) -> usize) -> Marker {
        match self {
            Marker::Identity(f) => Marker::Identity(arr(*f)),
            Marker::Triangle { f, g, h } => Marker::Triangle { f: arr(*f), g: arr(*g), h: arr(*h) },
            Marker::Mono(f) => Marker::Mono(arr(*f)),
            Marker::Surjective(f) => Marker::Surjective(arr(*f)),
            Marker::Terminal(o) => Marker::Terminal(obj(*o)),
            Marker::Initial(o) => Marker::Initial(obj(*o)),
            Marker::Product { f, g } => Marker::Product { f: arr(*f), g: arr(*g) },
            Marker::Equalizer { eps, f, g } => Marker::Equalizer { eps: arr(*eps), f: arr(*f), g: arr(*g) },
            Marker::Sup { g, family } => Marker::Sup { g: arr(*g), family: family.iter().map(|&a| arr(a)).collect() },
            Marker::Inf { g, family } => Marker::Inf { g: arr(*g), family: family.iter().map(|&a| arr(a)).collect() },
        }
    }
}

/// A finite category with an explicit composition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCat {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub identities: Vec<usize>,
    /// `comp[g * n + f] = g∘f`
    comp: Vec<Option<usize>>,
    homs: HashMap<(usize, usize), Vec<usize>>,
    pub markers: Vec<Marker>,
}

/// A finite diagram in a category: vertices are objects, edges arrows
/// between vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagram {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, usize)>,
}

impl FinCat {
    /// Builds a category from raw parts; `table` lists `(g, f, g∘f)`.
    /// No laws are checked here, see [`validate_category`].
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        table: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> FinCat {
        let n = arrows.len();
        let mut comp = vec![None; n * n];
        for (g, f, h) in table {
            comp[g * n + f] = Some(h);
        }
        let mut homs: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            homs.entry((a.src, a.tgt)).or_default().push(i);
        }
        FinCat { objects, arrows, identities, comp, homs, markers: Vec::new() }
    }

    /// Builds a category from objects and arrows with a composition
    /// function; identities must be among the arrows.
    pub fn from_fn(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> FinCat {
        let mut table = Vec::new();
        for g in 0..arrows.len() {
            for f in 0..arrows.len() {
                if arrows[f].tgt == arrows[g].src {
                    if let Some(h) = compose(g, f) {
                        table.push((g, f, h));
                    }
                }
            }
        }
        FinCat::from_parts(objects, arrows, identities, table)
    }

    pub fn empty() -> FinCat {
        FinCat::from_parts(Vec::new(), Vec::new(), Vec::new(), [])
    }

    pub fn discrete(names: &[&str]) -> FinCat {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let arrows =
            objects.iter().enumerate().map(|(i, o)| Arrow { name: format!("id_{o}"), src: i, tgt: i }).collect();
        let ids: Vec<usize> = (0..objects.len()).collect();
        FinCat::from_parts(objects, arrows, ids.clone(), ids.iter().map(|&i| (i, i, i)))
    }

    /// One object `*` and its identity.
    pub fn terminal() -> FinCat {
        FinCat::discrete(&["*"])
    }

    /// The total order `0 < 1 < … < n-1`, arrows named `i<=j`.
    pub fn total_order(n: usize) -> FinCat {
        let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        let mut index = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                index.insert((i, j), arrows.len());
                arrows.push(Arrow { name: format!("{i}<={j}"), src: i, tgt: j });
            }
        }
        let ids = (0..n).map(|i| index[&(i, i)]).collect();
        FinCat::from_fn(objects, arrows.clone(), ids, |g, f| index.get(&(arrows[f].src, arrows[g].tgt)).copied())
    }

    /// Objects `u, v`; arrows `id_u, id_v, f: u→v, g: v→u` with `gf = id_u`,
    /// `fg = id_v`.
    pub fn walking_iso() -> FinCat {
        let objects = vec!["u".to_string(), "v".to_string()];
        let arrows = vec![
            Arrow { name: "id_u".into(), src: 0, tgt: 0 },
            Arrow { name: "id_v".into(), src: 1, tgt: 1 },
            Arrow { name: "f".into(), src: 0, tgt: 1 },
            Arrow { name: "g".into(), src: 1, tgt: 0 },
        ];
        let table = [(0, 0, 0), (1, 1, 1), (1, 2, 2), (2, 0, 2), (0, 3, 3), (3, 1, 3), (3, 2, 0), (2, 3, 1)];
        FinCat::from_parts(objects, arrows, vec![0, 1], table)
    }

    pub fn with_markers(mut self, markers: Vec<Marker>) -> FinCat {
        self.markers = markers;
        self
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn src(&self, f: usize) -> usize {
        self.arrows[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.arrows[f].tgt
    }

    pub fn id(&self, o: usize) -> usize {
        self.identities[o]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.src(f)] == f
    }

    /// `g∘f`, if defined in the table.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g * self.arrows.len() + f]
    }

    /// `g∘f` for arrows known to be composable in a valid category.
    pub fn comp(&self, g: usize, f: usize) -> usize {
        self.compose(g, f).unwrap_or_else(|| panic!("{} ∘ {} undefined", self.arrows[g].name, self.arrows[f].name))
    }

    /// Composite of a path given first arrow first.
    pub fn comp_path(&self, path: &[usize]) -> usize {
        let mut it = path.iter();
        let mut acc = *it.next().expect("empty path");
        for &g in it {
            acc = self.comp(g, acc);
        }
        acc
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// The two-sided inverse of `f`, if any.
    pub fn inverse(&self, f: usize) -> Option<usize> {
        let (a, b) = (self.src(f), self.tgt(f));
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&g| self.compose(g, f) == Some(self.id(a)) && self.compose(f, g) == Some(self.id(b)))
    }

    pub fn is_iso(&self, f: usize) -> bool {
        self.inverse(f).is_some()
    }

    /// Left-cancellable inside this category.
    pub fn is_mono(&self, f: usize) -> bool {
        let a = self.src(f);
        (0..self.n_objects()).all(|x| {
            let h = self.hom(x, a);
            h.iter().all(|&u| h.iter().all(|&v| u == v || self.comp(f, u) != self.comp(f, v)))
        })
    }

    /// Whether `legs` (one per vertex, from `apex`) form a limiting cone.
    pub fn is_limit_cone(&self, d: &Diagram, apex: usize, legs: &[usize]) -> bool {
        if legs.len() != d.vertices.len()
            || legs.iter().zip(&d.vertices).any(|(&l, &v)| self.src(l) != apex || self.tgt(l) != v)
            || !self.is_cone(d, legs)
        {
            return false;
        }
        (0..self.n_objects()).all(|x| {
            let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
            for &u in self.hom(x, apex) {
                let fam: Vec<usize> = legs.iter().map(|&l| self.comp(l, u)).collect();
                *counts.entry(fam).or_default() += 1;
            }
            let mut ok = true;
            self.for_each_cone(d, x, &mut |fam| {
                if counts.get(fam) != Some(&1) {
                    ok = false;
                }
                ok
            });
            ok
        })
    }

    /// Whether `legs` (one per vertex, into `apex`) form a colimiting cocone.
    pub fn is_colimit_cocone(&self, d: &Diagram, apex: usize, legs: &[usize]) -> bool {
        self.opposite().is_limit_cone(&d.opposite(), apex, legs)
    }

    fn is_cone(&self, d: &Diagram, legs: &[usize]) -> bool {
        d.edges.iter().all(|&(a, from, to)| self.compose(a, legs[from]) == Some(legs[to]))
    }

    /// Calls `visit` on every cone from `x` over `d`; stops when it returns false.
    pub fn for_each_cone(&self, d: &Diagram, x: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let mut fam = Vec::with_capacity(d.vertices.len());
        self.cone_step(d, x, &mut fam, visit);
    }

    fn cone_step(&self, d: &Diagram, x: usize, fam: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let k = fam.len();
        if k == d.vertices.len() {
            return visit(fam);
        }
        for &l in self.hom(x, d.vertices[k]) {
            fam.push(l);
            let consistent = d
                .edges
                .iter()
                .filter(|&&(_, from, to)| from.max(to) == k)
                .all(|&(a, from, to)| self.compose(a, fam[from]) == Some(fam[to]));
            let go_on = !consistent || self.cone_step(d, x, fam, visit);
            fam.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Some limit cone over `d`, in canonical order.
    pub fn find_limit(&self, d: &Diagram) -> Option<(usize, Vec<usize>)> {
        for apex in 0..self.n_objects() {
            let mut found = None;
            self.for_each_cone(d, apex, &mut |fam| {
                if self.is_limit_cone(d, apex, fam) {
                    found = Some(fam.to_vec());
                    false
                } else {
                    true
                }
            });
            if let Some(legs) = found {
                return Some((apex, legs));
            }
        }
        None
    }

    /// Coequalizer of its own kernel pair, computed inside this category.
    pub fn is_effective_epi(&self, f: usize) -> bool {
        let (a, b) = (self.src(f), self.tgt(f));
        let cospan = Diagram { vertices: vec![a, a, b], edges: vec![(f, 0, 2), (f, 1, 2)] };
        let Some((_, legs)) = self.find_limit(&cospan) else { return false };
        let pair = Diagram { vertices: vec![self.src(legs[0]), a], edges: vec![(legs[0], 0, 1), (legs[1], 0, 1)] };
        self.is_colimit_cocone(&pair, b, &[self.comp(f, legs[0]), f])
    }

    /// `f` factors as `g∘u`.
    pub fn factors_through(&self, f: usize, g: usize) -> bool {
        self.hom(self.src(f), self.src(g)).iter().any(|&u| self.compose(g, u) == Some(f))
    }

    /// Whether a marker holds as a categorical property of this category.
    pub fn marker_holds(&self, m: &Marker) -> bool {
        if marker_shape(self, m).is_err() {
            return false;
        }
        match m {
            Marker::Identity(f) => self.is_identity(*f),
            Marker::Triangle { f, g, h } => self.compose(*g, *f) == Some(*h),
            Marker::Mono(f) => self.is_mono(*f),
            Marker::Surjective(f) => self.is_effective_epi(*f),
            Marker::Terminal(o) => self.is_terminal(*o),
            Marker::Initial(o) => self.is_initial(*o),
            Marker::Product { f, g } => {
                let d = Diagram { vertices: vec![self.tgt(*f), self.tgt(*g)], edges: Vec::new() };
                self.is_limit_cone(&d, self.src(*f), &[*f, *g])
            }
            Marker::Equalizer { eps, f, g } => {
                let d = Diagram { vertices: vec![self.src(*f), self.tgt(*f)], edges: vec![(*f, 0, 1), (*g, 0, 1)] };
                match self.compose(*f, *eps) {
                    Some(fe) => self.is_limit_cone(&d, self.src(*eps), &[*eps, fe]),
                    None => false,
                }
            }
            Marker::Sup { g, family } => {
                let x = self.tgt(*g);
                self.is_mono(*g)
                    && family.iter().all(|&a| self.factors_through(a, *g))
                    && self
                        .monos_into(x)
                        .all(|n| !family.iter().all(|&a| self.factors_through(a, n)) || self.factors_through(*g, n))
            }
            Marker::Inf { g, family } => {
                let x = self.tgt(*g);
                self.is_mono(*g)
                    && family.iter().all(|&a| self.factors_through(*g, a))
                    && self
                        .monos_into(x)
                        .all(|n| !family.iter().all(|&a| self.factors_through(n, a)) || self.factors_through(n, *g))
            }
        }
    }

    fn monos_into(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_arrows()).filter(move |&n| self.tgt(n) == x && self.is_mono(n))
    }

    pub fn is_terminal(&self, o: usize) -> bool {
        (0..self.n_objects()).all(|x| self.hom(x, o).len() == 1)
    }

    pub fn is_initial(&self, o: usize) -> bool {
        (0..self.n_objects()).all(|x| self.hom(o, x).len() == 1)
    }

    /// The opposite category; arrow and object indices are kept.
    pub fn opposite(&self) -> FinCat {
        let arrows = self.arrows.iter().map(|a| Arrow { name: a.name.clone(), src: a.tgt, tgt: a.src }).collect();
        let n = self.arrows.len();
        let mut table = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if let Some(h) = self.comp[g * n + f] {
                    table.push((f, g, h));
                }
            }
        }
        FinCat::from_parts(self.objects.clone(), arrows, self.identities.clone(), table)
    }

    /// Arrows composable as `(g, f)` with `tgt f = src g`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_arrows())
            .flat_map(move |f| (0..self.n_arrows()).filter(move |&g| self.src(g) == self.tgt(f)).map(move |g| (g, f)))
    }

    pub fn to_json(&self) -> Value {
        let an = |a: usize| self.arrows[a].name.clone();
        let on = |o: usize| self.objects[o].clone();
        let mut table = Vec::new();
        for (g, f) in self.composable_pairs() {
            if let Some(h) = self.compose(g, f) {
                table.push(json!([an(g), an(f), an(h)]));
            }
        }
        let mut markers: BTreeMap<&str, Vec<Value>> = BTreeMap::new();
        for m in &self.markers {
            let v = match m {
                Marker::Identity(f) | Marker::Mono(f) | Marker::Surjective(f) => json!(an(*f)),
                Marker::Terminal(o) | Marker::Initial(o) => json!(on(*o)),
                Marker::Triangle { f, g, h } => json!([an(*f), an(*g), an(*h)]),
                Marker::Product { f, g } => json!([an(*f), an(*g)]),
                Marker::Equalizer { eps, f, g } => json!([an(*eps), an(*f), an(*g)]),
                Marker::Sup { g, family } | Marker::Inf { g, family } => {
                    json!([an(*g), family.iter().map(|&a| an(a)).collect::<Vec<_>>()])
                }
            };
            markers.entry(m.tag()).or_default().push(v);
        }
        json!({
            "objects": self.objects,
            "arrows": self.arrows.iter().map(|a| json!({"name": a.name, "src": on(a.src), "tgt": on(a.tgt)})).collect::<Vec<_>>(),
            "identities": self.objects.iter().enumerate().map(|(i, o)| (o.clone(), json!(an(self.identities[i])))).collect::<serde_json::Map<_, _>>(),
            "composition": table,
            "markers": markers,
        })
    }

    pub fn from_json(v: &Value) -> Result<FinCat, FinCatError> {
        let bad = |m: &str| FinCatError::Json(m.to_string());
        let strs = |v: &Value| -> Result<Vec<String>, FinCatError> {
            v.as_array()
                .ok_or_else(|| bad("expected an array"))?
                .iter()
                .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("expected a string")))
                .collect()
        };
        let objects = strs(&v["objects"])?;
        let obj = |s: &Value| -> Result<usize, FinCatError> {
            let s = s.as_str().ok_or_else(|| bad("expected an object name"))?;
            objects.iter().position(|o| o == s).ok_or_else(|| bad(&format!("unknown object {s}")))
        };
        let mut arrows = Vec::new();
        for a in v["arrows"].as_array().ok_or_else(|| bad("missing arrows"))? {
            let name = a["name"].as_str().ok_or_else(|| bad("arrow without name"))?.to_string();
            arrows.push(Arrow { name, src: obj(&a["src"])?, tgt: obj(&a["tgt"])? });
        }
        let arr = |s: &Value| -> Result<usize, FinCatError> {
            let s = s.as_str().ok_or_else(|| bad("expected an arrow name"))?;
            arrows.iter().position(|a| a.name == s).ok_or_else(|| bad(&format!("unknown arrow {s}")))
        };
        let ids = v["identities"].as_object().ok_or_else(|| bad("missing identities"))?;
        let identities = objects
            .iter()
            .map(|o| arr(ids.get(o).ok_or_else(|| bad(&format!("no identity for {o}")))?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Vec::new();
        for row in v["composition"].as_array().ok_or_else(|| bad("missing composition"))? {
            let r = row.as_array().filter(|r| r.len() == 3).ok_or_else(|| bad("composition rows are [g, f, gf]"))?;
            table.push((arr(&r[0])?, arr(&r[1])?, arr(&r[2])?));
        }
        let mut markers = Vec::new();
        if let Some(ms) = v.get("markers").and_then(Value::as_object) {
            for (tag, items) in ms {
                for it in items.as_array().ok_or_else(|| bad("marker lists are arrays"))? {
                    let list = |n: usize| -> Result<Vec<usize>, FinCatError> {
                        let a =
                            it.as_array().filter(|a| a.len() == n).ok_or_else(|| bad(&format!("bad {tag} marker")))?;
                        a.iter().map(arr).collect()
                    };
                    let family = || -> Result<(usize, Vec<usize>), FinCatError> {
                        let a =
                            it.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(&format!("bad {tag} marker")))?;
                        let fam = a[1].as_array().ok_or_else(|| bad("family must be an array"))?;
                        Ok((arr(&a[0])?, fam.iter().map(arr).collect::<Result<_, _>>()?))
                    };
                    markers.push(match tag.as_str() {
                        "identity" => Marker::Identity(arr(it)?),
                        "mono" => Marker::Mono(arr(it)?),
                        "surjective" => Marker::Surjective(arr(it)?),
                        "terminal" => Marker::Terminal(obj(it)?),
                        "initial" => Marker::Initial(obj(it)?),
                        "triangle" => {
                            let l = list(3)?;
                            Marker::Triangle { f: l[0], g: l[1], h: l[2] }
                        }
                        "product" => {
                            let l = list(2)?;
                            Marker::Product { f: l[0], g: l[1] }
                        }
                        "equalizer" => {
                            let l = list(3)?;
                            Marker::Equalizer { eps: l[0], f: l[1], g: l[2] }
                        }
                        "sup" => {
                            let (g, family) = family()?;
                            Marker::Sup { g, family }
                        }
                        "inf" => {
                            let (g, family) = family()?;
                            Marker::Inf { g, family }
                        }
                        other => return Err(bad(&format!("unknown marker {other}"))),
                    });
                }
            }
        }
        Ok(FinCat::from_parts(objects, arrows, identities, table).with_markers(markers))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph C {\n");
        for o in &self.objects {
            out.push_str(&format!("  \"{o}\";\n"));
        }
        for (i, a) in self.arrows.iter().enumerate() {
            if !self.is_identity(i) {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    self.objects[a.src], self.objects[a.tgt], a.name
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Diagram {
    pub fn opposite(&self) -> Diagram {
        Diagram { vertices: self.vertices.clone(), edges: self.edges.iter().map(|&(a, f, t)| (a, t, f)).collect() }
    }
}

/// Structural problems with a marker.
pub fn marker_shape(c: &FinCat, m: &Marker) -> Result<(), String> {
    let n = c.n_arrows();
    if let Some(a) = m.arrows().into_iter().find(|&a| a >= n) {
        return Err(format!("marker {} references missing arrow {a}", m.tag()));
    }
    let err = |s: &str| Err(format!("{} marker: {s}", m.tag()));
    match m {
        Marker::Identity(f) if c.src(*f) != c.tgt(*f) => err("not an endomorphism"),
        Marker::Triangle { f, g, h } if c.tgt(*f) != c.src(*g) || c.src(*h) != c.src(*f) || c.tgt(*h) != c.tgt(*g) => {
            err("arrows do not form a triangle")
        }
        Marker::Terminal(o) | Marker::Initial(o) if *o >= c.n_objects() => err("missing object"),
        Marker::Product { f, g } if c.src(*f) != c.src(*g) => err("legs have different sources"),
        Marker::Equalizer { eps, f, g }
            if c.src(*f) != c.src(*g) || c.tgt(*f) != c.tgt(*g) || c.tgt(*eps) != c.src(*f) =>
        {
            err("not a fork")
        }
        Marker::Sup { g, family } | Marker::Inf { g, family } if family.iter().any(|&a| c.tgt(a) != c.tgt(*g)) => {
            err("family has different targets")
        }
        _ => Ok(()),
    }
}

/// Empty iff the category laws hold and every marker is well-shaped.
pub fn validate_category(c: &FinCat) -> Vec<String> {
    let mut out = Vec::new();
    let name = |a: usize| c.arrows[a].name.as_str();
    let (no, na) = (c.n_objects(), c.n_arrows());
    for (i, a) in c.arrows.iter().enumerate() {
        if a.src >= no || a.tgt >= no {
            out.push(format!("arrow {} has an unknown endpoint", a.name));
            return out;
        }
        if c.arrows[..i].iter().any(|b| b.name == a.name) {
            out.push(format!("arrow name {} repeated", a.name));
        }
    }
    if c.identities.len() != no {
        out.push("identity map does not cover the objects".into());
        return out;
    }
    for (o, &i) in c.identities.iter().enumerate() {
        if i >= na || c.src(i) != o || c.tgt(i) != o {
            out.push(format!("identity of {} is not an endomorphism of it", c.objects[o]));
            return out;
        }
    }
    for g in 0..na {
        for f in 0..na {
            let composable = c.tgt(f) == c.src(g);
            match (composable, c.compose(g, f)) {
                (true, None) => out.push(format!("missing composite {} ∘ {}", name(g), name(f))),
                (false, Some(_)) => out.push(format!("composite {} ∘ {} of non-composable arrows", name(g), name(f))),
                (true, Some(h)) if h >= na || c.src(h) != c.src(f) || c.tgt(h) != c.tgt(g) => {
                    out.push(format!("composite {} ∘ {} has wrong endpoints", name(g), name(f)))
                }
                _ => {}
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for f in 0..na {
        if c.comp(c.id(c.tgt(f)), f) != f || c.comp(f, c.id(c.src(f))) != f {
            out.push(format!("identity law fails at {}", name(f)));
        }
    }
    for (g, f) in c.composable_pairs() {
        let gf = c.comp(g, f);
        for &h in (0..na).filter(|&h| c.src(h) == c.tgt(g)).collect::<Vec<_>>().iter() {
            if c.comp(c.comp(h, g), f) != c.comp(h, gf) {
                out.push(format!("associativity fails at {} ∘ {} ∘ {}", name(h), name(g), name(f)));
            }
        }
    }
    for m in &c.markers {
        if let Err(e) = marker_shape(c, m) {
            out.push(e);
        }
    }
    out
}
