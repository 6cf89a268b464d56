#![allow(dead_code)]

use std::collections::BTreeMap;

use cohwb::logic::{parse_theory, Formula, Term, Theory};
use cohwb::semantics::FinStructure;

pub fn t_trans() -> Theory {
    parse_theory(
        "sort s.
         rel R : s * s.
         axiom [x:s] true => R(x,x).
         axiom [x:s, y:s, z:s] R(x,y) & R(y,z) => R(x,z).",
    )
    .unwrap()
}

pub fn structure(json: &str, thy: &Theory) -> FinStructure {
    FinStructure::from_json(&thy.signature, &serde_json::from_str(json).unwrap()).unwrap()
}

fn term_value(m: &FinStructure, env: &BTreeMap<String, usize>, t: &Term) -> usize {
    match t {
        Term::Var(v) => env[v],
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term_value(m, env, a)).collect();
            m.functions[f].apply(&vals)
        }
    }
}

/// Textbook satisfaction relation, independent of the set-algebra evaluator.
pub fn tarski(m: &FinStructure, env: &BTreeMap<String, usize>, phi: &Formula) -> bool {
    match phi {
        Formula::Eq(a, b) => term_value(m, env, a) == term_value(m, env, b),
        Formula::Rel(r, ts) => {
            let vals: Vec<usize> = ts.iter().map(|t| term_value(m, env, t)).collect();
            m.relations.get(r).is_some_and(|set| set.contains(&vals))
        }
        Formula::And(ps) => ps.iter().all(|p| tarski(m, env, p)),
        Formula::Or(ps) => ps.iter().any(|p| tarski(m, env, p)),
        Formula::Not(b) => !tarski(m, env, b),
        Formula::Implies(a, b) => !tarski(m, env, a) || tarski(m, env, b),
        Formula::Exists(v, s, b) => (0..m.size(s)).any(|i| {
            let mut e = env.clone();
            e.insert(v.clone(), i);
            tarski(m, &e, b)
        }),
        Formula::Forall(v, s, b) => (0..m.size(s)).all(|i| {
            let mut e = env.clone();
            e.insert(v.clone(), i);
            tarski(m, &e, b)
        }),
    }
}

pub mod gen {
    use cohwb::logic::{Context, Formula, Sequent, Signature, Term, Theory};
    use rand::Rng;

    pub fn small_signature(with_fun: bool) -> Signature {
        let sig = Signature::new().with_sort("s").with_relation("A", &["s"]).with_relation("R", &["s", "s"]);
        if with_fun {
            sig.with_function("f", &["s"], "s")
        } else {
            sig
        }
    }

    const NAMES: &[&str] = &["x", "y", "z", "u"];

    pub fn term<R: Rng>(rng: &mut R, sig: &Signature, scope: &[String], depth: usize) -> Term {
        let v = Term::Var(scope[rng.gen_range(0..scope.len())].clone());
        if depth > 0 && sig.functions.contains_key("f") && rng.gen_bool(0.25) {
            Term::app("f", vec![term(rng, sig, scope, depth - 1)])
        } else {
            v
        }
    }

    /// Random formula over the single-sorted test signatures. Quantifiers are
    /// only generated when `scope` may be extended; `coherent` restricts the
    /// connectives.
    pub fn formula<R: Rng>(rng: &mut R, sig: &Signature, scope: &[String], depth: usize, coherent: bool) -> Formula {
        let atom = |rng: &mut R| -> Formula {
            if scope.is_empty() {
                return if rng.gen_bool(0.5) { Formula::top() } else { Formula::bottom() };
            }
            match rng.gen_range(0..4) {
                0 => Formula::eq(term(rng, sig, scope, 1), term(rng, sig, scope, 1)),
                1 => Formula::rel("A", vec![term(rng, sig, scope, 1)]),
                _ => Formula::rel("R", vec![term(rng, sig, scope, 1), term(rng, sig, scope, 1)]),
            }
        };
        if depth == 0 {
            return atom(rng);
        }
        let kinds = if coherent { 5 } else { 8 };
        match rng.gen_range(0..kinds) {
            0 | 1 => atom(rng),
            2 => {
                let n = rng.gen_range(0..3);
                Formula::And((0..n).map(|_| formula(rng, sig, scope, depth - 1, coherent)).collect())
            }
            3 => {
                let n = rng.gen_range(0..3);
                Formula::Or((0..n).map(|_| formula(rng, sig, scope, depth - 1, coherent)).collect())
            }
            4 | 7 => {
                let v = NAMES[rng.gen_range(0..NAMES.len())].to_string();
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                let body = formula(rng, sig, &inner, depth - 1, coherent);
                if coherent || rng.gen_bool(0.5) {
                    Formula::exists(v, "s", body)
                } else {
                    Formula::forall(v, "s", body)
                }
            }
            5 => Formula::not(formula(rng, sig, scope, depth - 1, coherent)),
            _ => Formula::implies(
                formula(rng, sig, scope, depth - 1, coherent),
                formula(rng, sig, scope, depth - 1, coherent),
            ),
        }
    }

    pub fn context(n: usize) -> Context {
        Context(NAMES[..n].iter().map(|v| (v.to_string(), "s".to_string())).collect())
    }

    pub fn sequent<R: Rng>(rng: &mut R, sig: &Signature, coherent: bool) -> Sequent {
        let ctx = context(rng.gen_range(0..3));
        let scope: Vec<String> = ctx.vars().map(str::to_string).collect();
        let lhs = formula(rng, sig, &scope, 2, coherent);
        let rhs = formula(rng, sig, &scope, 2, coherent);
        Sequent::new(ctx, lhs, rhs)
    }

    pub fn theory<R: Rng>(rng: &mut R, sig: &Signature, axioms: usize, coherent: bool) -> Theory {
        let mut t = Theory::new(sig.clone());
        for _ in 0..axioms {
            t.axioms.push(sequent(rng, sig, coherent));
        }
        t
    }
}

pub mod fragments {
    use cohwb::fincat::{is_injective, FragmentBuilder, Marker, SetFragment};
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn random_fn<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
        (0..n).map(|_| rng.gen_range(0..m)).collect()
    }

    /// A random fragment with carriers of size ≤ 3. Besides random arrows it
    /// sometimes contains a genuine equalizer, union or product so that
    /// markers hold as often as they fail.
    pub fn fragment<R: Rng>(rng: &mut R) -> SetFragment {
        let mut b = FragmentBuilder::new();
        let n = rng.gen_range(1..=3);
        for i in 0..n {
            b.object(&format!("X{i}"), rng.gen_range(0..=3));
        }
        for k in 0..rng.gen_range(1..=3) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if b.size(t) == 0 && b.size(s) > 0 {
                continue;
            }
            let f = random_fn(rng, b.size(s), b.size(t));
            b.arrow(&format!("r{k}"), s, t, f);
        }
        // an equalizer of two maps A → B
        if rng.gen_bool(0.5) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if b.size(t) > 0 || b.size(s) == 0 {
                let (f, g) = (random_fn(rng, b.size(s), b.size(t)), random_fn(rng, b.size(s), b.size(t)));
                let eq: Vec<usize> = (0..b.size(s)).filter(|&x| f[x] == g[x]).collect();
                b.arrow("p", s, t, f);
                b.arrow("q", s, t, g);
                let e = b.object("E", eq.len());
                b.arrow("eps", e, s, eq);
            }
        }
        // a union of two subsets of one object
        if rng.gen_bool(0.5) {
            let x = rng.gen_range(0..n);
            let sx = b.size(x);
            let sub = |rng: &mut R| -> Vec<usize> { (0..sx).filter(|_| rng.gen_bool(0.5)).collect() };
            let (a1, a2) = (sub(rng), sub(rng));
            let u: Vec<usize> = (0..sx).filter(|y| a1.contains(y) || a2.contains(y)).collect();
            let o1 = b.object("A1", a1.len());
            let o2 = b.object("A2", a2.len());
            let ou = b.object("U", u.len());
            b.arrow("m1", o1, x, a1);
            b.arrow("m2", o2, x, a2);
            b.arrow("g", ou, x, u);
        }
        // a product small enough to stay within size 3
        if rng.gen_bool(0.5) {
            let (s1, s2) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
            if s1 * s2 <= 3 {
                let a = b.object("P1", s1);
                let c = b.object("P2", s2);
                let p = b.object("P", s1 * s2);
                b.arrow("pi1", p, a, (0..s1 * s2).map(|i| i / s2).collect());
                b.arrow("pi2", p, c, (0..s1 * s2).map(|i| i % s2).collect());
            }
        }
        b.finish(400).unwrap()
    }

    /// Random markers of every kind over `frag`, not necessarily well-shaped.
    pub fn markers<R: Rng>(rng: &mut R, frag: &SetFragment, count: usize) -> Vec<Marker> {
        let c = &frag.cat;
        let na = c.n_arrows();
        let no = c.n_objects();
        let arrow = |rng: &mut R| rng.gen_range(0..na);
        // prefer arrows that fit the shape: pick among matching ones
        let pick = |rng: &mut R, pred: &dyn Fn(usize) -> bool| -> Option<usize> {
            let cands: Vec<usize> = (0..na).filter(|&a| pred(a)).collect();
            cands.choose(rng).copied()
        };
        let mut out = Vec::new();
        while out.len() < count {
            let m = match rng.gen_range(0..10) {
                0 => Some(Marker::Identity(arrow(rng)))
                    .filter(|m| matches!(m, Marker::Identity(a) if c.src(*a) == c.tgt(*a))),
                1 => {
                    let f = arrow(rng);
                    pick(rng, &|g| c.src(g) == c.tgt(f)).and_then(|g| {
                        let h = if rng.gen_bool(0.5) {
                            Some(c.comp(g, f))
                        } else {
                            pick(rng, &|h| c.src(h) == c.src(f) && c.tgt(h) == c.tgt(g))
                        };
                        h.map(|h| Marker::Triangle { f, g, h })
                    })
                }
                2 => Some(Marker::Mono(arrow(rng))),
                3 => Some(Marker::Surjective(arrow(rng))),
                4 => Some(Marker::Terminal(rng.gen_range(0..no))),
                5 => Some(Marker::Initial(rng.gen_range(0..no))),
                6 => {
                    let f = arrow(rng);
                    pick(rng, &|g| c.src(g) == c.src(f)).map(|g| Marker::Product { f, g })
                }
                7 => {
                    let f = arrow(rng);
                    let g = pick(rng, &|g| c.src(g) == c.src(f) && c.tgt(g) == c.tgt(f));
                    let eps = pick(rng, &|e| c.tgt(e) == c.src(f) && is_injective(&frag.funcs[e]));
                    g.zip(eps).map(|(g, eps)| Marker::Equalizer { eps, f, g })
                }
                k => {
                    let g = pick(rng, &|g| is_injective(&frag.funcs[g]));
                    g.and_then(|g| {
                        let x = c.tgt(g);
                        let fam: Vec<usize> = (0..2)
                            .filter_map(|_| pick(rng, &|a| c.tgt(a) == x && is_injective(&frag.funcs[a])))
                            .collect();
                        (fam.len() == 2).then(|| {
                            if k == 8 {
                                Marker::Sup { g, family: fam }
                            } else {
                                Marker::Inf { g, family: fam }
                            }
                        })
                    })
                }
            };
            if let Some(m) = m {
                out.push(m);
            }
        }
        out
    }
}

pub mod twocat {
    use std::sync::Arc;

    use cohwb::fincat::{enumerate_functors, enumerate_natural_isos, FinCat, Functor, TwoCell};
    use cohwb::twocat::{ConeSolution, HoPullbackResult};

    pub fn iso() -> Arc<FinCat> {
        Arc::new(FinCat::walking_iso())
    }

    pub fn point() -> Arc<FinCat> {
        Arc::new(FinCat::terminal())
    }

    /// The inclusion of the terminal category at `u` (0) or `v` (1).
    pub fn point_at(j: &Arc<FinCat>, o: usize) -> Functor {
        Functor::constant(point(), j.clone(), o)
    }

    /// The automorphism of the walking iso exchanging `u` and `v`.
    pub fn swap(j: &Arc<FinCat>) -> Functor {
        Functor::new(j.clone(), j.clone(), vec![1, 0], vec![1, 0, 3, 2])
    }

    /// Cospans `f: B → A ← C: g*` with at most four objects in each category.
    pub fn cospans() -> Vec<(Functor, Functor)> {
        let j = iso();
        let two = Arc::new(FinCat::total_order(2));
        let to_j = Functor::new(two.clone(), j.clone(), vec![0, 1], vec![0, 2, 1]);
        vec![
            (point_at(&j, 0), point_at(&j, 1)),
            (Functor::identity(&j), Functor::identity(&j)),
            (swap(&j), point_at(&j, 0)),
            (to_j, point_at(&j, 1)),
            (Functor::identity(&two), Functor::new(point(), two.clone(), vec![1], vec![2])),
        ]
    }

    pub fn sources() -> Vec<Arc<FinCat>> {
        vec![point(), iso(), Arc::new(FinCat::total_order(2))]
    }

    /// Every cone `(h1, h2, nu)` over the cospan with vertex `d`.
    pub fn cones(res: &HoPullbackResult, d: &Arc<FinCat>) -> Vec<(Functor, Functor, TwoCell)> {
        let mut out = Vec::new();
        for h1 in enumerate_functors(d, &res.f.src, 1000) {
            for h2 in enumerate_functors(d, &res.gstar.src, 1000) {
                for nu in enumerate_natural_isos(&h1.then(&res.f), &h2.then(&res.gstar), 1000) {
                    out.push((h1.clone(), h2.clone(), nu));
                }
            }
        }
        out
    }

    /// The solution obtained by moving `s` along `theta: s.r ⇒ r2`.
    pub fn transport(res: &HoPullbackResult, s: &ConeSolution, theta: &TwoCell) -> ConeSolution {
        let back = theta.inverse().unwrap();
        ConeSolution {
            r: theta.to.clone(),
            alpha1: back.whisker_right(&res.gprime).then(&s.alpha1),
            alpha2: back.whisker_right(&res.fstar).then(&s.alpha2),
        }
    }
}
