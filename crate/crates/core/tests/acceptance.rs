//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use cohwb::canon::verify_diagram_property;
use cohwb::chase::{prove_sequent, replay, ProofOutcome, Verdict};
use cohwb::fincat::*;
use cohwb::logic::{parse_context, parse_formula, parse_theory, Formula, Sequent, Signature, Theory};
use cohwb::semantics::{enumerate_models, holds_sequent};
use cohwb::soa::{
    check_rlp, enumerate_lifting_squares, inclusion, probe_equal, probe_models, soa_factorize, RlpOutcome, SoaConfig,
    TheoryMorphism,
};
use cohwb::syncat::{eval_functor, ArrowOutcome, Session, SynArrow, SynObject};
use cohwb::twocat::{
    are_equivalent, check_cone_solution, homotopy_pullback, mediate_into_hopullback, uniqueness_check,
};
use common::{gen, t_trans};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(n: usize, name: &str, limit_secs: Option<f64>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    let out = match (out, limit_secs) {
        (Ok(_), Some(l)) if secs > l => Err(format!("took {secs:.1}s, limit {l}s")),
        (o, _) => o,
    };
    let (tag, detail) = match &out {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {n} {name}: {tag} ({detail}; {secs:.2}s)");
    out.is_ok()
}

// ------------------------------------------------------------------ 1

fn sequent_for(rng: &mut ChaCha8Rng, sig: &Signature) -> Sequent {
    let s = gen::sequent(rng, sig, true);
    match rng.gen_range(0..3) {
        0 => s,
        1 => Sequent::new(s.ctx, s.lhs.clone(), Formula::or(vec![s.lhs, s.rhs])),
        _ => Sequent::new(s.ctx, Formula::and(vec![s.lhs.clone(), s.rhs]), s.lhs),
    }
}

fn prover_soundness() -> Check {
    let (mut theories, mut proved, mut checks) = (0, 0, 0);
    for seed in 0..52u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let sig = gen::small_signature(seed % 2 == 1);
        let thy = gen::theory(&mut rng, &sig, 1 + (seed % 3) as usize, true);
        // enumerated on the first proof only
        let mut models = None;
        theories += 1;
        for _ in 0..8 {
            let s = sequent_for(&mut rng, &sig);
            let out = prove_sequent(&thy, &s, 6).map_err(|e| e.to_string())?;
            if let ProofOutcome::Proved { certificate, .. } = &out {
                proved += 1;
                if models.is_none() {
                    models = Some(enumerate_models(&thy, 3, u128::MAX).map_err(|e| e.to_string())?);
                }
                for m in models.iter().flatten() {
                    checks += 1;
                    ensure(holds_sequent(m, &s), || format!("{s} proved but fails in a model"))?;
                }
                ensure(replay(&thy, &s, certificate).map_err(|e| e.to_string())?, || format!("{s}: replay failed"))?;
            }
        }
    }
    ensure(proved > 0, || "nothing proved".into())?;
    Ok(format!("{theories} theories, {proved} proved sequents, {checks} model checks, 0 violations"))
}

// ------------------------------------------------------------------ 2

/// Every well-shaped marker of the table over `frag`, families of size two
/// for sup and inf.
fn all_markers(frag: &SetFragment) -> Vec<Marker> {
    let c = &frag.cat;
    let (na, no) = (c.n_arrows(), c.n_objects());
    let mut out = Vec::new();
    for a in 0..na {
        out.push(Marker::Identity(a));
        out.push(Marker::Mono(a));
        out.push(Marker::Surjective(a));
    }
    for o in 0..no {
        out.push(Marker::Terminal(o));
        out.push(Marker::Initial(o));
    }
    for f in 0..na {
        for g in 0..na {
            out.push(Marker::Product { f, g });
            for h in 0..na {
                out.push(Marker::Triangle { f, g, h });
                out.push(Marker::Equalizer { eps: h, f, g });
            }
        }
    }
    for g in 0..na {
        for a in 0..na {
            for b in a..na {
                out.push(Marker::Sup { g, family: vec![a, b] });
                out.push(Marker::Inf { g, family: vec![a, b] });
            }
        }
    }
    out.retain(|m| well_shaped(frag, m).is_ok());
    out
}

fn iff_fuzz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut cases, mut holds) = (0usize, 0usize);
    for k in 0..200 {
        let frag = common::fragments::fragment(&mut rng);
        for m in all_markers(&frag) {
            let v = verify_diagram_property(&frag, &m).map_err(|e| format!("fragment {k}, {m:?}: {e}"))?;
            ensure(v.agree && v.semantic == v.sequent, || format!("fragment {k}: verdicts differ on {m:?}"))?;
            cases += 1;
            holds += v.semantic as usize;
        }
    }
    Ok(format!("200 fragments, {cases} markers, {holds} hold, {} fail, all agree", cases - holds))
}

// ------------------------------------------------------------------ 3

fn counterexample_pair() -> Check {
    let j = common::twocat::iso();
    let (pu, pv) = (common::twocat::point_at(&j, 0), common::twocat::point_at(&j, 1));
    let strict = pullback_category_unchecked(&pu, &pv);
    ensure(strict.cat.n_objects() == 0 && strict.cat.n_arrows() == 0, || "strict pullback is not empty".into())?;
    let res = homotopy_pullback(&pu, &pv).map_err(|e| e.to_string())?;
    ensure(are_equivalent(res.apex(), &common::twocat::point()), || "apex is not equivalent to 1".into())?;
    Ok(format!(
        "strict pullback empty, homotopy apex has {} object and {} arrow, equivalent to 1",
        res.apex().n_objects(),
        res.apex().n_arrows()
    ))
}

// ------------------------------------------------------------------ 4

fn mediation() -> Check {
    let mut cones = 0;
    for (f, g) in common::twocat::cospans() {
        ensure(f.tgt.n_objects() <= 4 && f.src.n_objects() <= 4 && g.src.n_objects() <= 4, || {
            "fixture too big".into()
        })?;
        let res = homotopy_pullback(&f, &g).map_err(|e| e.to_string())?;
        for d in common::twocat::sources() {
            for (h1, h2, nu) in common::twocat::cones(&res, &d) {
                let s = mediate_into_hopullback(&res, &h1, &h2, &nu).map_err(|e| e.to_string())?;
                let errs = check_cone_solution(&res, &h1, &h2, &nu, &s);
                ensure(errs.is_empty(), || errs.join("; "))?;
                let c = uniqueness_check(&res, &h1, &h2, &nu, &s, &s).map_err(|e| e.to_string())?;
                ensure(c.candidates == 1 && c.cell.is_identity(), || format!("{} connecting cells", c.candidates))?;
                cones += 1;
            }
        }
    }
    ensure(cones >= 20, || format!("only {cones} cones"))?;
    Ok(format!("{cones} cones, pasting equals nu, exactly one connecting cell each"))
}

// ------------------------------------------------------------------ 5

fn is_iso_functor(f: &Functor) -> bool {
    let bij = |v: &[usize], n: usize| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s == (0..n).collect::<Vec<_>>()
    };
    bij(&f.obj, f.tgt.n_objects()) && bij(&f.arr, f.tgt.n_arrows())
}

fn terminal_object(c: &FinCat) -> Option<usize> {
    (0..c.n_objects()).find(|&t| (0..c.n_objects()).all(|o| c.hom(o, t).len() == 1))
}

fn discrete(n: usize) -> Arc<FinCat> {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Arc::new(FinCat::discrete(&refs))
}

/// A functor between discrete categories given on objects.
fn discrete_map(s: &Arc<FinCat>, t: &Arc<FinCat>, obj: Vec<usize>) -> Functor {
    Functor::new(s.clone(), t.clone(), obj.clone(), obj)
}

fn random_fn(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..m)).collect()
}

fn random_chain(rng: &mut ChaCha8Rng, len: usize) -> CatDiagram {
    let stages: Vec<Arc<FinCat>> = (0..len).map(|i| discrete(rng.gen_range(if i == 0 { 0 } else { 1 }..=3))).collect();
    let steps = stages
        .windows(2)
        .map(|w| discrete_map(&w[0], &w[1], random_fn(rng, w[0].n_objects(), w[1].n_objects())))
        .collect();
    CatDiagram::chain(stages, steps)
}

/// `0 → 1, 0 → 2, 1 → 3, 2 → 3` with discrete stages and a commuting square.
fn random_square(rng: &mut ChaCha8Rng) -> CatDiagram {
    let ix = {
        let mut b = FragmentBuilder::new();
        let o: Vec<usize> = (0..4).map(|i| b.object(&i.to_string(), 1)).collect();
        for (s, t) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            b.arrow(&format!("{s}{t}"), o[s], o[t], vec![0]);
        }
        Arc::new(b.finish(100).unwrap().cat)
    };
    let n0 = rng.gen_range(0..=2);
    let sizes = [n0, rng.gen_range(1..=3), rng.gen_range(n0.max(1)..=3), rng.gen_range(1..=3)];
    let stages: Vec<Arc<FinCat>> = sizes.iter().map(|&n| discrete(n)).collect();
    let f01 = random_fn(rng, sizes[0], sizes[1]);
    let f13 = random_fn(rng, sizes[1], sizes[3]);
    // 0 → 2 injective, 2 → 3 forced on its image
    let mut slots: Vec<usize> = (0..sizes[2]).collect();
    slots.shuffle(rng);
    let f02: Vec<usize> = slots[..sizes[0]].to_vec();
    let mut f23 = random_fn(rng, sizes[2], sizes[3]);
    for (x, &y) in f02.iter().enumerate() {
        f23[y] = f13[f01[x]];
    }
    let f03: Vec<usize> = f01.iter().map(|&y| f13[y]).collect();
    let mut maps = Vec::new();
    for a in 0..ix.n_arrows() {
        let (s, t) = (ix.src(a), ix.tgt(a));
        let obj = match (s, t) {
            _ if s == t => (0..sizes[s]).collect(),
            (0, 1) => f01.clone(),
            (0, 2) => f02.clone(),
            (1, 3) => f13.clone(),
            (2, 3) => f23.clone(),
            (0, 3) => f03.clone(),
            _ => unreachable!(),
        };
        maps.push(discrete_map(&stages[s], &stages[t], obj));
    }
    CatDiagram { index: ix, stages, maps }
}

fn orders_chain(n: usize) -> CatDiagram {
    let stages: Vec<Arc<FinCat>> = (1..=n).map(|k| Arc::new(FinCat::total_order(k))).collect();
    let steps = stages
        .windows(2)
        .map(|w| {
            let arr = w[0].arrows.iter().map(|a| w[1].arrow_index(&a.name).unwrap()).collect();
            Functor::from_arrows(w[0].clone(), w[1].clone(), arr)
        })
        .collect();
    CatDiagram::chain(stages, steps)
}

fn iso_indexed() -> CatDiagram {
    let ix = Arc::new(FinCat::walking_iso());
    let j = common::twocat::iso();
    let sw = common::twocat::swap(&j);
    let maps = vec![Functor::identity(&j), Functor::identity(&j), sw.clone(), sw];
    CatDiagram { index: ix, stages: vec![j.clone(), j], maps }
}

/// Full subcategories of finite sets on sizes `0..=k`, each with markers
/// that hold both in sets and in the stage itself.
fn finset_chain(rng: &mut ChaCha8Rng, top: usize) -> CatDiagram {
    let stages: Vec<Arc<FinCat>> = (1..=top)
        .map(|k| {
            let sizes: Vec<usize> = (0..=k).collect();
            let frag = full_finset(&sizes, 1000).unwrap();
            let ms: Vec<Marker> = common::fragments::markers(rng, &frag, 40)
                .into_iter()
                .filter(|m| well_shaped(&frag, m).is_ok() && concrete_property(&frag, m) && frag.cat.marker_holds(m))
                .collect();
            Arc::new(frag.with_markers(ms).cat)
        })
        .collect();
    let steps = stages
        .windows(2)
        .map(|w| {
            let arr = w[0].arrows.iter().map(|a| w[1].arrow_index(&a.name).unwrap()).collect();
            Functor::from_arrows(w[0].clone(), w[1].clone(), arr)
        })
        .collect();
    CatDiagram::chain(stages, steps)
}

fn arrow_bijection(d: &CatDiagram, col: &Colimit) -> Result<(), String> {
    let sizes: Vec<usize> = d.stages.iter().map(|s| s.n_arrows()).collect();
    let maps: Vec<Vec<usize>> = d.maps.iter().map(|f| f.arr.clone()).collect();
    let (n, classes) = set_colimit(&d.index, &sizes, &maps);
    ensure(n == col.cat.n_arrows(), || format!("{n} arrow classes but {} colimit arrows", col.cat.n_arrows()))?;
    for (i, cls) in classes.iter().enumerate() {
        for (x, &k) in cls.iter().enumerate() {
            for (y, &l) in cls.iter().enumerate() {
                ensure((k == l) == (col.coprojections[i].arr[x] == col.coprojections[i].arr[y]), || {
                    format!("arrow identification differs at stage {i}")
                })?;
            }
        }
    }
    Ok(())
}

fn filtered_colimits() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut diagrams = Vec::new();
    for len in 1..=4 {
        for _ in 0..4 {
            diagrams.push(random_chain(&mut rng, len));
        }
    }
    for _ in 0..4 {
        diagrams.push(random_square(&mut rng));
    }
    diagrams.push(orders_chain(3));
    diagrams.push(orders_chain(4));
    diagrams.push(iso_indexed());
    for (k, d) in diagrams.iter().enumerate() {
        let errs = d.validate();
        ensure(errs.is_empty(), || format!("diagram {k}: {}", errs.join("; ")))?;
        ensure(is_filtered(&d.index), || format!("diagram {k}: index not filtered"))?;
        let t = terminal_object(&d.index).ok_or_else(|| format!("diagram {k}: no terminal index"))?;
        let col = chain_colimit(d).map_err(|e| format!("diagram {k}: {e}"))?;
        ensure(validate_category(&col.cat).is_empty(), || format!("diagram {k}: colimit is not a category"))?;
        ensure(is_iso_functor(&col.coprojections[t]), || format!("diagram {k}: top stage is not the colimit"))?;
    }
    let mut chains = 0;
    for top in 1..=3 {
        let d = finset_chain(&mut rng, top);
        let col = chain_colimit(&d).map_err(|e| e.to_string())?;
        let diags = verify_colimit_coherent(&d, &col, 20);
        ensure(diags.is_empty(), || diags.join("; "))?;
        arrow_bijection(&d, &col)?;
        chains += 1;
    }
    Ok(format!(
        "{} filtered diagrams with terminal index, {chains} truncated fragment chains coherent with arrow bijection",
        diagrams.len()
    ))
}

// ------------------------------------------------------------------ 6

/// Small categories, some marked, each with at most six arrows.
fn factor_fixtures() -> Vec<Arc<FinCat>> {
    let span = {
        let mut b = FragmentBuilder::new();
        let p = b.object("P", 1);
        let a = b.object("A", 1);
        let c = b.object("B", 1);
        let f = b.arrow("p", p, a, vec![0]);
        let g = b.arrow("q", p, c, vec![0]);
        b.markers = vec![Marker::Product { f, g }];
        b.finish(10).unwrap().cat
    };
    let marked_two = FinCat::total_order(2).with_markers(vec![Marker::Terminal(1)]);
    let mono = FinCat::total_order(2).with_markers(vec![Marker::Mono(1)]);
    vec![
        Arc::new(FinCat::terminal()),
        Arc::new(FinCat::discrete(&["a", "b"])),
        Arc::new(FinCat::total_order(2)),
        Arc::new(FinCat::walking_iso()),
        Arc::new(FinCat::total_order(3)),
        Arc::new(marked_two),
        Arc::new(mono),
        Arc::new(span),
    ]
}

fn stage_factorization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let d = finset_chain(&mut rng, 3);
    let col = chain_colimit(&d).map_err(|e| e.to_string())?;
    let (mut functors, mut coherent, mut samples) = (0, 0, 0);
    for c in factor_fixtures() {
        ensure(c.n_arrows() <= 6, || "fixture too big".into())?;
        let carry = |f: &Functor, m: &Marker| m.map(|o| f.obj[o], |a| f.arr[a]);
        let lims = sample_limits(&c, 10);
        for f in enumerate_functors(&c, &col.cat, 1_000_000) {
            functors += 1;
            let (k, g) = factor_through_stage(&f, &d, &col, false).map_err(|e| e.to_string())?;
            ensure(g.then(&col.coprojections[k]) == f, || "factor does not compose back".into())?;
            ensure(validate_functor(&g).is_empty(), || "factor is not a functor".into())?;
            if !c.markers.iter().all(|m| col.cat.marker_holds(&carry(&f, m))) {
                continue;
            }
            let (k, g) = factor_through_stage(&f, &d, &col, true).map_err(|e| e.to_string())?;
            coherent += 1;
            let s = &d.stages[k];
            ensure(g.then(&col.coprojections[k]) == f, || "corrected factor does not compose back".into())?;
            ensure(c.markers.iter().all(|m| s.marker_holds(&carry(&g, m))), || {
                format!("corrected factor at stage {k} loses a marker")
            })?;
            for (dg, apex, legs) in &lims {
                let image = |h: &Functor| {
                    let dd = Diagram {
                        vertices: dg.vertices.iter().map(|&v| h.obj[v]).collect(),
                        edges: dg.edges.iter().map(|&(a, x, y)| (h.arr[a], x, y)).collect(),
                    };
                    (dd, h.obj[*apex], legs.iter().map(|&l| h.arr[l]).collect::<Vec<_>>())
                };
                let (dd, a, ls) = image(&f);
                if col.cat.is_limit_cone(&dd, a, &ls) {
                    samples += 1;
                    let (dd, a, ls) = image(&g);
                    ensure(s.is_limit_cone(&dd, a, &ls), || format!("a preserved limit is lost at stage {k}"))?;
                }
            }
        }
    }
    Ok(format!("{functors} functors factor, {coherent} coherent ones corrected, {samples} sampled limits preserved"))
}

// ------------------------------------------------------------------ 7

fn small_funs() -> Theory {
    parse_theory(
        "sort s.
         fun f : s -> s.
         fun g : s -> s.
         rel P : s.
         axiom [x:s] P(x) => P(f(x)).",
    )
    .unwrap()
}

fn two_sorted() -> Theory {
    parse_theory(
        "sort a. sort b.
         fun k : a -> b.
         rel Q : b.
         axiom [x:a] true => Q(k(x)).",
    )
    .unwrap()
}

fn syn_arrow(s: &mut Session, theta: &str, src: &str, tgt: &str) -> Result<SynArrow, String> {
    let sig = s.thy.signature.clone();
    let (sc, sf) = parse_context(&sig, src).map_err(|e| e.to_string())?;
    let (tc, tf) = parse_context(&sig, tgt).map_err(|e| e.to_string())?;
    let th = parse_formula(&sig, &sc.concat(&tc), theta).map_err(|e| e.to_string())?;
    match s.arrow(&th, (&sc, &sf), (&tc, &tf)).map_err(|e| e.to_string())? {
        ArrowOutcome::Yes(a) => Ok(a),
        o => Err(format!("{theta}: {src} -> {tgt} not certified ({:?})", o.verdict())),
    }
}

fn certified(o: ArrowOutcome, what: &str) -> Result<SynArrow, String> {
    match o {
        ArrowOutcome::Yes(a) => Ok(a),
        o => Err(format!("{what} not certified ({:?})", o.verdict())),
    }
}

type ArrowSpec = (&'static str, &'static str, &'static str);

fn syncat_fixtures() -> Vec<(Theory, Vec<ArrowSpec>)> {
    let o = "[x:s] true";
    let ot = "[y:s] true";
    let p = "[x:s] P(x)";
    let pt = "[y:s] P(y)";
    let o2 = "[x1:s, x2:s] true";
    let o2t = "[y1:s, y2:s] true";
    let funs = vec![
        ("y = f(x)", o, ot),
        ("y = g(x)", o, ot),
        ("y = f(f(x))", o, ot),
        ("y = g(f(x))", o, ot),
        ("y = f(g(x))", o, ot),
        ("y = g(g(x))", o, ot),
        ("P(x) & y = f(x)", p, pt),
        ("P(x) & y = f(f(x))", p, pt),
        ("P(x) & y = x", p, ot),
        ("P(x) & y = g(x)", p, ot),
        ("y = x1", o2, ot),
        ("y = x2", o2, ot),
        ("y = f(x1)", o2, ot),
        ("y1 = x & y2 = x", o, o2t),
        ("y1 = x & y2 = f(x)", o, o2t),
        ("y1 = x2 & y2 = x1", o2, o2t),
    ];
    let rel = "[x1:s, x2:s] R(x1,x2)";
    let relt = "[y1:s, y2:s] R(y1,y2)";
    let trans = vec![
        ("y = x", "[x:s] true", "[y:s] R(y,y)"),
        ("R(x,x) & y = x", "[x:s] R(x,x)", "[y:s] true"),
        ("R(x1,x2) & y = x1", rel, "[y:s] true"),
        ("R(x1,x2) & y = x2", rel, "[y:s] true"),
        ("y1 = x & y2 = x", "[x:s] true", relt),
        ("R(x1,x2) & R(x2,x3) & y1 = x1 & y2 = x3", "[x1:s, x2:s, x3:s] R(x1,x2) & R(x2,x3)", relt),
        ("R(x1,x2) & y1 = x1 & y2 = x1", rel, relt),
        ("R(x1,x2) & y1 = x2 & y2 = x2", rel, relt),
    ];
    let two = vec![
        ("y = k(x)", "[x:a] true", "[y:b] true"),
        ("y = k(x)", "[x:a] true", "[y:b] Q(y)"),
        ("Q(x) & y = x", "[x:b] Q(x)", "[y:b] true"),
        ("y = x1", "[x1:a, x2:a] true", "[y:a] true"),
        ("y = x2", "[x1:a, x2:a] true", "[y:a] true"),
        ("y = k(x2)", "[x1:a, x2:a] true", "[y:b] true"),
        ("y1 = x & y2 = x", "[x:a] true", "[y1:a, y2:a] true"),
        ("y1 = x2 & y2 = x1", "[x1:a, x2:a] true", "[y1:a, y2:a] true"),
    ];
    vec![(small_funs(), funs), (t_trans(), trans), (two_sorted(), two)]
}

fn syncat_laws() -> Check {
    let (mut arrows, mut units, mut assoc, mut models_seen, mut evals) = (0, 0, 0, 0, 0);
    for (thy, specs) in syncat_fixtures() {
        let mut s = Session::new(thy.clone());
        let mut base: Vec<SynArrow> = Vec::new();
        for (theta, src, tgt) in specs {
            base.push(syn_arrow(&mut s, theta, src, tgt)?);
        }
        let objects: Vec<SynObject> = {
            let mut v: Vec<SynObject> = Vec::new();
            for a in &base {
                for o in [&a.src, &a.tgt] {
                    if !v.contains(o) {
                        v.push(o.clone());
                    }
                }
            }
            v
        };
        let mut ids = Vec::new();
        for o in &objects {
            ids.push(certified(s.identity(o).map_err(|e| e.to_string())?, "identity")?);
        }
        let id_of = |o: &SynObject| ids[objects.iter().position(|x| x == o).unwrap()].clone();
        arrows += base.len() + ids.len();
        for a in &base {
            let l = certified(s.compose(&id_of(&a.src), a).map_err(|e| e.to_string())?, "id then a")?;
            let r = certified(s.compose(a, &id_of(&a.tgt)).map_err(|e| e.to_string())?, "a then id")?;
            for c in [&l, &r] {
                ensure(s.eq(c, a).map_err(|e| e.to_string())? == Verdict::Yes, || "unit law not proved".into())?;
                units += 1;
            }
        }
        // composites of composable pairs, kept for the eval check
        let mut pairs: Vec<(usize, usize, SynArrow)> = Vec::new();
        for (i, a) in base.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                if a.tgt == b.src {
                    pairs.push((i, j, certified(s.compose(a, b).map_err(|e| e.to_string())?, "composite")?));
                }
            }
        }
        for (i, j, ab) in &pairs {
            for (k, c) in base.iter().enumerate() {
                if base[*j].tgt != c.src || assoc >= 400 {
                    continue;
                }
                let left = certified(s.compose(ab, c).map_err(|e| e.to_string())?, "(ab)c")?;
                let bc = pairs.iter().find(|(x, y, _)| x == j && *y == k).map(|p| p.2.clone()).unwrap();
                let right = certified(s.compose(&base[*i], &bc).map_err(|e| e.to_string())?, "a(bc)")?;
                ensure(s.eq(&left, &right).map_err(|e| e.to_string())? == Verdict::Yes, || {
                    format!("associativity not proved for arrows {i}, {j}, {k}")
                })?;
                assoc += 1;
            }
        }
        let models = enumerate_models(&thy, 3, u128::MAX).map_err(|e| e.to_string())?;
        for m in &models {
            let e = eval_functor(&thy, m).map_err(|e| e.to_string())?;
            let vals: Vec<Vec<usize>> =
                base.iter().map(|a| e.arrow(a).map(|x| x.map)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            for id in &ids {
                let v = e.arrow(id).map_err(|e| e.to_string())?;
                ensure(v.map == (0..v.src.len()).collect::<Vec<_>>(), || "identity does not evaluate to 1".into())?;
                evals += 1;
            }
            for (i, j, ab) in &pairs {
                let v = e.arrow(ab).map_err(|e| e.to_string())?.map;
                let composed: Vec<usize> = vals[*i].iter().map(|&x| vals[*j][x]).collect();
                ensure(v == composed, || format!("eval not functorial on arrows {i}, {j}"))?;
                evals += 1;
            }
        }
        models_seen += models.len();
    }
    ensure(arrows >= 30, || format!("only {arrows} certified arrows"))?;
    Ok(format!(
        "{arrows} certified arrows over 3 theories, {units} unit and {assoc} associativity checks Yes, \
         {evals} functoriality checks over {models_seen} models"
    ))
}

// ------------------------------------------------------------------ 8

fn soa_fixtures() -> Vec<(TheoryMorphism, Vec<TheoryMorphism>)> {
    let th = |s: &str| parse_theory(s).unwrap();
    let empty = Theory::default();
    let one = th("sort u.");
    let refl = th("sort u. rel R : u * u. axiom [x:u] true => R(x,x).");
    let pred = th("sort u. rel P : u.");
    vec![
        (inclusion(&empty, &t_trans()).unwrap(), vec![inclusion(&empty, &one).unwrap()]),
        (inclusion(&th("sort s."), &t_trans()).unwrap(), vec![inclusion(&one, &refl).unwrap()]),
        (TheoryMorphism::identity(&t_trans()), vec![inclusion(&one, &refl).unwrap(), inclusion(&one, &pred).unwrap()]),
    ]
}

fn soa_contract() -> Check {
    let cfg = SoaConfig { stages: 3, ..SoaConfig::default() };
    let (mut squares, mut probes) = (0, 0);
    for (n, (f, i)) in soa_fixtures().iter().enumerate() {
        let r = soa_factorize(f, i, &cfg).map_err(|e| format!("pair {n}: {e}"))?;
        let errs = r.log.check(i);
        ensure(errs.is_empty(), || format!("pair {n}: {}", errs.join("; ")))?;
        let set = enumerate_lifting_squares(i, &r.fsecond, &cfg).map_err(|e| e.to_string())?;
        ensure(set.unknown == 0 && !set.truncated, || format!("pair {n}: square enumeration incomplete"))?;
        for sq in &set.squares {
            match check_rlp(&i[sq.g], &r.fsecond, sq, &cfg).map_err(|e| e.to_string())? {
                RlpOutcome::Lift(l) if l.pasting => squares += 1,
                other => return Err(format!("pair {n}: square without a lift: {other:?}")),
            }
        }
        let ys = probe_models(&f.tgt, 3);
        let composite = r.fprime.then(&r.fsecond).map_err(|e| e.to_string())?;
        ensure(probe_equal(&composite, f, &ys), || format!("pair {n}: restriction differs on a probe"))?;
        ensure(r.composite_agrees, || format!("pair {n}: factorization reports disagreement"))?;
        probes += ys.len();
    }
    Ok(format!("3 pairs at 3 stages, I-cell logs check, {squares} squares lift, {probes} probe models agree"))
}

// ------------------------------------------------------------------ 9

fn closure_seeds() -> Vec<(&'static str, SetFragment)> {
    let mut out = vec![("empty", FragmentBuilder::new().finish(10).unwrap())];
    let mut b = FragmentBuilder::new();
    b.object("1", 1);
    out.push(("singleton", b.finish(10).unwrap()));
    let mut b = FragmentBuilder::new();
    let a = b.object("A", 2);
    let t = b.object("B", 1);
    b.arrow("f", a, t, vec![0, 0]);
    out.push(("collapse", b.finish(10).unwrap()));
    let mut b = FragmentBuilder::new();
    let z = b.object("0", 0);
    let o = b.object("1", 1);
    b.arrow("z", z, o, vec![]);
    out.push(("zero", b.finish(10).unwrap()));
    let mut b = FragmentBuilder::new();
    let a = b.object("A", 2);
    b.arrow("sw", a, a, vec![1, 0]);
    out.push(("swap", b.finish(10).unwrap()));
    let mut b = FragmentBuilder::new();
    let a = b.object("A", 2);
    let c = b.object("C", 1);
    b.arrow("i", c, a, vec![1]);
    out.push(("point", b.finish(10).unwrap()));
    out
}

/// A limit cone over `d` with apex of the right size, found by trying
/// every family of legs.
fn has_limit(frag: &SetFragment, d: &Diagram) -> bool {
    let c = &frag.cat;
    let n = finset_limit(frag, d).tuples.len();
    (0..c.n_objects()).filter(|&x| frag.size(x) == n).any(|x| {
        let cands: Vec<&[usize]> = d.vertices.iter().map(|&v| c.hom(x, v)).collect();
        let mut idx = vec![0; cands.len()];
        if cands.iter().any(|h| h.is_empty()) {
            return false;
        }
        loop {
            let legs: Vec<&[usize]> = idx.iter().zip(&cands).map(|(&i, h)| frag.funcs[h[i]].as_slice()).collect();
            if is_concrete_limit(frag, d, n, &legs) {
                return true;
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < cands[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                return false;
            }
        }
    })
}

fn has_image(frag: &SetFragment, f: usize) -> bool {
    let c = &frag.cat;
    let img = image(&frag.funcs[f]);
    (0..c.n_arrows()).any(|m| {
        c.tgt(m) == c.tgt(f)
            && is_injective(&frag.funcs[m])
            && image(&frag.funcs[m]) == img
            && c.hom(c.src(f), c.src(m)).iter().any(|&e| c.compose(m, e) == Some(f))
    })
}

fn has_union(frag: &SetFragment, m1: usize, m2: usize) -> bool {
    let c = &frag.cat;
    let u: BTreeSet<usize> = image(&frag.funcs[m1]).union(&image(&frag.funcs[m2])).copied().collect();
    (0..c.n_arrows()).any(|g| {
        c.tgt(g) == c.tgt(m1)
            && is_injective(&frag.funcs[g])
            && image(&frag.funcs[g]) == u
            && [m1, m2].iter().all(|&m| c.hom(c.src(m), c.src(g)).iter().any(|&k| c.compose(g, k) == Some(m)))
    })
}

enum Op {
    Limit(Diagram),
    Image(usize),
    Union(usize, usize),
}

fn operations(frag: &SetFragment) -> Vec<Op> {
    let c = &frag.cat;
    let mut out = vec![Op::Limit(Diagram::default())];
    let n = c.n_objects();
    for a in 0..n {
        for b in 0..n {
            out.push(Op::Limit(Diagram { vertices: vec![a, b], edges: Vec::new() }));
        }
    }
    for f in 0..c.n_arrows() {
        out.push(Op::Image(f));
        for g in 0..c.n_arrows() {
            if c.src(f) == c.src(g) && c.tgt(f) == c.tgt(g) {
                out.push(Op::Limit(Diagram { vertices: vec![c.src(f), c.tgt(f)], edges: vec![(f, 0, 1), (g, 0, 1)] }));
            }
            if c.tgt(f) == c.tgt(g) {
                out.push(Op::Limit(Diagram {
                    vertices: vec![c.src(f), c.src(g), c.tgt(f)],
                    edges: vec![(f, 0, 2), (g, 1, 2)],
                }));
                if is_injective(&frag.funcs[f]) && is_injective(&frag.funcs[g]) {
                    out.push(Op::Union(f, g));
                }
            }
        }
    }
    out
}

fn closure_bound() -> Check {
    let cfg = ClosureConfig { rounds: 8, max_carrier: 4, max_arrows: 4000 };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut sampled, mut beyond) = (0, 0);
    let mut summary = Vec::new();
    for (name, seed) in closure_seeds() {
        let cl = coherent_closure(&seed, &cfg).map_err(|e| format!("{name}: {e}"))?;
        ensure(cl.fixed_point, || format!("{name}: no fixed point in {} rounds", cfg.rounds))?;
        let mut prev = seed.cat.n_objects();
        for r in &cl.log {
            ensure(r.objects >= prev && r.objects - prev <= cfg.max_carrier + 1, || {
                format!("{name}: round {} grows from {prev} to {} objects", r.round, r.objects)
            })?;
            prev = r.objects;
        }
        let fr = &cl.fragment;
        ensure(validate_fragment(fr).is_empty(), || format!("{name}: closure is not a fragment"))?;
        for o in 0..seed.cat.n_objects() {
            ensure(fr.carriers[o] == seed.carriers[o] && fr.cat.objects[o] == seed.cat.objects[o], || {
                format!("{name}: seed object {o} changed")
            })?;
        }
        for a in 0..seed.cat.n_arrows() {
            let (s, t) = (seed.cat.src(a), seed.cat.tgt(a));
            ensure(fr.find_arrow(s, t, &seed.funcs[a]).is_some(), || format!("{name}: seed arrow {a} missing"))?;
        }
        let mut ops = operations(fr);
        ops.shuffle(&mut rng);
        for op in ops.iter().take(300) {
            let ok = match op {
                Op::Limit(d) => {
                    if finset_limit(fr, d).tuples.len() > cfg.max_carrier {
                        beyond += 1;
                        continue;
                    }
                    has_limit(fr, d)
                }
                Op::Image(f) => has_image(fr, *f),
                Op::Union(a, b) => has_union(fr, *a, *b),
            };
            ensure(ok, || format!("{name}: closure misses a sampled construction"))?;
            sampled += 1;
        }
        summary.push(format!("{name} {}r/{}o", cl.log.len(), fr.cat.n_objects()));
    }
    Ok(format!(
        "{}; {sampled} sampled constructions present, {beyond} limits above the carrier cap skipped",
        summary.join(", ")
    ))
}

fn main() {
    let results = [
        run(1, "prover soundness", Some(120.0), prover_soundness),
        run(2, "table iff fuzz", Some(120.0), iff_fuzz),
        run(3, "counterexample pair", Some(1.0), counterexample_pair),
        run(4, "homotopy pullback universal property", Some(60.0), mediation),
        run(5, "filtered colimit laws", Some(60.0), filtered_colimits),
        run(6, "stage factorization", None, stage_factorization),
        run(7, "syntactic category laws", None, syncat_laws),
        run(8, "small object argument contract", Some(180.0), soa_contract),
        run(9, "coherent closure bound", None, closure_bound),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
