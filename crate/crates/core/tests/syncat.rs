mod common;

use cohwb::chase::Verdict;
use cohwb::logic::{parse_context, parse_formula, parse_theory, Context, Formula, Term, Theory};
use cohwb::semantics::{enumerate_models, FinStructure};
use cohwb::syncat::{eval_functor, ArrowOutcome, Session, SynArrow, SynError, SynObject};
use common::t_trans;

fn funs() -> Theory {
    parse_theory(
        "sort s. sort t.
         fun f : s -> s.
         fun g : s -> s.
         fun h : s -> t.
         rel P : s.
         axiom [x:s] P(x) => P(f(x)).",
    )
    .unwrap()
}

fn obj(s: &mut Session, src: &str) -> SynObject {
    let (ctx, phi) = parse_context(&s.thy.signature, src).unwrap();
    s.object(&ctx, &phi).unwrap()
}

/// Arrow from `src` to `tgt` with graph `theta` written over both contexts.
fn arrow(s: &mut Session, theta: &str, src: &str, tgt: &str) -> ArrowOutcome {
    let sig = s.thy.signature.clone();
    let (sc, sf) = parse_context(&sig, src).unwrap();
    let (tc, tf) = parse_context(&sig, tgt).unwrap();
    let th = parse_formula(&sig, &sc.concat(&tc), theta).unwrap();
    s.arrow(&th, (&sc, &sf), (&tc, &tf)).unwrap()
}

fn yes(o: ArrowOutcome) -> SynArrow {
    match o {
        ArrowOutcome::Yes(a) => a,
        other => panic!("expected a certified arrow, got {:?}", other.verdict()),
    }
}

#[test]
fn alpha_equivalent_objects_are_shared() {
    let mut s = Session::new(t_trans());
    let a = obj(&mut s, "[x:s] R(x,x)");
    let b = obj(&mut s, "[y:s] R(y,y)");
    assert_eq!(a, b);
    assert_eq!(s.object_count(), 1);
    let c = obj(&mut s, "[x:s, y:s] R(x,x)");
    assert_ne!(a, c);
    let whole = obj(&mut s, "[x:s] true");
    assert!(whole.formula().is_top());
    assert_eq!(s.object_count(), 3);
}

#[test]
fn object_rejects_non_coherent() {
    let mut s = Session::new(t_trans());
    let ctx = Context::from_pairs(&[("x", "s")]);
    let phi = Formula::forall("y", "s", Formula::rel("R", vec![Term::var("x"), Term::var("y")]));
    assert_eq!(s.object(&ctx, &phi), Err(SynError::NotCoherent));
}

#[test]
fn identity_on_whole_sort_is_bare_equation() {
    let mut s = Session::new(t_trans());
    let o = obj(&mut s, "[x:s] true");
    let id = yes(s.identity(&o).unwrap());
    assert_eq!(id.theta, Formula::eq(Term::var("y0"), Term::var("x0")));
}

#[test]
fn identity_certified_at_small_bound() {
    let mut s = Session::with_bound(t_trans(), 2);
    let o = obj(&mut s, "[x:s] R(x,x)");
    let id = yes(s.identity(&o).unwrap());
    assert!(s.replay(&id).unwrap());
}

#[test]
fn graph_of_function_symbol_is_an_arrow() {
    let mut s = Session::new(funs());
    let f = yes(arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true"));
    assert!(s.replay(&f).unwrap());
    let h = arrow(&mut s, "P(x) & y = f(x)", "[x:s] P(x)", "[y:s] P(y)");
    assert_eq!(h.verdict(), Verdict::Yes);
}

#[test]
fn relation_graph_rejected_with_small_countermodel() {
    let mut s = Session::new(t_trans());
    match arrow(&mut s, "R(x,y)", "[x:s] true", "[y:s] true") {
        ArrowOutcome::No { index, countermodel } => {
            assert_eq!(index, 1);
            assert_eq!(countermodel.size("s"), 2);
        }
        other => panic!("expected a rejection, got {:?}", other.verdict()),
    }
}

#[test]
fn bound_zero_is_unknown() {
    let mut s = Session::with_bound(t_trans(), 0);
    let o = obj(&mut s, "[x:s] true");
    let th = Formula::and([
        Formula::rel("R", vec![Term::var("x0"), Term::var("x0")]),
        Formula::eq(Term::var("y0"), Term::var("x0")),
    ]);
    let (c, f) = o.instantiate("x");
    let (d, g) = o.instantiate("y");
    let out = s.arrow(&th, (&c, &f), (&d, &g)).unwrap();
    assert_eq!(out.verdict(), Verdict::Unknown);
    assert!(!out.arrow().unwrap().is_certified());
}

#[test]
fn arrow_rejects_overlapping_contexts() {
    let mut s = Session::new(t_trans());
    let ctx = Context::from_pairs(&[("x", "s")]);
    let th = Formula::eq(Term::var("x"), Term::var("x"));
    let r = s.arrow(&th, (&ctx, &Formula::top()), (&ctx, &Formula::top()));
    assert!(matches!(r, Err(SynError::Chase(_))));
}

#[test]
fn identity_is_neutral() {
    let mut s = Session::new(funs());
    let f = yes(arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true"));
    let id = yes(s.identity(&f.src).unwrap());
    let left = yes(s.compose(&id, &f).unwrap());
    let right = yes(s.compose(&f, &id).unwrap());
    assert_eq!(s.eq(&left, &f).unwrap(), Verdict::Yes);
    assert_eq!(s.eq(&right, &f).unwrap(), Verdict::Yes);
}

#[test]
fn composite_of_graphs_is_graph_of_composite() {
    let mut s = Session::new(funs());
    let f = yes(arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true"));
    let g = yes(arrow(&mut s, "y = g(x)", "[x:s] true", "[y:s] true"));
    let gf = yes(s.compose(&f, &g).unwrap());
    let direct = yes(arrow(&mut s, "y = g(f(x))", "[x:s] true", "[y:s] true"));
    assert_eq!(s.eq(&gf, &direct).unwrap(), Verdict::Yes);
    let fg = yes(arrow(&mut s, "y = f(g(x))", "[x:s] true", "[y:s] true"));
    assert_eq!(s.eq(&gf, &fg).unwrap(), Verdict::No);
}

#[test]
fn compose_rejects_mismatch() {
    let mut s = Session::new(funs());
    let f = yes(arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true"));
    let h = yes(arrow(&mut s, "y = h(x)", "[x:s] true", "[y:t] true"));
    assert!(matches!(s.compose(&h, &f), Err(SynError::Mismatch(_))));
    assert!(matches!(s.eq(&f, &h), Err(SynError::Mismatch(_))));
}

#[test]
fn eq_trivial_cases() {
    let mut s = Session::with_bound(funs(), 0);
    let f = arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true");
    let f = f.arrow().unwrap().clone();
    assert_eq!(s.eq(&f, &f).unwrap(), Verdict::Yes);
    let padded = SynArrow { theta: Formula::and([f.theta.clone(), Formula::top()]), ..f.clone() };
    assert_eq!(s.eq(&f, &padded).unwrap(), Verdict::Yes);
}

#[test]
fn eval_follows_tables() {
    let thy = funs();
    let mut s = Session::new(thy.clone());
    let f = yes(arrow(&mut s, "y = f(x)", "[x:s] true", "[y:s] true"));
    let g = yes(arrow(&mut s, "y = g(x)", "[x:s] true", "[y:s] true"));
    let id = yes(s.identity(&f.src).unwrap());
    let gf = yes(s.compose(&f, &g).unwrap());
    let models = enumerate_models(&thy, 2, u128::MAX).unwrap();
    assert!(models.len() > 20);
    for m in &models {
        let e = eval_functor(&thy, m).unwrap();
        let ef = e.arrow(&f).unwrap();
        let eg = e.arrow(&g).unwrap();
        let table: Vec<usize> = ef.src.iter().map(|x| m.functions["f"].apply(x)).collect();
        assert_eq!(ef.map, table);
        assert_eq!(e.arrow(&id).unwrap().map, (0..ef.src.len()).collect::<Vec<_>>());
        let composed: Vec<usize> = ef.map.iter().map(|&i| eg.map[i]).collect();
        assert_eq!(e.arrow(&gf).unwrap().map, composed);
    }
}

#[test]
fn eval_rejects_non_models() {
    let thy = t_trans();
    let m = common::structure(r#"{"sorts":{"s":["a","b"]},"rels":{"R":[["a","b"]]}}"#, &thy);
    assert!(matches!(eval_functor(&thy, &m), Err(SynError::NotAModel)));
}

#[test]
fn eval_detects_non_function_graph() {
    let thy = t_trans();
    let mut s = Session::new(thy.clone());
    let ArrowOutcome::No { .. } = arrow(&mut s, "R(x,y)", "[x:s] true", "[y:s] true") else { panic!() };
    let o = obj(&mut s, "[x:s] true");
    let fake = SynArrow {
        src: o.clone(),
        tgt: o,
        theta: Formula::rel("R", vec![Term::var("x0"), Term::var("y0")]),
        certificate: cohwb::syncat::Certificate::Unknown,
    };
    let m = common::structure(r#"{"sorts":{"s":["a","b"]},"rels":{"R":[["a","a"],["a","b"],["b","b"]]}}"#, &thy);
    let e = eval_functor(&thy, &m).unwrap();
    assert!(matches!(e.arrow(&fake), Err(SynError::CertifiedArrowViolation(_))));
}

#[test]
fn constructions_evaluate_to_set_constructions() {
    let thy = funs();
    let mut s = Session::new(thy.clone());
    let a = obj(&mut s, "[x:s] P(x)");
    let b = obj(&mut s, "[y:t] true");
    let (prod, p1, p2) = s.product(&a, &b).unwrap();
    let (p1, p2) = (yes(p1), yes(p2));
    let h = yes(arrow(&mut s, "y = h(x)", "[x:s] true", "[y:t] true"));
    let (img, incl) = s.image(&h).unwrap();
    let incl = yes(incl);
    let q = obj(&mut s, "[x:s] P(f(x))");
    let whole = obj(&mut s, "[x:s] true");
    let (uni, uincl) = s.union(&a, &q, &whole).unwrap();
    let uincl = yes(uincl);
    for m in enumerate_models(&thy, 2, u128::MAX).unwrap() {
        let e = eval_functor(&thy, &m).unwrap();
        let (ea, eb) = (e.object(&a), e.object(&b));
        let ep = e.object(&prod);
        assert_eq!(ep.len(), ea.len() * eb.len());
        let (f1, f2) = (e.arrow(&p1).unwrap(), e.arrow(&p2).unwrap());
        let pairs: std::collections::BTreeSet<(usize, usize)> = (0..ep.len()).map(|i| (f1.map[i], f2.map[i])).collect();
        assert_eq!(pairs.len(), ep.len());

        let eh = e.arrow(&h).unwrap();
        let image: std::collections::BTreeSet<&Vec<usize>> = eh.map.iter().map(|&j| &eh.tgt[j]).collect();
        let ei = e.object(&img);
        assert_eq!(ei.iter().collect::<std::collections::BTreeSet<_>>(), image);
        let inc = e.arrow(&incl).unwrap();
        assert!(inc.map.iter().enumerate().all(|(i, &j)| inc.tgt[j] == ei[i]));

        let eu = e.object(&uni);
        let mut expected: Vec<Vec<usize>> = ea.iter().chain(e.object(&q).iter()).cloned().collect();
        expected.sort();
        expected.dedup();
        assert_eq!(eu, expected);
        assert_eq!(e.arrow(&uincl).unwrap().map.len(), eu.len());
    }
}

fn sample_structure(thy: &Theory) -> FinStructure {
    enumerate_models(thy, 1, u128::MAX).unwrap().remove(0)
}

#[test]
fn eval_of_whole_sort_is_carrier() {
    let thy = funs();
    let mut s = Session::new(thy.clone());
    let m = sample_structure(&thy);
    let o = obj(&mut s, "[x:s] true");
    assert_eq!(eval_functor(&thy, &m).unwrap().object(&o).len(), m.size("s"));
}
