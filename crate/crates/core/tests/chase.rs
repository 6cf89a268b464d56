mod common;

use cohwb::chase::{
    provably_functional, prove_sequent, replay, saturate, ChaseError, FactBase, ProofOutcome, StepLabel, Verdict,
};
use cohwb::logic::{parse_context, parse_sequent, parse_theory, Context, Formula, Sequent, Theory};
use cohwb::semantics::{enumerate_models, holds_sequent};
use common::{gen, t_trans};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn serial() -> Theory {
    parse_theory("sort s. rel R : s * s. axiom [x:s] true => exists y:s. R(x,y).").unwrap()
}

fn one_constant() -> FactBase {
    let mut fb = FactBase::new();
    fb.add_constant("c", "s").unwrap();
    fb
}

#[test]
fn saturate_introduces_fresh_witnesses() {
    let out = saturate(&serial(), &one_constant(), 2).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].facts(), vec!["R(c,w1)", "R(w1,w2)"]);
    assert_eq!(out[0].len(), 3);
}

#[test]
fn saturate_splits_on_disjunction() {
    let thy = parse_theory("sort s. rel A : s. rel B : s. axiom [x:s] true => A(x) | B(x).").unwrap();
    let out = saturate(&thy, &one_constant(), 1).unwrap();
    let facts: Vec<Vec<String>> = out.iter().map(FactBase::facts).collect();
    assert_eq!(facts, vec![vec!["A(c)".to_string()], vec!["B(c)".to_string()]]);
}

#[test]
fn saturate_with_empty_theory_is_identity() {
    let thy = parse_theory("sort s. rel R : s * s.").unwrap();
    let mut base = one_constant();
    base.add_constant("d", "s").unwrap();
    base.add_fact("R", &[0, 1]);
    let out = saturate(&thy, &base, 5).unwrap();
    assert_eq!(out, vec![base]);
}

#[test]
fn saturate_rejects_ill_sorted_base() {
    let mut fb = FactBase::new();
    fb.add_constant("c", "t").unwrap();
    assert!(matches!(saturate(&serial(), &fb, 1), Err(ChaseError::IllFormed(_))));
}

#[test]
fn saturate_drops_closed_branches() {
    let thy = parse_theory(
        "sort s. rel A : s. rel B : s.
         axiom [x:s] true => A(x) | B(x).
         axiom [x:s] A(x) => false.",
    )
    .unwrap();
    let out = saturate(&thy, &one_constant(), 3).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].facts(), vec!["B(c)"]);
}

#[test]
fn equality_merges_with_congruence() {
    let thy = parse_theory(
        "sort s. fun f : s -> s. rel R : s * s. rel P : s.
         axiom [x:s, y:s] R(x,y) => x = y.
         axiom [x:s] P(f(x)) => false.",
    )
    .unwrap();
    let s = parse_sequent(&thy.signature, "[a:s, b:s] R(a,b) & P(f(a)) => P(f(b))").unwrap();
    assert!(prove_sequent(&thy, &s, 1).unwrap().is_proved());
    let s = parse_sequent(&thy.signature, "[a:s, b:s] R(a,b) & f(a) = a & f(b) = b => a = f(f(b))").unwrap();
    assert!(prove_sequent(&thy, &s, 1).unwrap().is_proved());
}

#[test]
fn transitivity_chain() {
    let thy = t_trans();
    let s = parse_sequent(&thy.signature, "[x:s, y:s, z:s, w:s] R(x,y) & R(y,z) & R(z,w) => R(x,w)").unwrap();
    assert!(prove_sequent(&thy, &s, 3).unwrap().is_proved());
    let out = prove_sequent(&thy, &s, 1).unwrap();
    assert!(matches!(out, ProofOutcome::NotProvedWithinBound { budget_exhausted: false, .. }));
    let ProofOutcome::Proved { certificate, rounds } = prove_sequent(&thy, &s, 3).unwrap() else { unreachable!() };
    assert_eq!(rounds, 2);
    assert!(replay(&thy, &s, &certificate).unwrap());
}

#[test]
fn identity_sequent_at_bound_zero() {
    let thy = t_trans();
    for src in [
        "[x:s, y:s] R(x,y) => R(x,y)",
        "[x:s] exists y:s. R(x,y) | x = x => exists y:s. R(x,y) | x = x",
        "true => true",
        "false => false",
    ] {
        let s = parse_sequent(&thy.signature, src).unwrap();
        assert!(prove_sequent(&thy, &s, 0).unwrap().is_proved(), "{src}");
    }
}

#[test]
fn serial_does_not_give_predecessors() {
    let thy = serial();
    let s = parse_sequent(&thy.signature, "[x:s] true => exists y:s. R(y,x)").unwrap();
    let ProofOutcome::NotProvedWithinBound { frontier, budget_exhausted } = prove_sequent(&thy, &s, 10).unwrap() else {
        panic!("unexpectedly proved")
    };
    assert!(!budget_exhausted);
    assert_eq!(frontier.len(), 1);
    let facts = &frontier[0].facts;
    assert_eq!(facts.len(), 10);
    assert_eq!(facts.iter().filter(|f| f.ends_with(",x)")).count(), 0);
    assert!(facts.contains(&"R(x,w1)".to_string()));
}

#[test]
fn non_coherent_sequent_rejected() {
    let thy = t_trans();
    let s = parse_sequent(&thy.signature, "[x:s] ~R(x,x) => false").unwrap();
    assert_eq!(prove_sequent(&thy, &s, 2), Err(ChaseError::NotCoherent));
}

#[test]
fn closed_branches_count_as_proved() {
    let thy = parse_theory(
        "sort s. rel A : s. rel B : s. rel C : s.
         axiom [x:s] A(x) => false.
         axiom [x:s] B(x) => C(x).",
    )
    .unwrap();
    let s = parse_sequent(&thy.signature, "[x:s] A(x) | B(x) => C(x)").unwrap();
    let out = prove_sequent(&thy, &s, 1).unwrap();
    let cert = out.certificate().unwrap();
    assert_eq!(cert.children.len(), 2);
    assert_eq!(cert.children[0].axiom, StepLabel::Axiom(0));
    assert!(cert.children[0].children.is_empty());
    assert_eq!(cert.children[1].axiom, StepLabel::Axiom(1));
    assert_eq!(cert.children[1].children[0].axiom, StepLabel::Mark("goal".into()));
    assert!(replay(&thy, &s, cert).unwrap());
}

#[test]
fn certificate_json_shape() {
    let thy = trans_only();
    let s = parse_sequent(&thy.signature, "[x:s, y:s, z:s] R(x,y) & R(y,z) => R(x,z)").unwrap();
    let out = prove_sequent(&thy, &s, 1).unwrap();
    let json = serde_json::to_value(out.certificate().unwrap()).unwrap();
    assert_eq!(json["axiom"], "seed");
    let step = &json["children"][0];
    assert_eq!(step["axiom"], 0);
    assert_eq!(step["substitution"]["x"], "x");
    assert_eq!(step["substitution"]["z"], "z");
    assert_eq!(step["children"][0]["axiom"], "goal");
    let back: cohwb::chase::CertNode = serde_json::from_value(json).unwrap();
    assert_eq!(&back, out.certificate().unwrap());
}

#[test]
fn tampered_certificate_fails_replay() {
    let thy = trans_only();
    let s = parse_sequent(&thy.signature, "[x:s, y:s, z:s] R(x,y) & R(y,z) => R(x,z)").unwrap();
    let mut cert = prove_sequent(&thy, &s, 1).unwrap().certificate().unwrap().clone();
    cert.children[0].substitution.insert("y".into(), "nowhere".into());
    assert!(!replay(&thy, &s, &cert).unwrap());
    let mut cert = prove_sequent(&thy, &s, 1).unwrap().certificate().unwrap().clone();
    cert.children[0] = cert.children[0].children[0].clone();
    assert!(!replay(&thy, &s, &cert).unwrap());
}

fn trans_only() -> Theory {
    parse_theory("sort s. rel R : s * s. axiom [x:s, y:s, z:s] R(x,y) & R(y,z) => R(x,z).").unwrap()
}

fn ctx(thy: &Theory, src: &str) -> (Context, Formula) {
    parse_context(&thy.signature, src).unwrap()
}

#[test]
fn functional_identity_graph() {
    let thy = t_trans();
    let (c, th) = ctx(&thy, "[x:s, y:s] x = y");
    let (cx, top) = ctx(&thy, "[x:s] true");
    let (cy, _) = ctx(&thy, "[y:s] true");
    let r = provably_functional(&thy, (&c, &th), (&cx, &top), (&cy, &top), 2).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert_eq!(r.outcomes.len(), 3);
}

#[test]
fn functional_relation_refuted() {
    let thy = t_trans();
    let (c, th) = ctx(&thy, "[x:s, y:s] R(x,y)");
    let (cx, top) = ctx(&thy, "[x:s] true");
    let (cy, _) = ctx(&thy, "[y:s] true");
    let r = provably_functional(&thy, (&c, &th), (&cx, &top), (&cy, &top), 3).unwrap();
    assert_eq!(r.verdict, Verdict::No);
    let (i, m) = r.countermodel.unwrap();
    assert_eq!(i, 1);
    assert_eq!(m.size("s"), 2);
    assert!(!holds_sequent(&m, &r.sequents[1]));
}

#[test]
fn functional_graph_of_function_symbol() {
    let thy = parse_theory("sort s. fun f : s -> s.").unwrap();
    let (c, th) = ctx(&thy, "[x:s, y:s] y = f(x)");
    let (cx, top) = ctx(&thy, "[x:s] true");
    let (cy, _) = ctx(&thy, "[y:s] true");
    let r = provably_functional(&thy, (&c, &th), (&cx, &top), (&cy, &top), 1).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    for o in &r.outcomes {
        assert!(o.certificate().unwrap().steps() <= 1);
    }
}

#[test]
fn functional_unknown_without_countermodel() {
    // y is forced to be the unique predecessor, which needs an infinite chase
    let thy = parse_theory(
        "sort s. rel R : s * s.
         axiom [x:s] true => exists y:s. R(y,x).
         axiom [x:s, y:s, z:s] R(y,x) & R(z,x) => y = z.",
    )
    .unwrap();
    let (c, th) = ctx(&thy, "[x:s, y:s] R(y,x)");
    let (cx, top) = ctx(&thy, "[x:s] true");
    let (cy, _) = ctx(&thy, "[y:s] true");
    let r = provably_functional(&thy, (&c, &th), (&cx, &top), (&cy, &top), 2).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    let (c, th) = ctx(&thy, "[x:s, y:s] R(x,y)");
    let r = provably_functional(&thy, (&c, &th), (&cx, &top), (&cy, &top), 2).unwrap();
    assert_ne!(r.verdict, Verdict::Yes);
}

#[test]
fn functional_context_overlap() {
    let thy = t_trans();
    let (c, th) = ctx(&thy, "[x:s] x = x");
    let (cx, top) = ctx(&thy, "[x:s] true");
    assert!(matches!(
        provably_functional(&thy, (&c, &th), (&cx, &top), (&cx, &top), 1),
        Err(ChaseError::ContextOverlap(_))
    ));
}

/// Sequents biased towards provable ones: the right side is often a
/// weakening of the left.
fn sequent_for(rng: &mut ChaCha8Rng, sig: &cohwb::logic::Signature) -> Sequent {
    use rand::Rng;
    let s = gen::sequent(rng, sig, true);
    match rng.gen_range(0..3) {
        0 => s,
        1 => Sequent::new(s.ctx, s.lhs.clone(), Formula::or(vec![s.lhs, s.rhs])),
        _ => Sequent::new(s.ctx, Formula::and(vec![s.lhs.clone(), s.rhs]), s.lhs),
    }
}

fn soundness_case(seed: u64, with_fun: bool) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = gen::small_signature(with_fun);
    let thy = gen::theory(&mut rng, &sig, 2, true);
    let models = enumerate_models(&thy, 3, u128::MAX).unwrap();
    for _ in 0..6 {
        let s = sequent_for(&mut rng, &sig);
        let out = prove_sequent(&thy, &s, 2).unwrap();
        if let ProofOutcome::Proved { certificate, .. } = &out {
            for m in &models {
                prop_assert!(holds_sequent(m, &s), "{s} proved but fails in {:?}", m);
            }
            prop_assert!(replay(&thy, &s, certificate).unwrap());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn proved_sequents_hold_in_small_models(seed in any::<u64>()) {
        soundness_case(seed, false)?;
    }

    #[test]
    fn monotone_and_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = gen::small_signature(true);
        let thy = gen::theory(&mut rng, &sig, 3, true);
        let s = sequent_for(&mut rng, &sig);
        let a = prove_sequent(&thy, &s, 2).unwrap();
        let b = prove_sequent(&thy, &s, 2).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        if a.is_proved() {
            for bound in 3..5 {
                prop_assert!(prove_sequent(&thy, &s, bound).unwrap().is_proved());
            }
        }
    }

    #[test]
    fn reflexive_sequents_prove_at_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = gen::small_signature(true);
        let thy = gen::theory(&mut rng, &sig, 2, true);
        let s = gen::sequent(&mut rng, &sig, true);
        let refl = Sequent::new(s.ctx.clone(), s.lhs.clone(), s.lhs.clone());
        let out = prove_sequent(&thy, &refl, 0).unwrap();
        prop_assert!(out.is_proved());
        prop_assert!(replay(&thy, &refl, out.certificate().unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn proved_sequents_hold_in_small_models_with_functions(seed in any::<u64>()) {
        soundness_case(seed, true)?;
    }
}
