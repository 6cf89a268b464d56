use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use cohwb::fincat::{FinCat, FragmentBuilder, Functor, Marker};
use cohwb::logic::parse_theory;
use cohwb::semantics::FinStructure;
use serde_json::{json, Value};
use tempfile::TempDir;

const T_TRANS: &str = "sort s.
rel R : s * s.
axiom [x:s] true => R(x,x).
axiom [x:s, y:s, z:s] R(x,y) & R(y,z) => R(x,z).
";

const FUNS: &str = "sort s.
fun f : s -> s.
fun g : s -> s.
";

fn wb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wb")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn json(&self, name: &str, v: &Value) -> String {
        self.file(name, &serde_json::to_string_pretty(v).unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn p(x: &Path) -> &str {
    x.to_str().unwrap()
}

#[test]
fn check_valid_theory() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let o = wb(&["check", &t]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2 axioms"));
}

#[test]
fn check_reports_input_errors() {
    let d = Dir::new();
    let t = d.file("bad.cl", "sort s. rel R : s * s. axiom [x:s] true => R(x.");
    assert_eq!(code(&wb(&["check", &t])), 3);
    assert_eq!(code(&wb(&["check", p(&d.path("missing.cl"))])), 3);
    assert_eq!(code(&wb(&["check"])), 3);
    assert_eq!(code(&wb(&["models", &t, "--max-size", "many"])), 3);
}

#[test]
fn prove_exit_codes() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let goal = "[x:s, y:s, z:s, w:s] R(x,y) & R(y,z) & R(z,w) => R(x,w)";
    assert_eq!(code(&wb(&["prove", &t, "--sequent", goal, "--bound", "0"])), 2);
    let cert = d.path("cert.json");
    let o = wb(&["prove", &t, "--sequent", goal, "--bound", "6", "--emit-cert", p(&cert)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Proved"));
    let v: Value = serde_json::from_str(&fs::read_to_string(cert).unwrap()).unwrap();
    assert!(v.is_object());
    let o = wb(&["prove", &t, "--sequent", "[x:s, y:s] R(x,y) => R(y,x)", "--bound", "6"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("Refuted"));
}

#[test]
fn models_count_on_two_elements() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let o = wb(&["models", &t, "--max-size", "2", "--min-size", "2", "--count"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "4");
    let o = wb(&["models", &t, "--exact-size", "2", "--count"]);
    assert_eq!(stdout(&o).trim(), "4");
    let o = wb(&["models", &t, "--max-size", "2", "--count"]);
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn emitted_models_round_trip() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let thy = parse_theory(T_TRANS).unwrap();
    let o = wb(&["models", &t, "--max-size", "2"]);
    let all: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(all.len(), 5);
    for (k, m) in all.iter().enumerate() {
        let s = FinStructure::from_json(&thy.signature, m).unwrap();
        assert_eq!(&s.to_json(&thy.signature), m);
        let f = d.json(&format!("m{k}.json"), m);
        assert_eq!(code(&wb(&["interp", &t, &f])), 0);
    }
}

#[test]
fn interp_rejects_non_models() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let m = d.json("m.json", &json!({"sorts": {"s": ["a", "b"]}, "rels": {"R": [["a", "b"]]}}));
    let o = wb(&["interp", &t, &m]);
    assert_eq!(code(&o), 1);
    let o = wb(&["interp", &t, &m, "--formula", "[x:s, y:s] R(x,y)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[[0,1]]");
}

#[test]
fn homs_between_models() {
    let d = Dir::new();
    let t = d.file("t.cl", T_TRANS);
    let a = d.json("a.json", &json!({"sorts": {"s": ["a"]}, "rels": {"R": [["a", "a"]]}}));
    let b = d.json("b.json", &json!({"sorts": {"s": ["p", "q"]}, "rels": {"R": [["p", "p"], ["q", "q"]]}}));
    let o = wb(&["homs", &t, &a, &b, "--count"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "2");
    let o = wb(&["homs", &t, &b, &a, "--count"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn morleyize_emits_a_theory() {
    let d = Dir::new();
    let t = d.file("t.cl", "sort s. rel P : s. axiom [x:s] P(x) => exists y:s. (P(y) & x = y).");
    let out = d.path("m.cl");
    assert_eq!(code(&wb(&["morleyize", &t, "-o", p(&out)])), 0);
    assert_eq!(code(&wb(&["check", p(&out)])), 0);
}

#[test]
fn syncat_arrow_verdicts() {
    let d = Dir::new();
    let t = d.file("f.cl", FUNS);
    let graph =
        ["syncat", "arrow", "--theory", &t, "--theta", "y = f(x)", "--src", "[x:s] true", "--tgt", "[y:s] true"];
    let o = wb(&graph);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Yes"));
    let rel = d.file("r.cl", "sort s. rel R : s * s.");
    let o =
        wb(&["syncat", "arrow", "--theory", &rel, "--theta", "R(x,y)", "--src", "[x:s] true", "--tgt", "[y:s] true"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("No"));
    let tt = d.file("t.cl", T_TRANS);
    let o = wb(&[
        "syncat",
        "arrow",
        "--theory",
        &tt,
        "--theta",
        "R(x,x) & y = x",
        "--src",
        "[x:s] true",
        "--tgt",
        "[y:s] true",
        "--bound",
        "0",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("Unknown"));
}

#[test]
fn syncat_object_compose_eq_eval() {
    let d = Dir::new();
    let t = d.file("f.cl", FUNS);
    let o = wb(&["syncat", "object", "--theory", &t, "--obj", "[a:s] true"]);
    assert_eq!(code(&o), 0);
    let base = ["--theory", t.as_str(), "--src", "[x:s] true", "--tgt", "[y:s] true"];
    let mut args = vec!["syncat", "compose", "--mid", "[m:s] true", "--theta1", "m = f(x)", "--theta2", "y = g(m)"];
    args.extend(base);
    let o = wb(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut args = vec!["syncat", "eq", "--theta1", "y = f(x)", "--theta2", "f(x) = y"];
    args.extend(base);
    assert_eq!(code(&wb(&args)), 0);
    let mut args = vec!["syncat", "eq", "--theta1", "y = f(x)", "--theta2", "y = g(x)"];
    args.extend(base);
    assert_eq!(code(&wb(&args)), 1);
    let m = d.json(
        "m.json",
        &json!({"sorts": {"s": ["a", "b"]}, "funs": {"f": {"a": "b", "b": "b"}, "g": {"a": "a", "b": "a"}}}),
    );
    let mut args = vec!["syncat", "eval", "--model", m.as_str(), "--theta", "y = f(x)"];
    args.extend(base);
    let o = wb(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "[[[0],[1]],[[1],[1]]]");
}

fn point_into_iso(o: usize) -> Value {
    let j = Arc::new(FinCat::walking_iso());
    Functor::constant(Arc::new(FinCat::terminal()), j, o).to_json()
}

#[test]
fn counterexample_pullbacks() {
    let d = Dir::new();
    let f = d.json("f.json", &point_into_iso(0));
    let g = d.json("g.json", &point_into_iso(1));
    assert_eq!(code(&wb(&["pullback", &f, &g])), 1);
    let o = wb(&["pullback", &f, &g, "--any-legs"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("objects: 0, arrows: 0"));
    let apex = d.path("apex.json");
    let o = wb(&["hopullback", &f, &g, "--emit-apex", p(&apex), "--dot"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("objects: 1, arrows: 1"));
    assert!(stdout(&o).contains("digraph"));
    let c = FinCat::from_json(&serde_json::from_str(&fs::read_to_string(apex).unwrap()).unwrap()).unwrap();
    assert_eq!(c.n_objects(), 1);
}

#[test]
fn mediate_trivial_cone() {
    let d = Dir::new();
    let f = d.json("f.json", &point_into_iso(0));
    let g = d.json("g.json", &point_into_iso(1));
    let cone = d.json(
        "cone.json",
        &json!({
            "source": FinCat::terminal().to_json(),
            "h1": {"objects": {"*": "*"}, "arrows": {"id_*": "id_*"}},
            "h2": {"objects": {"*": "*"}, "arrows": {"id_*": "id_*"}},
            "nu": {"components": {"*": "f"}},
        }),
    );
    let o = wb(&["mediate", &f, &g, &cone]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["connecting_cells"], 1);
    let bad = d.json(
        "bad.json",
        &json!({
            "source": FinCat::terminal().to_json(),
            "h1": {"objects": {"*": "*"}, "arrows": {"id_*": "id_*"}},
            "h2": {"objects": {"*": "*"}, "arrows": {"id_*": "id_*"}},
            "nu": {"components": {"*": "g"}},
        }),
    );
    assert_eq!(code(&wb(&["mediate", &f, &g, &bad])), 3);
}

#[test]
fn product_and_factorization() {
    let d = Dir::new();
    let j = d.json("j.json", &FinCat::walking_iso().to_json());
    let o = wb(&["hoproduct", &j, &j]);
    assert_eq!(code(&o), 0);
    let c = FinCat::from_json(&serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
    assert_eq!((c.n_objects(), c.n_arrows()), (4, 16));
    let f = d.json("f.json", &point_into_iso(0));
    let o = wb(&["factorize", &f]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["j"]["target"]["objects"].as_array().unwrap().len(), 2);
}

#[test]
fn eqsplit_on_terminal_data() {
    let d = Dir::new();
    let one = FinCat::terminal().to_json();
    let id = json!({"objects": {"*": "*"}, "arrows": {"id_*": "id_*"}});
    let input = d.json(
        "eq.json",
        &json!({
            "V": one, "W": one, "W2": one, "U": one,
            "e": id, "eprime": id, "family": [id, id],
            "cells": [{"from": 0, "to": 1, "components": {"*": "id_*"}}],
            "etas": [{"components": {"*": "id_*"}}, {"components": {"*": "id_*"}}],
            "g": id, "h": id, "alpha": {"components": {"*": "id_*"}},
        }),
    );
    let o = wb(&["eqsplit", &input]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma"]["*"], "id_*");
}

#[test]
fn internal_theory_checks() {
    let d = Dir::new();
    let j = d.json("j.json", &FinCat::walking_iso().to_json());
    let out = d.path("j.cl");
    assert_eq!(code(&wb(&["internal", &j, "-o", p(&out)])), 0);
    assert_eq!(code(&wb(&["check", p(&out)])), 0);
}

fn mono_fragment(func: Vec<usize>) -> Value {
    let mut b = FragmentBuilder::new();
    let a = b.object("A", 2);
    let c = b.object("B", 3);
    b.arrow("m", a, c, func);
    let frag = b.finish(100).unwrap();
    let m = frag.cat.arrow_index("m").unwrap();
    frag.with_markers(vec![Marker::Mono(m)]).to_json()
}

#[test]
fn verify_diagram_and_closure() {
    let d = Dir::new();
    let good = d.json("good.json", &mono_fragment(vec![0, 1]));
    let o = wb(&["verify-diagram", &good]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("agree=true"));
    let bad = d.json("bad.json", &mono_fragment(vec![0, 0]));
    let o = wb(&["verify-diagram", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("semantic=false"));
    let o = wb(&["closure", &good, "--rounds", "3", "--max-carrier", "3"]);
    assert!([0, 2].contains(&code(&o)), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn colimit_and_stage_factoring() {
    let d = Dir::new();
    let one = Arc::new(FinCat::terminal());
    let two = Arc::new(FinCat::total_order(2));
    let step = Functor::constant(one.clone(), two.clone(), 1);
    let chain = d.json("chain.json", &json!({"steps": [step.to_json()]}));
    let out = d.path("col.json");
    let o = wb(&["colimit", &chain, "-o", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let col = FinCat::from_json(&serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap()).unwrap();
    assert_eq!(col.n_objects(), 2);
    let name = &col.objects[0];
    let f = d.json(
        "f.json",
        &json!({"source": FinCat::terminal().to_json(), "objects": {"*": name}, "arrows": {"id_*": col.arrows[col.id(0)].name}}),
    );
    let o = wb(&["factor-stage", &f, &chain]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["stage"].as_u64().unwrap() <= 1);
}

#[test]
fn soa_writes_a_stage_log() {
    let d = Dir::new();
    let f = d.json("f.json", &json!({"source": "", "target": T_TRANS}));
    let i = d.file("i0.cl", "sort u.\n");
    let log = d.path("out/stages.json");
    let o = wb(&["soa", &f, &i, "--stages", "2", "--probe-size", "2", "--log", p(&log)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stages"], json!([1, 1]));
    let l: Value = serde_json::from_str(&fs::read_to_string(log).unwrap()).unwrap();
    assert_eq!(l["stages"].as_array().unwrap().len(), 2);
}

#[test]
fn soa_generator_domains() {
    let d = Dir::new();
    let f = d.json("f.json", &json!({"source": "sort s.", "target": T_TRANS}));
    let i = d.file("refl.cl", "#> sort u.\nsort u.\nrel R : u * u.\naxiom [x:u] true => R(x,x).\n");
    let o = wb(&["soa", &f, &i, "--stages", "1"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["injectivity"]["squares"], 1);
    let bad = d.file("bad.cl", "#> sort v.\nsort u.\n");
    assert_eq!(code(&wb(&["soa", &f, &bad])), 3);
}

#[test]
fn soa_reports_fresh_refusals() {
    let d = Dir::new();
    let f = d.json("f.json", &json!({"source": T_TRANS, "target": T_TRANS}));
    let a = d.file("a.cl", "sort u.\n");
    let b = d.file("b.cl", "#> sort u.\nsort u.\nrel R : u * u.\naxiom [x:u] true => R(x,x).\n");
    assert_eq!(code(&wb(&["soa", &f, &a, &b, "--stages", "1"])), 1);
}
