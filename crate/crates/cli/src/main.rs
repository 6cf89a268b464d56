use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cohwb::canon::{internal_theory, verify_diagram_property};
use cohwb::chase::{find_countermodel, prove_sequent};
use cohwb::fincat::{
    chain_colimit, coherent_closure, coherent_closure_in, factor_through_stage, pullback_category,
    pullback_category_unchecked, validate_category, validate_functor, validate_two_cell, verify_colimit_coherent,
    CatDiagram, ClosureConfig, FinCat, FinCatError, Functor, SetFragment, TwoCell,
};
use cohwb::logic::{
    morleyize, parse_context, parse_formula, parse_sequent, parse_theory, theory_to_text, wf_check, Context, Formula,
    Theory,
};
use cohwb::semantics::{
    enumerate_homs, enumerate_models_between, first_failure, interpret_formula, FinStructure, DEFAULT_BUDGET,
};
use cohwb::soa::{inclusion, soa_factorize, SoaConfig, TheoryMorphism};
use cohwb::syncat::{eval_functor, ArrowOutcome, Session, SynArrow};
use cohwb::twocat::{
    check_cone_solution, equalizer_split, factor_equiv_isofib, homotopy_product, homotopy_pullback,
    mediate_into_hopullback, uniqueness_check, EqualizerCone,
};

const OK: u8 = 0;
const FAILS: u8 = 1;
const UNKNOWN: u8 = 2;
const INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "wb", version, about = "Coherent logic and finite category workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and well-formedness check a theory.
    Check { theory: PathBuf },
    /// Print the Morleyization of a theory.
    Morleyize {
        theory: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Prove a sequent by the bounded chase.
    Prove {
        theory: PathBuf,
        #[arg(long)]
        sequent: String,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        /// Write the certificate JSON here.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        /// Carrier bound for the countermodel search after a failed proof.
        #[arg(long, default_value_t = 2)]
        refute_size: usize,
    },
    /// Enumerate finite models.
    Models {
        theory: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        #[arg(long)]
        exact_size: Option<usize>,
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Enumerate homomorphisms between two structures.
    Homs {
        theory: PathBuf,
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        count: bool,
    },
    /// Check a model, or interpret a formula in it.
    Interp {
        theory: PathBuf,
        model: PathBuf,
        /// A context with formula, e.g. "[x:s, y:s] R(x,y)".
        #[arg(long)]
        formula: Option<String>,
    },
    /// Objects and arrows of the syntactic category of a theory.
    #[command(subcommand)]
    Syncat(SyncatCmd),
    /// Print the internal theory of a finite category.
    Internal {
        category: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare each marker of a set fragment with its sequents.
    VerifyDiagram { fragment: PathBuf },
    /// Close a fragment under the coherent operations.
    Closure {
        fragment: PathBuf,
        /// Seed objects inside the fragment; the whole fragment if omitted.
        #[arg(long, value_delimiter = ',')]
        objects: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        arrows: Vec<String>,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
        #[arg(long, default_value_t = 4)]
        max_carrier: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Strict pullback of two functors with a common target.
    Pullback {
        f: PathBuf,
        g: PathBuf,
        /// Skip the requirement that one leg be an isofibration.
        #[arg(long)]
        any_legs: bool,
        #[arg(long)]
        emit_apex: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
    },
    /// Colimit of a chain of categories.
    Colimit {
        chain: PathBuf,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Factor a functor into a chain colimit through a stage.
    FactorStage {
        functor: PathBuf,
        chain: PathBuf,
        /// Also require markers to be preserved at the stage.
        #[arg(long)]
        coherent: bool,
    },
    /// Factor a functor as an equivalence followed by an isofibration.
    Factorize { functor: PathBuf },
    /// Product of categories.
    Hoproduct {
        #[arg(required = true)]
        categories: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homotopy pullback of two functors with a common target.
    Hopullback {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        emit_apex: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
    },
    /// Mediate a cone into the homotopy pullback of `f` and `g`.
    Mediate { f: PathBuf, g: PathBuf, cone: PathBuf },
    /// Split a 2-cell through an equalizer cone.
    Eqsplit { input: PathBuf },
    /// Small object argument on a theory morphism.
    Soa {
        morphism: PathBuf,
        /// Theory files, one per generating map.
        maps: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        stages: usize,
        #[arg(long, default_value_t = 2)]
        probe_size: usize,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynArgs {
    #[arg(long)]
    theory: PathBuf,
    #[arg(long, default_value_t = 6)]
    bound: usize,
}

#[derive(Subcommand)]
enum SyncatCmd {
    /// Normal form of an object "[x:s] φ".
    Object {
        #[command(flatten)]
        s: SynArgs,
        #[arg(long)]
        obj: String,
    },
    /// Certify an arrow given by its graph.
    Arrow {
        #[command(flatten)]
        s: SynArgs,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
    },
    /// Compose `theta1: src → mid` with `theta2: mid → tgt`.
    Compose {
        #[command(flatten)]
        s: SynArgs,
        #[arg(long)]
        src: String,
        #[arg(long)]
        mid: String,
        #[arg(long)]
        tgt: String,
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
    },
    /// Decide equality of two parallel arrows.
    Eq {
        #[command(flatten)]
        s: SynArgs,
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
    },
    /// Evaluate an arrow in a finite model.
    Eval {
        #[command(flatten)]
        s: SynArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
    },
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn read_json(p: &Path) -> Result<Value> {
    serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))
}

fn read_theory(p: &Path) -> Result<Theory> {
    parse_theory(&read(p)?).map_err(|e| anyhow!("{}: {e}", p.display()))
}

fn read_cat(p: &Path) -> Result<Arc<FinCat>> {
    let c = FinCat::from_json(&read_json(p)?)?;
    let errs = validate_category(&c);
    if !errs.is_empty() {
        bail!("{}: {}", p.display(), errs.join("; "));
    }
    Ok(Arc::new(c))
}

fn functor_json(v: &Value) -> Result<Functor> {
    let f = Functor::from_json(v)?;
    for c in [&f.src, &f.tgt] {
        let errs = validate_category(c);
        if !errs.is_empty() {
            bail!("{}", errs.join("; "));
        }
    }
    let errs = validate_functor(&f);
    if !errs.is_empty() {
        bail!("{}", errs.join("; "));
    }
    Ok(f)
}

fn read_functor(p: &Path) -> Result<Functor> {
    functor_json(&read_json(p)?).with_context(|| format!("in {}", p.display()))
}

fn between(v: &Value, src: &Arc<FinCat>, tgt: &Arc<FinCat>) -> Result<Functor> {
    let f = Functor::from_json_between(v, src.clone(), tgt.clone())?;
    let errs = validate_functor(&f);
    if !errs.is_empty() {
        bail!("{}", errs.join("; "));
    }
    Ok(f)
}

/// A cell `from ⇒ to` read from its `components` map.
fn cell(v: &Value, from: Functor, to: Functor) -> Result<TwoCell> {
    let comps = from
        .src
        .objects
        .iter()
        .map(|o| {
            let name = v["components"][o].as_str().ok_or_else(|| anyhow!("no component at {o}"))?;
            from.tgt.arrow_index(name).ok_or_else(|| anyhow!("unknown arrow {name}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = TwoCell { from, to, comps };
    let errs = validate_two_cell(&t);
    if !errs.is_empty() {
        bail!("{}", errs.join("; "));
    }
    Ok(t)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Check { theory } => {
            let thy = read_theory(&theory)?;
            let diags = wf_check(&thy);
            for d in &diags {
                eprintln!("{d}");
            }
            if diags.is_empty() {
                println!(
                    "ok: {} sorts, {} relations, {} functions, {} axioms",
                    thy.signature.sorts.len(),
                    thy.signature.relations.len(),
                    thy.signature.functions.len(),
                    thy.axioms.len()
                );
                Ok(OK)
            } else {
                Ok(FAILS)
            }
        }
        Cmd::Morleyize { theory, output } => {
            let thy = read_theory(&theory)?;
            emit(&output, &theory_to_text(&morleyize(&thy)))?;
            Ok(OK)
        }
        Cmd::Prove { theory, sequent, bound, emit_cert, refute_size } => {
            let thy = read_theory(&theory)?;
            let s = parse_sequent(&thy.signature, &sequent)?;
            let out = prove_sequent(&thy, &s, bound)?;
            if let Some(cert) = out.certificate() {
                println!("Proved");
                if let Some(p) = emit_cert {
                    fs::write(&p, pretty(&serde_json::to_value(cert)?))?;
                }
                return Ok(OK);
            }
            if let Some((_, m)) = find_countermodel(&thy, std::slice::from_ref(&s), refute_size) {
                println!("Refuted");
                println!("{}", pretty(&m.to_json(&thy.signature)));
                return Ok(FAILS);
            }
            println!("Unknown");
            Ok(UNKNOWN)
        }
        Cmd::Models { theory, max_size, min_size, exact_size, count, budget } => {
            let thy = read_theory(&theory)?;
            let (lo, hi) = exact_size.map_or((min_size, max_size), |n| (n, n));
            let ms = match enumerate_models_between(&thy, lo, hi, budget) {
                Ok(ms) => ms,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(UNKNOWN);
                }
            };
            if count {
                println!("{}", ms.len());
            } else {
                let all: Vec<Value> = ms.iter().map(|m| m.to_json(&thy.signature)).collect();
                println!("{}", pretty(&Value::Array(all)));
            }
            Ok(OK)
        }
        Cmd::Homs { theory, source, target, count } => {
            let thy = read_theory(&theory)?;
            let a = FinStructure::from_json(&thy.signature, &read_json(&source)?)?;
            let b = FinStructure::from_json(&thy.signature, &read_json(&target)?)?;
            let hs = match enumerate_homs(&a, &b, &thy.signature, DEFAULT_BUDGET) {
                Ok(hs) => hs,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(UNKNOWN);
                }
            };
            if count {
                println!("{}", hs.len());
            } else {
                println!("{}", pretty(&Value::Array(hs.iter().map(|h| h.to_json(&a, &b)).collect())));
            }
            Ok(OK)
        }
        Cmd::Interp { theory, model, formula } => {
            let thy = read_theory(&theory)?;
            let m = FinStructure::from_json(&thy.signature, &read_json(&model)?)?;
            match formula {
                Some(src) => {
                    let (ctx, phi) = parse_context(&thy.signature, &src)?;
                    let set = interpret_formula(&m, &ctx, &phi);
                    println!("{}", json!(set.tuples));
                    Ok(OK)
                }
                None => match first_failure(&m, &thy) {
                    None => {
                        println!("model");
                        Ok(OK)
                    }
                    Some(i) => {
                        println!("not a model: axiom {i} fails");
                        Ok(FAILS)
                    }
                },
            }
        }
        Cmd::Syncat(c) => syncat(c),
        Cmd::Internal { category, output } => {
            let c = read_cat(&category)?;
            emit(&output, &theory_to_text(&internal_theory(&c)))?;
            Ok(OK)
        }
        Cmd::VerifyDiagram { fragment } => {
            let frag = SetFragment::from_json(&read_json(&fragment)?)?;
            let mut code = OK;
            for m in &frag.cat.markers {
                let v = verify_diagram_property(&frag, m)?;
                println!("{}: semantic={} sequent={} agree={}", m.tag(), v.semantic, v.sequent, v.agree);
                if !v.agree || !v.semantic {
                    code = FAILS;
                }
            }
            Ok(code)
        }
        Cmd::Closure { fragment, objects, arrows, rounds, max_carrier, output } => {
            let frag = SetFragment::from_json(&read_json(&fragment)?)?;
            let cfg = ClosureConfig { rounds, max_carrier, ..ClosureConfig::default() };
            let cl = if objects.is_empty() && arrows.is_empty() {
                coherent_closure(&frag, &cfg)?
            } else {
                let os = objects
                    .iter()
                    .map(|o| frag.cat.object_index(o).ok_or_else(|| anyhow!("unknown object {o}")))
                    .collect::<Result<Vec<_>>>()?;
                let as_ = arrows
                    .iter()
                    .map(|a| frag.cat.arrow_index(a).ok_or_else(|| anyhow!("unknown arrow {a}")))
                    .collect::<Result<Vec<_>>>()?;
                coherent_closure_in(&frag, &os, &as_, &cfg)?
            };
            eprintln!("{}", serde_json::to_string(&cl.log)?);
            emit(&output, &pretty(&cl.fragment.to_json()))?;
            Ok(if cl.complete() { OK } else { UNKNOWN })
        }
        Cmd::Pullback { f, g, any_legs, emit_apex, dot } => {
            let (f, g) = (read_functor(&f)?, read_functor(&g)?);
            let pb = if any_legs {
                pullback_category_unchecked(&f, &g)
            } else {
                match pullback_category(&f, &g) {
                    Ok(pb) => pb,
                    Err(FinCatError::NotIsofibration) => {
                        println!("neither leg is an isofibration");
                        return Ok(FAILS);
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            println!("objects: {}, arrows: {}", pb.cat.n_objects(), pb.cat.n_arrows());
            if let Some(p) = emit_apex {
                fs::write(p, pretty(&pb.cat.to_json()))?;
            }
            if dot {
                println!("{}", pb.cat.to_dot());
            }
            Ok(OK)
        }
        Cmd::Colimit { chain, samples, output } => {
            let d = read_chain(&chain)?;
            let col = chain_colimit(&d)?;
            let diags = verify_colimit_coherent(&d, &col, samples);
            for m in &diags {
                eprintln!("{m}");
            }
            emit(&output, &pretty(&col.cat.to_json()))?;
            Ok(if diags.is_empty() { OK } else { FAILS })
        }
        Cmd::FactorStage { functor, chain, coherent } => {
            let d = read_chain(&chain)?;
            let col = chain_colimit(&d)?;
            let v = read_json(&functor)?;
            let src = Arc::new(FinCat::from_json(&v["source"])?);
            let f = between(&v, &src, &col.cat)?;
            match factor_through_stage(&f, &d, &col, coherent) {
                Ok((k, g)) => {
                    println!("{}", pretty(&json!({"stage": k, "factor": g.to_json()})));
                    Ok(OK)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(FAILS)
                }
            }
        }
        Cmd::Factorize { functor } => {
            let f = read_functor(&functor)?;
            let fac = factor_equiv_isofib(&f);
            let errs = fac.equiv.check();
            println!(
                "{}",
                pretty(&json!({"j": fac.j.to_json(), "isofibration": fac.iso.to_json(), "diagnostics": errs}))
            );
            Ok(if errs.is_empty() { OK } else { FAILS })
        }
        Cmd::Hoproduct { categories, output } => {
            let cs = categories.iter().map(|p| read_cat(p)).collect::<Result<Vec<_>>>()?;
            let p = homotopy_product(&cs);
            emit(&output, &pretty(&p.cat.to_json()))?;
            Ok(OK)
        }
        Cmd::Hopullback { f, g, emit_apex, dot } => {
            let (f, g) = (read_functor(&f)?, read_functor(&g)?);
            let res = homotopy_pullback(&f, &g)?;
            let apex = res.apex();
            println!("objects: {}, arrows: {}", apex.n_objects(), apex.n_arrows());
            println!("{}", pretty(&json!({"eta": res.eta.to_json()["components"]})));
            if let Some(p) = emit_apex {
                fs::write(p, pretty(&apex.to_json()))?;
            }
            if dot {
                println!("{}", apex.to_dot());
            }
            Ok(OK)
        }
        Cmd::Mediate { f, g, cone } => {
            let (f, g) = (read_functor(&f)?, read_functor(&g)?);
            let res = homotopy_pullback(&f, &g)?;
            let v = read_json(&cone)?;
            let d = Arc::new(FinCat::from_json(&v["source"])?);
            let h1 = between(&v["h1"], &d, &f.src)?;
            let h2 = between(&v["h2"], &d, &g.src)?;
            let nu = cell(&v["nu"], h1.then(&f), h2.then(&g))?;
            let s = mediate_into_hopullback(&res, &h1, &h2, &nu)?;
            let errs = check_cone_solution(&res, &h1, &h2, &nu, &s);
            let conn = uniqueness_check(&res, &h1, &h2, &nu, &s, &s)?;
            println!(
                "{}",
                pretty(&json!({
                    "r": s.r.to_json(),
                    "alpha1": s.alpha1.to_json()["components"],
                    "alpha2": s.alpha2.to_json()["components"],
                    "diagnostics": errs,
                    "connecting_cells": conn.candidates,
                }))
            );
            Ok(if errs.is_empty() && conn.candidates == 1 { OK } else { FAILS })
        }
        Cmd::Eqsplit { input } => eqsplit(&read_json(&input)?),
        Cmd::Soa { morphism, maps, stages, probe_size, bound, budget, log } => {
            let f = read_morphism(&read_json(&morphism)?, bound)?;
            let i = maps.iter().map(|p| read_generator(p)).collect::<Result<Vec<_>>>()?;
            let cfg = SoaConfig { stages, bound, probe_size, budget };
            let r = match soa_factorize(&f, &i, &cfg) {
                Ok(r) => r,
                Err(cohwb::soa::SoaError::Budget(m)) => {
                    eprintln!("budget exhausted: {m}");
                    return Ok(UNKNOWN);
                }
                Err(e) => return Err(e.into()),
            };
            let structural = r.log.check(&i);
            if let Some(p) = log {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(&p, pretty(&serde_json::to_value(&r.log)?))?;
            }
            println!(
                "{}",
                pretty(&json!({
                    "stages": r.log.stages.iter().map(|s| s.squares.len()).collect::<Vec<_>>(),
                    "middle": theory_to_text(&r.fsecond.src),
                    "injectivity": r.injectivity,
                    "structural": structural,
                    "composite_agrees": r.composite_agrees,
                    "probes": r.probes,
                    "note": "injectivity is checked on the squares present after the last stage only",
                }))
            );
            if !structural.is_empty()
                || !r.composite_agrees
                || r.injectivity.refused > 0
                || r.injectivity.bad_pasting > 0
            {
                Ok(FAILS)
            } else if r.injectivity.unknown > 0 {
                Ok(UNKNOWN)
            } else {
                Ok(OK)
            }
        }
    }
}

/// `{"steps": [functor, …]}`, or `{"stages": [category]}` for a single stage.
fn read_chain(p: &Path) -> Result<CatDiagram> {
    let v = read_json(p)?;
    let steps = v["steps"].as_array().cloned().unwrap_or_default();
    if steps.is_empty() {
        let c = v["stages"].get(0).ok_or_else(|| anyhow!("chain needs steps or one stage"))?;
        return Ok(CatDiagram::chain(vec![Arc::new(FinCat::from_json(c)?)], Vec::new()));
    }
    let mut stages = Vec::new();
    let mut fs_ = Vec::new();
    for (k, s) in steps.iter().enumerate() {
        let src = match stages.last() {
            Some(prev) => Arc::clone(prev),
            None => Arc::new(FinCat::from_json(&s["source"])?),
        };
        if k == 0 {
            stages.push(src.clone());
        }
        let tgt = Arc::new(FinCat::from_json(&s["target"])?);
        fs_.push(between(s, &src, &tgt).with_context(|| format!("step {k}"))?);
        stages.push(tgt);
    }
    let d = CatDiagram::chain(stages, fs_);
    let errs = d.validate();
    if !errs.is_empty() {
        bail!("{}", errs.join("; "));
    }
    Ok(d)
}

fn syn_obj(s: &Session, src: &str) -> Result<(Context, Formula)> {
    Ok(parse_context(&s.thy.signature, src)?)
}

fn syn_arrow(s: &mut Session, theta: &str, src: &str, tgt: &str) -> Result<ArrowOutcome> {
    let (sc, sf) = syn_obj(s, src)?;
    let (tc, tf) = syn_obj(s, tgt)?;
    let th = parse_formula(&s.thy.signature, &sc.concat(&tc), theta)?;
    Ok(s.arrow(&th, (&sc, &sf), (&tc, &tf))?)
}

fn report(s: &Session, o: &ArrowOutcome) -> u8 {
    match o {
        ArrowOutcome::Yes(a) => {
            println!("Yes");
            println!("{}", a.theta);
            if let cohwb::syncat::Certificate::Proved(outs) = &a.certificate {
                let certs: Vec<Value> =
                    outs.iter().filter_map(|o| o.certificate()).map(|c| serde_json::to_value(c).unwrap()).collect();
                println!("{}", serde_json::to_string(&certs).unwrap());
            }
            OK
        }
        ArrowOutcome::No { index, countermodel } => {
            println!("No");
            println!("{}", json!({"sequent": index, "countermodel": countermodel.to_json(&s.thy.signature)}));
            FAILS
        }
        ArrowOutcome::Unknown(_) => {
            println!("Unknown");
            UNKNOWN
        }
    }
}

fn certified(s: &Session, o: ArrowOutcome, what: &str) -> Result<std::result::Result<SynArrow, u8>> {
    match o {
        ArrowOutcome::Yes(a) => Ok(Ok(a)),
        other => {
            eprintln!("{what} is not a certified arrow");
            Ok(Err(report(s, &other)))
        }
    }
}

fn syncat(c: SyncatCmd) -> Result<u8> {
    let open = |a: &SynArgs| -> Result<Session> { Ok(Session::with_bound(read_theory(&a.theory)?, a.bound)) };
    match c {
        SyncatCmd::Object { s, obj } => {
            let mut sess = open(&s)?;
            let (ctx, phi) = syn_obj(&sess, &obj)?;
            let o = sess.object(&ctx, &phi)?;
            println!("{} {}", o.ctx(), o.formula());
            Ok(OK)
        }
        SyncatCmd::Arrow { s, theta, src, tgt } => {
            let mut sess = open(&s)?;
            let o = syn_arrow(&mut sess, &theta, &src, &tgt)?;
            Ok(report(&sess, &o))
        }
        SyncatCmd::Compose { s, src, mid, tgt, theta1, theta2 } => {
            let mut sess = open(&s)?;
            let a = syn_arrow(&mut sess, &theta1, &src, &mid)?;
            let a = match certified(&sess, a, "theta1")? {
                Ok(a) => a,
                Err(code) => return Ok(code),
            };
            let b = syn_arrow(&mut sess, &theta2, &mid, &tgt)?;
            let b = match certified(&sess, b, "theta2")? {
                Ok(b) => b,
                Err(code) => return Ok(code),
            };
            let c = sess.compose(&a, &b)?;
            Ok(report(&sess, &c))
        }
        SyncatCmd::Eq { s, src, tgt, theta1, theta2 } => {
            let mut sess = open(&s)?;
            let mut arrows = Vec::new();
            for (name, th) in [("theta1", &theta1), ("theta2", &theta2)] {
                let a = syn_arrow(&mut sess, th, &src, &tgt)?;
                match certified(&sess, a, name)? {
                    Ok(a) => arrows.push(a),
                    Err(code) => return Ok(code),
                }
            }
            let v = sess.eq(&arrows[0], &arrows[1])?;
            println!("{v:?}");
            Ok(match v {
                cohwb::chase::Verdict::Yes => OK,
                cohwb::chase::Verdict::No => FAILS,
                cohwb::chase::Verdict::Unknown => UNKNOWN,
            })
        }
        SyncatCmd::Eval { s, model, theta, src, tgt } => {
            let mut sess = open(&s)?;
            let m = FinStructure::from_json(&sess.thy.signature, &read_json(&model)?)?;
            let a = syn_arrow(&mut sess, &theta, &src, &tgt)?;
            let a = match certified(&sess, a, "theta")? {
                Ok(a) => a,
                Err(code) => return Ok(code),
            };
            let ev = eval_functor(&sess.thy, &m)?;
            let e = ev.arrow(&a)?;
            let pairs: Vec<Value> = e.src.iter().zip(&e.map).map(|(x, &y)| json!([x, e.tgt[y]])).collect();
            println!("{}", Value::Array(pairs));
            Ok(OK)
        }
    }
}

/// Categories `V`, `W`, `W2`, `U`; functors `e: V→W`, `eprime: V→W2`,
/// `family: W→W2`, `g, h: U→V`; cells by components.
fn eqsplit(v: &Value) -> Result<u8> {
    let cat = |k: &str| -> Result<Arc<FinCat>> {
        let c = FinCat::from_json(&v[k]).with_context(|| format!("category {k}"))?;
        let errs = validate_category(&c);
        if !errs.is_empty() {
            bail!("{k}: {}", errs.join("; "));
        }
        Ok(Arc::new(c))
    };
    let (cv, cw, cw2, cu) = (cat("V")?, cat("W")?, cat("W2")?, cat("U")?);
    let e = between(&v["e"], &cv, &cw)?;
    let eprime = between(&v["eprime"], &cv, &cw2)?;
    let family = v["family"]
        .as_array()
        .ok_or_else(|| anyhow!("family must be an array"))?
        .iter()
        .map(|f| between(f, &cw, &cw2))
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::new();
    for c in v["cells"].as_array().cloned().unwrap_or_default() {
        let i = c["from"].as_u64().ok_or_else(|| anyhow!("cell needs from"))? as usize;
        let j = c["to"].as_u64().ok_or_else(|| anyhow!("cell needs to"))? as usize;
        if i >= family.len() || j >= family.len() {
            bail!("cell index out of range");
        }
        cells.push((i, j, cell(&c, family[i].clone(), family[j].clone())?));
    }
    let etas = v["etas"]
        .as_array()
        .ok_or_else(|| anyhow!("etas must be an array"))?
        .iter()
        .zip(&family)
        .map(|(c, f)| cell(c, eprime.clone(), e.then(f)))
        .collect::<Result<Vec<_>>>()?;
    let cone = EqualizerCone { e: e.clone(), eprime, family, cells, etas };
    let g = between(&v["g"], &cu, &cv)?;
    let h = between(&v["h"], &cu, &cv)?;
    let alpha = cell(&v["alpha"], g.then(&e), h.then(&e))?;
    match equalizer_split(&cone, &g, &h, &alpha) {
        Ok(s) => {
            println!(
                "{}",
                pretty(&json!({"gamma": s.gamma.to_json()["components"], "betas_redundant": s.betas_redundant}))
            );
            Ok(OK)
        }
        Err(cohwb::twocat::TwoCatError::NoSplit) => {
            println!("no split");
            Ok(FAILS)
        }
        Err(e) => Err(e.into()),
    }
}

fn name_map(v: &Value) -> Result<BTreeMap<String, String>> {
    match v {
        Value::Null => Ok(BTreeMap::new()),
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| Ok((k.clone(), x.as_str().ok_or_else(|| anyhow!("map values are names"))?.to_string())))
            .collect(),
        _ => bail!("expected a name map"),
    }
}

/// `{"source": text, "target": text, "sorts": {..}, "symbols": {..}}`;
/// names missing from the maps go to themselves.
fn read_morphism(v: &Value, bound: usize) -> Result<TheoryMorphism> {
    let text = |k: &str| v[k].as_str().ok_or_else(|| anyhow!("morphism needs {k} theory text"));
    let src = parse_theory(text("source")?)?;
    let tgt = parse_theory(text("target")?)?;
    let mut sorts = name_map(&v["sorts"])?;
    let mut symbols = name_map(&v["symbols"])?;
    for s in &src.signature.sorts {
        sorts.entry(s.clone()).or_insert_with(|| s.clone());
    }
    for s in src.signature.relations.keys().chain(src.signature.functions.keys()) {
        symbols.entry(s.clone()).or_insert_with(|| s.clone());
    }
    Ok(TheoryMorphism::new(src, tgt, sorts, symbols, bound)?)
}

/// A generating map is the inclusion of the theory on the file's `#>`
/// comment lines into the theory of the whole file.
fn read_generator(p: &Path) -> Result<TheoryMorphism> {
    let text = read(p)?;
    let domain: String = text.lines().filter_map(|l| l.trim_start().strip_prefix("#>")).collect::<Vec<_>>().join("\n");
    let b = parse_theory(&text).map_err(|e| anyhow!("{}: {e}", p.display()))?;
    let a = parse_theory(&domain).map_err(|e| anyhow!("{} (domain): {e}", p.display()))?;
    inclusion(&a, &b).map_err(|e| anyhow!("{}: {e}", p.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT)
        }
    }
}
