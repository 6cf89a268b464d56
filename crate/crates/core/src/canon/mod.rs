//! The canonical language of a finite category, its internal theory, and
//! the check that marked diagrams and their sequents agree in sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{concrete_property, well_shaped, FinCat, Marker, SetFragment};
use crate::logic::{Context, Formula, Sequent, Signature, Term, Theory};
use crate::semantics::{holds_sequent, FinStructure, FunctionTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("malformed diagram: {0}")]
    Shape(String),
}

/// One sort per object, one unary function per arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalSignature {
    pub signature: Signature,
    /// Sort name of each object.
    pub sorts: Vec<String>,
    /// Function symbol of each arrow.
    pub symbols: Vec<String>,
}

const RESERVED: &[&str] = &["true", "false", "exists", "forall", "sort", "fun", "rel", "axiom"];

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && !RESERVED.contains(&s)
}

/// Names usable in the text format: the original when it is an
/// identifier, otherwise `{prefix}{index}`; clashes get a suffix.
fn names(raw: &[String], prefix: &str, taken: &mut BTreeSet<String>) -> Vec<String> {
    raw.iter()
        .enumerate()
        .map(|(i, n)| {
            let mut s = if is_ident(n) { n.clone() } else { format!("{prefix}{i}") };
            while taken.contains(&s) {
                s.push('_');
            }
            taken.insert(s.clone());
            s
        })
        .collect()
}

pub fn canonical_language(c: &FinCat) -> CanonicalSignature {
    let mut taken = BTreeSet::new();
    let sorts = names(&c.objects, "o", &mut taken);
    let raw: Vec<String> = c.arrows.iter().map(|a| a.name.clone()).collect();
    let symbols = names(&raw, "a", &mut taken);
    let mut signature = Signature::new();
    for s in &sorts {
        signature = signature.with_sort(s.clone());
    }
    for (i, a) in c.arrows.iter().enumerate() {
        signature = signature.with_function(symbols[i].clone(), &[&sorts[a.src]], &sorts[a.tgt]);
    }
    CanonicalSignature { signature, sorts, symbols }
}

impl CanonicalSignature {
    /// The fragment as a structure over this signature: each sort is its
    /// object's carrier, each symbol its arrow's function.
    pub fn identical_interpretation(&self, frag: &SetFragment) -> FinStructure {
        let carriers: BTreeMap<String, Vec<String>> =
            self.sorts.iter().cloned().zip(frag.carriers.iter().cloned()).collect();
        let functions = self
            .symbols
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let n = frag.size(frag.cat.src(i));
                (f.clone(), FunctionTable { arg_sizes: vec![n], values: frag.funcs[i].clone() })
            })
            .collect();
        FinStructure { carriers, relations: BTreeMap::new(), functions }
    }
}

/// The sequents of the characterization table for one marked diagram.
pub fn internal_sequents(c: &FinCat, m: &Marker) -> Result<Vec<Sequent>, CanonError> {
    crate::fincat::marker_shape(c, m).map_err(CanonError::Shape)?;
    let l = canonical_language(c);
    Ok(sequents_in(&l, c, m))
}

fn sequents_in(l: &CanonicalSignature, c: &FinCat, m: &Marker) -> Vec<Sequent> {
    let sort = |o: usize| l.sorts[o].as_str();
    let ap = |f: usize, t: Term| Term::app(l.symbols[f].clone(), vec![t]);
    let v = |s: &str| Term::var(s);
    let ctx = |pairs: &[(&str, &str)]| Context::from_pairs(pairs);
    let seq = Sequent::new;
    let top = Formula::top;
    match m {
        Marker::Identity(f) => {
            vec![seq(ctx(&[("a", sort(c.src(*f)))]), top(), Formula::eq(ap(*f, v("a")), v("a")))]
        }
        Marker::Triangle { f, g, h } => {
            vec![seq(ctx(&[("a", sort(c.src(*f)))]), top(), Formula::eq(ap(*g, ap(*f, v("a"))), ap(*h, v("a"))))]
        }
        Marker::Mono(f) => {
            let a = sort(c.src(*f));
            vec![seq(
                ctx(&[("a", a), ("a'", a)]),
                Formula::eq(ap(*f, v("a")), ap(*f, v("a'"))),
                Formula::eq(v("a"), v("a'")),
            )]
        }
        Marker::Surjective(f) => vec![seq(
            ctx(&[("b", sort(c.tgt(*f)))]),
            top(),
            Formula::exists("a", sort(c.src(*f)), Formula::eq(ap(*f, v("a")), v("b"))),
        )],
        Marker::Terminal(o) => vec![
            seq(ctx(&[("a", sort(*o)), ("a'", sort(*o))]), top(), Formula::eq(v("a"), v("a'"))),
            seq(Context::new(), top(), Formula::exists("a", sort(*o), Formula::eq(v("a"), v("a")))),
        ],
        Marker::Initial(o) => vec![seq(ctx(&[("a", sort(*o))]), Formula::eq(v("a"), v("a")), Formula::bottom())],
        Marker::Product { f, g } => {
            let cs = sort(c.src(*f));
            vec![
                seq(
                    ctx(&[("c", cs), ("c'", cs)]),
                    Formula::and([
                        Formula::eq(ap(*f, v("c")), ap(*f, v("c'"))),
                        Formula::eq(ap(*g, v("c")), ap(*g, v("c'"))),
                    ]),
                    Formula::eq(v("c"), v("c'")),
                ),
                seq(
                    ctx(&[("a", sort(c.tgt(*f))), ("b", sort(c.tgt(*g)))]),
                    top(),
                    Formula::exists(
                        "c",
                        cs,
                        Formula::and([Formula::eq(ap(*f, v("c")), v("a")), Formula::eq(ap(*g, v("c")), v("b"))]),
                    ),
                ),
            ]
        }
        Marker::Equalizer { eps, f, g } => {
            let a = ctx(&[("a", sort(c.src(*f)))]);
            let fork = Formula::eq(ap(*f, v("a")), ap(*g, v("a")));
            let lifted = Formula::exists("e", sort(c.src(*eps)), Formula::eq(ap(*eps, v("e")), v("a")));
            vec![seq(a.clone(), fork.clone(), lifted.clone()), seq(a, lifted, fork)]
        }
        Marker::Sup { g, family } | Marker::Inf { g, family } => {
            let x = ctx(&[("x", sort(c.tgt(*g)))]);
            let parts: Vec<Formula> = family
                .iter()
                .enumerate()
                .map(|(i, &fi)| {
                    let ai = format!("a{}", i + 1);
                    Formula::exists(ai.clone(), sort(c.src(fi)), Formula::eq(ap(fi, v(&ai)), v("x")))
                })
                .collect();
            let joined = if matches!(m, Marker::Sup { .. }) { Formula::or(parts) } else { Formula::and(parts) };
            let lifted = Formula::exists("b", sort(c.src(*g)), Formula::eq(ap(*g, v("b")), v("x")));
            vec![seq(x.clone(), joined.clone(), lifted.clone()), seq(x, lifted, joined)]
        }
    }
}

/// Identities of every object, every commutative triangle of non-identity
/// arrows from the composition table, then the declared markers.
pub fn internal_theory(c: &FinCat) -> Theory {
    let l = canonical_language(c);
    let mut thy = Theory::new(l.signature.clone());
    for o in 0..c.n_objects() {
        thy.axioms.extend(sequents_in(&l, c, &Marker::Identity(c.id(o))));
    }
    for (g, f) in c.composable_pairs() {
        if !c.is_identity(f) && !c.is_identity(g) {
            thy.axioms.extend(sequents_in(&l, c, &Marker::Triangle { f, g, h: c.comp(g, f) }));
        }
    }
    for m in &c.markers {
        if !matches!(m, Marker::Identity(_) | Marker::Triangle { .. }) && crate::fincat::marker_shape(c, m).is_ok() {
            thy.axioms.extend(sequents_in(&l, c, m));
        }
    }
    thy
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verification {
    /// The property checked directly on the functions.
    pub semantic: bool,
    /// The row's sequents hold under the identical interpretation.
    pub sequent: bool,
    pub agree: bool,
}

/// Compares the property of a well-shaped marked diagram with the
/// validity of its sequents.
pub fn verify_diagram_property(frag: &SetFragment, m: &Marker) -> Result<Verification, CanonError> {
    well_shaped(frag, m).map_err(CanonError::Shape)?;
    let l = canonical_language(&frag.cat);
    let model = l.identical_interpretation(frag);
    let semantic = concrete_property(frag, m);
    let sequent = sequents_in(&l, &frag.cat, m).iter().all(|s| holds_sequent(&model, s));
    Ok(Verification { semantic, sequent, agree: semantic == sequent })
}
