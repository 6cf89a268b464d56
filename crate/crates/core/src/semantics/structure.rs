use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use super::SemanticsError;
use crate::logic::{Context, Signature};

/// Total function table, row-major over the argument carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionTable {
    pub arg_sizes: Vec<usize>,
    pub values: Vec<usize>,
}

impl FunctionTable {
    pub fn index(&self, args: &[usize]) -> usize {
        args.iter().zip(&self.arg_sizes).fold(0, |acc, (a, n)| acc * n + a)
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.values[self.index(args)]
    }

    /// Argument tuples in table order.
    pub fn domain(&self) -> Vec<Vec<usize>> {
        tuples(&self.arg_sizes)
    }
}

/// All tuples of `sizes`, lexicographically ordered.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for i in 0..n {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// A finite structure for a many-sorted signature. Elements of a sort are
/// indices into its carrier; the carrier holds their display labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinStructure {
    pub carriers: BTreeMap<String, Vec<String>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub functions: BTreeMap<String, FunctionTable>,
}

impl FinStructure {
    /// Carriers labelled `0..n` for each sort, everything else empty.
    pub fn with_sizes(sizes: &BTreeMap<String, usize>) -> Self {
        FinStructure {
            carriers: sizes.iter().map(|(s, &n)| (s.clone(), (0..n).map(|i| i.to_string()).collect())).collect(),
            ..Default::default()
        }
    }

    pub fn size(&self, sort: &str) -> usize {
        self.carriers.get(sort).map_or(0, Vec::len)
    }

    pub fn sizes(&self) -> BTreeMap<String, usize> {
        self.carriers.iter().map(|(s, c)| (s.clone(), c.len())).collect()
    }

    pub fn ctx_sizes(&self, ctx: &Context) -> Vec<usize> {
        ctx.sorts().map(|s| self.size(s)).collect()
    }

    /// `M(x⃗)`: all tuples of the context, lexicographically.
    pub fn product(&self, ctx: &Context) -> Vec<Vec<usize>> {
        tuples(&self.ctx_sizes(ctx))
    }

    pub fn relation(&self, r: &str) -> &BTreeSet<Vec<usize>> {
        static EMPTY: BTreeSet<Vec<usize>> = BTreeSet::new();
        self.relations.get(r).unwrap_or(&EMPTY)
    }

    /// Fills in empty relations and checks that every symbol of `sig` is
    /// interpreted with the right shape.
    pub fn check(&self, sig: &Signature) -> Result<(), SemanticsError> {
        let bad = |m: String| Err(SemanticsError::Structure(m));
        for s in &sig.sorts {
            if !self.carriers.contains_key(s) {
                return bad(format!("no carrier for sort {s}"));
            }
        }
        for (r, args) in &sig.relations {
            let sizes: Vec<usize> = args.iter().map(|s| self.size(s)).collect();
            for t in self.relation(r) {
                if t.len() != sizes.len() || t.iter().zip(&sizes).any(|(a, n)| a >= n) {
                    return bad(format!("tuple {t:?} of {r} lies outside the carriers"));
                }
            }
        }
        for (f, ty) in &sig.functions {
            let Some(tab) = self.functions.get(f) else {
                return bad(format!("no table for function {f}"));
            };
            let sizes: Vec<usize> = ty.args.iter().map(|s| self.size(s)).collect();
            let n: usize = sizes.iter().product();
            if tab.arg_sizes != sizes || tab.values.len() != n {
                return bad(format!("table of {f} is not total"));
            }
            if tab.values.iter().any(|&v| v >= self.size(&ty.result)) {
                return bad(format!("table of {f} leaves the carrier of {}", ty.result));
            }
        }
        Ok(())
    }

    /// Reduct to the symbols of `sig`.
    pub fn restrict(&self, sig: &Signature) -> FinStructure {
        FinStructure {
            carriers: self
                .carriers
                .iter()
                .filter(|(s, _)| sig.sorts.contains(*s))
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
            relations: self
                .relations
                .iter()
                .filter(|(r, _)| sig.relations.contains_key(*r))
                .map(|(r, t)| (r.clone(), t.clone()))
                .collect(),
            functions: self
                .functions
                .iter()
                .filter(|(f, _)| sig.functions.contains_key(*f))
                .map(|(f, t)| (f.clone(), t.clone()))
                .collect(),
        }
    }

    /// JSON form `{"sorts":{..},"rels":{..},"funs":{..}}` using labels.
    pub fn to_json(&self, sig: &Signature) -> Value {
        let label = |s: &str, i: usize| self.carriers[s][i].clone();
        let mut sorts = Map::new();
        for (s, c) in &self.carriers {
            sorts.insert(s.clone(), json!(c));
        }
        let mut rels = Map::new();
        for (r, args) in &sig.relations {
            let ts: Vec<Vec<String>> =
                self.relation(r).iter().map(|t| t.iter().zip(args).map(|(&a, s)| label(s, a)).collect()).collect();
            rels.insert(r.clone(), json!(ts));
        }
        let mut funs = Map::new();
        for (f, ty) in &sig.functions {
            let tab = &self.functions[f];
            let mut m = Map::new();
            for args in tab.domain() {
                let key: Vec<String> = args.iter().zip(&ty.args).map(|(&a, s)| label(s, a)).collect();
                m.insert(key.join(","), json!(label(&ty.result, tab.apply(&args))));
            }
            funs.insert(f.clone(), Value::Object(m));
        }
        json!({"sorts": sorts, "rels": rels, "funs": funs})
    }

    pub fn from_json(sig: &Signature, v: &Value) -> Result<FinStructure, SemanticsError> {
        let err = |m: String| SemanticsError::Json(m);
        let mut out = FinStructure::default();
        let sorts = v.get("sorts").and_then(Value::as_object).ok_or_else(|| err("missing \"sorts\"".into()))?;
        for (s, c) in sorts {
            let labels: Vec<String> = c
                .as_array()
                .ok_or_else(|| err(format!("carrier of {s} is not an array")))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                .collect();
            let distinct: BTreeSet<&String> = labels.iter().collect();
            if distinct.len() != labels.len() {
                return Err(err(format!("carrier of {s} repeats a label")));
            }
            out.carriers.insert(s.clone(), labels);
        }
        for s in &sig.sorts {
            out.carriers.entry(s.clone()).or_default();
        }
        let index = |out: &FinStructure, s: &str, x: &Value| -> Result<usize, SemanticsError> {
            let l = x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
            out.carriers
                .get(s)
                .and_then(|c| c.iter().position(|y| *y == l))
                .ok_or_else(|| err(format!("{l} is not an element of {s}")))
        };
        let empty = Map::new();
        let rels = v.get("rels").and_then(Value::as_object).unwrap_or(&empty);
        for (r, ts) in rels {
            let args = sig.relations.get(r).ok_or_else(|| err(format!("unknown relation {r}")))?;
            let mut set = BTreeSet::new();
            for t in ts.as_array().ok_or_else(|| err(format!("{r} is not an array")))? {
                let t = t.as_array().ok_or_else(|| err(format!("tuple of {r} is not an array")))?;
                if t.len() != args.len() {
                    return Err(err(format!("tuple of {r} has the wrong length")));
                }
                let tup = t.iter().zip(args).map(|(x, s)| index(&out, s, x)).collect::<Result<Vec<_>, _>>()?;
                set.insert(tup);
            }
            out.relations.insert(r.clone(), set);
        }
        for r in sig.relations.keys() {
            out.relations.entry(r.clone()).or_default();
        }
        let funs = v.get("funs").and_then(Value::as_object).unwrap_or(&empty);
        for (f, ty) in &sig.functions {
            let m = funs.get(f).and_then(Value::as_object).ok_or_else(|| err(format!("missing table for {f}")))?;
            let arg_sizes: Vec<usize> = ty.args.iter().map(|s| out.size(s)).collect();
            let mut tab = FunctionTable { arg_sizes: arg_sizes.clone(), values: Vec::new() };
            for args in tuples(&arg_sizes) {
                let key: Vec<String> = args.iter().zip(&ty.args).map(|(&a, s)| out.carriers[s][a].clone()).collect();
                let key = key.join(",");
                let val = m.get(&key).ok_or_else(|| err(format!("{f} is undefined at ({key})")))?;
                tab.values.push(index(&out, &ty.result, val)?);
            }
            out.functions.insert(f.clone(), tab);
        }
        out.check(sig)?;
        Ok(out)
    }
}
