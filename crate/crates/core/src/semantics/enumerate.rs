use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value};

use super::interp::is_model;
use super::structure::{tuples, FinStructure, FunctionTable};
use super::SemanticsError;
use crate::logic::{Signature, Theory};

/// Default cap on the number of candidate structures or maps examined.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// Mixed-radix odometer, last digit fastest.
struct Odometer {
    radix: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radix: Vec<usize>) -> Self {
        let done = radix.iter().any(|&r| r == 0);
        Odometer { digits: vec![0; radix.len()], radix, done }
    }

    fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.digits)
        }
    }

    fn advance(&mut self) {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radix[i] {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

/// Number of structures over `sig` with the given carrier sizes.
pub fn space_size(sig: &Signature, sizes: &BTreeMap<String, usize>) -> u128 {
    let n = |s: &String| *sizes.get(s).unwrap_or(&0) as u128;
    let mut total: u128 = 1;
    for args in sig.relations.values() {
        let cells: u128 = args.iter().map(n).product();
        total = total.saturating_mul(if cells >= 127 { u128::MAX } else { 1u128 << cells });
    }
    for ty in sig.functions.values() {
        let cells: u128 = ty.args.iter().map(n).product();
        let r = n(&ty.result);
        let count = if cells == 0 {
            1
        } else if r == 0 {
            0
        } else {
            r.checked_pow(cells.min(u32::MAX as u128) as u32).unwrap_or(u128::MAX)
        };
        total = total.saturating_mul(count);
    }
    total
}

/// Calls `visit` on every structure over `sig` with carriers of exactly
/// `sizes`, in canonical order; stops early when `visit` returns false.
pub fn for_each_structure(
    sig: &Signature,
    sizes: &BTreeMap<String, usize>,
    mut visit: impl FnMut(&FinStructure) -> bool,
) -> bool {
    let n = |s: &String| *sizes.get(s).unwrap_or(&0);
    let mut rel_cells = Vec::new();
    let mut radix = Vec::new();
    for (r, args) in &sig.relations {
        let ts = tuples(&args.iter().map(n).collect::<Vec<_>>());
        radix.extend(std::iter::repeat(2).take(ts.len()));
        rel_cells.push((r.clone(), ts));
    }
    let mut fun_cells = Vec::new();
    for (f, ty) in &sig.functions {
        let arg_sizes: Vec<usize> = ty.args.iter().map(n).collect();
        let cells: usize = arg_sizes.iter().product();
        radix.extend(std::iter::repeat(n(&ty.result)).take(cells));
        fun_cells.push((f.clone(), arg_sizes, cells));
    }
    let base = FinStructure::with_sizes(&sig.sorts.iter().map(|s| (s.clone(), n(s))).collect());
    let mut odo = Odometer::new(radix);
    while let Some(d) = odo.current() {
        let mut m = base.clone();
        let mut k = 0;
        for (r, ts) in &rel_cells {
            let mut set = BTreeSet::new();
            for t in ts {
                if d[k] == 1 {
                    set.insert(t.clone());
                }
                k += 1;
            }
            m.relations.insert(r.clone(), set);
        }
        for (f, arg_sizes, cells) in &fun_cells {
            m.functions
                .insert(f.clone(), FunctionTable { arg_sizes: arg_sizes.clone(), values: d[k..k + cells].to_vec() });
            k += cells;
        }
        if !visit(&m) {
            return false;
        }
        odo.advance();
    }
    true
}

/// All carrier-size assignments with every sort of size `≤ k`, first sort
/// most significant.
pub fn size_vectors(sig: &Signature, min: usize, k: usize) -> Vec<BTreeMap<String, usize>> {
    let sorts: Vec<&String> = sig.sorts.iter().collect();
    if k < min {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut odo = Odometer::new(vec![k + 1 - min; sorts.len()]);
    while let Some(d) = odo.current() {
        out.push(sorts.iter().zip(d).map(|(s, &i)| ((*s).clone(), i + min)).collect());
        odo.advance();
    }
    out
}

fn check_budget(needed: u128, budget: u128) -> Result<(), SemanticsError> {
    if needed > budget {
        Err(SemanticsError::Budget { needed, budget })
    } else {
        Ok(())
    }
}

/// All models with each carrier of size at most `k`, raw labelled
/// structures in canonical order.
pub fn enumerate_models(thy: &Theory, k: usize, budget: u128) -> Result<Vec<FinStructure>, SemanticsError> {
    enumerate_models_between(thy, 0, k, budget)
}

/// As [`enumerate_models`] with carrier sizes in `min..=k`.
pub fn enumerate_models_between(
    thy: &Theory,
    min: usize,
    k: usize,
    budget: u128,
) -> Result<Vec<FinStructure>, SemanticsError> {
    let vs = size_vectors(&thy.signature, min, k);
    let needed = vs.iter().fold(0u128, |acc, v| acc.saturating_add(space_size(&thy.signature, v)));
    check_budget(needed, budget)?;
    let mut out = Vec::new();
    for v in &vs {
        for_each_structure(&thy.signature, v, |m| {
            if is_model(m, thy) {
                out.push(m.clone());
            }
            true
        });
    }
    Ok(out)
}

/// Models with carriers of exactly the given sizes.
pub fn enumerate_models_sized(
    thy: &Theory,
    sizes: &BTreeMap<String, usize>,
    budget: u128,
) -> Result<Vec<FinStructure>, SemanticsError> {
    check_budget(space_size(&thy.signature, sizes), budget)?;
    let mut out = Vec::new();
    for_each_structure(&thy.signature, sizes, |m| {
        if is_model(m, thy) {
            out.push(m.clone());
        }
        true
    });
    Ok(out)
}

/// First structure (carriers `≤ k`) satisfying `pred`, in canonical order.
pub fn find_structure(
    sig: &Signature,
    k: usize,
    budget: u128,
    mut pred: impl FnMut(&FinStructure) -> bool,
) -> Result<Option<FinStructure>, SemanticsError> {
    let vs = size_vectors(sig, 0, k);
    let needed = vs.iter().fold(0u128, |acc, v| acc.saturating_add(space_size(sig, v)));
    check_budget(needed, budget)?;
    for v in &vs {
        let mut found = None;
        for_each_structure(sig, v, |m| {
            if pred(m) {
                found = Some(m.clone());
                false
            } else {
                true
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// A sort-indexed family of maps between carriers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Homomorphism {
    pub maps: BTreeMap<String, Vec<usize>>,
}

impl Homomorphism {
    pub fn identity(m: &FinStructure) -> Self {
        Homomorphism { maps: m.carriers.iter().map(|(s, c)| (s.clone(), (0..c.len()).collect())).collect() }
    }

    pub fn to_json(&self, src: &FinStructure, tgt: &FinStructure) -> Value {
        let mut out = Map::new();
        for (s, f) in &self.maps {
            let m: Map<String, Value> = f
                .iter()
                .enumerate()
                .map(|(i, &j)| (src.carriers[s][i].clone(), Value::String(tgt.carriers[s][j].clone())))
                .collect();
            out.insert(s.clone(), Value::Object(m));
        }
        Value::Object(out)
    }
}

/// Both homomorphism conditions: function squares commute and relation
/// images land inside the target relations.
pub fn is_homomorphism(a: &Homomorphism, m: &FinStructure, n: &FinStructure, sig: &Signature) -> bool {
    for s in &sig.sorts {
        let Some(f) = a.maps.get(s) else { return false };
        if f.len() != m.size(s) || f.iter().any(|&x| x >= n.size(s)) {
            return false;
        }
    }
    let map = |s: &String, x: usize| a.maps[s][x];
    for (r, args) in &sig.relations {
        let target = n.relation(r);
        for t in m.relation(r) {
            let img: Vec<usize> = t.iter().zip(args).map(|(&x, s)| map(s, x)).collect();
            if !target.contains(&img) {
                return false;
            }
        }
    }
    for (f, ty) in &sig.functions {
        let (tm, tn) = (&m.functions[f], &n.functions[f]);
        for args in tm.domain() {
            let img: Vec<usize> = args.iter().zip(&ty.args).map(|(&x, s)| map(s, x)).collect();
            if map(&ty.result, tm.apply(&args)) != tn.apply(&img) {
                return false;
            }
        }
    }
    true
}

/// All homomorphisms `m → n` in canonical order.
pub fn enumerate_homs(
    m: &FinStructure,
    n: &FinStructure,
    sig: &Signature,
    budget: u128,
) -> Result<Vec<Homomorphism>, SemanticsError> {
    let sorts: Vec<&String> = sig.sorts.iter().collect();
    let needed = sorts.iter().fold(1u128, |acc, s| {
        let (a, b) = (m.size(s) as u32, n.size(s) as u128);
        acc.saturating_mul(b.checked_pow(a).unwrap_or(u128::MAX))
    });
    check_budget(needed, budget)?;
    let mut radix = Vec::new();
    for s in &sorts {
        radix.extend(std::iter::repeat(n.size(s)).take(m.size(s)));
    }
    let mut out = Vec::new();
    let mut odo = Odometer::new(radix);
    while let Some(d) = odo.current() {
        let mut k = 0;
        let mut maps = BTreeMap::new();
        for s in &sorts {
            maps.insert((*s).clone(), d[k..k + m.size(s)].to_vec());
            k += m.size(s);
        }
        let h = Homomorphism { maps };
        if is_homomorphism(&h, m, n, sig) {
            out.push(h);
        }
        odo.advance();
    }
    Ok(out)
}
