use std::fmt::{self, Write as _};

use super::syntax::{Context, Formula, Sequent, Term, Theory};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// precedence levels: 0 implication, 1 disjunction, 2 conjunction, 3 prefix/atom
fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Implies(..) => 0,
        Formula::Or(ps) if ps.len() >= 2 => 1,
        Formula::And(ps) if ps.len() >= 2 => 2,
        _ => 3,
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    let paren = level(phi) < min;
    if paren {
        out.write_str("(")?;
    }
    match phi {
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Rel(r, ts) => {
            out.write_str(r)?;
            if !ts.is_empty() {
                out.write_str("(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        out.write_str(",")?;
                    }
                    write!(out, "{t}")?;
                }
                out.write_str(")")?;
            }
        }
        Formula::And(ps) if ps.is_empty() => out.write_str("true")?,
        Formula::Or(ps) if ps.is_empty() => out.write_str("false")?,
        // singletons only arise from unnormalized input
        Formula::And(ps) | Formula::Or(ps) if ps.len() == 1 => write_formula(out, &ps[0], 3)?,
        Formula::And(ps) => {
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    out.write_str(" & ")?;
                }
                write_formula(out, p, 3)?;
            }
        }
        Formula::Or(ps) => {
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    out.write_str(" | ")?;
                }
                write_formula(out, p, 2)?;
            }
        }
        Formula::Exists(v, s, b) => {
            write!(out, "exists {v}:{s}. ")?;
            write_formula(out, b, 3)?;
        }
        Formula::Forall(v, s, b) => {
            write!(out, "forall {v}:{s}. ")?;
            write_formula(out, b, 3)?;
        }
        Formula::Not(b) => {
            out.write_str("~")?;
            write_formula(out, b, 3)?;
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, 1)?;
            out.write_str(" -> ")?;
            write_formula(out, b, 0)?;
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}:{s}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            write!(f, "{} ", self.ctx)?;
        }
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

/// Renders a theory in the text format accepted by [`super::parse_theory`].
pub fn theory_to_text(thy: &Theory) -> String {
    let sig = &thy.signature;
    let mut out = String::new();
    for s in &sig.sorts {
        let _ = writeln!(out, "sort {s}.");
    }
    for (name, ty) in &sig.functions {
        if ty.args.is_empty() {
            let _ = writeln!(out, "fun {name} : -> {}.", ty.result);
        } else {
            let _ = writeln!(out, "fun {name} : {} -> {}.", ty.args.join(" * "), ty.result);
        }
    }
    for (name, args) in &sig.relations {
        if args.is_empty() {
            let _ = writeln!(out, "rel {name}.");
        } else {
            let _ = writeln!(out, "rel {name} : {}.", args.join(" * "));
        }
    }
    for ax in &thy.axioms {
        let _ = writeln!(out, "axiom {ax}.");
    }
    out
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&theory_to_text(self))
    }
}
