//! Lexer and recursive-descent parser for the theory text format.
//!
//! ```text
//! sort s.
//! fun f : s * s -> s.
//! rel R : s * s.
//! axiom [x:s, y:s] R(x,y) & R(y,x) => x = y.
//! ```
//!
//! Precedence from loosest to tightest: `->` (right associative), `|`, `&`,
//! then the prefix forms `~`, `exists`, `forall`. A quantifier body extends
//! over a single prefix-level formula, so `exists y:s. A(y) & B(y)` reads as
//! `(exists y:s. A(y)) & B(y)`. Sort annotations on binders and context
//! variables may be omitted when they can be inferred from use.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::syntax::{Context, Formula, FunctionType, Sequent, Signature, Term, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Amp,
    Bar,
    Tilde,
    Arrow,
    FatArrow,
    Eq,
    Star,
    Colon,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Tilde => "`~`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::Eq => "`=`",
            Tok::Star => "`*`",
            Tok::Colon => "`:`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('=', Some('>')) => (Tok::FatArrow, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', _) => (Tok::Eq, 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Bar, 1),
            ('~', _) => (Tok::Tilde, 1),
            ('*', _) => (Tok::Star, 1),
            (':', _) => (Tok::Colon, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            _ => return Err(err(l0, c0, format!("unexpected character {c:?}"))),
        };
        i += len;
        col += len;
        out.push((tok, l0, c0));
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

const KEYWORDS: &[&str] = &["true", "false", "exists", "forall", "sort", "fun", "rel", "axiom"];

/// Sort of a subterm during parsing: known, or an inference variable.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Known(String),
    Hole(usize),
}

const HOLE_PREFIX: &str = "\u{0}?";

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    sig: Signature,
    scope: Vec<(String, Slot)>,
    holes: Vec<Option<String>>,
    hole_names: Vec<String>,
    links: Vec<(Slot, Slot)>,
}

impl Parser {
    fn new(src: &str, sig: &Signature) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            sig: sig.clone(),
            scope: Vec::new(),
            holes: Vec::new(),
            hole_names: Vec::new(),
            links: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError { line, col, message: message.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {t}"))),
        }
    }

    fn new_hole(&mut self, var: &str) -> Slot {
        self.holes.push(None);
        self.hole_names.push(var.to_string());
        Slot::Hole(self.holes.len() - 1)
    }

    fn slot_string(slot: &Slot) -> String {
        match slot {
            Slot::Known(s) => s.clone(),
            Slot::Hole(k) => format!("{HOLE_PREFIX}{k}"),
        }
    }

    /// Optional `: sort` after a bound variable; a hole when absent.
    fn binder_sort(&mut self, var: &str) -> Result<Slot, ParseError> {
        if self.eat(&Tok::Colon) {
            Ok(Slot::Known(self.ident()?))
        } else {
            Ok(self.new_hole(var))
        }
    }

    fn context(&mut self) -> Result<Vec<(String, Slot)>, ParseError> {
        let mut out = Vec::new();
        self.expect(Tok::LBrack)?;
        if self.eat(&Tok::RBrack) {
            return Ok(out);
        }
        loop {
            let v = self.ident()?;
            if out.iter().any(|(w, _)| w == &v) {
                return Err(self.error(format!("variable {v} occurs twice in the context")));
            }
            let s = self.binder_sort(&v)?;
            out.push((v, s));
            if self.eat(&Tok::RBrack) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&Tok::Bar) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::and(parts) })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("exists") || self.is_keyword("forall") {
            let universal = self.is_keyword("forall");
            self.bump();
            let mut binders = Vec::new();
            loop {
                let v = self.ident()?;
                let s = self.binder_sort(&v)?;
                binders.push((v, s));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Dot)?;
            let depth = self.scope.len();
            self.scope.extend(binders.iter().cloned());
            let body = self.unary();
            self.scope.truncate(depth);
            let mut body = body?;
            for (v, s) in binders.into_iter().rev() {
                let s = Self::slot_string(&s);
                body = if universal { Formula::forall(v, s, body) } else { Formula::exists(v, s, body) };
            }
            return Ok(body);
        }
        if self.is_keyword("true") {
            self.bump();
            return Ok(Formula::top());
        }
        if self.is_keyword("false") {
            self.bump();
            return Ok(Formula::bottom());
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            if self.peek() == &Tok::Eq {
                return Err(self.error("a parenthesized formula cannot be an equation side"));
            }
            return Ok(f);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let name = self.ident()?;
        if self.peek() == &Tok::Eq {
            let (lhs, ls) = self.term_after_name(name)?;
            return self.equation_rest(lhs, ls);
        }
        if self.peek() != &Tok::LParen {
            if self.in_scope(&name) {
                return Err(self.error(format!("variable {name} used as a formula")));
            }
            return Ok(Formula::rel(name, Vec::new()));
        }
        let args = self.arguments()?;
        if self.peek() == &Tok::Eq {
            let (lhs, ls) = self.application(name, args);
            return self.equation_rest(lhs, ls);
        }
        let arity = self.sig.relations.get(&name).cloned().unwrap_or_default();
        let mut terms = Vec::new();
        for (i, (t, slot)) in args.into_iter().enumerate() {
            if let Some(want) = arity.get(i) {
                self.links.push((slot, Slot::Known(want.clone())));
            }
            terms.push(t);
        }
        Ok(Formula::rel(name, terms))
    }

    fn equation_rest(&mut self, lhs: Term, ls: Slot) -> Result<Formula, ParseError> {
        self.expect(Tok::Eq)?;
        let (rhs, rs) = self.term()?;
        self.links.push((ls, rs));
        Ok(Formula::eq(lhs, rhs))
    }

    fn application(&mut self, name: String, args: Vec<(Term, Slot)>) -> (Term, Slot) {
        let ty = self.sig.functions.get(&name).cloned();
        let mut terms = Vec::new();
        for (i, (t, slot)) in args.into_iter().enumerate() {
            if let Some(want) = ty.as_ref().and_then(|ty| ty.args.get(i)) {
                self.links.push((slot, Slot::Known(want.clone())));
            }
            terms.push(t);
        }
        let slot = match ty {
            Some(ty) => Slot::Known(ty.result),
            None => self.new_hole(""),
        };
        (Term::App(name, terms), slot)
    }

    fn in_scope(&self, v: &str) -> bool {
        self.scope.iter().any(|(w, _)| w == v)
    }

    fn arguments(&mut self) -> Result<Vec<(Term, Slot)>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn term(&mut self) -> Result<(Term, Slot), ParseError> {
        let name = self.ident()?;
        self.term_after_name(name)
    }

    fn term_after_name(&mut self, name: String) -> Result<(Term, Slot), ParseError> {
        if self.peek() == &Tok::LParen {
            let args = self.arguments()?;
            return Ok(self.application(name, args));
        }
        match self.scope.iter().rev().find(|(w, _)| w == &name) {
            Some((_, slot)) => Ok((Term::Var(name), slot.clone())),
            None => match self.sig.functions.get(&name) {
                Some(ty) if ty.args.is_empty() => Ok((Term::App(name, Vec::new()), Slot::Known(ty.result.clone()))),
                _ => Err(self.error(format!("variable {name} is not in the context"))),
            },
        }
    }

    /// Solves the collected sort constraints and returns the hole assignment.
    fn solve(&mut self) -> Result<BTreeMap<String, String>, ParseError> {
        let n = self.holes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut known: Vec<Option<String>> = self.holes.clone();
        for (a, b) in &self.links {
            match (a, b) {
                (Slot::Hole(i), Slot::Hole(j)) => {
                    let (ri, rj) = (find(&mut parent, *i), find(&mut parent, *j));
                    if ri != rj {
                        parent[rj] = ri;
                        if known[ri].is_none() {
                            known[ri] = known[rj].clone();
                        }
                    }
                }
                (Slot::Hole(i), Slot::Known(s)) | (Slot::Known(s), Slot::Hole(i)) => {
                    let r = find(&mut parent, *i);
                    if known[r].is_none() {
                        known[r] = Some(s.clone());
                    }
                }
                _ => {}
            }
        }
        let mut out = BTreeMap::new();
        for k in 0..n {
            let r = find(&mut parent, k);
            match &known[r] {
                Some(s) => {
                    out.insert(format!("{HOLE_PREFIX}{k}"), s.clone());
                }
                None if self.hole_names[k].is_empty() => {}
                None => {
                    return Err(ParseError {
                        line: 0,
                        col: 0,
                        message: format!("cannot infer the sort of {}", self.hole_names[k]),
                    })
                }
            }
        }
        Ok(out)
    }

    fn reset_constraints(&mut self) {
        self.holes.clear();
        self.hole_names.clear();
        self.links.clear();
        self.scope.clear();
    }

    /// Parses `[ctx] lhs => rhs` (context and lhs optional) and resolves sorts.
    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let (line, col) = (self.toks[self.pos].1, self.toks[self.pos].2);
        self.reset_constraints();
        let ctx = if self.peek() == &Tok::LBrack { self.context()? } else { Vec::new() };
        self.scope = ctx.clone();
        let lhs = if self.peek() == &Tok::FatArrow { Formula::top() } else { self.formula()? };
        self.expect(Tok::FatArrow)?;
        let rhs = self.formula()?;
        let (ctx, fs) = self.finish(ctx, vec![lhs, rhs]).map_err(|e| at(e, line, col))?;
        let mut it = fs.into_iter();
        let lhs = it.next().unwrap();
        let rhs = it.next().unwrap();
        Ok(Sequent::new(ctx, lhs, rhs))
    }

    fn finish(&mut self, ctx: Vec<(String, Slot)>, fs: Vec<Formula>) -> Result<(Context, Vec<Formula>), ParseError> {
        let assign = self.solve()?;
        let fix = |s: &str| assign.get(s).cloned().unwrap_or_else(|| s.to_string());
        let ctx = Context(ctx.into_iter().map(|(v, s)| (v, fix(&Self::slot_string(&s)))).collect());
        let fs = fs.into_iter().map(|f| f.map_sorts(&fix)).collect();
        Ok((ctx, fs))
    }
}

fn at(mut e: ParseError, line: usize, col: usize) -> ParseError {
    if e.line == 0 {
        e.line = line;
        e.col = col;
    }
    e
}

/// Parses a whole theory file. Declarations must precede their use.
pub fn parse_theory(src: &str) -> Result<Theory, ParseError> {
    let empty = Signature::new();
    let mut p = Parser::new(src, &empty)?;
    let mut sig = Signature::new();
    let mut axioms = Vec::new();
    loop {
        let kw = match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(s) => s,
            t => return Err(p.error(format!("expected a declaration, found {t}"))),
        };
        p.bump();
        match kw.as_str() {
            "sort" => {
                let name = p.ident()?;
                if sig.uses_name(&name) {
                    return Err(p.error(format!("duplicate declaration of {name}")));
                }
                sig.sorts.insert(name);
            }
            "fun" | "rel" => {
                let name = p.ident()?;
                if sig.uses_name(&name) {
                    return Err(p.error(format!("duplicate declaration of {name}")));
                }
                let mut args = Vec::new();
                if p.eat(&Tok::Colon) {
                    while let Tok::Ident(_) = p.peek() {
                        args.push(p.ident()?);
                        if !p.eat(&Tok::Star) {
                            break;
                        }
                    }
                }
                if kw == "fun" {
                    p.expect(Tok::Arrow)?;
                    let result = p.ident()?;
                    sig.functions.insert(name, FunctionType { args, result });
                } else {
                    sig.relations.insert(name, args);
                }
            }
            "axiom" => {
                p.sig = sig.clone();
                axioms.push(p.sequent()?);
            }
            other => {
                p.pos -= 1;
                return Err(p.error(format!("unknown declaration keyword `{other}`")));
            }
        }
        p.expect(Tok::Dot)?;
    }
    Ok(Theory { signature: sig, axioms })
}

/// Parses a sequent `[ctx] lhs => rhs` over `sig`.
pub fn parse_sequent(sig: &Signature, src: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(src, sig)?;
    let s = p.sequent()?;
    p.eat(&Tok::Dot);
    p.expect(Tok::Eof)?;
    Ok(s)
}

/// Parses a formula whose free variables are bound by `ctx`.
pub fn parse_formula(sig: &Signature, ctx: &Context, src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, sig)?;
    p.scope = ctx.0.iter().map(|(v, s)| (v.clone(), Slot::Known(s.clone()))).collect();
    let f = p.formula()?;
    p.expect(Tok::Eof)?;
    let (_, mut fs) = p.finish(Vec::new(), vec![f])?;
    Ok(fs.pop().unwrap())
}

/// Parses a formula in context, `[x:s, y:t] φ`. The context may be omitted
/// when the formula is closed.
pub fn parse_context(sig: &Signature, src: &str) -> Result<(Context, Formula), ParseError> {
    let mut p = Parser::new(src, sig)?;
    let ctx = if p.peek() == &Tok::LBrack { p.context()? } else { Vec::new() };
    p.scope = ctx.clone();
    let f = if p.peek() == &Tok::Eof { Formula::top() } else { p.formula()? };
    p.expect(Tok::Eof)?;
    let (ctx, mut fs) = p.finish(ctx, vec![f])?;
    Ok((ctx, fs.pop().unwrap()))
}

/// Parses a term over `ctx`.
pub fn parse_term(sig: &Signature, ctx: &Context, src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, sig)?;
    p.scope = ctx.0.iter().map(|(v, s)| (v.clone(), Slot::Known(s.clone()))).collect();
    let (t, _) = p.term()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}
