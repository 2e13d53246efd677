//! Formulas of L_O: numerals, the predicates `O`, `W` and `=`, connectives,
//! quantifiers, and knowledge operators `K_i`.
//!
//! Surface syntax, loosest binding first:
//!
//! | form                         | notes                              |
//! |------------------------------|------------------------------------|
//! | `all x.φ`, `ex x.φ`          | body extends as far right as possible |
//! | `φ <-> ψ`                    | left associative                   |
//! | `φ -> ψ`                     | right associative                  |
//! | `φ \| ψ`                     | left associative                   |
//! | `φ & ψ`                      | left associative                   |
//! | `~φ`, `K3(φ)`, atoms         | atoms: `O(t)`, `W(t,u)`, `t=u`     |
//!
//! Terms are decimal numerals or lowercase identifiers other than `all`/`ex`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Num(u64),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Num(n) => write!(f, "{n}"),
            Term::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    O(Term),
    W(Term, Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
    K(u64, Box<Formula>),
}

pub fn num(n: u64) -> Term {
    Term::Num(n)
}

pub fn var(v: &str) -> Term {
    Term::Var(v.to_string())
}

impl Formula {
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn forall(x: &str, a: Formula) -> Formula {
        Formula::ForAll(x.to_string(), Box::new(a))
    }
    pub fn exists(x: &str, a: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(a))
    }
    pub fn k(agent: u64, a: Formula) -> Formula {
        Formula::K(agent, Box::new(a))
    }

    /// `∀y((∀x(W(x,y) → O(x))) → O(y))`
    pub fn axiom_of_o() -> Formula {
        Formula::forall(
            "y",
            Formula::implies(
                Formula::forall(
                    "x",
                    Formula::implies(Formula::W(var("x"), var("y")), Formula::O(var("x"))),
                ),
                Formula::O(var("y")),
            ),
        )
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::O(t) => term(t, bound),
            Formula::W(a, b) | Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(a) | Formula::K(_, a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Replaces free occurrences of `x` by the numeral `n`. Numerals are
    /// closed, so no capture can occur.
    pub fn instantiate(&self, x: &str, n: u64) -> Formula {
        let t = |t: &Term| match t {
            Term::Var(v) if v == x => Term::Num(n),
            other => other.clone(),
        };
        match self {
            Formula::O(a) => Formula::O(t(a)),
            Formula::W(a, b) => Formula::W(t(a), t(b)),
            Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
            Formula::Not(a) => Formula::not(a.instantiate(x, n)),
            Formula::K(i, a) => Formula::k(*i, a.instantiate(x, n)),
            Formula::And(a, b) => Formula::and(a.instantiate(x, n), b.instantiate(x, n)),
            Formula::Or(a, b) => Formula::or(a.instantiate(x, n), b.instantiate(x, n)),
            Formula::Implies(a, b) => Formula::implies(a.instantiate(x, n), b.instantiate(x, n)),
            Formula::Iff(a, b) => Formula::iff(a.instantiate(x, n), b.instantiate(x, n)),
            Formula::ForAll(y, _) | Formula::Exists(y, _) if y == x => self.clone(),
            Formula::ForAll(y, a) => Formula::forall(y, a.instantiate(x, n)),
            Formula::Exists(y, a) => Formula::exists(y, a.instantiate(x, n)),
        }
    }

    /// Bound variables renamed to `v1, v2, …` by binding depth, skipping
    /// names that occur free. Alphabetic variants share a canonical form.
    pub fn canonical(&self) -> Formula {
        let free = self.free_vars();
        self.canon(&mut HashMap::new(), 0, &free)
    }

    fn canon(&self, env: &mut HashMap<String, String>, depth: usize, free: &BTreeSet<String>) -> Formula {
        let t = |t: &Term, env: &HashMap<String, String>| match t {
            Term::Var(v) => Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
            n => n.clone(),
        };
        let bin = |a: &Formula, b: &Formula, env: &mut HashMap<String, String>| {
            (Box::new(a.canon(env, depth, free)), Box::new(b.canon(env, depth, free)))
        };
        match self {
            Formula::O(a) => Formula::O(t(a, env)),
            Formula::W(a, b) => Formula::W(t(a, env), t(b, env)),
            Formula::Eq(a, b) => Formula::Eq(t(a, env), t(b, env)),
            Formula::Not(a) => Formula::Not(Box::new(a.canon(env, depth, free))),
            Formula::K(i, a) => Formula::K(*i, Box::new(a.canon(env, depth, free))),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b, env);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b, env);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b, env);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b, env);
                Formula::Iff(a, b)
            }
            Formula::ForAll(x, a) | Formula::Exists(x, a) => {
                let mut k = depth + 1;
                let mut name = format!("v{k}");
                while free.contains(&name) {
                    k += 1;
                    name = format!("v{k}");
                }
                let saved = env.insert(x.clone(), name.clone());
                let body = Box::new(a.canon(env, k, free));
                match saved {
                    Some(s) => env.insert(x.clone(), s),
                    None => env.remove(x),
                };
                if matches!(self, Formula::ForAll(..)) {
                    Formula::ForAll(name, body)
                } else {
                    Formula::Exists(name, body)
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Numerals occurring anywhere in the formula.
    pub fn numerals(&self, out: &mut BTreeSet<u64>) {
        let mut t = |t: &Term| {
            if let Term::Num(n) = t {
                out.insert(*n);
            }
        };
        match self {
            Formula::O(a) => t(a),
            Formula::W(a, b) | Formula::Eq(a, b) => {
                t(a);
                t(b);
            }
            Formula::Not(a) | Formula::K(_, a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => {
                a.numerals(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.numerals(out);
                b.numerals(out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Validity

/// Propositional tautology check, treating atoms, quantified formulas and
/// `K` formulas as opaque letters (compared up to alphabetic variance).
pub fn is_tautology(f: &Formula) -> bool {
    let mut letters = Vec::new();
    collect_letters(f, &mut letters);
    if letters.len() > 16 {
        return false;
    }
    (0u32..(1 << letters.len())).all(|bits| eval_prop(f, &letters, bits))
}

fn collect_letters(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Not(a) => collect_letters(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_letters(a, out);
            collect_letters(b, out);
        }
        other => {
            let c = other.canonical();
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
}

fn eval_prop(f: &Formula, letters: &[Formula], bits: u32) -> bool {
    match f {
        Formula::Not(a) => !eval_prop(a, letters, bits),
        Formula::And(a, b) => eval_prop(a, letters, bits) && eval_prop(b, letters, bits),
        Formula::Or(a, b) => eval_prop(a, letters, bits) || eval_prop(b, letters, bits),
        Formula::Implies(a, b) => !eval_prop(a, letters, bits) || eval_prop(b, letters, bits),
        Formula::Iff(a, b) => eval_prop(a, letters, bits) == eval_prop(b, letters, bits),
        other => {
            let c = other.canonical();
            let i = letters.iter().position(|l| *l == c).expect("letter collected");
            bits & (1 << i) != 0
        }
    }
}

/// Splits `A₁ → (A₂ → … → C)` into premises and conclusion.
pub fn implication_chain(f: &Formula) -> (Vec<&Formula>, &Formula) {
    let mut premises = Vec::new();
    let mut cur = f;
    while let Formula::Implies(a, b) = cur {
        premises.push(a.as_ref());
        cur = b;
    }
    (premises, cur)
}

/// If `f` is `∀x.φ`, returns `φ` with `x` renamed to `fresh`.
fn open_forall(f: &Formula, fresh: &str) -> Option<Formula> {
    match f {
        Formula::ForAll(x, body) => Some(rename_free(body, x, fresh)),
        _ => None,
    }
}

fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    let t = |t: &Term| match t {
        Term::Var(v) if v == from => Term::Var(to.to_string()),
        other => other.clone(),
    };
    match f {
        Formula::O(a) => Formula::O(t(a)),
        Formula::W(a, b) => Formula::W(t(a), t(b)),
        Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
        Formula::Not(a) => Formula::not(rename_free(a, from, to)),
        Formula::K(i, a) => Formula::k(*i, rename_free(a, from, to)),
        Formula::And(a, b) => Formula::and(rename_free(a, from, to), rename_free(b, from, to)),
        Formula::Or(a, b) => Formula::or(rename_free(a, from, to), rename_free(b, from, to)),
        Formula::Implies(a, b) => {
            Formula::implies(rename_free(a, from, to), rename_free(b, from, to))
        }
        Formula::Iff(a, b) => Formula::iff(rename_free(a, from, to), rename_free(b, from, to)),
        Formula::ForAll(y, _) | Formula::Exists(y, _) if y == from => f.clone(),
        Formula::ForAll(y, a) => Formula::forall(y, rename_free(a, from, to)),
        Formula::Exists(y, a) => Formula::exists(y, rename_free(a, from, to)),
    }
}

/// `∀x.A₁ → … → ∀x.Aₖ → ∀x.C` is valid when `A₁ → … → Aₖ → C` is a
/// tautology for a fresh `x`.
pub fn is_uniform_quantifier_tautology(f: &Formula) -> bool {
    let (premises, conclusion) = implication_chain(f);
    if premises.is_empty() {
        return false;
    }
    let mut used = f.free_vars();
    let mut all = BTreeSet::new();
    collect_bound(f, &mut all);
    used.extend(all);
    let mut fresh = "c".to_string();
    while used.contains(&fresh) {
        fresh.push('c');
    }
    let mut opened = Vec::with_capacity(premises.len());
    for p in &premises {
        match open_forall(p, &fresh) {
            Some(o) => opened.push(o),
            None => return false,
        }
    }
    let Some(mut matrix) = open_forall(conclusion, &fresh) else { return false };
    for p in opened.into_iter().rev() {
        matrix = Formula::implies(p, matrix);
    }
    is_tautology(&matrix)
}

fn collect_bound(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::O(_) | Formula::W(..) | Formula::Eq(..) => {}
        Formula::Not(a) | Formula::K(_, a) => collect_bound(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_bound(a, out);
            collect_bound(b, out);
        }
        Formula::ForAll(x, a) | Formula::Exists(x, a) => {
            out.insert(x.clone());
            collect_bound(a, out);
        }
    }
}

/// `(∀y.φ) → φ[n/y]`
pub fn is_instantiation(f: &Formula) -> bool {
    let Formula::Implies(a, b) = f else { return false };
    let Formula::ForAll(y, body) = a.as_ref() else { return false };
    let mut nums = BTreeSet::new();
    b.numerals(&mut nums);
    nums.into_iter().any(|n| body.instantiate(y, n).alpha_eq(b))
        || body.alpha_eq(b) && !body.free_vars().contains(y)
}

/// The validity checks accepted as E1 instances.
pub fn is_valid_instance(f: &Formula) -> bool {
    is_tautology(f) || is_uniform_quantifier_tautology(f) || is_instantiation(f)
}

// ---------------------------------------------------------------------------
// Printing

const PREC_QUANT: u8 = 0;
const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::ForAll(..) | Formula::Exists(..) => PREC_QUANT,
        Formula::Iff(..) => PREC_IFF,
        Formula::Implies(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, a: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let infix = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, p: u8, right_assoc: bool| {
            let (pa, pb) = (prec(a), prec(b));
            let lp = pa == PREC_QUANT || if right_assoc { pa <= p } else { pa < p };
            let rp = pb == PREC_QUANT || if right_assoc { pb < p } else { pb <= p };
            write_operand(f, a, lp)?;
            write!(f, " {op} ")?;
            write_operand(f, b, rp)
        };
        match self {
            Formula::O(t) => write!(f, "O({t})"),
            Formula::W(a, b) => write!(f, "W({a},{b})"),
            Formula::Eq(a, b) => write!(f, "{a}={b}"),
            Formula::Not(a) => {
                f.write_str("~")?;
                write_operand(f, a, prec(a) < PREC_UNARY)
            }
            Formula::K(i, a) => write!(f, "K{i}({a})"),
            Formula::And(a, b) => infix(f, a, "&", b, PREC_AND, false),
            Formula::Or(a, b) => infix(f, a, "|", b, PREC_OR, false),
            Formula::Implies(a, b) => infix(f, a, "->", b, PREC_IMP, true),
            Formula::Iff(a, b) => infix(f, a, "<->", b, PREC_IFF, false),
            Formula::ForAll(x, a) => write!(f, "all {x}.{a}"),
            Formula::Exists(x, a) => write!(f, "ex {x}.{a}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("formula syntax error at byte {pos}: {msg}")]
pub struct FormulaError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), FormulaError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_lowercase()
            || (self.pos > start && self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'_'))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<Option<u64>, FormulaError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        text.parse().map(Some).or_else(|_| {
            self.pos = start;
            self.err("numeral too large")
        })
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        if let Some(n) = self.number()? {
            return Ok(Term::Num(n));
        }
        let save = self.pos;
        match self.ident() {
            Some(v) if v != "all" && v != "ex" => Ok(Term::Var(v)),
            _ => {
                self.pos = save;
                self.err("expected a numeral or variable")
            }
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut a = self.implies()?;
        while self.eat("<->") {
            let b = self.implies()?;
            a = Formula::iff(a, b);
        }
        Ok(a)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let a = self.or()?;
        if self.eat("->") {
            let b = self.implies()?;
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut a = self.and()?;
        while self.eat("|") {
            let b = self.and()?;
            a = Formula::or(a, b);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut a = self.unary()?;
        while self.eat("&") {
            let b = self.unary()?;
            a = Formula::and(a, b);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            None => return self.err("unexpected end of formula"),
            Some(b'~') => {
                self.pos += 1;
                return Ok(Formula::not(self.unary()?));
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(")")?;
                return Ok(f);
            }
            Some(b'O') | Some(b'W') => {
                let pred = self.s[self.pos];
                self.pos += 1;
                self.expect("(")?;
                let a = self.term()?;
                let f = if pred == b'O' {
                    Formula::O(a)
                } else {
                    self.expect(",")?;
                    Formula::W(a, self.term()?)
                };
                self.expect(")")?;
                return Ok(f);
            }
            Some(b'K') => {
                self.pos += 1;
                let Some(i) = self.number()? else {
                    return self.err("expected an agent number after K");
                };
                self.expect("(")?;
                let f = self.iff()?;
                self.expect(")")?;
                return Ok(Formula::k(i, f));
            }
            _ => {}
        }
        let save = self.pos;
        if let Some(word) = self.ident() {
            if word == "all" || word == "ex" {
                let Some(x) = self.ident() else {
                    return self.err("expected a variable after quantifier");
                };
                self.expect(".")?;
                let body = self.iff()?;
                return Ok(if word == "all" {
                    Formula::forall(&x, body)
                } else {
                    Formula::exists(&x, body)
                });
            }
        }
        self.pos = save;
        let a = self.term()?;
        self.expect("=")?;
        Ok(Formula::Eq(a, self.term()?))
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let f = p.iff()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        parse_formula(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
