//! Ordinals below ε₀ in hereditary Cantor normal form.
//!
//! An [`Ordinal`] is a strictly decreasing sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` whose
//! exponents are themselves ordinals in the same form. Every constructor
//! normalizes, so two ordinals are equal exactly when their term lists are
//! structurally identical. Values at or beyond ε₀ are not representable and
//! surface as [`OrdValue::AtLeastEpsilon0`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Default bound on exponent nesting; `omega_pow` overflows past it.
pub const DEFAULT_MAX_DEPTH: usize = 64;

/// One `ω^exp·coeff` summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    exp: Ordinal,
    coeff: BigUint,
}

impl Term {
    pub fn exponent(&self) -> &Ordinal {
        &self.exp
    }

    pub fn coefficient(&self) -> &BigUint {
        &self.coeff
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// An ordinal, or the marker for anything at or above ε₀.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrdValue {
    Ord(Ordinal),
    AtLeastEpsilon0,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1u32)
    }

    pub fn omega() -> Self {
        Self::omega_to(Self::one())
    }

    pub fn nat(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exp: Self::zero(),
                    coeff: n,
                }],
            }
        }
    }

    /// `ω^exp` without a depth check.
    pub fn omega_to(exp: Ordinal) -> Self {
        Self::monomial(exp, BigUint::one())
    }

    /// `ω^exp·coeff`; zero when `coeff` is zero.
    pub fn monomial(exp: Ordinal, coeff: impl Into<BigUint>) -> Self {
        let coeff = coeff.into();
        if coeff.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term { exp, coeff }],
        }
    }

    /// Builds the ordinal `Σ ω^e·c` from arbitrary `(e, c)` pairs, evaluated
    /// left to right with ordinal addition. Out-of-order or duplicate
    /// exponents are absorbed or merged exactly as the sum dictates.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, BigUint)>,
    {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add(&Self::monomial(e, c)))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The natural number this ordinal equals, if finite.
    pub fn as_nat(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exp.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    /// True for `α+1` shapes: the last term has exponent zero.
    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    /// Nesting depth of the exponent tower: 0 for zero, 1 for positive
    /// naturals, 2 for `ω`, and so on.
    pub fn depth(&self) -> usize {
        self.terms
            .iter()
            .map(|t| 1 + t.exp.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn succ(&self) -> Self {
        self.add(&Self::one())
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        last.coeff -= 1u32;
        if last.coeff.is_zero() {
            terms.pop();
        }
        Some(Ordinal { terms })
    }

    /// Ordinal sum. Terms of `self` below the leading exponent of `other`
    /// are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut merged = None;
        for t in &self.terms {
            match t.exp.cmp(&head.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    merged = Some(&t.coeff + &head.coeff);
                    break;
                }
                Ordering::Less => break,
            }
        }
        match merged {
            Some(coeff) => {
                terms.push(Term {
                    exp: head.exp.clone(),
                    coeff,
                });
                terms.extend(other.terms[1..].iter().cloned());
            }
            None => terms.extend(other.terms.iter().cloned()),
        }
        Ordinal { terms }
    }

    /// Ordinal product, distributing over the terms of the right factor.
    pub fn mul(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = self.terms.first() else {
            return Self::zero();
        };
        let mut acc = Self::zero();
        for t in &other.terms {
            let part = if t.exp.is_zero() {
                let mut terms = self.terms.clone();
                terms[0].coeff = &lead.coeff * &t.coeff;
                Ordinal { terms }
            } else {
                Self::monomial(lead.exp.add(&t.exp), t.coeff.clone())
            };
            acc = acc.add(&part);
        }
        acc
    }

    /// `ω^self`, or the overflow marker when the result would nest deeper
    /// than `max_depth`.
    pub fn omega_pow(&self, max_depth: usize) -> OrdValue {
        if self.depth() + 1 > max_depth {
            OrdValue::AtLeastEpsilon0
        } else {
            OrdValue::Ord(Self::omega_to(self.clone()))
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exp.cmp(&b.exp).then_with(|| a.coeff.cmp(&b.coeff));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

/// Three-way comparison of two canonical ordinals.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

/// The least ordinal strictly above every member of `values`; zero when empty.
pub fn sup_plus_one<'a, I>(values: I) -> Ordinal
where
    I: IntoIterator<Item = &'a Ordinal>,
{
    values
        .into_iter()
        .max()
        .map(Ordinal::succ)
        .unwrap_or_else(Ordinal::zero)
}

impl OrdValue {
    pub fn zero() -> Self {
        OrdValue::Ord(Ordinal::zero())
    }

    pub fn as_ordinal(&self) -> Option<&Ordinal> {
        match self {
            OrdValue::Ord(o) => Some(o),
            OrdValue::AtLeastEpsilon0 => None,
        }
    }

    pub fn into_ordinal(self) -> Option<Ordinal> {
        match self {
            OrdValue::Ord(o) => Some(o),
            OrdValue::AtLeastEpsilon0 => None,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, OrdValue::AtLeastEpsilon0)
    }

    pub fn add(&self, other: &OrdValue) -> OrdValue {
        match (self, other) {
            (OrdValue::Ord(a), OrdValue::Ord(b)) => OrdValue::Ord(a.add(b)),
            _ => OrdValue::AtLeastEpsilon0,
        }
    }

    pub fn mul(&self, other: &OrdValue) -> OrdValue {
        match (self, other) {
            (OrdValue::Ord(a), OrdValue::Ord(b)) => OrdValue::Ord(a.mul(b)),
            (OrdValue::Ord(a), _) | (_, OrdValue::Ord(a)) if a.is_zero() => OrdValue::zero(),
            _ => OrdValue::AtLeastEpsilon0,
        }
    }

    pub fn omega_pow(&self, max_depth: usize) -> OrdValue {
        match self {
            OrdValue::Ord(a) => a.omega_pow(max_depth),
            OrdValue::AtLeastEpsilon0 => OrdValue::AtLeastEpsilon0,
        }
    }
}

impl From<Ordinal> for OrdValue {
    fn from(o: Ordinal) -> Self {
        OrdValue::Ord(o)
    }
}

impl PartialOrd for OrdValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (OrdValue::Ord(a), OrdValue::Ord(b)) => a.cmp(b),
            (OrdValue::Ord(_), OrdValue::AtLeastEpsilon0) => Ordering::Less,
            (OrdValue::AtLeastEpsilon0, OrdValue::Ord(_)) => Ordering::Greater,
            (OrdValue::AtLeastEpsilon0, OrdValue::AtLeastEpsilon0) => Ordering::Equal,
        }
    }
}

/// Value maps with a closed-form supremum of their iterates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueMap {
    /// `x ↦ x+1`
    AddOne,
    /// `x ↦ x+ω^β`
    AddOmegaPow(Ordinal),
    /// `x ↦ x·ω`
    MulOmega,
    /// `x ↦ x^ω`
    PowOmega,
    /// `x ↦ ω^x`
    OmegaPow,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IterateError {
    #[error("iterates of {map} from {seed} are not strictly increasing")]
    Degenerate { map: String, seed: Ordinal },
}

impl ValueMap {
    /// One application of the map.
    pub fn apply(&self, x: &Ordinal, max_depth: usize) -> OrdValue {
        match self {
            ValueMap::AddOne => OrdValue::Ord(x.succ()),
            ValueMap::AddOmegaPow(b) => OrdValue::Ord(x.add(&Ordinal::omega_to(b.clone()))),
            ValueMap::MulOmega => OrdValue::Ord(x.mul(&Ordinal::omega())),
            ValueMap::PowOmega => OrdValue::Ord(pow_omega(x)),
            ValueMap::OmegaPow => x.omega_pow(max_depth),
        }
    }

    fn name(&self) -> String {
        match self {
            ValueMap::AddOne => "AddOne".into(),
            ValueMap::AddOmegaPow(b) => format!("AddOmegaPow({b})"),
            ValueMap::MulOmega => "MulOmega".into(),
            ValueMap::PowOmega => "PowOmega".into(),
            ValueMap::OmegaPow => "OmegaPow".into(),
        }
    }
}

impl fmt::Display for ValueMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `x^ω` for ordinals: `0`, `1` stay put, finite `n ≥ 2` give `ω`, and
/// `x` with leading exponent `e ≥ 1` gives `ω^(e·ω)`.
fn pow_omega(x: &Ordinal) -> Ordinal {
    match x.as_nat() {
        Some(n) if n <= BigUint::one() => x.clone(),
        Some(_) => Ordinal::omega(),
        None => {
            let e = x.leading_exponent().expect("infinite ordinal has a term");
            Ordinal::omega_to(e.mul(&Ordinal::omega()))
        }
    }
}

/// Supremum of `seed, g(seed), g(g(seed)), …` in closed form.
pub fn iterate_sup(map: &ValueMap, seed: &Ordinal) -> Result<OrdValue, IterateError> {
    let degenerate = || IterateError::Degenerate {
        map: map.name(),
        seed: seed.clone(),
    };
    Ok(match map {
        ValueMap::AddOne => OrdValue::Ord(seed.add(&Ordinal::omega())),
        ValueMap::AddOmegaPow(b) => OrdValue::Ord(seed.add(&Ordinal::omega_to(b.succ()))),
        ValueMap::MulOmega => {
            if seed.is_zero() {
                return Err(degenerate());
            }
            let omega_omega = Ordinal::omega_to(Ordinal::omega());
            OrdValue::Ord(seed.mul(&omega_omega))
        }
        ValueMap::PowOmega => {
            // After one step the iterate is infinite with leading exponent e ≥ 1,
            // and the k-th iterate from there is ω^(e·ω^k).
            if seed.as_nat().is_some_and(|n| n <= BigUint::one()) {
                return Err(degenerate());
            }
            let start = if seed.is_finite() {
                Ordinal::omega()
            } else {
                seed.clone()
            };
            let e = start.leading_exponent().expect("infinite ordinal has a term");
            let omega_omega = Ordinal::omega_to(Ordinal::omega());
            OrdValue::Ord(Ordinal::omega_to(e.mul(&omega_omega)))
        }
        ValueMap::OmegaPow => OrdValue::AtLeastEpsilon0,
    })
}

// ---------------------------------------------------------------------------
// Text forms

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrdParseError {
    #[error("unexpected {found} at offset {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("non-canonical ordinal at offset {pos}: {reason}")]
    NonCanonical { pos: usize, reason: &'static str },
    #[error("{what} at offset {pos}")]
    Unsupported { pos: usize, what: &'static str },
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), OrdParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn unexpected(&mut self) -> OrdParseError {
        let pos = {
            self.skip_ws();
            self.pos
        };
        let found = match self.src.get(pos) {
            Some(&c) => format!("'{}'", c as char),
            None => "end of input".to_string(),
        };
        OrdParseError::Unexpected { pos, found }
    }

    fn digits(&mut self) -> Result<BigUint, OrdParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected());
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("nonempty digit string"))
    }

    fn finish(&mut self) -> Result<(), OrdParseError> {
        if self.peek().is_some() {
            Err(self.unexpected())
        } else {
            Ok(())
        }
    }
}

/// Parses the canonical textual form, e.g. `w^(w + 1)*2 + w*3 + 5`.
pub fn parse_ord(text: &str) -> Result<Ordinal, OrdParseError> {
    let mut cur = Cursor::new(text);
    let ord = parse_canonical(&mut cur)?;
    cur.finish()?;
    Ok(ord)
}

fn parse_canonical(cur: &mut Cursor<'_>) -> Result<Ordinal, OrdParseError> {
    let mut terms: Vec<Term> = Vec::new();
    loop {
        cur.skip_ws();
        let start = cur.pos;
        let term = match cur.peek() {
            Some(b'w') => {
                cur.pos += 1;
                let exp = if cur.eat(b'^') {
                    if cur.eat(b'(') {
                        let e = parse_canonical(cur)?;
                        cur.expect(b')')?;
                        e
                    } else {
                        Ordinal::nat(cur.digits()?)
                    }
                } else {
                    Ordinal::one()
                };
                if exp.is_zero() {
                    return Err(OrdParseError::NonCanonical {
                        pos: start,
                        reason: "w^0 must be written as a numeral",
                    });
                }
                let coeff = if cur.eat(b'*') {
                    cur.digits()?
                } else {
                    BigUint::one()
                };
                Term { exp, coeff }
            }
            Some(c) if c.is_ascii_digit() => Term {
                exp: Ordinal::zero(),
                coeff: cur.digits()?,
            },
            _ => return Err(cur.unexpected()),
        };
        if term.coeff.is_zero() {
            // A bare "0" is only canonical as the whole ordinal.
            if terms.is_empty() && term.exp.is_zero() && cur.peek() != Some(b'+') {
                return Ok(Ordinal::zero());
            }
            return Err(OrdParseError::NonCanonical {
                pos: start,
                reason: "zero coefficient",
            });
        }
        if let Some(prev) = terms.last() {
            if term.exp >= prev.exp {
                return Err(OrdParseError::NonCanonical {
                    pos: start,
                    reason: "exponents must strictly decrease",
                });
            }
        }
        terms.push(term);
        if !cur.eat(b'+') {
            break;
        }
    }
    Ok(Ordinal { terms })
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            if t.exp == Ordinal::one() {
                f.write_str("w")?;
            } else {
                write!(f, "w^({})", t.exp)?;
            }
            if !t.coeff.is_one() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

/// Canonical text of an ordinal.
pub fn print_ord(a: &Ordinal) -> String {
    a.to_string()
}

impl FromStr for Ordinal {
    type Err = OrdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ord(s)
    }
}

impl fmt::Display for OrdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdValue::Ord(o) => o.fmt(f),
            OrdValue::AtLeastEpsilon0 => f.write_str("E0"),
        }
    }
}

impl FromStr for OrdValue {
    type Err = OrdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "E0" {
            Ok(OrdValue::AtLeastEpsilon0)
        } else {
            parse_ord(s).map(OrdValue::Ord)
        }
    }
}

impl serde::Serialize for OrdValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for OrdValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluates a calculator expression over `+`, `*`, `w^`, numerals and
/// parentheses, e.g. `(w + 1) * w^(w^2)`. Only `w` may be raised to a power.
pub fn eval_expr(text: &str, max_depth: usize) -> Result<OrdValue, OrdParseError> {
    let mut cur = Cursor::new(text);
    let v = eval_sum(&mut cur, max_depth)?;
    cur.finish()?;
    Ok(v)
}

fn eval_sum(cur: &mut Cursor<'_>, max_depth: usize) -> Result<OrdValue, OrdParseError> {
    let mut acc = eval_product(cur, max_depth)?;
    while cur.eat(b'+') {
        let rhs = eval_product(cur, max_depth)?;
        acc = acc.add(&rhs);
    }
    Ok(acc)
}

fn eval_product(cur: &mut Cursor<'_>, max_depth: usize) -> Result<OrdValue, OrdParseError> {
    let mut acc = eval_power(cur, max_depth)?;
    while cur.eat(b'*') {
        let rhs = eval_power(cur, max_depth)?;
        acc = acc.mul(&rhs);
    }
    Ok(acc)
}

fn eval_power(cur: &mut Cursor<'_>, max_depth: usize) -> Result<OrdValue, OrdParseError> {
    let start = {
        cur.skip_ws();
        cur.pos
    };
    match cur.peek() {
        Some(b'w') => {
            cur.pos += 1;
            if cur.eat(b'^') {
                let exp = eval_power(cur, max_depth)?;
                Ok(exp.omega_pow(max_depth))
            } else {
                Ok(OrdValue::Ord(Ordinal::omega()))
            }
        }
        Some(b'(') => {
            cur.pos += 1;
            let v = eval_sum(cur, max_depth)?;
            cur.expect(b')')?;
            if cur.peek() == Some(b'^') {
                return Err(OrdParseError::Unsupported {
                    pos: start,
                    what: "only w can be raised to a power",
                });
            }
            Ok(v)
        }
        Some(c) if c.is_ascii_digit() => {
            let n = cur.digits()?;
            if cur.peek() == Some(b'^') {
                return Err(OrdParseError::Unsupported {
                    pos: start,
                    what: "only w can be raised to a power",
                });
            }
            Ok(OrdValue::Ord(Ordinal::nat(n)))
        }
        Some(b'E') => {
            cur.pos += 1;
            cur.expect(b'0')?;
            Ok(OrdValue::AtLeastEpsilon0)
        }
        _ => Err(cur.unexpected()),
    }
}

/// Small-value conversion used by diagnostics and tests.
pub fn nat_value(o: &Ordinal) -> Option<u64> {
    o.as_nat().and_then(|n| n.to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        parse_ord(s).unwrap()
    }

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&Ordinal::zero(), &Ordinal::zero()), Ordering::Equal);
        assert_eq!(compare(&o("w + 1"), &o("w*2")), Ordering::Less);
        assert_eq!(compare(&o("w^2"), &o("w*3")), Ordering::Greater);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(Ordinal::one().add(&w()), w());
        assert_eq!(w().mul(&w()), o("w^2"));
        assert_eq!(w().add(&w()), o("w*2"));
        assert_eq!(o("w + 5").mul(&Ordinal::nat(3u32)), o("w*3 + 5"));
        assert_eq!(Ordinal::nat(2u32).mul(&w()), w());
    }

    #[test]
    fn sup_plus_one_examples() {
        assert_eq!(sup_plus_one([]), Ordinal::zero());
        assert_eq!(sup_plus_one([&Ordinal::zero()]), Ordinal::one());
        let vals = [w(), Ordinal::nat(3u32), w()];
        assert_eq!(sup_plus_one(&vals), o("w + 1"));
    }

    #[test]
    fn iterate_sup_examples() {
        let zero = Ordinal::zero();
        assert_eq!(iterate_sup(&ValueMap::AddOne, &zero).unwrap(), OrdValue::Ord(w()));
        assert_eq!(
            iterate_sup(&ValueMap::AddOmegaPow(Ordinal::one()), &zero).unwrap(),
            OrdValue::Ord(o("w^2"))
        );
        assert_eq!(
            iterate_sup(&ValueMap::OmegaPow, &Ordinal::one()).unwrap(),
            OrdValue::AtLeastEpsilon0
        );
        assert_eq!(
            iterate_sup(&ValueMap::MulOmega, &Ordinal::one()).unwrap(),
            OrdValue::Ord(o("w^(w)"))
        );
        assert!(iterate_sup(&ValueMap::MulOmega, &zero).is_err());
        assert_eq!(
            iterate_sup(&ValueMap::PowOmega, &w()).unwrap(),
            OrdValue::Ord(o("w^(w^(w))"))
        );
        assert!(iterate_sup(&ValueMap::PowOmega, &Ordinal::one()).is_err());
    }

    #[test]
    fn pow_omega_iterates_match_closed_form() {
        // ω, ω^ω, ω^(ω²), ω^(ω³) … all stay below ω^(ω^ω).
        let bound = iterate_sup(&ValueMap::PowOmega, &w()).unwrap();
        let mut x = w();
        for k in 0..6u32 {
            let expected = Ordinal::omega_to(Ordinal::omega_to(Ordinal::nat(k)));
            assert_eq!(x, expected);
            assert!(OrdValue::Ord(x.clone()) < bound);
            x = ValueMap::PowOmega.apply(&x, DEFAULT_MAX_DEPTH).into_ordinal().unwrap();
        }
    }

    #[test]
    fn parse_and_print() {
        let a = o("w^2 + w*3 + 5");
        let expected = Ordinal::from_terms([
            (Ordinal::nat(2u32), BigUint::from(1u32)),
            (Ordinal::one(), BigUint::from(3u32)),
            (Ordinal::zero(), BigUint::from(5u32)),
        ]);
        assert_eq!(a, expected);
        assert_eq!(print_ord(&a), "w^(2) + w*3 + 5");
        assert_eq!(print_ord(&Ordinal::zero()), "0");
        assert_eq!(print_ord(&o("w^(w^(w))")), "w^(w^(w))");
    }

    #[test]
    fn parse_rejects_non_canonical() {
        assert!(matches!(parse_ord("w + w"), Err(OrdParseError::NonCanonical { pos: 4, .. })));
        assert!(matches!(parse_ord("3 + w"), Err(OrdParseError::NonCanonical { .. })));
        assert!(matches!(parse_ord("w*0"), Err(OrdParseError::NonCanonical { .. })));
        assert!(matches!(parse_ord("w^0"), Err(OrdParseError::NonCanonical { .. })));
        assert!(matches!(parse_ord("0 + 1"), Err(OrdParseError::NonCanonical { .. })));
        assert!(matches!(parse_ord("w +"), Err(OrdParseError::Unexpected { pos: 3, .. })));
        assert!(matches!(parse_ord(""), Err(OrdParseError::Unexpected { pos: 0, .. })));
        assert!(matches!(parse_ord("w)"), Err(OrdParseError::Unexpected { pos: 1, .. })));
    }

    #[test]
    fn omega_pow_overflows_past_depth_bound() {
        let mut x = Ordinal::one();
        for _ in 0..(DEFAULT_MAX_DEPTH - 1) {
            x = x.omega_pow(DEFAULT_MAX_DEPTH).into_ordinal().unwrap();
        }
        assert_eq!(x.depth(), DEFAULT_MAX_DEPTH);
        assert_eq!(x.omega_pow(DEFAULT_MAX_DEPTH), OrdValue::AtLeastEpsilon0);
        assert!(OrdValue::AtLeastEpsilon0 > OrdValue::Ord(x));
    }

    #[test]
    fn calculator() {
        let v = eval_expr("w + w", DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(v, OrdValue::Ord(o("w*2")));
        let v = eval_expr("(w + 1) * (w + 1)", DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(v, OrdValue::Ord(o("w^(2) + w + 1")));
        let v = eval_expr("w^w^w", DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(v, OrdValue::Ord(o("w^(w^(w))")));
        let v = eval_expr("w^w^w", 2).unwrap();
        assert_eq!(v, OrdValue::AtLeastEpsilon0);
        assert!(eval_expr("2^w", DEFAULT_MAX_DEPTH).is_err());
    }

    #[test]
    fn pred_inverts_succ() {
        let a = o("w^(2) + 3");
        assert_eq!(a.succ().pred().unwrap(), a);
        assert!(w().pred().is_none());
        assert_eq!(Ordinal::one().pred().unwrap(), Ordinal::zero());
    }
}
