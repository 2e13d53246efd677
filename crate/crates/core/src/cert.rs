//! Certificates that a program notates an ordinal, and their checker.
//!
//! Two certificate shapes cover the constructions the workbench uses:
//!
//! * `Fin`: the program halts; each output is itself certified, and the
//!   value is the least ordinal above every output value.
//! * `Iter`: the program is a canonical iterator
//!
//!   ```text
//!   Let C₁ = …; …; Let X = <seed>; While(True) { Print(<emit> + X); Let X = <left> + quote(X) + <right> }
//!   ```
//!
//!   (the two loop statements may come in either order), the template
//!   `(left, right, emit)` belongs to a library wrapper, and the value is
//!   the closed-form supremum of the wrapper's value map iterated from the
//!   seed's certified value.
//!
//! Library entries are trusted: the checker confirms that a program really
//! has the shape and that its first outputs match the template, but the
//! value law of a wrapper is taken from the library.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::onl::{
    parse_onl, print_onl, quote_str, run, BudgetKind, Budgets, Expr, OnlError, Program,
    RunStatus, Stmt,
};
use crate::ordinal::{iterate_sup, sup_plus_one, Ordinal, OrdValue, ValueMap};

// ---------------------------------------------------------------------------
// Wrapper library

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WrapperId {
    /// `Q ↦ Print(quote(Q))`
    Print,
    /// `n`-fold loop lifting of `Print`; `Loop(1)` is the ω-loop.
    Loop(u32),
    /// `Q ↦ Let B = quote(Q); Print(B)`
    BoundPrint,
    FragmentLift,
    MultiplierLift,
    Tower,
    Custom(String),
}

impl fmt::Display for WrapperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WrapperId::Print => f.write_str("PrintWrap"),
            WrapperId::Loop(1) => f.write_str("OmegaLoopWrap"),
            WrapperId::Loop(n) => write!(f, "LoopWrap({n})"),
            WrapperId::BoundPrint => f.write_str("BoundPrintWrap"),
            WrapperId::FragmentLift => f.write_str("FragmentLiftWrap"),
            WrapperId::MultiplierLift => f.write_str("MultiplierLiftWrap"),
            WrapperId::Tower => f.write_str("TowerWrap"),
            WrapperId::Custom(name) => f.write_str(name),
        }
    }
}

impl FromStr for WrapperId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "PrintWrap" => WrapperId::Print,
            "OmegaLoopWrap" => WrapperId::Loop(1),
            "BoundPrintWrap" => WrapperId::BoundPrint,
            "FragmentLiftWrap" => WrapperId::FragmentLift,
            "MultiplierLiftWrap" => WrapperId::MultiplierLift,
            "TowerWrap" => WrapperId::Tower,
            other => other
                .strip_prefix("LoopWrap(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .map(WrapperId::Loop)
                .unwrap_or_else(|| WrapperId::Custom(other.to_string())),
        })
    }
}

/// The text transformation `X ↦ left + quote(X) + right` (or with `X`
/// spliced raw when `quote` is false), plus the prefix that turns a loop
/// value into a printed program.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Template {
    pub left: String,
    pub right: String,
    pub quote: bool,
    #[serde(default)]
    pub emit_prefix: String,
}

impl Template {
    pub fn apply(&self, x: &str) -> String {
        let mid = if self.quote { quote_str(x) } else { x.to_string() };
        format!("{}{}{}", self.left, mid, self.right)
    }

    pub fn emit(&self, x: &str) -> String {
        format!("{}{}", self.emit_prefix, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapperEntry {
    pub id: WrapperId,
    pub template: Template,
    pub value_map: ValueMap,
    pub doc: String,
}

/// Acknowledgment that a caller-supplied wrapper's value law is unchecked.
#[derive(Clone, Copy, Debug)]
pub struct UnsafeWrapperAck;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WrapperError {
    #[error("wrapper {0} collides with an existing entry")]
    Duplicate(String),
    #[error("wrapper {0} does not produce valid ONL from the empty program")]
    InvalidTemplate(String),
}

const PRINT_LEFT: &str = "Print(";
const PRINT_RIGHT: &str = ")";
const LOOP_LEFT: &str = "Let X = ";

/// Additive fragments read their base program from `B`.
const FRAGMENT_EMIT: &str = "Let B = \"End\"; ";
/// Multipliers additionally read an additive fragment from `F`.
const MULTIPLIER_EMIT: &str = "Let B = \"End\"; Let F = \"Print(B)\"; ";

/// Right half of the loop-lifted template: iterate `(left, right)` from `X`.
fn loop_right(left: &str, right: &str) -> String {
    format!(
        "; While(True) {{ Print(X); Let X = {} + quote(X) + {} }}",
        quote_str(left),
        quote_str(right)
    )
}

fn loop_template(n: u32) -> Template {
    let (mut left, mut right) = (PRINT_LEFT.to_string(), PRINT_RIGHT.to_string());
    for _ in 0..n {
        right = loop_right(&left, &right);
        left = LOOP_LEFT.to_string();
    }
    Template {
        left,
        right,
        quote: true,
        emit_prefix: String::new(),
    }
}

fn builtin_entries() -> Vec<WrapperEntry> {
    vec![
        WrapperEntry {
            id: WrapperId::Print,
            template: loop_template(0),
            value_map: ValueMap::AddOne,
            doc: "Print(quote(Q)) has the single output Q, so it notates |Q|+1.".into(),
        },
        WrapperEntry {
            id: WrapperId::BoundPrint,
            template: Template {
                left: "Let B = ".into(),
                right: "; Print(B)".into(),
                quote: true,
                emit_prefix: String::new(),
            },
            value_map: ValueMap::AddOne,
            doc: "Let B = quote(Q); Print(B) has the single output Q, so it notates |Q|+1.".into(),
        },
        WrapperEntry {
            id: WrapperId::FragmentLift,
            template: Template {
                left: "Let X = B; While(True) { Print(X); Let X = \"Let B = \" + quote(X) + \"; \" + "
                    .into(),
                right: " }".into(),
                quote: true,
                emit_prefix: FRAGMENT_EMIT.into(),
            },
            value_map: ValueMap::MulOmega,
            doc: "Loop values are fragments F reading a base program from B; run after \
                  Let B = quote(S) a fragment adding a outputs programs whose values are \
                  cofinal in |S|+a. The lifted fragment prints S, F(S), F(F(S)), ... and so \
                  adds a·ω. Emitting with base End turns a fragment adding a into a \
                  program of value a."
                .into(),
        },
        WrapperEntry {
            id: WrapperId::MultiplierLift,
            template: Template {
                left: "Let G = F; While(True) { Print(\"Let B = \" + quote(B) + \"; \" + G); \
                       Let G = \"Let F = \" + quote(G) + \"; \" + "
                    .into(),
                right: " }".into(),
                quote: true,
                emit_prefix: MULTIPLIER_EMIT.into(),
            },
            value_map: ValueMap::PowOmega,
            doc: "Loop values are multipliers M reading a base B and an additive fragment F; \
                  bound to a fragment adding a, M runs as a fragment adding a·m. The lift \
                  prints the base-applied fragments F, M(F), M(M(F)), ... which add a, a·m, \
                  a·m², ... and so multiplies by m^ω. Emitting with B = End and F = Print(B) \
                  gives a program of value m."
                .into(),
        },
        WrapperEntry {
            id: WrapperId::Tower,
            template: Template {
                left: "Let E = ".into(),
                right: "; Let B = \"End\"; Let X = B; While(True) { Print(X); \
                        Let X = \"Let B = \" + quote(X) + \"; Let F = \" + quote(E) + \"; \" + E }"
                    .into(),
                quote: true,
                emit_prefix: String::new(),
            },
            value_map: ValueMap::OmegaPow,
            doc: "Axiomatic: assumed to raise ω to the value of the wrapped program. No \
                  construction in this library derives the law; verdicts resting on this \
                  entry are conditional on it."
                .into(),
        },
    ]
}

#[derive(Clone, Debug)]
pub struct WrapperLib {
    fixed: Vec<WrapperEntry>,
    /// Upper bound on `n` when recognizing `LoopWrap(n)` templates.
    max_loop: u32,
}

impl Default for WrapperLib {
    fn default() -> Self {
        WrapperLib {
            fixed: builtin_entries(),
            max_loop: 16,
        }
    }
}

impl WrapperLib {
    /// Adds a caller-supplied entry. Its value law is not checked.
    pub fn add_unchecked(
        &mut self,
        entry: WrapperEntry,
        _ack: UnsafeWrapperAck,
    ) -> Result<(), WrapperError> {
        if self.get(&entry.id).is_some() || self.find(&entry.template).is_some() {
            return Err(WrapperError::Duplicate(entry.id.to_string()));
        }
        let probe = entry.template.emit(&entry.template.apply("End"));
        if parse_onl(&probe).is_err() {
            return Err(WrapperError::InvalidTemplate(entry.id.to_string()));
        }
        self.fixed.push(entry);
        Ok(())
    }

    pub fn get(&self, id: &WrapperId) -> Option<WrapperEntry> {
        if let WrapperId::Loop(n) = id {
            if *n == 0 || *n > self.max_loop {
                return None;
            }
            return Some(WrapperEntry {
                id: id.clone(),
                template: loop_template(*n),
                value_map: ValueMap::AddOmegaPow(Ordinal::nat(*n)),
                doc: format!(
                    "Iterates LoopWrap({}) from Q; each step adds ω^{}, so the loop adds ω^{}.",
                    n - 1,
                    n - 1,
                    n
                ),
            });
        }
        self.fixed.iter().find(|e| &e.id == id).cloned()
    }

    /// The entry whose template is exactly `t`, if any.
    pub fn find(&self, t: &Template) -> Option<WrapperEntry> {
        if let Some(e) = self.fixed.iter().find(|e| &e.template == t) {
            return Some(e.clone());
        }
        if t.left == LOOP_LEFT && t.quote && t.emit_prefix.is_empty() {
            for n in 1..=self.max_loop {
                let cand = loop_template(n);
                if cand.right.len() > t.right.len() {
                    break;
                }
                if cand == *t {
                    return self.get(&WrapperId::Loop(n));
                }
            }
        }
        None
    }

    pub fn entries(&self) -> Vec<WrapperEntry> {
        let mut out: Vec<WrapperEntry> = (1..=3).filter_map(|n| self.get(&WrapperId::Loop(n))).collect();
        out.extend(self.fixed.iter().cloned());
        out
    }
}

// ---------------------------------------------------------------------------
// Iterator shape recognition

/// A program recognized as a canonical iterator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterShape {
    pub var: String,
    /// Initial loop value, before any emit prefix.
    pub seed: String,
    pub template: Template,
    /// True when the loop prints before it updates.
    pub print_first: bool,
}

impl IterShape {
    /// Program text of the seed as the iterator's first term.
    pub fn emitted_seed(&self) -> String {
        self.template.emit(&self.seed)
    }

    /// The first `k` outputs the program must produce.
    pub fn predicted_outputs(&self, k: usize) -> Vec<String> {
        let mut x = self.seed.clone();
        if !self.print_first {
            x = self.template.apply(&x);
        }
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            out.push(self.template.emit(&x));
            x = self.template.apply(&x);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Part {
    Lit(String),
    Loop { quoted: bool },
}

/// Evaluates a loop-body expression with constants substituted, leaving the
/// loop variable symbolic.
fn parts_of(e: &Expr, consts: &HashMap<String, String>, var: &str) -> Option<Vec<Part>> {
    let mut out = Vec::new();
    let push = |p: Part, out: &mut Vec<Part>| match (out.last_mut(), p) {
        (Some(Part::Lit(prev)), Part::Lit(s)) => prev.push_str(&s),
        (_, p) => out.push(p),
    };
    let items: Vec<&Expr> = match e {
        Expr::Concat(ps) => ps.iter().collect(),
        other => vec![other],
    };
    for item in items {
        match item {
            Expr::Var(v) if v == var => push(Part::Loop { quoted: false }, &mut out),
            Expr::Quote(inner) if matches!(inner.as_ref(), Expr::Var(v) if v == var) => {
                push(Part::Loop { quoted: true }, &mut out)
            }
            other => push(Part::Lit(eval_const(other, consts)?), &mut out),
        }
    }
    Some(out)
}

fn eval_const(e: &Expr, consts: &HashMap<String, String>) -> Option<String> {
    Some(match e {
        Expr::Lit(s) => s.clone(),
        Expr::Var(v) => consts.get(v)?.clone(),
        Expr::Concat(parts) => {
            let mut s = String::new();
            for p in parts {
                s.push_str(&eval_const(p, consts)?);
            }
            s
        }
        Expr::Quote(inner) => quote_str(&eval_const(inner, consts)?),
    })
}

/// Recognizes `Let …; Let X = seed; While(True) { Print(emit + X); Let X = T(X) }`
/// in either loop order.
pub fn match_iterator(p: &Program) -> Option<IterShape> {
    let (last, prelude) = p.stmts().split_last()?;
    let Stmt::While(body) = last else { return None };
    let mut consts = HashMap::new();
    for s in prelude {
        let Stmt::Let(name, e) = s else { return None };
        let v = eval_const(e, &consts)?;
        consts.insert(name.clone(), v);
    }
    let (print_expr, var, update, print_first) = match body.as_slice() {
        [Stmt::Print(pe), Stmt::Let(v, t)] => (pe, v, t, true),
        [Stmt::Let(v, t), Stmt::Print(pe)] => (pe, v, t, false),
        _ => return None,
    };
    let seed = consts.remove(var)?;

    let (left, quote, right) = match parts_of(update, &consts, var)?.as_slice() {
        [Part::Loop { quoted }] => (String::new(), *quoted, String::new()),
        [Part::Lit(l), Part::Loop { quoted }] => (l.clone(), *quoted, String::new()),
        [Part::Loop { quoted }, Part::Lit(r)] => (String::new(), *quoted, r.clone()),
        [Part::Lit(l), Part::Loop { quoted }, Part::Lit(r)] => (l.clone(), *quoted, r.clone()),
        _ => return None,
    };
    let emit_prefix = match parts_of(print_expr, &consts, var)?.as_slice() {
        [Part::Loop { quoted: false }] => String::new(),
        [Part::Lit(pre), Part::Loop { quoted: false }] => pre.clone(),
        _ => return None,
    };
    Some(IterShape {
        var: var.clone(),
        seed,
        template: Template {
            left,
            right,
            quote,
            emit_prefix,
        },
        print_first,
    })
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Fin {
        outputs: Vec<Certificate>,
        claimed: OrdValue,
        step_budget: u64,
    },
    Iter {
        seed: Program,
        seed_cert: Box<Certificate>,
        wrapper: WrapperId,
        claimed: OrdValue,
    },
}

impl Certificate {
    pub fn claimed(&self) -> &OrdValue {
        match self {
            Certificate::Fin { claimed, .. } | Certificate::Iter { claimed, .. } => claimed,
        }
    }

    /// Certificate for a program with no outputs.
    pub fn zero() -> Self {
        Certificate::Fin {
            outputs: Vec::new(),
            claimed: OrdValue::zero(),
            step_budget: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("expected {expected} outputs, program produced {found}")]
    WrongOutputCount { expected: usize, found: usize },
    #[error("output {index} is not an ONL program: {error}")]
    UnparseableOutput { index: usize, error: OnlError },
    #[error("output {index} does not match the wrapper template")]
    OutputMismatch { index: usize },
    #[error("program is not a canonical iterator")]
    NotAnIterator,
    #[error("loop template matches no library wrapper")]
    UnknownWrapper,
    #[error("certificate names wrapper {claimed}, program uses {found}")]
    WrapperMismatch { claimed: WrapperId, found: WrapperId },
    #[error("certificate seed differs from the program's seed")]
    SeedMismatch,
    #[error("claimed {claimed}, recomputed {computed}")]
    ValueMismatch { claimed: OrdValue, computed: OrdValue },
    #[error("{0} budget exceeded")]
    BudgetExceeded(BudgetKind),
    #[error("{0}")]
    Degenerate(String),
    #[error("output {index}: {reason}")]
    InOutput { index: usize, reason: Box<Rejection> },
    #[error("seed: {0}")]
    InSeed(Box<Rejection>),
}

/// Configuration and wrapper library for [`Checker::check`].
#[derive(Clone, Debug)]
pub struct Checker {
    pub lib: WrapperLib,
    /// How many initial iterator outputs are compared against the template.
    pub samples: usize,
    pub budgets: Budgets,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            lib: WrapperLib::default(),
            samples: 3,
            budgets: Budgets::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no certificate pattern applies: {0}")]
pub struct NoPattern(pub String);

impl Checker {
    pub fn new(lib: WrapperLib) -> Self {
        Checker {
            lib,
            ..Checker::default()
        }
    }

    /// Verifies `c` against `p`, returning the recomputed value.
    pub fn check(&self, p: &Program, c: &Certificate) -> Result<OrdValue, Rejection> {
        let computed = match c {
            Certificate::Fin {
                outputs,
                step_budget,
                ..
            } => self.check_fin(p, outputs, *step_budget)?,
            Certificate::Iter {
                seed,
                seed_cert,
                wrapper,
                ..
            } => self.check_iter(p, seed, seed_cert, wrapper)?,
        };
        if &computed != c.claimed() {
            return Err(Rejection::ValueMismatch {
                claimed: c.claimed().clone(),
                computed,
            });
        }
        Ok(computed)
    }

    fn check_fin(
        &self,
        p: &Program,
        certs: &[Certificate],
        step_budget: u64,
    ) -> Result<OrdValue, Rejection> {
        let budgets = Budgets {
            steps: step_budget,
            outputs: certs.len() + 1,
            ..self.budgets
        };
        let res = run(p, &budgets);
        match res.status {
            RunStatus::Halted { .. } if res.outputs.len() == certs.len() => {}
            RunStatus::Halted { .. } | RunStatus::BudgetExceeded(BudgetKind::Outputs) => {
                return Err(Rejection::WrongOutputCount {
                    expected: certs.len(),
                    found: res.outputs.len(),
                })
            }
            RunStatus::BudgetExceeded(kind) => return Err(Rejection::BudgetExceeded(kind)),
        }
        let mut values = Vec::with_capacity(certs.len());
        let mut overflow = false;
        for (index, (text, cert)) in res.outputs.iter().zip(certs).enumerate() {
            let q = parse_onl(text).map_err(|error| Rejection::UnparseableOutput { index, error })?;
            match self.check(&q, cert) {
                Ok(OrdValue::Ord(v)) => values.push(v),
                Ok(OrdValue::AtLeastEpsilon0) => overflow = true,
                Err(reason) => {
                    return Err(Rejection::InOutput {
                        index,
                        reason: Box::new(reason),
                    })
                }
            }
        }
        Ok(if overflow {
            OrdValue::AtLeastEpsilon0
        } else {
            OrdValue::Ord(sup_plus_one(&values))
        })
    }

    fn check_iter(
        &self,
        p: &Program,
        seed: &Program,
        seed_cert: &Certificate,
        wrapper: &WrapperId,
    ) -> Result<OrdValue, Rejection> {
        let shape = match_iterator(p).ok_or(Rejection::NotAnIterator)?;
        let entry = self.lib.find(&shape.template).ok_or(Rejection::UnknownWrapper)?;
        if &entry.id != wrapper {
            return Err(Rejection::WrapperMismatch {
                claimed: wrapper.clone(),
                found: entry.id,
            });
        }
        if shape.emitted_seed() != print_onl(seed) {
            return Err(Rejection::SeedMismatch);
        }
        let seed_value = self
            .check(seed, seed_cert)
            .map_err(|r| Rejection::InSeed(Box::new(r)))?;
        self.smoke_test(p, &shape)?;
        match seed_value {
            OrdValue::Ord(v) => {
                iterate_sup(&entry.value_map, &v).map_err(|e| Rejection::Degenerate(e.to_string()))
            }
            OrdValue::AtLeastEpsilon0 => Ok(OrdValue::AtLeastEpsilon0),
        }
    }

    /// Runs `p` for the configured number of outputs and compares them with
    /// the template's predictions.
    pub fn smoke_test(&self, p: &Program, shape: &IterShape) -> Result<(), Rejection> {
        let budgets = self.budgets.with_outputs(self.samples);
        let res = run(p, &budgets);
        let predicted = shape.predicted_outputs(self.samples);
        for (index, (got, want)) in res.outputs.iter().zip(&predicted).enumerate() {
            if got != want {
                return Err(Rejection::OutputMismatch { index });
            }
        }
        match res.status {
            _ if res.outputs.len() == self.samples => Ok(()),
            RunStatus::BudgetExceeded(kind) => Err(Rejection::BudgetExceeded(kind)),
            RunStatus::Halted { .. } => Err(Rejection::WrongOutputCount {
                expected: self.samples,
                found: res.outputs.len(),
            }),
        }
    }

    /// Finds a certificate for `p` by bounded execution or iterator matching.
    pub fn synthesize(&self, p: &Program) -> Result<Certificate, NoPattern> {
        self.synth_at(p, self.budgets.depth)
    }

    fn synth_at(&self, p: &Program, depth: usize) -> Result<Certificate, NoPattern> {
        if depth == 0 {
            return Err(NoPattern("recursion depth exceeded".into()));
        }
        let res = run(p, &self.budgets);
        if let RunStatus::Halted { steps } = res.status {
            let mut outputs = Vec::with_capacity(res.outputs.len());
            let mut values = Vec::with_capacity(res.outputs.len());
            let mut overflow = false;
            for (i, text) in res.outputs.iter().enumerate() {
                let q = parse_onl(text)
                    .map_err(|e| NoPattern(format!("output {i} is not ONL: {e}")))?;
                let c = self.synth_at(&q, depth - 1)?;
                match c.claimed() {
                    OrdValue::Ord(v) => values.push(v.clone()),
                    OrdValue::AtLeastEpsilon0 => overflow = true,
                }
                outputs.push(c);
            }
            let claimed = if overflow {
                OrdValue::AtLeastEpsilon0
            } else {
                OrdValue::Ord(sup_plus_one(&values))
            };
            return Ok(Certificate::Fin {
                outputs,
                claimed,
                step_budget: steps,
            });
        }
        let shape = match_iterator(p)
            .ok_or_else(|| NoPattern("does not halt within budget and is not an iterator".into()))?;
        let entry = self
            .lib
            .find(&shape.template)
            .ok_or_else(|| NoPattern("iterator template matches no library wrapper".into()))?;
        let seed = parse_onl(&shape.emitted_seed())
            .map_err(|e| NoPattern(format!("iterator seed is not ONL: {e}")))?;
        let seed_cert = self.synth_at(&seed, depth - 1)?;
        let claimed = match seed_cert.claimed() {
            OrdValue::Ord(v) => iterate_sup(&entry.value_map, v)
                .map_err(|e| NoPattern(e.to_string()))?,
            OrdValue::AtLeastEpsilon0 => OrdValue::AtLeastEpsilon0,
        };
        let cert = Certificate::Iter {
            seed,
            seed_cert: Box::new(seed_cert),
            wrapper: entry.id,
            claimed,
        };
        self.check(p, &cert)
            .map_err(|r| NoPattern(format!("synthesized certificate fails: {r}")))?;
        Ok(cert)
    }
}

/// Applies a library wrapper to a program, returning the wrapped program.
pub fn apply_wrapper(entry: &WrapperEntry, p: &Program) -> Result<Program, OnlError> {
    parse_onl(&entry.template.apply(&print_onl(p)))
}

// ---------------------------------------------------------------------------
// JSON form

pub const CERT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct WireCert {
    #[serde(default = "default_version")]
    v: u32,
    kind: String,
    claimed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<WireCert>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed_cert: Option<Box<WireCert>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wrapper: Option<String>,
}

fn default_version() -> u32 {
    CERT_FORMAT_VERSION
}

#[derive(Debug, Error)]
pub enum CertFormatError {
    #[error("malformed certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported certificate version {0}")]
    Version(u32),
    #[error("unknown certificate kind {0:?}")]
    Kind(String),
    #[error("missing field {0}")]
    Missing(&'static str),
    #[error("bad claimed value: {0}")]
    Claimed(#[from] crate::ordinal::OrdParseError),
    #[error("bad seed program: {0}")]
    Seed(#[from] OnlError),
}

impl Certificate {
    fn to_wire(&self) -> WireCert {
        match self {
            Certificate::Fin {
                outputs,
                claimed,
                step_budget,
            } => WireCert {
                v: CERT_FORMAT_VERSION,
                kind: "fin".into(),
                claimed: claimed.to_string(),
                step_budget: Some(*step_budget),
                outputs: Some(outputs.iter().map(Certificate::to_wire).collect()),
                seed: None,
                seed_cert: None,
                wrapper: None,
            },
            Certificate::Iter {
                seed,
                seed_cert,
                wrapper,
                claimed,
            } => WireCert {
                v: CERT_FORMAT_VERSION,
                kind: "iter".into(),
                claimed: claimed.to_string(),
                step_budget: None,
                outputs: None,
                seed: Some(print_onl(seed)),
                seed_cert: Some(Box::new(seed_cert.to_wire())),
                wrapper: Some(wrapper.to_string()),
            },
        }
    }

    fn from_wire(w: WireCert) -> Result<Self, CertFormatError> {
        if w.v != CERT_FORMAT_VERSION {
            return Err(CertFormatError::Version(w.v));
        }
        let claimed: OrdValue = w.claimed.parse()?;
        match w.kind.as_str() {
            "fin" => Ok(Certificate::Fin {
                outputs: w
                    .outputs
                    .unwrap_or_default()
                    .into_iter()
                    .map(Certificate::from_wire)
                    .collect::<Result<_, _>>()?,
                claimed,
                step_budget: w.step_budget.unwrap_or(Budgets::default().steps),
            }),
            "iter" => Ok(Certificate::Iter {
                seed: parse_onl(&w.seed.ok_or(CertFormatError::Missing("seed"))?)?,
                seed_cert: Box::new(Certificate::from_wire(
                    *w.seed_cert.ok_or(CertFormatError::Missing("seed_cert"))?,
                )?),
                wrapper: w
                    .wrapper
                    .ok_or(CertFormatError::Missing("wrapper"))?
                    .parse()
                    .expect("infallible"),
                claimed,
            }),
            other => Err(CertFormatError::Kind(other.to_string())),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertFormatError> {
        Certificate::from_wire(serde_json::from_str(text)?)
    }
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = WireCert::deserialize(d)?;
        Certificate::from_wire(w).map_err(serde::de::Error::custom)
    }
}
