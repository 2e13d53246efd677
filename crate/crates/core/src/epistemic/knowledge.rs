//! Agents as finitely presented knowledge sets, enumerated under a budget.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{num, parse_formula, var, Formula, Term};
use crate::onl::{parse_onl, run, Budgets};
use crate::ordinal::{sup_plus_one, OrdValue};
use crate::registry::{OVerdict, Registry, RegistryIndex};

pub type AgentId = u64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schemas {
    #[serde(default)]
    pub knows_axiom_of_o: bool,
    #[serde(default)]
    pub truthfulness_of: BTreeSet<AgentId>,
}

/// `∀x(K_j φ(x) ↔ W(x, n̄))`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntry {
    pub agent: AgentId,
    pub template: Formula,
    pub index: RegistryIndex,
}

impl CodeEntry {
    /// The template's single free variable, if it has exactly one.
    pub fn variable(&self) -> Option<String> {
        let fv = self.template.free_vars();
        (fv.len() == 1).then(|| fv.into_iter().next().expect("one element"))
    }

    pub fn sentence(&self) -> Option<Formula> {
        let x = self.variable()?;
        Some(Formula::forall(
            &x,
            Formula::iff(
                Formula::k(self.agent, self.template.clone()),
                Formula::W(var(&x), num(self.index as u64)),
            ),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OClaim {
    pub index: RegistryIndex,
}

/// One step of an auditable derivation inside an agent's knowledge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub sentence: Formula,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// A code-table sentence of the agent.
    Code,
    /// An instance of the truthfulness schema for `agent`.
    Truthfulness { agent: AgentId },
    /// A valid sentence known outright.
    Tautology,
    /// From step `implication` (`A → B`) and step `premise` (`A`).
    ModusPonens { implication: usize, premise: usize },
    AxiomOfO,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: AgentId,
    #[serde(default)]
    pub base: Vec<Formula>,
    #[serde(default)]
    pub o_claims: Vec<OClaim>,
    /// Indices `m` such that the agent knows `O(k̄)` for every `k ∈ W_m`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub o_claim_sets: Vec<RegistryIndex>,
    #[serde(default)]
    pub schemas: Schemas,
    #[serde(default)]
    pub code_tables: Vec<CodeEntry>,
    #[serde(default)]
    pub closure_budget: usize,
    /// ONL program whose outputs are further known sentences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_source: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivation: Vec<Step>,
}

impl AgentSpec {
    pub fn empty(id: AgentId) -> Self {
        AgentSpec {
            id,
            ..AgentSpec::default()
        }
    }

    pub fn claiming(id: AgentId, indices: &[RegistryIndex]) -> Self {
        AgentSpec {
            id,
            o_claims: indices.iter().map(|&index| OClaim { index }).collect(),
            ..AgentSpec::default()
        }
    }
}

/// A schema known in full, which cannot be listed sentence by sentence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Schema {
    /// Every universal closure of `K_j φ → φ`.
    Truthfulness(AgentId),
    /// A code for `K_j φ` for each template in the agent's code table.
    Codes(AgentId),
    /// `O(k̄)` for every member `k` of `W_m`.
    OClaims(RegistryIndex),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Known {
    Sentence(Formula),
    Schema(Schema),
}

impl fmt::Display for Known {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Known::Sentence(s) => s.fmt(f),
            Known::Schema(Schema::Truthfulness(j)) => write!(f, "[schema] all closures of K{j}(phi) -> phi"),
            Known::Schema(Schema::Codes(j)) => write!(f, "[schema] codes for K{j}"),
            Known::Schema(Schema::OClaims(m)) => write!(f, "[schema] O(x) for every x in W_{m}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Knowledge {
    pub items: Vec<Known>,
    /// True when every item the presentation yields was emitted.
    pub complete: bool,
    seen: HashSet<Formula>,
}

impl Knowledge {
    pub fn sentences(&self) -> impl Iterator<Item = &Formula> {
        self.items.iter().filter_map(|k| match k {
            Known::Sentence(s) => Some(s),
            Known::Schema(_) => None,
        })
    }

    pub fn contains(&self, s: &Formula) -> bool {
        self.seen.contains(&s.canonical())
    }

    pub fn has_schema(&self, s: &Schema) -> bool {
        self.items.iter().any(|k| matches!(k, Known::Schema(x) if x == s))
    }

    /// Indices `m` whose whole of `W_m` is claimed to lie in 𝒪.
    pub fn o_sets(&self) -> Vec<RegistryIndex> {
        self.items
            .iter()
            .filter_map(|k| match k {
                Known::Schema(Schema::OClaims(m)) => Some(*m),
                _ => None,
            })
            .collect()
    }

    /// Indices `n` with `O(n̄)` known, in order of first appearance.
    pub fn o_indices(&self) -> Vec<RegistryIndex> {
        let mut out = Vec::new();
        for s in self.sentences() {
            if let Formula::O(Term::Num(n)) = s {
                let n = *n as RegistryIndex;
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

struct Emitter {
    k: Knowledge,
    budget: usize,
}

impl Emitter {
    fn full(&self) -> bool {
        self.k.items.len() >= self.budget
    }

    /// Returns false once the budget is exhausted.
    fn sentence(&mut self, s: Formula) -> bool {
        let c = s.canonical();
        if self.k.seen.contains(&c) {
            return true;
        }
        if self.full() {
            return false;
        }
        self.k.seen.insert(c);
        self.k.items.push(Known::Sentence(s));
        true
    }

    fn schema(&mut self, s: Schema) -> bool {
        if self.full() {
            return false;
        }
        self.k.items.push(Known::Schema(s));
        true
    }
}

/// `∀x(K_j φ → φ)` for the template `φ(x)`.
pub fn truthfulness_instance(j: AgentId, template: &Formula, x: &str) -> Formula {
    Formula::forall(x, Formula::implies(Formula::k(j, template.clone()), template.clone()))
}

/// Templates whose truthfulness instances are listed explicitly: `O(x)`
/// and every code-table template for `j`.
fn truthfulness_templates(a: &AgentSpec, j: AgentId) -> Vec<(Formula, String)> {
    let mut out = vec![(Formula::O(var("x")), "x".to_string())];
    for c in &a.code_tables {
        if c.agent == j {
            if let Some(x) = c.variable() {
                if !out.iter().any(|(t, _)| t.alpha_eq(&c.template)) {
                    out.push((c.template.clone(), x));
                }
            }
        }
    }
    out
}

/// `∀x(A→B) → ∀x(A↔C) → ∀x(C→B)` for known premises of those shapes.
fn chaining_instances(known: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::new();
    for p1 in known {
        let Formula::ForAll(x, b1) = p1 else { continue };
        let Formula::Implies(a, b) = b1.as_ref() else { continue };
        for p2 in known {
            let Formula::ForAll(y, b2) = p2 else { continue };
            let Formula::Iff(a2, c) = b2.as_ref() else { continue };
            if x != y || !a.alpha_eq(a2) {
                continue;
            }
            let p3 = Formula::forall(x, Formula::implies((**c).clone(), (**b).clone()));
            out.push(Formula::implies(p1.clone(), Formula::implies(p2.clone(), p3)));
        }
    }
    out
}

/// `(∀y.φ) → φ[n/y]` for known universal sentences and numerals in play.
fn instantiation_instances(known: &[Formula], numerals: &BTreeSet<u64>) -> Vec<Formula> {
    let mut out = Vec::new();
    for s in known {
        let Formula::ForAll(y, body) = s else { continue };
        for &n in numerals {
            out.push(Formula::implies(s.clone(), body.instantiate(y, n)));
        }
    }
    out
}

fn modus_ponens(known: &[Formula], k: &Knowledge) -> Vec<Formula> {
    known
        .iter()
        .filter_map(|s| match s {
            Formula::Implies(a, b) if k.contains(a) => Some((**b).clone()),
            _ => None,
        })
        .collect()
}

/// Enumerates the agent's knowledge in a fixed order, stopping after
/// `budget` items. Smaller budgets give prefixes of larger ones.
pub fn enumerate_knowledge(a: &AgentSpec, budget: usize) -> Knowledge {
    let mut e = Emitter {
        k: Knowledge::default(),
        budget,
    };
    // Arbitrary sentence enumerators are never treated as finished.
    e.k.complete = emit_all(a, &mut e) && a.sentence_source.is_none();
    e.k
}

fn emit_all(a: &AgentSpec, e: &mut Emitter) -> bool {
    for s in &a.base {
        if !e.sentence(s.clone()) {
            return false;
        }
    }
    for c in &a.o_claims {
        if !e.sentence(Formula::O(num(c.index as u64))) {
            return false;
        }
    }
    for &m in &a.o_claim_sets {
        if !e.schema(Schema::OClaims(m)) {
            return false;
        }
    }
    if let Some(src) = &a.sentence_source {
        if let Ok(p) = parse_onl(src) {
            for out in &run(&p, &Budgets::default()).outputs {
                if let Ok(s) = parse_formula(out) {
                    if s.is_sentence() && !e.sentence(s) {
                        return false;
                    }
                }
            }
        }
    }
    if a.schemas.knows_axiom_of_o && !e.sentence(Formula::axiom_of_o()) {
        return false;
    }
    for &j in &a.schemas.truthfulness_of {
        if !e.schema(Schema::Truthfulness(j)) {
            return false;
        }
        for (t, x) in truthfulness_templates(a, j) {
            if !e.sentence(truthfulness_instance(j, &t, &x)) {
                return false;
            }
        }
    }
    let coded: BTreeSet<AgentId> = a.code_tables.iter().map(|c| c.agent).collect();
    for j in coded {
        if !e.schema(Schema::Codes(j)) {
            return false;
        }
        for c in a.code_tables.iter().filter(|c| c.agent == j) {
            if let Some(s) = c.sentence() {
                if !e.sentence(s) {
                    return false;
                }
            }
        }
    }
    for _ in 0..a.closure_budget {
        let before = e.k.items.len();
        let known: Vec<Formula> = e.k.sentences().cloned().collect();
        let mut numerals = BTreeSet::new();
        for s in &known {
            s.numerals(&mut numerals);
        }
        let round = chaining_instances(&known)
            .into_iter()
            .chain(instantiation_instances(&known, &numerals));
        for s in round {
            if !e.sentence(s) {
                return false;
            }
        }
        let known: Vec<Formula> = e.k.sentences().cloned().collect();
        for s in modus_ponens(&known, &e.k) {
            if !e.sentence(s) {
                return false;
            }
        }
        if e.k.items.len() == before {
            break;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureResult {
    pub bound: OrdValue,
    pub exact: bool,
    pub witnesses: Vec<(RegistryIndex, OrdValue)>,
    /// Claimed sets `W_m` with `|m|`, the least ordinal above all their members.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub claim_sets: Vec<(RegistryIndex, OrdValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("agent {agent} knows O({index}) but index {index} is not verified in 𝒪: {reason}")]
    UntruthfulAgent {
        agent: AgentId,
        index: RegistryIndex,
        reason: String,
    },
}

/// The least ordinal above `|n|` for every `O(n̄)` the agent knows.
pub fn measure(a: &AgentSpec, reg: &Registry, budget: usize) -> Result<MeasureResult, MeasureError> {
    let k = enumerate_knowledge(a, budget);
    let verify = |n: RegistryIndex| {
        match reg.o_value(n).unwrap_or_else(|e| OVerdict::Unverified(e.to_string())) {
            OVerdict::Verified(v) => Ok((n, v)),
            OVerdict::Unverified(reason) => Err(MeasureError::UntruthfulAgent {
                agent: a.id,
                index: n,
                reason,
            }),
        }
    };
    let witnesses = k.o_indices().into_iter().map(verify).collect::<Result<Vec<_>, _>>()?;
    let claim_sets = k.o_sets().into_iter().map(verify).collect::<Result<Vec<_>, _>>()?;
    let bound = if witnesses.iter().chain(&claim_sets).any(|(_, v)| v.is_overflow()) {
        OrdValue::AtLeastEpsilon0
    } else {
        let above = OrdValue::Ord(sup_plus_one(witnesses.iter().filter_map(|(_, v)| v.as_ordinal())));
        claim_sets.iter().map(|(_, v)| v.clone()).fold(above, OrdValue::max)
    };
    Ok(MeasureResult {
        bound,
        exact: k.complete,
        witnesses,
        claim_sets,
    })
}
