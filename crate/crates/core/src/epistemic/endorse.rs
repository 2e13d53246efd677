//! Total endorsement, and a constructor that builds an endorser whose
//! knowledge of its own new ordinal is derived step by step.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::formula::{is_valid_instance, num, var, Formula};
use super::knowledge::{
    enumerate_knowledge, measure, truthfulness_instance, AgentId, AgentSpec, CodeEntry,
    MeasureError, MeasureResult, Rule, Schema, Schemas, Step,
};
use crate::ordinal::{sup_plus_one, OrdValue};
use crate::registry::{OCert, Registry, RegistryIndex};

/// Closure rounds an endorser needs to reach `O(n̄)` from its axioms.
pub const ENDORSER_CLOSURE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EndorseError {
    #[error("agent {0} has no exact measure within budget")]
    NonExactMeasure(AgentId),
    #[error("agent {0} has measure at or above ε₀")]
    Overflow(AgentId),
    #[error("agent {0} cannot totally endorse itself")]
    SelfEndorsement(AgentId),
    #[error("endorsement chains need at least one link")]
    EmptyChain,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Clone, Debug, Serialize)]
pub struct Endorsement {
    pub agent: AgentSpec,
    /// Registry index of the enumerator of the endorsed agent's O-claims.
    pub code_index: RegistryIndex,
    pub endorsed_measure: MeasureResult,
}

/// Builds an agent with id `new_id` that totally endorses `j`.
pub fn build_total_endorser(
    j: &AgentSpec,
    new_id: AgentId,
    reg: &mut Registry,
    budget: usize,
) -> Result<Endorsement, EndorseError> {
    if new_id == j.id {
        return Err(EndorseError::SelfEndorsement(j.id));
    }
    let m = measure(j, reg, budget)?;
    if !m.exact {
        return Err(EndorseError::NonExactMeasure(j.id));
    }
    if m.bound.is_overflow() {
        return Err(EndorseError::Overflow(j.id));
    }
    let members: Vec<RegistryIndex> = m.witnesses.iter().map(|(n, _)| *n).collect();
    let f = reg.register_finite_set(&members);
    let above = OrdValue::Ord(sup_plus_one(m.witnesses.iter().filter_map(|(_, v)| v.as_ordinal())));
    reg.set_o_cert(f, OCert::Fin { members, claimed: above })
        .expect("index just registered");
    let n = if m.claim_sets.is_empty() {
        f
    } else {
        let mut parts = vec![f];
        parts.extend(m.claim_sets.iter().map(|(s, _)| *s));
        let n = reg.register_union(&parts);
        let parts = reg.union_parts(n).expect("union just registered");
        reg.set_o_cert(n, OCert::Union { parts, claimed: m.bound.clone() })
            .expect("index just registered");
        n
    };

    let o_x = Formula::O(var("x"));
    let code = CodeEntry {
        agent: j.id,
        template: o_x.clone(),
        index: n,
    };
    let agent = AgentSpec {
        id: new_id,
        schemas: Schemas {
            knows_axiom_of_o: true,
            truthfulness_of: BTreeSet::from([j.id]),
        },
        derivation: derivation(j.id, &code),
        code_tables: vec![code],
        closure_budget: ENDORSER_CLOSURE,
        ..AgentSpec::default()
    };
    Ok(Endorsement {
        agent,
        code_index: n,
        endorsed_measure: m,
    })
}

/// From the code for `K_j O(x)`, the truthfulness of `K_j`
/// and the axiom of 𝒪, derive `O(n̄)`.
fn derivation(j: AgentId, code: &CodeEntry) -> Vec<Step> {
    let n = code.index as u64;
    let phi2 = code.sentence().expect("O(x) has one free variable");
    let phi1 = truthfulness_instance(j, &Formula::O(var("x")), "x");
    let phi3 = Formula::forall(
        "x",
        Formula::implies(Formula::W(var("x"), num(n)), Formula::O(var("x"))),
    );
    let goal = Formula::O(num(n));
    let axiom = Formula::axiom_of_o();
    let step = |sentence, rule| Step { sentence, rule };
    let mp = |implication, premise| Rule::ModusPonens {
        implication,
        premise,
    };
    vec![
        step(phi2.clone(), Rule::Code),
        step(phi1.clone(), Rule::Truthfulness { agent: j }),
        step(
            Formula::implies(phi1, Formula::implies(phi2, phi3.clone())),
            Rule::Tautology,
        ),
        step(
            Formula::implies(code.sentence().expect("code sentence"), phi3.clone()),
            mp(2, 1),
        ),
        step(phi3.clone(), mp(3, 0)),
        step(axiom.clone(), Rule::AxiomOfO),
        step(
            Formula::implies(axiom, Formula::implies(phi3.clone(), goal.clone())),
            Rule::Tautology,
        ),
        step(Formula::implies(phi3, goal.clone()), mp(6, 5)),
        step(goal, mp(7, 4)),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("derivation step {step}: {msg}")]
pub struct ReplayError {
    pub step: usize,
    pub msg: String,
}

/// `K_j φ → φ` under any number of universal quantifiers.
fn is_truthfulness_closure(s: &Formula, j: AgentId) -> bool {
    let mut cur = s;
    while let Formula::ForAll(_, body) = cur {
        cur = body;
    }
    matches!(cur, Formula::Implies(k, b) if matches!(k.as_ref(), Formula::K(i, a) if *i == j && a == b))
        && s.is_sentence()
}

/// Re-checks every step of `a.derivation` against its rule, and that each
/// derived sentence occurs in `a`'s enumerated knowledge.
pub fn replay_derivation(a: &AgentSpec, budget: usize) -> Result<(), ReplayError> {
    let known = enumerate_knowledge(a, budget);
    let codes: Vec<Formula> = a.code_tables.iter().filter_map(CodeEntry::sentence).collect();
    for (i, st) in a.derivation.iter().enumerate() {
        let fail = |msg: &str| {
            Err(ReplayError {
                step: i,
                msg: format!("{msg}: {}", st.sentence),
            })
        };
        let ok = match &st.rule {
            Rule::Code => codes.iter().any(|c| c.alpha_eq(&st.sentence)),
            Rule::Truthfulness { agent } => {
                a.schemas.truthfulness_of.contains(agent)
                    && is_truthfulness_closure(&st.sentence, *agent)
            }
            Rule::Tautology => is_valid_instance(&st.sentence),
            Rule::AxiomOfO => {
                a.schemas.knows_axiom_of_o && st.sentence.alpha_eq(&Formula::axiom_of_o())
            }
            Rule::ModusPonens {
                implication,
                premise,
            } => {
                if *implication >= i || *premise >= i {
                    return fail("modus ponens cites a later step");
                }
                let expect = Formula::implies(
                    a.derivation[*premise].sentence.clone(),
                    st.sentence.clone(),
                );
                a.derivation[*implication].sentence.alpha_eq(&expect)
            }
        };
        if !ok {
            return fail("rule does not justify sentence");
        }
        if !known.contains(&st.sentence) {
            return fail("sentence is not in the agent's enumerated knowledge");
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EndorsementCheck {
    Confirmed,
    NotConfirmed(Vec<String>),
}

/// Semi-decides whether `i` totally endorses `j` for the given templates
/// (each with exactly one free variable). For `O(x)` the code is also
/// checked against the registry: `W_n` must be exactly `j`'s O-claims.
pub fn check_total_endorsement(
    i: &AgentSpec,
    j: &AgentSpec,
    templates: &[Formula],
    reg: &Registry,
    budget: usize,
) -> EndorsementCheck {
    let ki = enumerate_knowledge(i, budget);
    let mut missing = Vec::new();
    if !ki.has_schema(&Schema::Truthfulness(j.id)) {
        missing.push(format!("truthfulness schema for K{}", j.id));
    }
    for t in templates {
        let codes: Vec<RegistryIndex> = ki
            .sentences()
            .filter_map(|s| code_index_of(s, j.id, t))
            .collect();
        if codes.is_empty() {
            missing.push(format!("code for K{}({t})", j.id));
            continue;
        }
        if *t == Formula::O(var("x")) {
            let kj = enumerate_knowledge(j, budget);
            let claims: BTreeSet<RegistryIndex> = kj.o_indices().into_iter().collect();
            let sets: BTreeSet<RegistryIndex> = kj.o_sets().into_iter().collect();
            let correct = codes
                .iter()
                .any(|&n| enumerates_claims(reg, n, &claims, &sets, budget));
            if !correct {
                missing.push(format!(
                    "no code for K{}(O(x)) enumerates exactly its O-claims",
                    j.id
                ));
            }
        }
    }
    if missing.is_empty() {
        EndorsementCheck::Confirmed
    } else {
        EndorsementCheck::NotConfirmed(missing)
    }
}

/// Whether `W_n` is exactly the finite `claims` together with each `W_m`
/// for `m` in `sets`.
fn enumerates_claims(
    reg: &Registry,
    n: RegistryIndex,
    claims: &BTreeSet<RegistryIndex>,
    sets: &BTreeSet<RegistryIndex>,
    budget: usize,
) -> bool {
    let finite_is = |f: RegistryIndex| {
        matches!(reg.complete_members(f, budget),
            Ok(Some(w)) if w.iter().copied().collect::<BTreeSet<_>>() == *claims)
    };
    if sets.is_empty() {
        return finite_is(n);
    }
    let Ok(parts) = reg.union_parts(n) else { return false };
    let rest: Vec<RegistryIndex> = parts.iter().copied().filter(|p| !sets.contains(p)).collect();
    sets.iter().all(|m| parts.contains(m))
        && match rest[..] {
            [] => claims.is_empty(),
            [f] => finite_is(f),
            _ => false,
        }
}

/// `n` if `s` is `∀x(K_j t(x) ↔ W(x, n̄))`.
fn code_index_of(s: &Formula, j: AgentId, t: &Formula) -> Option<RegistryIndex> {
    let Formula::ForAll(_, body) = s else { return None };
    let Formula::Iff(_, w) = body.as_ref() else { return None };
    let Formula::W(_, super::formula::Term::Num(n)) = w.as_ref() else { return None };
    let entry = CodeEntry {
        agent: j,
        template: t.clone(),
        index: *n as RegistryIndex,
    };
    entry.sentence()?.alpha_eq(s).then_some(entry.index)
}

/// `[A_k, …, A_1, base]`, each agent totally endorsing the next.
pub fn endorsement_chain(
    base: &AgentSpec,
    k: usize,
    reg: &mut Registry,
    budget: usize,
) -> Result<Vec<AgentSpec>, EndorseError> {
    if k == 0 {
        return Err(EndorseError::EmptyChain);
    }
    let mut chain = vec![base.clone()];
    for id in (base.id + 1..).take(k) {
        let top = chain.last().expect("nonempty");
        let e = build_total_endorser(top, id, reg, budget)?;
        chain.push(e.agent);
    }
    chain.reverse();
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    const BUDGET: usize = 10_000;

    #[test]
    fn endorser_of_empty_agent_has_measure_one() {
        let mut reg = Registry::new();
        let j = AgentSpec::empty(1);
        let e = build_total_endorser(&j, 2, &mut reg, BUDGET).unwrap();
        let m = measure(&e.agent, &reg, BUDGET).unwrap();
        assert_eq!(m.bound, OrdValue::Ord(Ordinal::one()));
        assert!(m.exact);
        replay_derivation(&e.agent, BUDGET).unwrap();
        assert_eq!(
            check_total_endorsement(&e.agent, &j, &[Formula::O(var("x"))], &reg, BUDGET),
            EndorsementCheck::Confirmed
        );
    }

    #[test]
    fn agents_do_not_endorse_themselves() {
        let mut reg = Registry::new();
        let j = AgentSpec::empty(1);
        assert_eq!(
            build_total_endorser(&j, 1, &mut reg, BUDGET).unwrap_err(),
            EndorseError::SelfEndorsement(1)
        );
        let a = build_total_endorser(&j, 2, &mut reg, BUDGET).unwrap().agent;
        assert!(matches!(
            check_total_endorsement(&a, &a, &[Formula::O(var("x"))], &reg, BUDGET),
            EndorsementCheck::NotConfirmed(_)
        ));
        assert!(matches!(
            check_total_endorsement(&AgentSpec::empty(9), &j, &[Formula::O(var("x"))], &reg, BUDGET),
            EndorsementCheck::NotConfirmed(m) if m[0].contains("truthfulness")
        ));
    }

    #[test]
    fn tampered_derivations_fail_replay() {
        let mut reg = Registry::new();
        let mut a = build_total_endorser(&AgentSpec::empty(1), 2, &mut reg, BUDGET)
            .unwrap()
            .agent;
        a.derivation[4].rule = Rule::ModusPonens {
            implication: 3,
            premise: 1,
        };
        assert_eq!(replay_derivation(&a, BUDGET).unwrap_err().step, 4);
    }

    #[test]
    fn chains_strictly_decrease() {
        let mut reg = Registry::new();
        let chain = endorsement_chain(&AgentSpec::empty(1), 3, &mut reg, BUDGET).unwrap();
        let ms: Vec<OrdValue> = chain
            .iter()
            .map(|a| measure(a, &reg, BUDGET).unwrap().bound)
            .collect();
        let nats: Vec<OrdValue> = [3u32, 2, 1, 0].iter().map(|&n| OrdValue::Ord(Ordinal::nat(n))).collect();
        assert_eq!(ms, nats);
        assert_eq!(
            endorsement_chain(&AgentSpec::empty(1), 0, &mut reg, BUDGET).unwrap_err(),
            EndorseError::EmptyChain
        );
    }

    #[test]
    fn claimed_sets_give_limit_measures() {
        let mut reg = Registry::new();
        let pw = crate::onl::parse_onl(crate::corpus::P_OMEGA).unwrap();
        let c = reg.checker().synthesize(&pw).unwrap();
        let w = reg.embed_program(&pw, &c).unwrap();
        let j = AgentSpec {
            o_claim_sets: vec![w],
            ..AgentSpec::empty(1)
        };
        let omega = OrdValue::Ord(Ordinal::omega());
        assert_eq!(measure(&j, &reg, BUDGET).unwrap().bound, omega);
        let e = build_total_endorser(&j, 2, &mut reg, BUDGET).unwrap();
        assert_eq!(reg.o_value(e.code_index).unwrap().verified(), Some(&omega));
        let m = measure(&e.agent, &reg, BUDGET).unwrap();
        assert_eq!(m.bound, OrdValue::Ord(Ordinal::omega().add(&Ordinal::one())));
        replay_derivation(&e.agent, BUDGET).unwrap();
        assert_eq!(
            check_total_endorsement(&e.agent, &j, &[Formula::O(var("x"))], &reg, BUDGET),
            EndorsementCheck::Confirmed
        );
    }
}
