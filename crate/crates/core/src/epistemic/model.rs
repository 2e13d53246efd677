//! Three-valued approximation of the standard model.
//!
//! Quantifiers range over `0..=N`. `W` and `O` are only semi-decided, so a
//! failed search gives `Unknown`, never `False`; `K_i φ` is `True` when the
//! sentence appears in agent `i`'s enumerated knowledge. Connectives follow
//! strong Kleene rules, so raising the budget can only resolve `Unknown`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::formula::{Formula, Term};
use super::knowledge::{enumerate_knowledge, AgentId, AgentSpec, Knowledge};
use crate::registry::{Membership, OVerdict, Registry, RegistryIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        self.not().and(other.not()).not()
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "True",
            Truth::False => "False",
            Truth::Unknown => "Unknown",
        })
    }
}

pub struct ModelContext<'a> {
    reg: &'a Registry,
    agents: HashMap<AgentId, &'a AgentSpec>,
    budget: usize,
    knowledge: RefCell<HashMap<AgentId, Knowledge>>,
}

impl<'a> ModelContext<'a> {
    pub fn new(reg: &'a Registry, agents: &'a [AgentSpec], budget: usize) -> Self {
        ModelContext {
            reg,
            agents: agents.iter().map(|a| (a.id, a)).collect(),
            budget,
            knowledge: RefCell::new(HashMap::new()),
        }
    }

    fn knows(&self, i: AgentId, s: &Formula) -> Truth {
        let Some(a) = self.agents.get(&i) else { return Truth::Unknown };
        let mut cache = self.knowledge.borrow_mut();
        let k = cache
            .entry(i)
            .or_insert_with(|| enumerate_knowledge(a, self.budget));
        let in_claimed_set = match s {
            Formula::O(Term::Num(n)) => k.o_sets().into_iter().any(|m| {
                matches!(
                    self.reg.w_member(*n as RegistryIndex, m, self.budget),
                    Ok(Membership::Yes)
                )
            }),
            _ => false,
        };
        if k.contains(s) || in_claimed_set {
            Truth::True
        } else {
            Truth::Unknown
        }
    }
}

/// Evaluates sentence `s` with quantifiers over `0..=domain`.
pub fn bounded_model_check(s: &Formula, domain: u64, ctx: &ModelContext<'_>) -> Truth {
    eval(s, domain, ctx, &mut Vec::new())
}

fn term(t: &Term, env: &[(String, u64)]) -> Option<u64> {
    match t {
        Term::Num(n) => Some(*n),
        Term::Var(v) => env.iter().rev().find(|(x, _)| x == v).map(|(_, n)| *n),
    }
}

fn close(f: &Formula, env: &[(String, u64)]) -> Formula {
    let mut out = f.clone();
    let mut done = Vec::new();
    for (x, n) in env.iter().rev() {
        if !done.contains(x) {
            out = out.instantiate(x, *n);
            done.push(x.clone());
        }
    }
    out
}

fn eval(f: &Formula, domain: u64, ctx: &ModelContext<'_>, env: &mut Vec<(String, u64)>) -> Truth {
    match f {
        Formula::Eq(a, b) => match (term(a, env), term(b, env)) {
            (Some(a), Some(b)) => Truth::from_bool(a == b),
            _ => Truth::Unknown,
        },
        Formula::W(a, b) => match (term(a, env), term(b, env)) {
            (Some(m), Some(n)) => {
                match ctx.reg.w_member(m as RegistryIndex, n as RegistryIndex, ctx.budget) {
                    Ok(Membership::Yes) => Truth::True,
                    _ => Truth::Unknown,
                }
            }
            _ => Truth::Unknown,
        },
        Formula::O(a) => match term(a, env).map(|n| ctx.reg.o_value(n as RegistryIndex)) {
            Some(Ok(OVerdict::Verified(_))) => Truth::True,
            _ => Truth::Unknown,
        },
        Formula::K(i, a) => ctx.knows(*i, &close(a, env)),
        Formula::Not(a) => eval(a, domain, ctx, env).not(),
        Formula::And(a, b) => eval(a, domain, ctx, env).and(eval(b, domain, ctx, env)),
        Formula::Or(a, b) => eval(a, domain, ctx, env).or(eval(b, domain, ctx, env)),
        Formula::Implies(a, b) => eval(a, domain, ctx, env).not().or(eval(b, domain, ctx, env)),
        Formula::Iff(a, b) => {
            let (x, y) = (eval(a, domain, ctx, env), eval(b, domain, ctx, env));
            x.not().or(y).and(y.not().or(x))
        }
        Formula::ForAll(x, a) | Formula::Exists(x, a) => {
            let universal = matches!(f, Formula::ForAll(..));
            let mut acc = Truth::from_bool(universal);
            for n in 0..=domain {
                env.push((x.clone(), n));
                let v = eval(a, domain, ctx, env);
                env.pop();
                acc = if universal { acc.and(v) } else { acc.or(v) };
                if acc == Truth::from_bool(!universal) {
                    break;
                }
            }
            acc
        }
    }
}
