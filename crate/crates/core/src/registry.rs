//! A finite, persistent stand-in for the indexed enumerations `W_n` and the
//! notation set 𝒪.
//!
//! Each index names an enumerator of naturals:
//!
//! * `onl`: an ONL program whose outputs are decimal numerals;
//! * `embed`: an ONL program whose outputs are themselves programs, each
//!   enumerated as the index of its own `embed` entry (outputs that were
//!   never registered are not members of anything we can see);
//! * `builtin`: `empty` or `naturals`;
//! * `union`: a comma-separated list of indices whose sets are merged.
//!
//! Entries may carry an `o_cert` witnessing membership in 𝒪. Values are
//! always recomputed from the certificate tree, never read from a claim.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cert::{match_iterator, Certificate, Checker, Rejection, WrapperId};
use crate::onl::{parse_onl, print_onl, run, Budgets, OnlError, Program, RunStatus};
use crate::ordinal::{iterate_sup, sup_plus_one, OrdValue};

pub type RegistryIndex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Onl,
    Embed,
    Builtin,
    Union,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Onl => "onl",
            SourceKind::Embed => "embed",
            SourceKind::Builtin => "builtin",
            SourceKind::Union => "union",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Empty,
    Naturals,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Empty => "empty",
            Builtin::Naturals => "naturals",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "empty" => Some(Builtin::Empty),
            "naturals" => Some(Builtin::Naturals),
            _ => None,
        }
    }
}

/// Evidence that an index belongs to 𝒪, with leaves that are other indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OCert {
    /// The enumerator halts with exactly `members`, each in 𝒪.
    Fin {
        members: Vec<RegistryIndex>,
        claimed: OrdValue,
    },
    /// An `embed` iterator over the program registered at `seed`.
    Iter {
        seed: RegistryIndex,
        wrapper: WrapperId,
        claimed: OrdValue,
    },
    /// A `union` entry whose parts are all in 𝒪; its value is the largest
    /// part's value.
    Union {
        parts: Vec<RegistryIndex>,
        claimed: OrdValue,
    },
}

impl OCert {
    pub fn claimed(&self) -> &OrdValue {
        match self {
            OCert::Fin { claimed, .. }
            | OCert::Iter { claimed, .. }
            | OCert::Union { claimed, .. } => claimed,
        }
    }
}

impl Serialize for WrapperId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WrapperId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(String::deserialize(d)?.parse().expect("infallible"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub index: RegistryIndex,
    pub kind: SourceKind,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_cert: Option<OCert>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    NotSeen,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OVerdict {
    Verified(OrdValue),
    Unverified(String),
}

impl OVerdict {
    pub fn verified(&self) -> Option<&OrdValue> {
        match self {
            OVerdict::Verified(v) => Some(v),
            OVerdict::Unverified(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown registry index {0}")]
    UnknownIndex(RegistryIndex),
    #[error("invalid enumerator program: {0}")]
    InvalidProgram(#[from] OnlError),
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("certificate rejected: {0}")]
    RejectedCertificate(Rejection),
    #[error("index {0} is a {1} entry; this operation needs {2}")]
    WrongKind(RegistryIndex, SourceKind, SourceKind),
    #[error("registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("malformed union source {0:?}")]
    BadUnion(String),
    #[error("registry file: entry at position {pos} has index {index}")]
    NonDenseIndex { pos: usize, index: RegistryIndex },
}

/// Outcome of running an enumerator to completion or budget.
struct Enumeration {
    members: Vec<Option<RegistryIndex>>,
    complete: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
    by_source: HashMap<(SourceKind, String), RegistryIndex>,
    checker: Checker,
}

/// Bound on nested `o_value` recursion.
const MAX_O_DEPTH: usize = 256;

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn with_checker(checker: Checker) -> Self {
        Registry {
            checker,
            ..Registry::default()
        }
    }

    pub fn checker(&self) -> &Checker {
        &self.checker
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn entry(&self, n: RegistryIndex) -> Result<&RegistryEntry, RegistryError> {
        self.entries.get(n).ok_or(RegistryError::UnknownIndex(n))
    }

    fn insert(&mut self, kind: SourceKind, source: String) -> RegistryIndex {
        if let Some(&n) = self.by_source.get(&(kind, source.clone())) {
            return n;
        }
        let index = self.entries.len();
        self.by_source.insert((kind, source.clone()), index);
        self.entries.push(RegistryEntry {
            index,
            kind,
            source,
            o_cert: None,
        });
        index
    }

    /// Registers an ONL program enumerating decimal numerals.
    pub fn register_onl(&mut self, p: &Program) -> RegistryIndex {
        self.insert(SourceKind::Onl, print_onl(p))
    }

    pub fn register_onl_text(&mut self, text: &str) -> Result<RegistryIndex, RegistryError> {
        Ok(self.register_onl(&parse_onl(text)?))
    }

    pub fn register_builtin(&mut self, b: Builtin) -> RegistryIndex {
        self.insert(SourceKind::Builtin, b.name().to_string())
    }

    /// Registers a finite set of indices as an ONL numeral enumerator.
    pub fn register_finite_set(&mut self, members: &[RegistryIndex]) -> RegistryIndex {
        if members.is_empty() {
            return self.register_onl(&Program::end());
        }
        let stmts = members
            .iter()
            .map(|m| crate::onl::Stmt::Print(crate::onl::Expr::lit(m.to_string())))
            .collect();
        let p = Program::new(stmts).expect("literal prints bind nothing");
        self.register_onl(&p)
    }

    /// Registers `W = ⋃ W_p` over `parts`, sorted and deduplicated.
    pub fn register_union(&mut self, parts: &[RegistryIndex]) -> RegistryIndex {
        let mut parts = parts.to_vec();
        parts.sort_unstable();
        parts.dedup();
        self.insert(SourceKind::Union, join_indices(&parts))
    }

    /// The parts of a `union` entry.
    pub fn union_parts(&self, n: RegistryIndex) -> Result<Vec<RegistryIndex>, RegistryError> {
        let e = self.entry(n)?;
        if e.kind != SourceKind::Union {
            return Err(RegistryError::WrongKind(n, e.kind, SourceKind::Union));
        }
        split_indices(&e.source).ok_or_else(|| RegistryError::BadUnion(e.source.clone()))
    }

    pub fn lookup(&self, kind: SourceKind, source: &str) -> Option<RegistryIndex> {
        self.by_source.get(&(kind, source.to_string())).copied()
    }

    pub fn set_o_cert(&mut self, n: RegistryIndex, c: OCert) -> Result<(), RegistryError> {
        self.entries
            .get_mut(n)
            .ok_or(RegistryError::UnknownIndex(n))?
            .o_cert = Some(c);
        Ok(())
    }

    fn enumerate(&self, n: RegistryIndex, budget: usize) -> Result<Enumeration, RegistryError> {
        let e = self.entry(n)?;
        match e.kind {
            SourceKind::Builtin => match Builtin::from_name(&e.source) {
                Some(Builtin::Empty) => Ok(Enumeration {
                    members: Vec::new(),
                    complete: true,
                }),
                Some(Builtin::Naturals) => Ok(Enumeration {
                    members: (0..budget).map(Some).collect(),
                    complete: false,
                }),
                None => Err(RegistryError::UnknownBuiltin(e.source.clone())),
            },
            SourceKind::Union => {
                let mut members = Vec::new();
                let mut complete = true;
                for part in self.union_parts(n)? {
                    if part == n {
                        complete = false;
                        continue;
                    }
                    let en = self.enumerate(part, budget)?;
                    members.extend(en.members);
                    complete &= en.complete;
                }
                Ok(Enumeration { members, complete })
            }
            SourceKind::Onl | SourceKind::Embed => {
                let p = parse_onl(&e.source)?;
                let budgets = Budgets {
                    outputs: budget,
                    ..self.checker.budgets
                };
                let res = run(&p, &budgets);
                let members = res
                    .outputs
                    .iter()
                    .map(|out| match e.kind {
                        SourceKind::Onl => out.trim().parse::<RegistryIndex>().ok(),
                        _ => parse_onl(out)
                            .ok()
                            .and_then(|q| self.lookup(SourceKind::Embed, &print_onl(&q))),
                    })
                    .collect();
                Ok(Enumeration {
                    members,
                    complete: matches!(res.status, RunStatus::Halted { .. }),
                })
            }
        }
    }

    /// Semi-decides `m ∈ W_n` by inspecting the first `budget` outputs.
    pub fn w_member(
        &self,
        m: RegistryIndex,
        n: RegistryIndex,
        budget: usize,
    ) -> Result<Membership, RegistryError> {
        let en = self.enumerate(n, budget)?;
        Ok(if en.members.contains(&Some(m)) {
            Membership::Yes
        } else {
            Membership::NotSeen
        })
    }

    /// All members of `W_n`, if its enumerator halts within `budget` outputs
    /// and every output names an index.
    pub fn complete_members(
        &self,
        n: RegistryIndex,
        budget: usize,
    ) -> Result<Option<Vec<RegistryIndex>>, RegistryError> {
        let en = self.enumerate(n, budget)?;
        Ok(if en.complete {
            en.members.into_iter().collect()
        } else {
            None
        })
    }

    /// Recomputes `|n|` from the stored certificate tree.
    pub fn o_value(&self, n: RegistryIndex) -> Result<OVerdict, RegistryError> {
        self.entry(n)?;
        let mut memo = HashMap::new();
        Ok(self.o_value_at(n, &mut HashSet::new(), &mut memo, 0))
    }

    fn o_value_at(
        &self,
        n: RegistryIndex,
        active: &mut HashSet<RegistryIndex>,
        memo: &mut HashMap<RegistryIndex, OVerdict>,
        depth: usize,
    ) -> OVerdict {
        if let Some(v) = memo.get(&n) {
            return v.clone();
        }
        if depth > MAX_O_DEPTH {
            return OVerdict::Unverified("certificate nesting too deep".into());
        }
        if !active.insert(n) {
            return OVerdict::Unverified(format!("certificate cycle through index {n}"));
        }
        let verdict = self.o_value_uncached(n, active, memo, depth);
        active.remove(&n);
        memo.insert(n, verdict.clone());
        verdict
    }

    fn o_value_uncached(
        &self,
        n: RegistryIndex,
        active: &mut HashSet<RegistryIndex>,
        memo: &mut HashMap<RegistryIndex, OVerdict>,
        depth: usize,
    ) -> OVerdict {
        let Some(entry) = self.entries.get(n) else {
            return OVerdict::Unverified(format!("unknown index {n}"));
        };
        let Some(cert) = &entry.o_cert else {
            return OVerdict::Unverified("no certificate".into());
        };
        let computed = match cert {
            OCert::Fin { members, .. } => {
                let en = match self.enumerate(n, members.len() + 1) {
                    Ok(en) => en,
                    Err(e) => return OVerdict::Unverified(e.to_string()),
                };
                if !en.complete {
                    return OVerdict::Unverified("enumerator does not halt within budget".into());
                }
                let listed: Vec<Option<RegistryIndex>> = members.iter().copied().map(Some).collect();
                if en.members != listed {
                    return OVerdict::Unverified("enumerated members differ from certificate".into());
                }
                let mut values = Vec::with_capacity(members.len());
                let mut overflow = false;
                for &m in members {
                    match self.o_value_at(m, active, memo, depth + 1) {
                        OVerdict::Verified(OrdValue::Ord(v)) => values.push(v),
                        OVerdict::Verified(OrdValue::AtLeastEpsilon0) => overflow = true,
                        OVerdict::Unverified(why) => {
                            return OVerdict::Unverified(format!("member {m}: {why}"))
                        }
                    }
                }
                if overflow {
                    OrdValue::AtLeastEpsilon0
                } else {
                    OrdValue::Ord(sup_plus_one(&values))
                }
            }
            OCert::Union { parts, .. } => {
                match self.union_parts(n) {
                    Ok(listed) if &listed == parts => {}
                    Ok(_) => return OVerdict::Unverified("union parts differ from certificate".into()),
                    Err(e) => return OVerdict::Unverified(e.to_string()),
                }
                let mut best = OrdValue::zero();
                for &p in parts {
                    match self.o_value_at(p, active, memo, depth + 1) {
                        OVerdict::Verified(v) => best = best.max(v),
                        OVerdict::Unverified(why) => {
                            return OVerdict::Unverified(format!("part {p}: {why}"))
                        }
                    }
                }
                best
            }
            OCert::Iter { seed, wrapper, .. } => {
                match self.check_iter(entry, *seed, wrapper) {
                    Ok(()) => {}
                    Err(why) => return OVerdict::Unverified(why),
                }
                let entry_map = self
                    .checker
                    .lib
                    .get(wrapper)
                    .expect("wrapper resolved by check_iter")
                    .value_map;
                match self.o_value_at(*seed, active, memo, depth + 1) {
                    OVerdict::Verified(OrdValue::Ord(v)) => match iterate_sup(&entry_map, &v) {
                        Ok(v) => v,
                        Err(e) => return OVerdict::Unverified(e.to_string()),
                    },
                    OVerdict::Verified(OrdValue::AtLeastEpsilon0) => OrdValue::AtLeastEpsilon0,
                    OVerdict::Unverified(why) => {
                        return OVerdict::Unverified(format!("seed {seed}: {why}"))
                    }
                }
            }
        };
        if &computed != cert.claimed() {
            return OVerdict::Unverified(format!(
                "claimed {}, recomputed {computed}",
                cert.claimed()
            ));
        }
        OVerdict::Verified(computed)
    }

    fn check_iter(
        &self,
        entry: &RegistryEntry,
        seed: RegistryIndex,
        wrapper: &WrapperId,
    ) -> Result<(), String> {
        if entry.kind != SourceKind::Embed {
            return Err("iterator certificates apply only to embedded programs".into());
        }
        let p = parse_onl(&entry.source).map_err(|e| e.to_string())?;
        let shape = match_iterator(&p).ok_or("program is not a canonical iterator")?;
        let found = self
            .checker
            .lib
            .find(&shape.template)
            .ok_or("loop template matches no library wrapper")?;
        if &found.id != wrapper {
            return Err(format!("certificate names {wrapper}, program uses {}", found.id));
        }
        let seed_entry = self.entries.get(seed).ok_or(format!("unknown seed index {seed}"))?;
        if seed_entry.kind != SourceKind::Embed || seed_entry.source != shape.emitted_seed() {
            return Err("seed index does not hold the iterator's seed".into());
        }
        self.checker
            .smoke_test(&p, &shape)
            .map_err(|r| r.to_string())
    }

    /// Registers `p` and, recursively, the programs its certificate mentions.
    pub fn embed_program(
        &mut self,
        p: &Program,
        c: &Certificate,
    ) -> Result<RegistryIndex, RegistryError> {
        self.checker
            .check(p, c)
            .map_err(RegistryError::RejectedCertificate)?;
        Ok(self.embed_checked(p, c))
    }

    fn embed_checked(&mut self, p: &Program, c: &Certificate) -> RegistryIndex {
        let o_cert = match c {
            Certificate::Fin {
                outputs,
                claimed,
                step_budget,
            } => {
                let budgets = Budgets {
                    steps: *step_budget,
                    ..self.checker.budgets
                };
                let texts = run(p, &budgets).outputs;
                let members = texts
                    .iter()
                    .zip(outputs)
                    .map(|(t, oc)| {
                        let q = parse_onl(t).expect("checked output parses");
                        self.embed_checked(&q, oc)
                    })
                    .collect();
                OCert::Fin {
                    members,
                    claimed: claimed.clone(),
                }
            }
            Certificate::Iter {
                seed,
                seed_cert,
                wrapper,
                claimed,
            } => OCert::Iter {
                seed: self.embed_checked(seed, seed_cert),
                wrapper: wrapper.clone(),
                claimed: claimed.clone(),
            },
        };
        let n = self.insert(SourceKind::Embed, print_onl(p));
        if self.entries[n].o_cert.is_none() {
            self.entries[n].o_cert = Some(o_cert);
        }
        n
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("registry serializes")
    }

    pub fn from_json(text: &str, checker: Checker) -> Result<Self, RegistryError> {
        let entries: Vec<RegistryEntry> = serde_json::from_str(text)?;
        let mut reg = Registry::with_checker(checker);
        for (pos, e) in entries.into_iter().enumerate() {
            if e.index != pos {
                return Err(RegistryError::NonDenseIndex {
                    pos,
                    index: e.index,
                });
            }
            match e.kind {
                SourceKind::Builtin if Builtin::from_name(&e.source).is_none() => {
                    return Err(RegistryError::UnknownBuiltin(e.source))
                }
                SourceKind::Builtin => {}
                SourceKind::Union => {
                    split_indices(&e.source).ok_or_else(|| RegistryError::BadUnion(e.source.clone()))?;
                }
                _ => {
                    parse_onl(&e.source)?;
                }
            }
            reg.by_source.insert((e.kind, e.source.clone()), pos);
            reg.entries.push(e);
        }
        Ok(reg)
    }

    /// Loads from `path`, or starts empty if the file does not exist.
    pub fn load(path: &Path, checker: Checker) -> Result<Self, RegistryError> {
        match std::fs::read_to_string(path) {
            Ok(text) => Registry::from_json(&text, checker),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Registry::with_checker(checker)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn join_indices(xs: &[RegistryIndex]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn split_indices(s: &str) -> Option<Vec<RegistryIndex>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}
