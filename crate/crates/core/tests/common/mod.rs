#![allow(dead_code)]

pub mod poly;

use ordino::epistemic::knowledge::AgentSpec;
use ordino::onl::{quote_str, Program};
use ordino::registry::{Registry, RegistryIndex};
use ordino::cert::Checker;
use ordino::corpus::corpus;
use ordino::ordinal::OrdValue;
use proptest::prelude::*;

/// A halting program shape: the program prints each child's text.
#[derive(Clone, Debug)]
pub struct Tree {
    pub children: Vec<(Tree, u8)>,
}

impl Tree {
    /// Independent value: a halting tree of height h notates h.
    pub fn height(&self) -> u32 {
        self.children.iter().map(|(c, _)| c.height() + 1).max().unwrap_or(0)
    }

    /// Renders with varied surface forms; the style byte picks how a child
    /// is printed.
    pub fn render(&self) -> String {
        if self.children.is_empty() {
            return "End".into();
        }
        let last = self.children.len() - 1;
        let mut stmts = Vec::new();
        for (i, (c, style)) in self.children.iter().enumerate() {
            let text = c.render();
            let q = quote_str(&text);
            match style % 4 {
                0 => stmts.push(format!("Print({q})")),
                1 => stmts.push(format!("Let C = {q}; Print(C)")),
                2 => {
                    let mid = text.char_indices().map(|(k, _)| k).nth(text.chars().count() / 2).unwrap_or(0);
                    let (a, b) = text.split_at(mid);
                    stmts.push(format!("Print({} + {})", quote_str(a), quote_str(b)));
                }
                _ if i == last => stmts.push(format!("While(True) {{ Print({q}); End }}")),
                _ => stmts.push(format!("Let D = \"x\"; Print({q})")),
            }
        }
        stmts.join("; ")
    }

    /// A tree of depth at most `depth` with up to three children per node.
    pub fn random(rng: &mut impl rand::Rng, depth: u32) -> Tree {
        let n = if depth == 0 { 0 } else { rng.gen_range(0..=3) };
        Tree {
            children: (0..n).map(|_| (Tree::random(rng, depth - 1), rng.gen())).collect(),
        }
    }

    pub fn program(&self) -> Program {
        ordino::onl::parse_onl(&self.render()).expect("generated program parses")
    }
}

/// Trees of depth at most 3 and fan-out at most 3.
pub fn arb_tree() -> impl Strategy<Value = Tree> {
    let leaf = Just(Tree { children: vec![] });
    leaf.prop_recursive(3, 40, 3, |inner| {
        prop::collection::vec((inner, any::<u8>()), 0..=3).prop_map(|children| Tree { children })
    })
}

/// Registers the corpus entries below ε₀ and returns (index, value) pairs.
pub fn embedded_corpus(reg: &mut Registry, upto: usize) -> Vec<(RegistryIndex, OrdValue)> {
    let checker = Checker::default();
    corpus()
        .into_iter()
        .take(upto)
        .map(|e| {
            let c = checker.synthesize(&e.program).expect("corpus certificate");
            (reg.embed_program(&e.program, &c).expect("embeds"), e.expected)
        })
        .collect()
}

/// Agents with exact measures 0, 1, 3, ω, ω+1, ω·2 and ω², some in
/// several presentations, with their expected measures.
pub fn fleet(reg: &mut Registry) -> Vec<(AgentSpec, OrdValue)> {
    let emb = embedded_corpus(reg, 9);
    let idx = |k: usize| emb[k].0;
    let v = |s: &str| s.parse::<OrdValue>().unwrap();
    let base = |id, claims: &[RegistryIndex]| AgentSpec::claiming(id, claims);
    let sets = |id, claims: &[RegistryIndex], sets: &[RegistryIndex]| AgentSpec {
        o_claim_sets: sets.to_vec(),
        ..AgentSpec::claiming(id, claims)
    };
    let mut knows = base(110, &[idx(1)]);
    knows.base = vec!["O(0) -> 0=0".parse().unwrap()];
    knows.closure_budget = 2;
    vec![
        (AgentSpec::empty(100), v("0")),
        (base(101, &[idx(0)]), v("1")),
        (base(102, &[idx(0), idx(2)]), v("3")),
        (base(103, &[idx(2), idx(1)]), v("3")),
        (base(104, &[idx(0), idx(1), idx(2)]), v("3")),
        (base(105, &[idx(4)]), v("w + 2")),
        (base(106, &[idx(3)]), v("w + 1")),
        (base(107, &[idx(0), idx(5)]), v("w + 3")),
        (base(108, &[idx(6)]), v("w*2 + 1")),
        (base(109, &[idx(8)]), v("w^2 + 1")),
        (knows, v("2")),
        (sets(111, &[], &[idx(3)]), v("w")),
        (sets(112, &[idx(2)], &[idx(3)]), v("w")),
        (sets(113, &[idx(3)], &[idx(3)]), v("w + 1")),
        (sets(114, &[], &[idx(6)]), v("w*2")),
        (sets(115, &[idx(1)], &[idx(3), idx(8)]), v("w^2")),
        (sets(116, &[], &[idx(8)]), v("w^2")),
    ]
}
