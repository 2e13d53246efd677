//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::poly::{poly_add, poly_cmp, poly_mul, to_ordinal, triples};
use common::{fleet, Tree};
use ordino::cert::Checker;
use ordino::corpus::{corpus, verify_corpus, EntryKind};
use ordino::epistemic::endorse::EndorsementCheck;
use ordino::epistemic::formula::var;
use ordino::epistemic::{
    build_total_endorser, check_total_endorsement, endorsement_chain, measure, replay_derivation,
    AgentSpec, Formula,
};
use ordino::fgh::{fast_growing_u64, DEFAULT_FGH_BUDGET};
use ordino::onl::{value_bruteforce, BruteValue, Budgets};
use ordino::ordinal::{compare, OrdValue, Ordinal, DEFAULT_MAX_DEPTH};
use ordino::registry::{OVerdict, Registry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_LIMIT: Duration = Duration::from_secs(5);
const FIN_PROGRAMS: usize = 500;
const FIN_DEPTH: u32 = 3;
const BRUTE_LIMIT: Duration = Duration::from_secs(30);
const ORACLE_MAX_COMPONENT: u64 = 5;
const LAW_CASES: usize = 10_000;
const FLEET_MIN: usize = 10;
const THEOREM_LIMIT: Duration = Duration::from_secs(10);
const CHAIN_K: usize = 10;
const CHAIN_LIMIT: Duration = Duration::from_secs(10);
const BUDGET: usize = 10_000;
const SEED: u64 = 0x0d1a_2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let out = f()?;
    let spent = t.elapsed();
    if spent > limit {
        return Err(format!("{out}; took {spent:.2?}, limit {limit:?}"));
    }
    Ok(format!("{out}; {spent:.2?}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_table() -> Outcome {
    timed(CORPUS_LIMIT, || {
        let reports = verify_corpus(&Checker::default());
        for (r, e) in reports.iter().zip(corpus()) {
            let got = r.result.clone()?;
            ensure(r.pass && got == e.expected.to_string(), || {
                format!("{}: expected {}, got {got}", r.name, e.expected)
            })?;
        }
        let paper = reports.iter().filter(|r| r.kind == EntryKind::Paper).count();
        ensure(paper == 9 && reports.len() == 13, || format!("{} entries", reports.len()))?;
        Ok(format!("{paper} paper + {} exercise entries exact", reports.len() - paper))
    })
}

fn brute_force_agreement() -> Outcome {
    timed(BRUTE_LIMIT, || {
        let checker = Checker::default();
        let budgets = Budgets::default();
        let mut compared = 0;
        for e in corpus() {
            if let BruteValue::Exact(v) = value_bruteforce(&e.program, &budgets) {
                let c = checker.synthesize(&e.program).map_err(|e| e.to_string())?;
                let got = checker.check(&e.program, &c).map_err(|e| e.to_string())?;
                ensure(got == OrdValue::Ord(v.clone()), || format!("{}: {got} vs {v}", e.name))?;
                compared += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for i in 0..FIN_PROGRAMS {
            let t = Tree::random(&mut rng, FIN_DEPTH);
            let p = t.program();
            let c = checker.synthesize(&p).map_err(|e| format!("program {i}: {e}"))?;
            let got = checker.check(&p, &c).map_err(|e| format!("program {i}: {e}"))?;
            let want = Ordinal::nat(t.height());
            ensure(value_bruteforce(&p, &budgets) == BruteValue::Exact(want.clone()), || {
                format!("program {i}: brute force disagrees")
            })?;
            ensure(got == OrdValue::Ord(want), || format!("program {i}: certificate gives {got}"))?;
        }
        Ok(format!("{compared} halting corpus programs, {FIN_PROGRAMS} generated programs"))
    })
}

fn random_ordinal(rng: &mut ChaCha8Rng, depth: u32) -> Ordinal {
    if depth == 0 {
        return Ordinal::nat(rng.gen_range(0u32..6));
    }
    let mut exps: Vec<Ordinal> = (0..rng.gen_range(0..4)).map(|_| random_ordinal(rng, depth - 1)).collect();
    exps.sort_by(|a, b| b.cmp(a));
    exps.dedup();
    exps.into_iter().fold(Ordinal::zero(), |acc, e| {
        acc.add(&Ordinal::monomial(e, rng.gen_range(1u32..6)))
    })
}

fn ordinal_oracle() -> Outcome {
    let ts = triples(ORACLE_MAX_COMPONENT);
    let ords: Vec<Ordinal> = ts.iter().map(to_ordinal).collect();
    for (x, ox) in ts.iter().zip(&ords) {
        for (y, oy) in ts.iter().zip(&ords) {
            ensure(compare(ox, oy) == poly_cmp(x, y), || format!("compare {ox} {oy}"))?;
            ensure(ox.add(oy) == to_ordinal(&poly_add(x, y)), || format!("add {ox} {oy}"))?;
            ensure(ox.mul(oy) == to_ordinal(&poly_mul(x, y)), || format!("mul {ox} {oy}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..LAW_CASES {
        let [a, b, c] = [0; 3].map(|_| random_ordinal(&mut rng, 2));
        let law = |ok: bool, name: &str| ensure(ok, || format!("{name} fails for {a}, {b}, {c}"));
        law(a.add(&b).add(&c) == a.add(&b.add(&c)), "associativity of +")?;
        law(a.mul(&b).mul(&c) == a.mul(&b.mul(&c)), "associativity of *")?;
        law(a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c)), "left distributivity")?;
        law(a.add(&Ordinal::zero()) == a && Ordinal::zero().add(&a) == a, "zero")?;
        law(a.mul(&Ordinal::one()) == a && Ordinal::one().mul(&a) == a, "one")?;
        law(compare(&a, &b) == compare(&b, &a).reverse(), "antisymmetry")?;
        if a < b {
            law(c.add(&a) < c.add(&b), "strict monotonicity of c+")?;
            law(a.add(&c) <= b.add(&c), "weak monotonicity of +c")?;
        }
        if a <= b && b <= c {
            law(a <= c, "transitivity")?;
        }
        law(
            a.add(&b).omega_pow(DEFAULT_MAX_DEPTH) == a.omega_pow(DEFAULT_MAX_DEPTH).mul(&b.omega_pow(DEFAULT_MAX_DEPTH)),
            "w^(a+b) = w^a * w^b",
        )?;
    }
    Ok(format!("{} pairs exhaustive, {LAW_CASES} random law cases", ts.len() * ts.len()))
}

fn theorem() -> Outcome {
    timed(THEOREM_LIMIT, || {
        let mut reg = Registry::new();
        let allowed = ["0", "1", "3", "w", "w + 1", "w*2", "w^2"].map(|s| s.parse::<OrdValue>().unwrap());
        let agents: Vec<_> = fleet(&mut reg).into_iter().filter(|(_, m)| allowed.contains(m)).collect();
        ensure(agents.len() >= FLEET_MIN, || format!("fleet has {} agents", agents.len()))?;
        let mut covered = Vec::new();
        for (a, want) in &agents {
            let mj = measure(a, &reg, BUDGET).map_err(|e| e.to_string())?;
            ensure(mj.exact && mj.bound == *want, || format!("agent {}: measure {}", a.id, mj.bound))?;
            if !covered.contains(want) {
                covered.push(want.clone());
            }
            let e = build_total_endorser(a, a.id + 1000, &mut reg, BUDGET).map_err(|e| e.to_string())?;
            let mi = measure(&e.agent, &reg, BUDGET).map_err(|e| e.to_string())?;
            ensure(mi.bound > mj.bound, || format!("agent {}: {} is not above {}", a.id, mi.bound, mj.bound))?;
        }
        ensure(covered.len() == allowed.len(), || format!("fleet covers only {covered:?}"))?;
        Ok(format!("{} agents, every endorser strictly higher", agents.len()))
    })
}

fn chain() -> Outcome {
    timed(CHAIN_LIMIT, || {
        let mut reg = Registry::new();
        let chain = endorsement_chain(&AgentSpec::empty(0), CHAIN_K, &mut reg, BUDGET).map_err(|e| e.to_string())?;
        ensure(chain.len() == CHAIN_K + 1, || format!("{} agents", chain.len()))?;
        let ms = chain
            .iter()
            .map(|a| measure(a, &reg, BUDGET).map(|m| m.bound))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        ensure(ms.windows(2).all(|w| w[0] > w[1]), || format!("measures {ms:?}"))?;
        let o_x = Formula::O(var("x"));
        for pair in chain.windows(2) {
            replay_derivation(&pair[0], BUDGET).map_err(|e| format!("agent {}: {e}", pair[0].id))?;
            let c = check_total_endorsement(&pair[0], &pair[1], std::slice::from_ref(&o_x), &reg, BUDGET);
            ensure(c == EndorsementCheck::Confirmed, || format!("agent {}: {c:?}", pair[0].id))?;
        }
        Ok(format!("{} strictly decreasing measures from {}", ms.len(), ms[0]))
    })
}

fn cross_module_identity() -> Outcome {
    let mut reg = Registry::new();
    let agents = fleet(&mut reg);
    for (a, _) in &agents {
        let m = measure(a, &reg, BUDGET).map_err(|e| e.to_string())?;
        let e = build_total_endorser(a, a.id + 1000, &mut reg, BUDGET).map_err(|e| e.to_string())?;
        let v = reg.o_value(e.code_index).map_err(|e| e.to_string())?;
        ensure(v == OVerdict::Verified(m.bound.clone()), || {
            format!("agent {}: o_value {v:?}, measure {}", a.id, m.bound)
        })?;
    }
    Ok(format!("{} agents", agents.len()))
}

fn fgh_spots() -> Outcome {
    for (a, n, want) in [(0u32, 7u64, 8u64), (1, 5, 10), (2, 3, 24), (3, 2, 2048)] {
        let got = fast_growing_u64(&Ordinal::nat(a), n, DEFAULT_FGH_BUDGET).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("f_{a}({n}) = {got}, expected {want}"))?;
    }
    Ok("f0(7)=8 f1(5)=10 f2(3)=24 f3(2)=2048".into())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir();
    let once = || {
        Command::new(env!("CARGO_BIN_EXE_ordino"))
            .args(["corpus", "verify", "--json"])
            .current_dir(&dir)
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    ensure(a.status.success() && b.status.success(), || "corpus verify failed".into())?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("corpus value table", corpus_table),
        ("brute-force/certificate agreement", brute_force_agreement),
        ("ordinal oracle equivalence", ordinal_oracle),
        ("endorsers outrank the endorsed", theorem),
        ("well-founded endorsement chain", chain),
        ("registry value equals agent measure", cross_module_identity),
        ("fast-growing spot values", fgh_spots),
        ("corpus verify determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
