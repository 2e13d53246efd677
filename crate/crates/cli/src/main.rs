use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::Value;

use ordino::cert::{Certificate, Checker};
use ordino::corpus::{summary, verify_corpus};
use ordino::epistemic::endorse::{replay_derivation, EndorseError};
use ordino::epistemic::knowledge::{MeasureResult, Rule};
use ordino::epistemic::{build_total_endorser, endorsement_chain, measure, AgentSpec};
use ordino::fgh::{fast_growing, FghError, DEFAULT_FGH_BUDGET};
use ordino::onl::{parse_onl, run, value_bruteforce, BruteValue, Budgets, Program, RunStatus};
use ordino::ordinal::{eval_expr, OrdValue, DEFAULT_MAX_DEPTH};
use ordino::registry::{OVerdict, Registry, RegistryIndex};

#[derive(Parser)]
#[command(name = "ordino", version, about = "Ordinal notations, certificates and knowing agents")]
struct Cli {
    /// Registry file used by registry and agent commands.
    #[arg(long, global = true, env = "ORDINO_REGISTRY", default_value = "ordino-registry.json")]
    registry: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ordinal arithmetic.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Run or value ONL programs.
    #[command(subcommand)]
    Onl(OnlCmd),
    /// Check or synthesize value certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Manage the notation registry.
    #[command(subcommand)]
    Registry(RegistryCmd),
    /// Measure agents and build endorsers.
    #[command(subcommand)]
    Agent(AgentCmd),
    /// Fast-growing hierarchy f_a(n).
    Fgh {
        ordinal: String,
        n: BigUint,
        #[arg(long, default_value_t = DEFAULT_FGH_BUDGET)]
        budget: u64,
    },
    /// The built-in notation corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Subcommand)]
enum OrdCmd {
    /// Evaluate an expression with +, * and w^ and print its normal form.
    Eval { expr: String },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = Budgets::default().steps)]
    steps: u64,
    #[arg(long, default_value_t = Budgets::default().outputs)]
    outputs: usize,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        Budgets::default().with_steps(self.steps).with_outputs(self.outputs)
    }
}

#[derive(Subcommand)]
enum OnlCmd {
    /// Print each output on its own line; the final status goes to stderr.
    Run {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Value by direct recursive execution.
    Value {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum CertCmd {
    Check { program: PathBuf, cert: PathBuf },
    /// Print a verified certificate as JSON.
    Synth { program: PathBuf },
}

#[derive(Subcommand)]
enum RegistryCmd {
    /// Embed a program (certificate given or synthesized), or register it
    /// as a numeral enumerator.
    Add {
        file: PathBuf,
        #[arg(long, conflicts_with = "enumerator")]
        cert: Option<PathBuf>,
        #[arg(long)]
        enumerator: bool,
    },
    List {
        #[arg(long)]
        json: bool,
    },
    Value { index: RegistryIndex },
}

#[derive(Subcommand)]
enum AgentCmd {
    Measure {
        spec: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
    /// Build a total endorser of the agent and save the registry.
    Endorse {
        spec: PathBuf,
        /// Id of the new agent (default: one more than the endorsed agent's).
        #[arg(long)]
        id: Option<u64>,
        /// Write the endorser's spec here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Build k successive endorsers and print their measures.
    Chain {
        spec: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    Verify {
        #[arg(long)]
        json: bool,
    },
}

/// `Reject` is a verification outcome (exit 1); `Usage` is a bad input or
/// I/O failure (exit 2).
enum Failure {
    Reject(String),
    Usage(String),
}

type CmdResult = Result<String, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Ord(OrdCmd::Eval { expr }) => ord_eval(expr),
        Cmd::Onl(c) => onl(c),
        Cmd::Cert(c) => cert(c),
        Cmd::Registry(c) => registry(c, &cli.registry),
        Cmd::Agent(c) => agent(c, &cli.registry),
        Cmd::Fgh { ordinal, n, budget } => fgh(ordinal, n, *budget),
        Cmd::Corpus(CorpusCmd::Verify { json }) => corpus(*json),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Reject(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("ordino: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_program(path: &Path) -> Result<Program, Failure> {
    parse_onl(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn ord_eval(expr: &str) -> CmdResult {
    let v = eval_expr(expr, DEFAULT_MAX_DEPTH).map_err(usage)?;
    Ok(format!("{v}\n"))
}

fn onl(c: &OnlCmd) -> CmdResult {
    match c {
        OnlCmd::Run { file, budgets } => {
            let res = run(&read_program(file)?, &budgets.budgets());
            let mut out = String::new();
            for o in &res.outputs {
                writeln!(out, "{o}").unwrap();
            }
            match res.status {
                RunStatus::Halted { steps } => {
                    eprintln!("halted after {steps} steps");
                    Ok(out)
                }
                RunStatus::BudgetExceeded(kind) => {
                    eprintln!("{kind} budget exceeded");
                    Err(Failure::Reject(out))
                }
            }
        }
        OnlCmd::Value { file, budgets } => match value_bruteforce(&read_program(file)?, &budgets.budgets()) {
            BruteValue::Exact(v) => Ok(format!("{v}\n")),
            BruteValue::Unknown(why) => Err(Failure::Reject(format!("Unknown: {why}\n"))),
        },
    }
}

fn cert(c: &CertCmd) -> CmdResult {
    let checker = Checker::default();
    match c {
        CertCmd::Check { program, cert } => {
            let p = read_program(program)?;
            let c = Certificate::from_json(&read(cert)?).map_err(usage)?;
            match checker.check(&p, &c) {
                Ok(v) => Ok(format!("{v}\n")),
                Err(r) => Err(Failure::Reject(format!("REJECTED: {r}\n"))),
            }
        }
        CertCmd::Synth { program } => match checker.synthesize(&read_program(program)?) {
            Ok(c) => Ok(c.to_json() + "\n"),
            Err(e) => Err(Failure::Reject(format!("NO CERTIFICATE: {}\n", e.0))),
        },
    }
}

fn load_registry(path: &Path) -> Result<Registry, Failure> {
    Registry::load(path, Checker::default()).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn save_registry(reg: &Registry, path: &Path) -> Result<(), Failure> {
    reg.save(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict_text(v: &OVerdict) -> String {
    match v {
        OVerdict::Verified(v) => v.to_string(),
        OVerdict::Unverified(why) => format!("Unverified: {why}"),
    }
}

fn registry(c: &RegistryCmd, path: &Path) -> CmdResult {
    let mut reg = load_registry(path)?;
    match c {
        RegistryCmd::Add {
            file,
            cert,
            enumerator,
        } => {
            let p = read_program(file)?;
            let n = if *enumerator {
                reg.register_onl(&p)
            } else {
                let c = match cert {
                    Some(cp) => Certificate::from_json(&read(cp)?).map_err(usage)?,
                    None => match reg.checker().synthesize(&p) {
                        Ok(c) => c,
                        Err(e) => return Err(Failure::Reject(format!("NO CERTIFICATE: {}\n", e.0))),
                    },
                };
                match reg.embed_program(&p, &c) {
                    Ok(n) => n,
                    Err(e) => return Err(Failure::Reject(format!("REJECTED: {e}\n"))),
                }
            };
            save_registry(&reg, path)?;
            Ok(format!("{n}\n"))
        }
        RegistryCmd::List { json } => {
            let rows: Vec<(RegistryIndex, String, String, String)> = reg
                .entries()
                .iter()
                .map(|e| {
                    let v = reg.o_value(e.index).expect("listed index exists");
                    let v = match v {
                        OVerdict::Verified(v) => v.to_string(),
                        OVerdict::Unverified(_) => "-".into(),
                    };
                    (e.index, e.kind.to_string(), v, e.source.clone())
                })
                .collect();
            if *json {
                let arr: Vec<Value> = rows
                    .into_iter()
                    .map(|(i, k, v, s)| serde_json::json!({"index": i, "kind": k, "value": v, "source": s}))
                    .collect();
                return Ok(serde_json::to_string_pretty(&arr).unwrap() + "\n");
            }
            let mut out = String::new();
            for (i, k, v, s) in rows {
                writeln!(out, "{i}\t{k}\t{v}\t{s}").unwrap();
            }
            Ok(out)
        }
        RegistryCmd::Value { index } => {
            let v = reg.o_value(*index).map_err(usage)?;
            let text = verdict_text(&v) + "\n";
            match v {
                OVerdict::Verified(_) => Ok(text),
                OVerdict::Unverified(_) => Err(Failure::Reject(text)),
            }
        }
    }
}

/// Turns `{"index": n}` or `{"program": text, "cert": {...}}` into an index,
/// embedding programs as needed.
fn resolve_claim(v: &Value, reg: &mut Registry) -> Result<Value, Failure> {
    if let Some(n) = v.get("index") {
        return Ok(n.clone());
    }
    if let Some(n) = v.as_u64() {
        return Ok(n.into());
    }
    let text = v
        .get("program")
        .and_then(Value::as_str)
        .ok_or_else(|| usage("claims need an \"index\" or a \"program\""))?;
    let p = parse_onl(text).map_err(usage)?;
    let c = match v.get("cert") {
        Some(c) => serde_json::from_value::<Certificate>(c.clone()).map_err(usage)?,
        None => reg
            .checker()
            .synthesize(&p)
            .map_err(|e| Failure::Reject(format!("NO CERTIFICATE: {}\n", e.0)))?,
    };
    let n = reg
        .embed_program(&p, &c)
        .map_err(|e| Failure::Reject(format!("REJECTED: {e}\n")))?;
    Ok(n.into())
}

fn load_agent(path: &Path, reg: &mut Registry) -> Result<AgentSpec, Failure> {
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| usage(format!("{}: expected a JSON object", path.display())))?;
    obj.entry("id").or_insert(0.into());
    if let Some(Value::Array(claims)) = obj.get("o_claims").cloned() {
        let resolved = claims
            .iter()
            .map(|c| resolve_claim(c, reg).map(|n| serde_json::json!({ "index": n })))
            .collect::<Result<Vec<_>, _>>()?;
        obj.insert("o_claims".into(), Value::Array(resolved));
    }
    if let Some(Value::Array(sets)) = obj.get("o_claim_sets").cloned() {
        let resolved = sets.iter().map(|c| resolve_claim(c, reg)).collect::<Result<Vec<_>, _>>()?;
        obj.insert("o_claim_sets".into(), Value::Array(resolved));
    }
    serde_json::from_value(v).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn measure_line(m: &MeasureResult) -> String {
    format!("bound={} exact={}", m.bound, m.exact)
}

fn rule_text(r: &Rule) -> String {
    match r {
        Rule::Code => "code".into(),
        Rule::Truthfulness { agent } => format!("truthfulness of K{agent}"),
        Rule::Tautology => "tautology".into(),
        Rule::ModusPonens {
            implication,
            premise,
        } => format!("modus ponens {implication}, {premise}"),
        Rule::AxiomOfO => "axiom of O".into(),
    }
}

fn endorse_failure(e: EndorseError) -> Failure {
    Failure::Reject(format!("NOT ENDORSABLE: {e}\n"))
}

fn agent(c: &AgentCmd, path: &Path) -> CmdResult {
    let mut reg = load_registry(path)?;
    match c {
        AgentCmd::Measure { spec, budget, json } => {
            let a = load_agent(spec, &mut reg)?;
            save_registry(&reg, path)?;
            let m = measure(&a, &reg, *budget).map_err(|e| Failure::Reject(format!("UNTRUTHFUL: {e}\n")))?;
            if *json {
                return Ok(serde_json::to_string_pretty(&m).unwrap() + "\n");
            }
            let mut out = measure_line(&m) + "\n";
            for (n, v) in &m.witnesses {
                writeln!(out, "witness O({n}) = {v}").unwrap();
            }
            for (n, v) in &m.claim_sets {
                writeln!(out, "claimed set W_{n} = {v}").unwrap();
            }
            Ok(out)
        }
        AgentCmd::Endorse {
            spec,
            id,
            out,
            budget,
        } => {
            let j = load_agent(spec, &mut reg)?;
            let e = build_total_endorser(&j, id.unwrap_or(j.id + 1), &mut reg, *budget)
                .map_err(endorse_failure)?;
            save_registry(&reg, path)?;
            let mi = measure(&e.agent, &reg, *budget).map_err(|e| usage(e.to_string()))?;
            let mut text = String::new();
            writeln!(text, "endorsed agent {}: {}", j.id, measure_line(&e.endorsed_measure)).unwrap();
            writeln!(text, "code index {}: {}", e.code_index, verdict_text(&reg.o_value(e.code_index).map_err(usage)?)).unwrap();
            writeln!(text, "endorser agent {}: {}", e.agent.id, measure_line(&mi)).unwrap();
            writeln!(text, "derivation:").unwrap();
            for (i, st) in e.agent.derivation.iter().enumerate() {
                writeln!(text, "  {i}. {}    [{}]", st.sentence, rule_text(&st.rule)).unwrap();
            }
            let replay = replay_derivation(&e.agent, *budget);
            writeln!(text, "replay: {}", if replay.is_ok() { "ok" } else { "FAILED" }).unwrap();
            if let Some(o) = out {
                let json = serde_json::to_string_pretty(&e.agent).unwrap() + "\n";
                fs::write(o, json).map_err(|err| usage(format!("{}: {err}", o.display())))?;
            }
            match replay {
                Ok(()) => Ok(text),
                Err(_) => Err(Failure::Reject(text)),
            }
        }
        AgentCmd::Chain { spec, k, budget } => {
            let base = load_agent(spec, &mut reg)?;
            let chain = endorsement_chain(&base, *k, &mut reg, *budget).map_err(endorse_failure)?;
            save_registry(&reg, path)?;
            let mut text = String::from("agent\tmeasure\treplay\n");
            let mut prev: Option<OrdValue> = None;
            let mut ok = true;
            for a in &chain {
                let m = measure(a, &reg, *budget).map_err(|e| usage(e.to_string()))?;
                let replay = if a.derivation.is_empty() {
                    "-"
                } else if replay_derivation(a, *budget).is_ok() {
                    "ok"
                } else {
                    ok = false;
                    "FAILED"
                };
                ok &= prev.as_ref().is_none_or(|p| *p > m.bound);
                writeln!(text, "{}\t{}\t{replay}", a.id, m.bound).unwrap();
                prev = Some(m.bound);
            }
            let verdict = if ok { "strictly decreasing" } else { "NOT strictly decreasing" };
            writeln!(text, "{verdict}").unwrap();
            if ok {
                Ok(text)
            } else {
                Err(Failure::Reject(text))
            }
        }
    }
}

fn fgh(ordinal: &str, n: &BigUint, budget: u64) -> CmdResult {
    let a = match eval_expr(ordinal, DEFAULT_MAX_DEPTH).map_err(usage)? {
        OrdValue::Ord(a) => a,
        OrdValue::AtLeastEpsilon0 => return Err(usage("ordinal must be below e0")),
    };
    match fast_growing(&a, n, budget) {
        Ok(v) => Ok(format!("{v}\n")),
        Err(FghError::BudgetExceeded) => Err(Failure::Reject("BudgetExceeded\n".into())),
        Err(e) => Err(usage(e)),
    }
}

fn corpus(json: bool) -> CmdResult {
    let reports = verify_corpus(&Checker::default());
    let all = reports.iter().all(|r| r.pass);
    let text = if json {
        serde_json::to_string_pretty(&reports).unwrap() + "\n"
    } else {
        let mut out = String::new();
        for r in &reports {
            let got = match &r.result {
                Ok(v) => v.clone(),
                Err(why) => format!("error: {why}"),
            };
            let status = if r.pass { "PASS" } else { "FAIL" };
            writeln!(out, "{status}\t{}\texpected {}\tgot {got}", r.name, r.expected).unwrap();
        }
        out + &summary(&reports) + "\n"
    };
    if all {
        Ok(text)
    } else {
        Err(Failure::Reject(text))
    }
}
