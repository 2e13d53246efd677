//! ONL, the ordinal notation language: `End`, `Print`, `Let` and
//! `While(True)` over string expressions.
//!
//! ```text
//! program := stmt (';' stmt)*
//! stmt    := 'End' | 'Print' '(' sexpr ')' | 'Let' IDENT '=' sexpr
//!          | 'While' '(' 'True' ')' '{' program '}'
//! sexpr   := STRING | IDENT | 'quote' '(' sexpr ')' | sexpr '+' sexpr
//! ```
//!
//! String literals are double-quoted; `\"` and `\\` are the only escapes.
//! `quote(e)` evaluates `e` and renders it back as a string literal, which
//! is how programs print other programs without hand-escaping.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::ordinal::{sup_plus_one, Ordinal};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(String),
    Var(String),
    /// Two or more parts, none of which is itself a `Concat`.
    Concat(Vec<Expr>),
    Quote(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    End,
    Print(Expr),
    Let(String, Expr),
    While(Vec<Stmt>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    stmts: Vec<Stmt>,
}

impl Expr {
    pub fn lit(s: impl Into<String>) -> Self {
        Expr::Lit(s.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn quote(e: Expr) -> Self {
        Expr::Quote(Box::new(e))
    }

    /// Concatenation with nested concatenations flattened.
    pub fn concat<I: IntoIterator<Item = Expr>>(parts: I) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Expr::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::Lit(String::new()),
            1 => flat.pop().expect("one part"),
            _ => Expr::Concat(flat),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(v) => out.push(v),
            Expr::Concat(parts) => parts.iter().for_each(|p| p.collect_vars(out)),
            Expr::Quote(e) => e.collect_vars(out),
        }
    }
}

impl Program {
    /// Builds a program after checking that every variable is bound before use.
    pub fn new(stmts: Vec<Stmt>) -> Result<Self, OnlError> {
        check_bindings(&stmts, &mut HashSet::new())?;
        Ok(Program { stmts })
    }

    pub fn stmts(&self) -> &[Stmt] {
        &self.stmts
    }

    /// The program `End`.
    pub fn end() -> Self {
        Program {
            stmts: vec![Stmt::End],
        }
    }

    /// `Print("<text>")`.
    pub fn print_literal(text: impl Into<String>) -> Self {
        Program {
            stmts: vec![Stmt::Print(Expr::Lit(text.into()))],
        }
    }
}

fn check_bindings(stmts: &[Stmt], bound: &mut HashSet<String>) -> Result<(), OnlError> {
    for s in stmts {
        match s {
            Stmt::End => {}
            Stmt::Print(e) => check_expr(e, bound)?,
            Stmt::Let(name, e) => {
                check_expr(e, bound)?;
                bound.insert(name.clone());
            }
            Stmt::While(body) => {
                // Nothing after an infinite loop runs, so the outer scope
                // keeps only what was bound before it.
                check_bindings(body, &mut bound.clone())?;
            }
        }
    }
    Ok(())
}

fn check_expr(e: &Expr, bound: &HashSet<String>) -> Result<(), OnlError> {
    let mut vars = Vec::new();
    e.collect_vars(&mut vars);
    match vars.into_iter().find(|v| !bound.contains(*v)) {
        Some(v) => Err(OnlError::UnboundVariable {
            name: v.to_string(),
            line: 0,
            col: 0,
        }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OnlError {
    #[error("{line}:{col}: lexical error: {msg}")]
    Lex { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbound variable {name}")]
    UnboundVariable { name: String, line: usize, col: usize },
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Eq,
    Plus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Str(_) => f.write_str("string literal"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Eq => f.write_str("'='"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, OnlError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut col);
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            '+' => Some(Tok::Plus),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            bump(c, &mut line, &mut col);
            out.push(Spanned { tok, line: tl, col: tc });
            continue;
        }
        if c == '"' {
            chars.next();
            bump(c, &mut line, &mut col);
            let mut s = String::new();
            loop {
                let Some(c) = chars.next() else {
                    return Err(OnlError::Lex {
                        line: tl,
                        col: tc,
                        msg: "unterminated string literal".into(),
                    });
                };
                bump(c, &mut line, &mut col);
                match c {
                    '"' => break,
                    '\\' => match chars.next() {
                        Some(e @ ('"' | '\\')) => {
                            bump(e, &mut line, &mut col);
                            s.push(e);
                        }
                        other => {
                            return Err(OnlError::Lex {
                                line,
                                col,
                                msg: match other {
                                    Some(o) => format!("invalid escape '\\{o}'"),
                                    None => "unterminated string literal".into(),
                                },
                            })
                        }
                    },
                    c => s.push(c),
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    bump(c, &mut line, &mut col);
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(OnlError::Lex {
            line,
            col,
            msg: format!("unexpected character {c:?}"),
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

const KEYWORDS: [&str; 6] = ["End", "Print", "Let", "While", "True", "quote"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    bound: Vec<HashSet<String>>,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Spanned, expected: &str) -> OnlError {
        OnlError::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("expected {expected}, found {}", t.tok),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), OnlError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.error(&t, what))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), OnlError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(self.error(&t, &format!("'{kw}'"))),
        }
    }

    fn scope(&mut self) -> &mut HashSet<String> {
        self.bound.last_mut().expect("scope stack is never empty")
    }

    fn program(&mut self) -> Result<Vec<Stmt>, OnlError> {
        let mut stmts = vec![self.stmt()?];
        while self.peek().tok == Tok::Semi {
            self.next();
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, OnlError> {
        let t = self.next();
        let Tok::Ident(word) = &t.tok else {
            return Err(self.error(&t, "statement"));
        };
        match word.as_str() {
            "End" => Ok(Stmt::End),
            "Print" => {
                self.expect(Tok::LParen, "'('")?;
                let e = self.sexpr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Stmt::Print(e))
            }
            "Let" => {
                let name_tok = self.next();
                let name = match &name_tok.tok {
                    Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => n.clone(),
                    _ => return Err(self.error(&name_tok, "identifier")),
                };
                self.expect(Tok::Eq, "'='")?;
                let e = self.sexpr()?;
                self.scope().insert(name.clone());
                Ok(Stmt::Let(name, e))
            }
            "While" => {
                self.expect(Tok::LParen, "'('")?;
                self.keyword("True")?;
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::LBrace, "'{'")?;
                let inner = self.scope().clone();
                self.bound.push(inner);
                let body = self.program()?;
                self.bound.pop();
                self.expect(Tok::RBrace, "'}'")?;
                Ok(Stmt::While(body))
            }
            _ => Err(self.error(&t, "statement")),
        }
    }

    fn sexpr(&mut self) -> Result<Expr, OnlError> {
        let mut parts = vec![self.atom()?];
        while self.peek().tok == Tok::Plus {
            self.next();
            parts.push(self.atom()?);
        }
        Ok(Expr::concat(parts))
    }

    fn atom(&mut self) -> Result<Expr, OnlError> {
        let t = self.next();
        match &t.tok {
            Tok::Str(s) => Ok(Expr::Lit(s.clone())),
            Tok::Ident(q) if q == "quote" => {
                self.expect(Tok::LParen, "'('")?;
                let e = self.sexpr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::quote(e))
            }
            Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()) => {
                if !self.scope().contains(v) {
                    return Err(OnlError::UnboundVariable {
                        name: v.clone(),
                        line: t.line,
                        col: t.col,
                    });
                }
                Ok(Expr::Var(v.clone()))
            }
            _ => Err(self.error(&t, "string expression")),
        }
    }
}

/// Parses ONL source text.
pub fn parse_onl(text: &str) -> Result<Program, OnlError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        bound: vec![HashSet::new()],
    };
    let stmts = p.program()?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(p.error(&t, "';' or end of input"));
    }
    Ok(Program { stmts })
}

// ---------------------------------------------------------------------------
// Printer

/// Renders `s` as an ONL string literal.
pub fn quote_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(s) => f.write_str(&quote_str(s)),
            Expr::Var(v) => f.write_str(v),
            Expr::Concat(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    p.fmt(f)?;
                }
                Ok(())
            }
            Expr::Quote(e) => write!(f, "quote({e})"),
        }
    }
}

fn write_stmts(stmts: &[Stmt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, s) in stmts.iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        match s {
            Stmt::End => f.write_str("End")?,
            Stmt::Print(e) => write!(f, "Print({e})")?,
            Stmt::Let(name, e) => write!(f, "Let {name} = {e}")?,
            Stmt::While(body) => {
                f.write_str("While(True) { ")?;
                write_stmts(body, f)?;
                f.write_str(" }")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmts(&self.stmts, f)
    }
}

/// Canonical text of a program.
pub fn print_onl(p: &Program) -> String {
    p.to_string()
}

// ---------------------------------------------------------------------------
// Interpreter

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Statements executed, counting each loop iteration.
    pub steps: u64,
    /// Maximum number of outputs.
    pub outputs: usize,
    /// Maximum length in bytes of any string value.
    pub string_bytes: usize,
    /// Recursion depth for brute-force valuation.
    pub depth: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            steps: 1_000_000,
            outputs: 1_000,
            string_bytes: 1 << 20,
            depth: 32,
        }
    }
}

impl Budgets {
    pub fn with_outputs(self, outputs: usize) -> Self {
        Budgets { outputs, ..self }
    }

    pub fn with_steps(self, steps: u64) -> Self {
        Budgets { steps, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BudgetKind {
    Steps,
    Outputs,
    StringBytes,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::Steps => "steps",
            BudgetKind::Outputs => "outputs",
            BudgetKind::StringBytes => "string-bytes",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Halted { steps: u64 },
    BudgetExceeded(BudgetKind),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outputs: Vec<String>,
    pub status: RunStatus,
}

impl RunResult {
    pub fn halted(&self) -> bool {
        matches!(self.status, RunStatus::Halted { .. })
    }
}

enum Flow {
    Continue,
    Halt,
}

struct Machine<'b> {
    env: HashMap<String, String>,
    outputs: Vec<String>,
    steps: u64,
    budgets: &'b Budgets,
}

impl Machine<'_> {
    fn eval(&self, e: &Expr) -> Result<String, BudgetKind> {
        let s = match e {
            Expr::Lit(s) => s.clone(),
            Expr::Var(v) => self
                .env
                .get(v)
                .cloned()
                .expect("bindings are checked at construction"),
            Expr::Concat(parts) => {
                let mut out = String::new();
                for p in parts {
                    out.push_str(&self.eval(p)?);
                    if out.len() > self.budgets.string_bytes {
                        return Err(BudgetKind::StringBytes);
                    }
                }
                out
            }
            Expr::Quote(inner) => quote_str(&self.eval(inner)?),
        };
        if s.len() > self.budgets.string_bytes {
            return Err(BudgetKind::StringBytes);
        }
        Ok(s)
    }

    fn tick(&mut self) -> Result<(), BudgetKind> {
        if self.steps >= self.budgets.steps {
            return Err(BudgetKind::Steps);
        }
        self.steps += 1;
        Ok(())
    }

    fn exec(&mut self, stmts: &[Stmt]) -> Result<Flow, BudgetKind> {
        for s in stmts {
            self.tick()?;
            match s {
                Stmt::End => return Ok(Flow::Halt),
                Stmt::Print(e) => {
                    if self.outputs.len() >= self.budgets.outputs {
                        return Err(BudgetKind::Outputs);
                    }
                    let v = self.eval(e)?;
                    self.outputs.push(v);
                }
                Stmt::Let(name, e) => {
                    let v = self.eval(e)?;
                    self.env.insert(name.clone(), v);
                }
                Stmt::While(body) => loop {
                    if let Flow::Halt = self.exec(body)? {
                        return Ok(Flow::Halt);
                    }
                    self.tick()?;
                },
            }
        }
        Ok(Flow::Continue)
    }
}

/// Runs a program under the given budgets. Budget exhaustion is reported in
/// the status; outputs produced so far are kept.
pub fn run(p: &Program, budgets: &Budgets) -> RunResult {
    let mut m = Machine {
        env: HashMap::new(),
        outputs: Vec::new(),
        steps: 0,
        budgets,
    };
    let status = match m.exec(&p.stmts) {
        Ok(_) => RunStatus::Halted { steps: m.steps },
        Err(kind) => RunStatus::BudgetExceeded(kind),
    };
    RunResult {
        outputs: m.outputs,
        status,
    }
}

// ---------------------------------------------------------------------------
// Brute-force valuation

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    NonHaltingWithinBudget(BudgetKind),
    UnparseableOutput { index: usize, error: OnlError },
    DepthExceeded,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::NonHaltingWithinBudget(k) => {
                write!(f, "does not halt within the {k} budget")
            }
            UnknownReason::UnparseableOutput { index, error } => {
                write!(f, "output {index} is not an ONL program ({error})")
            }
            UnknownReason::DepthExceeded => f.write_str("recursion depth exceeded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteValue {
    Exact(Ordinal),
    Unknown(UnknownReason),
}

/// Evaluation context for [`value_bruteforce`]; memoizes by program text.
pub struct BruteForce {
    budgets: Budgets,
    memo: HashMap<String, BruteValue>,
}

impl BruteForce {
    pub fn new(budgets: Budgets) -> Self {
        BruteForce {
            budgets,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, p: &Program) -> BruteValue {
        self.value_at(p, self.budgets.depth)
    }

    fn value_at(&mut self, p: &Program, depth: usize) -> BruteValue {
        let key = print_onl(p);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = self.compute(p, depth);
        // Depth failures depend on where the program was reached from.
        if !matches!(v, BruteValue::Unknown(UnknownReason::DepthExceeded)) {
            self.memo.insert(key, v.clone());
        }
        v
    }

    fn compute(&mut self, p: &Program, depth: usize) -> BruteValue {
        let res = run(p, &self.budgets);
        if let RunStatus::BudgetExceeded(kind) = res.status {
            return BruteValue::Unknown(UnknownReason::NonHaltingWithinBudget(kind));
        }
        if res.outputs.is_empty() {
            return BruteValue::Exact(Ordinal::zero());
        }
        if depth == 0 {
            return BruteValue::Unknown(UnknownReason::DepthExceeded);
        }
        let mut values = Vec::with_capacity(res.outputs.len());
        for (index, text) in res.outputs.iter().enumerate() {
            let q = match parse_onl(text) {
                Ok(q) => q,
                Err(error) => {
                    return BruteValue::Unknown(UnknownReason::UnparseableOutput { index, error })
                }
            };
            match self.value_at(&q, depth - 1) {
                BruteValue::Exact(v) => values.push(v),
                unknown => return unknown,
            }
        }
        BruteValue::Exact(sup_plus_one(&values))
    }
}

/// Value of `p` by direct recursive execution, or the first obstruction.
pub fn value_bruteforce(p: &Program, budgets: &Budgets) -> BruteValue {
    BruteForce::new(*budgets).value(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P_OMEGA: &str =
        r#"Let X = "End"; While(True) { Print(X); Let X = "Print(" + quote(X) + ")" }"#;

    fn p(text: &str) -> Program {
        parse_onl(text).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("End").stmts(), &[Stmt::End]);
        assert_eq!(
            p(r#"Print("End")"#).stmts(),
            &[Stmt::Print(Expr::lit("End"))]
        );
        assert!(matches!(
            parse_onl("Print(X)"),
            Err(OnlError::UnboundVariable { ref name, line: 1, col: 7 }) if name == "X"
        ));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(
            parse_onl("End;\n  Prnt(\"x\")"),
            Err(OnlError::Syntax { line: 2, col: 3, .. })
        ));
        assert!(matches!(parse_onl("Print(\"a\\n\")"), Err(OnlError::Lex { .. })));
        assert!(matches!(parse_onl("Print(\"abc"), Err(OnlError::Lex { .. })));
        assert!(matches!(parse_onl(""), Err(OnlError::Syntax { .. })));
        assert!(matches!(parse_onl("End;"), Err(OnlError::Syntax { .. })));
        assert!(matches!(parse_onl("Let End = \"x\""), Err(OnlError::Syntax { .. })));
        assert!(matches!(parse_onl("While(False) { End }"), Err(OnlError::Syntax { .. })));
    }

    #[test]
    fn loop_bindings_do_not_escape() {
        assert!(parse_onl(r#"While(True) { Let Y = "a"; Print(Y) }"#).is_ok());
        assert!(parse_onl(r#"While(True) { Print(Y); Let Y = "a" }"#).is_err());
        let stmts = vec![
            Stmt::While(vec![Stmt::Let("Y".into(), Expr::lit("a"))]),
            Stmt::Print(Expr::var("Y")),
        ];
        assert!(Program::new(stmts).is_err());
    }

    #[test]
    fn print_round_trips() {
        for text in ["End", r#"Print("End")"#, P_OMEGA, r#"Print("a\"b\\c")"#] {
            assert_eq!(print_onl(&p(text)), text);
        }
    }

    #[test]
    fn run_examples() {
        let b = Budgets::default().with_outputs(100);
        let r = run(&p("End"), &b);
        assert!(r.outputs.is_empty() && r.halted());
        let r = run(&p(r#"Print("End")"#), &b);
        assert_eq!(r.outputs, vec!["End"]);
        assert!(r.halted());

        let r = run(&p(P_OMEGA), &Budgets::default().with_outputs(3));
        assert_eq!(
            r.outputs,
            vec![
                "End".to_string(),
                r#"Print("End")"#.to_string(),
                r#"Print("Print(\"End\")")"#.to_string(),
            ]
        );
        assert_eq!(r.status, RunStatus::BudgetExceeded(BudgetKind::Outputs));
    }

    #[test]
    fn runaway_strings_hit_the_byte_budget() {
        let prog = p(r#"Let X = "ab"; While(True) { Let X = X + X }"#);
        let r = run(&prog, &Budgets::default());
        assert_eq!(r.status, RunStatus::BudgetExceeded(BudgetKind::StringBytes));
        let r = run(&p(r#"While(True) { Let X = "a" }"#), &Budgets::default().with_steps(50));
        assert_eq!(r.status, RunStatus::BudgetExceeded(BudgetKind::Steps));
    }

    #[test]
    fn end_inside_loop_halts() {
        let r = run(&p(r#"While(True) { Print("End"); End }; Print("x")"#), &Budgets::default());
        assert_eq!(r.outputs, vec!["End"]);
        assert!(r.halted());
    }

    #[test]
    fn brute_force_examples() {
        let b = Budgets::default();
        let p2 = p(r#"Print("Print(\"End\")")"#);
        assert_eq!(value_bruteforce(&p2, &b), BruteValue::Exact(Ordinal::nat(2u32)));
        assert!(matches!(
            value_bruteforce(&p(P_OMEGA), &b),
            BruteValue::Unknown(UnknownReason::NonHaltingWithinBudget(_))
        ));
        assert!(matches!(
            value_bruteforce(&p(r#"Print("???")"#), &b),
            BruteValue::Unknown(UnknownReason::UnparseableOutput { index: 0, .. })
        ));
        let nested = p(r#"Print("Print(\"End\")"); Print("End")"#);
        let shallow = Budgets { depth: 1, ..b };
        assert_eq!(
            value_bruteforce(&nested, &shallow),
            BruteValue::Unknown(UnknownReason::DepthExceeded)
        );
        assert_eq!(value_bruteforce(&nested, &b), BruteValue::Exact(Ordinal::nat(2u32)));
    }

    #[test]
    fn quote_is_inverse_of_literal_parsing() {
        for s in ["", "End", "a\"b", "\\", "Print(\"x\\\\\")"] {
            let prog = parse_onl(&format!("Print({})", quote_str(s))).unwrap();
            assert_eq!(run(&prog, &Budgets::default()).outputs, vec![s.to_string()]);
        }
    }
}
