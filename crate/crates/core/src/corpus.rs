//! Reference notations with their expected values.

use serde::Serialize;

use crate::cert::{Certificate, Checker, Template, WrapperId, WrapperLib};
use crate::onl::{parse_onl, print_onl, quote_str, Program};
use crate::ordinal::OrdValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    /// Worked notations from the construction itself.
    Paper,
    /// Larger notations built with the extended wrapper library.
    Exercise,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub program: Program,
    pub expected: OrdValue,
}

/// `Let X = seed; While(True) { Print(emit + X); Let X = left + quote(X) + right }`.
pub fn iterator_program(seed: &str, t: &Template, print_first: bool) -> Program {
    let print = if t.emit_prefix.is_empty() {
        "Print(X)".to_string()
    } else {
        format!("Print({} + X)", quote_str(&t.emit_prefix))
    };
    let mut parts = Vec::new();
    if !t.left.is_empty() {
        parts.push(quote_str(&t.left));
    }
    parts.push(if t.quote { "quote(X)".into() } else { "X".into() });
    if !t.right.is_empty() {
        parts.push(quote_str(&t.right));
    }
    let update = format!("Let X = {}", parts.join(" + "));
    let body = if print_first {
        format!("{print}; {update}")
    } else {
        format!("{update}; {print}")
    };
    parse_onl(&format!("Let X = {}; While(True) {{ {body} }}", quote_str(seed)))
        .expect("iterator template is valid ONL")
}

fn iterate(lib: &WrapperLib, id: WrapperId, seed: &str) -> Program {
    let e = lib.get(&id).expect("library wrapper");
    iterator_program(seed, &e.template, true)
}

pub const P_OMEGA: &str =
    r#"Let X = "End"; While(True) { Print(X); Let X = "Print(" + quote(X) + ")" }"#;

pub const P_OMEGA_SQUARED: &str = r#"Let LEFT = "Let X = "; Let RIGHT = "; While(True) { Print(X); Let X = \"Print(\" + quote(X) + \")\" }"; Let X = "End"; While(True) { Let X = LEFT + quote(X) + RIGHT; Print(X) }"#;

/// Seed multiplier for the ω^ω^ω iterator: run as a fragment it multiplies by ω.
pub const M_OMEGA: &str =
    r#"Let X = B; While(True) { Print(X); Let X = "Let B = " + quote(X) + "; " + F }"#;

pub fn corpus() -> Vec<CorpusEntry> {
    let lib = WrapperLib::default();
    let p = |s: &str| parse_onl(s).expect("corpus text is valid ONL");
    let v = |s: &str| s.parse::<OrdValue>().expect("corpus value");

    let p0 = Program::end();
    let p1 = Program::print_literal(print_onl(&p0));
    let p2 = Program::print_literal(print_onl(&p1));
    let pw = p(P_OMEGA);
    let pw1 = Program::print_literal(print_onl(&pw));
    let pw2 = Program::print_literal(print_onl(&pw1));
    let pw_2 = iterate(&lib, WrapperId::Print, &print_onl(&pw));
    let pw_3 = iterate(&lib, WrapperId::Print, &print_onl(&pw_2));

    let entry = |name, kind, program, expected| CorpusEntry {
        name,
        kind,
        program,
        expected,
    };
    use EntryKind::*;
    vec![
        entry("P0", Paper, p0, v("0")),
        entry("P1", Paper, p1, v("1")),
        entry("P2", Paper, p2, v("2")),
        entry("Pw", Paper, pw, v("w")),
        entry("Pw+1", Paper, pw1, v("w + 1")),
        entry("Pw+2", Paper, pw2, v("w + 2")),
        entry("Pw*2", Paper, pw_2, v("w*2")),
        entry("Pw*3", Paper, pw_3, v("w*3")),
        entry("Pw2", Paper, p(P_OMEGA_SQUARED), v("w^2")),
        entry("Pw3", Exercise, iterate(&lib, WrapperId::Loop(2), "End"), v("w^3")),
        entry(
            "Pww",
            Exercise,
            iterate(&lib, WrapperId::FragmentLift, "Print(B)"),
            v("w^(w)"),
        ),
        entry(
            "Pwww",
            Exercise,
            iterate(&lib, WrapperId::MultiplierLift, M_OMEGA),
            v("w^(w^(w))"),
        ),
        entry(
            "Pe0",
            Exercise,
            iterate(&lib, WrapperId::Tower, r#"Print("End")"#),
            OrdValue::AtLeastEpsilon0,
        ),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub name: &'static str,
    pub kind: EntryKind,
    pub expected: String,
    /// Recomputed value, or the reason no verified certificate was found.
    pub result: Result<String, String>,
    pub pass: bool,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
}

/// Synthesizes and checks a certificate for every corpus entry.
pub fn verify_corpus(checker: &Checker) -> Vec<CorpusReport> {
    corpus()
        .into_iter()
        .map(|e| {
            let outcome = checker
                .synthesize(&e.program)
                .map_err(|np| np.to_string())
                .and_then(|c| {
                    checker
                        .check(&e.program, &c)
                        .map(|v| (v, c))
                        .map_err(|r| r.to_string())
                });
            let (result, pass, certificate) = match outcome {
                Ok((v, c)) => (Ok(v.to_string()), v == e.expected, Some(c)),
                Err(why) => (Err(why), false, None),
            };
            CorpusReport {
                name: e.name,
                kind: e.kind,
                expected: e.expected.to_string(),
                result,
                pass,
                certificate,
            }
        })
        .collect()
}

/// `"9/9 paper examples PASS, 4/4 exercise entries PASS"` style summary.
pub fn summary(reports: &[CorpusReport]) -> String {
    let count = |k: EntryKind| {
        let all = reports.iter().filter(|r| r.kind == k);
        (all.clone().filter(|r| r.pass).count(), all.count())
    };
    let (pp, pt) = count(EntryKind::Paper);
    let (ep, et) = count(EntryKind::Exercise);
    let word = |a: usize, b: usize| if a == b { "PASS" } else { "FAIL" };
    format!(
        "{pp}/{pt} paper examples {}, {ep}/{et} exercise entries {}",
        word(pp, pt),
        word(ep, et)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_iterator_reproduces_worked_texts() {
        let lib = WrapperLib::default();
        assert_eq!(print_onl(&iterate(&lib, WrapperId::Print, "End")), P_OMEGA);
        assert_eq!(print_onl(&parse_onl(P_OMEGA_SQUARED).unwrap()), P_OMEGA_SQUARED);
        let loop1 = lib.get(&WrapperId::Loop(1)).unwrap();
        let pw_2 = &corpus()[6];
        assert_eq!(print_onl(&pw_2.program), loop1.template.apply(P_OMEGA));
    }

    #[test]
    fn omega_times_two_certificate_uses_print_wrap() {
        let pw_2 = corpus().remove(6);
        let cert = Certificate::Iter {
            seed: parse_onl(P_OMEGA).unwrap(),
            seed_cert: Box::new(Checker::default().synthesize(&parse_onl(P_OMEGA).unwrap()).unwrap()),
            wrapper: WrapperId::Print,
            claimed: pw_2.expected.clone(),
        };
        assert_eq!(Checker::default().check(&pw_2.program, &cert), Ok(pw_2.expected));
    }

    #[test]
    fn whole_corpus_verifies() {
        let reports = verify_corpus(&Checker::default());
        for r in &reports {
            assert!(r.pass, "{}: expected {}, got {:?}", r.name, r.expected, r.result);
        }
        assert_eq!(
            summary(&reports),
            "9/9 paper examples PASS, 4/4 exercise entries PASS"
        );
    }
}
