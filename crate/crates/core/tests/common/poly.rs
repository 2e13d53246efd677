use std::cmp::Ordering;

use num_bigint::BigUint;
use ordino::ordinal::Ordinal;

// Independent oracle: ordinals below ω⁵ as coefficient arrays indexed by
// exponent. Inputs stay below ω³, so every product fits.

pub type Poly = [u64; 5];

pub fn poly_of(a: u64, b: u64, c: u64) -> Poly {
    [c, b, a, 0, 0]
}

pub fn poly_lead(x: &Poly) -> Option<usize> {
    (0..5).rev().find(|&e| x[e] > 0)
}

pub fn poly_add(x: &Poly, y: &Poly) -> Poly {
    match poly_lead(y) {
        None => *x,
        Some(f) => {
            let mut out = [0; 5];
            out[(f + 1)..5].copy_from_slice(&x[(f + 1)..5]);
            out[f] = x[f] + y[f];
            out[..f].copy_from_slice(&y[..f]);
            out
        }
    }
}

pub fn poly_mul(x: &Poly, y: &Poly) -> Poly {
    let Some(e) = poly_lead(x) else { return [0; 5] };
    let mut acc = [0; 5];
    for f in (0..5).rev() {
        let d = y[f];
        if d == 0 {
            continue;
        }
        let part = if f == 0 {
            let mut p = *x;
            p[e] *= d;
            p
        } else {
            let mut p = [0; 5];
            p[e + f] = d;
            p
        };
        acc = poly_add(&acc, &part);
    }
    acc
}

pub fn poly_cmp(x: &Poly, y: &Poly) -> Ordering {
    for e in (0..5).rev() {
        match x[e].cmp(&y[e]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn to_ordinal(p: &Poly) -> Ordinal {
    (0..5)
        .rev()
        .filter(|&e| p[e] > 0)
        .fold(Ordinal::zero(), |acc, e| {
            acc.add(&Ordinal::monomial(Ordinal::nat(e as u32), BigUint::from(p[e])))
        })
}

/// Every `ω²·a + ω·b + c` with components at most `max`.
pub fn triples(max: u64) -> Vec<Poly> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max {
            for c in 0..=max {
                out.push(poly_of(a, b, c));
            }
        }
    }
    out
}
