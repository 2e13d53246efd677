use std::cmp::Ordering;

mod common;

use common::poly::{poly_add, poly_cmp, poly_mul, to_ordinal, triples};
use ordino::ordinal::{compare, parse_ord, print_ord, Ordinal, OrdValue, DEFAULT_MAX_DEPTH};
use proptest::prelude::*;

/// Canonical ordinals of bounded nesting, built from descending exponents.
fn arb_ordinal(depth: u32) -> BoxedStrategy<Ordinal> {
    let leaf = (0u32..6).prop_map(Ordinal::nat).boxed();
    if depth == 0 {
        return leaf;
    }
    let exps = prop::collection::vec(arb_ordinal(depth - 1), 0..4);
    let coeffs = prop::collection::vec(1u32..6, 4);
    (exps, coeffs)
        .prop_map(|(mut exps, coeffs)| {
            exps.sort_by(|a, b| b.cmp(a));
            exps.dedup();
            exps.into_iter()
                .zip(coeffs)
                .fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal::monomial(e, c)))
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn compare_is_a_total_order(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
        let ab = compare(&a, &b);
        prop_assert_eq!(ab, compare(&b, &a).reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if ab != Ordering::Greater && compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(compare(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn print_parse_round_trip(a in arb_ordinal(3)) {
        prop_assert_eq!(parse_ord(&print_ord(&a)).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn addition_laws(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a.clone());
        prop_assert_eq!(compare(&a.add(&b), &a.add(&c)), compare(&b, &c));
    }

    #[test]
    fn multiplication_laws(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&Ordinal::one()), a.clone());
        prop_assert_eq!(Ordinal::one().mul(&a), a.clone());
    }

    #[test]
    fn omega_pow_turns_sums_into_products(a in arb_ordinal(2), b in arb_ordinal(2)) {
        let lhs = a.add(&b).omega_pow(DEFAULT_MAX_DEPTH);
        let rhs = a.omega_pow(DEFAULT_MAX_DEPTH).mul(&b.omega_pow(DEFAULT_MAX_DEPTH));
        if !lhs.is_overflow() && !rhs.is_overflow() {
            prop_assert_eq!(lhs, rhs);
        }
    }
}

// ---------------------------------------------------------------------------
#[test]
fn triple_oracle_agrees_exhaustively() {
    let triples = triples(5);
    let ords: Vec<Ordinal> = triples.iter().map(to_ordinal).collect();
    let mut checked = 0usize;
    for (x, ox) in triples.iter().zip(&ords) {
        for (y, oy) in triples.iter().zip(&ords) {
            assert_eq!(compare(ox, oy), poly_cmp(x, y), "compare {ox} {oy}");
            assert_eq!(ox.add(oy), to_ordinal(&poly_add(x, y)), "add {ox} {oy}");
            assert_eq!(ox.mul(oy), to_ordinal(&poly_mul(x, y)), "mul {ox} {oy}");
            checked += 1;
        }
    }
    assert_eq!(checked, 216 * 216);
}

#[test]
fn overflow_marker_dominates() {
    let big = parse_ord("w^(w^(w^(w)))*7 + 3").unwrap();
    assert!(OrdValue::AtLeastEpsilon0 > OrdValue::Ord(big));
}
