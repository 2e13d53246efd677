//! Wainer fundamental sequences and the fast-growing hierarchy below ε₀.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ordinal::Ordinal;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FghError {
    #[error("{0} is not a limit ordinal")]
    NotALimit(Ordinal),
    #[error("evaluation budget exceeded")]
    BudgetExceeded,
}

/// Default number of hierarchy applications before giving up.
pub const DEFAULT_FGH_BUDGET: u64 = 1_000_000;

/// Values are abandoned once they need more bits than this.
pub const MAX_VALUE_BITS: u64 = 1 << 24;

/// `λ[n]`: `(α + ω^(β+1))[n] = α + ω^β·n` and `(α + ω^λ)[n] = α + ω^(λ[n])`.
pub fn fund_seq(a: &Ordinal, n: &BigUint) -> Result<Ordinal, FghError> {
    if !a.is_limit() {
        return Err(FghError::NotALimit(a.clone()));
    }
    let (last, init) = a.terms().split_last().expect("limits are nonzero");
    let prefix = Ordinal::from_terms(
        init.iter()
            .map(|t| (t.exponent().clone(), t.coefficient().clone()))
            .chain(std::iter::once((
                last.exponent().clone(),
                last.coefficient() - BigUint::one(),
            ))),
    );
    let e = last.exponent();
    let tail = match e.pred() {
        Some(beta) => Ordinal::monomial(beta, n.clone()),
        None => Ordinal::omega_to(fund_seq(e, n)?),
    };
    Ok(prefix.add(&tail))
}

/// `f_a(n)` with `f₀(n) = n+1`, `f_(α+1)(n) = f_α^n(n)`, `f_λ(n) = f_(λ[n])(n)`.
///
/// `budget` bounds the number of hierarchy applications; a run of `k`
/// consecutive `f₀` steps counts as one.
pub fn fast_growing(a: &Ordinal, n: &BigUint, budget: u64) -> Result<BigUint, FghError> {
    let mut v = n.clone();
    // Pending work, innermost last: apply f_α to `v` this many more times.
    let mut stack: Vec<(Ordinal, BigUint)> = vec![(a.clone(), BigUint::one())];
    let mut spent = 0u64;
    while let Some((alpha, k)) = stack.pop() {
        if k.is_zero() {
            continue;
        }
        spent += 1;
        if spent > budget || v.bits() > MAX_VALUE_BITS {
            return Err(FghError::BudgetExceeded);
        }
        if alpha.is_zero() {
            v += k;
            continue;
        }
        stack.push((alpha.clone(), k - 1u32));
        match alpha.pred() {
            Some(beta) => stack.push((beta, v.clone())),
            None => stack.push((fund_seq(&alpha, &v)?, BigUint::one())),
        }
    }
    Ok(v)
}

/// Convenience wrapper for small arguments.
pub fn fast_growing_u64(a: &Ordinal, n: u64, budget: u64) -> Result<u64, FghError> {
    fast_growing(a, &BigUint::from(n), budget)?
        .to_u64()
        .ok_or(FghError::BudgetExceeded)
}
