use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{APSet, DensityError, IndexWindow};

/// One summand `c · p^(ℓ·n)` of an F-set, `n` ranging over `0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsetTerm {
    pub coefficient: BigRational,
    pub step: u32,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// All sums `Σ cᵢ·p^(ℓᵢ·nᵢ)` with `nᵢ ∈ {0..n_max}` below `horizon`.
/// Every such sum must be a natural number.
pub fn generate_fset(
    p: u64,
    terms: &[FsetTerm],
    n_max: u32,
    horizon: u64,
) -> Result<IndexWindow, DensityError> {
    if !is_prime(p) {
        return Err(DensityError::NotPrime(p));
    }
    for t in terms {
        if !t.coefficient.is_positive() || t.step == 0 {
            return Err(DensityError::InvalidTerm(format!(
                "{}:{}",
                crate::format_rational(&t.coefficient),
                t.step
            )));
        }
    }
    // Per-term values below the horizon; every term is positive, so larger
    // exponents only push the sum further up.
    let limit = BigRational::from_integer(BigInt::from(horizon));
    let columns: Vec<Vec<BigRational>> = terms
        .iter()
        .map(|t| {
            let base = BigInt::from(p).pow(t.step);
            let mut power = BigInt::from(1);
            let mut out = Vec::new();
            for _ in 0..=n_max {
                let v = &t.coefficient * BigRational::from_integer(power.clone());
                if v >= limit {
                    break;
                }
                out.push(v);
                power *= &base;
            }
            out
        })
        .collect();
    let mut found = BTreeSet::new();
    let zero = BigRational::from_integer(BigInt::from(0));
    if !terms.is_empty() {
        sums(&columns, 0, zero, &limit, &mut found)?;
    }
    Ok(IndexWindow::from_unsorted(horizon, found))
}

fn sums(
    columns: &[Vec<BigRational>],
    depth: usize,
    acc: BigRational,
    limit: &BigRational,
    out: &mut BTreeSet<u64>,
) -> Result<(), DensityError> {
    if depth == columns.len() {
        if !acc.is_integer() {
            return Err(DensityError::NonIntegralValue(crate::format_rational(&acc)));
        }
        let v = acc.to_integer().to_u64().expect("sum is below a u64 horizon");
        out.insert(v);
        return Ok(());
    }
    for v in &columns[depth] {
        let next = &acc + v;
        if next >= *limit {
            break;
        }
        sums(columns, depth + 1, next, limit, out)?;
    }
    Ok(())
}

pub fn generate_apset(s: &APSet, horizon: u64) -> IndexWindow {
    s.enumerate_below(horizon)
}
