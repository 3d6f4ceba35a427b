use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{DensityError, IndexWindow};

/// Densest interval of one length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthDensity {
    pub fraction: BigRational,
    /// Smallest start `s` attaining the maximum; the interval is `[s, s + L)`.
    pub start: u64,
    pub count: u64,
}

/// Finite-window stand-in for a Banach density: for each swept interval
/// length, the densest interval of that length inside `[0, H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityEstimate {
    pub horizon: u64,
    pub per_length: BTreeMap<u64, LengthDensity>,
    /// Fraction at the largest swept length (zero when nothing was swept).
    pub headline: BigRational,
}

impl DensityEstimate {
    /// Estimate with no swept lengths, used for zero-horizon windows.
    pub fn unswept(horizon: u64) -> Self {
        Self { horizon, per_length: BTreeMap::new(), headline: BigRational::zero() }
    }

    pub fn headline_length(&self) -> Option<u64> {
        self.per_length.keys().next_back().copied()
    }
}

/// For each `L`, the maximum of `|S ∩ [s, s+L)| / L` over `0 ≤ s ≤ H − L`.
pub fn windowed_density(w: &IndexWindow, lengths: &[u64]) -> Result<DensityEstimate, DensityError> {
    if lengths.is_empty() {
        return Err(DensityError::EmptySweep);
    }
    let horizon = w.horizon();
    for &l in lengths {
        if l == 0 {
            return Err(DensityError::ZeroLength);
        }
        if l > horizon {
            return Err(DensityError::LengthExceedsHorizon { length: l, horizon });
        }
    }
    let mut prefix = vec![0u32; horizon as usize + 1];
    let mut next = w.members().iter().peekable();
    for n in 0..horizon as usize {
        let hit = next.next_if(|&&m| m as usize == n).is_some();
        prefix[n + 1] = prefix[n] + u32::from(hit);
    }
    let mut unique: Vec<u64> = lengths.to_vec();
    unique.sort_unstable();
    unique.dedup();
    let per_length: BTreeMap<u64, LengthDensity> = unique
        .par_iter()
        .map(|&l| {
            let l_us = l as usize;
            let (mut best, mut start) = (0u32, 0usize);
            for s in 0..=(horizon as usize - l_us) {
                let c = prefix[s + l_us] - prefix[s];
                if c > best {
                    best = c;
                    start = s;
                }
            }
            let fraction = BigRational::new(BigInt::from(best), BigInt::from(l));
            (l, LengthDensity { fraction, start: start as u64, count: u64::from(best) })
        })
        .collect();
    let headline = per_length.values().next_back().map(|d| d.fraction.clone()).unwrap_or_default();
    Ok(DensityEstimate { horizon, per_length, headline })
}
