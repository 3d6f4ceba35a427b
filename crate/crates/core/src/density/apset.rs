use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{DensityError, IndexWindow};

/// `{residue + modulus·n : n ≥ 0} ∩ [threshold, ∞)`, kept normalized:
/// `residue < modulus` and `threshold` is the first element of the set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Progression {
    residue: u64,
    modulus: u64,
    threshold: u64,
}

impl Progression {
    pub fn new(residue: u64, modulus: u64, threshold: u64) -> Result<Self, DensityError> {
        if modulus == 0 {
            return Err(DensityError::ZeroModulus);
        }
        let lo = threshold.max(residue);
        let r = residue % modulus;
        let first = lo + (r + modulus - lo % modulus) % modulus;
        Ok(Self { residue: r, modulus, threshold: first })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.threshold && n % self.modulus == self.residue
    }

    /// Elements below `horizon`, in increasing order.
    pub fn iter_below(&self, horizon: u64) -> impl Iterator<Item = u64> {
        let step = self.modulus as usize;
        (self.threshold..horizon).step_by(step)
    }
}

/// A finite union of progressions plus a finite exceptional set (which also
/// houses constant, ratio-zero progressions).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct APSet {
    progressions: Vec<Progression>,
    exceptional: BTreeSet<u64>,
}

impl APSet {
    /// Progressions are sorted and deduplicated; overlaps are allowed.
    pub fn new(progressions: Vec<Progression>, exceptional: impl IntoIterator<Item = u64>) -> Self {
        let mut progressions = progressions;
        progressions.sort();
        progressions.dedup();
        Self { progressions, exceptional: exceptional.into_iter().collect() }
    }

    pub fn progressions(&self) -> &[Progression] {
        &self.progressions
    }

    pub fn exceptional(&self) -> &BTreeSet<u64> {
        &self.exceptional
    }

    pub fn is_empty(&self) -> bool {
        self.progressions.is_empty() && self.exceptional.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.exceptional.contains(&n) || self.progressions.iter().any(|p| p.contains(n))
    }

    pub fn push(&mut self, p: Progression) {
        if let Err(at) = self.progressions.binary_search(&p) {
            self.progressions.insert(at, p);
        }
    }

    /// Union of two sets (progressions merged, exceptional sets joined).
    pub fn union(&self, other: &APSet) -> APSet {
        let mut progressions = self.progressions.clone();
        progressions.extend_from_slice(&other.progressions);
        APSet::new(progressions, self.exceptional.iter().chain(&other.exceptional).copied())
    }

    pub fn enumerate_below(&self, horizon: u64) -> IndexWindow {
        let mut hit = vec![false; horizon as usize];
        for p in &self.progressions {
            for n in p.iter_below(horizon) {
                hit[n as usize] = true;
            }
        }
        for &e in self.exceptional.range(..horizon) {
            hit[e as usize] = true;
        }
        IndexWindow::from_indicator(&hit)
    }

    /// Canonical set whose characteristic sequence is `tail` followed by
    /// `cycle` repeated forever. The period and preperiod are minimized, so
    /// two descriptions of the same eventually periodic set produce equal
    /// values. An empty `cycle` is read as the all-false cycle.
    pub fn from_lasso(tail: &[bool], cycle: &[bool]) -> APSet {
        if cycle.is_empty() {
            return APSet::from_lasso(tail, &[false]);
        }
        let c = cycle.len();
        let period = (1..=c)
            .filter(|p| c % p == 0)
            .find(|&p| (0..c).all(|j| cycle[j] == cycle[(j + p) % c]))
            .unwrap_or(c);
        let t = tail.len();
        let chi = |n: usize| if n < t { tail[n] } else { cycle[(n - t) % c] };
        let mut pre = t;
        while pre > 0 && chi(pre - 1) == chi(pre - 1 + period) {
            pre -= 1;
        }
        let progressions = (pre..pre + period)
            .filter(|&n| chi(n))
            .map(|n| Progression {
                residue: (n % period) as u64,
                modulus: period as u64,
                threshold: n as u64,
            })
            .collect();
        let exceptional = (0..pre).filter(|&n| chi(n)).map(|n| n as u64);
        APSet::new(progressions, exceptional)
    }
}

/// Exact Banach density of a progression set: occupied residues modulo the
/// lcm of the moduli, over that lcm. The exceptional part contributes zero.
pub fn exact_banach_density(s: &APSet) -> BigRational {
    if s.progressions.is_empty() {
        return BigRational::zero();
    }
    let period = s.progressions.iter().fold(1u64, |acc, p| acc.lcm(&p.modulus));
    let mut occupied = vec![false; period as usize];
    for p in &s.progressions {
        for r in (p.residue..period).step_by(p.modulus as usize) {
            occupied[r as usize] = true;
        }
    }
    let count = occupied.iter().filter(|&&b| b).count();
    BigRational::new(BigInt::from(count), BigInt::from(period))
}
