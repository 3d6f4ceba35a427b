use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{DensityError, IndexWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// Block size `N = ⌊1/d⌋ + 1`, shift `k ≤ N − 1`.
    Lemma,
    /// Block size `N = ⌊2/d⌋`, shift `k < 2/d`.
    Corollary,
}

/// A shift `k` and a subset `Q` of the window with `Q + k` inside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub k: u64,
    pub q: IndexWindow,
    pub block_size: u64,
    pub mode: WitnessMode,
    pub density: BigRational,
    /// The lower bound `(dH − H/N − 2N)/(N−1)²` on `|Q|`; present only when
    /// the window actually has at least `d·H` members.
    pub guaranteed: Option<BigRational>,
}

impl Witness {
    /// Checks `a ∈ w` and `a + k ∈ w` for every `a ∈ Q`.
    pub fn is_sound_for(&self, w: &IndexWindow) -> bool {
        self.q.members().iter().all(|&a| w.contains(a) && w.contains(a + self.k))
    }
}

fn check_density(d: &BigRational) -> Result<(), DensityError> {
    if !d.is_positive() || *d > BigRational::one() {
        return Err(DensityError::InvalidDensity(crate::format_rational(d)));
    }
    Ok(())
}

/// `⌊1/d⌋ + 1`.
pub fn lemma_block_size(d: &BigRational) -> Result<u64, DensityError> {
    check_density(d)?;
    let n = (d.recip().floor().to_integer() + BigInt::one()).to_u64();
    n.ok_or_else(|| DensityError::InvalidDensity(crate::format_rational(d)))
}

/// `⌊2/d⌋`.
pub fn corollary_block_size(d: &BigRational) -> Result<u64, DensityError> {
    check_density(d)?;
    let two = BigRational::from_integer(2.into());
    let n = (two / d).floor().to_integer().to_u64();
    n.ok_or_else(|| DensityError::InvalidDensity(crate::format_rational(d)))
}

/// `(d·H − H/N − 2N) / (N − 1)²`, the guaranteed size of `Q` on a window of
/// horizon `H` with at least `d·H` members.
pub fn witness_count_bound(d: &BigRational, horizon: u64, block: u64) -> BigRational {
    let h = BigRational::from_integer(horizon.into());
    let n = BigRational::from_integer(block.into());
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let dn = &n - &one;
    (d * &h - &h / &n - two * &n) / (&dn * &dn)
}

pub fn lemma1_witness(w: &IndexWindow, d: &BigRational) -> Result<Witness, DensityError> {
    let block = lemma_block_size(d)?;
    extract(w, d, block, WitnessMode::Lemma)
}

pub fn corollary_witness(w: &IndexWindow, d: &BigRational) -> Result<Witness, DensityError> {
    let block = corollary_block_size(d)?;
    extract(w, d, block, WitnessMode::Corollary)
}

/// Block scan shared by both modes. `[0, H)` is cut into consecutive blocks
/// of `block` integers (the last one possibly shorter); each block with two
/// or more members contributes its two least members `(a, b)`, and blocks
/// are classed by `b − a`. The largest class (smallest difference on ties)
/// gives `k`, and its `a` values form `Q`.
fn extract(
    w: &IndexWindow,
    d: &BigRational,
    block: u64,
    mode: WitnessMode,
) -> Result<Witness, DensityError> {
    if w.is_empty() {
        return Err(DensityError::EmptyWindow);
    }
    let required = block.saturating_mul(block);
    if w.horizon() < required {
        return Err(DensityError::WindowTooShort { horizon: w.horizon(), required });
    }
    let mut firsts: Vec<Vec<u64>> = vec![Vec::new(); block as usize];
    let members = w.members();
    let mut i = 0;
    while i < members.len() {
        let blk = members[i] / block;
        if i + 1 < members.len() && members[i + 1] / block == blk {
            let diff = members[i + 1] - members[i];
            firsts[diff as usize].push(members[i]);
        }
        while i < members.len() && members[i] / block == blk {
            i += 1;
        }
    }
    let (k, class) = firsts
        .iter()
        .enumerate()
        .skip(1)
        .fold((0usize, 0usize), |best, (j, c)| if c.len() > best.1 { (j, c.len()) } else { best });
    if class == 0 {
        return Err(DensityError::NoPairedBlock);
    }
    let q = IndexWindow::new(w.horizon(), std::mem::take(&mut firsts[k]))?;
    let claim_holds = BigRational::from_integer(w.len().into())
        >= d * BigRational::from_integer(w.horizon().into());
    let mut witness = Witness {
        k: k as u64,
        q,
        block_size: block,
        mode,
        density: d.clone(),
        guaranteed: None,
    };
    if !claim_holds {
        return Err(DensityError::DensityClaimFalse(Box::new(witness)));
    }
    let bound = witness_count_bound(d, w.horizon(), block);
    if BigRational::from_integer(witness.q.len().into()) < bound {
        return Err(DensityError::CountBoundViolated {
            found: witness.q.len() as u64,
            bound: crate::format_rational(&bound),
        });
    }
    witness.guaranteed = Some(bound);
    Ok(witness)
}

/// Exact check of `2/(N+1) − (5/(3N) − 2/(3N²)) ≥ 0`.
pub fn verify_corollary_inequalities(n: u64) -> Result<bool, DensityError> {
    if n < 2 {
        return Err(DensityError::InvalidN(n));
    }
    let r = |a: i64, b: u64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let lhs = r(2, n + 1);
    let rhs = r(5, 3 * n) - r(2, 3 * n * n);
    Ok(lhs - rhs >= BigRational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lemma_evens() {
        let w = IndexWindow::from_predicate(300, |n| n % 2 == 0);
        let wit = lemma1_witness(&w, &ratio(1, 2)).unwrap();
        assert_eq!(wit.block_size, 3);
        assert_eq!(wit.k, 2);
        assert_eq!(wit.q.len(), 50);
        assert_eq!(wit.guaranteed, Some(ratio(11, 1)));
        assert!(wit.is_sound_for(&w));
    }

    #[test]
    fn lemma_full_and_mod5() {
        let w = IndexWindow::from_predicate(60, |_| true);
        let wit = lemma1_witness(&w, &ratio(1, 1)).unwrap();
        assert_eq!((wit.block_size, wit.k, wit.q.len()), (2, 1, 30));

        let w = IndexWindow::from_predicate(500, |n| n % 5 < 2);
        let wit = lemma1_witness(&w, &ratio(2, 5)).unwrap();
        assert_eq!((wit.block_size, wit.k), (3, 1));
        assert!(wit.is_sound_for(&w));
    }

    #[test]
    fn corollary_examples() {
        let w = IndexWindow::from_predicate(300, |n| n % 2 == 0);
        let wit = corollary_witness(&w, &ratio(1, 2)).unwrap();
        assert_eq!(wit.block_size, 4);
        assert!((1..4).contains(&wit.k));
        assert!(wit.is_sound_for(&w));

        let w = IndexWindow::from_predicate(60, |_| true);
        let wit = corollary_witness(&w, &ratio(1, 1)).unwrap();
        assert_eq!((wit.block_size, wit.k), (2, 1));

        let w = IndexWindow::from_predicate(500, |n| n % 5 < 2);
        let wit = corollary_witness(&w, &ratio(2, 5)).unwrap();
        assert_eq!(wit.block_size, 5);
        assert!(wit.k < 5);
    }

    #[test]
    fn error_paths() {
        let w = IndexWindow::from_predicate(8, |_| true);
        assert!(matches!(
            lemma1_witness(&w, &ratio(1, 3)),
            Err(DensityError::WindowTooShort { horizon: 8, required: 16 })
        ));
        assert!(matches!(lemma1_witness(&w, &ratio(0, 1)), Err(DensityError::InvalidDensity(_))));
        assert!(matches!(lemma1_witness(&w, &ratio(3, 2)), Err(DensityError::InvalidDensity(_))));
        assert!(matches!(
            lemma1_witness(&IndexWindow::empty(100), &ratio(1, 2)),
            Err(DensityError::EmptyWindow)
        ));

        // Sparse window: density claim false but a paired block exists.
        let w = IndexWindow::new(100, vec![0, 1, 50]).unwrap();
        match lemma1_witness(&w, &ratio(1, 2)) {
            Err(DensityError::DensityClaimFalse(wit)) => {
                assert_eq!(wit.k, 1);
                assert!(wit.guaranteed.is_none());
                assert!(wit.is_sound_for(&w));
            }
            other => panic!("unexpected {other:?}"),
        }
        let w = IndexWindow::new(100, vec![0, 50]).unwrap();
        assert!(matches!(lemma1_witness(&w, &ratio(1, 2)), Err(DensityError::NoPairedBlock)));
    }

    #[test]
    fn corollary_inequality() {
        for n in [2, 3, 4, 5, 100] {
            assert!(verify_corollary_inequalities(n).unwrap(), "N = {n}");
        }
        assert!(matches!(verify_corollary_inequalities(1), Err(DensityError::InvalidN(1))));
    }
}
