use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{
    lemma1_witness, windowed_density, APSet, DensityError, DensityEstimate, IndexWindow,
    Progression,
};

/// A progression must be seen at least this many times in the window to be
/// extracted; equivalently the modulus is capped at `H / 4`.
pub const MIN_PROGRESSION_HITS: u64 = 4;

/// Small moduli always tried during extraction, in addition to the
/// witness shifts and detected periods.
const SMALL_MODULI: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Residual density fell below the threshold.
    BelowThreshold,
    /// Residual density is still at or above the threshold but no further
    /// progression is consistent with the window.
    Inconclusive,
    /// The decomposition is valid for all `n`, not just the window (finite
    /// systems, where the return set is eventually periodic).
    Exact,
}

/// Progressions plus a residual, disjoint below the horizon and jointly
/// equal to the decomposed window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APDecomposition {
    pub horizon: u64,
    pub structured: APSet,
    pub residual: IndexWindow,
    pub residual_density: DensityEstimate,
    pub verdict: Verdict,
}

impl APDecomposition {
    /// Wraps an exact progression set; the residual is empty.
    pub fn exact(structured: APSet, horizon: u64) -> Self {
        let residual = IndexWindow::empty(horizon);
        let residual_density = density_curve(&residual, horizon)
            .unwrap_or_else(|_| DensityEstimate::unswept(horizon));
        Self { horizon, structured, residual, residual_density, verdict: Verdict::Exact }
    }
}

/// Swept lengths `1, 2, 4, …` below `max_len`, then `max_len` itself.
fn curve_lengths(max_len: u64) -> Vec<u64> {
    let mut lengths: Vec<u64> = std::iter::successors(Some(1u64), |l| l.checked_mul(2))
        .take_while(|&l| l < max_len)
        .collect();
    lengths.push(max_len);
    lengths
}

fn density_curve(w: &IndexWindow, max_len: u64) -> Result<DensityEstimate, DensityError> {
    if w.horizon() == 0 {
        return Ok(DensityEstimate::unswept(0));
    }
    windowed_density(w, &curve_lengths(max_len))
}

/// Greedy extraction of progressions consistent with `w`, stopping once the
/// residual's density at `min_len` drops below `density_threshold`.
///
/// A candidate `(b mod a)` is taken with the smallest threshold `t` such that
/// every `b + a·n ≥ t` below the horizon lies in `w`, and it must have at
/// least [`MIN_PROGRESSION_HITS`] elements there. Each round takes the
/// candidate covering the most residual members (then smaller modulus, then
/// smaller residue). Candidate moduli come from the witness shift of the
/// residual, the detected tail periods of `w` and of the residual, and all
/// small moduli.
pub fn decompose(
    w: &IndexWindow,
    density_threshold: &BigRational,
    min_len: u64,
) -> Result<APDecomposition, DensityError> {
    if !density_threshold.is_positive() || *density_threshold >= BigRational::one() {
        return Err(DensityError::InvalidThreshold(crate::format_rational(density_threshold)));
    }
    let horizon = w.horizon();
    if horizon == 0 {
        return Ok(APDecomposition {
            horizon,
            structured: APSet::default(),
            residual: w.clone(),
            residual_density: DensityEstimate::unswept(0),
            verdict: Verdict::BelowThreshold,
        });
    }
    if min_len == 0 {
        return Err(DensityError::ZeroLength);
    }
    if min_len > horizon {
        return Err(DensityError::LengthExceedsHorizon { length: min_len, horizon });
    }
    let indicator = w.indicator();
    let full_period = tail_period(&indicator);
    let mut structured = APSet::default();
    let mut residual = w.clone();
    loop {
        let estimate = density_curve(&residual, min_len)?;
        if estimate.headline < *density_threshold {
            return Ok(APDecomposition {
                horizon,
                structured,
                residual,
                residual_density: estimate,
                verdict: Verdict::BelowThreshold,
            });
        }
        let mut moduli: Vec<u64> = (1..=SMALL_MODULI).collect();
        moduli.extend(full_period);
        moduli.extend(tail_period(&residual.indicator()));
        if !estimate.headline.is_zero() {
            if let Ok(wit) = lemma1_witness(&residual, &estimate.headline) {
                moduli.push(wit.k);
            }
        }
        moduli.retain(|&a| a >= 1 && a.saturating_mul(MIN_PROGRESSION_HITS) <= horizon);
        moduli.sort_unstable();
        moduli.dedup();

        let best = moduli
            .iter()
            .filter_map(|&a| best_for_modulus(&indicator, &residual, a))
            .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        match best {
            Some((_, p)) => {
                let covered = IndexWindow::from_unsorted(horizon, p.iter_below(horizon));
                residual = residual.difference(&covered);
                structured.push(p);
            }
            None => {
                return Ok(APDecomposition {
                    horizon,
                    structured,
                    residual,
                    residual_density: estimate,
                    verdict: Verdict::Inconclusive,
                });
            }
        }
    }
}

/// Best progression of modulus `a`: `(new residual members covered, progression)`.
fn best_for_modulus(
    indicator: &[bool],
    residual: &IndexWindow,
    a: u64,
) -> Option<(u64, Progression)> {
    let horizon = indicator.len() as u64;
    // Smallest admissible threshold per residue: one step past the last gap.
    let mut first_ok: Vec<u64> = (0..a).collect();
    for (n, &hit) in indicator.iter().enumerate() {
        if !hit {
            let n = n as u64;
            first_ok[(n % a) as usize] = n + a;
        }
    }
    let mut coverage = vec![0u64; a as usize];
    for &m in residual.members() {
        let b = (m % a) as usize;
        if m >= first_ok[b] {
            coverage[b] += 1;
        }
    }
    (0..a)
        .filter_map(|b| {
            let t = first_ok[b as usize];
            if t >= horizon {
                return None;
            }
            let hits = (horizon - 1 - t) / a + 1;
            let cov = coverage[b as usize];
            (hits >= MIN_PROGRESSION_HITS && cov > 0)
                .then(|| (cov, Progression::new(b, a, t).expect("modulus ≥ 1")))
        })
        // Ties on coverage go to the smallest residue.
        .max_by(|x, y| x.0.cmp(&y.0).then(y.1.residue().cmp(&x.1.residue())))
}

/// Minimal period of the longest tail of `seq` that repeats at least
/// [`MIN_PROGRESSION_HITS`] times, via the prefix function of the reversed
/// sequence.
fn tail_period(seq: &[bool]) -> Option<u64> {
    let rev: Vec<bool> = seq.iter().rev().copied().collect();
    let n = rev.len();
    if n == 0 {
        return None;
    }
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && rev[i] != rev[k] {
            k = pi[k - 1];
        }
        if rev[i] == rev[k] {
            k += 1;
        }
        pi[i] = k;
    }
    (0..n)
        .rev()
        .map(|i| (i + 1, i + 1 - pi[i]))
        .find(|&(len, p)| p as u64 * MIN_PROGRESSION_HITS <= len as u64)
        .map(|(_, p)| p as u64)
}

/// `structured ∪ residual` below `horizon`.
pub fn reconstruct(d: &APDecomposition, horizon: u64) -> IndexWindow {
    let s = d.structured.enumerate_below(horizon);
    IndexWindow::from_unsorted(
        horizon,
        s.members().iter().chain(d.residual.members()).copied(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn evens() {
        let w = IndexWindow::from_predicate(100, |n| n % 2 == 0);
        let d = decompose(&w, &ratio(1, 10), 20).unwrap();
        assert_eq!(d.structured, APSet::new(vec![Progression::new(0, 2, 0).unwrap()], []));
        assert!(d.residual.is_empty());
        assert_eq!(d.verdict, Verdict::BelowThreshold);
        assert_eq!(reconstruct(&d, 100), w);
    }

    #[test]
    fn shifted_multiples_of_three() {
        let w = IndexWindow::from_predicate(100, |n| n == 1 || (n >= 6 && n % 3 == 0));
        let d = decompose(&w, &ratio(1, 10), 20).unwrap();
        assert_eq!(d.structured, APSet::new(vec![Progression::new(0, 3, 6).unwrap()], []));
        assert_eq!(d.residual.members(), &[1]);
        assert_eq!(reconstruct(&d, 100), w);
    }

    #[test]
    fn sparse_sum_of_powers() {
        let w = IndexWindow::from_unsorted(
            1024,
            (0..10).flat_map(|n| (0..10).map(move |m| (1u64 << n) + (1u64 << m))),
        );
        // Brute-force scan: the densest length-512 interval holds 46 members.
        let best = (0..=512u64)
            .map(|s| w.members().iter().filter(|&&m| m >= s && m < s + 512).count())
            .max()
            .unwrap();
        assert_eq!(best, 46);
        let d = decompose(&w, &ratio(1, 8), 512).unwrap();
        assert!(d.structured.is_empty());
        assert_eq!(d.residual, w);
        assert_eq!(d.residual_density.headline, ratio(46, 512));
        assert_eq!(d.residual_density.headline_length(), Some(512));
    }

    #[test]
    fn empty_decomposition_reconstructs_empty() {
        let d = APDecomposition::exact(APSet::default(), 10);
        assert!(reconstruct(&d, 10).is_empty());
    }

    #[test]
    fn inconclusive_when_nothing_fits() {
        // Dense but aperiodic: no residue class is gap-free over four steps
        // except at the very end, which the hit count forbids.
        let w = IndexWindow::from_predicate(16, |n| [0, 1, 3, 4, 6, 9, 10, 12].contains(&n));
        let d = decompose(&w, &ratio(1, 10), 8).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert_eq!(reconstruct(&d, 16), w);
    }

    #[test]
    fn tail_period_detection() {
        let seq: Vec<bool> = (0..40).map(|n| n >= 5 && n % 3 == 0).collect();
        assert_eq!(tail_period(&seq), Some(3));
    }

    #[test]
    fn threshold_validation() {
        let w = IndexWindow::empty(10);
        assert!(decompose(&w, &ratio(1, 1), 5).is_err());
        assert!(decompose(&w, &ratio(0, 1), 5).is_err());
        assert!(decompose(&w, &ratio(1, 2), 11).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(bits in prop::collection::vec(any::<bool>(), 1..300)) {
            let w = IndexWindow::from_indicator(&bits);
            let min_len = (w.horizon() / 2).max(1);
            let d = decompose(&w, &ratio(1, 5), min_len).unwrap();
            prop_assert_eq!(reconstruct(&d, w.horizon()), w.clone());
            for &m in d.residual.members() {
                prop_assert!(!d.structured.contains(m));
            }
        }
    }
}
