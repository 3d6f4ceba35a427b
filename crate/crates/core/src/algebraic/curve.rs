use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::density::{windowed_density, DensityEstimate, IndexWindow, MIN_PROGRESSION_HITS};

use super::fp::{roots, UniPoly};
use super::map::{AffineClosedSet, PolyMap};
use super::orbit::{find_repeat, return_set_with, OrbitConfig};
use super::poly::MultiPoly;
use super::scalar::{mul_mod, ExactScalar, Field};
use super::AlgebraicError;

/// Sampling prime for systems over ℚ.
pub const SAMPLING_PRIME: u64 = 2_147_483_647;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Invariance {
    /// `f ∘ Φᵏ` vanishes on `V(f)`, certified by polynomial division.
    Proved,
    /// A power of the remainder is nonzero modulo `f`; some point of the
    /// curve is mapped off it.
    Refuted,
    /// No certificate within the caps; `holds` records whether every one of
    /// `trials` sampled curve points over a prime field stayed on the curve.
    Sampled { trials: usize, holds: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceConfig {
    pub term_cap: usize,
    pub degree_cap: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        InvarianceConfig { term_cap: 4096, degree_cap: 4096, trials: 64, seed: 0 }
    }
}

/// Coordinates of `Φᵏ`, composed symbolically.
pub fn iterate_symbolic(map: &PolyMap, k: u64, config: &InvarianceConfig) -> Result<Vec<MultiPoly>, AlgebraicError> {
    let coords = map.polynomial_coordinates()?;
    let mut cur: Vec<MultiPoly> = PolyMap::identity(map.arity(), map.field()).numerators().to_vec();
    for step in 1..=k {
        cur = coords
            .iter()
            .map(|c| c.compose_capped(&cur, config.term_cap))
            .collect::<Option<_>>()
            .ok_or(AlgebraicError::DegreeOverflow { step })?;
        if cur.iter().any(|c| c.total_degree() > config.degree_cap) {
            return Err(AlgebraicError::DegreeOverflow { step });
        }
    }
    Ok(cur)
}

pub fn curve_invariance_check(map: &PolyMap, f: &MultiPoly, k: u64) -> Result<Invariance, AlgebraicError> {
    curve_invariance_check_with(map, f, k, &InvarianceConfig::default())
}

fn check_curve(map: &PolyMap, f: &MultiPoly, k: u64) -> Result<(), AlgebraicError> {
    if k == 0 {
        return Err(AlgebraicError::ZeroShift);
    }
    if f.is_zero() {
        return Err(AlgebraicError::ZeroCurve);
    }
    if f.vars() != map.arity() {
        return Err(AlgebraicError::ArityMismatch { expected: map.arity(), got: f.vars() });
    }
    if f.field() != map.field() {
        return Err(AlgebraicError::FieldMismatch);
    }
    map.polynomial_coordinates().map(|_| ())
}

/// Decides `Φᵏ(V(f)) ⊆ V(f)` for a polynomial map.
///
/// With `g = f ∘ Φᵏ` and `r` its normal form modulo `(f)`, the inclusion
/// holds iff `g` lies in the radical of `(f)`, iff `r^deg(f) ≡ 0 mod f`
/// (no irreducible factor of `f` occurs more than `deg f` times). When the
/// reduction exceeds the term cap the check falls back to sampling.
pub fn curve_invariance_check_with(
    map: &PolyMap,
    f: &MultiPoly,
    k: u64,
    config: &InvarianceConfig,
) -> Result<Invariance, AlgebraicError> {
    check_curve(map, f, k)?;
    let phik = iterate_symbolic(map, k, config)?;
    let g = f.compose_capped(&phik, config.term_cap).ok_or(AlgebraicError::DegreeOverflow { step: k })?;
    match radical_member(&g, f, config.term_cap) {
        Some(true) => Ok(Invariance::Proved),
        Some(false) => Ok(Invariance::Refuted),
        None => sample_curve_invariance(map, f, k, config.trials, config.seed),
    }
}

fn radical_member(g: &MultiPoly, f: &MultiPoly, cap: usize) -> Option<bool> {
    if f.constant_value().is_some() {
        return Some(true);
    }
    let r = g.rem_capped(f, cap)?;
    let mut acc = r.clone();
    for _ in 1..f.total_degree() {
        if acc.is_zero() {
            break;
        }
        acc = acc.mul_capped(&r, cap)?.rem_capped(f, cap)?;
    }
    Some(acc.is_zero())
}

/// Restriction of `f` to the line `a + t·b`.
fn restrict_to_line(f: &[(Vec<u32>, u64)], a: &[u64], b: &[u64], p: u64) -> UniPoly {
    let lines: Vec<UniPoly> = a.iter().zip(b).map(|(&ai, &bi)| UniPoly::linear(p, ai, bi)).collect();
    let mut powers: Vec<Vec<UniPoly>> = lines.iter().map(|_| vec![UniPoly::constant(p, 1)]).collect();
    let mut acc = UniPoly::new(p, vec![]);
    for (exps, c) in f {
        let mut t = UniPoly::constant(p, *c);
        for (i, &e) in exps.iter().enumerate() {
            while powers[i].len() <= e as usize {
                let next = powers[i].last().expect("seeded").mul(&lines[i]);
                powers[i].push(next);
            }
            t = t.mul(&powers[i][e as usize]);
        }
        acc = acc.add(&t);
    }
    acc
}

/// Checks `f(Φᵏ(P)) = 0` at up to `trials` points `P` of `V(f)` over a prime
/// field (the system's own, or [`SAMPLING_PRIME`] over ℚ), found as roots
/// of `f` along seeded random lines.
pub fn sample_curve_invariance(
    map: &PolyMap,
    f: &MultiPoly,
    k: u64,
    trials: usize,
    seed: u64,
) -> Result<Invariance, AlgebraicError> {
    check_curve(map, f, k)?;
    let p = match map.field() {
        Field::Prime(p) => p,
        Field::Rational => SAMPLING_PRIME,
    };
    let fm = f.to_mod(p).ok_or(AlgebraicError::BadSamplingPrime(p))?;
    let mm = map.to_mod(p).ok_or(AlgebraicError::BadSamplingPrime(p))?;
    let v = map.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut found, mut holds) = (0usize, true);
    let mut attempts = 0;
    while found < trials && attempts < trials.max(1) * 64 {
        attempts += 1;
        let a: Vec<u64> = (0..v).map(|_| rng.gen_range(0..p)).collect();
        let b: Vec<u64> = (0..v).map(|_| rng.gen_range(0..p)).collect();
        let h = restrict_to_line(&fm.terms, &a, &b, p);
        let ts = if h.is_zero() { vec![rng.gen_range(0..p)] } else { roots(&h, &mut rng) };
        for t in ts {
            if found >= trials {
                break;
            }
            let mut pt: Vec<u64> = a.iter().zip(&b).map(|(&ai, &bi)| (ai + mul_mod(bi, t, p)) % p).collect();
            for _ in 0..k {
                pt = mm.eval(&pt).expect("polynomial maps have constant denominators");
            }
            found += 1;
            holds &= fm.eval(&pt) == 0;
        }
    }
    Ok(Invariance::Sampled { trials: found, holds })
}

/// Findings on a plane curve `C = V(f)` along one orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveAnalysis {
    pub window: IndexWindow,
    pub density: DensityEstimate,
    /// Headline of the sweep: the density at the largest swept length.
    pub density_estimate: BigRational,
    /// Set when the headline is a unit fraction `1/k`.
    pub k: Option<u64>,
    /// For other positive headlines, the shifts `⌊1/δ̂⌋` and `⌈1/δ̂⌉`.
    pub candidates: Vec<u64>,
    pub invariance: Option<Invariance>,
    /// `(b, a)`: every `b + j·a < H` lies in the window.
    pub ap_found: Option<(u64, u64)>,
    /// Irreducibility of `f` is assumed, never checked.
    pub irreducibility_verified: bool,
}

/// Lengths `L, 2L, 4L, …` below `H`, then `H`.
pub fn doubling_lengths(min_len: u64, horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut l = min_len.max(1);
    while l < horizon {
        out.push(l);
        l = l.saturating_mul(2);
    }
    out.push(horizon);
    out
}

/// Smallest `b` in the window such that the progression `b + j·a` has at
/// least [`MIN_PROGRESSION_HITS`] terms below the horizon, all in the window.
pub fn find_window_progression(w: &IndexWindow, a: u64) -> Option<u64> {
    let span = a.checked_mul(MIN_PROGRESSION_HITS - 1)?;
    w.members()
        .iter()
        .copied()
        .take_while(|&b| b + span < w.horizon())
        .find(|&b| (b..w.horizon()).step_by(a as usize).all(|n| w.contains(n)))
}

pub fn curve_theorem_analyze(
    map: &PolyMap,
    f: &MultiPoly,
    x0: &[ExactScalar],
    horizon: u64,
    min_len: u64,
) -> Result<CurveAnalysis, AlgebraicError> {
    curve_theorem_analyze_with(map, f, x0, horizon, min_len, &OrbitConfig::default())
}

pub fn curve_theorem_analyze_with(
    map: &PolyMap,
    f: &MultiPoly,
    x0: &[ExactScalar],
    horizon: u64,
    min_len: u64,
    config: &OrbitConfig,
) -> Result<CurveAnalysis, AlgebraicError> {
    if let Some((first, repeat)) = find_repeat(map, x0, horizon, config.max_bits)? {
        return Err(AlgebraicError::PreperiodicPoint { first, repeat });
    }
    let window = return_set_with(map, x0, &AffineClosedSet::hypersurface(f.clone()), horizon, config)?;
    let density = windowed_density(&window, &doubling_lengths(min_len, horizon))?;
    let delta = density.headline.clone();
    let mut analysis = CurveAnalysis {
        window,
        density,
        density_estimate: delta.clone(),
        k: None,
        candidates: Vec::new(),
        invariance: None,
        ap_found: None,
        irreducibility_verified: false,
    };
    if delta.is_zero() {
        return Ok(analysis);
    }
    if delta.numer().is_one() {
        let k: u64 = delta.denom().try_into().expect("denominator at most the horizon");
        analysis.k = Some(k);
        analysis.invariance = Some(curve_invariance_check_with(map, f, k, &config.invariance)?);
        analysis.ap_found = find_window_progression(&analysis.window, k).map(|b| (b, k));
    } else {
        analysis.candidates = shift_candidates(&delta);
    }
    Ok(analysis)
}

/// `⌊1/δ⌋` and `⌈1/δ⌉` for `0 < δ ≤ 1`, deduplicated.
pub fn shift_candidates(delta: &BigRational) -> Vec<u64> {
    let inv = delta.recip();
    let lo: u64 = inv.floor().to_integer().try_into().expect("delta is a window density");
    let hi: u64 = inv.ceil().to_integer().try_into().expect("delta is a window density");
    if lo == hi { vec![lo] } else { vec![lo, hi] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat() -> (MultiPoly, MultiPoly) {
        (MultiPoly::var(2, 0, Field::Rational), MultiPoly::var(2, 1, Field::Rational))
    }

    fn q(v: i64) -> ExactScalar {
        ExactScalar::from_i64(Field::Rational, v)
    }

    #[test]
    fn diagonal_under_squaring() {
        let (x, y) = rat();
        let sq = PolyMap::polynomial(vec![x.pow(2), y.pow(2)]).unwrap();
        assert_eq!(curve_invariance_check(&sq, &(&x - &y), 1).unwrap(), Invariance::Proved);
    }

    #[test]
    fn axis_under_swap_square() {
        let (x, y) = rat();
        let ss = PolyMap::polynomial(vec![y.pow(2), x.pow(2)]).unwrap();
        assert_eq!(curve_invariance_check(&ss, &y, 2).unwrap(), Invariance::Proved);
        assert_eq!(curve_invariance_check(&ss, &y, 1).unwrap(), Invariance::Refuted);
    }

    #[test]
    fn identity_preserves_everything() {
        let (x, y) = rat();
        let id = PolyMap::identity(2, Field::Rational);
        for f in [&x * &y, &(&x.pow(3) - &y.pow(2)) + &q_poly(5), y.pow(2)] {
            for k in 1..4 {
                assert_eq!(curve_invariance_check(&id, &f, k).unwrap(), Invariance::Proved);
            }
        }
    }

    fn q_poly(v: i64) -> MultiPoly {
        MultiPoly::constant(2, q(v))
    }

    #[test]
    fn non_reduced_curve_uses_the_radical() {
        // The swap preserves the axes V(x·y²), though x²·y is no multiple of x·y².
        let (x, y) = rat();
        let swap = PolyMap::polynomial(vec![y.clone(), x.clone()]).unwrap();
        let f = &x * &y.pow(2);
        assert!(!f.compose(&[y.clone(), x.clone()]).rem(&f).is_zero());
        assert_eq!(curve_invariance_check(&swap, &f, 1).unwrap(), Invariance::Proved);
        let lift = PolyMap::polynomial(vec![x.clone(), &y + &q_poly(1)]).unwrap();
        assert_eq!(curve_invariance_check(&lift, &y.pow(2), 1).unwrap(), Invariance::Refuted);
    }

    #[test]
    fn overflow_is_loud() {
        let (x, y) = rat();
        let m = PolyMap::polynomial(vec![(&x + &y).pow(2), &x * &y]).unwrap();
        let cfg = InvarianceConfig { term_cap: 50, ..InvarianceConfig::default() };
        assert!(matches!(
            curve_invariance_check_with(&m, &x, 6, &cfg),
            Err(AlgebraicError::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn sampling_agrees_with_division() {
        let (x, y) = rat();
        let sq = PolyMap::polynomial(vec![x.pow(2), y.pow(2)]).unwrap();
        let ss = PolyMap::polynomial(vec![y.pow(2), x.pow(2)]).unwrap();
        assert_eq!(sample_curve_invariance(&sq, &(&x - &y), 1, 50, 3).unwrap(), Invariance::Sampled { trials: 50, holds: true });
        assert_eq!(sample_curve_invariance(&ss, &y, 1, 50, 3).unwrap(), Invariance::Sampled { trials: 50, holds: false });
    }

    #[test]
    fn curve_fixtures() {
        let (x, y) = rat();
        let sq = PolyMap::polynomial(vec![x.pow(2), y.pow(2)]).unwrap();
        let ss = PolyMap::polynomial(vec![y.pow(2), x.pow(2)]).unwrap();

        let a = curve_theorem_analyze(&sq, &(&x - &y), &[q(2), q(2)], 64, 8).unwrap();
        assert_eq!(a.density_estimate, BigRational::one());
        assert_eq!((a.k, a.invariance.clone(), a.ap_found), (Some(1), Some(Invariance::Proved), Some((0, 1))));

        let b = curve_theorem_analyze(&ss, &y, &[q(2), q(0)], 64, 8).unwrap();
        assert_eq!(b.density_estimate, BigRational::new(1.into(), 2.into()));
        assert_eq!((b.k, b.invariance.clone(), b.ap_found), (Some(2), Some(Invariance::Proved), Some((0, 2))));

        let c = curve_theorem_analyze(&sq, &(&x - &y), &[q(2), q(3)], 64, 8).unwrap();
        assert!(c.density_estimate.is_zero());
        assert_eq!((c.k, c.ap_found), (None, None));
        assert!(c.invariance.is_none());
    }

    #[test]
    fn preperiodic_start_rejected() {
        let (x, y) = rat();
        let sq = PolyMap::polynomial(vec![x.pow(2), y.pow(2)]).unwrap();
        let err = curve_theorem_analyze(&sq, &(&x - &y), &[q(1), q(1)], 64, 8).unwrap_err();
        assert!(matches!(err, AlgebraicError::PreperiodicPoint { first: 0, repeat: 1 }));
    }

    #[test]
    fn candidates_for_non_unit_headlines() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(shift_candidates(&r(2, 3)), vec![1, 2]);
        assert_eq!(shift_candidates(&r(2, 5)), vec![2, 3]);
        assert_eq!(shift_candidates(&r(1, 4)), vec![4]);
        let w = IndexWindow::from_predicate(60, |n| n % 3 != 2);
        assert_eq!(find_window_progression(&w, 3), Some(0));
        assert_eq!(find_window_progression(&w, 2), None);
    }
}
