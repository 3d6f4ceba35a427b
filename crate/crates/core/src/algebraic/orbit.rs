use std::collections::HashMap;
use std::sync::OnceLock;

use crate::density::{APDecomposition, APSet, IndexWindow};

use super::curve::{curve_invariance_check_with, Invariance, InvarianceConfig};
use super::map::{AffineClosedSet, ModMap, PolyMap};
use super::poly::{ModPoly, MultiPoly};
use super::scalar::{is_prime, rational_mod, ExactScalar, Field};
use super::AlgebraicError;

/// Safety limit on the number of map evaluations in [`detect_cycle`].
pub const CYCLE_STEP_LIMIT: u64 = 1 << 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitConfig {
    /// Rational orbit points are kept exactly while their total size stays
    /// below this many bits.
    pub max_bits: u64,
    /// Number of ~61-bit primes tracked once exact evaluation stops.
    pub moduli: usize,
    /// Largest shift `k` tried when certifying a vanishing residue via an
    /// invariance `Φᵏ(C) ⊆ C`.
    pub max_shift: u64,
    pub invariance: InvarianceConfig,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { max_bits: 16_384, moduli: 3, max_shift: 16, invariance: InvarianceConfig::default() }
    }
}

/// The first points `x₀, Φ(x₀), …, Φ^(H−1)(x₀)`, evaluated exactly.
pub fn iterate_orbit(map: &PolyMap, x0: &[ExactScalar], horizon: u64) -> Result<Vec<Vec<ExactScalar>>, AlgebraicError> {
    map.check_point(x0)?;
    let mut out = Vec::with_capacity(horizon as usize);
    let mut x = x0.to_vec();
    for n in 0..horizon {
        let next = if n + 1 < horizon { Some(map.eval(&x).ok_or(AlgebraicError::DomainError { step: n })?) } else { None };
        out.push(x);
        match next {
            Some(y) => x = y,
            None => break,
        }
    }
    Ok(out)
}

fn check_target(map: &PolyMap, target: &AffineClosedSet) -> Result<(), AlgebraicError> {
    for g in &target.generators {
        if g.vars() != map.arity() {
            return Err(AlgebraicError::ArityMismatch { expected: map.arity(), got: g.vars() });
        }
        if g.field() != map.field() {
            return Err(AlgebraicError::FieldMismatch);
        }
    }
    Ok(())
}

fn point_bits(x: &[ExactScalar]) -> u64 {
    x.iter().map(ExactScalar::bits).sum()
}

/// Primes just below 2⁶¹, largest first.
fn reduction_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut n = (1u64 << 61) - 1;
        while out.len() < 16 {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

struct Residues {
    map: ModMap,
    gens: Vec<ModPoly>,
    x: Vec<u64>,
}

/// Window of `n < H` with `Φⁿ(x₀)` in the target, using [`OrbitConfig::default`].
pub fn return_set(
    map: &PolyMap,
    x0: &[ExactScalar],
    target: &AffineClosedSet,
    horizon: u64,
) -> Result<IndexWindow, AlgebraicError> {
    return_set_with(map, x0, target, horizon, &OrbitConfig::default())
}

/// Over ℚ, orbit heights grow exponentially in `n` for expanding maps, so
/// points are tracked exactly only up to `max_bits`. Past that, evaluation
/// continues modulo several large primes. A nonzero residue proves a
/// generator does not vanish. All-zero residues are accepted only with a
/// certificate: an earlier member `n − k` plus a proof that `Φᵏ` maps the
/// target curve into itself. Anything else is `Undetermined`.
pub fn return_set_with(
    map: &PolyMap,
    x0: &[ExactScalar],
    target: &AffineClosedSet,
    horizon: u64,
    config: &OrbitConfig,
) -> Result<IndexWindow, AlgebraicError> {
    map.check_point(x0)?;
    check_target(map, target)?;
    let gens: Vec<&MultiPoly> = target.generators.iter().filter(|g| !g.is_zero()).collect();
    let mut members = Vec::new();
    let mut x = x0.to_vec();
    let mut n = 0;
    while n < horizon && point_bits(&x) <= config.max_bits {
        if gens.iter().all(|g| g.eval(&x).is_zero()) {
            members.push(n);
        }
        if n + 1 < horizon {
            x = map.eval(&x).ok_or(AlgebraicError::DomainError { step: n })?;
        }
        n += 1;
    }
    if n < horizon {
        log::debug!("orbit exceeds {} bits at step {n}; continuing modulo primes", config.max_bits);
        modular_tail(map, &gens, x, n, horizon, config, &mut members)?;
    }
    IndexWindow::new(horizon, members).map_err(AlgebraicError::from)
}

fn modular_tail(
    map: &PolyMap,
    gens: &[&MultiPoly],
    x: Vec<ExactScalar>,
    start: u64,
    horizon: u64,
    config: &OrbitConfig,
    members: &mut Vec<u64>,
) -> Result<(), AlgebraicError> {
    let mut states: Vec<Residues> = reduction_primes()
        .iter()
        .filter_map(|&p| {
            let x = x.iter().map(|c| rational_mod(c.as_rational()?, p)).collect::<Option<Vec<_>>>()?;
            let gens = gens.iter().map(|g| g.to_mod(p)).collect::<Option<Vec<_>>>()?;
            Some(Residues { map: map.to_mod(p)?, gens, x })
        })
        .take(config.moduli.max(1))
        .collect();
    let certifiable = gens.len() == 1 && map.polynomial_coordinates().is_ok();
    let mut invariant: HashMap<u64, bool> = HashMap::new();
    for n in start..horizon {
        if states.is_empty() {
            return Err(AlgebraicError::Undetermined { step: n });
        }
        let separated = states.iter().any(|s| s.gens.iter().any(|g| g.eval(&s.x) != 0));
        if gens.is_empty() {
            members.push(n);
        } else if !separated {
            let certified = certifiable
                && (1..=config.max_shift.min(n)).any(|k| {
                    members.binary_search(&(n - k)).is_ok()
                        && *invariant.entry(k).or_insert_with(|| {
                            matches!(
                                curve_invariance_check_with(map, gens[0], k, &config.invariance),
                                Ok(Invariance::Proved)
                            )
                        })
                });
            if !certified {
                return Err(AlgebraicError::Undetermined { step: n });
            }
            members.push(n);
        }
        if n + 1 < horizon {
            // A denominator vanishing mod p but not over ℚ makes that prime useless.
            states = states
                .into_iter()
                .filter_map(|mut s| {
                    let (y, ok) = s.map.eval_with_denominators(&s.x);
                    s.x = y;
                    ok.then_some(s)
                })
                .collect();
        }
    }
    Ok(())
}

fn mod_point(map: &PolyMap, x0: &[ExactScalar]) -> Result<(u64, Vec<u64>), AlgebraicError> {
    map.check_point(x0)?;
    let p = match map.field() {
        Field::Prime(p) => p,
        Field::Rational => return Err(AlgebraicError::NotPrimeField),
    };
    Ok((p, x0.iter().map(|c| c.as_residue().expect("checked field")).collect()))
}

/// `(t, c)` with `Φ^(t+c)(x₀) = Φᵗ(x₀)`, `t` minimal and then `c` minimal,
/// by Brent's method. Prime fields only.
pub fn detect_cycle(map: &PolyMap, x0: &[ExactScalar]) -> Result<(u64, u64), AlgebraicError> {
    let (p, start) = mod_point(map, x0)?;
    let m = map.to_mod(p).expect("coefficients already live in F_p");
    let step = |x: &[u64], i: u64| m.eval(x).ok_or(AlgebraicError::DomainError { step: i });
    let mut evals = 0u64;
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = start.clone();
    let mut hare = step(&start, 0)?;
    let mut hare_index = 1u64;
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare, hare_index)?;
        hare_index += 1;
        lam += 1;
        evals += 1;
        if evals > CYCLE_STEP_LIMIT {
            return Err(AlgebraicError::CycleNotFound { steps: evals });
        }
    }
    let mut tortoise = start.clone();
    let mut hare = start;
    for i in 0..lam {
        hare = step(&hare, i)?;
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step(&tortoise, mu)?;
        hare = step(&hare, mu + lam)?;
        mu += 1;
    }
    Ok((mu, lam))
}

/// Exact return set over a prime field, read off the orbit's lasso.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFieldReturnSet {
    pub tail: u64,
    pub period: u64,
    pub window: IndexWindow,
    pub decomposition: APDecomposition,
}

pub fn finite_field_return_set(
    map: &PolyMap,
    x0: &[ExactScalar],
    target: &AffineClosedSet,
    horizon: u64,
) -> Result<FiniteFieldReturnSet, AlgebraicError> {
    check_target(map, target)?;
    let (tail, period) = detect_cycle(map, x0)?;
    let (p, mut x) = mod_point(map, x0)?;
    let m = map.to_mod(p).expect("coefficients already live in F_p");
    let gens: Vec<ModPoly> = target.generators.iter().map(|g| g.to_mod(p).expect("same field")).collect();
    let mut bits = Vec::with_capacity((tail + period) as usize);
    for i in 0..tail + period {
        bits.push(gens.iter().all(|g| g.eval(&x) == 0));
        x = m.eval(&x).ok_or(AlgebraicError::DomainError { step: i })?;
    }
    let structured = APSet::from_lasso(&bits[..tail as usize], &bits[tail as usize..]);
    let window = structured.enumerate_below(horizon);
    Ok(FiniteFieldReturnSet { tail, period, window, decomposition: APDecomposition::exact(structured, horizon) })
}

/// First `(i, j)` with `i < j < H` and `Φⁱ(x₀) = Φʲ(x₀)`, among exactly
/// tracked points.
pub(crate) fn find_repeat(
    map: &PolyMap,
    x0: &[ExactScalar],
    horizon: u64,
    max_bits: u64,
) -> Result<Option<(u64, u64)>, AlgebraicError> {
    map.check_point(x0)?;
    let mut seen: HashMap<Vec<ExactScalar>, u64> = HashMap::new();
    let mut x = x0.to_vec();
    for n in 0..horizon {
        if point_bits(&x) > max_bits {
            break;
        }
        if let Some(&i) = seen.get(&x) {
            return Ok(Some((i, n)));
        }
        seen.insert(x.clone(), n);
        if n + 1 < horizon {
            x = map.eval(&x).ok_or(AlgebraicError::DomainError { step: n })?;
        }
    }
    Ok(None)
}
