//! The quantitative constants: block sizes, the density bounds for the
//! witness set, and the recursive bound `M(δ, m, D, e)` on progression ratios.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::density::{lemma_block_size, verify_corollary_inequalities, DensityError};
use crate::{format_rational, parse_rational};

pub const DEFAULT_EXPONENT_CAP: u64 = 1_000_000;
pub const DEFAULT_PRECISION: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error("{0} is out of range")]
    OutOfRange(String),
    #[error("value too large to represent (log2 ≈ {log2:?}, log2 log2 ≈ {log2_log2:?})")]
    Overflow { log2: Option<f64>, log2_log2: Option<f64> },
    #[error("corollary check failed at N = {0}")]
    CorollaryFailed(u64),
    #[error("floating-point backend: {0}")]
    Backend(String),
    #[error(transparent)]
    Density(#[from] DensityError),
}

fn check_delta(delta: &BigRational) -> Result<(), BoundsError> {
    if !delta.is_positive() || delta > &BigRational::one() {
        return Err(BoundsError::OutOfRange(format!("delta = {}", format_rational(delta))));
    }
    Ok(())
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `⌊1/δ⌋ + 1`.
pub fn lemma_n(delta: &BigRational) -> Result<u64, BoundsError> {
    check_delta(delta)?;
    Ok(lemma_block_size(delta)?)
}

/// `(Nδ − 1) / (2N²(N − 1))` for an arbitrary block count `N ≥ 2`.
pub fn lemma_style_bound(delta: &BigRational, n: u64) -> BigRational {
    (rat(n) * delta - BigRational::one()) / (rat(2 * n * n) * rat(n - 1))
}

/// The lower bound on the density of the witness set, at `N = ⌊1/δ⌋ + 1`.
pub fn lemma_bound(delta: &BigRational) -> Result<BigRational, BoundsError> {
    let n = lemma_n(delta)?;
    Ok(lemma_style_bound(delta, n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryBound {
    /// Largest integer below `2/δ`.
    pub k_max: u64,
    /// `δ³/24`.
    pub q_bound: BigRational,
    /// `⌊2/δ⌋`, the block count behind the bound.
    pub block_count: u64,
}

/// `k < 2/δ` and `δ³/24`, after checking that the lemma-style bound at
/// `N = ⌊2/δ⌋` dominates `δ³/24` and the inequality chain holds at that `N`.
pub fn corollary_bound(delta: &BigRational) -> Result<CorollaryBound, BoundsError> {
    check_delta(delta)?;
    let two_over = rat(2) / delta;
    let k_max = (two_over.ceil().to_integer() - BigInt::one()).to_u64().ok_or_else(|| BoundsError::OutOfRange("k_max".into()))?;
    let n = two_over.floor().to_integer().to_u64().ok_or_else(|| BoundsError::OutOfRange("N".into()))?;
    let q_bound = delta.pow(3) / rat(24);
    if lemma_style_bound(delta, n) < q_bound || !verify_corollary_inequalities(n)? {
        return Err(BoundsError::CorollaryFailed(n));
    }
    Ok(CorollaryBound { k_max, q_bound, block_count: n })
}

/// Inputs of the recursion, validated: `0 < δ ≤ 1` and `m, D, e ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub delta: BigRational,
    pub m: u64,
    pub d: u64,
    pub e: u64,
}

impl BoundParams {
    pub fn new(delta: BigRational, m: u64, d: u64, e: u64) -> Result<Self, BoundsError> {
        check_delta(&delta)?;
        for (name, v) in [("m", m), ("D", d), ("e", e)] {
            if v == 0 {
                return Err(BoundsError::OutOfRange(format!("{name} = 0")));
            }
        }
        Ok(BoundParams { delta, m, d, e })
    }
}

/// JSON form, with `delta` as an exact `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundParamsJson {
    pub delta: String,
    pub m: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub e: u64,
}

impl TryFrom<&BoundParamsJson> for BoundParams {
    type Error = BoundsError;
    fn try_from(j: &BoundParamsJson) -> Result<Self, BoundsError> {
        let delta = parse_rational(&j.delta).ok_or_else(|| BoundsError::OutOfRange(format!("delta = {:?}", j.delta)))?;
        BoundParams::new(delta, j.m, j.d, j.e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Conservative,
    Floating,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsConfig {
    /// Largest integer exponent `⌈2/δ⌉` evaluated exactly.
    pub exponent_cap: u64,
    /// Significand bits in floating mode.
    pub precision: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { exponent_cap: DEFAULT_EXPONENT_CAP, precision: DEFAULT_PRECISION }
    }
}

/// Exact value with the exponent `2/δ` rounded up to `⌈2/δ⌉` at each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservativeM {
    pub value: BigRational,
    /// `(δᵢ, Dᵢ)` from the input down to the base case.
    pub trajectory: Vec<(BigRational, BigInt)>,
}

#[derive(Clone, Debug)]
pub struct FloatingM {
    pub value: BigFloat,
    /// First-order bound on the relative error of `value`.
    pub relative_error: f64,
    pub trajectory: Vec<(BigFloat, BigFloat)>,
}

fn log2_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits").abs().log2();
    }
    let shift = bits - 60;
    let top = (n.abs() >> shift).to_f64().expect("60 bits");
    top.log2() + shift as f64
}

fn log2_rational(q: &BigRational) -> f64 {
    log2_big(q.numer()) - log2_big(q.denom())
}

/// Continues the recursion for `steps` levels in the log domain. Returns
/// `log2 M` and `log2 log2 M` where they are finite.
fn log_domain(mut l_delta: f64, mut l_d: f64, m: u64, steps: u64) -> (Option<f64>, Option<f64>) {
    let lm = (m as f64).log2();
    let mut loglog = None;
    for _ in 0..steps {
        let l_s = 1.0 - l_delta;
        let es = if m == 1 { 0.0 } else { l_s.exp2() * lm };
        if m > 1 {
            loglog = Some(l_s + lm.log2());
        }
        l_delta = 3.0 * l_delta - 24f64.log2() - es - 2.0 * l_d;
        l_d = es + 2.0 * l_d;
    }
    let log2 = (-l_delta).is_finite().then_some(-l_delta);
    let log2_log2 = match log2 {
        Some(v) if v > 0.0 => Some(v.log2()),
        Some(_) => None,
        None => loglog.filter(|v| v.is_finite()),
    };
    (log2, log2_log2)
}

pub fn recursive_m_conservative(params: &BoundParams, config: &BoundsConfig) -> Result<ConservativeM, BoundsError> {
    let mut delta = params.delta.clone();
    let mut d = BigInt::from(params.d);
    let m = BigInt::from(params.m);
    let mut trajectory = vec![(delta.clone(), d.clone())];
    for level in 1..params.e {
        let mpow = if params.m == 1 {
            BigInt::one()
        } else {
            let s = (rat(2) / &delta).ceil().to_integer();
            match s.to_u64().filter(|&s| s <= config.exponent_cap) {
                Some(s) => Pow::pow(&m, s),
                None => {
                    let (log2, log2_log2) =
                        log_domain(log2_rational(&delta), log2_big(&d), params.m, params.e - level);
                    return Err(BoundsError::Overflow { log2, log2_log2 });
                }
            }
        };
        let scale = &mpow * &d * &d;
        delta = Pow::pow(&delta, 3u32) / BigRational::from_integer(BigInt::from(24) * &scale);
        d = scale;
        trajectory.push((delta.clone(), d.clone()));
    }
    Ok(ConservativeM { value: delta.recip(), trajectory })
}

fn backend<E: std::fmt::Debug>(e: E) -> BoundsError {
    BoundsError::Backend(format!("{e:?}"))
}

fn float_of_int(n: &BigInt, p: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc)
}

/// Value of a finite float as `f64` (infinite when out of range).
pub fn float_to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    match x.exponent() {
        Some(e) if e > 1024 => f64::INFINITY.copysign(if x.is_negative() { -1.0 } else { 1.0 }),
        Some(e) if e < -1080 => 0.0,
        _ => x.format(Radix::Dec, RM, cc).ok().and_then(|s| s.parse().ok()).unwrap_or(f64::NAN),
    }
}

fn float_log2(x: &BigFloat, p: usize, cc: &mut Consts) -> f64 {
    float_to_f64(&x.log2(p, RM, cc), cc)
}

pub fn recursive_m_floating(params: &BoundParams, config: &BoundsConfig) -> Result<FloatingM, BoundsError> {
    let p = config.precision;
    let mut cc = Consts::new().map_err(backend)?;
    let cc = &mut cc;
    let unit = 2f64.powi(-(p as i32 - 8));
    let mut delta = float_of_int(params.delta.numer(), p, cc).div(&float_of_int(params.delta.denom(), p, cc), p, RM);
    let mut d = BigFloat::from_u64(params.d, p);
    let m = BigFloat::from_u64(params.m, p);
    let two = BigFloat::from_u64(2, p);
    let twenty_four = BigFloat::from_u64(24, p);
    let ln_m = (params.m as f64).ln();
    let (mut eps_delta, mut eps_d) = (unit, 0.0f64);
    let mut trajectory = vec![(delta.clone(), d.clone())];
    for level in 1..params.e {
        let t = two.div(&delta, p, RM);
        let mt = if params.m == 1 { BigFloat::from_u64(1, p) } else { m.pow(&t, p, RM, cc) };
        let eps_t = eps_delta + unit;
        let eps_mt = if params.m == 1 { 0.0 } else { float_to_f64(&t, cc) * ln_m * eps_t + 4.0 * unit };
        let scale = mt.mul(&d, p, RM).mul(&d, p, RM);
        let cube = delta.mul(&delta, p, RM).mul(&delta, p, RM);
        let next = cube.div(&twenty_four.mul(&scale, p, RM), p, RM);
        if next.is_zero() || next.is_nan() || scale.is_inf() || scale.is_nan() {
            let (log2, log2_log2) =
                log_domain(float_log2(&delta, p, cc), float_log2(&d, p, cc), params.m, params.e - level);
            return Err(BoundsError::Overflow { log2, log2_log2 });
        }
        eps_delta = 3.0 * eps_delta + eps_mt + 2.0 * eps_d + 6.0 * unit;
        eps_d = eps_mt + 2.0 * eps_d + 2.0 * unit;
        delta = next;
        d = scale;
        trajectory.push((delta.clone(), d.clone()));
    }
    let value = BigFloat::from_u64(1, p).div(&delta, p, RM);
    Ok(FloatingM { value, relative_error: eps_delta + unit, trajectory })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub delta: String,
    #[serde(rename = "D")]
    pub d: String,
}

/// Serializable result of either mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MReport {
    pub mode: EvalMode,
    /// Exact `"p/q"` in conservative mode, decimal in floating mode;
    /// absent on overflow.
    pub value: Option<String>,
    pub log2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2_log2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    pub overflow: bool,
    pub trajectory: Vec<StepReport>,
}

pub fn recursive_m(params: &BoundParams, mode: EvalMode) -> Result<MReport, BoundsError> {
    recursive_m_with(params, mode, &BoundsConfig::default())
}

/// Either mode as an [`MReport`]; overflow becomes a report with
/// `overflow: true` and the logarithmic magnitudes.
pub fn recursive_m_with(params: &BoundParams, mode: EvalMode, config: &BoundsConfig) -> Result<MReport, BoundsError> {
    let overflowed = |log2, log2_log2| MReport {
        mode,
        value: None,
        log2,
        log2_log2,
        relative_error: None,
        overflow: true,
        trajectory: Vec::new(),
    };
    match mode {
        EvalMode::Conservative => match recursive_m_conservative(params, config) {
            Ok(c) => Ok(MReport {
                mode,
                value: Some(format_rational(&c.value)),
                log2: Some(log2_rational(&c.value)),
                log2_log2: None,
                relative_error: None,
                overflow: false,
                trajectory: c
                    .trajectory
                    .iter()
                    .map(|(dl, d)| StepReport { delta: format_rational(dl), d: d.to_string() })
                    .collect(),
            }),
            Err(BoundsError::Overflow { log2, log2_log2 }) => Ok(overflowed(log2, log2_log2)),
            Err(e) => Err(e),
        },
        EvalMode::Floating => match recursive_m_floating(params, config) {
            Ok(f) => {
                let mut cc = Consts::new().map_err(backend)?;
                let fmt = |x: &BigFloat, cc: &mut Consts| x.format(Radix::Dec, RM, cc).map_err(backend);
                let trajectory = f
                    .trajectory
                    .iter()
                    .map(|(dl, d)| Ok(StepReport { delta: fmt(dl, &mut cc)?, d: fmt(d, &mut cc)? }))
                    .collect::<Result<_, BoundsError>>()?;
                Ok(MReport {
                    mode,
                    value: Some(fmt(&f.value, &mut cc)?),
                    log2: Some(float_log2(&f.value, config.precision, &mut cc)),
                    log2_log2: None,
                    relative_error: Some(f.relative_error),
                    overflow: false,
                    trajectory,
                })
            }
            Err(BoundsError::Overflow { log2, log2_log2 }) => Ok(overflowed(log2, log2_log2)),
            Err(e) => Err(e),
        },
    }
}

/// Whether an exact value dominates a floating one up to its error bound.
pub fn dominates(exact: &BigRational, float: &FloatingM, precision: usize) -> Result<bool, BoundsError> {
    let mut cc = Consts::new().map_err(backend)?;
    let p = precision;
    let e = float_of_int(exact.numer(), p, &mut cc).div(&float_of_int(exact.denom(), p, &mut cc), p, RM);
    let slack = BigFloat::from_u64(1, p).sub(&BigFloat::from_f64(float.relative_error.min(1.0), p), p, RM);
    Ok(e.cmp(&float.value.mul(&slack, p, RM)).is_some_and(|o| o >= 0))
}

impl ConservativeM {
    pub fn is_base_case(&self) -> bool {
        self.trajectory.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn block_sizes() {
        assert_eq!(lemma_n(&r(1, 2)).unwrap(), 3);
        assert_eq!(lemma_n(&r(1, 1)).unwrap(), 2);
        assert_eq!(lemma_n(&r(2, 7)).unwrap(), 4);
        assert!(matches!(lemma_n(&r(0, 1)), Err(BoundsError::OutOfRange(_))));
        assert!(matches!(lemma_n(&r(3, 2)), Err(BoundsError::OutOfRange(_))));
    }

    #[test]
    fn lemma_bounds() {
        assert_eq!(lemma_bound(&r(1, 2)).unwrap(), r(1, 72));
        assert_eq!(lemma_bound(&r(1, 1)).unwrap(), r(1, 8));
        assert_eq!(lemma_bound(&r(1, 3)).unwrap(), r(1, 288));
    }

    #[test]
    fn corollary_bounds() {
        let c = corollary_bound(&r(1, 1)).unwrap();
        assert_eq!((c.k_max, c.q_bound), (1, r(1, 24)));
        let c = corollary_bound(&r(1, 2)).unwrap();
        assert_eq!((c.k_max, c.q_bound), (3, r(1, 192)));
        let c = corollary_bound(&r(2, 3)).unwrap();
        assert_eq!((c.k_max, c.q_bound), (2, r(1, 81)));
    }

    fn params(n: i64, d: i64, m: u64, dd: u64, e: u64) -> BoundParams {
        BoundParams::new(r(n, d), m, dd, e).unwrap()
    }

    #[test]
    fn recursion_examples() {
        let cfg = BoundsConfig::default();
        for m in 1..4 {
            assert_eq!(recursive_m_conservative(&params(1, 2, m, 5, 1), &cfg).unwrap().value, r(2, 1));
        }
        let c = recursive_m_conservative(&params(1, 1, 2, 1, 2), &cfg).unwrap();
        assert_eq!(c.value, r(96, 1));
        assert_eq!(c.trajectory[1], (r(1, 96), BigInt::from(4)));
        assert_eq!(recursive_m_conservative(&params(1, 1, 1, 1, 3), &cfg).unwrap().value, r(331_776, 1));

        let f = recursive_m_floating(&params(1, 1, 2, 1, 2), &cfg).unwrap();
        let mut cc = Consts::new().unwrap();
        assert!((float_to_f64(&f.value, &mut cc) - 96.0).abs() < 1e-30);
        assert!(f.relative_error < 1e-40);
        let f = recursive_m_floating(&params(1, 1, 1, 1, 3), &cfg).unwrap();
        assert!((float_to_f64(&f.value, &mut cc) - 331_776.0).abs() < 1e-25);
    }

    #[test]
    fn overflow_reports_magnitude() {
        let cfg = BoundsConfig { exponent_cap: 1000, ..BoundsConfig::default() };
        match recursive_m_conservative(&params(1, 100, 2, 1, 3), &cfg) {
            Err(BoundsError::Overflow { log2: _, log2_log2 }) => assert!(log2_log2.is_some()),
            other => panic!("expected overflow, got {other:?}"),
        }
        let report = recursive_m_with(&params(1, 1, 3, 1, 6), EvalMode::Conservative, &BoundsConfig::default()).unwrap();
        assert!(report.overflow && report.value.is_none());
    }

    #[test]
    fn params_validation() {
        assert!(BoundParams::new(r(1, 2), 0, 1, 1).is_err());
        assert!(BoundParams::new(r(0, 1), 1, 1, 1).is_err());
        let j: BoundParamsJson = serde_json::from_str(r#"{"delta": "1/2", "m": 2, "D": 1, "e": 1}"#).unwrap();
        assert_eq!(BoundParams::try_from(&j).unwrap(), params(1, 2, 2, 1, 1));
    }

    #[test]
    fn report_json() {
        let rep = recursive_m(&params(1, 1, 2, 1, 2), EvalMode::Conservative).unwrap();
        assert_eq!(rep.value.as_deref(), Some("96/1"));
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"mode\":\"conservative\""));
        let rep = recursive_m(&params(1, 1, 2, 1, 2), EvalMode::Floating).unwrap();
        assert!(rep.relative_error.is_some());
    }
}
