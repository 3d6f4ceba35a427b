//! Orbits of polynomial and rational self-maps of affine space over ℚ and
//! prime fields, their return sets to polynomially defined closed sets, and
//! invariance of plane curves under iterates.

mod curve;
mod fp;
mod json;
mod map;
mod orbit;
mod poly;
mod scalar;

pub use curve::{
    curve_invariance_check, curve_invariance_check_with, curve_theorem_analyze, curve_theorem_analyze_with,
    doubling_lengths, find_window_progression, iterate_symbolic, sample_curve_invariance, shift_candidates,
    CurveAnalysis, Invariance, InvarianceConfig, SAMPLING_PRIME,
};
pub use json::{AlgebraicSystem, CoordJson, FieldJson, MapJson, PolyJson, SystemJson, TermJson};
pub use map::{AffineClosedSet, ModMap, PolyMap};
pub use orbit::{
    detect_cycle, finite_field_return_set, iterate_orbit, return_set, return_set_with, FiniteFieldReturnSet,
    OrbitConfig, CYCLE_STEP_LIMIT,
};
pub use poly::{ModPoly, Monomial, MultiPoly};
pub use scalar::{ExactScalar, Field, MAX_PRIME};

use crate::density::DensityError;

#[derive(Debug, thiserror::Error)]
pub enum AlgebraicError {
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u64),
    #[error("operation needs a prime field")]
    NotPrimeField,
    #[error("map has non-constant denominators")]
    RationalMap,
    #[error("orbit leaves the domain of definition at step {step}")]
    DomainError { step: u64 },
    #[error("membership at step {step} cannot be certified")]
    Undetermined { step: u64 },
    #[error("no cycle found within {steps} steps")]
    CycleNotFound { steps: u64 },
    #[error("symbolic composition exceeds the cap at iterate {step}")]
    DegreeOverflow { step: u64 },
    #[error("curve equation is the zero polynomial")]
    ZeroCurve,
    #[error("shift must be positive")]
    ZeroShift,
    #[error("coefficients do not reduce modulo the sampling prime {0}")]
    BadSamplingPrime(u64),
    #[error("start point is preperiodic: step {repeat} repeats step {first}")]
    PreperiodicPoint { first: u64, repeat: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Density(#[from] DensityError),
}
