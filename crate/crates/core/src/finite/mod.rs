//! Exact dynamics on finite topological spaces.
//!
//! A finite space is encoded by its specialization preorder: `y ≤ x` means
//! `y` lies in the closure of `{x}`. Closed sets are the down-sets, open sets
//! the up-sets, and continuity of a self-map is monotonicity. Every finite
//! space is Noetherian, so each descent below terminates.

mod backward;
mod exhaustive;
mod forward;
pub mod random;
mod restrict;
mod space;

pub use backward::{backward_return_set, enumerate_backward_orbits, BackwardOrbit, BackwardOrbits};
pub use exhaustive::{
    canonical_preorders, exhaustive_verify, Certificate, PointsReport, VerifyReport,
    MAX_VERIFY_POINTS,
};
pub use forward::{
    find_infinite_ap, forward_return_set, orbit_rho, stabilize_closures, ArithmeticProgression,
    ReturnSet, Rho,
};
pub use restrict::{restrict_to_invariant_domain, RestrictedSystem};
pub use space::{
    closure, is_continuous, ContinuousSelfMap, FinitePreorder, FiniteSystem, FiniteSystemJson,
    PointSet, MAX_POINTS,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FiniteSpaceError {
    #[error("finite spaces are limited to {max} points, got {got}")]
    TooManyPoints { got: usize, max: usize },
    #[error("point {point} is outside a space of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("relation is not transitive: {a} ≤ {b} ≤ {c} but not {a} ≤ {c}")]
    NotTransitive { a: usize, b: usize, c: usize },
    #[error("map is not continuous: {lower} ≤ {upper} but f({lower}) ≰ f({upper})")]
    NotContinuous { lower: usize, upper: usize },
    #[error("map image length {got} does not match space size {size}")]
    ImageLength { got: usize, size: usize },
    #[error("domain of a partial map must be open (an up-set)")]
    DomainNotOpen,
    #[error("map must be total here")]
    PartialMap,
    #[error("target must be closed (a down-set)")]
    TargetNotClosed,
    #[error("start point {0} is outside the map's domain")]
    StartOutsideDomain(usize),
    #[error("progression {b} + {a}n is not contained in the return set")]
    APNotContained { b: u64, a: u64 },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("orbit leaves the open domain after {step} steps")]
    OrbitLeavesDomain { step: usize },
    #[error("point {0} has no coherent backward orbit")]
    NoBackwardOrbit(usize),
    #[error("backward orbit is not coherent at depth {0}")]
    IncoherentOrbit(usize),
    #[error("exhaustive verification is limited to {max} points, got {got}")]
    VerifyTooLarge { got: usize, max: usize },
    #[error("instance budget exhausted")]
    BudgetExceeded(Box<VerifyReport>),
}
