//! Integer-set machinery: observation windows, windowed densities,
//! arithmetic-progression sets, shift witnesses and decompositions.

mod apset;
mod decompose;
mod estimate;
mod generate;
mod serial;
mod window;
mod witness;

pub use apset::{exact_banach_density, APSet, Progression};
pub use decompose::{decompose, reconstruct, APDecomposition, Verdict, MIN_PROGRESSION_HITS};
pub use estimate::{windowed_density, DensityEstimate, LengthDensity};
pub use generate::{generate_apset, generate_fset, FsetTerm};
pub use serial::{density_points, DecompositionJson, DensityPoint, ProgressionJson};
pub use window::IndexWindow;
pub use witness::{
    corollary_block_size, corollary_witness, lemma1_witness, lemma_block_size,
    verify_corollary_inequalities, witness_count_bound, Witness, WitnessMode,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("window member {member} is not below horizon {horizon}")]
    MemberBeyondHorizon { member: u64, horizon: u64 },
    #[error("window members must be strictly increasing (found {prev} then {next})")]
    NotIncreasing { prev: u64, next: u64 },
    #[error("no interval lengths given")]
    EmptySweep,
    #[error("interval length must be at least 1")]
    ZeroLength,
    #[error("interval length {length} exceeds horizon {horizon}")]
    LengthExceedsHorizon { length: u64, horizon: u64 },
    #[error("density must lie in (0, 1], got {0}")]
    InvalidDensity(String),
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(String),
    #[error("window is empty")]
    EmptyWindow,
    #[error("horizon {horizon} is shorter than N² = {required}")]
    WindowTooShort { horizon: u64, required: u64 },
    #[error("window has fewer than d·H members; witness returned without a count guarantee")]
    DensityClaimFalse(Box<Witness>),
    #[error("no block of the partition contains two members")]
    NoPairedBlock,
    #[error("extracted subset has {found} elements, below the guaranteed {bound}")]
    CountBoundViolated { found: u64, bound: String },
    #[error("N must be at least 2, got {0}")]
    InvalidN(u64),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("F-set term needs a positive coefficient and exponent step, got {0}")]
    InvalidTerm(String),
    #[error("F-set value {0} is not a natural number")]
    NonIntegralValue(String),
    #[error("malformed window text: {0}")]
    Parse(String),
}
