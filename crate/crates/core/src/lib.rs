//! Return sets `S = {n : Φⁿ(x) ∈ Y}` of discrete dynamical systems.
//!
//! The crate is split along the objects it works with:
//!
//! * [`density`]: finite windows of integer sets, windowed Banach-density
//!   estimates, arithmetic-progression sets, the shift/subset witness
//!   extraction and the progression-plus-residual decomposition.
//! * [`finite`]: exact dynamics on finite topological spaces
//!   (specialization preorders), including the closed-set descent, closure
//!   chains, invariant domains of partial maps, backward orbits and an
//!   exhaustive verifier over all small spaces.
//! * [`algebraic`]: exact orbits of polynomial and rational maps over `ℚ`
//!   and prime fields, return sets against polynomially defined closed sets
//!   and invariance of plane curves.
//! * [`bounds`]: exact evaluation of the quantitative constants, including
//!   the recursive progression-ratio bound.

pub mod algebraic;
pub mod bounds;
pub mod density;
pub mod finite;

pub use num_rational::BigRational;

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Formats a rational as `"p/q"` (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
