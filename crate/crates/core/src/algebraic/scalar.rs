use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::AlgebraicError;

/// Largest admissible prime modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, AlgebraicError> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(AlgebraicError::InvalidPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Rational(BigRational),
    Mod { value: u64, p: u64 },
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Residue of a rational modulo `p`, or `None` when `p` divides the denominator.
pub(crate) fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = q.numer().mod_floor(&pb).to_u64()?;
    let den = q.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    Some(mul_mod(num, pow_mod(den, p - 2, p), p))
}

impl ExactScalar {
    pub fn zero(field: Field) -> Self {
        match field {
            Field::Rational => ExactScalar::Rational(BigRational::zero()),
            Field::Prime(p) => ExactScalar::Mod { value: 0, p },
        }
    }

    pub fn one(field: Field) -> Self {
        match field {
            Field::Rational => ExactScalar::Rational(BigRational::one()),
            Field::Prime(p) => ExactScalar::Mod { value: 1 % p, p },
        }
    }

    pub fn from_i64(field: Field, v: i64) -> Self {
        ExactScalar::from_rational(field, &BigRational::from_integer(v.into()))
            .expect("integers reduce modulo any prime")
    }

    /// Embeds a rational into `field`; fails when the denominator vanishes mod p.
    pub fn from_rational(field: Field, q: &BigRational) -> Result<Self, AlgebraicError> {
        match field {
            Field::Rational => Ok(ExactScalar::Rational(q.clone())),
            Field::Prime(p) => rational_mod(q, p)
                .map(|value| ExactScalar::Mod { value, p })
                .ok_or(AlgebraicError::DivisionByZero),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            ExactScalar::Rational(_) => Field::Rational,
            ExactScalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_zero(),
            ExactScalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_one(),
            ExactScalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(q) => Some(q),
            ExactScalar::Mod { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match self {
            ExactScalar::Rational(_) => None,
            ExactScalar::Mod { value, .. } => Some(*value),
        }
    }

    /// Size of the numerator plus denominator in bits; zero for residues.
    pub fn bits(&self) -> u64 {
        match self {
            ExactScalar::Rational(q) => q.numer().bits() + q.denom().bits(),
            ExactScalar::Mod { .. } => 0,
        }
    }

    pub fn try_inv(&self) -> Result<Self, AlgebraicError> {
        if self.is_zero() {
            return Err(AlgebraicError::DivisionByZero);
        }
        Ok(match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(q.recip()),
            ExactScalar::Mod { value, p } => ExactScalar::Mod { value: pow_mod(*value, p - 2, *p), p: *p },
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgebraicError> {
        Ok(self * &other.try_inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = ExactScalar::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// "n/d" for rationals, the residue for prime fields.
    pub fn to_exact_string(&self) -> String {
        match self {
            ExactScalar::Rational(q) => crate::format_rational(q),
            ExactScalar::Mod { value, .. } => value.to_string(),
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            ExactScalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            ExactScalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

fn mismatch(a: &ExactScalar, b: &ExactScalar) -> ! {
    panic!("field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        match (self, rhs) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => ExactScalar::Rational(a + b),
            (ExactScalar::Mod { value: a, p }, ExactScalar::Mod { value: b, p: q }) if p == q => {
                ExactScalar::Mod { value: (a + b) % p, p: *p }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        match (self, rhs) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => ExactScalar::Rational(a * b),
            (ExactScalar::Mod { value: a, p }, ExactScalar::Mod { value: b, p: q }) if p == q => {
                ExactScalar::Mod { value: mul_mod(*a, *b, *p), p: *p }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Rational(a) => ExactScalar::Rational(-a),
            ExactScalar::Mod { value, p } => ExactScalar::Mod { value: (p - value) % p, p: *p },
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}
