use super::poly::{ModPoly, MultiPoly};
use super::scalar::{mul_mod, pow_mod, ExactScalar, Field};
use super::AlgebraicError;

/// A rational self-map of affine `v`-space, coordinatewise `num[i] / den[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    arity: usize,
    field: Field,
    num: Vec<MultiPoly>,
    den: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(num: Vec<MultiPoly>, den: Vec<MultiPoly>) -> Result<Self, AlgebraicError> {
        let arity = num.len();
        if den.len() != arity {
            return Err(AlgebraicError::ArityMismatch { expected: arity, got: den.len() });
        }
        let field = num.first().map_or(Field::Rational, MultiPoly::field);
        for p in num.iter().chain(&den) {
            if p.vars() != arity {
                return Err(AlgebraicError::ArityMismatch { expected: arity, got: p.vars() });
            }
            if p.field() != field {
                return Err(AlgebraicError::FieldMismatch);
            }
        }
        if den.iter().any(MultiPoly::is_zero) {
            return Err(AlgebraicError::DivisionByZero);
        }
        Ok(PolyMap { arity, field, num, den })
    }

    /// A morphism: all denominators are 1.
    pub fn polynomial(num: Vec<MultiPoly>) -> Result<Self, AlgebraicError> {
        let field = num.first().map_or(Field::Rational, MultiPoly::field);
        let den = num.iter().map(|p| MultiPoly::one(p.vars(), field)).collect();
        PolyMap::new(num, den)
    }

    pub fn identity(arity: usize, field: Field) -> Self {
        let num = (0..arity).map(|i| MultiPoly::var(arity, i, field)).collect();
        PolyMap::polynomial(num).expect("identity is well formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn numerators(&self) -> &[MultiPoly] {
        &self.num
    }

    pub fn denominators(&self) -> &[MultiPoly] {
        &self.den
    }

    pub fn degree(&self) -> u64 {
        self.num.iter().chain(&self.den).map(MultiPoly::total_degree).max().unwrap_or(0)
    }

    /// Coordinates as polynomials, available when every denominator is a
    /// nonzero constant.
    pub fn polynomial_coordinates(&self) -> Result<Vec<MultiPoly>, AlgebraicError> {
        self.num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| {
                let c = d.constant_value().ok_or(AlgebraicError::RationalMap)?;
                Ok(n.scale(&c.try_inv()?))
            })
            .collect()
    }

    /// `Φ(x)`, or `None` if a denominator vanishes at `x`.
    pub fn eval(&self, x: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        self.num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| {
                let dv = d.eval(x);
                n.eval(x).try_div(&dv).ok()
            })
            .collect()
    }

    pub fn check_point(&self, x: &[ExactScalar]) -> Result<(), AlgebraicError> {
        if x.len() != self.arity {
            return Err(AlgebraicError::ArityMismatch { expected: self.arity, got: x.len() });
        }
        if x.iter().any(|c| c.field() != self.field) {
            return Err(AlgebraicError::FieldMismatch);
        }
        Ok(())
    }

    pub fn to_mod(&self, p: u64) -> Option<ModMap> {
        let num = self.num.iter().map(|q| q.to_mod(p)).collect::<Option<_>>()?;
        let den = self.den.iter().map(|q| q.to_mod(p)).collect::<Option<_>>()?;
        Some(ModMap { p, num, den })
    }
}

/// A [`PolyMap`] reduced mod `p`.
#[derive(Clone, Debug)]
pub struct ModMap {
    pub p: u64,
    num: Vec<ModPoly>,
    den: Vec<ModPoly>,
}

impl ModMap {
    pub fn eval(&self, x: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        self.num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| {
                let dv = d.eval(x);
                (dv != 0).then(|| mul_mod(n.eval(x), pow_mod(dv, p - 2, p), p))
            })
            .collect()
    }

    /// Like [`ModMap::eval`] but reports which denominators vanished, so a
    /// caller can tell a true pole from an unlucky prime.
    pub(crate) fn eval_with_denominators(&self, x: &[u64]) -> (Vec<u64>, bool) {
        let p = self.p;
        let mut ok = true;
        let out = self
            .num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| {
                let dv = d.eval(x);
                if dv == 0 {
                    ok = false;
                    0
                } else {
                    mul_mod(n.eval(x), pow_mod(dv, p - 2, p), p)
                }
            })
            .collect();
        (out, ok)
    }
}

/// Common zero locus of `generators`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineClosedSet {
    pub generators: Vec<MultiPoly>,
}

impl AffineClosedSet {
    pub fn new(generators: Vec<MultiPoly>) -> Self {
        AffineClosedSet { generators }
    }

    pub fn hypersurface(f: MultiPoly) -> Self {
        AffineClosedSet { generators: vec![f] }
    }

    pub fn contains(&self, x: &[ExactScalar]) -> bool {
        self.generators.iter().all(|g| g.eval(x).is_zero())
    }
}
