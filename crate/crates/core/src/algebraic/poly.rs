use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{mul_mod, rational_mod, ExactScalar, Field};
use super::AlgebraicError;

/// Exponent vector, ordered graded-lexicographically (x₀ > x₁ > …).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_add(*b)).collect::<Option<_>>().map(Monomial)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: usize,
    field: Field,
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl MultiPoly {
    pub fn zero(vars: usize, field: Field) -> Self {
        MultiPoly { vars, field, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: ExactScalar) -> Self {
        let mut p = MultiPoly::zero(vars, c.field());
        p.add_term(Monomial::one(vars), c);
        p
    }

    pub fn one(vars: usize, field: Field) -> Self {
        MultiPoly::constant(vars, ExactScalar::one(field))
    }

    /// The coordinate function `x_i`.
    pub fn var(vars: usize, i: usize, field: Field) -> Self {
        assert!(i < vars, "variable index out of range");
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = MultiPoly::zero(vars, field);
        p.add_term(Monomial(e), ExactScalar::one(field));
        p
    }

    pub fn from_terms(
        vars: usize,
        field: Field,
        terms: impl IntoIterator<Item = (Vec<u32>, ExactScalar)>,
    ) -> Result<Self, AlgebraicError> {
        let mut p = MultiPoly::zero(vars, field);
        for (exps, c) in terms {
            if exps.len() != vars {
                return Err(AlgebraicError::ArityMismatch { expected: vars, got: exps.len() });
            }
            if c.field() != field {
                return Err(AlgebraicError::FieldMismatch);
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<ExactScalar> {
        match self.terms.len() {
            0 => Some(ExactScalar::zero(self.field)),
            1 => self.terms.get(&Monomial::one(self.vars)).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &ExactScalar)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.vars, self.field);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        MultiPoly { vars: self.vars, field: self.field, terms }
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            self.vars == other.vars && self.field == other.field,
            "polynomials over different rings"
        );
    }

    /// Product, or `None` when it would exceed `term_cap` terms or overflow
    /// an exponent.
    pub fn mul_capped(&self, other: &Self, term_cap: usize) -> Option<Self> {
        self.check_compatible(other);
        let mut out = MultiPoly::zero(self.vars, self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.checked_mul(mb)?, ca * cb);
            }
            if out.terms.len() > term_cap {
                return None;
            }
        }
        Some(out)
    }

    pub fn pow_capped(&self, mut e: u64, term_cap: usize) -> Option<Self> {
        let mut acc = MultiPoly::one(self.vars, self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_capped(&base, term_cap)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_capped(&base, term_cap)?;
            }
        }
        Some(acc)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_capped(e, usize::MAX).expect("exponent overflow")
    }

    pub fn eval(&self, point: &[ExactScalar]) -> ExactScalar {
        assert_eq!(point.len(), self.vars, "point arity");
        let mut acc = ExactScalar::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes `subs[i]` for `x_i`. `None` if an intermediate exceeds
    /// `term_cap` terms.
    pub fn compose_capped(&self, subs: &[MultiPoly], term_cap: usize) -> Option<MultiPoly> {
        assert_eq!(subs.len(), self.vars, "substitution arity");
        let (vars, field) = subs.first().map_or((0, self.field), |s| (s.vars, s.field));
        let mut powers: Vec<Vec<MultiPoly>> = subs.iter().map(|_| vec![MultiPoly::one(vars, field)]).collect();
        let mut out = MultiPoly::zero(vars, field);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("seeded").mul_capped(&subs[i], term_cap)?;
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul_capped(&powers[i][e as usize], term_cap)?;
                }
            }
            out = &out + &t;
            if out.terms.len() > term_cap {
                return None;
            }
        }
        Some(out)
    }

    pub fn compose(&self, subs: &[MultiPoly]) -> MultiPoly {
        self.compose_capped(subs, usize::MAX).expect("exponent overflow")
    }

    /// Normal form modulo the principal ideal `(f)`. Since `{f}` is a Gröbner
    /// basis, the result is zero exactly when `f` divides `self`.
    pub fn rem(&self, f: &MultiPoly) -> MultiPoly {
        self.rem_capped(f, usize::MAX).expect("unbounded reduction")
    }

    pub fn rem_capped(&self, f: &MultiPoly, term_cap: usize) -> Option<MultiPoly> {
        self.check_compatible(f);
        let (lm, lc) = f.leading_term().expect("division by the zero polynomial");
        let lc_inv = lc.try_inv().expect("nonzero leading coefficient");
        let mut p = self.clone();
        let mut r = MultiPoly::zero(self.vars, self.field);
        while let Some((m, c)) = p.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if lm.divides(&m) {
                let q = m.div(lm);
                let factor = &c * &lc_inv;
                for (fm, fc) in &f.terms {
                    p.add_term(fm.checked_mul(&q)?, -(&factor * fc));
                }
            } else {
                p.terms.remove(&m);
                r.terms.insert(m, c);
            }
            if p.terms.len() + r.terms.len() > term_cap {
                return None;
            }
        }
        Some(r)
    }

    /// Same polynomial over `F_p`; `None` if a coefficient's denominator
    /// vanishes mod `p`.
    pub fn to_prime_field(&self, p: u64) -> Option<MultiPoly> {
        if self.field == Field::Prime(p) {
            return Some(self.clone());
        }
        let mut out = MultiPoly::zero(self.vars, Field::Prime(p));
        for (m, c) in &self.terms {
            let value = match c {
                ExactScalar::Rational(q) => rational_mod(q, p)?,
                ExactScalar::Mod { .. } => return None,
            };
            out.add_term(m.clone(), ExactScalar::Mod { value, p });
        }
        Some(out)
    }

    /// Flat residue form for fast evaluation mod `p`.
    pub fn to_mod(&self, p: u64) -> Option<ModPoly> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let value = match c {
                    ExactScalar::Rational(q) => rational_mod(q, p)?,
                    ExactScalar::Mod { value, p: q } if *q == p => *value,
                    ExactScalar::Mod { .. } => return None,
                };
                Some((m.0.clone(), value))
            })
            .collect::<Option<_>>()?;
        Some(ModPoly { p, terms })
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
                .collect();
            match (c.is_one(), vars.is_empty()) {
                (true, false) => write!(f, "{}", vars.join("*"))?,
                (_, true) => write!(f, "{c}")?,
                (false, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        MultiPoly { vars: self.vars, field: self.field, terms }
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_capped(rhs, usize::MAX).expect("exponent overflow")
    }
}

/// Polynomial with residue coefficients mod `p`, for hot evaluation loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    pub p: u64,
    pub terms: Vec<(Vec<u32>, u64)>,
}

impl ModPoly {
    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t = mul_mod(t, super::scalar::pow_mod(x, e as u64, p), p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }
}
