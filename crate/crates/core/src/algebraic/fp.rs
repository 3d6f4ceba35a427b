//! Dense univariate polynomials over `F_p` and their roots in `F_p`.

use rand::Rng;

use super::scalar::{mul_mod, pow_mod};

/// Below this, roots are found by trying every element.
const BRUTE_FORCE_LIMIT: u64 = 4096;

/// Coefficients from the constant term up, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UniPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl UniPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        UniPoly { p, c }
    }

    pub fn constant(p: u64, v: u64) -> Self {
        UniPoly::new(p, vec![v])
    }

    /// `a + b·t`.
    pub fn linear(p: u64, a: u64, b: u64) -> Self {
        UniPoly::new(p, vec![a, b])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, t: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &v| (mul_mod(acc, t, self.p) + v) % self.p)
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0))
            .collect();
        UniPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let neg = UniPoly::new(self.p, o.c.iter().map(|&v| (self.p - v) % self.p).collect());
        self.add(&neg)
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        UniPoly::new(self.p, c)
    }

    pub fn monic(&self) -> UniPoly {
        match self.c.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = pow_mod(lc, self.p - 2, self.p);
                UniPoly::new(self.p, self.c.iter().map(|&v| mul_mod(v, inv, self.p)).collect())
            }
        }
    }

    pub fn rem(&self, m: &UniPoly) -> UniPoly {
        let m = m.monic();
        let dm = m.degree().expect("division by zero polynomial");
        let mut r = self.c.clone();
        while r.len() > dm {
            let lead = *r.last().expect("nonempty");
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (i, &mc) in m.c.iter().enumerate() {
                    let sub = mul_mod(lead, mc, self.p);
                    r[shift + i] = (r[shift + i] + self.p - sub) % self.p;
                }
            }
            r.pop();
        }
        UniPoly::new(self.p, r)
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::constant(self.p, 1).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }
}

/// Distinct roots of a nonzero polynomial in `F_p`, sorted.
pub(crate) fn roots<R: Rng>(f: &UniPoly, rng: &mut R) -> Vec<u64> {
    let p = f.p;
    let mut out = match f.degree() {
        None | Some(0) => vec![],
        Some(_) if p <= BRUTE_FORCE_LIMIT => (0..p).filter(|&t| f.eval(t) == 0).collect(),
        Some(_) => {
            let t = UniPoly::linear(p, 0, 1);
            // gcd with t^p − t keeps exactly the product of the linear factors.
            let tp = t.pow_mod(p, f);
            let g = f.gcd(&tp.sub(&t));
            let mut acc = Vec::new();
            split(&g, rng, &mut acc);
            acc
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Equal-degree splitting of a squarefree product of linear factors.
fn split<R: Rng>(g: &UniPoly, rng: &mut R, out: &mut Vec<u64>) {
    let p = g.p;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let m = g.monic();
            out.push((p - m.c[0]) % p);
        }
        Some(_) => loop {
            let a = rng.gen_range(0..p);
            let h = UniPoly::linear(p, a, 1).pow_mod((p - 1) / 2, g);
            let d = g.gcd(&h.sub(&UniPoly::constant(p, 1)));
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) < g.degree() {
                let rest = quotient(g, &d);
                split(&d, rng, out);
                split(&rest, rng, out);
                return;
            }
        },
    }
}

fn quotient(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let b = b.monic();
    let db = b.degree().expect("nonzero divisor");
    let p = a.p;
    let mut r = a.c.clone();
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - db;
        q[shift] = lead;
        for (i, &bc) in b.c.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(lead, bc, p)) % p;
        }
        r.pop();
    }
    UniPoly::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn from_roots(p: u64, rs: &[u64]) -> UniPoly {
        rs.iter().fold(UniPoly::constant(p, 1), |acc, &r| acc.mul(&UniPoly::linear(p, p - r, 1)))
    }

    #[test]
    fn large_prime_roots() {
        let p = 2_147_483_647;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (t − 3)(t − 10⁹)²(t² + 1): t² + 1 is irreducible since p ≡ 3 mod 4.
        let f = from_roots(p, &[3, 1_000_000_000, 1_000_000_000]).mul(&UniPoly::new(p, vec![1, 0, 1]));
        assert_eq!(roots(&f, &mut rng), vec![3, 1_000_000_000]);
    }

    #[test]
    fn small_prime_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = from_roots(7, &[1, 5]);
        assert_eq!(roots(&f, &mut rng), vec![1, 5]);
        assert!(roots(&UniPoly::constant(7, 3), &mut rng).is_empty());
    }

    #[test]
    fn remainder_and_gcd() {
        let p = 101;
        let a = from_roots(p, &[1, 2, 3]);
        let b = from_roots(p, &[2, 3, 4]);
        assert_eq!(a.gcd(&b), from_roots(p, &[2, 3]));
        assert!(a.rem(&from_roots(p, &[1, 3])).is_zero());
        assert_eq!(quotient(&a, &from_roots(p, &[1, 3])), from_roots(p, &[2]));
    }
}
