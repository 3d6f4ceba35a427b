use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ContinuousSelfMap, FiniteSpaceError, FiniteSystem, PointSet};
use crate::density::{lemma1_witness, APDecomposition, APSet, IndexWindow};

/// Rho shape of an orbit: `points[n] = Φⁿ(x)` for `n < tail + cycle`, and
/// `Φ^(tail + cycle)(x) = Φ^tail(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rho {
    pub points: Vec<usize>,
    pub tail: usize,
    pub cycle: usize,
}

impl Rho {
    pub fn point(&self, n: u64) -> usize {
        let n = n as usize;
        if n < self.tail {
            self.points[n]
        } else {
            self.points[self.tail + (n - self.tail) % self.cycle]
        }
    }

    /// Points visited infinitely often.
    pub fn cycle_points(&self) -> &[usize] {
        &self.points[self.tail..]
    }

    /// Exact return set `{n : Φⁿ(x) ∈ target}` in canonical form.
    pub fn return_set(&self, target: PointSet) -> APSet {
        let hits: Vec<bool> = self.points.iter().map(|&p| target.contains(p)).collect();
        APSet::from_lasso(&hits[..self.tail], &hits[self.tail..])
    }
}

/// Orbit of `start` up to its first repeated point.
pub fn orbit_rho(map: &ContinuousSelfMap, start: usize) -> Rho {
    let n = map.image().len();
    let mut seen = vec![usize::MAX; n];
    let mut points = Vec::new();
    let mut p = start;
    while seen[p] == usize::MAX {
        seen[p] = points.len();
        points.push(p);
        p = map.at(p);
    }
    let tail = seen[p];
    let cycle = points.len() - tail;
    Rho { points, tail, cycle }
}

/// A return-set window together with its decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnSet {
    pub window: IndexWindow,
    pub decomposition: APDecomposition,
}

impl ReturnSet {
    pub(crate) fn exact(structured: APSet, horizon: u64) -> Self {
        let window = structured.enumerate_below(horizon);
        ReturnSet { window, decomposition: APDecomposition::exact(structured, horizon) }
    }
}

/// The return set below `horizon` plus its decomposition, which is exact for
/// all `n`: progressions of period dividing the cycle length and a finite
/// exceptional part below `tail + cycle`.
pub fn forward_return_set(sys: &FiniteSystem, horizon: u64) -> ReturnSet {
    let rho = orbit_rho(&sys.map, sys.start);
    ReturnSet::exact(rho.return_set(sys.target), horizon)
}

/// `{first + step·n : n ≥ 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArithmeticProgression {
    pub first: u64,
    pub step: u64,
}

/// Closed-set descent producing an infinite progression inside the return
/// set, or `None` exactly when the return set is finite.
///
/// `W` starts as the closure of the return points on the orbit's cycle. Each
/// round takes the shift `k` of a witness extracted from `T_W = {n : Φⁿ(x) ∈ W}`
/// (observed on the periodic part) and either stops, when `Φᵏ(W) ⊆ W`, or
/// replaces `W` by the strictly smaller closed set `W ∩ Φ⁻ᵏ(W)`.
pub fn find_infinite_ap(sys: &FiniteSystem) -> Option<ArithmeticProgression> {
    let rho = orbit_rho(&sys.map, sys.start);
    let space = &sys.space;
    let cycle = rho.cycle_points();
    let c = cycle.len() as u64;
    let returns = PointSet::from_points(cycle.iter().copied().filter(|&p| sys.target.contains(p)));
    let mut w = space.closure(returns);
    if w.is_empty() {
        return None;
    }
    loop {
        let r = cycle.iter().filter(|&&p| w.contains(p)).count() as u64;
        debug_assert!(r > 0, "W keeps a cycle point");
        let k = descent_shift(&rho, w, r, c);
        let pushed = (0..k).fold(w, |acc, _| sys.map.image_of(acc));
        if pushed.is_subset(w) {
            let first = (0..(rho.tail + rho.cycle) as u64)
                .find(|&n| w.contains(rho.point(n)))
                .expect("W meets the cycle");
            return Some(ArithmeticProgression { first, step: k });
        }
        let next = w.intersection(sys.map.preimage_iter(w, k));
        debug_assert!(next != w);
        w = next;
    }
}

/// Shift from a witness on `[tail, tail + H)` of `T_W`, whose density there
/// is exactly `r / c`.
fn descent_shift(rho: &Rho, w: PointSet, r: u64, c: u64) -> u64 {
    let d = BigRational::new(BigInt::from(r), BigInt::from(c));
    let block = c / r + 1;
    let horizon = 4 * c * block * block;
    let cycle = rho.cycle_points();
    let window = IndexWindow::from_predicate(horizon, |n| w.contains(cycle[(n % c) as usize]));
    match lemma1_witness(&window, &d) {
        Ok(wit) => wit.k,
        // Unreachable for purely periodic windows of this length; the cycle
        // length always yields a valid descent step.
        Err(_) => c,
    }
}

/// Stabilization of `C_i = closure{Φ^(a·n+b)(x) : n ≥ i}`. Returns `(C_m, m)`
/// for the first `m` with `C_m = C_(m+1)`.
pub fn stabilize_closures(
    sys: &FiniteSystem,
    a: u64,
    b: u64,
) -> Result<(PointSet, usize), FiniteSpaceError> {
    if a == 0 {
        return Err(FiniteSpaceError::ZeroModulus);
    }
    let start = sys.map.iterate(sys.start, b);
    // Orbit of Φ^b(x) under h = Φ^a.
    let n = sys.space.size();
    let mut seen = vec![usize::MAX; n];
    let mut ys = Vec::new();
    let mut p = start;
    while seen[p] == usize::MAX {
        seen[p] = ys.len();
        ys.push(p);
        p = sys.map.iterate(p, a);
    }
    if ys.iter().any(|&y| !sys.target.contains(y)) {
        return Err(FiniteSpaceError::APNotContained { b, a });
    }
    let tail = seen[p];
    let chain = |i: usize| -> PointSet {
        let from = i.min(tail);
        sys.space.closure(PointSet::from_points(ys[from..].iter().copied()))
    };
    let mut m = 0;
    while chain(m) != chain(m + 1) {
        m += 1;
    }
    Ok((chain(m), m))
}
