use super::{ContinuousSelfMap, FiniteSpaceError, PointSet, ReturnSet};
use crate::density::APSet;

/// A coherent backward orbit `x₀ = x, x₋₁, x₋₂, …` in lasso form: the
/// preperiod lists `x₀ … x₋(t−1)`, after which `x₋(t+j)` runs through
/// `cycle` periodically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BackwardOrbit {
    pub preperiod: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl BackwardOrbit {
    /// `x₋ₙ`.
    pub fn point(&self, n: u64) -> usize {
        let n = n as usize;
        let t = self.preperiod.len();
        if n < t {
            self.preperiod[n]
        } else {
            self.cycle[(n - t) % self.cycle.len()]
        }
    }

    /// Checks `f(x₋(n+1)) = x₋ₙ` on every consecutive pair, through the
    /// lasso joint and once around the cycle.
    pub fn check_coherent(&self, map: &ContinuousSelfMap) -> Result<(), FiniteSpaceError> {
        if self.cycle.is_empty() {
            return Err(FiniteSpaceError::IncoherentOrbit(0));
        }
        let span = (self.preperiod.len() + self.cycle.len()) as u64;
        for n in 0..span {
            if map.apply(self.point(n + 1)) != Some(self.point(n)) {
                return Err(FiniteSpaceError::IncoherentOrbit(n as usize));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardOrbits {
    pub orbits: Vec<BackwardOrbit>,
    pub truncated: bool,
}

/// All coherent backward orbits of `x`, up to `max_count`.
///
/// Walks the preimage tree depth first, pruned to points that have preimage
/// chains of every length (the eventual image `⋂ₖ fᵏ(X)`); a branch closes
/// into a lasso at its first repeated point.
pub fn enumerate_backward_orbits(
    map: &ContinuousSelfMap,
    x: usize,
    max_count: usize,
) -> Result<BackwardOrbits, FiniteSpaceError> {
    if !map.is_total() {
        return Err(FiniteSpaceError::PartialMap);
    }
    let n = map.image().len();
    if x >= n {
        return Err(FiniteSpaceError::PointOutOfRange { point: x, size: n });
    }
    let mut alive = PointSet::full(n);
    loop {
        let next = map.image_of(alive);
        if next == alive {
            break;
        }
        alive = next;
    }
    let mut found = Vec::new();
    let mut truncated = false;
    if alive.contains(x) {
        let mut path = vec![x];
        walk(map, alive, &mut path, max_count, &mut found, &mut truncated);
    }
    if found.is_empty() {
        return Err(FiniteSpaceError::NoBackwardOrbit(x));
    }
    Ok(BackwardOrbits { orbits: found, truncated })
}

fn walk(
    map: &ContinuousSelfMap,
    alive: PointSet,
    path: &mut Vec<usize>,
    max_count: usize,
    found: &mut Vec<BackwardOrbit>,
    truncated: &mut bool,
) {
    let head = *path.last().expect("path starts at x");
    for q in map.preimage(PointSet::singleton(head)).intersection(alive).iter() {
        if *truncated {
            return;
        }
        if let Some(i) = path.iter().position(|&p| p == q) {
            let orbit = BackwardOrbit { preperiod: path[..i].to_vec(), cycle: path[i..].to_vec() };
            if orbit.check_coherent(map).is_ok() && !found.contains(&orbit) {
                if found.len() == max_count {
                    *truncated = true;
                    return;
                }
                found.push(orbit);
            }
        } else {
            path.push(q);
            walk(map, alive, path, max_count, found, truncated);
            path.pop();
        }
    }
}

/// Exact return set `{n : x₋ₙ ∈ target}` of a lasso.
pub fn backward_return_set(orbit: &BackwardOrbit, target: PointSet, horizon: u64) -> ReturnSet {
    let tail: Vec<bool> = orbit.preperiod.iter().map(|&p| target.contains(p)).collect();
    let cycle: Vec<bool> = orbit.cycle.iter().map(|&p| target.contains(p)).collect();
    ReturnSet::exact(APSet::from_lasso(&tail, &cycle), horizon)
}
