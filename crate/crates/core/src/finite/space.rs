use serde::{Deserialize, Serialize};

use super::FiniteSpaceError;

/// Finite spaces are represented with one bit per point.
pub const MAX_POINTS: usize = 64;

/// A set of points of a finite space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        PointSet(1 << x)
    }

    pub fn from_points(points: impl IntoIterator<Item = usize>) -> Self {
        PointSet(points.into_iter().fold(0, |acc, p| acc | (1 << p)))
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1 << x;
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

/// Specialization preorder of a finite space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePreorder {
    /// `down[x] = {y : y ≤ x}`, the closure of `{x}`.
    down: Vec<PointSet>,
    /// `up[x] = {z : x ≤ z}`, the smallest open set containing `x`.
    up: Vec<PointSet>,
}

impl FinitePreorder {
    /// Builds the preorder from `(y, x)` pairs meaning `y ≤ x`. Reflexivity
    /// is implied; transitivity is required and checked.
    pub fn new(n: usize, leq: &[(usize, usize)]) -> Result<Self, FiniteSpaceError> {
        let down = Self::raw_down(n, leq)?;
        for x in 0..n {
            for y in down[x].iter() {
                if !down[y].is_subset(down[x]) {
                    let z = down[y].difference(down[x]).iter().next().unwrap_or(y);
                    return Err(FiniteSpaceError::NotTransitive { a: z, b: y, c: x });
                }
            }
        }
        Ok(Self::from_down(down))
    }

    /// Reflexive-transitive closure of the given `(y, x)` pairs.
    pub fn generated_by(n: usize, leq: &[(usize, usize)]) -> Result<Self, FiniteSpaceError> {
        let mut down = Self::raw_down(n, leq)?;
        loop {
            let mut changed = false;
            for x in 0..n {
                let grown = down[x].iter().fold(down[x], |acc, y| acc.union(down[y]));
                if grown != down[x] {
                    down[x] = grown;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(Self::from_down(down))
    }

    /// Equality preorder: every subset is both open and closed.
    pub fn discrete(n: usize) -> Self {
        Self::from_down((0..n).map(PointSet::singleton).collect())
    }

    fn raw_down(n: usize, leq: &[(usize, usize)]) -> Result<Vec<PointSet>, FiniteSpaceError> {
        if n > MAX_POINTS {
            return Err(FiniteSpaceError::TooManyPoints { got: n, max: MAX_POINTS });
        }
        let mut down: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for &(y, x) in leq {
            for p in [y, x] {
                if p >= n {
                    return Err(FiniteSpaceError::PointOutOfRange { point: p, size: n });
                }
            }
            down[x].insert(y);
        }
        Ok(down)
    }

    /// From a transitively closed table of down-sets.
    pub(crate) fn from_down(down: Vec<PointSet>) -> Self {
        let n = down.len();
        let mut up = vec![PointSet::EMPTY; n];
        for (x, d) in down.iter().enumerate() {
            for y in d.iter() {
                up[y].insert(x);
            }
        }
        Self { down, up }
    }

    pub fn size(&self) -> usize {
        self.down.len()
    }

    pub fn all(&self) -> PointSet {
        PointSet::full(self.size())
    }

    pub fn leq(&self, y: usize, x: usize) -> bool {
        self.down[x].contains(y)
    }

    pub fn down_of(&self, x: usize) -> PointSet {
        self.down[x]
    }

    pub fn up_of(&self, x: usize) -> PointSet {
        self.up[x]
    }

    pub fn closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        self.closure(s) == s
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        s.iter().all(|x| self.up[x].is_subset(s))
    }

    /// Every closed subset, in increasing bit order.
    pub fn closed_sets(&self) -> Vec<PointSet> {
        let n = self.size();
        (0..1u64 << n).map(PointSet).filter(|&s| self.is_closed(s)).collect()
    }

    pub fn open_sets(&self) -> Vec<PointSet> {
        let all = self.all();
        self.closed_sets().into_iter().map(|c| all.difference(c)).collect()
    }

    /// `(y, x)` pairs with `y ≤ x`, `y ≠ x`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size())
            .flat_map(|x| self.down[x].iter().filter(move |&y| y != x).map(move |y| (y, x)))
            .collect()
    }

    /// The subspace preorder on `points` (re-indexed in increasing order).
    pub fn restrict(&self, points: PointSet) -> FinitePreorder {
        let index: Vec<usize> = points.iter().collect();
        let down = index
            .iter()
            .map(|&x| {
                PointSet::from_points(
                    index.iter().enumerate().filter(|&(_, &y)| self.leq(y, x)).map(|(i, _)| i),
                )
            })
            .collect();
        FinitePreorder::from_down(down)
    }
}

/// Downward closure `{y : ∃x ∈ subset, y ≤ x}`.
pub fn closure(space: &FinitePreorder, subset: PointSet) -> PointSet {
    space.closure(subset)
}

/// Whether `f` is monotone for the specialization preorder, which on a
/// finite space is the same as continuity.
pub fn is_continuous(space: &FinitePreorder, f: &[usize]) -> bool {
    monotone_violation(space, f, space.all()).is_none()
}

fn monotone_violation(
    space: &FinitePreorder,
    f: &[usize],
    domain: PointSet,
) -> Option<(usize, usize)> {
    for x in domain.iter() {
        for y in space.down_of(x).intersection(domain).iter() {
            if !space.leq(f[y], f[x]) {
                return Some((y, x));
            }
        }
    }
    None
}

/// A continuous map, total or defined on an open domain `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuousSelfMap {
    image: Vec<usize>,
    domain: PointSet,
    total: bool,
}

impl ContinuousSelfMap {
    pub fn total(space: &FinitePreorder, image: Vec<usize>) -> Result<Self, FiniteSpaceError> {
        Self::partial(space, image, space.all())
    }

    /// Entries of `image` outside `domain` are ignored.
    pub fn partial(
        space: &FinitePreorder,
        image: Vec<usize>,
        domain: PointSet,
    ) -> Result<Self, FiniteSpaceError> {
        let n = space.size();
        if image.len() != n {
            return Err(FiniteSpaceError::ImageLength { got: image.len(), size: n });
        }
        if !domain.is_subset(space.all()) || !space.is_open(domain) {
            return Err(FiniteSpaceError::DomainNotOpen);
        }
        for x in domain.iter() {
            if image[x] >= n {
                return Err(FiniteSpaceError::PointOutOfRange { point: image[x], size: n });
            }
        }
        if let Some((lower, upper)) = monotone_violation(space, &image, domain) {
            return Err(FiniteSpaceError::NotContinuous { lower, upper });
        }
        Ok(Self { image, domain, total: domain == space.all() })
    }

    pub fn is_total(&self) -> bool {
        self.total
    }

    pub fn domain(&self) -> PointSet {
        self.domain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.domain.contains(x).then(|| self.image[x])
    }

    /// `x ↦ f(x)` for a point known to be in the domain.
    pub fn at(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn image_of(&self, s: PointSet) -> PointSet {
        PointSet::from_points(s.intersection(self.domain).iter().map(|x| self.image[x]))
    }

    /// `f⁻¹(s)`, restricted to the domain.
    pub fn preimage(&self, s: PointSet) -> PointSet {
        PointSet::from_points(self.domain.iter().filter(|&x| s.contains(self.image[x])))
    }

    pub fn preimage_iter(&self, s: PointSet, times: u64) -> PointSet {
        (0..times).fold(s, |acc, _| self.preimage(acc))
    }

    /// `f^k(x)` for a total map.
    pub fn iterate(&self, x: usize, k: u64) -> usize {
        (0..k).fold(x, |p, _| self.image[p])
    }
}

/// A finite space, a total continuous self-map, a start point and a closed
/// target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem {
    pub space: FinitePreorder,
    pub map: ContinuousSelfMap,
    pub start: usize,
    pub target: PointSet,
}

impl FiniteSystem {
    pub fn new(
        space: FinitePreorder,
        map: ContinuousSelfMap,
        start: usize,
        target: PointSet,
    ) -> Result<Self, FiniteSpaceError> {
        if !map.is_total() {
            return Err(FiniteSpaceError::PartialMap);
        }
        if start >= space.size() {
            return Err(FiniteSpaceError::PointOutOfRange { point: start, size: space.size() });
        }
        if !target.is_subset(space.all()) || !space.is_closed(target) {
            return Err(FiniteSpaceError::TargetNotClosed);
        }
        Ok(Self { space, map, start, target })
    }
}

/// Wire form: `{"n", "leq": [[y, x], …], "map", "domain"?, "start", "target"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSystemJson {
    pub n: usize,
    pub leq: Vec<[usize; 2]>,
    pub map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<usize>>,
    pub start: usize,
    pub target: Vec<usize>,
}

impl FiniteSystemJson {
    pub fn space(&self) -> Result<FinitePreorder, FiniteSpaceError> {
        let pairs: Vec<(usize, usize)> = self.leq.iter().map(|&[y, x]| (y, x)).collect();
        FinitePreorder::new(self.n, &pairs)
    }

    pub fn map(&self, space: &FinitePreorder) -> Result<ContinuousSelfMap, FiniteSpaceError> {
        match &self.domain {
            None => ContinuousSelfMap::total(space, self.map.clone()),
            Some(d) => {
                if let Some(&p) = d.iter().find(|&&p| p >= self.n) {
                    return Err(FiniteSpaceError::PointOutOfRange { point: p, size: self.n });
                }
                ContinuousSelfMap::partial(space, self.map.clone(), PointSet::from_points(d.iter().copied()))
            }
        }
    }

    pub fn target_set(&self) -> Result<PointSet, FiniteSpaceError> {
        if let Some(&p) = self.target.iter().find(|&&p| p >= self.n) {
            return Err(FiniteSpaceError::PointOutOfRange { point: p, size: self.n });
        }
        Ok(PointSet::from_points(self.target.iter().copied()))
    }

    /// The total-map system; partial maps go through
    /// [`super::restrict_to_invariant_domain`] instead.
    pub fn system(&self) -> Result<FiniteSystem, FiniteSpaceError> {
        let space = self.space()?;
        let map = self.map(&space)?;
        let target = self.target_set()?;
        FiniteSystem::new(space, map, self.start, target)
    }

    pub fn from_system(sys: &FiniteSystem) -> Self {
        FiniteSystemJson {
            n: sys.space.size(),
            leq: sys.space.strict_pairs().into_iter().map(|(y, x)| [y, x]).collect(),
            map: sys.map.image().to_vec(),
            domain: None,
            start: sys.start,
            target: sys.target.iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> FinitePreorder {
        // b = 1 ≤ a = 0
        FinitePreorder::new(2, &[(1, 0)]).unwrap()
    }

    #[test]
    fn closure_examples() {
        let d = FinitePreorder::discrete(3);
        assert_eq!(closure(&d, PointSet::singleton(0)), PointSet::singleton(0));
        let s = sierpinski();
        assert_eq!(closure(&s, PointSet::singleton(0)), PointSet::from_points([0, 1]));
        assert_eq!(closure(&s, PointSet::EMPTY), PointSet::EMPTY);
    }

    #[test]
    fn continuity_examples() {
        let s = sierpinski();
        assert!(is_continuous(&s, &[0, 1]));
        assert!(!is_continuous(&s, &[1, 0]));
        let d = FinitePreorder::discrete(3);
        assert!(is_continuous(&d, &[2, 0, 0]));
        assert!(matches!(
            ContinuousSelfMap::total(&s, vec![1, 0]),
            Err(FiniteSpaceError::NotContinuous { lower: 1, upper: 0 })
        ));
    }

    #[test]
    fn rejects_non_transitive() {
        // 2 ≤ 1 ≤ 0 without 2 ≤ 0
        assert!(matches!(
            FinitePreorder::new(3, &[(1, 0), (2, 1)]),
            Err(FiniteSpaceError::NotTransitive { .. })
        ));
        let p = FinitePreorder::generated_by(3, &[(1, 0), (2, 1)]).unwrap();
        assert!(p.leq(2, 0));
    }

    #[test]
    fn open_and_closed_sets() {
        let s = sierpinski();
        assert_eq!(s.closed_sets(), vec![PointSet(0), PointSet(0b10), PointSet(0b11)]);
        assert!(s.is_open(PointSet::singleton(0)));
        assert!(!s.is_open(PointSet::singleton(1)));
        assert!(ContinuousSelfMap::partial(&s, vec![0, 0], PointSet::singleton(1)).is_err());
    }

    #[test]
    fn system_validation() {
        let s = sierpinski();
        let id = ContinuousSelfMap::total(&s, vec![0, 1]).unwrap();
        assert!(matches!(
            FiniteSystem::new(s.clone(), id.clone(), 0, PointSet::singleton(0)),
            Err(FiniteSpaceError::TargetNotClosed)
        ));
        let sys = FiniteSystem::new(s, id, 0, PointSet::singleton(1)).unwrap();
        let json = FiniteSystemJson::from_system(&sys);
        assert_eq!(serde_json::to_string(&json).unwrap(), r#"{"n":2,"leq":[[1,0]],"map":[0,1],"start":0,"target":[1]}"#);
        assert_eq!(json.system().unwrap(), sys);
    }

    #[test]
    fn subspace() {
        let chain = FinitePreorder::generated_by(3, &[(1, 0), (2, 1)]).unwrap();
        let sub = chain.restrict(PointSet::from_points([0, 2]));
        assert!(sub.leq(1, 0));
        assert!(!sub.leq(0, 1));
    }
}
