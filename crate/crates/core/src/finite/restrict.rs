use super::{ContinuousSelfMap, FinitePreorder, FiniteSpaceError, FiniteSystem, PointSet};

/// The subsystem on the largest forward-invariant subset `Z` of the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedSystem {
    pub system: FiniteSystem,
    /// `embedding[i]` is the original point behind subsystem point `i`.
    pub embedding: Vec<usize>,
    /// `Z` as a subset of the original space.
    pub invariant: PointSet,
}

/// Restricts a partial map on an open `U` to `Z = ⋂ₙ Φ⁻ⁿ(U)`, computed as
/// the fixpoint of `Z ← Z ∩ Φ⁻¹(Z)` from `Z = U`. The target becomes
/// `target ∩ Z` in the subspace topology.
pub fn restrict_to_invariant_domain(
    space: &FinitePreorder,
    map: &ContinuousSelfMap,
    start: usize,
    target: PointSet,
) -> Result<RestrictedSystem, FiniteSpaceError> {
    let n = space.size();
    if start >= n {
        return Err(FiniteSpaceError::PointOutOfRange { point: start, size: n });
    }
    if !space.is_closed(target) {
        return Err(FiniteSpaceError::TargetNotClosed);
    }
    // After i rounds, z holds the points whose first i images stay in U.
    let mut z = map.domain();
    let mut rounds = 0;
    let mut left_at = (!z.contains(start)).then_some(0);
    loop {
        let next = z.intersection(map.preimage(z));
        if next == z {
            break;
        }
        z = next;
        rounds += 1;
        if left_at.is_none() && !z.contains(start) {
            left_at = Some(rounds);
        }
    }
    if let Some(step) = left_at {
        return Err(FiniteSpaceError::OrbitLeavesDomain { step });
    }
    let embedding: Vec<usize> = z.iter().collect();
    let mut index = vec![usize::MAX; n];
    for (i, &p) in embedding.iter().enumerate() {
        index[p] = i;
    }
    let sub = space.restrict(z);
    let image: Vec<usize> = embedding.iter().map(|&p| index[map.at(p)]).collect();
    let sub_map = ContinuousSelfMap::total(&sub, image)?;
    let sub_target = PointSet::from_points(
        embedding.iter().enumerate().filter(|&(_, &p)| target.contains(p)).map(|(i, _)| i),
    );
    let system = FiniteSystem::new(sub, sub_map, index[start], sub_target)?;
    Ok(RestrictedSystem { system, embedding, invariant: z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_inside_domain() {
        let space = FinitePreorder::discrete(3);
        let map = ContinuousSelfMap::partial(&space, vec![1, 0, 0], PointSet::from_points([0, 1])).unwrap();
        let r = restrict_to_invariant_domain(&space, &map, 0, PointSet::singleton(0)).unwrap();
        assert_eq!(r.invariant, PointSet::from_points([0, 1]));
        assert_eq!(r.embedding, vec![0, 1]);
        assert_eq!(r.system.map.image(), &[1, 0]);
    }

    #[test]
    fn orbit_exits_domain() {
        let space = FinitePreorder::discrete(3);
        let map = ContinuousSelfMap::partial(&space, vec![1, 2, 0], PointSet::from_points([0, 1])).unwrap();
        let err = restrict_to_invariant_domain(&space, &map, 0, PointSet::EMPTY).unwrap_err();
        // 0 → 1 → 2, and 2 ∉ U.
        assert!(matches!(err, FiniteSpaceError::OrbitLeavesDomain { step: 2 }));
    }

    #[test]
    fn whole_space_is_invariant() {
        let space = FinitePreorder::new(2, &[(1, 0)]).unwrap();
        let map = ContinuousSelfMap::total(&space, vec![0, 1]).unwrap();
        let r = restrict_to_invariant_domain(&space, &map, 1, PointSet::singleton(1)).unwrap();
        assert_eq!(r.invariant, space.all());
        assert_eq!(r.system.space, space);
    }
}
