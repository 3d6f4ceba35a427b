//! Seeded generators of random finite spaces and continuous maps, used by
//! the property and acceptance suites.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ContinuousSelfMap, FinitePreorder, FiniteSystem, PointSet};

/// Transitive closure of random pairs, each present with probability `p`.
pub fn preorder<R: Rng>(rng: &mut R, n: usize, p: f64) -> FinitePreorder {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|y| (0..n).map(move |x| (y, x)))
        .filter(|&(y, x)| y != x)
        .filter(|_| rng.gen_bool(p))
        .collect();
    FinitePreorder::generated_by(n, &pairs).expect("points are in range")
}

/// A random monotone image table on `domain`, built point by point in
/// order of increasing down-set size; restarts on a dead end and falls back
/// to a constant map.
pub fn monotone_image<R: Rng>(rng: &mut R, space: &FinitePreorder, domain: PointSet) -> Vec<usize> {
    let n = space.size();
    let mut order: Vec<usize> = domain.iter().collect();
    order.sort_by_key(|&x| space.down_of(x).len());
    'attempt: for _ in 0..64 {
        let mut image = vec![usize::MAX; n];
        for &x in &order {
            let candidates: Vec<usize> = (0..n)
                .filter(|&c| {
                    domain.iter().filter(|&y| image[y] != usize::MAX).all(|y| {
                        (!space.leq(y, x) || space.leq(image[y], c))
                            && (!space.leq(x, y) || space.leq(c, image[y]))
                    })
                })
                .collect();
            match candidates.choose(rng) {
                Some(&c) => image[x] = c,
                None => continue 'attempt,
            }
        }
        for v in image.iter_mut().filter(|v| **v == usize::MAX) {
            *v = 0;
        }
        return image;
    }
    let c = rng.gen_range(0..n);
    vec![c; n]
}

pub fn total_map<R: Rng>(rng: &mut R, space: &FinitePreorder) -> ContinuousSelfMap {
    let image = monotone_image(rng, space, space.all());
    ContinuousSelfMap::total(space, image).expect("generator yields monotone maps")
}

pub fn closed_set<R: Rng>(rng: &mut R, space: &FinitePreorder) -> PointSet {
    let raw = PointSet(rng.gen::<u64>() & space.all().0);
    // Thin the seed so targets are not almost always the whole space.
    let seed = PointSet(raw.0 & rng.gen::<u64>());
    space.closure(seed)
}

pub fn open_set<R: Rng>(rng: &mut R, space: &FinitePreorder) -> PointSet {
    space.all().difference(closed_set(rng, space))
}

pub fn system<R: Rng>(rng: &mut R, n: usize) -> FiniteSystem {
    let space = preorder(rng, n, 0.3);
    let map = total_map(rng, &space);
    let target = closed_set(rng, &space);
    let start = rng.gen_range(0..n);
    FiniteSystem::new(space, map, start, target).expect("generated system is valid")
}
