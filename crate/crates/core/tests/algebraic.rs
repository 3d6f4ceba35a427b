use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use returnset::algebraic::{
    curve_invariance_check, detect_cycle, finite_field_return_set, iterate_orbit, iterate_symbolic,
    sample_curve_invariance, AffineClosedSet, ExactScalar, Field, Invariance, InvarianceConfig, MultiPoly, PolyMap,
};

fn random_poly<R: Rng>(rng: &mut R, vars: usize, field: Field, degree: u32, terms: usize) -> MultiPoly {
    let p = field.characteristic();
    let ts = (0..terms).map(|_| {
        let mut exps = vec![0u32; vars];
        let mut budget = rng.gen_range(0..=degree);
        for e in exps.iter_mut() {
            let take = rng.gen_range(0..=budget);
            *e = take;
            budget -= take;
        }
        let c = if p == 0 { rng.gen_range(-3..=3) } else { rng.gen_range(0..p as i64) };
        (exps, ExactScalar::from_i64(field, c))
    });
    MultiPoly::from_terms(vars, field, ts.collect::<Vec<_>>()).unwrap()
}

fn random_map<R: Rng>(rng: &mut R, vars: usize, field: Field, degree: u32) -> PolyMap {
    PolyMap::polynomial((0..vars).map(|_| random_poly(rng, vars, field, degree, 4)).collect()).unwrap()
}

fn random_point<R: Rng>(rng: &mut R, vars: usize, field: Field) -> Vec<ExactScalar> {
    (0..vars).map(|_| ExactScalar::from_i64(field, rng.gen_range(0..field.characteristic() as i64))).collect()
}

#[test]
fn symbolic_iterates_agree_with_evaluation() {
    let big = InvarianceConfig { term_cap: 1 << 20, degree_cap: 1 << 20, ..InvarianceConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // (arity, degree, largest k): two-variable cubics stop at k = 3 to keep
    // the dense compositions small.
    for &(vars, degree, kmax) in &[(1usize, 3u32, 5u64), (2, 2, 5), (2, 3, 3)] {
        for _ in 0..20 {
            let field = Field::prime([7, 31, 97][rng.gen_range(0..3)]).unwrap();
            let map = random_map(&mut rng, vars, field, degree);
            let x0 = random_point(&mut rng, vars, field);
            let orbit = iterate_orbit(&map, &x0, kmax + 1).unwrap();
            let k = rng.gen_range(1..=kmax);
            let phik = iterate_symbolic(&map, k, &big).unwrap();
            let composed: Vec<ExactScalar> = phik.iter().map(|c| c.eval(&x0)).collect();
            assert_eq!(composed, orbit[k as usize]);
        }
    }
}

#[test]
fn finite_field_return_sets_follow_the_lasso() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let field = Field::prime([2, 3, 5, 13, 53, 97][rng.gen_range(0..6)]).unwrap();
        let vars = rng.gen_range(1..=2);
        let map = random_map(&mut rng, vars, field, 3);
        let x0 = random_point(&mut rng, vars, field);
        let target = AffineClosedSet::new(vec![random_poly(&mut rng, vars, field, 2, 2)]);
        let (t, c) = detect_cycle(&map, &x0).unwrap();
        let horizon = 3 * (t + c) + 5;
        let r = finite_field_return_set(&map, &x0, &target, horizon).unwrap();
        let orbit = iterate_orbit(&map, &x0, horizon).unwrap();
        assert_eq!(orbit[(t + c) as usize], orbit[t as usize]);
        assert!(t == 0 || orbit[(t - 1) as usize] != orbit[(t + c - 1) as usize]);
        assert!((1..c).all(|d| orbit[(t + d) as usize] != orbit[t as usize]));
        for (n, x) in orbit.iter().enumerate() {
            assert_eq!(r.window.contains(n as u64), target.contains(x));
            if n as u64 >= t + c {
                assert_eq!(r.window.contains(n as u64), r.window.contains(n as u64 - c));
            }
        }
        assert!(r.decomposition.residual.is_empty());
    }
}

/// `(g(x), g(y))` preserves the diagonal; `(g(x), y·h(x, y))` preserves the x-axis.
fn invariant_family<R: Rng>(rng: &mut R, field: Field) -> (PolyMap, MultiPoly) {
    let x = MultiPoly::var(2, 0, field);
    let y = MultiPoly::var(2, 1, field);
    let g = random_poly(rng, 1, field, 3, 3);
    if rng.gen_bool(0.5) {
        let map = PolyMap::polynomial(vec![g.compose(&[x.clone()]), g.compose(&[y.clone()])]).unwrap();
        (map, &x - &y)
    } else {
        let h = random_poly(rng, 2, field, 2, 3);
        let map = PolyMap::polynomial(vec![g.compose(&[x.clone()]), &y * &h]).unwrap();
        (map, y)
    }
}

#[test]
fn proved_invariance_transfers_to_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    for _ in 0..100 {
        let field = Field::prime(101).unwrap();
        let (map, f) = invariant_family(&mut rng, field);
        let k = rng.gen_range(1..=3);
        assert_eq!(curve_invariance_check(&map, &f, k).unwrap(), Invariance::Proved);
        let x0 = random_point(&mut rng, 2, field);
        let horizon = 40;
        let orbit = iterate_orbit(&map, &x0, horizon).unwrap();
        for b in 0..horizon {
            if f.eval(&orbit[b as usize]).is_zero() {
                checked += 1;
                assert!((b..horizon).step_by(k as usize).all(|n| f.eval(&orbit[n as usize]).is_zero()));
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn division_agrees_with_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut proved, mut refuted) = (0, 0);
    for i in 0..60 {
        let (map, f, k) = if i % 2 == 0 {
            let (m, f) = invariant_family(&mut rng, Field::prime(10_007).unwrap());
            (m, f, rng.gen_range(1..=2))
        } else {
            let field = if i % 4 == 1 { Field::Rational } else { Field::prime(10_007).unwrap() };
            let m = random_map(&mut rng, 2, field, 2);
            let f = random_poly(&mut rng, 2, field, 2, 3);
            if f.constant_value().is_some() {
                continue;
            }
            (m, f, 1)
        };
        let exact = curve_invariance_check(&map, &f, k).unwrap();
        let sampled = sample_curve_invariance(&map, &f, k, 50, i).unwrap();
        // A curve with fewer than 50 points over the sampling field leaves
        // nothing to compare against.
        match (exact, sampled) {
            (_, Invariance::Sampled { trials, .. }) if trials < 50 => {}
            (Invariance::Proved, Invariance::Sampled { holds, .. }) => {
                proved += 1;
                assert!(holds, "{map:?} {f}");
            }
            (Invariance::Refuted, Invariance::Sampled { holds, .. }) => {
                refuted += 1;
                assert!(!holds, "{map:?} {f}");
            }
            (other, s) => panic!("unexpected verdicts {other:?} / {s:?}"),
        }
    }
    assert!(proved >= 20 && refuted >= 10, "{proved} proved, {refuted} refuted");
}
