//! Acceptance criteria. One test runs every criterion in sequence (so the
//! runtime limits measure each criterion alone), prints one PASS/FAIL line per
//! criterion and fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use returnset::algebraic::{
    curve_theorem_analyze, detect_cycle, finite_field_return_set, iterate_orbit, AffineClosedSet, ExactScalar, Field,
    Invariance, MultiPoly, PolyMap,
};
use returnset::bounds::{
    dominates, recursive_m_conservative, recursive_m_floating, float_to_f64, BoundParams, BoundsConfig,
};
use returnset::density::{
    corollary_witness, decompose, generate_fset, lemma1_witness, lemma_block_size, verify_corollary_inequalities,
    windowed_density, witness_count_bound, FsetTerm, IndexWindow,
};
use returnset::finite::{
    exhaustive_verify, forward_return_set, random, restrict_to_invariant_domain, ContinuousSelfMap, FiniteSpaceError,
};

const WITNESS_WINDOWS: usize = 10_000;
const LEMMA_TIME_LIMIT: Duration = Duration::from_secs(60);
const COROLLARY_TIME_LIMIT: Duration = Duration::from_secs(10);
const COROLLARY_MAX_N: u64 = 10_000;
const EXHAUSTIVE_POINTS: usize = 4;
const EXHAUSTIVE_TIME_LIMIT: Duration = Duration::from_secs(300);
const PARTIAL_INSTANCES: usize = 1_000;
const CURVE_HORIZON: u64 = 64;
const CURVE_MIN_LEN: u64 = 8;
const BASE_CASE_DELTAS: usize = 100;
const DOMINANCE_GRID: usize = 500;
/// Floating results must match the exact constants to this relative error.
const FLOAT_TOLERANCE: f64 = 1e-40;
const FSET_LOG_HORIZON: u32 = 20;
const FSET_TIME_LIMIT: Duration = Duration::from_secs(30);
const FP_MAPS: usize = 1_000;
const FP_MAX_PRIME: u64 = 97;

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn declared_densities() -> Vec<BigRational> {
    vec![r(1, 5), r(1, 4), r(1, 3), r(2, 5), r(1, 2), r(3, 5), r(4, 5), r(1, 1)]
}

/// Seeded windows with at least `d·H` members: half uniform random subsets,
/// half periodic patterns with sparse noise.
fn witness_windows() -> Vec<(IndexWindow, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ds = declared_densities();
    (0..WITNESS_WINDOWS)
        .map(|i| {
            let h: u64 = rng.gen_range(100..=5000);
            let d = ds[rng.gen_range(0..ds.len())].clone();
            let need = (&d * BigRational::from_integer(h.into())).ceil().to_integer();
            let need: usize = need.try_into().unwrap();
            let mut members: Vec<u64> = if i % 2 == 0 {
                let count = rng.gen_range(need..=h as usize);
                sample(&mut rng, h as usize, count).into_iter().map(|n| n as u64).collect()
            } else {
                let period = rng.gen_range(1..=12u64);
                let pattern: Vec<bool> = (0..period).map(|_| rng.gen_bool(0.6)).collect();
                (0..h).filter(|&n| pattern[(n % period) as usize] || rng.gen_bool(0.05)).collect()
            };
            members.sort_unstable();
            let mut present = vec![false; h as usize];
            for &m in &members {
                present[m as usize] = true;
            }
            let mut missing: Vec<u64> = (0..h).filter(|&n| !present[n as usize]).collect();
            while members.len() < need {
                let j = rng.gen_range(0..missing.len());
                members.push(missing.swap_remove(j));
            }
            (IndexWindow::from_unsorted(h, members), d)
        })
        .collect()
}

fn criterion_1(windows: &[(IndexWindow, BigRational)]) -> Outcome {
    let start = Instant::now();
    for (w, d) in windows {
        let n = lemma_block_size(d).map_err(|e| e.to_string())?;
        let wit = lemma1_witness(w, d).map_err(|e| format!("H = {}, d = {d}: {e}", w.horizon()))?;
        ensure(wit.k >= 1 && wit.k < n, || format!("k = {} with N = {n}", wit.k))?;
        ensure(wit.q.members().iter().all(|&a| w.contains(a) && w.contains(a + wit.k)), || "Q + k ⊄ S".into())?;
        let bound = witness_count_bound(d, w.horizon(), n);
        ensure(BigRational::from_integer(wit.q.len().into()) >= bound, || {
            format!("|Q| = {} below {bound}", wit.q.len())
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < LEMMA_TIME_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!("{} windows, {elapsed:.2?}", windows.len()))
}

fn criterion_2(windows: &[(IndexWindow, BigRational)]) -> Outcome {
    let start = Instant::now();
    for (w, d) in windows {
        let wit = corollary_witness(w, d).map_err(|e| format!("H = {}, d = {d}: {e}", w.horizon()))?;
        ensure(BigRational::from_integer(wit.k.into()) * d < r(2, 1), || format!("k = {} for d = {d}", wit.k))?;
        ensure(wit.is_sound_for(w), || "Q + k ⊄ S".into())?;
    }
    for n in 2..=COROLLARY_MAX_N {
        ensure(verify_corollary_inequalities(n).map_err(|e| e.to_string())?, || format!("fails at N = {n}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < COROLLARY_TIME_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!("{} windows, N ≤ {COROLLARY_MAX_N}, {elapsed:.2?}", windows.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let report = exhaustive_verify(EXHAUSTIVE_POINTS, u64::MAX).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.certificates.is_empty(), || format!("{} certificates: {:?}", report.certificates.len(), report.certificates.first()))?;
    ensure(report.complete, || "incomplete".into())?;
    ensure(elapsed < EXHAUSTIVE_TIME_LIMIT, || format!("took {elapsed:.2?}"))?;
    let spaces: Vec<u64> = report.per_points.iter().map(|p| p.spaces).collect();
    ensure(spaces == [1, 3, 9, 33], || format!("space counts {spaces:?}"))?;
    let targets: u64 = report.per_points.iter().map(|p| p.targets).sum();
    Ok(format!("spaces {spaces:?}, {targets} targets, {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let (mut stayed, mut left) = (0, 0);
    for i in 0..PARTIAL_INSTANCES {
        let n = rng.gen_range(1..=5);
        let space = random::preorder(&mut rng, n, 0.3);
        let u = random::open_set(&mut rng, &space);
        let image = random::monotone_image(&mut rng, &space, u);
        let map = ContinuousSelfMap::partial(&space, image.clone(), u).map_err(|e| e.to_string())?;
        let target = random::closed_set(&mut rng, &space);
        let x = rng.gen_range(0..n);
        let horizon = 4 * n as u64 + 10;
        let mut sim = Vec::new();
        let mut exit = None;
        let mut p = x;
        for step in 0..horizon as usize {
            if !u.contains(p) {
                exit = Some(step);
                break;
            }
            sim.push(target.contains(p));
            p = image[p];
        }
        match (restrict_to_invariant_domain(&space, &map, x, target), exit) {
            (Err(FiniteSpaceError::OrbitLeavesDomain { step }), Some(s)) if step == s => left += 1,
            (Ok(sub), None) => {
                let rs = forward_return_set(&sub.system, horizon);
                let expected = (0..horizon).filter(|&t| sim[t as usize]).collect::<Vec<_>>();
                ensure(rs.window.members() == expected.as_slice(), || format!("instance {i}: return sets differ"))?;
                ensure(sub.invariant.is_subset(u), || format!("instance {i}: Z ⊄ U"))?;
                stayed += 1;
            }
            (got, exit) => return Err(format!("instance {i}: restriction {:?}, simulation exit {exit:?}", got.err())),
        }
    }
    Ok(format!("{PARTIAL_INSTANCES} instances ({stayed} stay in U, {left} leave), 0 discrepancies"))
}

fn criterion_5() -> Outcome {
    let f = Field::Rational;
    let q = |v: i64| ExactScalar::from_i64(f, v);
    let (x, y) = (MultiPoly::var(2, 0, f), MultiPoly::var(2, 1, f));
    let square = PolyMap::polynomial(vec![x.pow(2), y.pow(2)]).map_err(|e| e.to_string())?;
    let swap_square = PolyMap::polynomial(vec![y.pow(2), x.pow(2)]).map_err(|e| e.to_string())?;
    let diagonal = &x - &y;
    let fixtures = [
        ("diagonal", &square, &diagonal, [q(2), q(2)], r(1, 1), Some((0, 1))),
        ("axis", &swap_square, &y, [q(2), q(0)], r(1, 2), Some((0, 2))),
        ("control", &square, &diagonal, [q(2), q(3)], BigRational::zero(), None),
    ];
    let mut parts = Vec::new();
    for (name, map, curve, x0, delta, ap) in fixtures {
        let a = curve_theorem_analyze(map, curve, &x0, CURVE_HORIZON, CURVE_MIN_LEN).map_err(|e| format!("{name}: {e}"))?;
        ensure(a.density_estimate == delta, || format!("{name}: δ = {}", a.density_estimate))?;
        ensure(a.ap_found == ap, || format!("{name}: AP {:?}", a.ap_found))?;
        if let Some((_, k)) = ap {
            ensure(a.k == Some(k), || format!("{name}: k = {:?}", a.k))?;
            ensure(&delta * BigRational::from_integer(k.into()) == BigRational::one(), || format!("{name}: k ≠ 1/δ"))?;
            ensure(a.invariance == Some(Invariance::Proved), || format!("{name}: {:?}", a.invariance))?;
        } else {
            ensure(a.k.is_none() && a.invariance.is_none(), || format!("{name}: unexpected k"))?;
        }
        parts.push(format!("{name} δ = {delta}"));
    }
    Ok(parts.join(", "))
}

fn criterion_6() -> Outcome {
    let cfg = BoundsConfig::default();
    let params = |d: BigRational, m, dd, e| BoundParams::new(d, m, dd, e).map_err(|e| e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..BASE_CASE_DELTAS {
        let den: i64 = rng.gen_range(1..=1000);
        let delta = r(rng.gen_range(1..=den), den);
        let m = recursive_m_conservative(&params(delta.clone(), rng.gen_range(1..=9), rng.gen_range(1..=9), 1)?, &cfg)
            .map_err(|e| e.to_string())?;
        ensure(m.value == delta.recip(), || format!("base case at δ = {delta}"))?;
    }
    let mut cc = astro_float::Consts::new().map_err(|e| format!("{e:?}"))?;
    for (m, e, want) in [(2u64, 2u64, 96i64), (1, 3, 331_776)] {
        let p = params(r(1, 1), m, 1, e)?;
        let exact = recursive_m_conservative(&p, &cfg).map_err(|e| e.to_string())?;
        ensure(exact.value == r(want, 1), || format!("conservative M = {}", exact.value))?;
        let float = recursive_m_floating(&p, &cfg).map_err(|e| e.to_string())?;
        let got = float_to_f64(&float.value, &mut cc);
        ensure(((got - want as f64) / want as f64).abs() <= FLOAT_TOLERANCE.max(f64::EPSILON), || format!("floating M = {got}"))?;
        ensure(float.relative_error <= FLOAT_TOLERANCE, || format!("error bound {}", float.relative_error))?;
    }
    let deltas = [r(1, 1), r(9, 10), r(4, 5), r(3, 4), r(2, 3), r(3, 5), r(1, 2), r(2, 5), r(1, 3), r(1, 4)];
    let mut points = 0;
    for delta in &deltas {
        for m in 1..=5 {
            for dd in 1..=5 {
                for e in 1..=2 {
                    let p = params(delta.clone(), m, dd, e)?;
                    let exact = recursive_m_conservative(&p, &cfg).map_err(|e| e.to_string())?;
                    let float = recursive_m_floating(&p, &cfg).map_err(|e| e.to_string())?;
                    ensure(dominates(&exact.value, &float, cfg.precision).map_err(|e| e.to_string())?, || {
                        format!("floating exceeds conservative at δ = {delta}, m = {m}, D = {dd}, e = {e}")
                    })?;
                    points += 1;
                }
            }
        }
    }
    ensure(points == DOMINANCE_GRID, || format!("grid has {points} points"))?;
    Ok(format!("{BASE_CASE_DELTAS} base cases, M(1,2,1,2) = 96, M(1,1,1,3) = 331776, {points}-point dominance grid"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let horizon = 1u64 << FSET_LOG_HORIZON;
    let length = horizon / 2;
    let one = FsetTerm { coefficient: BigRational::one(), step: 1 };
    let w = generate_fset(2, &[one.clone(), one], FSET_LOG_HORIZON, horizon).map_err(|e| e.to_string())?;
    let est = windowed_density(&w, &[length]).map_err(|e| e.to_string())?;
    let limit = r(1, 1 << 10);
    ensure(est.headline < limit, || format!("headline {}", est.headline))?;
    let d = decompose(&w, &limit, length).map_err(|e| e.to_string())?;
    ensure(d.structured.is_empty(), || format!("extracted {:?}", d.structured))?;
    ensure(d.residual == w, || "residual differs from the set".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < FSET_TIME_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!("|S| = {}, headline {} at L = 2^19, pure residual, {elapsed:.2?}", w.len(), est.headline))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let primes: Vec<u64> = (2..=FP_MAX_PRIME).filter(|&p| (2..p).all(|d| p % d != 0)).collect();
    let mut total_steps = 0;
    for i in 0..FP_MAPS {
        let p = primes[rng.gen_range(0..primes.len())];
        let field = Field::prime(p).map_err(|e| e.to_string())?;
        let vars = rng.gen_range(1..=2);
        let c = |rng: &mut ChaCha8Rng| ExactScalar::from_i64(field, rng.gen_range(0..p as i64));
        let poly = |rng: &mut ChaCha8Rng| {
            let terms: Vec<(Vec<u32>, ExactScalar)> = (0..rng.gen_range(1..=4))
                .map(|_| ((0..vars).map(|_| rng.gen_range(0..=3)).collect(), c(rng)))
                .collect();
            MultiPoly::from_terms(vars, field, terms).unwrap()
        };
        let map = PolyMap::polynomial((0..vars).map(|_| poly(&mut rng)).collect()).map_err(|e| e.to_string())?;
        let target = AffineClosedSet::new((0..rng.gen_range(1..=2)).map(|_| poly(&mut rng)).collect());
        let x0: Vec<ExactScalar> = (0..vars).map(|_| c(&mut rng)).collect();
        let (t, period) = detect_cycle(&map, &x0).map_err(|e| e.to_string())?;
        let horizon = 2 * (t + period);
        let rs = finite_field_return_set(&map, &x0, &target, horizon).map_err(|e| e.to_string())?;
        let orbit = iterate_orbit(&map, &x0, horizon).map_err(|e| e.to_string())?;
        let direct = IndexWindow::from_predicate(horizon, |n| target.contains(&orbit[n as usize]));
        ensure(rs.window == direct, || format!("map {i} over F_{p}: windows differ"))?;
        ensure(rs.decomposition.structured.enumerate_below(horizon) == direct, || format!("map {i}: decomposition differs"))?;
        total_steps += horizon;
    }
    Ok(format!("{FP_MAPS} maps, {total_steps} orbit points compared"))
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {label}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL criterion {label}: {detail}");
            false
        }
    }
}

// Runs without the libtest harness so the per-criterion lines are always shown.
fn main() {
    let windows = witness_windows();
    let results = [
        run("1 (lemma witnesses)", || criterion_1(&windows)),
        run("2 (corollary witnesses and inequalities)", || criterion_2(&windows)),
        run("3 (exhaustive finite spaces)", criterion_3),
        run("4 (partial-map restriction)", criterion_4),
        run("5 (curve fixtures)", criterion_5),
        run("6 (recursive bound calculator)", criterion_6),
        run("7 (sparse F-set)", criterion_7),
        run("8 (finite-field oracle)", criterion_8),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
