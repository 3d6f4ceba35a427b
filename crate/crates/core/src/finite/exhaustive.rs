use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    backward_return_set, enumerate_backward_orbits, find_infinite_ap, forward_return_set,
    orbit_rho, restrict_to_invariant_domain, stabilize_closures, ContinuousSelfMap,
    FinitePreorder, FiniteSpaceError, FiniteSystem, PointSet, Rho,
};

pub const MAX_VERIFY_POINTS: usize = 5;

/// A failed check together with the instance that produced it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Certificate {
    pub check: String,
    pub n: usize,
    pub leq: Vec<[usize; 2]>,
    pub map: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<usize>>,
    pub start: usize,
    pub target: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PointsReport {
    pub points: usize,
    /// Preorders up to isomorphism.
    pub spaces: u64,
    /// Continuous self-maps summed over spaces.
    pub maps: u64,
    /// (space, map, start, closed target) combinations checked forward.
    pub targets: u64,
    /// (space, map, start) combinations.
    pub instances: u64,
    pub backward_orbits: u64,
    /// (space, map, start, open domain) combinations for partial maps.
    pub partial_domains: u64,
}

impl PointsReport {
    fn merge(mut self, other: &PointsReport) -> Self {
        self.spaces += other.spaces;
        self.maps += other.maps;
        self.targets += other.targets;
        self.instances += other.instances;
        self.backward_orbits += other.backward_orbits;
        self.partial_domains += other.partial_domains;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub max_points: usize,
    pub complete: bool,
    pub per_points: Vec<PointsReport>,
    pub certificates: Vec<Certificate>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.complete && self.certificates.is_empty()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Relation matrix as bits, `bit (x·n + y)` set iff `y ≤ x`.
fn encode(down: &[PointSet], perm: &[usize]) -> u64 {
    let n = down.len();
    let mut code = 0u64;
    for x in 0..n {
        for y in down[x].iter() {
            code |= 1 << (perm[x] * n + perm[y]);
        }
    }
    code
}

/// One representative per isomorphism class of preorders on `n` points,
/// found by keeping the minimal relation-matrix code over all relabelings.
pub fn canonical_preorders(n: usize) -> Vec<FinitePreorder> {
    assert!(n <= MAX_VERIFY_POINTS, "preorder enumeration is limited to {MAX_VERIFY_POINTS} points");
    let perms = permutations(n);
    let off: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (0..n).map(move |y| (y, x))).filter(|&(y, x)| y != x).collect();
    let mut codes = BTreeSet::new();
    for mask in 0u64..1 << off.len() {
        let mut down: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for (i, &(y, x)) in off.iter().enumerate() {
            if mask >> i & 1 == 1 {
                down[x].insert(y);
            }
        }
        let transitive = (0..n).all(|x| down[x].iter().all(|y| down[y].is_subset(down[x])));
        if transitive {
            let canon = perms.iter().map(|p| encode(&down, p)).min().unwrap_or(0);
            codes.insert(canon);
        }
    }
    codes
        .into_iter()
        .map(|code| {
            let down = (0..n)
                .map(|x| PointSet::from_points((0..n).filter(|&y| code >> (x * n + y) & 1 == 1)))
                .collect();
            FinitePreorder::from_down(down)
        })
        .collect()
}

fn monotone_maps(space: &FinitePreorder) -> Vec<ContinuousSelfMap> {
    let n = space.size();
    let total = n.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let image: Vec<usize> = (0..n)
                .map(|_| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .collect();
            ContinuousSelfMap::total(space, image).ok()
        })
        .collect()
}

struct Verifier<'a> {
    space: &'a FinitePreorder,
    closed: Vec<PointSet>,
    open: Vec<PointSet>,
    certificates: Vec<Certificate>,
    report: PointsReport,
}

impl<'a> Verifier<'a> {
    fn fail(
        &mut self,
        check: &str,
        map: &ContinuousSelfMap,
        start: usize,
        target: PointSet,
        domain: Option<PointSet>,
        detail: String,
    ) {
        self.certificates.push(Certificate {
            check: check.to_string(),
            n: self.space.size(),
            leq: self.space.strict_pairs().into_iter().map(|(y, x)| [y, x]).collect(),
            map: map.image().to_vec(),
            domain: domain.map(|d| d.iter().collect()),
            start,
            target: target.iter().collect(),
            detail,
        });
    }

    fn instance(&mut self, map: &ContinuousSelfMap, x: usize) {
        let n = self.space.size();
        let rho = orbit_rho(map, x);
        let span = (rho.tail + rho.cycle) as u64;
        let horizon = 2 * span + n as u64;
        // Independent simulation, longer than the decomposition horizon.
        let check_len = 3 * span + 8;
        let mut sim = Vec::with_capacity(check_len as usize);
        let mut p = x;
        for _ in 0..check_len {
            sim.push(p);
            p = map.at(p);
        }
        for &y in &self.closed.clone() {
            self.report.targets += 1;
            let sys = FiniteSystem::new(self.space.clone(), map.clone(), x, y)
                .expect("enumerated targets are closed");
            self.check_forward(&sys, &rho, &sim, horizon, span);
        }
        self.check_backward(map, x, &rho, horizon);
        self.check_partial(map, x, &sim, horizon);
    }

    fn check_forward(&mut self, sys: &FiniteSystem, rho: &Rho, sim: &[usize], horizon: u64, span: u64) {
        let (map, x, y) = (&sys.map, sys.start, sys.target);
        let rs = forward_return_set(sys, horizon);
        let exact = &rs.decomposition.structured;
        if !rs.decomposition.residual.is_empty() {
            self.fail("forward.residual_nonempty", map, x, y, None, String::new());
        }
        if exact.exceptional().iter().any(|&e| e >= span) {
            self.fail("forward.exceptional_beyond_rho", map, x, y, None, format!("{exact:?}"));
        }
        if let Some(n) = (0..sim.len()).find(|&n| exact.contains(n as u64) != y.contains(sim[n])) {
            self.fail("forward.membership", map, x, y, None, format!("n = {n}, {exact:?}"));
        }
        if rs.window != exact.enumerate_below(horizon) {
            self.fail("forward.window", map, x, y, None, String::new());
        }

        let infinite = !exact.progressions().is_empty();
        match find_infinite_ap(sys) {
            None if infinite => {
                self.fail("descent.missed_progression", map, x, y, None, format!("{exact:?}"))
            }
            Some(ap) if !infinite => {
                self.fail("descent.finite_set", map, x, y, None, format!("{ap:?}"))
            }
            Some(ap) => {
                let terms = rho.tail as u64 / ap.step + rho.cycle as u64 + 2;
                if let Some(j) = (0..terms).find(|&j| !exact.contains(ap.first + j * ap.step)) {
                    self.fail("descent.not_contained", map, x, y, None, format!("{ap:?}, j = {j}"));
                }
                self.check_closures(sys, ap.step, ap.first);
            }
            None => {}
        }
    }

    fn check_closures(&mut self, sys: &FiniteSystem, a: u64, b: u64) {
        let (map, x, y) = (&sys.map, sys.start, sys.target);
        let (v0, m) = match stabilize_closures(sys, a, b) {
            Ok(r) => r,
            Err(e) => return self.fail("closures.error", map, x, y, None, e.to_string()),
        };
        if !v0.is_subset(y) || !v0.is_subset(map.preimage_iter(v0, a)) {
            self.fail("closures.not_invariant", map, x, y, None, format!("V0 = {v0:?}"));
        }
        let n = self.space.size();
        let chain = |i: usize| {
            let pts = (i..i + n + 1).map(|j| map.iterate(x, a * j as u64 + b));
            self.space.closure(PointSet::from_points(pts))
        };
        let stable = (1..=3).all(|j| chain(m + j) == v0) && chain(m) == v0;
        let first = m == 0 || chain(m - 1) != v0;
        if !stable || !first {
            self.fail("closures.chain", map, x, y, None, format!("m = {m}"));
        }
    }

    fn check_backward(&mut self, map: &ContinuousSelfMap, x: usize, rho: &Rho, horizon: u64) {
        let periodic = rho.tail == 0;
        match enumerate_backward_orbits(map, x, 16) {
            Err(FiniteSpaceError::NoBackwardOrbit(_)) if !periodic => {}
            Err(e) => self.fail("backward.enumeration", map, x, PointSet::EMPTY, None, e.to_string()),
            Ok(_) if !periodic => self.fail(
                "backward.nonperiodic_point",
                map,
                x,
                PointSet::EMPTY,
                None,
                String::new(),
            ),
            Ok(found) => {
                for orbit in &found.orbits {
                    self.report.backward_orbits += 1;
                    if let Err(e) = orbit.check_coherent(map) {
                        self.fail("backward.coherence", map, x, PointSet::EMPTY, None, e.to_string());
                        continue;
                    }
                    for &y in &self.closed.clone() {
                        let rs = backward_return_set(orbit, y, horizon);
                        let exact = &rs.decomposition.structured;
                        let bad = !rs.decomposition.residual.is_empty()
                            || (0..horizon).any(|n| exact.contains(n) != y.contains(orbit.point(n)));
                        if bad {
                            self.fail("backward.return_set", map, x, y, None, format!("{orbit:?}"));
                        }
                    }
                }
            }
        }
    }

    fn check_partial(&mut self, map: &ContinuousSelfMap, x: usize, sim: &[usize], horizon: u64) {
        let n = self.space.size();
        for &u in &self.open.clone() {
            self.report.partial_domains += 1;
            let partial = ContinuousSelfMap::partial(self.space, map.image().to_vec(), u)
                .expect("restriction of a monotone map to an open set");
            // The orbit repeats within n steps, so leaving U happens by then.
            let leaves = (0..=n).find(|&s| !u.contains(sim[s]));
            match (restrict_to_invariant_domain(self.space, &partial, x, PointSet::EMPTY), leaves) {
                (Err(FiniteSpaceError::OrbitLeavesDomain { step }), Some(s)) if step == s => {}
                (Ok(r), None) => {
                    for &y in &self.closed.clone() {
                        let sub_target = PointSet::from_points(
                            r.embedding.iter().enumerate().filter(|&(_, &p)| y.contains(p)).map(|(i, _)| i),
                        );
                        let sub = FiniteSystem { target: sub_target, ..r.system.clone() };
                        let rs = forward_return_set(&sub, horizon);
                        let direct = (0..horizon).all(|t| rs.window.contains(t) == y.contains(sim[t as usize]));
                        if !direct {
                            self.fail("partial.return_set", &partial, x, y, Some(u), String::new());
                        }
                    }
                }
                (got, _) => self.fail(
                    "partial.domain",
                    &partial,
                    x,
                    PointSet::EMPTY,
                    Some(u),
                    format!("restriction {:?}, simulation leaves at {leaves:?}", got.err()),
                ),
            }
        }
    }
}

/// Checks every preorder on at most `max_points` points (up to isomorphism),
/// every continuous self-map, every start and every closed target:
/// exact forward decompositions, the descent, closure chains, backward
/// return sets and invariant-domain restriction. `budget` caps the number of
/// (space, map, start) instances.
pub fn exhaustive_verify(max_points: usize, budget: u64) -> Result<VerifyReport, FiniteSpaceError> {
    if max_points > MAX_VERIFY_POINTS {
        return Err(FiniteSpaceError::VerifyTooLarge { got: max_points, max: MAX_VERIFY_POINTS });
    }
    let used = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let mut per_points = Vec::new();
    let mut certificates = Vec::new();
    for n in 1..=max_points {
        let spaces = canonical_preorders(n);
        let results: Vec<(PointsReport, Vec<Certificate>)> = spaces
            .par_iter()
            .map(|space| {
                let mut v = Verifier {
                    space,
                    closed: space.closed_sets(),
                    open: space.open_sets(),
                    certificates: Vec::new(),
                    report: PointsReport { points: n, spaces: 1, ..Default::default() },
                };
                for map in monotone_maps(space) {
                    v.report.maps += 1;
                    for x in 0..n {
                        if used.fetch_add(1, Ordering::Relaxed) >= budget {
                            exhausted.store(true, Ordering::Relaxed);
                            return (v.report, v.certificates);
                        }
                        v.report.instances += 1;
                        v.instance(&map, x);
                    }
                }
                (v.report, v.certificates)
            })
            .collect();
        let merged = results
            .iter()
            .fold(PointsReport { points: n, ..Default::default() }, |acc, (r, _)| acc.merge(r));
        per_points.push(merged);
        certificates.extend(results.into_iter().flat_map(|(_, c)| c));
        if exhausted.load(Ordering::Relaxed) {
            break;
        }
    }
    certificates.sort();
    let complete = !exhausted.load(Ordering::Relaxed);
    let report = VerifyReport { schema: 1, max_points, complete, per_points, certificates };
    if complete {
        Ok(report)
    } else {
        Err(FiniteSpaceError::BudgetExceeded(Box::new(report)))
    }
}
