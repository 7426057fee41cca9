//! Oracles and helpers shared by the integration tests. The oracles are
//! written from scratch and do not call the code under test.

#![allow(dead_code)]

use std::f64::consts::TAU;
use std::path::PathBuf;
use tewa::geometry::{Point2, WSSector};
use tewa::scenario::Scenario;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn fixture(name: &str) -> Scenario {
    Scenario::from_json(&fixture_text(name)).unwrap_or_else(|e| panic!("fixture {name}: {e:?}"))
}

/// Scenario fixtures shipped in the repo (the catalog file is not one).
pub const SCENARIOS: [&str; 8] = [
    "canonical",
    "blocking",
    "contention_free",
    "stochastic",
    "relaxed",
    "stress",
    "starvation",
    "overutilization",
];

// ---------------------------------------------------------------- geometry

/// Relative residual of `p` against `(x - x0)^2 + (y - y0)^2 = r^2`.
pub fn circle_residual(p: Point2, center: Point2, r: f64) -> f64 {
    let (dx, dy) = (p.x - center.x, p.y - center.y);
    (dx * dx + dy * dy - r * r).abs() / (r * r)
}

/// Relative residual of `p` against `y = m x + c`.
pub fn line_residual(p: Point2, m: f64, c: f64) -> f64 {
    (p.y - (m * p.x + c)).abs() / (1.0 + p.y.abs() + (m * p.x).abs() + c.abs())
}

/// Plain polar membership test for an annular wedge, closed on every edge.
pub fn in_wedge(p: Point2, s: &WSSector) -> bool {
    let (dx, dy) = (p.x - s.origin.x, p.y - s.origin.y);
    let r = dx.hypot(dy);
    if r < s.min_range || r > s.max_range {
        return false;
    }
    if s.sweep_angle >= TAU {
        return true;
    }
    let mut a = dy.atan2(dx) - s.start_angle;
    while a < 0.0 {
        a += TAU;
    }
    while a >= TAU {
        a -= TAU;
    }
    a <= s.sweep_angle
}

/// First and last inside samples along a ray, in ray-length units, with the
/// step used. The ray is sampled far enough to leave the outer circle.
pub fn sample_ray(origin: Point2, dir: Point2, s: &WSSector, rel_step: f64) -> (Option<(f64, f64)>, f64) {
    let n = dir.x.hypot(dir.y);
    let (ux, uy) = (dir.x / n, dir.y / n);
    let length = (origin.x - s.origin.x).hypot(origin.y - s.origin.y) + s.max_range + 1.0;
    let step = rel_step * length;
    let count = (length / step).ceil() as usize;
    let mut first = None;
    let mut last = None;
    for i in 0..=count {
        let d = i as f64 * step;
        let p = Point2::new(origin.x + ux * d, origin.y + uy * d);
        if in_wedge(p, s) {
            first.get_or_insert(d);
            last = Some(d);
        }
    }
    (first.zip(last), step)
}

// ---------------------------------------------------------------- matching

/// A matching problem as plain arrays: `w[p][a]` is `None` when the pair is
/// not allowed.
#[derive(Clone, Debug)]
pub struct RawInstance {
    pub w: Vec<Vec<Option<f64>>>,
    pub cap: Vec<usize>,
}

impl RawInstance {
    /// Proposer `p` strictly prefers `a1` to `a2`; ties go to the lower index.
    pub fn p_prefers(&self, p: usize, a1: usize, a2: usize) -> bool {
        let (x, y) = (self.w[p][a1].unwrap(), self.w[p][a2].unwrap());
        x > y || (x == y && a1 < a2)
    }

    /// Acceptor `a` strictly prefers `p1` to `p2`.
    pub fn a_prefers(&self, a: usize, p1: usize, p2: usize) -> bool {
        let (x, y) = (self.w[p1][a].unwrap(), self.w[p2][a].unwrap());
        x > y || (x == y && p1 < p2)
    }

    pub fn blocking_pairs(&self, m: &[Option<usize>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.w.len() {
            for a in 0..self.cap.len() {
                if self.w[p][a].is_none() || m[p] == Some(a) {
                    continue;
                }
                let p_wants = match m[p] {
                    None => true,
                    Some(cur) => self.p_prefers(p, a, cur),
                };
                if !p_wants {
                    continue;
                }
                let held: Vec<usize> = (0..m.len()).filter(|&q| m[q] == Some(a)).collect();
                let a_wants = held.len() < self.cap[a] || held.iter().any(|&q| self.a_prefers(a, p, q));
                if a_wants {
                    out.push((p, a));
                }
            }
        }
        out
    }

    /// Every capacity-feasible assignment with no blocking pair.
    pub fn stable_set(&self) -> Vec<Vec<Option<usize>>> {
        let np = self.w.len();
        let mut stable = Vec::new();
        let mut cur = vec![None; np];
        let mut load = vec![0usize; self.cap.len()];
        self.enumerate(0, &mut cur, &mut load, &mut stable);
        stable
    }

    fn enumerate(
        &self,
        p: usize,
        cur: &mut Vec<Option<usize>>,
        load: &mut Vec<usize>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if p == self.w.len() {
            if self.blocking_pairs(cur).is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        cur[p] = None;
        self.enumerate(p + 1, cur, load, out);
        for a in 0..self.cap.len() {
            if self.w[p][a].is_some() && load[a] < self.cap[a] {
                load[a] += 1;
                cur[p] = Some(a);
                self.enumerate(p + 1, cur, load, out);
                load[a] -= 1;
                cur[p] = None;
            }
        }
    }
}

/// Small deterministic generator so instance construction does not depend
/// on the crate's own random helpers.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random instance with up to `max_p` proposers and `max_a` acceptors.
/// `coarse` draws weights from a quarter grid so ties are common.
pub fn random_instance(rng: &mut SplitMix, max_p: usize, max_a: usize, coarse: bool) -> RawInstance {
    let np = 1 + rng.below(max_p);
    let na = 1 + rng.below(max_a);
    let cap = (0..na).map(|_| 1 + rng.below(3)).collect();
    let w = (0..np)
        .map(|_| {
            (0..na)
                .map(|_| {
                    (rng.unit() < 0.75).then(|| {
                        if coarse {
                            (rng.below(4) as f64) / 4.0
                        } else {
                            rng.unit()
                        }
                    })
                })
                .collect()
        })
        .collect();
    RawInstance { w, cap }
}

pub fn to_instance(raw: &RawInstance) -> tewa::matching::MatchInstance<usize, usize> {
    let mut inst =
        tewa::matching::MatchInstance::new(0..raw.w.len(), raw.cap.iter().copied().enumerate()).unwrap();
    for (p, row) in raw.w.iter().enumerate() {
        for (a, w) in row.iter().enumerate() {
            if let Some(w) = w {
                inst.allow(&p, &a, *w).unwrap();
            }
        }
    }
    inst
}

pub fn to_vec(m: &tewa::matching::Matching<usize, usize>, np: usize) -> Vec<Option<usize>> {
    (0..np).map(|p| m.partner(&p).copied()).collect()
}

// ---------------------------------------------------------------- tracks

/// Position along a waypoint list by linear interpolation; `None` before
/// the first and after the last waypoint.
pub fn track_position(waypoints: &[(f64, f64, f64)], t: f64) -> Option<Point2> {
    let first = waypoints.first()?;
    let last = waypoints.last()?;
    if t < first.0 || t > last.0 {
        return None;
    }
    for pair in waypoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if t <= b.0 {
            let f = (t - a.0) / (b.0 - a.0);
            return Some(Point2::new(a.1 + f * (b.1 - a.1), a.2 + f * (b.2 - a.2)));
        }
    }
    Some(Point2::new(last.1, last.2))
}

/// Plain-array view of a library instance, indices in list order.
pub fn raw_from<P: Ord + Clone + std::fmt::Debug, A: Ord + Clone + std::fmt::Debug>(
    inst: &tewa::matching::MatchInstance<P, A>,
) -> RawInstance {
    let w = inst
        .proposers()
        .iter()
        .map(|p| inst.acceptors().iter().map(|a| inst.weight(p, a)).collect())
        .collect();
    let cap = inst.acceptors().iter().map(|a| inst.capacity(a).unwrap()).collect();
    RawInstance { w, cap }
}

/// A matching as acceptor indices per proposer, in list order.
pub fn raw_matching<P: Ord + Clone + std::fmt::Debug, A: Ord + Clone + std::fmt::Debug>(
    inst: &tewa::matching::MatchInstance<P, A>,
    m: &tewa::matching::Matching<P, A>,
) -> Vec<Option<usize>> {
    inst.proposers()
        .iter()
        .map(|p| m.partner(p).map(|a| inst.acceptors().iter().position(|x| x == a).unwrap()))
        .collect()
}

// ---------------------------------------------------------------- runs

pub fn document(name: &str) -> tewa::scenario::ScenarioDocument {
    serde_json::from_str(&fixture_text(name)).unwrap()
}

pub fn run(scenario: &Scenario, policy: tewa::sim::Policy, seed: Option<u64>, record: bool) -> tewa::sim::RunOutput {
    let opts = tewa::sim::RunOptions { policy, seed, horizon: None, record_cycles: record };
    tewa::sim::run(scenario, &opts).unwrap()
}

/// Counts scheduled threats per WS and locks per threat from the raw pair
/// sets; returns a description of the first violation.
pub fn slot_violation(state: &tewa::weapon_assign::AssignmentState) -> Option<String> {
    use std::collections::BTreeMap;
    let mut per_ws: BTreeMap<String, usize> = BTreeMap::new();
    for (w, _) in &state.scheduled {
        *per_ws.entry(w.to_string()).or_default() += 1;
    }
    if let Some((w, n)) = per_ws.iter().find(|(_, n)| **n > 2) {
        return Some(format!("{w} schedules {n}"));
    }
    let mut locks: BTreeMap<String, usize> = BTreeMap::new();
    for (_, t) in &state.locked {
        *locks.entry(t.to_string()).or_default() += 1;
    }
    locks.into_iter().find(|(_, n)| *n != 1).map(|(t, n)| format!("{t} locked {n} times"))
}

/// Wedge membership with an absolute slack on range and angle.
pub fn in_wedge_within(p: Point2, s: &WSSector, slack: f64) -> bool {
    let (dx, dy) = (p.x - s.origin.x, p.y - s.origin.y);
    let r = dx.hypot(dy);
    if r < s.min_range - slack || r > s.max_range + slack {
        return false;
    }
    if s.sweep_angle >= TAU {
        return true;
    }
    let a = (dy.atan2(dx) - s.start_angle).rem_euclid(TAU);
    let ang = slack / r.max(1.0);
    a <= s.sweep_angle + ang || a >= TAU - ang
}

// ---------------------------------------------------------------- coverage

/// Times at which a shot from `ws` could meet `track`: inside the sector and
/// before the track first touches any asset footprint. Sampled every `dt`.
pub struct HitWindow {
    pub times: Vec<f64>,
    /// Flight time of the shot that meets the track at each sample.
    pub flight: Vec<f64>,
    /// First sample inside a footprint, or the end of the track.
    pub leak_at: f64,
}

pub fn hit_window(s: &Scenario, track: usize, ws: usize, dt: f64) -> HitWindow {
    let tr = &s.tracks[track];
    let w = &s.weapon_systems[ws];
    let wps: Vec<(f64, f64, f64)> = tr.waypoints.iter().map(|p| (p.t, p.x, p.y)).collect();
    let (t0, t1) = (wps[0].0, wps.last().unwrap().0);
    let mut out = HitWindow { times: vec![], flight: vec![], leak_at: t1 };
    let mut t = t0;
    while t <= t1 {
        let p = track_position(&wps, t).unwrap();
        if s.das.iter().any(|d| (p - d.footprint.center).norm() <= d.footprint.radius) {
            out.leak_at = t;
            break;
        }
        if in_wedge(p, &w.sector) {
            out.times.push(t);
            out.flight.push((p - w.sector.origin).norm() / w.projectile_speed);
        }
        t += dt;
    }
    out
}

/// Threats covered when each WS serves its list in order: lock at time 0,
/// wait out stabilization, shoot at the first reachable sample, then move
/// on to the next threat once the shot lands (or once the last one leaks).
pub fn served(s: &Scenario, plan: &[Vec<usize>], dt: f64) -> Vec<usize> {
    let mut covered = Vec::new();
    for (ws, queue) in plan.iter().enumerate() {
        let stab = s.weapon_systems[ws].stabilization_time;
        let mut free_at = 0.0;
        for &k in queue {
            let win = hit_window(s, k, ws, dt);
            let ready = free_at + stab;
            let hit = win
                .times
                .iter()
                .zip(&win.flight)
                .find(|(h, f)| **h - **f >= ready - 1e-9)
                .map(|(h, _)| *h);
            match hit {
                Some(h) => {
                    covered.push(k);
                    free_at = h;
                }
                None => free_at = f64::max(free_at, win.leak_at),
            }
        }
    }
    covered.sort();
    covered
}

/// Every assignment of threats to weapon systems (or to none), with every
/// service order, and the threats each one covers.
pub fn enumerate_assignments(s: &Scenario, dt: f64) -> Vec<(Vec<Vec<usize>>, Vec<usize>)> {
    let (nt, nw) = (s.tracks.len(), s.weapon_systems.len());
    let mut out = Vec::new();
    for code in 0..(nw + 1).pow(nt as u32) {
        let mut c = code;
        let mut lists: Vec<Vec<usize>> = vec![vec![]; nw];
        for k in 0..nt {
            let j = c % (nw + 1);
            c /= nw + 1;
            if j > 0 {
                lists[j - 1].push(k);
            }
        }
        if lists.iter().any(|l| l.len() > 2) {
            continue;
        }
        // Both service orders for a weapon holding two threats.
        let mut orders = vec![lists.clone()];
        for j in 0..nw {
            if lists[j].len() == 2 {
                let more: Vec<_> = orders
                    .iter()
                    .map(|o| {
                        let mut o = o.clone();
                        o[j].reverse();
                        o
                    })
                    .collect();
                orders.extend(more);
            }
        }
        for o in orders {
            let cov = served(s, &o, dt);
            out.push((o, cov));
        }
    }
    out
}
