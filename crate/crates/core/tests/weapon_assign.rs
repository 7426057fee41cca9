mod common;

use common::SplitMix;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use tewa::catalog::{load_catalogs, Catalog};
use tewa::config::SimConfig;
use tewa::geometry::{Point2, WSSector};
use tewa::ids::{ThreatId, WsId};
use tewa::threat_eval::{FireStatus, ThreatTrack};
use tewa::weapon_assign::*;

fn catalog() -> Catalog {
    load_catalogs(
        r#"{
        "threat_types": [
            {"id": "jet", "name": "Jet", "base_capability": 0.7,
             "speed_envelope": {"min": 100, "max": 400}},
            {"id": "armored", "name": "Armored", "base_capability": 0.9,
             "speed_envelope": {"min": 50, "max": 150}}],
        "weapon_types": [
            {"id": "sam", "name": "SAM", "lethality_index": 0.9,
             "projectile_speed": 1000, "rof": 1, "stabilization_time": 2},
            {"id": "gun", "name": "Gun", "lethality_index": 0.6,
             "projectile_speed": 800, "rof": 5, "stabilization_time": 0.5}],
        "correlation": [
            {"weapon": "sam", "threat": "jet", "effectiveness": 0.8},
            {"weapon": "sam", "threat": "armored", "effectiveness": 0.3},
            {"weapon": "gun", "threat": "jet", "effectiveness": 0.4},
            {"weapon": "gun", "threat": "armored", "effectiveness": 0.05}]
    }"#,
    )
    .unwrap()
}

fn ws(id: &str, origin: Point2, sector: (f64, f64, f64, f64), weapon: &str) -> WeaponSystem {
    WeaponSystem {
        id: id.into(),
        da_id: "DA".into(),
        position: origin,
        sector: WSSector::new(origin, sector.0, sector.1, sector.2, sector.3, 1.3).unwrap(),
        weapon_type: weapon.into(),
        lethality_index: 0.9,
        projectile_speed: if weapon == "sam" { 1000.0 } else { 800.0 },
        rof: 1.0,
        stabilization_time: 2.0,
        condition: Condition::Up,
        status: FireStatus::FreeToFire,
        locked_target: None,
        queued_target: None,
        load: 0.0,
    }
}

fn plan(threat: &str, ws: &str, w: f64) -> EngagementPlan {
    EngagementPlan {
        threat_id: threat.into(),
        ws_id: ws.into(),
        entry: Point2::ORIGIN,
        exit: Point2::ORIGIN,
        entry_time: 0.0,
        exit_time: 10.0,
        fire_time: 0.0,
        tof: 1.0,
        required_elevation: 0.1,
        launch_point: Point2::ORIGIN,
        pair_weight: w,
    }
}

/// Random weapons around the origin and inbound tracks.
fn battlefield(seed: u64) -> (Vec<WeaponSystem>, Vec<ThreatTrack>) {
    let mut rng = SplitMix(seed);
    let nw = 1 + rng.below(6);
    let nt = 1 + rng.below(12);
    let weapons = (0..nw)
        .map(|j| {
            let origin = Point2::new(rng.range(-4e3, 4e3), rng.range(-4e3, 4e3));
            let lo = rng.range(100.0, 800.0);
            let sweep = if rng.unit() < 0.5 { TAU } else { rng.range(0.5, TAU) };
            let kind = if rng.unit() < 0.7 { "sam" } else { "gun" };
            let mut w = ws(&format!("W{j}"), origin, (lo, lo + rng.range(2e3, 8e3), rng.range(0.0, TAU), sweep), kind);
            w.condition = [Condition::Up, Condition::Up, Condition::Up, Condition::Down, Condition::Destroyed][rng.below(5)];
            w
        })
        .collect();
    let tracks = (0..nt)
        .map(|k| {
            let start = Point2::from_angle(rng.range(0.0, TAU)) * rng.range(1e4, 3e4);
            let aim = Point2::new(rng.range(-3e3, 3e3), rng.range(-3e3, 3e3));
            let v = (aim - start).normalized().unwrap() * rng.range(100.0, 400.0);
            let kind = if rng.unit() < 0.8 { "jet" } else { "armored" };
            ThreatTrack::straight(&format!("T{k:02}"), kind, start, v, rng.range(50.0, 3000.0), 600.0)
        })
        .collect();
    (weapons, tracks)
}

fn requests(tracks: &[ThreatTrack], weapons: &[WeaponSystem], cat: &Catalog, cfg: &SimConfig) -> Vec<WaRequest> {
    tracks
        .iter()
        .map(|t| WaRequest { threat: t.id.clone(), plans: candidate_ws_set(t, None, weapons, cat, cfg) })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn assignment_respects_slot_and_lock_limits(seed in any::<u64>()) {
        let (cat, cfg) = (catalog(), SimConfig::default());
        let (mut weapons, tracks) = battlefield(seed);
        let reqs = requests(&tracks, &weapons, &cat, &cfg);
        let out = wa_assign(&reqs, &mut weapons);

        let mut per_ws: BTreeMap<&WsId, usize> = BTreeMap::new();
        let mut locks: BTreeMap<&ThreatId, usize> = BTreeMap::new();
        for w in &weapons {
            let n = usize::from(w.locked_target.is_some()) + usize::from(w.queued_target.is_some());
            per_ws.insert(&w.id, n);
            if let Some(t) = &w.locked_target {
                *locks.entry(t).or_default() += 1;
            }
            if w.condition != Condition::Up {
                prop_assert_eq!(n, 0);
            }
            if let (Some(a), Some(b)) = (&w.locked_target, &w.queued_target) {
                prop_assert_ne!(a, b);
            }
        }
        prop_assert!(per_ws.values().all(|n| *n <= 2));
        prop_assert!(locks.values().all(|n| *n == 1));
        prop_assert!(out.state.check().is_ok());
        prop_assert_eq!(out.accepted.len() + out.unassigned.len(), tracks.len());

        // Proposals only where the capability gate passed and a plan exists.
        for (w, t) in &out.state.proposals {
            let req = reqs.iter().find(|r| &r.threat == t).unwrap();
            prop_assert!(req.plans.iter().any(|p| &p.ws_id == w));
            let track = tracks.iter().find(|x| &x.id == t).unwrap();
            let weapon = weapons.iter().find(|x| &x.id == w).unwrap();
            prop_assert!(cat.correlation().effectiveness(&weapon.weapon_type, &track.threat_type) >= cfg.thresholds.min_capability);
        }

        // No dead assignments.
        for (t, (p, _)) in &out.accepted {
            let weapon = weapons.iter().find(|x| x.id == p.ws_id).unwrap();
            prop_assert!(weapon.sector.contains(p.launch_point), "{} launch point outside {}", t, weapon.id);
            prop_assert!(p.required_elevation <= weapon.sector.max_elevation);
            prop_assert!(p.entry_time < p.exit_time);
        }
    }

    #[test]
    fn scaling_all_weights_keeps_assignment(seed in any::<u64>(), k in 1e-3..1e3f64) {
        let (cat, cfg) = (catalog(), SimConfig::default());
        let (weapons, tracks) = battlefield(seed);
        let reqs = requests(&tracks, &weapons, &cat, &cfg);
        let scaled: Vec<WaRequest> = reqs
            .iter()
            .map(|r| WaRequest {
                threat: r.threat.clone(),
                plans: r.plans.iter().map(|p| EngagementPlan { pair_weight: p.pair_weight * k, ..p.clone() }).collect(),
            })
            .collect();
        let a = wa_assign(&reqs, &mut weapons.clone());
        let b = wa_assign(&scaled, &mut weapons.clone());
        let view = |o: &WaOutcome| o.accepted.iter().map(|(t, (p, s))| (t.clone(), p.ws_id.clone(), *s)).collect::<Vec<_>>();
        prop_assert_eq!(view(&a), view(&b));
        prop_assert_eq!(a.unassigned, b.unassigned);
    }

    #[test]
    fn candidates_only_cross_reachable_sectors(seed in any::<u64>()) {
        let (cat, cfg) = (catalog(), SimConfig::default());
        let (weapons, tracks) = battlefield(seed);
        for t in &tracks {
            let plans = candidate_ws_set(t, None, &weapons, &cat, &cfg);
            for w in &weapons {
                let listed = plans.iter().any(|p| p.ws_id == w.id);
                let (sampled, step) = common::sample_ray(t.position, t.heading, &w.sector, 1e-3);
                if w.condition != Condition::Up {
                    prop_assert!(!listed);
                }
                // A sector the extended track never enters is never offered,
                // short of a graze that falls between samples.
                if listed && sampled.is_none() {
                    let p = plans.iter().find(|p| p.ws_id == w.id).unwrap();
                    prop_assert!((p.exit_time - p.entry_time) * t.speed <= step);
                }
            }
        }
    }
}

/// Best total in threat order: each threat, in turn, takes the highest
/// weight it can still get, found by enumerating every feasible assignment.
fn lexicographic_best(weights: &[[Option<f64>; 2]]) -> Vec<Option<usize>> {
    let n = weights.len();
    let mut best: Option<(Vec<f64>, Vec<Option<usize>>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut choice = Vec::with_capacity(n);
        for _ in 0..n {
            choice.push(match c % 3 {
                0 => None,
                j => Some(j - 1),
            });
            c /= 3;
        }
        let feasible = choice.iter().enumerate().all(|(k, j)| j.map_or(true, |j| weights[k][j].is_some()))
            && (0..2).all(|j| choice.iter().filter(|x| **x == Some(j)).count() <= 2);
        if !feasible {
            continue;
        }
        // Unassigned scores below every real weight.
        let key: Vec<f64> = choice.iter().enumerate().map(|(k, j)| j.map_or(-1.0, |j| weights[k][j].unwrap())).collect();
        let better = match &best {
            None => true,
            Some((b, _)) => key.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, y)| x > y),
        };
        if better {
            best = Some((key, choice));
        }
    }
    best.unwrap().1
}

#[test]
fn four_threats_two_weapons_match_exhaustive_search() {
    let mut rng = SplitMix(404);
    for case in 0..200 {
        let weights: Vec<[Option<f64>; 2]> = (0..4)
            .map(|_| [0, 1].map(|_| (rng.unit() < 0.8).then(|| rng.unit())))
            .collect();
        let mut weapons = vec![
            ws("W0", Point2::ORIGIN, (100.0, 5000.0, 0.0, TAU), "sam"),
            ws("W1", Point2::ORIGIN, (100.0, 5000.0, 0.0, TAU), "sam"),
        ];
        let reqs: Vec<WaRequest> = weights
            .iter()
            .enumerate()
            .map(|(k, row)| WaRequest {
                threat: format!("T{k}").into(),
                plans: row
                    .iter()
                    .enumerate()
                    .filter_map(|(j, w)| w.map(|w| plan(&format!("T{k}"), &format!("W{j}"), w)))
                    .collect(),
            })
            .collect();
        let out = wa_assign(&reqs, &mut weapons);
        let expected = lexicographic_best(&weights);
        for (k, e) in expected.iter().enumerate() {
            let got = out.accepted.get(&ThreatId::from(format!("T{k}"))).map(|(p, _)| p.ws_id.to_string());
            assert_eq!(got, e.map(|j| format!("W{j}")), "case {case} threat {k}: {weights:?}");
        }
        // Capacity bound: at most two per weapon, so at most two locks.
        assert!(weapons.iter().filter(|w| w.locked_target.is_some()).count() <= 2);
    }
}

#[test]
fn earlier_threat_locks_later_queues() {
    let mut weapons = vec![ws("W", Point2::ORIGIN, (100.0, 5000.0, 0.0, TAU), "sam")];
    let reqs = vec![
        WaRequest { threat: "B".into(), plans: vec![plan("B", "W", 0.2)] },
        WaRequest { threat: "A".into(), plans: vec![plan("A", "W", 0.9)] },
    ];
    let out = wa_assign(&reqs, &mut weapons);
    assert_eq!(out.accepted[&ThreatId::from("B")].1, Slot::Lock);
    assert_eq!(out.accepted[&ThreatId::from("A")].1, Slot::Queue);
}

#[test]
fn destroyed_weapon_offers_nothing() {
    let (cat, cfg) = (catalog(), SimConfig::default());
    let t = ThreatTrack::straight("T", "jet", Point2::new(-20e3, 500.0), Point2::new(250.0, 0.0), 1000.0, 600.0);
    let mut w = ws("W", Point2::ORIGIN, (100.0, 5000.0, 0.0, TAU), "sam");
    assert_eq!(candidate_ws_set(&t, None, std::slice::from_ref(&w), &cat, &cfg).len(), 1);
    w.condition = Condition::Destroyed;
    assert!(candidate_ws_set(&t, None, std::slice::from_ref(&w), &cat, &cfg).is_empty());
    // Capability gate: the gun is too weak against armor.
    let armor = ThreatTrack::straight("A", "armored", Point2::new(-20e3, 500.0), Point2::new(100.0, 0.0), 0.0, 600.0);
    let gun = ws("G", Point2::ORIGIN, (100.0, 5000.0, 0.0, TAU), "gun");
    assert!(candidate_ws_set(&armor, None, &[gun], &cat, &cfg).is_empty());
}

#[test]
fn mode_boundary() {
    assert_eq!(select_mode(5, 10), Mode::Subtractive);
    assert_eq!(select_mode(10, 10), Mode::Subtractive);
    assert_eq!(select_mode(50, 10), Mode::Preferential);
}
