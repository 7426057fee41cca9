//! Seeded scenario generators and the standard type library.
//!
//! Correlation and performance figures in the standard library are
//! illustrative values chosen for this repository.

use crate::catalog::{CatalogDocument, CorrelationEntry, SpeedEnvelope, ThreatType, WeaponType};
use crate::config::SimConfig;
use crate::geometry::Point2;
use crate::scenario::{DaSpec, ScenarioDocument, TrackSpec, WsSpec};
use crate::threat_eval::{FireStatus, Waypoint};
use crate::weapon_assign::Condition;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

const THREATS: [(&str, &str, f64, f64, f64); 7] = [
    ("ground_attack", "Ground-attack aircraft", 0.80, 150.0, 300.0),
    ("fighter", "Fighter aircraft", 0.90, 200.0, 600.0),
    ("helicopter", "Helicopter", 0.50, 30.0, 90.0),
    ("interceptor", "Interceptor", 0.85, 250.0, 700.0),
    ("reconnaissance", "Reconnaissance aircraft", 0.40, 150.0, 250.0),
    ("trainer", "Trainer aircraft", 0.30, 100.0, 220.0),
    ("transport", "Transport aircraft", 0.35, 100.0, 250.0),
];

/// id, name, lethality, projectile speed, rate of fire, stabilization time.
const WEAPONS: [(&str, &str, f64, f64, f64, f64); 6] = [
    ("cannon", "Cannon", 0.40, 1000.0, 10.0, 1.0),
    ("rocket", "Rocket", 0.60, 700.0, 2.0, 2.0),
    ("ground_missile", "Ground missile", 0.90, 900.0, 0.5, 3.0),
    ("smart_bomb", "Smart bomb", 0.50, 300.0, 0.2, 5.0),
    ("free_fall_bomb", "Free fall bomb", 0.20, 200.0, 0.5, 4.0),
    ("low_level_attack_bomb", "Low level attack bomb", 0.30, 250.0, 0.5, 4.0),
];

/// Effectiveness rows per weapon, columns in `THREATS` order.
const EFFECTIVENESS: [[f64; 7]; 6] = [
    [0.60, 0.40, 0.80, 0.30, 0.50, 0.70, 0.60],
    [0.70, 0.55, 0.75, 0.45, 0.60, 0.70, 0.70],
    [0.90, 0.85, 0.70, 0.90, 0.90, 0.85, 0.95],
    [0.30, 0.10, 0.20, 0.05, 0.20, 0.30, 0.40],
    [0.10, 0.05, 0.15, 0.05, 0.10, 0.15, 0.20],
    [0.25, 0.10, 0.40, 0.05, 0.15, 0.25, 0.30],
];

/// Seven threat types by six weapon types, every pair listed.
pub fn standard_catalog() -> CatalogDocument {
    CatalogDocument {
        threat_types: THREATS
            .iter()
            .map(|&(id, name, cap, lo, hi)| ThreatType {
                id: id.into(),
                name: name.into(),
                base_capability: cap,
                speed_envelope: SpeedEnvelope { min: lo, max: hi },
                unknown: false,
            })
            .collect(),
        weapon_types: WEAPONS
            .iter()
            .map(|&(id, name, leth, vp, rof, stab)| WeaponType {
                id: id.into(),
                name: name.into(),
                lethality_index: leth,
                projectile_speed: vp,
                rof,
                stabilization_time: stab,
            })
            .collect(),
        correlation: WEAPONS
            .iter()
            .zip(EFFECTIVENESS)
            .flat_map(|(w, row)| {
                THREATS.iter().zip(row).map(move |(t, c)| CorrelationEntry {
                    weapon: w.0.into(),
                    threat: t.0.into(),
                    effectiveness: c,
                })
            })
            .collect(),
        unknown: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Relaxed,
    Stress,
    Starvation,
    Overutilization,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::Relaxed, Profile::Stress, Profile::Starvation, Profile::Overutilization];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Relaxed => "relaxed",
            Profile::Stress => "stress",
            Profile::Starvation => "starvation",
            Profile::Overutilization => "overutilization",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown profile '{0}' (expected relaxed, stress, starvation or overutilization)")]
pub struct UnknownProfile(pub String);

impl FromStr for Profile {
    type Err = UnknownProfile;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProfile(s.to_string()))
    }
}

/// Layout of a generated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub threats: usize,
    pub assets: usize,
    pub weapons: usize,
    /// Threats appear uniformly over this many seconds.
    pub spawn_window: f64,
    /// Distance from the target asset at which threats appear (m).
    pub spawn_range: f64,
}

impl Shape {
    pub fn of(profile: Profile) -> Self {
        match profile {
            Profile::Relaxed => Shape { threats: 5, assets: 10, weapons: 10, spawn_window: 60.0, spawn_range: 30_000.0 },
            Profile::Stress => Shape { threats: 50, assets: 10, weapons: 10, spawn_window: 150.0, spawn_range: 40_000.0 },
            Profile::Starvation => Shape { threats: 20, assets: 4, weapons: 4, spawn_window: 100.0, spawn_range: 30_000.0 },
            Profile::Overutilization => {
                Shape { threats: 30, assets: 3, weapons: 3, spawn_window: 30.0, spawn_range: 30_000.0 }
            }
        }
    }
}

/// Fast threat types used for inbound raids.
const RAID_TYPES: [&str; 6] = ["fighter", "ground_attack", "interceptor", "reconnaissance", "trainer", "transport"];

fn speed_for(rng: &mut ChaCha8Rng, ty: &str) -> f64 {
    let (_, _, _, lo, hi) = THREATS.iter().find(|t| t.0 == ty).expect("raid types are catalogued");
    let hi = hi.min(350.0);
    rng.gen_range(*lo..=hi.max(*lo))
}

fn raid_track(id: usize, ty: &str, start: Point2, end: Point2, t0: f64, speed: f64, alt: f64) -> TrackSpec {
    let dist = start.distance(end);
    TrackSpec {
        id: format!("T{:02}", id + 1).into(),
        threat_type: ty.into(),
        waypoints: vec![
            Waypoint { t: t0, x: start.x, y: start.y, alt },
            Waypoint { t: t0 + dist / speed, x: end.x, y: end.y, alt },
        ],
    }
}

fn asset(i: usize, center: Point2, priority: f64) -> DaSpec {
    DaSpec {
        id: format!("DA{:02}", i + 1).into(),
        center,
        radius: 500.0,
        priority,
        vulnerability: 0.6,
        status: FireStatus::FreeToFire,
        kill_capability: Default::default(),
    }
}

fn weapon(j: usize, da: &DaSpec, position: Point2, weapon_type: &str, max_range: f64) -> WsSpec {
    WsSpec {
        id: format!("WS{:02}", j + 1).into(),
        da: da.id.clone(),
        position,
        weapon_type: weapon_type.into(),
        min_range: 300.0,
        max_range,
        start_angle_deg: 0.0,
        sweep_angle_deg: 360.0,
        max_elevation_deg: 85.0,
        lethality_index: None,
        condition: Condition::Up,
        status: FireStatus::FreeToFire,
    }
}

/// Assets on a ring, weapons spread over the assets round robin (missiles
/// and rockets alternating), threats inbound from random bearings toward a
/// random asset.
pub fn generate_shape(name: &str, shape: &Shape, seed: u64) -> ScenarioDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = if shape.assets > 1 { 2_500.0 * shape.assets as f64 } else { 0.0 };
    let das: Vec<DaSpec> = (0..shape.assets)
        .map(|i| {
            let a = TAU * i as f64 / shape.assets.max(1) as f64;
            let center = Point2::from_angle(a) * ring;
            asset(i, center, (rng.gen_range(3..=10) as f64) / 10.0)
        })
        .collect();
    let wss: Vec<WsSpec> = (0..shape.weapons)
        .map(|j| {
            let da = &das[j % das.len()];
            let jitter = Point2::from_angle(rng.gen_range(0.0..TAU)) * rng.gen_range(0.0..800.0);
            let (ty, range) = if j % 2 == 0 { ("ground_missile", 8_000.0) } else { ("rocket", 6_000.0) };
            weapon(j, da, da.center + jitter, ty, range)
        })
        .collect();
    let tracks: Vec<TrackSpec> = (0..shape.threats)
        .map(|k| {
            let target = das.choose(&mut rng).expect("at least one asset").center;
            let bearing = rng.gen_range(0.0..TAU);
            let start = target + Point2::from_angle(bearing) * shape.spawn_range;
            let ty = *RAID_TYPES.choose(&mut rng).expect("non-empty");
            let speed = speed_for(&mut rng, ty);
            let t0 = (rng.gen_range(0.0..=shape.spawn_window) * 10.0).round() / 10.0;
            let alt = rng.gen_range(300.0..3000.0f64).round();
            raid_track(k, ty, start, target, t0, speed, alt)
        })
        .collect();
    ScenarioDocument {
        name: name.to_string(),
        config: SimConfig { seed, ..SimConfig::default() },
        catalog: standard_catalog(),
        defended_assets: das,
        weapon_systems: wss,
        tracks,
    }
}

/// Assets in a column; even ones get an omnidirectional weapon at their
/// center, odd ones a narrow north-facing weapon offset to the north.
/// Threats fly east or west straight at an asset, so those bound for odd
/// assets never cross any field of fire.
fn starvation(shape: &Shape, seed: u64) -> ScenarioDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let das: Vec<DaSpec> = (0..shape.assets)
        .map(|i| asset(i, Point2::new(0.0, 15_000.0 * i as f64), 0.5 + 0.1 * (i % 5) as f64))
        .collect();
    let wss: Vec<WsSpec> = das
        .iter()
        .enumerate()
        .map(|(j, da)| {
            if j % 2 == 0 {
                weapon(j, da, da.center, "ground_missile", 6_000.0)
            } else {
                WsSpec {
                    start_angle_deg: 60.0,
                    sweep_angle_deg: 60.0,
                    ..weapon(j, da, da.center + Point2::new(0.0, 4_000.0), "ground_missile", 6_000.0)
                }
            }
        })
        .collect();
    let tracks = (0..shape.threats)
        .map(|k| {
            let target = das[k % das.len()].center;
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let start = target + Point2::new(side * shape.spawn_range, 0.0);
            let ty = *RAID_TYPES.choose(&mut rng).expect("non-empty");
            let speed = speed_for(&mut rng, ty);
            let t0 = (rng.gen_range(0.0..=shape.spawn_window) * 10.0).round() / 10.0;
            raid_track(k, ty, start, target, t0, speed, 1000.0)
        })
        .collect();
    ScenarioDocument {
        name: Profile::Starvation.name().into(),
        config: SimConfig { seed, ..SimConfig::default() },
        catalog: standard_catalog(),
        defended_assets: das,
        weapon_systems: wss,
        tracks,
    }
}

pub fn generate(profile: Profile, seed: u64) -> ScenarioDocument {
    let shape = Shape::of(profile);
    match profile {
        Profile::Starvation => starvation(&shape, seed),
        _ => generate_shape(profile.name(), &shape, seed),
    }
}
