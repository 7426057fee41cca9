//! Weapon assignment: engagement geometry for threat/WS pairs, pair weights,
//! and the best-first proposal protocol with one lock slot and a one-deep
//! queue per weapon system.

use crate::catalog::Catalog;
use crate::config::SimConfig;
use crate::fuzzy::{clamp01, weighted_sum};
use crate::geometry::{
    euclidean_distance, lead_and_launch, required_elevation, sector_entry_exit, Point2, WSSector,
};
use crate::ids::{DaId, ThreatId, WeaponTypeId, WsId};
use crate::threat_eval::{DefendedAsset, FireStatus, ThreatTrack};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Maximum threats scheduled (locked + queued) on one weapon system.
pub const MAX_SCHEDULED: usize = 2;

/// Candidate fire times probed across a sector passage.
const FIRE_PROBES: usize = 17;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[default]
    Up,
    Down,
    Destroyed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeaponSystem {
    pub id: WsId,
    pub da_id: DaId,
    pub position: Point2,
    pub sector: WSSector,
    pub weapon_type: WeaponTypeId,
    pub lethality_index: f64,
    pub projectile_speed: f64,
    pub rof: f64,
    pub stabilization_time: f64,
    pub condition: Condition,
    pub status: FireStatus,
    pub locked_target: Option<ThreatId>,
    pub queued_target: Option<ThreatId>,
    pub load: f64,
}

impl WeaponSystem {
    pub fn scheduled_count(&self) -> usize {
        usize::from(self.locked_target.is_some()) + usize::from(self.queued_target.is_some())
    }

    pub fn is_operational(&self) -> bool {
        self.condition == Condition::Up
    }

    /// Up, free to fire, and with a lock or queue slot open.
    pub fn can_accept(&self) -> bool {
        self.is_operational()
            && self.status == FireStatus::FreeToFire
            && self.scheduled_count() < MAX_SCHEDULED
    }

    pub fn holds(&self, threat: &ThreatId) -> bool {
        self.locked_target.as_ref() == Some(threat) || self.queued_target.as_ref() == Some(threat)
    }

    /// Drops `threat` from the lock or queue slot. A vacated lock is not
    /// refilled here; see [`WeaponSystem::promote`].
    pub fn release(&mut self, threat: &ThreatId) -> bool {
        if self.locked_target.as_ref() == Some(threat) {
            self.locked_target = None;
            true
        } else if self.queued_target.as_ref() == Some(threat) {
            self.queued_target = None;
            true
        } else {
            false
        }
    }

    /// Moves the queued threat into an empty lock slot.
    pub fn promote(&mut self) -> Option<&ThreatId> {
        if self.locked_target.is_none() {
            self.locked_target = self.queued_target.take();
            self.locked_target.as_ref()
        } else {
            None
        }
    }

    /// Clears both slots; used when the WS goes down.
    pub fn clear(&mut self) -> Vec<ThreatId> {
        self.locked_target.take().into_iter().chain(self.queued_target.take()).collect()
    }
}

/// Geometry and weight of one temporary (threat, WS) pairing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngagementPlan {
    pub threat_id: ThreatId,
    pub ws_id: WsId,
    pub entry: Point2,
    pub exit: Point2,
    /// Seconds from now until the track enters the sector (0 if inside).
    pub entry_time: f64,
    /// Infinite for a stationary track inside the sector.
    pub exit_time: f64,
    /// Earliest offset from now at which a shot can be released.
    pub fire_time: f64,
    pub tof: f64,
    pub required_elevation: f64,
    pub launch_point: Point2,
    pub pair_weight: f64,
}

/// First feasible shot over the track's passage through the sector.
fn first_shot(
    track: &ThreatTrack,
    ws: &WeaponSystem,
    entry_time: f64,
    exit_time: f64,
) -> Option<(f64, Point2, f64, f64)> {
    let probes: Vec<f64> = if exit_time.is_finite() {
        (0..FIRE_PROBES)
            .map(|i| entry_time + (exit_time - entry_time) * i as f64 / (FIRE_PROBES - 1) as f64)
            .collect()
    } else {
        vec![entry_time]
    };
    for tau in probes {
        let at = track.position + track.velocity * tau;
        let Ok(Some(lead)) = lead_and_launch(at, track.velocity, &ws.sector, ws.projectile_speed)
        else {
            continue;
        };
        let horizontal = euclidean_distance(lead.launch_point, ws.sector.origin);
        let altitude = (track.altitude + track.climb_rate * (tau + lead.tof)).max(0.0);
        let Ok(elevation) = required_elevation(horizontal, altitude) else {
            continue;
        };
        if elevation <= ws.sector.max_elevation {
            return Some((tau, lead.launch_point, lead.tof, elevation));
        }
    }
    None
}

/// Engagement geometry of `track` against `ws`, without the capability and
/// slot gates. `None` when the track never offers a shot in time.
pub fn plan_engagement(track: &ThreatTrack, ws: &WeaponSystem, cfg: &SimConfig) -> Option<EngagementPlan> {
    let (entry, exit, entry_time, exit_time) = if track.speed > 0.0 {
        let p = sector_entry_exit(track.position, track.heading, track.speed, &ws.sector).ok()??;
        (p.entry, p.exit, p.entry_time, p.exit_time)
    } else if ws.sector.contains(track.position) {
        (track.position, track.position, 0.0, f64::INFINITY)
    } else {
        return None;
    };
    if !(entry_time < exit_time) || entry_time > cfg.engagement_horizon {
        return None;
    }
    let (fire_time, launch_point, tof, elevation) = first_shot(track, ws, entry_time, exit_time)?;
    let mut plan = EngagementPlan {
        threat_id: track.id.clone(),
        ws_id: ws.id.clone(),
        entry,
        exit,
        entry_time,
        exit_time,
        fire_time,
        tof,
        required_elevation: elevation,
        launch_point,
        pair_weight: 0.0,
    };
    plan.pair_weight = ws_pair_weight(&plan, ws, cfg);
    Some(plan)
}

/// Normalized inputs to the WS-pair weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WsPairTerms {
    pub time: f64,
    pub elevation: f64,
    pub lethality: f64,
    pub stabilization: f64,
    pub rof: f64,
}

impl WsPairTerms {
    pub fn of(plan: &EngagementPlan, ws: &WeaponSystem, cfg: &SimConfig) -> Self {
        let n = &cfg.normalizers;
        Self {
            time: n.time_to_ws.falling(plan.entry_time),
            elevation: clamp01(1.0 - plan.required_elevation / ws.sector.max_elevation),
            lethality: clamp01(ws.lethality_index),
            stabilization: n.stabilization.falling(ws.stabilization_time),
            rof: n.rof.rising(ws.rof),
        }
    }

    pub fn weight(&self, cfg: &SimConfig) -> f64 {
        weighted_sum(
            &cfg.weights.ws_pair.as_array(),
            &[self.time, self.elevation, self.lethality, self.stabilization, self.rof],
        )
    }
}

pub fn ws_pair_weight(plan: &EngagementPlan, ws: &WeaponSystem, cfg: &SimConfig) -> f64 {
    WsPairTerms::of(plan, ws, cfg).weight(cfg)
}

/// Whether the track's current path ever crosses the WS field of fire,
/// regardless of when.
pub fn path_crosses_sector(track: &ThreatTrack, ws: &WeaponSystem) -> bool {
    if track.speed > 0.0 {
        matches!(
            sector_entry_exit(track.position, track.heading, track.speed, &ws.sector),
            Ok(Some(p)) if p.entry_time < p.exit_time
        )
    } else {
        ws.sector.contains(track.position)
    }
}

/// Some up, free-to-fire, capable WS of `da` lies across the track's path.
pub fn da_can_engage(
    track: &ThreatTrack,
    da: &DefendedAsset,
    weapons: &[WeaponSystem],
    catalog: &Catalog,
    cfg: &SimConfig,
) -> bool {
    weapons.iter().any(|ws| {
        ws.da_id == da.id
            && ws.is_operational()
            && ws.status == FireStatus::FreeToFire
            && passes_capability(track, ws, catalog, cfg)
            && path_crosses_sector(track, ws)
    })
}

/// Capability gate: the weapon type's effectiveness against the threat
/// type reaches the preference threshold.
pub fn passes_capability(track: &ThreatTrack, ws: &WeaponSystem, catalog: &Catalog, cfg: &SimConfig) -> bool {
    catalog.correlation().effectiveness(&ws.weapon_type, &track.threat_type)
        >= cfg.thresholds.min_capability
}

/// Plans for every WS that could engage `track`: capable weapon type, up,
/// free to fire, a slot open, and a reachable shot inside the sector.
/// `weapons` is filtered to those owned by `da` when one is given.
pub fn candidate_ws_set(
    track: &ThreatTrack,
    da: Option<&DefendedAsset>,
    weapons: &[WeaponSystem],
    catalog: &Catalog,
    cfg: &SimConfig,
) -> Vec<EngagementPlan> {
    weapons
        .iter()
        .filter(|ws| da.map_or(true, |d| ws.da_id == d.id))
        .filter(|ws| ws.can_accept() && passes_capability(track, ws, catalog, cfg))
        .filter_map(|ws| plan_engagement(track, ws, cfg))
        .collect()
}

/// Scheduled, locked and proposal indicator matrices, stored sparsely as
/// the set of (WS, threat) pairs equal to 1.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AssignmentState {
    pub scheduled: BTreeSet<(WsId, ThreatId)>,
    pub locked: BTreeSet<(WsId, ThreatId)>,
    pub proposals: BTreeSet<(WsId, ThreatId)>,
}

impl AssignmentState {
    pub fn from_weapons<'a>(weapons: impl IntoIterator<Item = &'a WeaponSystem>) -> Self {
        let mut s = Self::default();
        for ws in weapons {
            if let Some(t) = &ws.locked_target {
                s.locked.insert((ws.id.clone(), t.clone()));
                s.scheduled.insert((ws.id.clone(), t.clone()));
            }
            if let Some(t) = &ws.queued_target {
                s.scheduled.insert((ws.id.clone(), t.clone()));
            }
        }
        s
    }

    pub fn scheduled_on(&self, ws: &WsId) -> usize {
        self.scheduled.iter().filter(|(w, _)| w == ws).count()
    }

    pub fn locks_on(&self, threat: &ThreatId) -> usize {
        self.locked.iter().filter(|(_, t)| t == threat).count()
    }

    /// Checks the slot limit per WS, single lock per threat, locked implies
    /// scheduled, and that no threat is scheduled on two weapon systems.
    pub fn check(&self) -> Result<(), String> {
        let mut per_ws: BTreeMap<&WsId, usize> = BTreeMap::new();
        let mut per_threat: BTreeMap<&ThreatId, usize> = BTreeMap::new();
        for (w, t) in &self.scheduled {
            *per_ws.entry(w).or_default() += 1;
            *per_threat.entry(t).or_default() += 1;
        }
        if let Some((w, n)) = per_ws.iter().find(|(_, n)| **n > MAX_SCHEDULED) {
            return Err(format!("{w} has {n} scheduled threats"));
        }
        if let Some((t, n)) = per_threat.iter().find(|(_, n)| **n > 1) {
            return Err(format!("{t} scheduled on {n} weapon systems"));
        }
        let mut locks: BTreeMap<&ThreatId, usize> = BTreeMap::new();
        for pair in &self.locked {
            if !self.scheduled.contains(pair) {
                return Err(format!("{} locked on {} but not scheduled", pair.1, pair.0));
            }
            *locks.entry(&pair.1).or_default() += 1;
        }
        if let Some((t, n)) = locks.iter().find(|(_, n)| **n != 1) {
            return Err(format!("{t} locked on {n} weapon systems"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    Subtractive,
    Preferential,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Subtractive => "Subtractive",
            Mode::Preferential => "Preferential",
        })
    }
}

/// Subtractive while every threat can hold a lock; preferential once
/// threats outnumber lock slots.
pub fn select_mode(total_threats: usize, total_lock_capacity: usize) -> Mode {
    if total_threats <= total_lock_capacity {
        Mode::Subtractive
    } else {
        Mode::Preferential
    }
}

/// Slot a WS gave an accepted threat.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slot {
    Lock,
    Queue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WaEvent {
    Propose { threat: ThreatId, ws: WsId, weight: f64 },
    Accept { threat: ThreatId, ws: WsId, slot: Slot },
    Reject { threat: ThreatId, ws: WsId },
    /// No candidate WS took the threat this cycle.
    Unassigned { threat: ThreatId },
}

/// One threat's request to the assignment stage: its candidate plans.
#[derive(Clone, Debug)]
pub struct WaRequest {
    pub threat: ThreatId,
    pub plans: Vec<EngagementPlan>,
}

#[derive(Clone, Debug, Default)]
pub struct WaOutcome {
    pub accepted: BTreeMap<ThreatId, (EngagementPlan, Slot)>,
    pub unassigned: Vec<ThreatId>,
    pub events: Vec<WaEvent>,
    pub state: AssignmentState,
}

/// Plans sorted best first: weight descending, then WS id.
pub fn rank_plans(plans: &mut [EngagementPlan]) {
    plans.sort_by(|a, b| b.pair_weight.total_cmp(&a.pair_weight).then_with(|| a.ws_id.cmp(&b.ws_id)));
}

fn offer(ws: &mut WeaponSystem, threat: &ThreatId) -> Option<Slot> {
    if !(ws.is_operational() && ws.status == FireStatus::FreeToFire) || ws.holds(threat) {
        return None;
    }
    if ws.locked_target.is_none() {
        ws.locked_target = Some(threat.clone());
        Some(Slot::Lock)
    } else if ws.queued_target.is_none() {
        ws.queued_target = Some(threat.clone());
        Some(Slot::Queue)
    } else {
        None
    }
}

fn finish(weapons: &[WeaponSystem], mut out: WaOutcome) -> WaOutcome {
    let proposals = std::mem::take(&mut out.state.proposals);
    out.state = AssignmentState::from_weapons(weapons);
    out.state.proposals = proposals;
    if let Err(e) = out.state.check() {
        panic!("assignment constraint violated: {e}");
    }
    out
}

/// Runs the proposal protocol. Requests are served in the given order
/// (refined threat index, highest first); each threat proposes to its
/// candidates best first until one accepts. A WS with an empty lock slot
/// locks the threat, a locked WS with an empty queue enqueues it, and a
/// full WS rejects.
pub fn wa_assign(requests: &[WaRequest], weapons: &mut [WeaponSystem]) -> WaOutcome {
    let index: BTreeMap<WsId, usize> =
        weapons.iter().enumerate().map(|(i, w)| (w.id.clone(), i)).collect();
    let mut out = WaOutcome::default();
    for req in requests {
        let mut plans = req.plans.clone();
        rank_plans(&mut plans);
        let mut placed = false;
        for plan in plans {
            let Some(&i) = index.get(&plan.ws_id) else { continue };
            out.state.proposals.insert((plan.ws_id.clone(), req.threat.clone()));
            out.events.push(WaEvent::Propose {
                threat: req.threat.clone(),
                ws: plan.ws_id.clone(),
                weight: plan.pair_weight,
            });
            match offer(&mut weapons[i], &req.threat) {
                Some(slot) => {
                    out.events.push(WaEvent::Accept { threat: req.threat.clone(), ws: plan.ws_id.clone(), slot });
                    out.accepted.insert(req.threat.clone(), (plan, slot));
                    placed = true;
                    break;
                }
                None => out.events.push(WaEvent::Reject { threat: req.threat.clone(), ws: plan.ws_id.clone() }),
            }
        }
        if !placed {
            out.unassigned.push(req.threat.clone());
            out.events.push(WaEvent::Unassigned { threat: req.threat.clone() });
        }
    }
    finish(weapons, out)
}

/// Target-by-target allocation: each request, in the order given, takes
/// the highest-weight WS that still has a slot. No proposals are recorded
/// and nothing already scheduled is revisited.
pub fn greedy_place(requests: &[WaRequest], weapons: &mut [WeaponSystem]) -> WaOutcome {
    let index: BTreeMap<WsId, usize> =
        weapons.iter().enumerate().map(|(i, w)| (w.id.clone(), i)).collect();
    let mut out = WaOutcome::default();
    for req in requests {
        let mut plans: Vec<&EngagementPlan> = req
            .plans
            .iter()
            .filter(|p| index.get(&p.ws_id).is_some_and(|&i| weapons[i].can_accept()))
            .collect();
        plans.sort_by(|a, b| b.pair_weight.total_cmp(&a.pair_weight).then_with(|| a.ws_id.cmp(&b.ws_id)));
        let placed = plans.first().and_then(|plan| {
            let slot = offer(&mut weapons[index[&plan.ws_id]], &req.threat)?;
            Some(((*plan).clone(), slot))
        });
        match placed {
            Some((plan, slot)) => {
                out.events.push(WaEvent::Accept { threat: req.threat.clone(), ws: plan.ws_id.clone(), slot });
                out.accepted.insert(req.threat.clone(), (plan, slot));
            }
            None => {
                out.unassigned.push(req.threat.clone());
                out.events.push(WaEvent::Unassigned { threat: req.threat.clone() });
            }
        }
    }
    finish(weapons, out)
}
