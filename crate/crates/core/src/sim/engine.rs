//! Tick-driven engine running one observe/orient/decide/act cycle per tick.

use super::events::{Event, EventKind, EventLog};
use super::kinematics::{step_kinematics, Motion};
use super::report::{CycleTiming, Outcome, Policy, SimReport};
use crate::baseline_greedy::{greedy_assign, Detected};
use crate::catalog::Catalog;
use crate::config::SimConfig;
use crate::fuzzy::clamp01;
use crate::geometry::{euclidean_distance, lead_and_launch, required_elevation};
use crate::ids::{DaId, ThreatId, WsId};
use crate::scenario::Scenario;
use crate::threat_eval::{
    assess, compute_capability_index, da_capacity, da_kill_probability, opportunity_index,
    refine_from_terms, refine_threat_index, te_assign_gated, DaSlot, DefendedAsset, FireStatus, KPInputs,
    ThreatEvalError, ThreatTrack,
};
use crate::weapon_assign::{
    candidate_ws_set, da_can_engage, plan_engagement, select_mode, AssignmentState, Mode, Slot, WaEvent, WaOutcome,
    WaRequest, WeaponSystem, MAX_SCHEDULED,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;
use thiserror::Error;

const EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("t={t:.3}: assignment invariant violated: {msg}")]
    Invariant { t: f64, msg: String },
    #[error("t={t:.3}: {source}")]
    ThreatEval { t: f64, source: ThreatEvalError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotResult {
    Kill,
    Miss,
}

/// Bernoulli trial: `Kill` with probability `p`.
pub fn adjudicate_shot(p: f64, rng: &mut impl Rng) -> ShotResult {
    if rng.gen::<f64>() < p {
        ShotResult::Kill
    } else {
        ShotResult::Miss
    }
}

/// Per-shot kill probability: lethality times weapon/threat effectiveness.
pub fn shot_probability(ws: &WeaponSystem, track: &ThreatTrack, catalog: &Catalog) -> f64 {
    clamp01(ws.lethality_index * catalog.correlation().effectiveness(&ws.weapon_type, &track.threat_type))
}

/// The generator behind every adjudication of a run.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub policy: Policy,
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    /// Overrides the scenario's horizon (seconds).
    pub horizon: Option<f64>,
    /// Keep a copy of the assignment matrices after every cycle.
    pub record_cycles: bool,
}

/// Assignment matrices and DA pairing at the end of one decision cycle.
#[derive(Clone, Debug)]
pub struct CycleRecord {
    pub t: f64,
    pub state: AssignmentState,
    pub da_pairing: BTreeMap<ThreatId, DaId>,
    pub mode: Mode,
    pub wall_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: SimReport,
    pub log: EventLog,
    pub cycles: Vec<CycleRecord>,
}

#[derive(Clone, Debug)]
struct TrackRt {
    track: ThreatTrack,
    detected_at: Option<u64>,
    outcome: Option<Outcome>,
    logged_da: Option<DaId>,
    logged_risk: bool,
    /// Candidate set last reported for a threat no WS took.
    logged_unplaced: Option<Vec<WsId>>,
}

impl TrackRt {
    fn live(&self) -> bool {
        self.track.alive && self.outcome.is_none()
    }
}

#[derive(Clone, Debug, Default)]
struct WsRt {
    ready_at: f64,
    next_shot_at: f64,
    in_flight: bool,
    ever_scheduled: bool,
}

#[derive(Clone, Debug)]
struct Shot {
    resolve_at: f64,
    ws: usize,
    threat: usize,
    p: f64,
}

/// Mutable state of one scenario run.
pub struct Engine<'s> {
    scenario: &'s Scenario,
    cfg: SimConfig,
    policy: Policy,
    record_cycles: bool,
    tracks: Vec<TrackRt>,
    track_index: BTreeMap<ThreatId, usize>,
    weapons: Vec<WeaponSystem>,
    ws_rt: Vec<WsRt>,
    das: Vec<DefendedAsset>,
    da_fraction: Vec<f64>,
    pairing: BTreeMap<ThreatId, DaId>,
    shots: Vec<Shot>,
    rng: ChaCha8Rng,
    mode: Option<Mode>,
    tick: u64,
    t: f64,
    log: EventLog,
    cycles: Vec<CycleRecord>,
    mode_timeline: Vec<(f64, Mode)>,
    allocated: BTreeSet<ThreatId>,
    engaged: BTreeSet<ThreatId>,
    covered: BTreeSet<ThreatId>,
    shots_fired: u64,
    kills: u64,
    misses: u64,
    max_scheduled: usize,
    kp_sum: Vec<f64>,
    kp_cycles: u64,
    wall: Vec<f64>,
}

impl<'s> Engine<'s> {
    pub fn new(scenario: &'s Scenario, opts: &RunOptions) -> Self {
        let mut cfg = scenario.config.clone();
        if let Some(seed) = opts.seed {
            cfg.seed = seed;
        }
        if let Some(h) = opts.horizon {
            cfg.horizon = h;
        }
        let tracks: Vec<TrackRt> = scenario
            .tracks
            .iter()
            .map(|t| {
                let mut track = t.clone();
                track.alive = false;
                TrackRt {
                    track,
                    detected_at: None,
                    outcome: None,
                    logged_da: None,
                    logged_risk: false,
                    logged_unplaced: None,
                }
            })
            .collect();
        Self {
            scenario,
            policy: opts.policy,
            record_cycles: opts.record_cycles,
            track_index: tracks.iter().enumerate().map(|(i, t)| (t.track.id.clone(), i)).collect(),
            tracks,
            weapons: scenario.weapon_systems.clone(),
            ws_rt: vec![WsRt::default(); scenario.weapon_systems.len()],
            das: scenario.das.clone(),
            da_fraction: vec![1.0; scenario.das.len()],
            pairing: BTreeMap::new(),
            shots: Vec::new(),
            rng: seeded_rng(cfg.seed),
            mode: None,
            tick: 0,
            t: 0.0,
            log: EventLog::default(),
            cycles: Vec::new(),
            mode_timeline: Vec::new(),
            allocated: BTreeSet::new(),
            engaged: BTreeSet::new(),
            covered: BTreeSet::new(),
            shots_fired: 0,
            kills: 0,
            misses: 0,
            max_scheduled: 0,
            kp_sum: vec![0.0; scenario.das.len()],
            kp_cycles: 0,
            wall: Vec::new(),
            cfg,
        }
    }

    fn catalog(&self) -> &'s Catalog {
        &self.scenario.catalog
    }

    fn emit(&mut self, e: Event) {
        self.log.push(e);
    }

    /// Every track resolved and no shot still in the air.
    pub fn finished(&self) -> bool {
        self.tracks.iter().all(|t| t.outcome.is_some()) && self.shots.is_empty()
    }

    fn last_tick(&self) -> u64 {
        (self.cfg.horizon / self.cfg.tick + EPS).floor() as u64
    }

    /// Runs ticks until the horizon or until nothing is left to resolve.
    pub fn run(mut self) -> Result<RunOutput, SimError> {
        let last = self.last_tick();
        for n in 0..=last {
            self.decision_cycle(n)?;
            if self.finished() {
                break;
            }
        }
        Ok(self.into_output())
    }

    /// One full cycle at tick `n`.
    pub fn decision_cycle(&mut self, n: u64) -> Result<(), SimError> {
        let start = Instant::now();
        self.tick = n;
        self.t = n as f64 * self.cfg.tick;
        self.observe();
        let mode = self.orient();
        self.decide(mode)?;
        self.act();
        let state = AssignmentState::from_weapons(&self.weapons);
        state.check().map_err(|msg| SimError::Invariant { t: self.t, msg })?;
        for ws in &self.weapons {
            if !ws.is_operational() && ws.scheduled_count() > 0 {
                return Err(SimError::Invariant { t: self.t, msg: format!("{} is not up but holds targets", ws.id) });
            }
            self.max_scheduled = self.max_scheduled.max(ws.scheduled_count());
        }
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        self.wall.push(wall_ms);
        if self.record_cycles {
            self.cycles.push(CycleRecord {
                t: self.t,
                state,
                da_pairing: self.pairing.clone(),
                mode,
                wall_ms,
            });
        }
        Ok(())
    }

    fn resolve(&mut self, i: usize, outcome: Outcome) {
        let rt = &mut self.tracks[i];
        rt.outcome = Some(outcome);
        rt.track.alive = false;
        let id = rt.track.id.clone();
        for ws in &mut self.weapons {
            ws.release(&id);
        }
        self.pairing.remove(&id);
    }

    fn observe(&mut self) {
        let t = self.t;
        for i in 0..self.tracks.len() {
            if self.tracks[i].outcome.is_some() {
                continue;
            }
            match step_kinematics(&mut self.tracks[i].track, t) {
                Motion::Pending => {}
                Motion::Moving => self.tracks[i].track.alive = true,
                Motion::Exited => {
                    let id = self.tracks[i].track.id.clone();
                    self.resolve(i, Outcome::Leaker);
                    self.emit(Event::new(t, EventKind::Leak, id, "").with("reason", "exit"));
                }
            }
        }

        let (mut due, rest): (Vec<Shot>, Vec<Shot>) =
            self.shots.drain(..).partition(|s| s.resolve_at <= t + EPS);
        self.shots = rest;
        due.sort_by(|a, b| {
            a.resolve_at
                .total_cmp(&b.resolve_at)
                .then_with(|| self.weapons[a.ws].id.cmp(&self.weapons[b.ws].id))
        });
        for shot in due {
            self.ws_rt[shot.ws].in_flight = false;
            if !self.tracks[shot.threat].live() {
                continue;
            }
            let ws_id = self.weapons[shot.ws].id.clone();
            let threat_id = self.tracks[shot.threat].track.id.clone();
            match adjudicate_shot(shot.p, &mut self.rng) {
                ShotResult::Kill => {
                    self.kills += 1;
                    self.resolve(shot.threat, Outcome::Destroyed);
                    self.emit(Event::new(t, EventKind::Kill, ws_id, threat_id));
                }
                ShotResult::Miss => {
                    self.misses += 1;
                    self.emit(Event::new(t, EventKind::Miss, ws_id, threat_id));
                }
            }
        }

        for i in 0..self.tracks.len() {
            if !self.tracks[i].live() {
                continue;
            }
            let pos = self.tracks[i].track.position;
            if let Some(d) = self.das.iter().position(|d| d.footprint.contains(pos)) {
                let ci = self.tracks[i].track.capability_index;
                let damage = self.das[d].vulnerability_index * ci;
                self.da_fraction[d] *= 1.0 - damage;
                let (tid, did) = (self.tracks[i].track.id.clone(), self.das[d].id.clone());
                self.resolve(i, Outcome::Leaker);
                self.emit(Event::new(t, EventKind::Leak, tid, did).num("damage", damage));
            }
        }

        self.housekeeping();
        self.update_indices();

        for i in 0..self.tracks.len() {
            let rt = &self.tracks[i];
            if rt.live()
                && rt.detected_at.is_none()
                && rt.track.initial_threat_index >= self.cfg.thresholds.initial_trigger
            {
                let e = Event::new(t, EventKind::Detect, &rt.track.id, "")
                    .with("type", &rt.track.threat_type)
                    .num("index", rt.track.initial_threat_index);
                self.tracks[i].detected_at = Some(self.tick);
                self.emit(e);
            }
        }
    }

    /// Drops targets whose engagement window has closed and promotes queues.
    fn housekeeping(&mut self) {
        let t = self.t;
        for j in 0..self.weapons.len() {
            if !self.weapons[j].is_operational() {
                self.weapons[j].clear();
                continue;
            }
            let held: Vec<ThreatId> = self.weapons[j]
                .locked_target
                .iter()
                .chain(self.weapons[j].queued_target.iter())
                .cloned()
                .collect();
            for (slot, id) in held.iter().enumerate() {
                if slot == 0 && self.weapons[j].locked_target.as_ref() == Some(id) && self.ws_rt[j].in_flight {
                    continue;
                }
                let k = self.track_index[id];
                if plan_engagement(&self.tracks[k].track, &self.weapons[j], &self.cfg).is_none() {
                    self.weapons[j].release(id);
                    self.pairing.remove(id);
                    let e = Event::new(t, EventKind::Reject, &self.weapons[j].id, id).with("reason", "window_closed");
                    self.emit(e);
                }
            }
            if let Some(id) = self.weapons[j].promote().cloned() {
                self.ws_rt[j].ready_at = t + self.weapons[j].stabilization_time;
                let e = Event::new(t, EventKind::Promote, &self.weapons[j].id, id);
                self.emit(e);
            }
        }
    }

    fn update_indices(&mut self) {
        let catalog = self.catalog();
        for rt in &mut self.tracks {
            if !rt.live() {
                continue;
            }
            let tr = &mut rt.track;
            tr.capability_index = compute_capability_index(tr, catalog, &self.cfg);
            let (mut initial, mut intent, mut refined) = (0.0f64, 0.0f64, 0.0f64);
            for da in &self.das {
                let rel = assess(tr, da, &self.cfg);
                initial = initial.max(opportunity_index(rel.intent, tr.capability_index, &self.cfg));
                intent = intent.max(rel.intent);
                refined = refined.max(refine_from_terms(rel.intent, tr.capability_index, rel.proximity, &self.cfg));
            }
            tr.initial_threat_index = initial;
            tr.intent_index = intent;
            tr.refined_threat_index = refined;
        }
    }

    fn active(&self) -> Vec<usize> {
        (0..self.tracks.len())
            .filter(|&i| self.tracks[i].live() && self.tracks[i].detected_at.is_some())
            .collect()
    }

    fn orient(&mut self) -> Mode {
        let active = self.active();
        let capacity = self.weapons.iter().filter(|w| w.is_operational()).count();
        let mode = select_mode(active.len(), capacity);
        if self.mode != Some(mode) {
            if self.mode.is_some() {
                let e = Event::new(self.t, EventKind::Mode, "", "")
                    .with("mode", mode)
                    .with("threats", active.len())
                    .with("locks", capacity);
                self.emit(e);
            }
            self.mode = Some(mode);
            self.mode_timeline.push((self.t, mode));
        }
        self.evaluate_kill_probability();
        mode
    }

    /// Accumulates the per-asset kill-probability product over the threats
    /// currently paired with each asset.
    fn evaluate_kill_probability(&mut self) {
        let catalog = self.catalog();
        let kp = self.cfg.weights.kp;
        for (d, da) in self.das.iter().enumerate() {
            let mut inputs = Vec::new();
            for (tid, did) in &self.pairing {
                if did != &da.id {
                    continue;
                }
                let track = &self.tracks[self.track_index[tid]].track;
                let c = |w: &WeaponSystem| catalog.correlation().effectiveness(&w.weapon_type, &track.threat_type);
                let own = self.weapons.iter().filter(|w| w.da_id == da.id);
                let ws = own
                    .clone()
                    .find(|w| w.holds(tid))
                    .or_else(|| own.max_by(|a, b| c(a).total_cmp(&c(b)).then_with(|| b.id.cmp(&a.id))));
                let Some(ws) = ws else { continue };
                inputs.push(KPInputs {
                    w_intent: kp.intent,
                    w_capability: kp.capability,
                    w_load: kp.load,
                    intent: assess(track, da, &self.cfg).intent,
                    capability: track.capability_index,
                    load: ws.load,
                    correlation: c(ws),
                    exponent: self.cfg.kill_model.exponent_for(&da.id, &ws.id),
                });
            }
            self.kp_sum[d] += da_kill_probability(&inputs).unwrap_or(1.0);
        }
        self.kp_cycles += 1;
    }

    fn scheduled_anywhere(&self, id: &ThreatId) -> bool {
        self.weapons.iter().any(|w| w.holds(id))
    }

    fn decide(&mut self, mode: Mode) -> Result<(), SimError> {
        let pool: Vec<usize> = self
            .active()
            .into_iter()
            .filter(|&i| !self.scheduled_anywhere(&self.tracks[i].track.id))
            .collect();
        for &i in &pool {
            self.pairing.remove(&self.tracks[i].track.id);
        }
        if pool.is_empty() {
            return Ok(());
        }
        match self.policy {
            Policy::TwoStage => self.decide_two_stage(&pool, mode),
            Policy::Greedy => {
                self.decide_greedy(&pool);
                Ok(())
            }
        }
    }

    fn decide_two_stage(&mut self, pool: &[usize], mode: Mode) -> Result<(), SimError> {
        let t = self.t;
        let catalog = self.catalog();
        let max_priority = self.das.iter().map(|d| d.priority).fold(0.0, f64::max);
        let slots: Vec<DaSlot<'_>> = self
            .das
            .iter()
            .map(|da| {
                let own = self.weapons.iter().filter(|w| w.da_id == da.id);
                let op = own.clone().filter(|w| w.is_operational()).count();
                let sched: usize = own.map(|w| w.scheduled_count()).sum();
                let cap = da_capacity(op, da.priority, max_priority, mode, &self.cfg);
                let load_fraction = if op > 0 { sched as f64 / (MAX_SCHEDULED * op) as f64 } else { 1.0 };
                DaSlot { da, capacity: cap.saturating_sub(sched), load_fraction }
            })
            .collect();
        let threats: Vec<&ThreatTrack> = pool.iter().map(|&i| &self.tracks[i].track).collect();
        let weapons = &self.weapons;
        let cfg = &self.cfg;
        let te = te_assign_gated(&threats, &slots, catalog, cfg, mode, |t, da| {
            da_can_engage(t, da, weapons, catalog, cfg)
        })
            .map_err(|source| SimError::ThreatEval { t, source })?;
        drop(slots);

        let mut events = Vec::new();
        let mut requests = Vec::new();
        for tid in te.instance.proposers().to_vec() {
            let i = self.track_index[&tid];
            match te.pairing.get(&tid) {
                Some(did) => {
                    self.allocated.insert(tid.clone());
                    self.pairing.insert(tid.clone(), did.clone());
                    let rt = &mut self.tracks[i];
                    rt.logged_risk = false;
                    if rt.logged_da.as_ref() != Some(did) {
                        rt.logged_da = Some(did.clone());
                        let w = te.instance.weight(&tid, did).unwrap_or(0.0);
                        events.push(Event::new(t, EventKind::Accept, did, &tid).with("stage", "te").num("w", w));
                    }
                    let da = self.das.iter().find(|d| &d.id == did).expect("paired DA exists");
                    let refined = refine_threat_index(&self.tracks[i].track, da, &self.cfg);
                    self.tracks[i].track.refined_threat_index = refined;
                    let plans = candidate_ws_set(&self.tracks[i].track, Some(da), &self.weapons, catalog, &self.cfg);
                    requests.push((refined, WaRequest { threat: tid.clone(), plans }));
                }
                None => {
                    let rt = &mut self.tracks[i];
                    rt.logged_da = None;
                    if !rt.logged_risk {
                        rt.logged_risk = true;
                        events.push(Event::new(t, EventKind::Reject, &tid, "").with("reason", "leak_risk"));
                    }
                }
            }
        }
        for e in events {
            self.emit(e);
        }
        requests.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.threat.cmp(&b.1.threat)));
        let requests: Vec<WaRequest> = requests.into_iter().map(|(_, r)| r).collect();
        let out = crate::weapon_assign::wa_assign(&requests, &mut self.weapons);
        self.apply_outcome(&requests, out, true);
        Ok(())
    }

    fn decide_greedy(&mut self, pool: &[usize]) {
        let catalog = self.catalog();
        let detected: Vec<Detected<'_>> = pool
            .iter()
            .map(|&i| Detected { track: &self.tracks[i].track, detected_at: self.tracks[i].detected_at.unwrap_or(0) })
            .collect();
        let requests: Vec<WaRequest> = detected
            .iter()
            .map(|d| WaRequest {
                threat: d.track.id.clone(),
                plans: candidate_ws_set(d.track, None, &self.weapons, catalog, &self.cfg),
            })
            .collect();
        let mut weapons = std::mem::take(&mut self.weapons);
        let out = greedy_assign(&detected, &mut weapons, catalog, &self.cfg);
        drop(detected);
        self.weapons = weapons;
        self.apply_outcome(&requests, out, false);
    }

    /// Logs the assignment outcome and arms newly locked weapon systems.
    fn apply_outcome(&mut self, requests: &[WaRequest], out: WaOutcome, proposals: bool) {
        let t = self.t;
        let mut per_threat: BTreeMap<&ThreatId, Vec<&WaEvent>> = BTreeMap::new();
        for e in &out.events {
            let id = match e {
                WaEvent::Propose { threat, .. }
                | WaEvent::Accept { threat, .. }
                | WaEvent::Reject { threat, .. }
                | WaEvent::Unassigned { threat } => threat,
            };
            per_threat.entry(id).or_default().push(e);
        }
        let mut lines = Vec::new();
        for req in requests {
            let i = self.track_index[&req.threat];
            let accepted = out.accepted.get(&req.threat);
            let unplaced_key: Vec<WsId> = req.plans.iter().map(|p| p.ws_id.clone()).collect();
            if accepted.is_none() && self.tracks[i].logged_unplaced.as_ref() == Some(&unplaced_key) {
                continue;
            }
            for e in per_threat.get(&req.threat).into_iter().flatten() {
                match e {
                    WaEvent::Propose { threat, ws, weight } if proposals => {
                        lines.push(Event::new(t, EventKind::Propose, threat, ws).num("w", *weight));
                    }
                    WaEvent::Reject { threat, ws } => {
                        lines.push(Event::new(t, EventKind::Reject, ws, threat).with("reason", "full"));
                    }
                    WaEvent::Accept { threat, ws, slot } => {
                        if proposals {
                            lines.push(Event::new(t, EventKind::Accept, ws, threat).with("stage", "wa"));
                        }
                        let kind = match slot {
                            Slot::Lock => EventKind::Lock,
                            Slot::Queue => EventKind::Queue,
                        };
                        lines.push(Event::new(t, kind, ws, threat));
                    }
                    WaEvent::Unassigned { threat } => {
                        lines.push(Event::new(t, EventKind::Reject, threat, "").with("reason", "no_ws"));
                    }
                    _ => {}
                }
            }
            match accepted {
                Some((plan, slot)) => {
                    self.tracks[i].logged_unplaced = None;
                    self.engaged.insert(req.threat.clone());
                    let j = self.weapons.iter().position(|w| w.id == plan.ws_id).expect("accepting WS exists");
                    self.ws_rt[j].ever_scheduled = true;
                    if *slot == Slot::Lock {
                        self.ws_rt[j].ready_at = t + self.weapons[j].stabilization_time;
                    }
                    let da = self.weapons[j].da_id.clone();
                    if !proposals {
                        self.allocated.insert(req.threat.clone());
                    }
                    self.pairing.insert(req.threat.clone(), da);
                }
                None => self.tracks[i].logged_unplaced = Some(unplaced_key),
            }
        }
        for e in lines {
            self.emit(e);
        }
    }

    fn act(&mut self) {
        let t = self.t;
        let catalog = self.catalog();
        for j in 0..self.weapons.len() {
            let ws = &self.weapons[j];
            let rt = &self.ws_rt[j];
            let Some(target) = ws.locked_target.clone() else { continue };
            if !ws.is_operational()
                || ws.status != FireStatus::FreeToFire
                || rt.in_flight
                || t + EPS < rt.ready_at
                || t + EPS < rt.next_shot_at
            {
                continue;
            }
            let k = self.track_index[&target];
            let track = &self.tracks[k].track;
            if !self.tracks[k].live() {
                continue;
            }
            let Ok(Some(lead)) = lead_and_launch(track.position, track.velocity, &ws.sector, ws.projectile_speed)
            else {
                continue;
            };
            let horizontal = euclidean_distance(lead.launch_point, ws.sector.origin);
            let altitude = (track.altitude + track.climb_rate * lead.tof).max(0.0);
            match required_elevation(horizontal, altitude) {
                Ok(el) if el <= ws.sector.max_elevation => {}
                _ => continue,
            }
            let p = shot_probability(ws, track, catalog);
            let e = Event::new(t, EventKind::Fire, &ws.id, &target)
                .num("x", lead.launch_point.x)
                .num("y", lead.launch_point.y)
                .num("tof", lead.tof)
                .num("p", p);
            self.shots.push(Shot { resolve_at: t + lead.tof, ws: j, threat: k, p });
            let rt = &mut self.ws_rt[j];
            rt.in_flight = true;
            rt.next_shot_at = t + 1.0 / self.weapons[j].rof;
            self.shots_fired += 1;
            self.covered.insert(target);
            self.emit(e);
        }
        for ws in &mut self.weapons {
            ws.load = ws.scheduled_count() as f64 / MAX_SCHEDULED as f64;
        }
    }

    fn into_output(self) -> RunOutput {
        let mut outcomes = BTreeMap::new();
        let (mut destroyed, mut leakers, mut active) = (0, 0, 0);
        for rt in &self.tracks {
            let o = rt.outcome.unwrap_or(Outcome::Active);
            match o {
                Outcome::Destroyed => destroyed += 1,
                Outcome::Leaker => leakers += 1,
                Outcome::Active => active += 1,
            }
            outcomes.insert(rt.track.id.clone(), o);
        }
        let da_survival: BTreeMap<DaId, f64> = self
            .das
            .iter()
            .zip(&self.da_fraction)
            .map(|(d, f)| (d.id.clone(), d.priority * f))
            .collect();
        let n = self.kp_cycles.max(1) as f64;
        let timing = if self.wall.is_empty() {
            CycleTiming::default()
        } else {
            CycleTiming {
                cycles: self.wall.len() as u64,
                mean_ms: self.wall.iter().sum::<f64>() / self.wall.len() as f64,
                max_ms: self.wall.iter().copied().fold(0.0, f64::max),
            }
        };
        let report = SimReport {
            scenario: self.scenario.name.clone(),
            policy: self.policy,
            seed: self.cfg.seed,
            ticks: self.wall.len() as u64,
            end_time: self.t,
            tracks: self.tracks.len(),
            destroyed,
            leakers,
            active,
            outcomes,
            total_survival: da_survival.values().sum(),
            da_survival,
            shots: self.shots_fired,
            kills: self.kills,
            misses: self.misses,
            mode_timeline: self.mode_timeline,
            allocated_to_da: self.allocated,
            engaged: self.engaged,
            covered: self.covered,
            idle_weapons: self
                .weapons
                .iter()
                .zip(&self.ws_rt)
                .filter(|(_, rt)| !rt.ever_scheduled)
                .map(|(w, _)| w.id.clone())
                .collect(),
            max_scheduled: self.max_scheduled,
            mean_da_kill_probability: self.das.iter().zip(&self.kp_sum).map(|(d, s)| (d.id.clone(), s / n)).collect(),
            timing,
        };
        RunOutput { report, log: self.log, cycles: self.cycles }
    }
}

/// Runs `scenario` to completion.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunOutput, SimError> {
    Engine::new(scenario, opts).run()
}
