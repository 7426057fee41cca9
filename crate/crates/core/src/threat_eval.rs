//! Threat evaluation: capability, intent and opportunity indices, the DA
//! kill-probability product, and the weighted stable pairing of threats with
//! defended assets.

use crate::catalog::Catalog;
use crate::config::{DaPairWeights, SimConfig};
use crate::fuzzy::{clamp01, in_unit, weighted_sum};
use crate::geometry::{earliest_poi, DAFootprint, Point2, Poi, Vec2};
use crate::ids::{DaId, ThreatId, ThreatTypeId, WsId};
use crate::matching::{deferred_acceptance, MatchError, MatchInstance, Matching};
use crate::weapon_assign::Mode;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThreatEvalError {
    #[error("{0} = {1} outside [0, 1]")]
    OutOfUnitRange(&'static str, f64),
    #[error("kill-probability weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("exponent must be positive (got {0})")]
    Exponent(f64),
    #[error(transparent)]
    Matching(#[from] MatchError),
}

/// Engagement authority of a DA or WS.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FireStatus {
    #[default]
    FreeToFire,
    OnHold,
    Tight,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub alt: f64,
}

impl Waypoint {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// A hostile track and its current kinematic state and threat indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreatTrack {
    pub id: ThreatId,
    pub threat_type: ThreatTypeId,
    pub waypoints: Vec<Waypoint>,
    pub position: Point2,
    pub altitude: f64,
    pub velocity: Vec2,
    /// Vertical speed, positive when climbing.
    pub climb_rate: f64,
    pub speed: f64,
    /// Unit vector along velocity; kept from the last moving segment when
    /// the track stops.
    pub heading: Vec2,
    pub initial_threat_index: f64,
    pub intent_index: f64,
    pub capability_index: f64,
    pub refined_threat_index: f64,
    pub alive: bool,
}

impl ThreatTrack {
    /// A track parked at its first waypoint, not yet alive.
    pub fn new(id: ThreatId, threat_type: ThreatTypeId, waypoints: Vec<Waypoint>) -> Self {
        let first = waypoints.first().copied().unwrap_or(Waypoint { t: 0.0, x: 0.0, y: 0.0, alt: 0.0 });
        Self {
            id,
            threat_type,
            position: first.position(),
            altitude: first.alt,
            velocity: Vec2::ORIGIN,
            climb_rate: 0.0,
            speed: 0.0,
            heading: Vec2::new(1.0, 0.0),
            waypoints,
            initial_threat_index: 0.0,
            intent_index: 0.0,
            capability_index: 0.0,
            refined_threat_index: 0.0,
            alive: false,
        }
    }

    /// Straight-line track at constant velocity from `start`, convenient in
    /// tests and generators.
    pub fn straight(
        id: &str,
        threat_type: &str,
        start: Point2,
        velocity: Vec2,
        altitude: f64,
        duration: f64,
    ) -> Self {
        let end = start + velocity * duration;
        let mut t = Self::new(
            id.into(),
            threat_type.into(),
            vec![
                Waypoint { t: 0.0, x: start.x, y: start.y, alt: altitude },
                Waypoint { t: duration, x: end.x, y: end.y, alt: altitude },
            ],
        );
        t.velocity = velocity;
        t.speed = velocity.norm();
        if let Some(h) = velocity.normalized() {
            t.heading = h;
        }
        t.alive = true;
        t
    }
}

/// A protected zone with its engagement parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DefendedAsset {
    pub id: DaId,
    pub footprint: DAFootprint,
    pub priority: f64,
    pub vulnerability_index: f64,
    pub status: FireStatus,
    /// K.C per threat type. Types missing here cannot be engaged by this DA.
    pub kill_capability: BTreeMap<ThreatTypeId, f64>,
    pub weapon_ids: Vec<WsId>,
    pub assigned_threats: BTreeSet<ThreatId>,
}

impl DefendedAsset {
    /// K.C against `threat_type`, falling back to the unknown row.
    pub fn kill_capability_for(&self, threat_type: &ThreatTypeId, catalog: &Catalog) -> f64 {
        if let Some(v) = self.kill_capability.get(threat_type) {
            return *v;
        }
        let resolved = catalog.correlation().resolve(threat_type);
        self.kill_capability.get(resolved).copied().unwrap_or(0.0)
    }
}

/// One factor of the DA kill-probability product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KPInputs {
    pub w_intent: f64,
    pub w_capability: f64,
    pub w_load: f64,
    pub intent: f64,
    pub capability: f64,
    pub load: f64,
    pub correlation: f64,
    pub exponent: f64,
}

impl KPInputs {
    pub fn validate(&self) -> Result<(), ThreatEvalError> {
        let named = [
            ("W_I", self.w_intent),
            ("W_CI", self.w_capability),
            ("W_L", self.w_load),
            ("II", self.intent),
            ("CI", self.capability),
            ("Load", self.load),
            ("C", self.correlation),
        ];
        for (name, v) in named {
            if !in_unit(v) {
                return Err(ThreatEvalError::OutOfUnitRange(name, v));
            }
        }
        let sum = self.w_intent + self.w_capability + self.w_load;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ThreatEvalError::WeightSum(sum));
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(ThreatEvalError::Exponent(self.exponent));
        }
        Ok(())
    }

    /// `(W_I II + W_CI CI + W_L Load) C`.
    pub fn inner(&self) -> f64 {
        (self.w_intent * self.intent + self.w_capability * self.capability + self.w_load * self.load)
            * self.correlation
    }
}

/// `prod_k (1 - ((W_I II_k + W_CI CI_k + W_L Load_j) C_jk)^B_ij)` over the
/// threats facing one DA.
///
/// The factors are complements, so the product behaves like a survival
/// probability; [`da_kill_probability_complement`] gives `1 - product`.
pub fn da_kill_probability(inputs: &[KPInputs]) -> Result<f64, ThreatEvalError> {
    inputs.iter().try_fold(1.0, |acc, k| {
        k.validate()?;
        Ok(acc * (1.0 - k.inner().powf(k.exponent)))
    })
}

pub fn da_kill_probability_complement(inputs: &[KPInputs]) -> Result<f64, ThreatEvalError> {
    da_kill_probability(inputs).map(|p| 1.0 - p)
}

/// Capability index: fuzzy blend of the type's base capability and where
/// the current speed sits in the type's envelope.
pub fn compute_capability_index(track: &ThreatTrack, catalog: &Catalog, cfg: &SimConfig) -> f64 {
    let tt = catalog.threat_type(&track.threat_type);
    let w = cfg.weights.capability;
    clamp01(w.threat_type * tt.base_capability + w.speed * tt.speed_envelope.normalize(track.speed))
}

/// Geometry of one track relative to one DA.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DaRelation {
    /// Cosine of the angle between heading and the bearing to the DA
    /// center, floored at 0.
    pub alignment: f64,
    pub poi: Option<Poi>,
    /// Zero when the track is already inside the footprint.
    pub time_to_da: Option<f64>,
    /// Falling membership of `time_to_da`; 0 without a forward POI.
    pub proximity: f64,
    pub descent: f64,
    pub intent: f64,
}

pub fn assess(track: &ThreatTrack, da: &DefendedAsset, cfg: &SimConfig) -> DaRelation {
    let n = &cfg.normalizers;
    let to_center = da.footprint.center - track.position;
    let moving = track.speed > 0.0;
    let alignment = match to_center.normalized() {
        Some(b) if moving => clamp01(track.heading.dot(b)),
        // Sitting on the center, or hovering: no directional evidence.
        None => 1.0,
        Some(_) => 0.0,
    };
    let inside = da.footprint.contains(track.position);
    let poi = if moving && !inside {
        earliest_poi(track.position, track.heading, track.speed, &da.footprint)
            .ok()
            .flatten()
    } else {
        None
    };
    let time_to_da = if inside { Some(0.0) } else { poi.map(|p| p.time) };
    let proximity = time_to_da.map_or(0.0, |t| n.time_to_da.falling(t));
    let descent = n.descent_rate.rising(-track.climb_rate);
    let iw = cfg.weights.intent;
    let intent = match time_to_da {
        Some(_) => clamp01(iw.alignment * alignment + iw.proximity * proximity + iw.descent * descent),
        None => 0.5 * alignment,
    };
    DaRelation { alignment, poi, time_to_da, proximity, descent, intent }
}

/// Intent of `track` toward `da`: heading alignment, time to reach the
/// footprint, and descent rate. Without a forward POI only half the
/// alignment counts.
pub fn compute_intent_index(track: &ThreatTrack, da: &DefendedAsset, cfg: &SimConfig) -> f64 {
    assess(track, da, cfg).intent
}

/// Intent and capability blended with the kill-probability weights,
/// rescaled to [0, 1].
pub fn opportunity_index(intent: f64, capability: f64, cfg: &SimConfig) -> f64 {
    let w = cfg.weights.kp;
    clamp01((w.intent * intent + w.capability * capability) / (w.intent + w.capability))
}

/// Refined threat index of `track` with respect to `da`.
pub fn refine_threat_index(track: &ThreatTrack, da: &DefendedAsset, cfg: &SimConfig) -> f64 {
    let rel = assess(track, da, cfg);
    refine_from_terms(rel.intent, track.capability_index, rel.proximity, cfg)
}

pub fn refine_from_terms(intent: f64, capability: f64, proximity: f64, cfg: &SimConfig) -> f64 {
    let a = cfg.weights.refine_opportunity;
    clamp01(a * opportunity_index(intent, capability, cfg) + (1.0 - a) * proximity)
}

/// Normalized inputs to the DA-pair weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DaPairTerms {
    pub kill_capability: f64,
    pub time: f64,
    pub priority: f64,
    /// Free share of the DA, `1 - load fraction`.
    pub free_capacity: f64,
}

impl DaPairTerms {
    pub fn weight(&self, w: &DaPairWeights) -> f64 {
        weighted_sum(
            &w.as_array(),
            &[self.kill_capability, self.time, self.priority, self.free_capacity],
        )
    }
}

/// DA-pair weights for the active mode. Preferential mode multiplies the
/// priority weight by `mode_boost` and renormalizes.
pub fn effective_da_pair_weights(cfg: &SimConfig, mode: Mode) -> DaPairWeights {
    let mut w = cfg.weights.da_pair;
    if mode == Mode::Preferential {
        w.priority *= cfg.weights.mode_boost;
        let sum: f64 = w.as_array().iter().sum();
        if sum > 0.0 {
            w.kill_capability /= sum;
            w.time /= sum;
            w.priority /= sum;
            w.load /= sum;
        }
    }
    w
}

/// Weight of the (threat, DA) proposal, or `None` when the DA may not take
/// it (not free to fire, or kill capability below threshold).
pub fn da_pair_weight(
    track: &ThreatTrack,
    da: &DefendedAsset,
    load_fraction: f64,
    catalog: &Catalog,
    cfg: &SimConfig,
    mode: Mode,
) -> Option<f64> {
    if da.status != FireStatus::FreeToFire {
        return None;
    }
    let kc = da.kill_capability_for(&track.threat_type, catalog);
    if kc <= 0.0 || kc < cfg.thresholds.min_kill_capability {
        return None;
    }
    let rel = assess(track, da, cfg);
    let terms = DaPairTerms {
        kill_capability: kc,
        time: rel.proximity,
        priority: da.priority,
        free_capacity: clamp01(1.0 - load_fraction),
    };
    Some(terms.weight(&effective_da_pair_weights(cfg, mode)))
}

/// A DA offered to the pairing stage with its remaining capacity.
#[derive(Clone, Copy, Debug)]
pub struct DaSlot<'a> {
    pub da: &'a DefendedAsset,
    /// Additional threats the DA may take this cycle.
    pub capacity: usize,
    pub load_fraction: f64,
}

/// Threat-to-DA pairing of one decision cycle.
#[derive(Clone, Debug)]
pub struct TeAssignment {
    pub pairing: BTreeMap<ThreatId, DaId>,
    /// Threats no DA would take: leak risks.
    pub unmatched: Vec<ThreatId>,
    pub instance: MatchInstance<ThreatId, DaId>,
    pub matching: Matching<ThreatId, DaId>,
}

/// Pairs each threat with one defended asset by weighted deferred
/// acceptance. Threats propose in descending refined-threat-index order,
/// which also decides ties.
pub fn te_assign(
    threats: &[&ThreatTrack],
    slots: &[DaSlot<'_>],
    catalog: &Catalog,
    cfg: &SimConfig,
    mode: Mode,
) -> Result<TeAssignment, ThreatEvalError> {
    te_assign_gated(threats, slots, catalog, cfg, mode, |_, _| true)
}

/// [`te_assign`] with an extra pair gate, e.g. "some weapon of this DA can
/// ever reach the threat".
pub fn te_assign_gated(
    threats: &[&ThreatTrack],
    slots: &[DaSlot<'_>],
    catalog: &Catalog,
    cfg: &SimConfig,
    mode: Mode,
    can_engage: impl Fn(&ThreatTrack, &DefendedAsset) -> bool,
) -> Result<TeAssignment, ThreatEvalError> {
    let mut order: Vec<&ThreatTrack> = threats.iter().copied().filter(|t| t.alive).collect();
    order.sort_by(|a, b| {
        b.refined_threat_index
            .total_cmp(&a.refined_threat_index)
            .then_with(|| a.id.cmp(&b.id))
    });
    let open: Vec<&DaSlot<'_>> = slots
        .iter()
        .filter(|s| s.capacity > 0 && s.da.status == FireStatus::FreeToFire)
        .collect();
    let mut instance = MatchInstance::new(
        order.iter().map(|t| t.id.clone()),
        open.iter().map(|s| (s.da.id.clone(), s.capacity)),
    )?;
    for t in &order {
        for s in open.iter().filter(|s| can_engage(t, s.da)) {
            if let Some(w) = da_pair_weight(t, s.da, s.load_fraction, catalog, cfg, mode) {
                instance.allow(&t.id, &s.da.id, w)?;
            }
        }
    }
    let matching = deferred_acceptance(&instance);
    let unmatched = order
        .iter()
        .filter(|t| matching.unmatched.contains(&t.id))
        .map(|t| t.id.clone())
        .collect();
    Ok(TeAssignment {
        pairing: matching.assignment.clone(),
        unmatched,
        instance,
        matching,
    })
}

/// Per-DA limit on concurrently paired threats: two per operational WS
/// (one locked, one queued). Preferential mode rations it by priority
/// relative to the most valuable DA.
pub fn da_capacity(
    operational_ws: usize,
    priority: f64,
    max_priority: f64,
    mode: Mode,
    cfg: &SimConfig,
) -> usize {
    let base = 2 * operational_ws;
    if mode == Mode::Preferential && cfg.ration_capacity && max_priority > 0.0 && base > 0 {
        ((base as f64 * priority / max_priority).ceil() as usize).clamp(1, base)
    } else {
        base
    }
}
