//! Tunable weights, thresholds and membership breakpoints.
//!
//! Every field has a default so scenario documents only need to mention the
//! knobs they change.

use crate::diag::{check_unit, Diagnostic};
use crate::fuzzy::Ramp;
use crate::ids::{DaId, WsId};
use serde::{Deserialize, Serialize};

/// Weights of the intent, capability and load terms of the DA kill
/// probability (`W_I`, `W_CI`, `W_L`). Also used to blend intent and
/// capability into the opportunity index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KpWeights {
    pub intent: f64,
    pub capability: f64,
    pub load: f64,
}

impl Default for KpWeights {
    fn default() -> Self {
        Self { intent: 0.4, capability: 0.4, load: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapabilityWeights {
    pub threat_type: f64,
    pub speed: f64,
}

impl Default for CapabilityWeights {
    fn default() -> Self {
        Self { threat_type: 0.7, speed: 0.3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntentWeights {
    pub alignment: f64,
    pub proximity: f64,
    pub descent: f64,
}

impl Default for IntentWeights {
    fn default() -> Self {
        Self { alignment: 0.4, proximity: 0.4, descent: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DaPairWeights {
    pub kill_capability: f64,
    pub time: f64,
    pub priority: f64,
    pub load: f64,
}

impl Default for DaPairWeights {
    fn default() -> Self {
        Self { kill_capability: 0.25, time: 0.25, priority: 0.25, load: 0.25 }
    }
}

impl DaPairWeights {
    pub fn as_array(&self) -> [f64; 4] {
        [self.kill_capability, self.time, self.priority, self.load]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WsPairWeights {
    pub time: f64,
    pub elevation: f64,
    pub lethality: f64,
    pub stabilization: f64,
    pub rof: f64,
}

impl Default for WsPairWeights {
    fn default() -> Self {
        Self { time: 0.2, elevation: 0.2, lethality: 0.2, stabilization: 0.2, rof: 0.2 }
    }
}

impl WsPairWeights {
    pub fn as_array(&self) -> [f64; 5] {
        [self.time, self.elevation, self.lethality, self.stabilization, self.rof]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Weights {
    pub kp: KpWeights,
    pub capability: CapabilityWeights,
    pub intent: IntentWeights,
    /// Share of the opportunity term in the refined threat index; the rest
    /// goes to proximity.
    pub refine_opportunity: f64,
    pub da_pair: DaPairWeights,
    pub ws_pair: WsPairWeights,
    /// Multiplier on the DA-priority weight in preferential mode.
    pub mode_boost: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            kp: KpWeights::default(),
            capability: CapabilityWeights::default(),
            intent: IntentWeights::default(),
            refine_opportunity: 0.6,
            da_pair: DaPairWeights::default(),
            ws_pair: WsPairWeights::default(),
            mode_boost: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Tracks enter evaluation once their initial threat index reaches this.
    pub initial_trigger: f64,
    /// Minimum weapon/threat correlation for a WS to be proposed to.
    pub min_capability: f64,
    /// Minimum DA kill capability for a threat to propose to that DA.
    pub min_kill_capability: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { initial_trigger: 0.0, min_capability: 0.1, min_kill_capability: 0.1 }
    }
}

/// Breakpoints of the membership functions (seconds, m/s, rounds/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Normalizers {
    /// Falling: short times score high.
    pub time_to_da: Ramp,
    /// Falling.
    pub time_to_ws: Ramp,
    /// Rising, on descent rate (positive = losing altitude).
    pub descent_rate: Ramp,
    /// Falling.
    pub stabilization: Ramp,
    /// Rising.
    pub rof: Ramp,
}

impl Default for Normalizers {
    fn default() -> Self {
        Self {
            time_to_da: Ramp::new(10.0, 300.0),
            time_to_ws: Ramp::new(0.0, 120.0),
            descent_rate: Ramp::new(0.0, 50.0),
            stabilization: Ramp::new(0.5, 10.0),
            rof: Ramp::new(0.0, 10.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairExponent {
    pub da: DaId,
    pub ws: WsId,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KillModel {
    /// Default `B` exponent of the DA kill-probability factors.
    pub exponent: f64,
    /// Per (DA, WS) overrides of the exponent.
    pub pair_exponents: Vec<PairExponent>,
}

impl Default for KillModel {
    fn default() -> Self {
        Self { exponent: 1.0, pair_exponents: Vec::new() }
    }
}

impl KillModel {
    pub fn exponent_for(&self, da: &DaId, ws: &WsId) -> f64 {
        self.pair_exponents
            .iter()
            .find(|p| &p.da == da && &p.ws == ws)
            .map_or(self.exponent, |p| p.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Seconds per tick; one decision cycle runs every tick.
    pub tick: f64,
    pub horizon: f64,
    pub seed: u64,
    pub weights: Weights,
    pub thresholds: Thresholds,
    pub normalizers: Normalizers,
    pub kill_model: KillModel,
    /// A WS only considers threats expected in its sector within this many
    /// seconds.
    pub engagement_horizon: f64,
    /// In preferential mode, shrink DA capacity in proportion to priority.
    pub ration_capacity: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tick: 0.1,
            horizon: 600.0,
            seed: 0,
            weights: Weights::default(),
            thresholds: Thresholds::default(),
            normalizers: Normalizers::default(),
            kill_model: KillModel::default(),
            engagement_horizon: 120.0,
            ration_capacity: true,
        }
    }
}

fn check_group(out: &mut Vec<Diagnostic>, path: &str, names: &[&str], values: &[f64], tol: f64) {
    for (n, v) in names.iter().zip(values) {
        check_unit(out, format!("{path}.{n}"), *v);
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > tol {
        out.push(Diagnostic::new(path, format!("weights must sum to 1 (got {sum})")));
    }
}

impl SimConfig {
    pub fn validate(&self, prefix: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let p = |s: &str| format!("{prefix}.{s}");
        if !(self.tick.is_finite() && self.tick > 0.0) {
            out.push(Diagnostic::new(p("tick"), "tick must be positive"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            out.push(Diagnostic::new(p("horizon"), "horizon must be positive"));
        }
        if !(self.engagement_horizon.is_finite() && self.engagement_horizon > 0.0) {
            out.push(Diagnostic::new(p("engagement_horizon"), "must be positive"));
        }
        let w = &self.weights;
        check_group(
            &mut out,
            &p("weights.kp"),
            &["intent", "capability", "load"],
            &[w.kp.intent, w.kp.capability, w.kp.load],
            1e-12,
        );
        if w.kp.intent + w.kp.capability <= 0.0 {
            out.push(Diagnostic::new(p("weights.kp"), "intent and capability weights cannot both be 0"));
        }
        check_group(
            &mut out,
            &p("weights.capability"),
            &["threat_type", "speed"],
            &[w.capability.threat_type, w.capability.speed],
            1e-9,
        );
        check_group(
            &mut out,
            &p("weights.intent"),
            &["alignment", "proximity", "descent"],
            &[w.intent.alignment, w.intent.proximity, w.intent.descent],
            1e-9,
        );
        check_group(
            &mut out,
            &p("weights.da_pair"),
            &["kill_capability", "time", "priority", "load"],
            &w.da_pair.as_array(),
            1e-9,
        );
        check_group(
            &mut out,
            &p("weights.ws_pair"),
            &["time", "elevation", "lethality", "stabilization", "rof"],
            &w.ws_pair.as_array(),
            1e-9,
        );
        if !(w.refine_opportunity > 0.0 && w.refine_opportunity < 1.0) {
            out.push(Diagnostic::new(p("weights.refine_opportunity"), "must lie in (0, 1)"));
        }
        if !(w.mode_boost.is_finite() && w.mode_boost >= 1.0) {
            out.push(Diagnostic::new(p("weights.mode_boost"), "must be >= 1"));
        }
        let t = &self.thresholds;
        check_unit(&mut out, p("thresholds.initial_trigger"), t.initial_trigger);
        check_unit(&mut out, p("thresholds.min_capability"), t.min_capability);
        check_unit(&mut out, p("thresholds.min_kill_capability"), t.min_kill_capability);
        let n = &self.normalizers;
        for (name, r) in [
            ("time_to_da", n.time_to_da),
            ("time_to_ws", n.time_to_ws),
            ("descent_rate", n.descent_rate),
            ("stabilization", n.stabilization),
            ("rof", n.rof),
        ] {
            if !r.is_valid() {
                out.push(Diagnostic::new(p(&format!("normalizers.{name}")), "need finite lo < hi"));
            }
        }
        if !(self.kill_model.exponent.is_finite() && self.kill_model.exponent > 0.0) {
            out.push(Diagnostic::new(p("kill_model.exponent"), "must be positive"));
        }
        for (i, e) in self.kill_model.pair_exponents.iter().enumerate() {
            if !(e.exponent.is_finite() && e.exponent > 0.0) {
                out.push(Diagnostic::new(p(&format!("kill_model.pair_exponents[{i}].exponent")), "must be positive"));
            }
        }
        out
    }
}
