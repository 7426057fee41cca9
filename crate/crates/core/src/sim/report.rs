//! Run summary.

use crate::ids::{DaId, ThreatId, WsId};
use crate::weapon_assign::Mode;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    #[default]
    TwoStage,
    Greedy,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::TwoStage => "two-stage",
            Policy::Greedy => "greedy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Destroyed,
    Leaker,
    Active,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CycleTiming {
    pub cycles: u64,
    pub mean_ms: f64,
    pub max_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: String,
    pub policy: Policy,
    pub seed: u64,
    pub ticks: u64,
    pub end_time: f64,
    pub tracks: usize,
    pub destroyed: usize,
    pub leakers: usize,
    pub active: usize,
    pub outcomes: BTreeMap<ThreatId, Outcome>,
    /// Priority times surviving fraction, per defended asset.
    pub da_survival: BTreeMap<DaId, f64>,
    pub total_survival: f64,
    pub shots: u64,
    pub kills: u64,
    pub misses: u64,
    /// Mode at the first cycle and at every change.
    pub mode_timeline: Vec<(f64, Mode)>,
    /// Threats paired with a defended asset at least once.
    pub allocated_to_da: BTreeSet<ThreatId>,
    /// Threats scheduled on a weapon system at least once.
    pub engaged: BTreeSet<ThreatId>,
    /// Threats at least one shot was fired at.
    pub covered: BTreeSet<ThreatId>,
    /// Weapon systems that never had a threat scheduled.
    pub idle_weapons: Vec<WsId>,
    pub max_scheduled: usize,
    /// Mean over cycles of the per-asset kill-probability product.
    pub mean_da_kill_probability: BTreeMap<DaId, f64>,
    /// Wall-clock figures; left out of the JSON so reports stay
    /// reproducible.
    #[serde(skip)]
    pub timing: CycleTiming,
}

impl SimReport {
    pub fn modes_seen(&self) -> BTreeSet<Mode> {
        self.mode_timeline.iter().map(|(_, m)| *m).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Fixed-width summary table.
    pub fn to_text(&self) -> String {
        let mut modes: Vec<String> = Vec::new();
        for (_, m) in &self.mode_timeline {
            if !modes.contains(&m.to_string()) {
                modes.push(m.to_string());
            }
        }
        let rows = [
            ("scenario", self.scenario.clone()),
            ("policy", self.policy.to_string()),
            ("seed", self.seed.to_string()),
            ("end time (s)", format!("{:.1}", self.end_time)),
            ("threats", self.tracks.to_string()),
            ("allocated to DA", self.allocated_to_da.len().to_string()),
            ("engaged by WS", self.engaged.len().to_string()),
            ("fired upon", self.covered.len().to_string()),
            ("destroyed", self.destroyed.to_string()),
            ("leakers", self.leakers.to_string()),
            ("active", self.active.to_string()),
            ("shots", self.shots.to_string()),
            ("idle WSs", self.idle_weapons.len().to_string()),
            ("mode", modes.join(" -> ")),
            ("max scheduled/WS", self.max_scheduled.to_string()),
            ("surviving value", format!("{:.4}", self.total_survival)),
            ("cycle time mean (ms)", format!("{:.3}", self.timing.mean_ms)),
            ("cycle time max (ms)", format!("{:.3}", self.timing.max_ms)),
        ];
        rows.iter().map(|(k, v)| format!("{k:<22}{v}\n")).collect()
    }
}
