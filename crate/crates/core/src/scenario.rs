//! Scenario documents: parsing, cross-reference validation, and conversion
//! into simulation entities.

use crate::catalog::{Catalog, CatalogDocument, UNKNOWN_THREAT};
use crate::config::SimConfig;
use crate::diag::{self, check_positive, check_unit, Diagnostic};
use crate::geometry::{DAFootprint, Point2, WSSector};
use crate::ids::{DaId, ThreatId, ThreatTypeId, WeaponTypeId, WsId};
use crate::threat_eval::{DefendedAsset, FireStatus, ThreatTrack, Waypoint};
use crate::weapon_assign::{Condition, WeaponSystem};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario is invalid:\n{}", diag::join(.0))]
    Invalid(Vec<Diagnostic>),
}

impl ScenarioError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ScenarioError::Parse(e) => vec![Diagnostic::new(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )],
            ScenarioError::Invalid(d) => d.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DaSpec {
    pub id: DaId,
    pub center: Point2,
    pub radius: f64,
    pub priority: f64,
    pub vulnerability: f64,
    #[serde(default)]
    pub status: FireStatus,
    /// Per threat type; omitted types get the best lethality x effectiveness
    /// among the asset's weapon systems.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub kill_capability: BTreeMap<ThreatTypeId, f64>,
}

fn default_sweep() -> f64 {
    360.0
}

fn default_max_elevation() -> f64 {
    85.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WsSpec {
    pub id: WsId,
    pub da: DaId,
    pub position: Point2,
    pub weapon_type: WeaponTypeId,
    pub min_range: f64,
    pub max_range: f64,
    #[serde(default)]
    pub start_angle_deg: f64,
    #[serde(default = "default_sweep")]
    pub sweep_angle_deg: f64,
    #[serde(default = "default_max_elevation")]
    pub max_elevation_deg: f64,
    /// Overrides the weapon type's lethality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lethality_index: Option<f64>,
    #[serde(default)]
    pub condition: Condition,
    #[serde(default)]
    pub status: FireStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSpec {
    pub id: ThreatId,
    pub threat_type: ThreatTypeId,
    pub waypoints: Vec<Waypoint>,
}

/// The on-disk scenario layout (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub config: SimConfig,
    pub catalog: CatalogDocument,
    #[serde(default)]
    pub defended_assets: Vec<DaSpec>,
    #[serde(default)]
    pub weapon_systems: Vec<WsSpec>,
    #[serde(default)]
    pub tracks: Vec<TrackSpec>,
}

impl ScenarioDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario documents always serialize")
    }
}

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub config: SimConfig,
    pub catalog: Arc<Catalog>,
    pub das: Vec<DefendedAsset>,
    pub weapon_systems: Vec<WeaponSystem>,
    pub tracks: Vec<ThreatTrack>,
}

fn check_unique<'a, T: Ord + std::fmt::Display + 'a>(
    out: &mut Vec<Diagnostic>,
    section: &str,
    ids: impl Iterator<Item = &'a T>,
) {
    let mut seen = BTreeSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            out.push(Diagnostic::new(format!("{section}[{i}].id"), format!("duplicate id '{id}'")));
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &ScenarioDocument) -> Result<Self, ScenarioError> {
        let mut diags = doc.config.validate("config");
        let catalog = Catalog::build(&doc.catalog, "catalog", &mut diags);

        check_unique(&mut diags, "defended_assets", doc.defended_assets.iter().map(|d| &d.id));
        check_unique(&mut diags, "weapon_systems", doc.weapon_systems.iter().map(|w| &w.id));
        check_unique(&mut diags, "tracks", doc.tracks.iter().map(|t| &t.id));

        let known_type = |t: &ThreatTypeId| {
            t.as_str() == UNKNOWN_THREAT || doc.catalog.threat_types.iter().any(|tt| &tt.id == t)
        };

        let mut das = Vec::new();
        for (i, d) in doc.defended_assets.iter().enumerate() {
            let p = format!("defended_assets[{i}]");
            check_positive(&mut diags, format!("{p}.radius"), d.radius);
            check_unit(&mut diags, format!("{p}.priority"), d.priority);
            check_unit(&mut diags, format!("{p}.vulnerability"), d.vulnerability);
            if !d.center.is_finite() {
                diags.push(Diagnostic::new(format!("{p}.center"), "coordinates must be finite"));
            }
            for (t, v) in &d.kill_capability {
                let kp = format!("{p}.kill_capability.{t}");
                if !known_type(t) {
                    diags.push(Diagnostic::new(kp.clone(), format!("unknown threat type '{t}'")));
                }
                check_unit(&mut diags, kp, *v);
            }
            if let Ok(fp) = DAFootprint::new(d.center, d.radius) {
                das.push(DefendedAsset {
                    id: d.id.clone(),
                    footprint: fp,
                    priority: d.priority,
                    vulnerability_index: d.vulnerability,
                    status: d.status,
                    kill_capability: d.kill_capability.clone(),
                    weapon_ids: Vec::new(),
                    assigned_threats: BTreeSet::new(),
                });
            }
        }

        let mut weapons = Vec::new();
        for (i, w) in doc.weapon_systems.iter().enumerate() {
            let p = format!("weapon_systems[{i}]");
            if !doc.defended_assets.iter().any(|d| d.id == w.da) {
                diags.push(Diagnostic::new(
                    format!("{p}.da"),
                    format!("weapon system '{}' references missing defended asset '{}'", w.id, w.da),
                ));
            }
            let wt = doc.catalog.weapon_types.iter().find(|t| t.id == w.weapon_type);
            if wt.is_none() {
                diags.push(Diagnostic::new(
                    format!("{p}.weapon_type"),
                    format!("unknown weapon type '{}'", w.weapon_type),
                ));
            }
            if let Some(l) = w.lethality_index {
                check_unit(&mut diags, format!("{p}.lethality_index"), l);
            }
            let sector = WSSector::new(
                w.position,
                w.min_range,
                w.max_range,
                w.start_angle_deg.to_radians(),
                w.sweep_angle_deg.to_radians(),
                w.max_elevation_deg.to_radians(),
            );
            match (sector, wt) {
                (Ok(sector), Some(wt)) => weapons.push(WeaponSystem {
                    id: w.id.clone(),
                    da_id: w.da.clone(),
                    position: w.position,
                    sector,
                    weapon_type: w.weapon_type.clone(),
                    lethality_index: w.lethality_index.unwrap_or(wt.lethality_index),
                    projectile_speed: wt.projectile_speed,
                    rof: wt.rof,
                    stabilization_time: wt.stabilization_time,
                    condition: w.condition,
                    status: w.status,
                    locked_target: None,
                    queued_target: None,
                    load: 0.0,
                }),
                (Err(e), _) => diags.push(Diagnostic::new(format!("{p}.sector"), e.to_string())),
                _ => {}
            }
        }

        let mut tracks = Vec::new();
        for (i, t) in doc.tracks.iter().enumerate() {
            let p = format!("tracks[{i}]");
            if !known_type(&t.threat_type) {
                diags.push(Diagnostic::new(
                    format!("{p}.threat_type"),
                    format!("unknown threat type '{}' (use {UNKNOWN_THREAT})", t.threat_type),
                ));
            }
            if t.waypoints.is_empty() {
                diags.push(Diagnostic::new(format!("{p}.waypoints"), "at least one waypoint required"));
            }
            for (j, w) in t.waypoints.iter().enumerate() {
                let wp = format!("{p}.waypoints[{j}]");
                if ![w.t, w.x, w.y, w.alt].iter().all(|v| v.is_finite()) {
                    diags.push(Diagnostic::new(wp.clone(), "values must be finite"));
                }
                if w.alt < 0.0 {
                    diags.push(Diagnostic::new(format!("{wp}.alt"), "altitude must be >= 0"));
                }
                if w.t < 0.0 {
                    diags.push(Diagnostic::new(format!("{wp}.t"), "time must be >= 0"));
                }
                if j > 0 && !(w.t > t.waypoints[j - 1].t) {
                    diags.push(Diagnostic::new(format!("{wp}.t"), "waypoint times must strictly increase"));
                }
            }
            tracks.push(ThreatTrack::new(t.id.clone(), t.threat_type.clone(), t.waypoints.clone()));
        }

        let catalog = match catalog {
            Some(c) if diags.is_empty() => c,
            _ => return Err(ScenarioError::Invalid(diags)),
        };

        for da in &mut das {
            let own: Vec<&WeaponSystem> = weapons.iter().filter(|w| w.da_id == da.id).collect();
            da.weapon_ids = own.iter().map(|w| w.id.clone()).collect();
            for tt in catalog.threat_types() {
                da.kill_capability.entry(tt.id.clone()).or_insert_with(|| {
                    own.iter()
                        .map(|w| w.lethality_index * catalog.correlation().effectiveness(&w.weapon_type, &tt.id))
                        .fold(0.0, f64::max)
                });
            }
        }

        Ok(Scenario {
            name: doc.name.clone(),
            config: doc.config.clone(),
            catalog: Arc::new(catalog),
            das,
            weapon_systems: weapons,
            tracks,
        })
    }
}

/// Parses and validates, returning every finding.
pub fn validate_document(text: &str) -> Vec<Diagnostic> {
    match Scenario::from_json(text) {
        Ok(_) => Vec::new(),
        Err(e) => e.diagnostics(),
    }
}
