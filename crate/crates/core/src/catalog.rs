//! Threat and weapon libraries and their effectiveness correlation.
//!
//! The catalog document is JSON with three required sections and one
//! optional one:
//!
//! ```json
//! {
//!   "threat_types": [{ "id": "fighter", "name": "Fighter aircraft",
//!                      "base_capability": 0.8,
//!                      "speed_envelope": { "min": 150, "max": 650 } }],
//!   "weapon_types": [{ "id": "sam", "name": "Ground missile",
//!                      "lethality_index": 0.85, "projectile_speed": 900,
//!                      "rof": 0.5, "stabilization_time": 3 }],
//!   "correlation":  [{ "weapon": "sam", "threat": "fighter",
//!                      "effectiveness": 0.9 }],
//!   "unknown":      { "base_capability": 0.5,
//!                     "correlation": { "sam": 0.6 } }
//! }
//! ```
//!
//! Every (weapon, threat) pair must appear in `correlation`. Tracks whose
//! type is not in the library resolve to the reserved [`UNKNOWN_THREAT`]
//! type. Its row comes from `unknown.correlation` when given, otherwise
//! each weapon gets its lowest effectiveness against any known type.

use crate::diag::{self, check_positive, check_unit, Diagnostic};
use crate::ids::{ThreatTypeId, WeaponTypeId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Reserved id of the fallback threat type.
pub const UNKNOWN_THREAT: &str = "UNKNOWN";
pub const UNKNOWN_DEFAULT_CAPABILITY: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid catalog:\n{}", diag::join(.0))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedEnvelope {
    pub min: f64,
    pub max: f64,
}

impl SpeedEnvelope {
    /// Position of `speed` within the envelope, clamped to [0, 1].
    pub fn normalize(&self, speed: f64) -> f64 {
        if self.max > self.min {
            crate::fuzzy::clamp01((speed - self.min) / (self.max - self.min))
        } else if speed >= self.max {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreatType {
    pub id: ThreatTypeId,
    pub name: String,
    pub base_capability: f64,
    pub speed_envelope: SpeedEnvelope,
    #[serde(skip)]
    pub unknown: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeaponType {
    pub id: WeaponTypeId,
    pub name: String,
    pub lethality_index: f64,
    pub projectile_speed: f64,
    pub rof: f64,
    pub stabilization_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub weapon: WeaponTypeId,
    pub threat: ThreatTypeId,
    pub effectiveness: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnknownSpec {
    #[serde(default = "default_unknown_capability")]
    pub base_capability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_envelope: Option<SpeedEnvelope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<BTreeMap<WeaponTypeId, f64>>,
}

fn default_unknown_capability() -> f64 {
    UNKNOWN_DEFAULT_CAPABILITY
}

/// The on-disk catalog layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogDocument {
    pub threat_types: Vec<ThreatType>,
    pub weapon_types: Vec<WeaponType>,
    pub correlation: Vec<CorrelationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unknown: Option<UnknownSpec>,
}

/// Weapon-type x threat-type effectiveness, complete over both libraries
/// (including the unknown threat type).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelationTable {
    entries: BTreeMap<(WeaponTypeId, ThreatTypeId), f64>,
    threat_types: BTreeSet<ThreatTypeId>,
    weapon_types: BTreeSet<WeaponTypeId>,
}

impl CorrelationTable {
    /// Builds a table from explicit entries; returns `None` if any
    /// weapon/threat combination is missing.
    pub fn from_entries(
        entries: impl IntoIterator<Item = ((WeaponTypeId, ThreatTypeId), f64)>,
    ) -> Option<Self> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        let weapon_types: BTreeSet<_> = entries.keys().map(|(w, _)| w.clone()).collect();
        let threat_types: BTreeSet<_> = entries.keys().map(|(_, t)| t.clone()).collect();
        (entries.len() == weapon_types.len() * threat_types.len()).then_some(Self {
            entries,
            threat_types,
            weapon_types,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Maps types absent from the table onto the unknown row.
    pub fn resolve<'a>(&'a self, threat_type: &'a ThreatTypeId) -> &'a ThreatTypeId {
        if self.threat_types.contains(threat_type) {
            threat_type
        } else {
            self.threat_types
                .get(&ThreatTypeId::new(UNKNOWN_THREAT))
                .unwrap_or(threat_type)
        }
    }

    /// Effectiveness `C` of a weapon type against a threat type.
    pub fn effectiveness(&self, weapon: &WeaponTypeId, threat: &ThreatTypeId) -> f64 {
        let threat = self.resolve(threat);
        self.entries
            .get(&(weapon.clone(), threat.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn weapon_types(&self) -> impl Iterator<Item = &WeaponTypeId> {
        self.weapon_types.iter()
    }

    /// Weapon types able to engage `threat_type`, best first.
    pub fn preference_list(
        &self,
        threat_type: &ThreatTypeId,
        min_capability: f64,
    ) -> Vec<WeaponTypeId> {
        preference_list(threat_type, self, min_capability)
    }
}

/// Weapon types whose effectiveness against `threat_type` is at least
/// `min_capability`, sorted by effectiveness descending then weapon id.
pub fn preference_list(
    threat_type: &ThreatTypeId,
    table: &CorrelationTable,
    min_capability: f64,
) -> Vec<WeaponTypeId> {
    let mut ranked: Vec<(f64, &WeaponTypeId)> = table
        .weapon_types
        .iter()
        .map(|w| (table.effectiveness(w, threat_type), w))
        .filter(|(c, _)| *c >= min_capability)
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    ranked.into_iter().map(|(_, w)| w.clone()).collect()
}

/// Validated, immutable threat and weapon libraries.
#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    threat_types: BTreeMap<ThreatTypeId, ThreatType>,
    weapon_types: BTreeMap<WeaponTypeId, WeaponType>,
    correlation: CorrelationTable,
    unknown: Option<UnknownSpec>,
    explicit_entries: usize,
}

impl Catalog {
    pub fn threat_type(&self, id: &ThreatTypeId) -> &ThreatType {
        self.threat_types
            .get(id)
            .unwrap_or_else(|| &self.threat_types[&ThreatTypeId::new(UNKNOWN_THREAT)])
    }

    pub fn weapon_type(&self, id: &WeaponTypeId) -> Option<&WeaponType> {
        self.weapon_types.get(id)
    }

    pub fn is_known_threat(&self, id: &ThreatTypeId) -> bool {
        self.threat_types.get(id).is_some_and(|t| !t.unknown)
    }

    pub fn threat_types(&self) -> impl Iterator<Item = &ThreatType> {
        self.threat_types.values()
    }

    pub fn weapon_types(&self) -> impl Iterator<Item = &WeaponType> {
        self.weapon_types.values()
    }

    pub fn correlation(&self) -> &CorrelationTable {
        &self.correlation
    }

    /// Number of correlation entries supplied by the document (the derived
    /// unknown row excluded).
    pub fn explicit_entries(&self) -> usize {
        self.explicit_entries
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        load_catalogs(text)
    }

    pub fn from_document(doc: &CatalogDocument) -> Result<Self, CatalogError> {
        let mut diags = Vec::new();
        let cat = Self::build(doc, "", &mut diags);
        match cat {
            Some(c) if diags.is_empty() => Ok(c),
            _ => Err(CatalogError::Invalid(diags)),
        }
    }

    /// Validates `doc`, appending findings under `prefix`. Returns the
    /// catalog only when no finding was added.
    pub(crate) fn build(
        doc: &CatalogDocument,
        prefix: &str,
        diags: &mut Vec<Diagnostic>,
    ) -> Option<Self> {
        let start = diags.len();
        let path = |rest: String| {
            if prefix.is_empty() {
                rest
            } else {
                format!("{prefix}.{rest}")
            }
        };

        let mut threat_types = BTreeMap::new();
        for (i, t) in doc.threat_types.iter().enumerate() {
            let p = path(format!("threat_types[{i}]"));
            if t.id.as_str() == UNKNOWN_THREAT {
                diags.push(Diagnostic::new(
                    format!("{p}.id"),
                    format!("'{UNKNOWN_THREAT}' is reserved; use the 'unknown' section"),
                ));
            }
            check_unit(diags, format!("{p}.base_capability"), t.base_capability);
            check_envelope(diags, &format!("{p}.speed_envelope"), &t.speed_envelope);
            if threat_types.insert(t.id.clone(), t.clone()).is_some() {
                diags.push(Diagnostic::new(format!("{p}.id"), format!("duplicate threat type '{}'", t.id)));
            }
        }
        if doc.threat_types.is_empty() {
            diags.push(Diagnostic::new(path("threat_types".into()), "at least one threat type required"));
        }

        let mut weapon_types = BTreeMap::new();
        for (i, w) in doc.weapon_types.iter().enumerate() {
            let p = path(format!("weapon_types[{i}]"));
            check_unit(diags, format!("{p}.lethality_index"), w.lethality_index);
            if w.lethality_index <= 0.0 {
                diags.push(Diagnostic::new(format!("{p}.lethality_index"), "must be positive"));
            }
            check_positive(diags, format!("{p}.projectile_speed"), w.projectile_speed);
            check_positive(diags, format!("{p}.rof"), w.rof);
            check_positive(diags, format!("{p}.stabilization_time"), w.stabilization_time);
            if weapon_types.insert(w.id.clone(), w.clone()).is_some() {
                diags.push(Diagnostic::new(format!("{p}.id"), format!("duplicate weapon type '{}'", w.id)));
            }
        }
        if doc.weapon_types.is_empty() {
            diags.push(Diagnostic::new(path("weapon_types".into()), "at least one weapon type required"));
        }

        let mut entries = BTreeMap::new();
        for (i, e) in doc.correlation.iter().enumerate() {
            let p = path(format!("correlation[{i}]"));
            check_unit(diags, format!("{p}.effectiveness"), e.effectiveness);
            if !weapon_types.contains_key(&e.weapon) {
                diags.push(Diagnostic::new(format!("{p}.weapon"), format!("unknown weapon type '{}'", e.weapon)));
            }
            if !threat_types.contains_key(&e.threat) {
                diags.push(Diagnostic::new(format!("{p}.threat"), format!("unknown threat type '{}'", e.threat)));
            }
            if entries
                .insert((e.weapon.clone(), e.threat.clone()), e.effectiveness)
                .is_some()
            {
                diags.push(Diagnostic::new(
                    p,
                    format!("duplicate entry for ({}, {})", e.weapon, e.threat),
                ));
            }
        }
        for w in weapon_types.keys() {
            for t in threat_types.keys() {
                if !entries.contains_key(&(w.clone(), t.clone())) {
                    diags.push(Diagnostic::new(
                        path("correlation".into()),
                        format!("missing entry for pair ({w}, {t})"),
                    ));
                }
            }
        }
        let explicit_entries = entries.len();

        // Unknown row.
        let unknown_id = ThreatTypeId::new(UNKNOWN_THREAT);
        let spec = doc.unknown.clone().unwrap_or_default();
        let up = path("unknown".into());
        let base_capability = if doc.unknown.is_some() {
            spec.base_capability
        } else {
            UNKNOWN_DEFAULT_CAPABILITY
        };
        check_unit(diags, format!("{up}.base_capability"), base_capability);
        let envelope = spec.speed_envelope.unwrap_or_else(|| {
            let lo = threat_types.values().map(|t| t.speed_envelope.min).fold(f64::INFINITY, f64::min);
            let hi = threat_types.values().map(|t| t.speed_envelope.max).fold(0.0, f64::max);
            SpeedEnvelope {
                min: if lo.is_finite() { lo } else { 0.0 },
                max: hi,
            }
        });
        if spec.speed_envelope.is_some() {
            check_envelope(diags, &format!("{up}.speed_envelope"), &envelope);
        }
        for w in weapon_types.keys() {
            let eff = match &spec.correlation {
                Some(row) => match row.get(w) {
                    Some(v) => {
                        check_unit(diags, format!("{up}.correlation.{w}"), *v);
                        *v
                    }
                    None => {
                        diags.push(Diagnostic::new(
                            format!("{up}.correlation"),
                            format!("missing entry for pair ({w}, {UNKNOWN_THREAT})"),
                        ));
                        0.0
                    }
                },
                None => threat_types
                    .keys()
                    .filter_map(|t| entries.get(&(w.clone(), t.clone())).copied())
                    .fold(f64::INFINITY, f64::min)
                    .min(1.0),
            };
            entries.insert((w.clone(), unknown_id.clone()), eff);
        }
        if let Some(row) = &spec.correlation {
            for w in row.keys().filter(|w| !weapon_types.contains_key(*w)) {
                diags.push(Diagnostic::new(
                    format!("{up}.correlation.{w}"),
                    format!("unknown weapon type '{w}'"),
                ));
            }
        }
        threat_types.insert(
            unknown_id.clone(),
            ThreatType {
                id: unknown_id,
                name: "Unknown".into(),
                base_capability,
                speed_envelope: envelope,
                unknown: true,
            },
        );

        if diags.len() > start {
            return None;
        }
        let correlation = CorrelationTable::from_entries(entries)?;
        Some(Self {
            threat_types,
            weapon_types,
            correlation,
            unknown: doc.unknown.clone(),
            explicit_entries,
        })
    }

    /// Reconstructs the document this catalog was loaded from (entries in
    /// id order).
    pub fn to_document(&self) -> CatalogDocument {
        CatalogDocument {
            threat_types: self.threat_types.values().filter(|t| !t.unknown).cloned().collect(),
            weapon_types: self.weapon_types.values().cloned().collect(),
            correlation: self
                .correlation
                .entries
                .iter()
                .filter(|((_, t), _)| self.is_known_threat(t))
                .map(|((w, t), e)| CorrelationEntry {
                    weapon: w.clone(),
                    threat: t.clone(),
                    effectiveness: *e,
                })
                .collect(),
            unknown: self.unknown.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("catalog serializes")
    }
}

fn check_envelope(diags: &mut Vec<Diagnostic>, path: &str, e: &SpeedEnvelope) {
    if !(e.min.is_finite() && e.max.is_finite() && e.min >= 0.0 && e.min <= e.max) {
        diags.push(Diagnostic::new(
            path,
            format!("envelope must satisfy 0 <= min <= max (got {}..{})", e.min, e.max),
        ));
    }
}

/// Parses and validates a catalog document.
pub fn load_catalogs(text: &str) -> Result<Catalog, CatalogError> {
    let doc: CatalogDocument = serde_json::from_str(text)?;
    Catalog::from_document(&doc)
}
