//! Target-by-target greedy allocation used as the comparison policy.

use crate::catalog::Catalog;
use crate::config::SimConfig;
use crate::threat_eval::ThreatTrack;
use crate::weapon_assign::{candidate_ws_set, greedy_place, WaOutcome, WaRequest, WeaponSystem};

/// A threat waiting for allocation and the tick it was first detected.
#[derive(Clone, Copy, Debug)]
pub struct Detected<'a> {
    pub track: &'a ThreatTrack,
    pub detected_at: u64,
}

/// Sorts by detection tick, then track id.
pub fn detection_order(threats: &mut [Detected<'_>]) {
    threats.sort_by(|a, b| a.detected_at.cmp(&b.detected_at).then_with(|| a.track.id.cmp(&b.track.id)));
}

/// Each threat, first detected first, takes the best free WS across every
/// defended asset. There is no pairing stage and no reconsideration of
/// earlier picks.
pub fn greedy_assign(
    threats: &[Detected<'_>],
    weapons: &mut [WeaponSystem],
    catalog: &Catalog,
    cfg: &SimConfig,
) -> WaOutcome {
    let mut ordered = threats.to_vec();
    detection_order(&mut ordered);
    // Candidate sets are taken before any placement, as in the two-stage
    // policy; placement re-checks free slots.
    let requests: Vec<WaRequest> = ordered
        .iter()
        .map(|d| WaRequest {
            threat: d.track.id.clone(),
            plans: candidate_ws_set(d.track, None, weapons, catalog, cfg),
        })
        .collect();
    greedy_place(&requests, weapons)
}
