//! Piecewise-linear track motion between timestamped waypoints.

use crate::threat_eval::ThreatTrack;

/// Where a track is relative to its waypoint span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Motion {
    /// Before the first waypoint; not yet in the scene.
    Pending,
    Moving,
    /// Past the last waypoint.
    Exited,
}

/// Moves `track` to time `t`. Position is interpolated between the
/// bracketing waypoints; velocity and climb rate are the finite differences
/// of that segment (the outgoing one at a waypoint). A single-waypoint
/// track is stationary from its timestamp onward.
pub fn step_kinematics(track: &mut ThreatTrack, t: f64) -> Motion {
    let w = &track.waypoints;
    let Some(first) = w.first().copied() else {
        return Motion::Exited;
    };
    if t < first.t - 1e-9 {
        return Motion::Pending;
    }
    let last = *w.last().expect("non-empty");
    if w.len() == 1 {
        track.position = first.position();
        track.altitude = first.alt;
        track.velocity = Default::default();
        track.climb_rate = 0.0;
        track.speed = 0.0;
        return Motion::Moving;
    }
    if t > last.t + 1e-9 {
        track.position = last.position();
        track.altitude = last.alt;
        return Motion::Exited;
    }
    let i = w.partition_point(|p| p.t <= t).clamp(1, w.len() - 1) - 1;
    let (a, b) = (w[i], w[i + 1]);
    let dt = b.t - a.t;
    let f = ((t - a.t) / dt).clamp(0.0, 1.0);
    track.position = a.position() + (b.position() - a.position()) * f;
    track.altitude = a.alt + (b.alt - a.alt) * f;
    track.velocity = (b.position() - a.position()) * (1.0 / dt);
    track.climb_rate = (b.alt - a.alt) / dt;
    track.speed = track.velocity.norm();
    if let Some(h) = track.velocity.normalized() {
        track.heading = h;
    }
    Motion::Moving
}
