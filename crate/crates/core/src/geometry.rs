//! Planar intercept geometry.
//!
//! Defended assets are circles, threats are rays along their velocity
//! vector, weapon systems cover an annular wedge. Every computation runs on
//! the parametric ray `origin + s * direction` with a unit direction, so
//! vertical headings need no special casing. The slope-intercept quadratic
//! is still produced alongside for inspection whenever the slope exists.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Relative scale of the tangency band: a discriminant with
/// `|disc| <= TANGENCY_TOLERANCE * (1 + b^2)` counts as a single root.
pub const TANGENCY_TOLERANCE: f64 = 1e-9;

/// Boundary slack used by the sector membership predicate.
const SECTOR_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("direction vector has zero length")]
    ZeroDirection,
    #[error("speed must be positive (got {0})")]
    NonPositiveSpeed(f64),
    #[error("distance must be non-negative (got {0})")]
    NegativeDistance(f64),
    #[error("altitude must be non-negative (got {0})")]
    NegativeAltitude(f64),
    #[error("radius must be positive (got {0})")]
    NonPositiveRadius(f64),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A planar point or displacement, in meters (or m/s for velocities).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Displacements and velocities share the point representation.
pub type Vec2 = Point2;

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Rotates about the origin by `theta` radians (counter-clockwise).
    pub fn rotated(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        euclidean_distance(self, other)
    }

    fn check(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(GeometryError::NonFinite(what))
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// The extended velocity vector of a track: a ray from its current position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreatLine {
    origin: Point2,
    direction: Vec2,
}

impl ThreatLine {
    /// Builds the line through `origin` along `direction`; the direction is
    /// normalized here.
    pub fn new(origin: Point2, direction: Vec2) -> Result<Self> {
        origin.check("line origin")?;
        direction.check("line direction")?;
        let direction = direction.normalized().ok_or(GeometryError::ZeroDirection)?;
        Ok(Self { origin, direction })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    /// `m` in `y = m x + c`; `None` for vertical lines.
    pub fn slope(&self) -> Option<f64> {
        (self.direction.x != 0.0).then(|| self.direction.y / self.direction.x)
    }

    /// `c` in `y = m x + c`; `None` for vertical lines.
    pub fn intercept(&self) -> Option<f64> {
        self.slope().map(|m| self.origin.y - m * self.origin.x)
    }

    pub fn point_at(&self, s: f64) -> Point2 {
        self.origin + self.direction * s
    }
}

/// Circular footprint of a defended asset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DAFootprint {
    pub center: Point2,
    pub radius: f64,
}

impl DAFootprint {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        center.check("footprint center")?;
        if !radius.is_finite() {
            return Err(GeometryError::NonFinite("footprint radius"));
        }
        if radius <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: Point2) -> bool {
        euclidean_distance(p, self.center) <= self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub discriminant: f64,
}

impl QuadraticCoefficients {
    fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            discriminant: b * b - 4.0 * a * c,
        }
    }

    /// Real roots by the quadratic formula, ascending. A negative
    /// discriminant yields no roots.
    pub fn roots(&self) -> Vec<f64> {
        if self.discriminant < 0.0 {
            return Vec::new();
        }
        let sq = self.discriminant.sqrt();
        let mut r = vec![(-self.b - sq) / (2.0 * self.a), (-self.b + sq) / (2.0 * self.a)];
        r.sort_by(f64::total_cmp);
        r
    }
}

/// Result of intersecting a footprint circle with a threat line.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionSolution {
    /// The quadratic in `x` obtained by substituting `y = m x + c` into the
    /// circle equation. Absent for vertical lines.
    pub slope_form: Option<QuadraticCoefficients>,
    /// The quadratic in the ray parameter `s` (leading coefficient 1).
    /// Its discriminant drives the 0/1/2 classification.
    pub ray_form: QuadraticCoefficients,
    /// Ray parameters of the returned points, ascending.
    pub ray_params: Vec<f64>,
    pub points: Vec<Point2>,
}

impl IntersectionSolution {
    pub fn discriminant(&self) -> f64 {
        self.ray_form.discriminant
    }

    pub fn tolerance(&self) -> f64 {
        TANGENCY_TOLERANCE * (1.0 + self.ray_form.b * self.ray_form.b)
    }

    pub fn is_tangent(&self) -> bool {
        self.points.len() == 1
    }
}

/// Coefficients of the slope-intercept circle/line quadratic
/// `a x^2 + b x + c = 0`.
///
/// Expanding `(x - x0)^2 + (m x + c - y0)^2 = r^2` gives
/// `b = 2 (m c - x0 - m y0)`; the `m` factor on `y0` is required for the
/// roots to land on the circle.
pub fn slope_form_coefficients(
    footprint: &DAFootprint,
    slope: f64,
    intercept: f64,
) -> QuadraticCoefficients {
    let (x0, y0, r) = (footprint.center.x, footprint.center.y, footprint.radius);
    let (m, c) = (slope, intercept);
    QuadraticCoefficients::new(
        1.0 + m * m,
        2.0 * (m * c - x0 - m * y0),
        x0 * x0 + y0 * y0 + c * c - r * r - 2.0 * y0 * c,
    )
}

/// Intersects a footprint circle with the full (two-sided) threat line.
pub fn circle_line_intersections(
    footprint: &DAFootprint,
    line: &ThreatLine,
) -> IntersectionSolution {
    let d = line.direction();
    let w = line.origin() - footprint.center;
    let r = footprint.radius;
    let along = d.dot(w);
    // Perpendicular offset of the center from the line.
    let offset = d.cross(w);

    // s^2 + 2 (d.w) s + (|w|^2 - r^2) = 0. The discriminant is evaluated as
    // 4 (r^2 - offset^2), which avoids cancellation between b^2 and 4c.
    let b = 2.0 * along;
    let c = w.dot(w) - r * r;
    let discriminant = 4.0 * (r - offset.abs()) * (r + offset.abs());
    let ray_form = QuadraticCoefficients {
        a: 1.0,
        b,
        c,
        discriminant,
    };
    let tol = TANGENCY_TOLERANCE * (1.0 + b * b);

    let ray_params = if discriminant.abs() <= tol {
        vec![-along]
    } else if discriminant < 0.0 {
        Vec::new()
    } else {
        let half = (discriminant / 4.0).sqrt();
        vec![-along - half, -along + half]
    };
    let points = ray_params.iter().map(|&s| line.point_at(s)).collect();

    let slope_form = line
        .slope()
        .zip(line.intercept())
        .map(|(m, c)| slope_form_coefficients(footprint, m, c));

    IntersectionSolution {
        slope_form,
        ray_form,
        ray_params,
        points,
    }
}

/// Straight-line distance between two points.
pub fn euclidean_distance(p: Point2, q: Point2) -> f64 {
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    (dx * dx + dy * dy).sqrt()
}

/// Time to cover `distance` at constant `speed`.
pub fn time_to_point(distance: f64, speed: f64) -> Result<f64> {
    if !distance.is_finite() || !speed.is_finite() {
        return Err(GeometryError::NonFinite("time_to_point input"));
    }
    if speed <= 0.0 {
        return Err(GeometryError::NonPositiveSpeed(speed));
    }
    if distance < 0.0 {
        return Err(GeometryError::NegativeDistance(distance));
    }
    Ok(distance / speed)
}

/// Earliest forward crossing of a footprint boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Poi {
    pub point: Point2,
    pub distance: f64,
    pub time: f64,
}

/// Earliest point where the forward ray of a track meets the footprint
/// boundary, and the time to get there at the current speed.
///
/// Intersections behind the track are ignored. A track already inside the
/// footprint gets the exit crossing, since the entry lies behind it.
pub fn earliest_poi(
    track_position: Point2,
    heading: Vec2,
    speed: f64,
    footprint: &DAFootprint,
) -> Result<Option<Poi>> {
    if !(speed > 0.0) {
        return Err(GeometryError::NonPositiveSpeed(speed));
    }
    let line = ThreatLine::new(track_position, heading)?;
    let sol = circle_line_intersections(footprint, &line);
    let Some(i) = sol.ray_params.iter().position(|&s| s >= 0.0) else {
        return Ok(None);
    };
    let point = sol.points[i];
    let distance = euclidean_distance(point, track_position);
    Ok(Some(Poi {
        point,
        distance,
        time: time_to_point(distance, speed)?,
    }))
}

/// Field of fire of a weapon system: an annular wedge around `origin`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WSSector {
    pub origin: Point2,
    pub min_range: f64,
    pub max_range: f64,
    /// Counter-clockwise from +x, normalized to `[0, 2pi)`.
    pub start_angle: f64,
    pub sweep_angle: f64,
    pub max_elevation: f64,
}

impl WSSector {
    pub fn new(
        origin: Point2,
        min_range: f64,
        max_range: f64,
        start_angle: f64,
        sweep_angle: f64,
        max_elevation: f64,
    ) -> Result<Self> {
        origin.check("sector origin")?;
        for v in [min_range, max_range, start_angle, sweep_angle, max_elevation] {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite("sector parameter"));
            }
        }
        if !(min_range > 0.0 && min_range < max_range) {
            return Err(GeometryError::InvalidSector(format!(
                "ranges must satisfy 0 < min < max (got {min_range}..{max_range})"
            )));
        }
        if !(sweep_angle > 0.0 && sweep_angle <= TAU + 1e-12) {
            return Err(GeometryError::InvalidSector(format!(
                "sweep angle must lie in (0, 2pi] (got {sweep_angle})"
            )));
        }
        if !(max_elevation > 0.0 && max_elevation <= FRAC_PI_2) {
            return Err(GeometryError::InvalidSector(format!(
                "max elevation must lie in (0, pi/2] (got {max_elevation})"
            )));
        }
        Ok(Self {
            origin,
            min_range,
            max_range,
            start_angle: start_angle.rem_euclid(TAU),
            sweep_angle: sweep_angle.min(TAU),
            max_elevation,
        })
    }

    pub fn is_full_circle(&self) -> bool {
        self.sweep_angle >= TAU - 1e-12
    }

    /// Closed membership test (boundaries count as inside).
    pub fn contains(&self, p: Point2) -> bool {
        let r = euclidean_distance(p, self.origin);
        let slack = SECTOR_SLACK * self.max_range;
        if r < self.min_range - slack || r > self.max_range + slack {
            return false;
        }
        if self.is_full_circle() {
            return true;
        }
        let rel = p - self.origin;
        let a = (rel.y.atan2(rel.x) - self.start_angle).rem_euclid(TAU);
        a <= self.sweep_angle + SECTOR_SLACK || a >= TAU - SECTOR_SLACK
    }

    /// Same wedge rotated about the world origin.
    pub fn rotated(&self, theta: f64) -> Self {
        Self {
            origin: self.origin.rotated(theta),
            start_angle: (self.start_angle + theta).rem_euclid(TAU),
            ..*self
        }
    }
}

/// Where and when a track's forward ray first and last lies inside a sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorPassage {
    pub entry: Point2,
    pub exit: Point2,
    pub entry_time: f64,
    pub exit_time: f64,
}

/// Ray parameter where the ray meets the half-line `from + u * dir`, `u >= 0`.
fn ray_halfline(line: &ThreatLine, from: Point2, dir: Vec2) -> Option<f64> {
    let d = line.direction();
    let denom = d.cross(dir);
    if denom.abs() < 1e-12 {
        return None;
    }
    let q = from - line.origin();
    let s = q.cross(dir) / denom;
    let u = q.cross(d) / denom;
    (u >= 0.0).then_some(s)
}

/// First and last forward points of a track inside a weapon sector.
pub fn sector_entry_exit(
    track_position: Point2,
    heading: Vec2,
    speed: f64,
    sector: &WSSector,
) -> Result<Option<SectorPassage>> {
    if !(speed > 0.0) {
        return Err(GeometryError::NonPositiveSpeed(speed));
    }
    let line = ThreatLine::new(track_position, heading)?;

    let mut breaks = vec![0.0];
    for radius in [sector.min_range, sector.max_range] {
        let fp = DAFootprint::new(sector.origin, radius)?;
        breaks.extend(circle_line_intersections(&fp, &line).ray_params);
    }
    if !sector.is_full_circle() {
        for theta in [sector.start_angle, sector.start_angle + sector.sweep_angle] {
            breaks.extend(ray_halfline(&line, sector.origin, Point2::from_angle(theta)));
        }
    }
    breaks.retain(|s| *s >= 0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    // Inside-set is a union of intervals whose ends are breakpoints: probe
    // each breakpoint and each gap midpoint.
    let inside = |s: f64| sector.contains(line.point_at(s));
    let mut first: Option<f64> = None;
    let mut last: Option<f64> = None;
    let mut mark = |s: f64| {
        first = Some(first.map_or(s, |f| f.min(s)));
        last = Some(last.map_or(s, |l| l.max(s)));
    };
    for (i, &s) in breaks.iter().enumerate() {
        if inside(s) {
            mark(s);
        }
        if let Some(&next) = breaks.get(i + 1) {
            if inside(0.5 * (s + next)) {
                mark(s);
                mark(next);
            }
        }
    }

    let (Some(s_in), Some(s_out)) = (first, last) else {
        return Ok(None);
    };
    Ok(Some(SectorPassage {
        entry: line.point_at(s_in),
        exit: line.point_at(s_out),
        entry_time: time_to_point(s_in, speed)?,
        exit_time: time_to_point(s_out, speed)?,
    }))
}

/// Elevation angle needed to reach a target at the given altitude.
pub fn required_elevation(horizontal_distance: f64, target_altitude: f64) -> Result<f64> {
    if !horizontal_distance.is_finite() || !target_altitude.is_finite() {
        return Err(GeometryError::NonFinite("elevation input"));
    }
    if horizontal_distance <= 0.0 {
        return Err(GeometryError::Degenerate("zero horizontal distance"));
    }
    if target_altitude < 0.0 {
        return Err(GeometryError::NegativeAltitude(target_altitude));
    }
    Ok(target_altitude.atan2(horizontal_distance))
}

/// Intercept point and projectile time of flight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadSolution {
    pub launch_point: Point2,
    pub tof: f64,
}

/// Lead computation for a constant-speed projectile fired from the sector
/// origin at a constant-velocity target.
///
/// Solves `|P + V t - O| = v_p t` for the smallest non-negative `t`; the
/// solution is rejected when the intercept falls outside the sector.
pub fn lead_and_launch(
    track_position: Point2,
    track_velocity: Vec2,
    sector: &WSSector,
    projectile_speed: f64,
) -> Result<Option<LeadSolution>> {
    track_position.check("track position")?;
    track_velocity.check("track velocity")?;
    if !(projectile_speed > 0.0) || !projectile_speed.is_finite() {
        return Err(GeometryError::NonPositiveSpeed(projectile_speed));
    }
    let w = track_position - sector.origin;
    let vp2 = projectile_speed * projectile_speed;
    let a = track_velocity.dot(track_velocity) - vp2;
    let b = 2.0 * w.dot(track_velocity);
    let c = w.dot(w);

    let tof = if c == 0.0 {
        Some(0.0)
    } else if a.abs() <= 1e-12 * vp2 {
        (b < 0.0).then(|| -c / b)
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            None
        } else {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut roots = [q / a, c / q];
            roots.sort_by(f64::total_cmp);
            roots.into_iter().find(|t| *t >= 0.0 && t.is_finite())
        }
    };

    Ok(tof.and_then(|tof| {
        let launch_point = track_position + track_velocity * tof;
        sector.contains(launch_point).then_some(LeadSolution { launch_point, tof })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn unit_circle() -> DAFootprint {
        DAFootprint::new(Point2::ORIGIN, 1.0).unwrap()
    }

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn horizontal_line_through_unit_circle() {
        let line = ThreatLine::new(p(-5.0, 0.0), p(1.0, 0.0)).unwrap();
        let sol = circle_line_intersections(&unit_circle(), &line);
        assert_eq!(sol.points.len(), 2);
        assert!(close(sol.points[0], p(-1.0, 0.0), 1e-12));
        assert!(close(sol.points[1], p(1.0, 0.0), 1e-12));
    }

    #[test]
    fn tangent_line() {
        let line = ThreatLine::new(p(-5.0, 1.0), p(1.0, 0.0)).unwrap();
        let sol = circle_line_intersections(&unit_circle(), &line);
        assert!(sol.is_tangent());
        assert!(close(sol.points[0], p(0.0, 1.0), 1e-12));
    }

    #[test]
    fn offset_circle_diagonal_line() {
        let fp = DAFootprint::new(p(2.0, 3.0), 5.0).unwrap();
        let line = ThreatLine::new(p(-4.0, -4.0), p(1.0, 1.0)).unwrap();
        let sol = circle_line_intersections(&fp, &line);
        assert_eq!(sol.points.len(), 2);
        assert!(close(sol.points[0], p(-1.0, -1.0), 1e-12));
        assert!(close(sol.points[1], p(6.0, 6.0), 1e-12));
        for q in &sol.points {
            let lhs = (q.x - 2.0).powi(2) + (q.y - 3.0).powi(2);
            assert!((lhs - 25.0).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_form_roots_match_ray_points() {
        let fp = DAFootprint::new(p(2.0, 3.0), 5.0).unwrap();
        let line = ThreatLine::new(p(-4.0, -4.0), p(1.0, 1.0)).unwrap();
        let sol = circle_line_intersections(&fp, &line);
        let q = sol.slope_form.unwrap();
        // m = 1, c = 0: a = 2, b = 2(0 - 2 - 3) = -10, c = 4 + 9 - 25 = -12
        assert!((q.a - 2.0).abs() < 1e-12);
        assert!((q.b + 10.0).abs() < 1e-12);
        assert!((q.c + 12.0).abs() < 1e-12);
        let xs = q.roots();
        assert!((xs[0] + 1.0).abs() < 1e-12 && (xs[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn printed_b_without_slope_factor_misses_the_circle() {
        // m = 2, c = 1, center (1, 2), r = 3: dropping m from the y0 term
        // moves the roots off the circle.
        let fp = DAFootprint::new(p(1.0, 2.0), 3.0).unwrap();
        let (m, c) = (2.0, 1.0);
        let good = slope_form_coefficients(&fp, m, c);
        let bad = QuadraticCoefficients::new(good.a, 2.0 * (m * c - 1.0 - 2.0), good.c);
        let on_circle = |x: f64| {
            let y = m * x + c;
            ((x - 1.0).powi(2) + (y - 2.0).powi(2) - 9.0).abs()
        };
        assert!(good.roots().iter().all(|&x| on_circle(x) < 1e-9));
        assert!(bad.roots().iter().any(|&x| on_circle(x) > 1e-3));
    }

    #[test]
    fn vertical_line_has_no_slope_form() {
        let line = ThreatLine::new(p(0.5, -10.0), p(0.0, 3.0)).unwrap();
        assert!(line.slope().is_none());
        let sol = circle_line_intersections(&unit_circle(), &line);
        assert!(sol.slope_form.is_none());
        let h = (1.0f64 - 0.25).sqrt();
        assert!(close(sol.points[0], p(0.5, -h), 1e-12));
        assert!(close(sol.points[1], p(0.5, h), 1e-12));
    }

    #[test]
    fn miss_returns_empty() {
        let line = ThreatLine::new(p(-5.0, 2.0), p(1.0, 0.0)).unwrap();
        let sol = circle_line_intersections(&unit_circle(), &line);
        assert!(sol.points.is_empty());
        assert!(sol.discriminant() < 0.0);
    }

    #[test]
    fn zero_direction_rejected() {
        assert_eq!(
            ThreatLine::new(p(0.0, 0.0), p(0.0, 0.0)).unwrap_err(),
            GeometryError::ZeroDirection
        );
        assert!(ThreatLine::new(p(f64::NAN, 0.0), p(1.0, 0.0)).is_err());
    }

    #[test]
    fn earliest_poi_cases() {
        let poi = earliest_poi(p(-10.0, 0.0), p(1.0, 0.0), 1.0, &unit_circle())
            .unwrap()
            .unwrap();
        assert!(close(poi.point, p(-1.0, 0.0), 1e-12));
        assert!((poi.time - 9.0).abs() < 1e-12);

        assert!(earliest_poi(p(10.0, 0.0), p(1.0, 0.0), 1.0, &unit_circle())
            .unwrap()
            .is_none());

        let tangent = earliest_poi(p(-10.0, 1.0), p(1.0, 0.0), 1.0, &unit_circle())
            .unwrap()
            .unwrap();
        assert!(close(tangent.point, p(0.0, 1.0), 1e-12));
        assert!((tangent.time - 10.0).abs() < 1e-12);

        assert_eq!(
            earliest_poi(p(-10.0, 0.0), p(1.0, 0.0), 0.0, &unit_circle()),
            Err(GeometryError::NonPositiveSpeed(0.0))
        );
    }

    #[test]
    fn distances() {
        assert_eq!(euclidean_distance(p(0.0, 0.0), p(3.0, 4.0)), 5.0);
        assert_eq!(euclidean_distance(p(2.5, -7.0), p(2.5, -7.0)), 0.0);
        let d = euclidean_distance(p(-1.0, -1.0), p(6.0, 6.0));
        assert!((d - 7.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn times() {
        assert_eq!(time_to_point(1000.0, 250.0).unwrap(), 4.0);
        assert_eq!(time_to_point(0.0, 33.0).unwrap(), 0.0);
        assert_eq!(time_to_point(9.0, 1.0).unwrap(), 9.0);
        assert_eq!(
            time_to_point(1.0, 0.0),
            Err(GeometryError::NonPositiveSpeed(0.0))
        );
        assert_eq!(
            time_to_point(1.0, -2.0),
            Err(GeometryError::NonPositiveSpeed(-2.0))
        );
    }

    #[test]
    fn elevation() {
        assert!((required_elevation(1000.0, 1000.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(required_elevation(1000.0, 0.0).unwrap(), 0.0);
        assert!((required_elevation(1000.0, 577.35).unwrap() - FRAC_PI_6).abs() < 1e-6);
        assert!(matches!(
            required_elevation(0.0, 10.0),
            Err(GeometryError::Degenerate(_))
        ));
    }

    #[test]
    fn sector_validation() {
        assert!(WSSector::new(Point2::ORIGIN, 0.0, 5.0, 0.0, 1.0, 1.0).is_err());
        assert!(WSSector::new(Point2::ORIGIN, 5.0, 5.0, 0.0, 1.0, 1.0).is_err());
        assert!(WSSector::new(Point2::ORIGIN, 1.0, 5.0, 0.0, 0.0, 1.0).is_err());
        assert!(WSSector::new(Point2::ORIGIN, 1.0, 5.0, 0.0, 7.0, 1.0).is_err());
        assert!(WSSector::new(Point2::ORIGIN, 1.0, 5.0, -PI, TAU, 1.0).is_ok());
    }

    #[test]
    fn sector_membership_closed_on_boundaries() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 5.0, 0.0, FRAC_PI_2, 1.0).unwrap();
        assert!(s.contains(p(1.0, 0.0)));
        assert!(s.contains(p(0.0, 5.0)));
        assert!(s.contains(p(3.0, 3.0)));
        assert!(!s.contains(p(-1.0, 2.0)));
        assert!(!s.contains(p(0.5, 0.5)));
        assert!(!s.contains(p(4.0, 4.0)));
    }

    #[test]
    fn full_sector_matches_circle() {
        let s = WSSector::new(p(1.0, 1.0), 1e-6, 4.0, 0.3, TAU, 1.0).unwrap();
        let pass = sector_entry_exit(p(-10.0, 2.0), p(1.0, 0.0), 2.0, &s)
            .unwrap()
            .unwrap();
        let fp = DAFootprint::new(p(1.0, 1.0), 4.0).unwrap();
        let line = ThreatLine::new(p(-10.0, 2.0), p(1.0, 0.0)).unwrap();
        let sol = circle_line_intersections(&fp, &line);
        assert!(close(pass.entry, sol.points[0], 1e-9));
        assert!(close(pass.exit, sol.points[1], 1e-9));
        assert!((pass.entry_time - sol.ray_params[0] / 2.0).abs() < 1e-9);
    }

    #[test]
    fn sector_missed_entirely() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 5.0, 0.0, TAU, 1.0).unwrap();
        assert!(sector_entry_exit(p(-10.0, 6.0), p(1.0, 0.0), 1.0, &s)
            .unwrap()
            .is_none());
    }

    #[test]
    fn quarter_sector_crossing() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 5.0, 0.0, FRAC_PI_2, 1.0).unwrap();
        let pass = sector_entry_exit(p(-10.0, 2.0), p(1.0, 0.0), 1.0, &s)
            .unwrap()
            .unwrap();
        // Enters across the +y boundary ray at x = 0, leaves on the outer arc.
        assert!(close(pass.entry, p(0.0, 2.0), 1e-12));
        assert!(close(pass.exit, p(21f64.sqrt(), 2.0), 1e-12));
        assert!((pass.entry_time - 10.0).abs() < 1e-12);
    }

    #[test]
    fn lead_stationary_target() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 500.0, 0.0, TAU, 1.0).unwrap();
        let sol = lead_and_launch(p(300.0, 400.0), Point2::ORIGIN, &s, 100.0)
            .unwrap()
            .unwrap();
        assert!((sol.tof - 5.0).abs() < 1e-12);
        assert_eq!(sol.launch_point, p(300.0, 400.0));
    }

    #[test]
    fn lead_receding_faster_than_projectile() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 5000.0, 0.0, TAU, 1.0).unwrap();
        assert!(lead_and_launch(p(100.0, 0.0), p(80.0, 0.0), &s, 50.0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn lead_crossing_target() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 500.0, 0.0, TAU, 1.0).unwrap();
        let sol = lead_and_launch(p(100.0, 0.0), p(0.0, 10.0), &s, 50.0)
            .unwrap()
            .unwrap();
        let t = 100.0 / 2400f64.sqrt();
        assert!((sol.tof - t).abs() < 1e-12);
        let lhs = 100.0f64.powi(2) + (10.0 * t).powi(2);
        let rhs = (50.0 * t).powi(2);
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn lead_outside_sector_rejected() {
        let s = WSSector::new(Point2::ORIGIN, 1.0, 500.0, 0.0, FRAC_PI_2, 1.0).unwrap();
        assert!(lead_and_launch(p(-100.0, -10.0), p(0.0, -10.0), &s, 50.0)
            .unwrap()
            .is_none());
    }
}
