//! Waypoint geometry and line-of-sight heading laws.

use alloc::vec::Vec;

use crate::angle;
use crate::error::Error;

/// Segments shorter than this are rejected.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-9;

/// A straight leg between two consecutive waypoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Path-tangential angle.
    pub angle: f64,
    pub length: f64,
}

impl Segment {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Result<Self, Error> {
        let angle = path_tangential_angle(start, end)?;
        let length = libm::hypot(end[0] - start[0], end[1] - start[1]);
        Ok(Segment {
            start,
            end,
            angle,
            length,
        })
    }

    /// Along-track coordinate of `p` measured from `start`.
    pub fn along_track(&self, p: [f64; 2]) -> f64 {
        let (s, c) = libm::sincos(self.angle);
        (p[0] - self.start[0]) * c + (p[1] - self.start[1]) * s
    }
}

/// Ordered waypoints with cached segment geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct WaypointPath {
    points: Vec<[f64; 2]>,
    segments: Vec<Segment>,
}

impl WaypointPath {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self, Error> {
        if points.len() < 2 {
            return Err(Error::param("path", "at least two waypoints are required"));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::param("path", "waypoints must be finite"));
        }
        let segments = points
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                Segment::new(w[0], w[1]).map_err(|_| Error::DegenerateSegment { index: i })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WaypointPath { points, segments })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, index: usize) -> &Segment {
        &self.segments[index]
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuidanceMode {
    /// Plain LOS.
    Traditional,
    /// LOS with online sideslip estimation.
    Adaptive,
}

impl GuidanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GuidanceMode::Traditional => "traditional",
            GuidanceMode::Adaptive => "adaptive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuidanceParams {
    /// Look-ahead distance, m.
    pub delta: f64,
    /// Sideslip adaptation gain, 1/s.
    pub gamma: f64,
    pub mode: GuidanceMode,
    /// Waypoint acceptance distance, m.
    pub switch_radius: f64,
}

impl GuidanceParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::param(
                "guidance.delta",
                "look-ahead distance must be positive",
            ));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::param(
                "guidance.gamma",
                "adaptation gain must be non-negative",
            ));
        }
        if self.mode == GuidanceMode::Adaptive && self.gamma <= 0.0 {
            return Err(Error::param(
                "guidance.gamma",
                "adaptive mode needs a positive gain",
            ));
        }
        if !(self.switch_radius > 0.0) || !self.switch_radius.is_finite() {
            return Err(Error::param("guidance.switch_radius", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GuidanceState {
    pub active_segment: usize,
    pub beta_hat: f64,
    pub cross_track: f64,
    /// Set once the final waypoint has been accepted.
    pub complete: bool,
}

/// Heading of the leg from `a` to `b`, in (-pi, pi].
pub fn path_tangential_angle(a: [f64; 2], b: [f64; 2]) -> Result<f64, Error> {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    if libm::hypot(dx, dy) <= MIN_SEGMENT_LENGTH {
        return Err(Error::DegenerateSegment { index: 0 });
    }
    Ok(angle::wrap(libm::atan2(dy, dx)))
}

/// Foot of `p` on the segment line and the signed cross-track error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossTrack {
    pub foot: [f64; 2],
    pub error: f64,
}

/// Cross-track error by rotating `p - start` into the path-tangential frame.
///
/// The error is the cross product of the segment direction with `p - start`:
/// positive when `p` lies on the side the heading angle increases away from.
pub fn cross_track_solve(p: [f64; 2], seg: &Segment) -> CrossTrack {
    let (s, c) = libm::sincos(seg.angle);
    let dx = p[0] - seg.start[0];
    let dy = p[1] - seg.start[1];
    let along = dx * c + dy * s;
    CrossTrack {
        foot: [seg.start[0] + along * c, seg.start[1] + along * s],
        error: -dx * s + dy * c,
    }
}

/// The same quantities from the 3x3 linear system
///
/// ```text
/// [ cos   sin  0 ] [x_p]   [ cos x + sin y       ]
/// [-sin   cos  1 ] [y_p] = [-sin x + cos y       ]
/// [ tan  -1    0 ] [y_e]   [ tan x_end - y_end   ]
/// ```
///
/// Returns `None` when the segment is vertical (`cos = 0`) or the system is
/// numerically singular.
pub fn cross_track_linear_solve(p: [f64; 2], seg: &Segment) -> Option<CrossTrack> {
    let (s, c) = libm::sincos(seg.angle);
    if libm::fabs(c) < 1e-12 {
        return None;
    }
    let t = s / c;
    let a = [[c, s, 0.0], [-s, c, 1.0], [t, -1.0, 0.0]];
    let b = [
        c * p[0] + s * p[1],
        -s * p[0] + c * p[1],
        t * seg.end[0] - seg.end[1],
    ];
    let x = solve3(a, b)?;
    Some(CrossTrack {
        foot: [x[0], x[1]],
        error: x[2],
    })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))
            .unwrap_or(col);
        if libm::fabs(a[pivot][col]) < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Traditional LOS course command.
pub fn los_heading(pi_p: f64, cross_track: f64, delta: f64) -> f64 {
    angle::wrap(pi_p - libm::atan(cross_track / delta))
}

/// Adaptive LOS course command with sideslip compensation.
pub fn alos_heading(pi_p: f64, cross_track: f64, beta_hat: f64, delta: f64) -> f64 {
    angle::wrap((pi_p - beta_hat) - libm::atan(cross_track / delta))
}

/// Rate of the sideslip estimate, `gamma * delta / sqrt(delta^2 + y_e^2) * y_e`.
pub fn sideslip_rate(cross_track: f64, delta: f64, gamma: f64) -> f64 {
    gamma * delta / libm::hypot(delta, cross_track) * cross_track
}

/// One explicit Euler step of the sideslip estimator.
pub fn sideslip_update(beta_hat: f64, cross_track: f64, delta: f64, gamma: f64, dt: f64) -> f64 {
    beta_hat + dt * sideslip_rate(cross_track, delta, gamma)
}

/// Advances the active segment along the path; never moves backwards.
///
/// A segment is left once the vehicle's along-track coordinate passes
/// `length - switch_radius`, or once it is within `switch_radius` of the
/// segment's end point. On the final segment the same test marks the path
/// complete instead.
pub fn update_waypoint(
    state: GuidanceState,
    p: [f64; 2],
    path: &WaypointPath,
    params: &GuidanceParams,
) -> GuidanceState {
    let mut next = state;
    let last = path.segment_count() - 1;
    next.active_segment = next.active_segment.min(last);
    loop {
        let seg = path.segment(next.active_segment);
        let along = seg.along_track(p);
        let to_end = libm::hypot(p[0] - seg.end[0], p[1] - seg.end[1]);
        let reached = along > seg.length - params.switch_radius || to_end < params.switch_radius;
        if !reached {
            break;
        }
        if next.active_segment == last {
            next.complete = true;
            break;
        }
        next.active_segment += 1;
    }
    next
}
