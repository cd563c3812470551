//! Heading arithmetic on the half-open interval (-pi, pi].

use core::f64::consts::{PI, TAU};

/// Wraps `angle` into (-pi, pi]. Values already in range are returned unchanged.
pub fn wrap(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let w = angle - TAU * libm::floor((angle + PI) / TAU);
    if w <= -PI {
        w + TAU
    } else if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Wrapped difference `a - b`.
pub fn diff(a: f64, b: f64) -> f64 {
    wrap(a - b)
}
