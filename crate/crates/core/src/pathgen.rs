//! Sinusoidal reference paths anchored at the robot's pose.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::Error;
use crate::guidance::WaypointPath;

/// A sinusoid laid along a straight chord.
///
/// Waypoint `i` of `n` sits at chord coordinate `s_i = i L / (n - 1)` with
/// lateral offset `A sin(2 pi N i / (n - 1))`, rotated by `theta` and shifted
/// to `origin`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinusoidSpec {
    pub amplitude: f64,
    pub periods: f64,
    pub length: f64,
    pub theta: f64,
    pub n_points: usize,
    pub origin: [f64; 2],
}

impl Default for SinusoidSpec {
    fn default() -> Self {
        SinusoidSpec {
            amplitude: 0.5,
            periods: 3.0,
            length: 10.0,
            theta: 0.0,
            n_points: 61,
            origin: [0.0, 0.0],
        }
    }
}

impl SinusoidSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n_points < 2 {
            return Err(Error::param(
                "path.n_points",
                "at least two points are required",
            ));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::param("path.length", "must be positive"));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::param("path.amplitude", "must be non-negative"));
        }
        if !self.periods.is_finite() || !self.theta.is_finite() {
            return Err(Error::param("path", "periods and theta must be finite"));
        }
        if self.origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("path.origin", "must be finite"));
        }
        Ok(())
    }

    /// Chord and lateral coordinates of waypoint `i` before rotation.
    pub fn local_point(&self, i: usize) -> [f64; 2] {
        let frac = i as f64 / (self.n_points - 1) as f64;
        [
            frac * self.length,
            self.amplitude * libm::sin(TAU * self.periods * frac),
        ]
    }

    pub fn points(&self) -> Result<Vec<[f64; 2]>, Error> {
        self.validate()?;
        let (s, c) = libm::sincos(self.theta);
        Ok((0..self.n_points)
            .map(|i| {
                let [along, lateral] = self.local_point(i);
                [
                    along * c - lateral * s + self.origin[0],
                    along * s + lateral * c + self.origin[1],
                ]
            })
            .collect())
    }
}

/// Builds the waypoint path for `spec`.
pub fn generate(spec: &SinusoidSpec) -> Result<WaypointPath, Error> {
    WaypointPath::new(spec.points()?)
}
