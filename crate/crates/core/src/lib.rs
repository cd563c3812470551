//! Planar path-following stack for a multi-link swimming robot.
//!
//! The crate is `no_std` (it needs `alloc` for waypoint lists and trial logs)
//! and contains only the numerics:
//!
//! * [`vehicle`]: surge/sway/yaw rigid-body dynamics and a quasi-steady
//!   per-link propulsion model that turns joint motion into body forces.
//! * [`guidance`]: waypoint geometry, LOS and adaptive LOS heading laws.
//! * [`cpg`]: a chain of phase oscillators producing joint angles, and the
//!   maps from heading error to yaw offsets and fluke amplitudes.
//! * [`pathgen`]: sinusoidal waypoint generation.
//! * [`simcore`]: the fixed-step closed loop and trial logging.
//! * [`metrics`]: cross-track RMSE/MAE and comparison tables.
//!
//! File formats, configuration and the command line live in the companion
//! `bauv-sim` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod angle;
pub mod cpg;
pub mod error;
pub mod guidance;
pub mod integrate;
pub mod metrics;
pub mod pathgen;
pub mod simcore;
pub mod vehicle;

pub use error::Error;
