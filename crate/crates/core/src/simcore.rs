//! Fixed-step closed loop: guidance, CPG, propulsion and dynamics.
//!
//! Every control period runs, in order:
//!
//! 1. waypoint switching on the current position,
//! 2. cross-track error on the active segment,
//! 3. sideslip estimate update (adaptive mode only),
//! 4. LOS / adaptive LOS course command,
//! 5. wrapped heading error `chi_d - psi`,
//! 6. oscillator targets from the heading error,
//! 7. joint angles from the oscillator state,
//! 8. generalized force from the joint motion,
//! 9. one RK4 step of the joint vehicle + oscillator state,
//!
//! and the values computed in steps 1-8 are logged against the pose they were
//! computed from.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use crate::angle;
use crate::cpg::{apply_guidance, cpg_rates, CpgParams, CpgState, MappingParams};
use crate::error::Error;
use crate::guidance::{
    alos_heading, cross_track_solve, los_heading, sideslip_update, update_waypoint, GuidanceMode,
    GuidanceParams, GuidanceState, WaypointPath,
};
use crate::integrate::{rk4, OdeState};
use crate::metrics::ErrorSeries;
use crate::pathgen::{generate, SinusoidSpec};
use crate::vehicle::{
    compute_tau, dynamics_rate, kinematics, GeneralizedForce, HydroParams, LinkGeometry,
    VehicleState, BODY_LENGTH, JOINT_COUNT,
};

/// Largest accepted integration step, s.
pub const MAX_DT: f64 = 0.02;
/// Magnitude beyond which a non-phase state component counts as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub initial: VehicleState,
    pub hydro: HydroParams,
    pub links: LinkGeometry,
    pub guidance: GuidanceParams,
    pub cpg: CpgParams,
    pub mapping: MappingParams,
    pub path: SinusoidSpec,
    /// Reserved for stochastic disturbances; the loop itself draws nothing.
    pub rng_seed: u64,
    pub log_decimation: usize,
    /// Samples before this time are left out of RMSE/MAE, s.
    pub metrics_warmup: f64,
    /// Uniform earth-fixed water current `(north, east)`, m/s.
    pub current: [f64; 2],
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.01,
            t_max: 120.0,
            initial: VehicleState::default(),
            hydro: HydroParams::default(),
            links: LinkGeometry::default(),
            guidance: GuidanceParams {
                delta: 1.75 * BODY_LENGTH,
                gamma: 0.05,
                mode: GuidanceMode::Adaptive,
                switch_radius: DEFAULT_SWITCH_RADIUS,
            },
            cpg: CpgParams::default(),
            mapping: MappingParams::default(),
            path: SinusoidSpec::default(),
            rng_seed: 0,
            log_decimation: 1,
            metrics_warmup: 0.0,
            current: [
                DEFAULT_CURRENT * FRAC_1_SQRT_2,
                DEFAULT_CURRENT * FRAC_1_SQRT_2,
            ],
        }
    }
}

/// Default waypoint acceptance distance, m.
pub const DEFAULT_SWITCH_RADIUS: f64 = 0.02;

/// Speed of the default background current, m/s, set toward the north-east.
pub const DEFAULT_CURRENT: f64 = 0.015;

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::param("dt", "must lie in (0, 0.02] s"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::param("t_max", "must be finite and non-negative"));
        }
        if self.log_decimation == 0 {
            return Err(Error::param("log_decimation", "must be at least 1"));
        }
        if !(self.metrics_warmup >= 0.0) || !self.metrics_warmup.is_finite() {
            return Err(Error::param(
                "metrics_warmup",
                "must be finite and non-negative",
            ));
        }
        if self.initial.non_finite_field().is_some() {
            return Err(Error::param("initial", "initial state must be finite"));
        }
        if self.current.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("current", "must be finite"));
        }
        self.hydro.validate()?;
        self.links.validate()?;
        self.guidance.validate()?;
        self.cpg.validate()?;
        self.mapping.validate()?;
        self.path.validate()
    }

    /// Number of integration steps covering `t_max`.
    pub fn step_count(&self) -> usize {
        libm::round(self.t_max / self.dt) as usize
    }
}

/// Joint vehicle and oscillator state advanced by one shared integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantState {
    pub vehicle: VehicleState,
    pub cpg: CpgState,
}

impl OdeState for PlantState {
    fn scaled_add(&self, h: f64, rate: &Self) -> Self {
        PlantState {
            vehicle: self.vehicle.scaled_add(h, &rate.vehicle),
            cpg: self.cpg.scaled_add(h, &rate.cpg),
        }
    }
}

/// Time derivative of the plant with oscillator targets held fixed.
pub fn plant_rate(
    state: &PlantState,
    cpg: &CpgParams,
    hydro: &HydroParams,
    links: &LinkGeometry,
    current: [f64; 2],
) -> PlantState {
    let cpg_rate = cpg_rates(&state.cpg, cpg);
    let (angles, rates) = state.cpg.joint_motion(&cpg_rate);
    let tau = compute_tau(&angles, &rates, &state.vehicle, links);
    let pose = kinematics(&state.vehicle);
    let acc = dynamics_rate(&state.vehicle, &tau, hydro);
    PlantState {
        vehicle: VehicleState {
            x: pose[0] + current[0],
            y: pose[1] + current[1],
            psi: pose[2],
            u: acc[0],
            v: acc[1],
            r: acc[2],
        },
        cpg: cpg_rate,
    }
}

/// One logged control period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub chi_d: f64,
    pub y_e: f64,
    pub beta_hat: f64,
    pub segment: usize,
    pub theta: [f64; JOINT_COUNT],
    pub tau: GeneralizedForce,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialLog {
    pub rows: Vec<LogRow>,
}

/// Why a step could not be completed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepFault {
    NonFinite,
    Diverged,
}

/// A step that produced an unusable state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepError {
    pub step: usize,
    pub field: &'static str,
    pub fault: StepFault,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fault {
            StepFault::NonFinite => {
                write!(f, "step {}: `{}` became non-finite", self.step, self.field)
            }
            StepFault::Diverged => write!(
                f,
                "step {}: `{}` exceeded {DIVERGENCE_LIMIT:e} in magnitude",
                self.step, self.field
            ),
        }
    }
}

impl core::error::Error for StepError {}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub log: TrialLog,
    /// The final waypoint was accepted before `t_max`.
    pub completed: bool,
    pub rmse: f64,
    pub mae: f64,
    /// Integration steps actually taken.
    pub steps: usize,
    pub dt: f64,
}

impl TrialResult {
    pub fn sim_seconds(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialError {
    Config(Error),
    /// The trial aborted; `log` holds every row written before the fault.
    Aborted {
        error: StepError,
        log: TrialLog,
    },
    Metrics(Error),
}

impl fmt::Display for TrialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialError::Config(e) => write!(f, "configuration: {e}"),
            TrialError::Aborted { error, log } => {
                write!(
                    f,
                    "trial aborted after {} log rows: {error}",
                    log.rows.len()
                )
            }
            TrialError::Metrics(e) => write!(f, "metrics: {e}"),
        }
    }
}

impl core::error::Error for TrialError {}

/// Mutable closed-loop state for one trial.
#[derive(Clone, Debug)]
pub struct Simulation<'a> {
    config: &'a SimConfig,
    path: WaypointPath,
    step_index: usize,
    plant: PlantState,
    cpg_params: CpgParams,
    guidance: GuidanceState,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a SimConfig) -> Result<Self, Error> {
        config.validate()?;
        let path = generate(&config.path)?;
        let mut initial = config.initial;
        initial.psi = angle::wrap(initial.psi);
        Ok(Simulation {
            config,
            path,
            step_index: 0,
            plant: PlantState {
                vehicle: initial,
                cpg: CpgState::phase_locked(&config.cpg),
            },
            cpg_params: config.cpg.clone(),
            guidance: GuidanceState::default(),
        })
    }

    pub fn path(&self) -> &WaypointPath {
        &self.path
    }

    pub fn vehicle(&self) -> &VehicleState {
        &self.plant.vehicle
    }

    pub fn cpg(&self) -> &CpgState {
        &self.plant.cpg
    }

    pub fn guidance(&self) -> &GuidanceState {
        &self.guidance
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.config.dt
    }

    /// Control stages 1-8 on the current state. Updates the guidance state
    /// and oscillator targets and returns the row for this period.
    pub fn control(&mut self) -> LogRow {
        let cfg = self.config;
        let gp = &cfg.guidance;
        let v = self.plant.vehicle;
        let p = [v.x, v.y];

        let mut gs = update_waypoint(self.guidance, p, &self.path, gp);
        let seg = *self.path.segment(gs.active_segment);
        let ye = cross_track_solve(p, &seg).error;
        gs.cross_track = ye;
        let chi_d = match gp.mode {
            GuidanceMode::Traditional => los_heading(seg.angle, ye, gp.delta),
            GuidanceMode::Adaptive => {
                gs.beta_hat = sideslip_update(gs.beta_hat, ye, gp.delta, gp.gamma, cfg.dt);
                alos_heading(seg.angle, ye, gs.beta_hat, gp.delta)
            }
        };
        self.guidance = gs;

        let heading_error = angle::diff(chi_d, v.psi);
        apply_guidance(heading_error, &cfg.mapping, &mut self.cpg_params);

        let rate = cpg_rates(&self.plant.cpg, &self.cpg_params);
        let (theta, theta_dot) = self.plant.cpg.joint_motion(&rate);
        let tau = compute_tau(&theta, &theta_dot, &v, &cfg.links);

        LogRow {
            t: self.time(),
            x: v.x,
            y: v.y,
            psi: v.psi,
            u: v.u,
            v: v.v,
            r: v.r,
            chi_d,
            y_e: ye,
            beta_hat: gs.beta_hat,
            segment: gs.active_segment,
            theta,
            tau,
        }
    }

    /// Stage 9: advance the plant by one step.
    pub fn integrate(&mut self) -> Result<(), StepError> {
        let cfg = self.config;
        let params = &self.cpg_params;
        let mut next = rk4(&self.plant, cfg.dt, |s| {
            plant_rate(s, params, &cfg.hydro, &cfg.links, cfg.current)
        });
        next.vehicle.psi = angle::wrap(next.vehicle.psi);
        let step = self.step_index;
        check_state(&next, step)?;
        self.plant = next;
        self.step_index += 1;
        Ok(())
    }

    /// One full control period.
    pub fn step(&mut self) -> Result<LogRow, StepError> {
        let row = self.control();
        self.integrate()?;
        Ok(row)
    }
}

fn check_state(s: &PlantState, step: usize) -> Result<(), StepError> {
    let fault = |field, fault| Err(StepError { step, field, fault });
    if let Some(field) = s.vehicle.non_finite_field() {
        return fault(field, StepFault::NonFinite);
    }
    if !s.cpg.is_finite() {
        return fault("cpg", StepFault::NonFinite);
    }
    for (v, name) in s.vehicle.as_array().iter().zip(VehicleState::FIELD_NAMES) {
        if libm::fabs(*v) > DIVERGENCE_LIMIT {
            return fault(name, StepFault::Diverged);
        }
    }
    for o in &s.cpg.osc {
        if [o.r, o.r_dot, o.chi, o.chi_dot]
            .iter()
            .any(|v| libm::fabs(*v) > DIVERGENCE_LIMIT)
        {
            return fault("cpg", StepFault::Diverged);
        }
    }
    Ok(())
}

/// Runs until the final waypoint is accepted or `t_max` elapses.
///
/// Identical configurations produce bit-identical logs.
pub fn run_trial(config: &SimConfig) -> Result<TrialResult, TrialError> {
    let mut sim = Simulation::new(config).map_err(TrialError::Config)?;
    let steps = config.step_count();
    let mut log = TrialLog::default();
    let mut completed = false;
    for k in 0..=steps {
        let row = sim.control();
        if k % config.log_decimation == 0 {
            log.rows.push(row);
        }
        if sim.guidance.complete {
            completed = true;
            break;
        }
        if k == steps {
            break;
        }
        if let Err(error) = sim.integrate() {
            return Err(TrialError::Aborted { error, log });
        }
    }
    let series = ErrorSeries::from_log(&log, config.metrics_warmup);
    let rmse = series.rmse().map_err(TrialError::Metrics)?;
    let mae = series.mae().map_err(TrialError::Metrics)?;
    Ok(TrialResult {
        completed,
        rmse,
        mae,
        steps: sim.step_index,
        dt: config.dt,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        assert!(SimConfig::default().validate().is_ok());
    }

    #[test]
    fn zero_horizon_logs_initial_state() {
        let cfg = SimConfig {
            t_max: 0.0,
            ..Default::default()
        };
        let res = run_trial(&cfg).unwrap();
        assert_eq!(res.log.rows.len(), 1);
        assert_eq!(res.log.rows[0].t, 0.0);
        assert_eq!(res.log.rows[0].x, 0.0);
        assert_eq!(res.steps, 0);
    }

    #[test]
    fn rejects_large_step() {
        let cfg = SimConfig {
            dt: 0.05,
            ..Default::default()
        };
        assert!(matches!(run_trial(&cfg), Err(TrialError::Config(_))));
    }

    #[test]
    fn row_count_follows_decimation() {
        let cfg = SimConfig {
            t_max: 1.0,
            log_decimation: 7,
            ..Default::default()
        };
        let res = run_trial(&cfg).unwrap();
        assert!(!res.completed);
        assert_eq!(res.steps, 100);
        assert_eq!(res.log.rows.len(), 100 / 7 + 1);
        assert!(res.log.rows.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn non_finite_state_aborts_with_partial_log() {
        let cfg = SimConfig {
            t_max: 1.0,
            initial: VehicleState {
                u: 1e300,
                ..Default::default()
            },
            ..Default::default()
        };
        match run_trial(&cfg) {
            Err(TrialError::Aborted { error, log }) => {
                assert_eq!(error.step, 0);
                assert_eq!(log.rows.len(), 1);
            }
            other => panic!("expected abort, got {other:?}"),
        }
    }
}
