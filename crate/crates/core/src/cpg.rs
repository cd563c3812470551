//! Phase-oscillator central pattern generator and the heading-to-setpoint maps.
//!
//! Each oscillator `i` carries a phase `phi`, an amplitude `r` and a bias
//! `chi`:
//!
//! ```text
//! phi' = 2 pi f + sum_j w_ij sin(phi_j - phi - dphi_ij)
//! r''  = a (a/4 (R - r) - r')
//! chi''= b (b/4 (X - chi) - chi')
//! theta = chi + r sin(phi)
//! ```
//!
//! The amplitude and bias equations are critically damped, so they settle on
//! their targets `R`, `X` without overshoot.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::Error;
use crate::integrate::{rk4, OdeState};
use crate::vehicle::JOINT_COUNT;

/// Largest step accepted by [`cpg_step`].
pub const MAX_STEP: f64 = 0.05;

/// Joints that receive yaw offsets from the heading error (1-based).
pub const YAW_JOINTS: [usize; 3] = [1, 3, 4];
/// Fluke joints whose amplitude follows the heading error (1-based).
pub const FLUKE_JOINTS: [usize; 3] = [5, 6, 7];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Oscillator {
    pub phi: f64,
    pub r: f64,
    pub r_dot: f64,
    pub chi: f64,
    pub chi_dot: f64,
}

impl Oscillator {
    fn is_finite(&self) -> bool {
        [self.phi, self.r, self.r_dot, self.chi, self.chi_dot]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpgState<const N: usize = JOINT_COUNT> {
    pub osc: [Oscillator; N],
}

impl<const N: usize> Default for CpgState<N> {
    fn default() -> Self {
        CpgState {
            osc: [Oscillator::default(); N],
        }
    }
}

impl<const N: usize> CpgState<N> {
    /// Phases preset to the steady-state offsets implied by `params`'
    /// coupling lags along a chain starting at oscillator 0; amplitudes and
    /// biases at rest.
    pub fn phase_locked(params: &CpgParams<N>) -> Self {
        let mut s = Self::default();
        let mut assigned = [false; N];
        if N > 0 {
            assigned[0] = true;
        }
        // propagate lags over edges until no new node is reached
        let mut changed = true;
        while changed {
            changed = false;
            for c in &params.couplings {
                if assigned[c.from] && !assigned[c.to] {
                    s.osc[c.to].phi = s.osc[c.from].phi + c.phase_lag;
                    assigned[c.to] = true;
                    changed = true;
                }
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.osc.iter().all(Oscillator::is_finite)
    }

    pub fn output_angles(&self) -> [f64; N] {
        core::array::from_fn(|i| output_angle(self, i))
    }

    /// Joint angles and their time derivatives given the state's rate.
    pub fn joint_motion(&self, rate: &CpgState<N>) -> ([f64; N], [f64; N]) {
        let mut angles = [0.0; N];
        let mut rates = [0.0; N];
        for (i, (o, d)) in self.osc.iter().zip(&rate.osc).enumerate() {
            let (s, c) = libm::sincos(o.phi);
            angles[i] = o.chi + o.r * s;
            rates[i] = o.chi_dot + o.r_dot * s + o.r * c * d.phi;
        }
        (angles, rates)
    }
}

impl<const N: usize> OdeState for CpgState<N> {
    fn scaled_add(&self, h: f64, rate: &Self) -> Self {
        let mut out = *self;
        for (o, d) in out.osc.iter_mut().zip(&rate.osc) {
            o.phi += h * d.phi;
            o.r += h * d.r;
            o.r_dot += h * d.r_dot;
            o.chi += h * d.chi;
            o.chi_dot += h * d.chi_dot;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorParams {
    /// Intrinsic frequency, Hz.
    pub frequency: f64,
    /// Amplitude convergence gain `a`, 1/s.
    pub amplitude_gain: f64,
    /// Bias convergence gain `b`, 1/s.
    pub bias_gain: f64,
    pub target_amplitude: f64,
    pub target_bias: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        OscillatorParams {
            frequency: 0.6,
            amplitude_gain: 20.0,
            bias_gain: 20.0,
            target_amplitude: 0.0,
            target_bias: 0.0,
        }
    }
}

/// Directed coupling term `weight * sin(phi_to - phi_from - phase_lag)` in the
/// phase rate of `from`. At lock, `phi_to - phi_from = phase_lag`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub phase_lag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpgParams<const N: usize = JOINT_COUNT> {
    pub oscillators: [OscillatorParams; N],
    pub couplings: Vec<Coupling>,
}

impl<const N: usize> CpgParams<N> {
    /// Uncoupled oscillators sharing one parameter set.
    pub fn uniform(osc: OscillatorParams) -> Self {
        CpgParams {
            oscillators: [osc; N],
            couplings: Vec::new(),
        }
    }

    /// Adds the pair of edges `i -> j` and `j -> i` so that `phi_j - phi_i`
    /// settles to `lag`.
    pub fn couple(&mut self, i: usize, j: usize, weight: f64, lag: f64) {
        self.couplings.push(Coupling {
            from: i,
            to: j,
            weight,
            phase_lag: lag,
        });
        self.couplings.push(Coupling {
            from: j,
            to: i,
            weight,
            phase_lag: -lag,
        });
    }

    pub fn validate(&self) -> Result<(), Error> {
        for o in &self.oscillators {
            if !(o.amplitude_gain > 0.0) || !(o.bias_gain > 0.0) {
                return Err(Error::param(
                    "cpg.gain",
                    "convergence gains must be positive",
                ));
            }
            if !(o.frequency >= 0.0) || !o.frequency.is_finite() {
                return Err(Error::param(
                    "cpg.frequency",
                    "must be finite and non-negative",
                ));
            }
            if !o.target_amplitude.is_finite() || !o.target_bias.is_finite() {
                return Err(Error::param("cpg.target", "targets must be finite"));
            }
        }
        for c in &self.couplings {
            if c.from >= N || c.to >= N || c.from == c.to {
                return Err(Error::param("cpg.coupling", "edge endpoints out of range"));
            }
            if !(c.weight >= 0.0) || !c.phase_lag.is_finite() {
                return Err(Error::param("cpg.coupling", "weights must be non-negative"));
            }
            let reverse = self
                .couplings
                .iter()
                .find(|d| d.from == c.to && d.to == c.from && d.weight == c.weight);
            if let Some(d) = reverse {
                if (d.phase_lag + c.phase_lag).abs() > 1e-12 {
                    return Err(Error::param(
                        "cpg.coupling",
                        "symmetric edges need opposite phase lags",
                    ));
                }
            }
        }
        Ok(())
    }
}

impl Default for CpgParams<JOINT_COUNT> {
    /// Nearest-neighbour chain over all seven joints with weight 4/s. The
    /// fluke joints 5, 6, 7 lag each other by 2 pi / 3; all other neighbours
    /// are in phase. Every target starts at zero.
    fn default() -> Self {
        let mut p = Self::uniform(OscillatorParams::default());
        for i in 0..JOINT_COUNT - 1 {
            let lag = if i >= 4 { -TAU / 3.0 } else { 0.0 };
            p.couple(i, i + 1, 4.0, lag);
        }
        p
    }
}

/// Time derivative of every oscillator.
pub fn cpg_rates<const N: usize>(state: &CpgState<N>, params: &CpgParams<N>) -> CpgState<N> {
    let mut d = CpgState::<N>::default();
    for (i, (o, p)) in state.osc.iter().zip(&params.oscillators).enumerate() {
        let a = p.amplitude_gain;
        let b = p.bias_gain;
        d.osc[i] = Oscillator {
            phi: TAU * p.frequency,
            r: o.r_dot,
            r_dot: a * (0.25 * a * (p.target_amplitude - o.r) - o.r_dot),
            chi: o.chi_dot,
            chi_dot: b * (0.25 * b * (p.target_bias - o.chi) - o.chi_dot),
        };
    }
    for c in &params.couplings {
        let dphi = state.osc[c.to].phi - state.osc[c.from].phi - c.phase_lag;
        d.osc[c.from].phi += c.weight * libm::sin(dphi);
    }
    d
}

/// Advances the network by one RK4 step with the current targets.
pub fn cpg_step<const N: usize>(
    state: &CpgState<N>,
    params: &CpgParams<N>,
    dt: f64,
) -> Result<CpgState<N>, Error> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::param("dt", "CPG step must lie in (0, 0.05] s"));
    }
    Ok(rk4(state, dt, |s| cpg_rates(s, params)))
}

/// `theta_i = chi_i + r_i sin(phi_i)`.
pub fn output_angle<const N: usize>(state: &CpgState<N>, i: usize) -> f64 {
    let o = &state.osc[i];
    o.chi + o.r * libm::sin(o.phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AmplitudeMode {
    /// Fluke amplitudes always at their maxima.
    Max,
    /// Fluke amplitudes attenuated by a Gaussian of the heading error.
    Controlled,
}

impl AmplitudeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AmplitudeMode::Max => "max",
            AmplitudeMode::Controlled => "controlled",
        }
    }
}

/// Parameters of the heading-error maps.
///
/// Array slots follow [`YAW_JOINTS`] and [`FLUKE_JOINTS`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappingParams {
    /// Slope of the tanh yaw-offset map, 1/rad.
    pub k: f64,
    pub gaussian_width: [f64; 3],
    pub gaussian_center: [f64; 3],
    pub max_amplitude: [f64; 3],
    pub max_yaw_offset: [f64; 3],
    pub amplitude_mode: AmplitudeMode,
}

impl Default for MappingParams {
    fn default() -> Self {
        let deg = PI / 180.0;
        MappingParams {
            k: 5.0,
            gaussian_width: [1.0; 3],
            gaussian_center: [0.0; 3],
            max_amplitude: [20.0 * deg, 40.0 * deg, 60.0 * deg],
            max_yaw_offset: [30.0 * deg; 3],
            amplitude_mode: AmplitudeMode::Controlled,
        }
    }
}

impl MappingParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::param("mapping.k", "must be positive"));
        }
        if self
            .gaussian_width
            .iter()
            .any(|b| !(*b > 0.0) || !b.is_finite())
        {
            return Err(Error::param("mapping.gaussian_width", "must be positive"));
        }
        if self.gaussian_center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("mapping.gaussian_center", "must be finite"));
        }
        if self
            .max_amplitude
            .iter()
            .any(|r| !(*r > 0.0) || !r.is_finite())
        {
            return Err(Error::param("mapping.max_amplitude", "must be positive"));
        }
        if self
            .max_yaw_offset
            .iter()
            .any(|x| !(*x >= 0.0) || !x.is_finite())
        {
            return Err(Error::param(
                "mapping.max_yaw_offset",
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

fn slot(joints: &[usize; 3], joint: usize) -> usize {
    joints
        .iter()
        .position(|&j| j == joint)
        .unwrap_or_else(|| panic!("joint {joint} is not one of {joints:?}"))
}

/// Yaw offset target `tanh(k e) X_i` for yaw joint 1, 3 or 4.
pub fn map_yaw_offset(heading_error: f64, mp: &MappingParams, joint: usize) -> f64 {
    libm::tanh(mp.k * heading_error) * mp.max_yaw_offset[slot(&YAW_JOINTS, joint)]
}

/// Fluke amplitude target for joint 5, 6 or 7.
pub fn map_amplitude(heading_error: f64, mp: &MappingParams, joint: usize) -> f64 {
    let s = slot(&FLUKE_JOINTS, joint);
    match mp.amplitude_mode {
        AmplitudeMode::Max => mp.max_amplitude[s],
        AmplitudeMode::Controlled => {
            let z = (heading_error - mp.gaussian_center[s]) / mp.gaussian_width[s];
            libm::exp(-0.5 * z * z) * mp.max_amplitude[s]
        }
    }
}

/// Writes oscillator targets for a wrapped heading error.
///
/// Yaw joints get bias targets and no oscillation, fluke joints get amplitude
/// targets and no bias; joint 2 is held straight.
pub fn apply_guidance(heading_error: f64, mp: &MappingParams, params: &mut CpgParams) {
    for o in params.oscillators.iter_mut() {
        o.target_amplitude = 0.0;
        o.target_bias = 0.0;
    }
    for j in YAW_JOINTS {
        params.oscillators[j - 1].target_bias = map_yaw_offset(heading_error, mp, j);
    }
    for j in FLUKE_JOINTS {
        params.oscillators[j - 1].target_amplitude = map_amplitude(heading_error, mp, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(f: f64) -> CpgParams<1> {
        CpgParams::uniform(OscillatorParams {
            frequency: f,
            ..Default::default()
        })
    }

    #[test]
    fn uncoupled_phase_advance() {
        let s = cpg_step(&CpgState::<1>::default(), &single(0.6), 0.01).unwrap();
        assert!((s.osc[0].phi - TAU * 0.6 * 0.01).abs() < 1e-15);
        assert!((s.osc[0].phi - 0.0377).abs() < 1e-4);
    }

    #[test]
    fn step_size_guard() {
        let p = single(0.6);
        let s = CpgState::<1>::default();
        assert!(cpg_step(&s, &p, 0.0).is_err());
        assert!(cpg_step(&s, &p, 0.051).is_err());
        assert!(cpg_step(&s, &p, 0.05).is_ok());
    }

    #[test]
    fn output_angle_examples() {
        let mut s = CpgState::<1>::default();
        s.osc[0].chi = 0.25;
        assert_eq!(output_angle(&s, 0), 0.25);
        s.osc[0] = Oscillator {
            phi: PI / 2.0,
            r: 0.3,
            ..Default::default()
        };
        assert_eq!(output_angle(&s, 0), 0.3);
        s.osc[0] = Oscillator {
            phi: PI,
            r: 0.2,
            chi: 0.1,
            ..Default::default()
        };
        assert!((output_angle(&s, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn yaw_map_examples() {
        let mp = MappingParams {
            k: 1.0,
            ..Default::default()
        };
        assert_eq!(map_yaw_offset(0.0, &mp, 1), 0.0);
        let x = mp.max_yaw_offset[0];
        assert!((map_yaw_offset(50.0, &mp, 3) - x).abs() < 1e-12);
        let deg = PI / 180.0;
        let v = map_yaw_offset(0.5, &mp, 4) / deg;
        // 30 * tanh(0.5), evaluated independently
        assert!((v - 13.863514717800292).abs() < 1e-9);
    }

    #[test]
    fn amplitude_map_examples() {
        let mut mp = MappingParams::default();
        for (s, j) in FLUKE_JOINTS.iter().enumerate() {
            assert_eq!(map_amplitude(0.0, &mp, *j), mp.max_amplitude[s]);
            let v = map_amplitude(1.0, &mp, *j) / mp.max_amplitude[s];
            assert!((v - 0.6065306597).abs() < 1e-9);
        }
        mp.amplitude_mode = AmplitudeMode::Max;
        assert_eq!(map_amplitude(2.5, &mp, 7), mp.max_amplitude[2]);
    }

    #[test]
    #[should_panic(expected = "not one of")]
    fn yaw_map_rejects_pitch_joint() {
        map_yaw_offset(0.1, &MappingParams::default(), 2);
    }

    #[test]
    fn apply_guidance_zero_error() {
        let mut p = CpgParams::default();
        let mp = MappingParams::default();
        apply_guidance(0.0, &mp, &mut p);
        for j in YAW_JOINTS {
            assert_eq!(p.oscillators[j - 1].target_bias, 0.0);
            assert_eq!(p.oscillators[j - 1].target_amplitude, 0.0);
        }
        for (s, j) in FLUKE_JOINTS.iter().enumerate() {
            assert_eq!(p.oscillators[j - 1].target_amplitude, mp.max_amplitude[s]);
        }
        assert_eq!(p.oscillators[1].target_amplitude, 0.0);
        assert_eq!(p.oscillators[1].target_bias, 0.0);
    }

    #[test]
    fn apply_guidance_large_error() {
        let mut p = CpgParams::default();
        let mp = MappingParams::default();
        apply_guidance(3.0, &mp, &mut p);
        for (s, j) in YAW_JOINTS.iter().enumerate() {
            assert!(p.oscillators[j - 1].target_bias > 0.99 * mp.max_yaw_offset[s]);
        }
        for (s, j) in FLUKE_JOINTS.iter().enumerate() {
            assert!(p.oscillators[j - 1].target_amplitude < 0.02 * mp.max_amplitude[s]);
        }
    }

    #[test]
    fn symmetric_errors_mirror_offsets() {
        let mp = MappingParams::default();
        for e in [0.05, 0.3, 0.9, 2.0] {
            let (mut a, mut b) = (CpgParams::default(), CpgParams::default());
            apply_guidance(e, &mp, &mut a);
            apply_guidance(-e, &mp, &mut b);
            for (x, y) in a.oscillators.iter().zip(&b.oscillators) {
                assert_eq!(x.target_bias, -y.target_bias);
                assert_eq!(x.target_amplitude, y.target_amplitude);
            }
        }
    }

    #[test]
    fn default_params_validate() {
        let p = CpgParams::default();
        assert!(p.validate().is_ok());
        assert_eq!(p.couplings.len(), 12);
        let mut bad = p.clone();
        bad.couplings[1].phase_lag = 0.5;
        bad.couplings[0].phase_lag = 0.5;
        assert!(bad.validate().is_err());
        let mut bad = p;
        bad.oscillators[3].amplitude_gain = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn phase_locked_start_matches_lags() {
        let p = CpgParams::default();
        let s = CpgState::phase_locked(&p);
        assert_eq!(s.osc[0].phi, 0.0);
        assert!((s.osc[5].phi - s.osc[4].phi + TAU / 3.0).abs() < 1e-15);
        let d = cpg_rates(&s, &p);
        for o in d.osc {
            assert!((o.phi - TAU * 0.6).abs() < 1e-12);
        }
    }
}
