//! Surge/sway/yaw dynamics and the per-link propulsion model.
//!
//! Frames: the earth-fixed pose is `(x north, y east, psi)` and the body
//! velocity is `(u surge, v sway, r yaw rate)`. The body origin sits at the
//! nose, on the centre line of the head segment, with `x` pointing forward and
//! `y` to starboard. The spine trails backwards along `-x`.
//!
//! The rigid-body part uses a diagonal inertia matrix (rigid plus added mass)
//! and linear damping, with Coriolis terms neglected. Generalized forces come
//! from a quasi-steady resistive model evaluated per link:
//!
//! * the head and every yaw-axis link feel a normal drag force
//!   `-1/2 rho Cd A |v_n| v_n` in the horizontal plane, where `v_n` combines
//!   the rigid-body velocity and the chain velocity from yaw joint rates;
//! * every pitch-axis link flaps about its own hinge and produces thrust from
//!   the same law evaluated in the vertical plane, rectified through the
//!   joint angle and pointed along the link's forward axis.

use crate::error::Error;
use crate::integrate::OdeState;

/// Overall body length in metres.
pub const BODY_LENGTH: f64 = 0.758;
/// Number of actuated body joints, head to fluke.
pub const JOINT_COUNT: usize = 7;
/// Fresh water, kg/m^3.
pub const WATER_DENSITY: f64 = 1000.0;
/// Joint axis sequence from head to fluke.
pub const JOINT_AXES: [JointAxis; JOINT_COUNT] = [
    JointAxis::Yaw,
    JointAxis::Pitch,
    JointAxis::Yaw,
    JointAxis::Yaw,
    JointAxis::Pitch,
    JointAxis::Pitch,
    JointAxis::Pitch,
];

/// Pose and body velocity of the vehicle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl VehicleState {
    pub const FIELD_NAMES: [&'static str; 6] = ["x", "y", "psi", "u", "v", "r"];

    pub fn at_rest(x: f64, y: f64, psi: f64) -> Self {
        VehicleState {
            x,
            y,
            psi,
            ..Default::default()
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.x, self.y, self.psi, self.u, self.v, self.r]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        VehicleState {
            x: a[0],
            y: a[1],
            psi: a[2],
            u: a[3],
            v: a[4],
            r: a[5],
        }
    }

    pub fn velocity(&self) -> [f64; 3] {
        [self.u, self.v, self.r]
    }

    /// Name of the first non-finite field, if any.
    pub fn non_finite_field(&self) -> Option<&'static str> {
        self.as_array()
            .iter()
            .zip(Self::FIELD_NAMES)
            .find(|(v, _)| !v.is_finite())
            .map(|(_, n)| n)
    }
}

impl OdeState for VehicleState {
    fn scaled_add(&self, h: f64, rate: &Self) -> Self {
        VehicleState::from_array(self.as_array().scaled_add(h, &rate.as_array()))
    }
}

/// Rigid-body and hydrodynamic derivatives of the 3-DOF model.
///
/// Added-mass derivatives follow the usual sign convention (negative values
/// add inertia), and the linear drag derivatives must be non-positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HydroParams {
    pub mass: f64,
    pub izz: f64,
    pub xu_dot: f64,
    pub yv_dot: f64,
    pub nr_dot: f64,
    pub xu: f64,
    pub yv: f64,
    pub nr: f64,
}

impl Default for HydroParams {
    /// Surrogate values built from the 6 kg body mass: added mass of 10 %
    /// (surge), 80 % (sway) and 50 % of the yaw inertia. Linear drag gives a
    /// straight-swim speed of about 0.24 m/s at the default gait.
    fn default() -> Self {
        let mass = 6.0;
        // slender rod about the nose-side origin would be mL^2/3; the head-heavy
        // mass distribution brings it closer to the centroidal value.
        let izz = 0.30;
        HydroParams {
            mass,
            izz,
            xu_dot: -0.1 * mass,
            yv_dot: -0.8 * mass,
            nr_dot: -0.5 * izz,
            xu: -0.5,
            yv: -2.0,
            nr: -0.01,
        }
    }
}

impl HydroParams {
    pub fn validate(&self) -> Result<(), Error> {
        let all = [
            self.mass,
            self.izz,
            self.xu_dot,
            self.yv_dot,
            self.nr_dot,
            self.xu,
            self.yv,
            self.nr,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("hydro", "all derivatives must be finite"));
        }
        if self.mass - self.xu_dot <= 0.0 {
            return Err(Error::param("hydro.xu_dot", "m - Xu_dot must be positive"));
        }
        if self.mass - self.yv_dot <= 0.0 {
            return Err(Error::param("hydro.yv_dot", "m - Yv_dot must be positive"));
        }
        if self.izz - self.nr_dot <= 0.0 {
            return Err(Error::param(
                "hydro.nr_dot",
                "Izz - Nr_dot must be positive",
            ));
        }
        for (name, d) in [
            ("hydro.xu", self.xu),
            ("hydro.yv", self.yv),
            ("hydro.nr", self.nr),
        ] {
            if d > 0.0 {
                return Err(Error::param(name, "drag derivative must be <= 0"));
            }
        }
        Ok(())
    }

    /// Diagonal of the inertia matrix `M`.
    pub fn inertia(&self) -> [f64; 3] {
        [
            self.mass - self.xu_dot,
            self.mass - self.yv_dot,
            self.izz - self.nr_dot,
        ]
    }

    /// `1/2 nu^T M nu`.
    pub fn kinetic_energy(&self, state: &VehicleState) -> f64 {
        let m = self.inertia();
        let nu = state.velocity();
        0.5 * (m[0] * nu[0] * nu[0] + m[1] * nu[1] * nu[1] + m[2] * nu[2] * nu[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointAxis {
    Yaw,
    Pitch,
}

/// One rigid segment of the body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    /// Length along the spine, m.
    pub length: f64,
    /// Side-projected area used by the horizontal-plane drag law, m^2.
    pub lateral_area: f64,
    /// Top-projected area used by the vertical-plane thrust law, m^2.
    pub planform_area: f64,
    pub drag_coefficient: f64,
    /// Axis of the joint at the head-side end of this link.
    pub axis: JointAxis,
    /// 1-based joint number, or 0 for the head segment.
    pub joint: usize,
}

/// The head segment followed by one link per joint.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkGeometry {
    pub head: Link,
    pub links: [Link; JOINT_COUNT],
    pub water_density: f64,
}

impl Default for LinkGeometry {
    fn default() -> Self {
        let link = |joint: usize, length: f64, lateral: f64, planform: f64| Link {
            length,
            lateral_area: lateral,
            planform_area: planform,
            drag_coefficient: if JOINT_AXES[joint - 1] == JointAxis::Pitch {
                3.0
            } else {
                1.0
            },
            axis: JOINT_AXES[joint - 1],
            joint,
        };
        LinkGeometry {
            head: Link {
                length: 0.20,
                lateral_area: 0.024,
                planform_area: 0.026,
                drag_coefficient: 1.0,
                axis: JointAxis::Yaw,
                joint: 0,
            },
            links: [
                link(1, 0.09, 0.0117, 0.0119),
                link(2, 0.09, 0.0117, 0.0119),
                link(3, 0.09, 0.0108, 0.0108),
                link(4, 0.09, 0.0099, 0.0099),
                link(5, 0.08, 0.0072, 0.0072),
                link(6, 0.06, 0.0036, 0.0042),
                // fluke: thin in side view, wide from above
                link(7, 0.058, 0.0012, 0.030),
            ],
            water_density: WATER_DENSITY,
        }
    }
}

impl LinkGeometry {
    pub fn total_length(&self) -> f64 {
        self.head.length + self.links.iter().map(|l| l.length).sum::<f64>()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.water_density > 0.0) {
            return Err(Error::param("links.water_density", "must be positive"));
        }
        for (i, link) in core::iter::once(&self.head).chain(&self.links).enumerate() {
            if !(link.length > 0.0) {
                return Err(Error::param(
                    "links.length",
                    "every link length must be positive",
                ));
            }
            if !(link.lateral_area >= 0.0 && link.planform_area >= 0.0) {
                return Err(Error::param("links.area", "areas must be non-negative"));
            }
            if !(link.drag_coefficient >= 0.0) {
                return Err(Error::param(
                    "links.drag_coefficient",
                    "must be non-negative",
                ));
            }
            if i > 0 && (link.joint != i || link.axis != JOINT_AXES[i - 1]) {
                return Err(Error::param(
                    "links.axis",
                    "joints must be numbered 1..7 with axes yaw, pitch, yaw, yaw, pitch, pitch, pitch",
                ));
            }
        }
        Ok(())
    }
}

/// Body-frame surge force, sway force and yaw moment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeneralizedForce {
    pub x: f64,
    pub y: f64,
    pub n: f64,
}

/// `J(psi)`: body velocity to earth-fixed pose rate.
pub fn rotation_matrix(psi: f64) -> [[f64; 3]; 3] {
    let (s, c) = libm::sincos(psi);
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Pose rate `J(psi) nu`.
pub fn kinematics(state: &VehicleState) -> [f64; 3] {
    let j = rotation_matrix(state.psi);
    let nu = state.velocity();
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(j) {
        *o = row[0] * nu[0] + row[1] * nu[1] + row[2] * nu[2];
    }
    out
}

/// Body acceleration `M^-1 (tau - D nu)`.
///
/// `hp` must have passed [`HydroParams::validate`].
pub fn dynamics_rate(state: &VehicleState, tau: &GeneralizedForce, hp: &HydroParams) -> [f64; 3] {
    let m = hp.inertia();
    [
        (tau.x + hp.xu * state.u) / m[0],
        (tau.y + hp.yv * state.v) / m[1],
        (tau.n + hp.nr * state.r) / m[2],
    ]
}

/// Sum of the per-link forces about the body origin.
///
/// `angles` and `rates` are indexed by joint number minus one.
pub fn compute_tau(
    angles: &[f64; JOINT_COUNT],
    rates: &[f64; JOINT_COUNT],
    state: &VehicleState,
    links: &LinkGeometry,
) -> GeneralizedForce {
    let half_rho = 0.5 * links.water_density;
    let mut tau = GeneralizedForce::default();

    // Horizontal plane: accumulated yaw deflection and its rate along the chain.
    let mut yaw = 0.0;
    let mut yaw_rate = 0.0;
    let mut joint_pos = [0.0f64, 0.0];
    let mut joint_vel = [0.0f64, 0.0];

    for (k, link) in core::iter::once(&links.head)
        .chain(&links.links)
        .enumerate()
    {
        if k > 0 && link.axis == JointAxis::Yaw {
            yaw += angles[k - 1];
            yaw_rate += rates[k - 1];
        }
        let half = 0.5 * link.length;

        // tail-pointing direction d and its left normal n in the body plane
        let (sy, cy) = libm::sincos(yaw);
        let dir = [-cy, sy];
        let normal = [sy, cy];
        let center = [joint_pos[0] + half * dir[0], joint_pos[1] + half * dir[1]];

        let (fx, fy) = if link.axis == JointAxis::Yaw {
            let vel = [
                state.u - state.r * center[1] + joint_vel[0] + half * yaw_rate * normal[0],
                state.v + state.r * center[0] + joint_vel[1] + half * yaw_rate * normal[1],
            ];
            let vn = vel[0] * normal[0] + vel[1] * normal[1];
            let f = -half_rho * link.drag_coefficient * link.lateral_area * libm::fabs(vn) * vn;
            (f * normal[0], f * normal[1])
        } else {
            // the link flaps about its own hinge; the normal force is
            // rectified into thrust along the link's forward axis, -dir
            let (angle, rate) = if k > 0 {
                (angles[k - 1], rates[k - 1])
            } else {
                (0.0, 0.0)
            };
            let vn = half * rate;
            let thrust = half_rho
                * link.drag_coefficient
                * link.planform_area
                * vn
                * vn
                * libm::fabs(libm::sin(angle));
            (-thrust * dir[0], -thrust * dir[1])
        };
        tau.x += fx;
        tau.y += fy;
        tau.n += center[0] * fy - center[1] * fx;

        joint_pos = [
            joint_pos[0] + link.length * dir[0],
            joint_pos[1] + link.length * dir[1],
        ];
        joint_vel = [
            joint_vel[0] + link.length * yaw_rate * normal[0],
            joint_vel[1] + link.length * yaw_rate * normal[1],
        ];
    }
    tau
}
