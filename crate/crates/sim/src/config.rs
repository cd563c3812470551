//! TOML configuration.
//!
//! Every section and key is optional; a missing key keeps the built-in
//! default and an unknown key is an error. Angle-valued keys take a number in
//! radians or a string with a unit suffix (`"30deg"`, `"0.5rad"`).
//!
//! ```toml
//! [guidance]
//! mode = "traditional"
//! delta_multiple = 1.5
//!
//! [mapping]
//! max_yaw_offset = ["25deg", "25deg", "30deg"]
//!
//! [sweep]
//! delta_multiples = [1.75]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use bauv_core::cpg::{AmplitudeMode, CpgParams, MappingParams, OscillatorParams};
use bauv_core::guidance::{GuidanceMode, GuidanceParams};
use bauv_core::pathgen::SinusoidSpec;
use bauv_core::simcore::SimConfig;
use bauv_core::vehicle::{
    HydroParams, Link, LinkGeometry, VehicleState, BODY_LENGTH, JOINT_AXES, JOINT_COUNT,
};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}line {line}, column {column}: {message}", origin(path))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn origin(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map(|p| format!("{}: ", p.display()))
        .unwrap_or_default()
}

/// An angle in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn deg(d: f64) -> Self {
        Angle(d.to_radians())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}rad", self.0)
    }
}

/// Parses `"30deg"`, `"30 deg"`, `"0.5rad"` or a bare number of radians.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (num, degrees) = match t.strip_suffix("deg") {
        Some(n) => (n, true),
        None => (t.strip_suffix("rad").unwrap_or(t), false),
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not an angle (expected e.g. \"30deg\" or \"0.5rad\")"))?;
    Ok(if degrees { v.to_radians() } else { v })
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("radians, or a string with a `deg` or `rad` suffix")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }

        d.deserialize_any(AngleVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub t_max: f64,
    pub log_decimation: usize,
    pub metrics_warmup: f64,
    pub rng_seed: u64,
    /// Earth-fixed water current (north, east), m/s.
    pub current: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub x: f64,
    pub y: f64,
    pub psi: Angle,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceSection {
    pub mode: GuidanceModeName,
    /// Look-ahead distance in body lengths of 0.758 m.
    pub delta_multiple: f64,
    pub gamma: f64,
    pub switch_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSection {
    pub amplitude: f64,
    pub periods: f64,
    pub length: f64,
    pub theta: Angle,
    pub n_points: usize,
    pub origin: [f64; 2],
}

/// Oscillator chain: shared gains, nearest-neighbour couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpgSection {
    pub frequency: f64,
    pub amplitude_gain: f64,
    pub bias_gain: f64,
    pub coupling_weight: f64,
    /// Settled `phi_{i+1} - phi_i` for the six neighbour pairs.
    pub phase_lags: [Angle; JOINT_COUNT - 1],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingSection {
    pub k: f64,
    pub amplitude_mode: AmplitudeModeName,
    pub gaussian_width: [f64; 3],
    pub gaussian_center: [f64; 3],
    pub max_amplitude: [Angle; 3],
    pub max_yaw_offset: [Angle; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HydroSection {
    pub mass: f64,
    pub izz: f64,
    pub xu_dot: f64,
    pub yv_dot: f64,
    pub nr_dot: f64,
    pub xu: f64,
    pub yv: f64,
    pub nr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeadSection {
    pub length: f64,
    pub lateral_area: f64,
    pub planform_area: f64,
    pub drag_coefficient: f64,
}

/// Head segment plus per-joint arrays, joint 1 first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinksSection {
    pub water_density: f64,
    pub length: [f64; JOINT_COUNT],
    pub lateral_area: [f64; JOINT_COUNT],
    pub planform_area: [f64; JOINT_COUNT],
    pub drag_coefficient: [f64; JOINT_COUNT],
    pub head: HeadSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub delta_multiples: Vec<f64>,
    pub guidance_modes: Vec<GuidanceModeName>,
    pub amplitude_modes: Vec<AmplitudeModeName>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuidanceModeName {
    Traditional,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeModeName {
    Max,
    Controlled,
}

impl From<GuidanceModeName> for GuidanceMode {
    fn from(m: GuidanceModeName) -> Self {
        match m {
            GuidanceModeName::Traditional => GuidanceMode::Traditional,
            GuidanceModeName::Adaptive => GuidanceMode::Adaptive,
        }
    }
}

impl From<GuidanceMode> for GuidanceModeName {
    fn from(m: GuidanceMode) -> Self {
        match m {
            GuidanceMode::Traditional => GuidanceModeName::Traditional,
            GuidanceMode::Adaptive => GuidanceModeName::Adaptive,
        }
    }
}

impl From<AmplitudeModeName> for AmplitudeMode {
    fn from(m: AmplitudeModeName) -> Self {
        match m {
            AmplitudeModeName::Max => AmplitudeMode::Max,
            AmplitudeModeName::Controlled => AmplitudeMode::Controlled,
        }
    }
}

impl From<AmplitudeMode> for AmplitudeModeName {
    fn from(m: AmplitudeMode) -> Self {
        match m {
            AmplitudeMode::Max => AmplitudeModeName::Max,
            AmplitudeMode::Controlled => AmplitudeModeName::Controlled,
        }
    }
}

/// The whole configuration file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub sim: SimSection,
    pub initial: InitialSection,
    pub guidance: GuidanceSection,
    pub path: PathSection,
    pub cpg: CpgSection,
    pub mapping: MappingSection,
    pub hydro: HydroSection,
    pub links: LinksSection,
    pub sweep: SweepSection,
}

impl Default for SimSection {
    fn default() -> Self {
        let c = SimConfig::default();
        SimSection {
            dt: c.dt,
            t_max: c.t_max,
            log_decimation: c.log_decimation,
            metrics_warmup: c.metrics_warmup,
            rng_seed: c.rng_seed,
            current: c.current,
        }
    }
}

impl Default for InitialSection {
    fn default() -> Self {
        let s = SimConfig::default().initial;
        InitialSection {
            x: s.x,
            y: s.y,
            psi: Angle(s.psi),
            u: s.u,
            v: s.v,
            r: s.r,
        }
    }
}

impl Default for GuidanceSection {
    fn default() -> Self {
        let g = SimConfig::default().guidance;
        GuidanceSection {
            mode: g.mode.into(),
            delta_multiple: 1.75,
            gamma: g.gamma,
            switch_radius: g.switch_radius,
        }
    }
}

impl Default for PathSection {
    fn default() -> Self {
        let p = SinusoidSpec::default();
        PathSection {
            amplitude: p.amplitude,
            periods: p.periods,
            length: p.length,
            theta: Angle(p.theta),
            n_points: p.n_points,
            origin: p.origin,
        }
    }
}

impl Default for CpgSection {
    fn default() -> Self {
        let p = CpgParams::default();
        let o = p.oscillators[0];
        let mut lags = [Angle(0.0); JOINT_COUNT - 1];
        let mut weight = 0.0;
        for c in &p.couplings {
            if c.to == c.from + 1 {
                lags[c.from] = Angle(c.phase_lag);
                weight = c.weight;
            }
        }
        CpgSection {
            frequency: o.frequency,
            amplitude_gain: o.amplitude_gain,
            bias_gain: o.bias_gain,
            coupling_weight: weight,
            phase_lags: lags,
        }
    }
}

impl Default for MappingSection {
    fn default() -> Self {
        let m = MappingParams::default();
        MappingSection {
            k: m.k,
            amplitude_mode: m.amplitude_mode.into(),
            gaussian_width: m.gaussian_width,
            gaussian_center: m.gaussian_center,
            max_amplitude: m.max_amplitude.map(Angle),
            max_yaw_offset: m.max_yaw_offset.map(Angle),
        }
    }
}

impl Default for HydroSection {
    fn default() -> Self {
        let h = HydroParams::default();
        HydroSection {
            mass: h.mass,
            izz: h.izz,
            xu_dot: h.xu_dot,
            yv_dot: h.yv_dot,
            nr_dot: h.nr_dot,
            xu: h.xu,
            yv: h.yv,
            nr: h.nr,
        }
    }
}

impl Default for LinksSection {
    fn default() -> Self {
        let g = LinkGeometry::default();
        LinksSection {
            water_density: g.water_density,
            length: g.links.map(|l| l.length),
            lateral_area: g.links.map(|l| l.lateral_area),
            planform_area: g.links.map(|l| l.planform_area),
            drag_coefficient: g.links.map(|l| l.drag_coefficient),
            head: HeadSection {
                length: g.head.length,
                lateral_area: g.head.lateral_area,
                planform_area: g.head.planform_area,
                drag_coefficient: g.head.drag_coefficient,
            },
        }
    }
}

impl Default for HeadSection {
    fn default() -> Self {
        LinksSection::default().head
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            delta_multiples: vec![1.5, 1.75, 2.0],
            guidance_modes: vec![GuidanceModeName::Traditional, GuidanceModeName::Adaptive],
            amplitude_modes: vec![AmplitudeModeName::Max, AmplitudeModeName::Controlled],
        }
    }
}

/// Key in the file that corresponds to a core parameter name.
fn file_key(core_name: &str) -> String {
    match core_name {
        "dt" | "t_max" | "log_decimation" | "metrics_warmup" | "current" => {
            format!("sim.{core_name}")
        }
        "guidance.delta" => "guidance.delta_multiple".into(),
        "cpg.gain" => "cpg.amplitude_gain / cpg.bias_gain".into(),
        "cpg.coupling" => "cpg.coupling_weight / cpg.phase_lags".into(),
        other => other.into(),
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::parse(text, None)
    }

    fn parse(text: &str, path: Option<&Path>) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            ConfigError::Parse {
                path: path.map(Path::to_path_buf),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Checks the sweep axes and every simulation invariant.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sweep;
        if s.delta_multiples.is_empty() {
            return Err(invalid("sweep.delta_multiples", "must not be empty"));
        }
        if s.delta_multiples
            .iter()
            .any(|d| !(*d > 0.0) || !d.is_finite())
        {
            return Err(invalid(
                "sweep.delta_multiples",
                "every entry must be positive",
            ));
        }
        if s.guidance_modes.is_empty() {
            return Err(invalid("sweep.guidance_modes", "must not be empty"));
        }
        if s.amplitude_modes.is_empty() {
            return Err(invalid("sweep.amplitude_modes", "must not be empty"));
        }
        if i64::try_from(self.sim.rng_seed).is_err() {
            return Err(invalid("sim.rng_seed", "must not exceed 2^63 - 1"));
        }
        self.sim_config()?;
        Ok(())
    }

    /// Builds and validates the simulation configuration.
    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        let c = self.build();
        c.validate().map_err(|e| match e {
            bauv_core::Error::InvalidParameter { name, reason } => invalid(&file_key(name), reason),
            other => invalid("path", other.to_string()),
        })?;
        Ok(c)
    }

    fn build(&self) -> SimConfig {
        let osc = OscillatorParams {
            frequency: self.cpg.frequency,
            amplitude_gain: self.cpg.amplitude_gain,
            bias_gain: self.cpg.bias_gain,
            ..Default::default()
        };
        let mut cpg = CpgParams::uniform(osc);
        for (i, lag) in self.cpg.phase_lags.iter().enumerate() {
            cpg.couple(i, i + 1, self.cpg.coupling_weight, lag.0);
        }
        let l = &self.links;
        let mut links = LinkGeometry::default();
        links.water_density = l.water_density;
        links.head = Link {
            length: l.head.length,
            lateral_area: l.head.lateral_area,
            planform_area: l.head.planform_area,
            drag_coefficient: l.head.drag_coefficient,
            ..links.head
        };
        for (i, link) in links.links.iter_mut().enumerate() {
            *link = Link {
                length: l.length[i],
                lateral_area: l.lateral_area[i],
                planform_area: l.planform_area[i],
                drag_coefficient: l.drag_coefficient[i],
                axis: JOINT_AXES[i],
                joint: i + 1,
            };
        }
        let h = &self.hydro;
        let m = &self.mapping;
        let p = &self.path;
        let i = &self.initial;
        SimConfig {
            dt: self.sim.dt,
            t_max: self.sim.t_max,
            initial: VehicleState {
                x: i.x,
                y: i.y,
                psi: i.psi.0,
                u: i.u,
                v: i.v,
                r: i.r,
            },
            hydro: HydroParams {
                mass: h.mass,
                izz: h.izz,
                xu_dot: h.xu_dot,
                yv_dot: h.yv_dot,
                nr_dot: h.nr_dot,
                xu: h.xu,
                yv: h.yv,
                nr: h.nr,
            },
            links,
            guidance: GuidanceParams {
                delta: self.guidance.delta_multiple * BODY_LENGTH,
                gamma: self.guidance.gamma,
                mode: self.guidance.mode.into(),
                switch_radius: self.guidance.switch_radius,
            },
            cpg,
            mapping: MappingParams {
                k: m.k,
                gaussian_width: m.gaussian_width,
                gaussian_center: m.gaussian_center,
                max_amplitude: m.max_amplitude.map(|a| a.0),
                max_yaw_offset: m.max_yaw_offset.map(|a| a.0),
                amplitude_mode: m.amplitude_mode.into(),
            },
            path: SinusoidSpec {
                amplitude: p.amplitude,
                periods: p.periods,
                length: p.length,
                theta: p.theta.0,
                n_points: p.n_points,
                origin: p.origin,
            },
            rng_seed: self.sim.rng_seed,
            log_decimation: self.sim.log_decimation,
            metrics_warmup: self.sim.metrics_warmup,
            current: self.sim.current,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |n| before.len() - n - 1)
        + 1;
    (line, column)
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Config::parse(&text, Some(path))
}
