//! CSV writers and the plain-text comparison table.

use std::io::{self, Write};

use bauv_core::simcore::TrialLog;

pub const TRAJECTORY_HEADER: [&str; 21] = [
    "t", "x", "y", "psi", "u", "v", "r", "chi_d", "y_e", "beta_hat", "segment", "th1", "th2",
    "th3", "th4", "th5", "th6", "th7", "tau_x", "tau_y", "tau_n",
];

pub const WAYPOINT_HEADER: [&str; 3] = ["index", "x_m", "y_m"];

pub const METRICS_HEADER: [&str; 8] = [
    "guidance_mode",
    "amplitude_mode",
    "delta_multiple",
    "rmse_m",
    "mae_m",
    "completed",
    "sim_seconds",
    "wall_seconds",
];

/// `x` with 9 significant digits, like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    trim_zeros(&format!("{:.*}", (8 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_trajectory<W: Write>(log: &TrialLog, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for row in &log.rows {
        let mut rec: Vec<String> = [
            row.t,
            row.x,
            row.y,
            row.psi,
            row.u,
            row.v,
            row.r,
            row.chi_d,
            row.y_e,
            row.beta_hat,
        ]
        .iter()
        .map(|v| sig9(*v))
        .collect();
        rec.push(row.segment.to_string());
        rec.extend(row.theta.iter().map(|v| sig9(*v)));
        rec.extend([row.tau.x, row.tau.y, row.tau.n].iter().map(|v| sig9(*v)));
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Waypoints at full precision.
pub fn write_waypoints<W: Write>(points: &[[f64; 2]], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WAYPOINT_HEADER)?;
    for (i, p) in points.iter().enumerate() {
        w.write_record([i.to_string(), p[0].to_string(), p[1].to_string()])?;
    }
    w.flush()
}

/// One line of the metrics CSV. `rmse`/`mae` are `None` for an aborted trial.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub guidance_mode: String,
    pub amplitude_mode: String,
    pub delta_multiple: f64,
    pub rmse: Option<f64>,
    pub mae: Option<f64>,
    pub completed: bool,
    pub sim_seconds: f64,
    pub wall_seconds: Option<f64>,
    /// Failure description for aborted trials; not part of the CSV.
    pub error: Option<String>,
}

pub fn write_metrics<W: Write>(rows: &[MetricsRow], out: W) -> io::Result<()> {
    let opt = |v: Option<f64>| v.map(sig9).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.guidance_mode.clone(),
            r.amplitude_mode.clone(),
            r.delta_multiple.to_string(),
            opt(r.rmse),
            opt(r.mae),
            r.completed.to_string(),
            sig9(r.sim_seconds),
            opt(r.wall_seconds),
        ])?;
    }
    w.flush()
}

/// Right-aligned numeric columns, left-aligned labels.
pub fn format_table(rows: &[MetricsRow]) -> String {
    let header = [
        "guidance",
        "amplitude",
        "delta/L",
        "rmse_m",
        "mae_m",
        "done",
        "sim_s",
    ];
    let fixed = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$}"));
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.guidance_mode.clone(),
                r.amplitude_mode.clone(),
                format!("{:.2}", r.delta_multiple),
                fixed(r.rmse, 4),
                fixed(r.mae, 4),
                if r.error.is_some() {
                    "abort".into()
                } else if r.completed {
                    "yes".into()
                } else {
                    "no".into()
                },
                format!("{:.2}", r.sim_seconds),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for line in &body {
        for (w, cell) in width.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let render = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i < 2 {
                    format!("{c:<w$}", w = width[i])
                } else {
                    format!("{c:>w$}", w = width[i])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = render(&header.map(String::from));
    out.push('\n');
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for line in &body {
        out.push_str(&render(line));
        out.push('\n');
    }
    out
}
