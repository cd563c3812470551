//! Sweep over guidance mode, amplitude mode and look-ahead distance.

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bauv_core::cpg::AmplitudeMode;
use bauv_core::guidance::GuidanceMode;
use bauv_core::metrics::TrialKey;
use bauv_core::pathgen::SinusoidSpec;
use bauv_core::simcore::{run_trial, SimConfig, TrialError, TrialLog, TrialResult};
use bauv_core::vehicle::BODY_LENGTH;
use rayon::prelude::*;

use crate::config::{Config, ConfigError};
use crate::output::{format_table, write_metrics, write_trajectory, write_waypoints, MetricsRow};
use crate::plot::{emit_plot, Trace};

/// One simulation in a sweep.
#[derive(Clone, Debug)]
pub struct Cell {
    pub key: TrialKey,
    pub config: SimConfig,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub cells: Vec<Cell>,
    pub path: SinusoidSpec,
}

impl SweepSpec {
    /// Cross-product of the `[sweep]` axes over the base configuration,
    /// ordered by guidance mode, amplitude mode, then look-ahead multiple.
    pub fn from_config(cfg: &Config) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let base = cfg.sim_config()?;
        let mut guidance: Vec<GuidanceMode> = cfg
            .sweep
            .guidance_modes
            .iter()
            .map(|m| (*m).into())
            .collect();
        let mut amplitude: Vec<AmplitudeMode> = cfg
            .sweep
            .amplitude_modes
            .iter()
            .map(|m| (*m).into())
            .collect();
        let mut deltas = cfg.sweep.delta_multiples.clone();
        guidance.sort();
        guidance.dedup();
        amplitude.sort();
        amplitude.dedup();
        deltas.sort_by(f64::total_cmp);
        deltas.dedup();
        let mut cells = Vec::new();
        for &g in &guidance {
            for &a in &amplitude {
                for &d in &deltas {
                    let mut config = base.clone();
                    config.guidance.mode = g;
                    config.mapping.amplitude_mode = a;
                    config.guidance.delta = d * BODY_LENGTH;
                    config.validate().map_err(|e| ConfigError::Invalid {
                        field: "sweep".into(),
                        reason: e.to_string(),
                    })?;
                    let key = TrialKey {
                        guidance: g,
                        amplitude: a,
                        delta_multiple: d,
                    };
                    cells.push(Cell { key, config });
                }
            }
        }
        Ok(SweepSpec {
            cells,
            path: base.path,
        })
    }

    /// The single trial described by the base configuration.
    pub fn single(cfg: &Config) -> Result<Self, ConfigError> {
        let config = cfg.sim_config()?;
        let key = TrialKey {
            guidance: config.guidance.mode,
            amplitude: config.mapping.amplitude_mode,
            delta_multiple: cfg.guidance.delta_multiple,
        };
        Ok(SweepSpec {
            path: config.path,
            cells: vec![Cell { key, config }],
        })
    }
}

pub struct CellOutcome {
    pub key: TrialKey,
    pub dt: f64,
    pub result: Result<TrialResult, TrialError>,
    pub wall: Duration,
}

impl CellOutcome {
    /// The logged rows, including the partial log of an aborted trial.
    pub fn log(&self) -> Option<&TrialLog> {
        match &self.result {
            Ok(r) => Some(&r.log),
            Err(TrialError::Aborted { log, .. }) => Some(log),
            Err(_) => None,
        }
    }

    pub fn aborted(&self) -> bool {
        self.result.is_err()
    }

    pub fn metrics_row(&self, timing: bool) -> MetricsRow {
        let (rmse, mae, completed, sim_seconds, error) = match &self.result {
            Ok(r) => (
                Some(r.rmse),
                Some(r.mae),
                r.completed,
                r.sim_seconds(),
                None,
            ),
            Err(e) => {
                let sim = match e {
                    TrialError::Aborted { error, .. } => error.step as f64 * self.dt,
                    _ => 0.0,
                };
                (None, None, false, sim, Some(e.to_string()))
            }
        };
        MetricsRow {
            guidance_mode: self.key.guidance.as_str().into(),
            amplitude_mode: self.key.amplitude.as_str().into(),
            delta_multiple: self.key.delta_multiple,
            rmse,
            mae,
            completed,
            sim_seconds,
            wall_seconds: timing.then_some(self.wall.as_secs_f64()),
            error,
        }
    }
}

/// Runs every cell on `jobs` worker threads (0 picks the core count).
/// The outcomes keep the cell order.
pub fn run_cells(spec: &SweepSpec, jobs: usize) -> Vec<CellOutcome> {
    let run = |cell: &Cell| {
        let start = Instant::now();
        let result = run_trial(&cell.config);
        CellOutcome {
            key: cell.key,
            dt: cell.config.dt,
            result,
            wall: start.elapsed(),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| spec.cells.par_iter().map(run).collect())
}

pub fn trajectory_file_name(key: &TrialKey) -> String {
    format!(
        "trajectory_{}_{}_delta{}.csv",
        key.guidance.as_str(),
        key.amplitude.as_str(),
        key.delta_multiple
    )
}

pub fn plot_file_name(delta_multiple: f64) -> String {
    format!("trajectories_delta{delta_multiple}.svg")
}

pub const METRICS_FILE: &str = "metrics.csv";
pub const WAYPOINTS_FILE: &str = "waypoints.csv";

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// What [`write_outputs`] produced.
pub struct Written {
    pub rows: Vec<MetricsRow>,
    pub files: Vec<PathBuf>,
}

/// Writes one trajectory CSV per trial, the waypoints, the metrics CSV and
/// one plot per look-ahead multiple. Called from a single thread after every
/// trial has finished.
pub fn write_outputs(
    spec: &SweepSpec,
    outcomes: &[CellOutcome],
    out_dir: &Path,
    timing: bool,
) -> io::Result<Written> {
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let reference = spec
        .path
        .points()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;

    let p = out_dir.join(WAYPOINTS_FILE);
    write_waypoints(&reference, create(&p)?)?;
    files.push(p);

    for o in outcomes {
        if let Some(log) = o.log() {
            let p = out_dir.join(trajectory_file_name(&o.key));
            write_trajectory(log, create(&p)?)?;
            files.push(p);
        }
    }

    let rows: Vec<MetricsRow> = outcomes.iter().map(|o| o.metrics_row(timing)).collect();
    let p = out_dir.join(METRICS_FILE);
    write_metrics(&rows, create(&p)?)?;
    files.push(p);

    let mut deltas: Vec<f64> = outcomes.iter().map(|o| o.key.delta_multiple).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    for d in deltas {
        let traces: Vec<Trace> = outcomes
            .iter()
            .filter(|o| o.key.delta_multiple == d)
            .filter_map(|o| {
                o.log().map(|log| Trace {
                    label: format!(
                        "{} LOS, {} amplitude",
                        o.key.guidance.as_str(),
                        o.key.amplitude.as_str()
                    ),
                    log,
                })
            })
            .collect();
        let p = out_dir.join(plot_file_name(d));
        let title = format!("Path following, look-ahead {d} L");
        emit_plot(&title, &reference, &traces, create(&p)?)?;
        files.push(p);
    }
    Ok(Written { rows, files })
}

/// Runs a sweep and writes its artifacts. Returns the metrics rows and the
/// aligned table.
pub fn run_sweep(
    spec: &SweepSpec,
    out_dir: &Path,
    jobs: usize,
    timing: bool,
) -> io::Result<(Vec<CellOutcome>, Written, String)> {
    let outcomes = run_cells(spec, jobs);
    let written = write_outputs(spec, &outcomes, out_dir, timing)?;
    let table = format_table(&written.rows);
    Ok((outcomes, written, table))
}
