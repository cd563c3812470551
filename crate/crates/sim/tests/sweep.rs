use bauv_core::simcore::TrialError;
use bauv_core::vehicle::VehicleState;
use bauv_sim::config::{AmplitudeModeName, GuidanceModeName};
use bauv_sim::sweep::{
    plot_file_name, run_cells, run_sweep, trajectory_file_name, SweepSpec, METRICS_FILE,
    WAYPOINTS_FILE,
};
use bauv_sim::Config;
use std::collections::BTreeMap;
use std::path::Path;

fn quick() -> Config {
    let mut cfg = Config::default();
    cfg.sim.t_max = 2.0;
    cfg
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn default_spec_is_twelve_cells_in_table_order() {
    let spec = SweepSpec::from_config(&quick()).unwrap();
    assert_eq!(spec.cells.len(), 12);
    let keys: Vec<(&str, &str, f64)> = spec
        .cells
        .iter()
        .map(|c| {
            (
                c.key.guidance.as_str(),
                c.key.amplitude.as_str(),
                c.key.delta_multiple,
            )
        })
        .collect();
    assert_eq!(keys[0], ("traditional", "max", 1.5));
    assert_eq!(keys[1], ("traditional", "max", 1.75));
    assert_eq!(keys[3], ("traditional", "controlled", 1.5));
    assert_eq!(keys[11], ("adaptive", "controlled", 2.0));
    for c in &spec.cells {
        assert_eq!(c.config.guidance.delta, c.key.delta_multiple * 0.758);
        assert_eq!(c.config.guidance.mode, c.key.guidance);
        assert_eq!(c.config.mapping.amplitude_mode, c.key.amplitude);
    }
}

#[test]
fn default_sweep_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec::from_config(&quick()).unwrap();
    let (outcomes, written, table) = run_sweep(&spec, dir.path(), 2, false).unwrap();
    assert_eq!(outcomes.len(), 12);
    assert_eq!(written.rows.len(), 12);
    assert_eq!(table.lines().count(), 14);
    let files = snapshot(dir.path());
    assert_eq!(files.len(), 12 + 3 + 2);
    for c in &spec.cells {
        assert!(files.contains_key(&trajectory_file_name(&c.key)));
    }
    for d in [1.5, 1.75, 2.0] {
        let svg = String::from_utf8(files[&plot_file_name(d)].clone()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
    }
    let metrics = String::from_utf8(files[METRICS_FILE].clone()).unwrap();
    assert_eq!(metrics.lines().count(), 13);
    assert!(
        metrics.lines().skip(1).all(|l| l.ends_with(',')),
        "wall_seconds must be empty"
    );
    assert!(files.contains_key(WAYPOINTS_FILE));
}

#[test]
fn single_cell_spec() {
    let mut cfg = quick();
    cfg.guidance.mode = GuidanceModeName::Traditional;
    cfg.mapping.amplitude_mode = AmplitudeModeName::Max;
    cfg.guidance.delta_multiple = 1.5;
    let spec = SweepSpec::single(&cfg).unwrap();
    assert_eq!(spec.cells.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&spec, dir.path(), 1, false).unwrap();
    let files = snapshot(dir.path());
    assert_eq!(files.len(), 4);
    assert!(files.contains_key("trajectory_traditional_max_delta1.5.csv"));
    assert!(files.contains_key(&plot_file_name(1.5)));
}

#[test]
fn rerun_overwrites_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick();
    cfg.sweep.delta_multiples = vec![1.75];
    let spec = SweepSpec::from_config(&cfg).unwrap();
    run_sweep(&spec, dir.path(), 1, false).unwrap();
    let first = snapshot(dir.path());
    run_sweep(&spec, dir.path(), 3, false).unwrap();
    assert_eq!(snapshot(dir.path()), first);
}

#[test]
fn timing_fills_wall_seconds() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick();
    cfg.sweep.delta_multiples = vec![1.75];
    cfg.sweep.guidance_modes = vec![GuidanceModeName::Adaptive];
    let spec = SweepSpec::from_config(&cfg).unwrap();
    let (_, written, _) = run_sweep(&spec, dir.path(), 1, true).unwrap();
    assert!(written
        .rows
        .iter()
        .all(|r| r.wall_seconds.is_some_and(|w| w >= 0.0)));
    let metrics = std::fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
    assert!(metrics.lines().skip(1).all(|l| !l.ends_with(',')));
}

#[test]
fn failed_cell_does_not_stop_the_sweep() {
    let mut cfg = quick();
    cfg.sweep.delta_multiples = vec![1.75];
    cfg.sweep.amplitude_modes = vec![AmplitudeModeName::Controlled];
    let mut spec = SweepSpec::from_config(&cfg).unwrap();
    assert_eq!(spec.cells.len(), 2);
    spec.cells[0].config.initial = VehicleState {
        u: 1e300,
        ..Default::default()
    };

    let outcomes = run_cells(&spec, 2);
    assert!(matches!(
        outcomes[0].result,
        Err(TrialError::Aborted { .. })
    ));
    assert!(outcomes[1].result.is_ok());

    let dir = tempfile::tempdir().unwrap();
    let (_, written, table) = run_sweep(&spec, dir.path(), 2, false).unwrap();
    assert!(written.rows[0].rmse.is_none() && written.rows[0].error.is_some());
    assert!(written.rows[1].rmse.is_some());
    assert!(table.contains("abort"));
    let metrics = std::fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
    assert!(metrics
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("traditional,controlled,1.75,,,false,"));
}
